#include "naba/rootsys.hpp"

#include <algorithm>
#include <map>

#include "naba/errors.hpp"

namespace naba {

char family_letter(Family f) {
    switch (f) {
        case Family::A: return 'A';
        case Family::B: return 'B';
        case Family::C: return 'C';
        case Family::D: return 'D';
    }
    return '?';
}

Family family_from_letter(char c) {
    switch (c) {
        case 'A': case 'a': return Family::A;
        case 'B': case 'b': return Family::B;
        case 'C': case 'c': return Family::C;
        case 'D': case 'd': return Family::D;
        case 'E': case 'e': case 'F': case 'f': case 'G': case 'g':
            throw UnsupportedType("exceptional family '" + std::string(1, c) + "' has no R-matrix backend");
    }
    throw UnsupportedType("unknown family letter '" + std::string(1, c) + "'");
}

Rat RootSystem::pairing(const std::vector<Rat>& x, const std::vector<Rat>& y) const {
    Rat acc = 0;
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j) acc += x[i] * gram(i, j) * y[j];
    return acc;
}

Rat RootSystem::dynkin_label(const std::vector<Rat>& x, int i) const {
    Rat acc = 0;
    for (int j = 0; j < rank; ++j) acc += x[j] * gram(j, i - 1);
    return acc / symmetrizers[i - 1];
}

std::vector<int> RootSystem::neighbours(int p) const {
    std::vector<int> out;
    for (int j = 1; j <= rank; ++j)
        if (j != p && sgn(cartan(p - 1, j - 1)) != 0) out.push_back(j);
    return out;
}

bool RootSystem::is_end_node(int p) const { return neighbours(p).size() <= 1; }

namespace {

// Assemble derived fields from cartan + symmetrizers.
void finish(RootSystem& rs) {
    const int r = rs.rank;
    rs.gram = QMat(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) rs.gram(i, j) = rs.cartan(i, j) * rs.symmetrizers[j];
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            if (rs.gram(i, j) != rs.gram(j, i)) throw UnsupportedType("gram matrix not symmetric");
    rs.gram_inv = rs.gram.inverse();

    rs.simple_roots.assign(r, std::vector<Rat>(r, Rat(0)));
    for (int i = 0; i < r; ++i) rs.simple_roots[i][i] = 1;

    rs.fundamental_weights.assign(r, std::vector<Rat>(r));
    rs.fundamental_coweights.assign(r, std::vector<Rat>(r));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            rs.fundamental_coweights[i][j] = rs.gram_inv(j, i);
            rs.fundamental_weights[i][j] = rs.symmetrizers[i] * rs.gram_inv(j, i);
        }
}

QMat simply_laced_chain(int r) {
    QMat a(r, r);
    for (int i = 0; i < r; ++i) {
        a(i, i) = 2;
        if (i + 1 < r) { a(i, i + 1) = -1; a(i + 1, i) = -1; }
    }
    return a;
}

}  // namespace

RootSystem build_root_system(Family family, int rank) {
    RootSystem rs;
    rs.family = family;
    rs.rank = rank;
    switch (family) {
        case Family::A: {
            if (rank < 1) throw RankTooSmall("A requires rank >= 1");
            rs.cartan = simply_laced_chain(rank);
            rs.symmetrizers.assign(rank, Rat(1));
            rs.highest_root_coeffs.assign(rank, 1);
            break;
        }
        case Family::B: {
            if (rank < 2) throw RankTooSmall("B requires rank >= 2 (B1 coincides with A1)");
            rs.cartan = simply_laced_chain(rank);
            rs.cartan(rank - 2, rank - 1) = -2;  // a_{r-1,r}: (α_{r-1},α_r)/d_r = -1/(1/2)
            rs.symmetrizers.assign(rank, Rat(1));
            rs.symmetrizers[rank - 1] = rat(1, 2);
            rs.highest_root_coeffs.assign(rank, 2);
            rs.highest_root_coeffs[0] = 1;
            break;
        }
        case Family::C: {
            if (rank < 2) throw RankTooSmall("C requires rank >= 2 (C1 coincides with A1)");
            rs.cartan = simply_laced_chain(rank);
            rs.cartan(rank - 1, rank - 2) = -2;  // a_{r,r-1}: (α_r,α_{r-1})/d_{r-1}
            rs.symmetrizers.assign(rank, rat(1, 2));
            rs.symmetrizers[rank - 1] = 1;
            rs.highest_root_coeffs.assign(rank, 2);
            rs.highest_root_coeffs[rank - 1] = 1;
            break;
        }
        case Family::D: {
            if (rank < 3) throw RankTooSmall("D requires rank >= 3 (lower ranks coincide with A-type)");
            QMat a(rank, rank);
            for (int i = 0; i < rank; ++i) a(i, i) = 2;
            for (int i = 0; i + 1 < rank - 1; ++i) { a(i, i + 1) = -1; a(i + 1, i) = -1; }
            a(rank - 3, rank - 1) = -1;  // node r attaches to r-2
            a(rank - 1, rank - 3) = -1;
            rs.cartan = a;
            rs.symmetrizers.assign(rank, Rat(1));
            rs.highest_root_coeffs.assign(rank, 2);
            rs.highest_root_coeffs[0] = 1;
            rs.highest_root_coeffs[rank - 2] = 1;
            rs.highest_root_coeffs[rank - 1] = 1;
            if (rank == 3) rs.highest_root_coeffs = {1, 1, 1};
            break;
        }
    }
    finish(rs);
    return rs;
}

RootSystem build_root_system(const std::string& name) {
    if (name.size() < 2) throw UnsupportedType("algebra spec too short: '" + name + "'");
    Family f = family_from_letter(name[0]);
    int rank = std::stoi(name.substr(1));
    return build_root_system(f, rank);
}

std::vector<std::vector<long>> positive_roots(const RootSystem& rs) {
    const int r = rs.rank;
    std::map<std::vector<long>, bool> known;
    std::vector<std::vector<long>> frontier;
    for (int i = 0; i < r; ++i) {
        std::vector<long> a(r, 0);
        a[i] = 1;
        known[a] = true;
        frontier.push_back(a);
    }
    // ⟨β, α_i^∨⟩ = Σ_j β_j a_ji
    auto pair_with_coroot = [&](const std::vector<long>& b, int i) {
        Rat acc = 0;
        for (int j = 0; j < r; ++j) acc += Rat(b[j]) * rs.cartan(j, i);
        return acc;
    };
    while (!frontier.empty()) {
        std::vector<std::vector<long>> next;
        for (const auto& b : frontier) {
            for (int i = 0; i < r; ++i) {
                // q = how far the string extends downward from b in direction α_i
                std::vector<long> down = b;
                long q = 0;
                for (;;) {
                    down[i] -= 1;
                    bool neg = std::all_of(down.begin(), down.end(), [](long x) { return x <= 0; });
                    bool nonneg_root = known.count(down) > 0;
                    bool is_neg_simple = false;
                    if (neg) {
                        long s = 0;
                        for (long x : down) s += -x;
                        is_neg_simple = (s == 0);  // reached zero
                    }
                    if (nonneg_root || is_neg_simple) { ++q; if (is_neg_simple) break; }
                    else break;
                }
                Rat pairing = pair_with_coroot(b, i);
                if (Rat(q) - pairing > 0) {
                    std::vector<long> up = b;
                    up[i] += 1;
                    if (!known.count(up)) { known[up] = true; next.push_back(up); }
                }
            }
        }
        frontier = std::move(next);
    }
    std::vector<std::vector<long>> out;
    for (const auto& [root, _] : known) out.push_back(root);
    auto height = [](const std::vector<long>& v) {
        long h = 0;
        for (long x : v) h += x;
        return h;
    };
    std::sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
        long hx = height(x), hy = height(y);
        return hx != hy ? hx < hy : x < y;
    });
    return out;
}

NestingData remove_node(const RootSystem& rs, int p) {
    if (p < 1 || p > rs.rank) throw NotEndNode("node index out of range");
    if (!rs.is_end_node(p))
        throw NotEndNode("node " + std::to_string(p) + " of " + rs.name() + " has " +
                         std::to_string(rs.neighbours(p).size()) + " neighbours");
    NestingData nd;
    nd.parent = rs;
    nd.removed_index = p;
    nd.max_charge = rs.highest_root_coeffs[p - 1];

    const int sr = rs.rank - 1;
    RootSystem sub;
    sub.rank = sr;
    sub.cartan = QMat(sr, sr);
    sub.symmetrizers.resize(sr);
    nd.node_map.resize(sr);
    int ii = 0;
    for (int i = 1; i <= rs.rank; ++i) {
        if (i == p) continue;
        nd.node_map[ii] = i;
        sub.symmetrizers[ii] = rs.symmetrizers[i - 1];
        int jj = 0;
        for (int j = 1; j <= rs.rank; ++j) {
            if (j == p) continue;
            sub.cartan(ii, jj) = rs.cartan(i - 1, j - 1);
            ++jj;
        }
        ++ii;
    }
    if (sr == 0) {
        sub.family = Family::A;
        nd.sub = sub;
        return nd;
    }
    // identify the induced family; end-node deletion of a classical diagram
    // lands on the standard labelling of another classical diagram
    bool found = false;
    for (Family f : {Family::A, Family::B, Family::C, Family::D}) {
        RootSystem cand;
        try {
            cand = build_root_system(f, sr);
        } catch (const RankTooSmall&) {
            continue;
        }
        if (cand.cartan == sub.cartan) {
            sub.family = f;
            found = true;
            break;
        }
    }
    if (!found) throw UnsupportedType("induced subdiagram is not classical in standard labelling");
    // keep the inherited symmetrizers: the subalgebra of a short-root end may
    // carry a rescaled form (Y_{dħ} in the paper's terms)
    finish(sub);
    // enumeration fixes the highest-root coefficients of the subalgebra
    auto roots = positive_roots(sub);
    sub.highest_root_coeffs.assign(sr, 0);
    if (!roots.empty()) {
        const auto& top = roots.back();
        sub.highest_root_coeffs.assign(top.begin(), top.end());
    }
    nd.sub = sub;
    return nd;
}

std::vector<Rat> NestingData::coweight() const {
    std::vector<Rat> w(parent.rank);
    for (int j = 0; j < parent.rank; ++j) w[j] = parent.gram_inv(j, removed_index - 1);
    return w;
}

std::vector<Rat> charge_coweight(const NestingData& nd) { return nd.coweight(); }

}  // namespace naba
