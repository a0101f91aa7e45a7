#include "naba/repkit.hpp"

#include <algorithm>
#include <numeric>

#include "naba/errors.hpp"

namespace naba {

namespace {

QMat unit(int dim, int i, int j) {
    QMat m(dim, dim);
    m(i, j) = 1;
    return m;
}

// ε-coordinates of weight vectors converted to α-coordinates per family.
std::vector<Rat> eps_to_alpha(const RootSystem& rs, const std::vector<Rat>& eps) {
    const int r = rs.rank;
    std::vector<Rat> a(r, Rat(0));
    switch (rs.family) {
        case Family::A: {
            // ε_k (k=1..r+1) with Σε = 0 projected out: ε_k = ω_1 − α_1 − ... − α_{k-1}
            // handled by the caller; not used here
            throw std::logic_error("eps_to_alpha: A-type handled separately");
        }
        case Family::B: {
            // ε_k = α_k + ... + α_r
            for (int k = 1; k <= r; ++k) {
                const Rat& c = eps[k - 1];
                if (sgn(c) == 0) continue;
                for (int j = k; j <= r; ++j) a[j - 1] += c;
            }
            break;
        }
        case Family::C: {
            // ε_k = α_k + ... + α_{r-1} + α_r/2
            for (int k = 1; k <= r; ++k) {
                const Rat& c = eps[k - 1];
                if (sgn(c) == 0) continue;
                for (int j = k; j <= r - 1; ++j) a[j - 1] += c;
                a[r - 1] += c * rat(1, 2);
            }
            break;
        }
        case Family::D: {
            // ε_k = α_k + ... + α_{r-2} + (α_{r-1} + α_r)/2, ε_r = (α_r − α_{r-1})/2
            for (int k = 1; k <= r; ++k) {
                const Rat& c = eps[k - 1];
                if (sgn(c) == 0) continue;
                if (k <= r - 1) {
                    for (int j = k; j <= r - 2; ++j) a[j - 1] += c;
                    a[r - 2] += c * rat(1, 2);
                    a[r - 1] += c * rat(1, 2);
                } else {
                    a[r - 2] -= c * rat(1, 2);
                    a[r - 1] += c * rat(1, 2);
                }
            }
            break;
        }
    }
    return a;
}

MatrixRep defining_rep_a(const RootSystem& rs) {
    const int r = rs.rank, n = r + 1;
    MatrixRep rep;
    rep.algebra = rs;
    rep.dim = n;
    for (int i = 1; i <= r; ++i) {
        rep.e.push_back(unit(n, i - 1, i));
        rep.f.push_back(unit(n, i, i - 1));
        QMat hi(n, n);
        hi(i - 1, i - 1) = 1;
        hi(i, i) = -1;
        rep.h.push_back(hi);
    }
    // μ_k = ω_1 − α_1 − ... − α_{k-1}
    std::vector<Rat> mu = rs.fundamental_weights[0];
    for (int k = 0; k < n; ++k) {
        rep.basis_weights.push_back(mu);
        if (k < r)
            for (int j = 0; j < r; ++j) mu[j] -= rs.simple_roots[k][j];
    }
    return rep;
}

MatrixRep defining_rep_bcd(const RootSystem& rs) {
    const int r = rs.rank;
    const bool is_b = rs.family == Family::B;
    const bool is_c = rs.family == Family::C;
    const int n = is_b ? 2 * r + 1 : 2 * r;
    // index layout: v_1..v_r, [v_0], v_{-r}..v_{-1}
    auto pos = [&](int k) { return k - 1; };               // v_k, k = 1..r
    auto neg = [&](int k) { return n - k; };               // v_{-k}
    const int zero = r;                                    // v_0 (B only)

    MatrixRep rep;
    rep.algebra = rs;
    rep.dim = n;
    for (int i = 1; i <= r; ++i) {
        QMat e(n, n), f(n, n), h(n, n);
        if (i < r) {
            e = unit(n, pos(i), pos(i + 1)) - unit(n, neg(i + 1), neg(i));
            f = unit(n, pos(i + 1), pos(i)) - unit(n, neg(i), neg(i + 1));
            h = unit(n, pos(i), pos(i)) - unit(n, pos(i + 1), pos(i + 1)) +
                unit(n, neg(i + 1), neg(i + 1)) - unit(n, neg(i), neg(i));
        } else if (is_b) {
            e = unit(n, pos(r), zero) * Rat(2) + unit(n, zero, neg(r));
            f = unit(n, zero, pos(r)) + unit(n, neg(r), zero) * Rat(2);
            h = (unit(n, pos(r), pos(r)) - unit(n, neg(r), neg(r))) * Rat(2);
        } else if (is_c) {
            e = unit(n, pos(r), neg(r));
            f = unit(n, neg(r), pos(r));
            h = unit(n, pos(r), pos(r)) - unit(n, neg(r), neg(r));
        } else {
            e = unit(n, pos(r - 1), neg(r)) - unit(n, pos(r), neg(r - 1));
            f = unit(n, neg(r), pos(r - 1)) - unit(n, neg(r - 1), pos(r));
            h = unit(n, pos(r - 1), pos(r - 1)) + unit(n, pos(r), pos(r)) -
                unit(n, neg(r), neg(r)) - unit(n, neg(r - 1), neg(r - 1));
        }
        // symmetrized convention: h_i ↦ d_i h_i, e_i ↦ d_i e_i
        const Rat d = rs.symmetrizers[i - 1];
        rep.e.push_back(e * d);
        rep.f.push_back(f);
        rep.h.push_back(h * d);
    }
    for (int k = 1; k <= r; ++k) {
        std::vector<Rat> eps(r, Rat(0));
        eps[k - 1] = 1;
        rep.basis_weights.push_back(eps_to_alpha(rs, eps));
    }
    if (is_b) rep.basis_weights.push_back(std::vector<Rat>(r, Rat(0)));
    for (int k = r; k >= 1; --k) {
        std::vector<Rat> eps(r, Rat(0));
        eps[k - 1] = -1;
        rep.basis_weights.push_back(eps_to_alpha(rs, eps));
    }
    return rep;
}

void check_same_algebra(const RootSystem& a, const RootSystem& b) {
    if (a.family != b.family || a.rank != b.rank || !(a.cartan == b.cartan))
        throw AlgebraMismatch(a.name() + " vs " + b.name());
}

}  // namespace

MatrixRep defining_rep(const RootSystem& rs) {
    switch (rs.family) {
        case Family::A: return defining_rep_a(rs);
        case Family::B:
        case Family::C:
        case Family::D: return defining_rep_bcd(rs);
    }
    throw UnsupportedType("defining_rep");
}

QMat charge_operator(const MatrixRep& rep, const NestingData& nesting) {
    check_same_algebra(rep.algebra, nesting.parent);
    std::vector<Rat> cw = nesting.coweight();
    QMat hp(rep.dim, rep.dim);
    for (int i = 0; i < rep.algebra.rank; ++i)
        if (sgn(cw[i]) != 0) hp = hp + rep.h[i] * cw[i];
    return -hp;
}

int ChargeDecomposition::block_of(int idx) const {
    for (size_t J = 0; J < blocks.size(); ++J)
        if (idx >= blocks[J].offset && idx < blocks[J].offset + blocks[J].dim)
            return static_cast<int>(J);
    throw std::out_of_range("block_of");
}

ChargeDecomposition charge_decompose(const MatrixRep& rep, const NestingData& nesting) {
    check_same_algebra(rep.algebra, nesting.parent);
    const int n = rep.dim, r = rep.algebra.rank;
    std::vector<Rat> cw = nesting.coweight();
    std::vector<Rat> charge(n);
    for (int k = 0; k < n; ++k) {
        Rat q = 0;
        for (int i = 0; i < r; ++i) q += rep.algebra.pairing(rep.basis_weights[k], rep.algebra.simple_roots[i]) * cw[i];
        charge[k] = -q;
    }

    // sorted basis: charge ascending, then weight lex descending, then index
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        if (charge[x] != charge[y]) return charge[x] < charge[y];
        return rep.basis_weights[x] > rep.basis_weights[y];
    });

    QMat perm(n, n);
    for (int newi = 0; newi < n; ++newi) perm(newi, order[newi]) = 1;
    QMat permT = perm.transpose();

    ChargeDecomposition dec;
    dec.nesting = nesting;
    dec.rep.algebra = rep.algebra;
    dec.rep.dim = n;
    for (int i = 0; i < r; ++i) {
        dec.rep.e.push_back(perm * rep.e[i] * permT);
        dec.rep.f.push_back(perm * rep.f[i] * permT);
        dec.rep.h.push_back(perm * rep.h[i] * permT);
    }
    for (int k = 0; k < n; ++k) dec.rep.basis_weights.push_back(rep.basis_weights[order[k]]);

    std::vector<Rat> sorted_charge(n);
    for (int k = 0; k < n; ++k) sorted_charge[k] = charge[order[k]];

    // integer ladder check
    std::vector<Rat> values;
    for (const Rat& q : sorted_charge)
        if (values.empty() || values.back() != q) values.push_back(q);
    for (size_t j = 1; j < values.size(); ++j)
        if (values[j] - values[j - 1] != 1)
            throw NonIntegralSpectrum("charge gap " + to_string(values[j] - values[j - 1]));
    dec.c0 = values.front();
    dec.N = static_cast<int>(values.size()) - 1;

    int off = 0;
    for (const Rat& v : values) {
        ChargeBlock blk;
        blk.charge = v;
        blk.offset = off;
        while (off < n && sorted_charge[off] == v) ++off;
        blk.dim = off - blk.offset;
        dec.blocks.push_back(blk);
    }

    // ĝ structure of each block: unique highest ray, orbit spans the block
    const int p = nesting.removed_index;
    std::vector<int> sub_nodes;
    for (int i = 1; i <= r; ++i)
        if (i != p) sub_nodes.push_back(i);

    for (auto& blk : dec.blocks) {
        std::vector<int> idx(blk.dim);
        std::iota(idx.begin(), idx.end(), blk.offset);
        // joint kernel of raising operators restricted to the block
        QMat stacked(0, blk.dim);
        {
            std::vector<QMat> rows;
            int total = 0;
            for (int i : sub_nodes) {
                QMat sub = dec.rep.e[i - 1].submatrix(idx, idx);
                rows.push_back(sub);
                total += sub.rows();
            }
            QMat s(total, blk.dim);
            int at = 0;
            for (const auto& m : rows) {
                for (int a = 0; a < m.rows(); ++a)
                    for (int b = 0; b < m.cols(); ++b) s(at + a, b) = m(a, b);
                at += m.rows();
            }
            stacked = s;
        }
        QMat ker = sub_nodes.empty() ? QMat::identity(blk.dim) : stacked.kernel();
        if (ker.cols() != 1) {
            if (sub_nodes.empty() && blk.dim == 1) {
                // trivial ĝ: every 1-dim block is its own highest ray
            } else {
                throw NonIntegralSpectrum("charge block is not ĝ-irreducible: " +
                                          std::to_string(ker.cols()) + " highest rays");
            }
        }
        // highest ray must be a basis ray in the weight basis
        int hw_local = -1;
        for (int a = 0; a < blk.dim; ++a)
            if (sgn(ker(a, 0)) != 0) {
                if (hw_local >= 0) hw_local = -2;
                else hw_local = a;
            }
        if (hw_local == -2) {
            // highest vector not a coordinate ray: fall back to first nonzero
            for (int a = 0; a < blk.dim; ++a)
                if (sgn(ker(a, 0)) != 0) { hw_local = a; break; }
        }
        blk.hw_index = blk.offset + std::max(hw_local, 0);
        blk.hw_weight = dec.rep.basis_weights[blk.hw_index];
        for (int i : sub_nodes)
            blk.sub_labels.push_back(dec.rep.algebra.dynkin_label(blk.hw_weight, i));

        // orbit of the highest ray under lowering operators spans the block
        if (!sub_nodes.empty()) {
            QMat span(blk.dim, 1);
            for (int a = 0; a < blk.dim; ++a) span(a, 0) = ker(a, 0);
            int rank_now = 1;
            bool grew = true;
            while (grew && rank_now < blk.dim) {
                grew = false;
                for (int i : sub_nodes) {
                    QMat sub = dec.rep.f[i - 1].submatrix(idx, idx);
                    QMat cand(blk.dim, span.cols() * 2);
                    QMat lowered = sub * span;
                    for (int a = 0; a < blk.dim; ++a)
                        for (int c = 0; c < span.cols(); ++c) {
                            cand(a, c) = span(a, c);
                            cand(a, span.cols() + c) = lowered(a, c);
                        }
                    int rk = cand.rank();
                    if (rk > rank_now) {
                        // keep pivot columns as the new spanning set
                        auto piv = cand.pivot_columns();
                        span = cand.columns(piv);
                        rank_now = rk;
                        grew = true;
                    }
                }
            }
            if (rank_now != blk.dim)
                throw NonIntegralSpectrum("ĝ-orbit does not span charge block");
        }
    }
    return dec;
}

std::vector<TensorSector> tensor_charge_blocks(const ChargeDecomposition& a,
                                               const ChargeDecomposition& b) {
    if (a.nesting.parent.name() != b.nesting.parent.name() ||
        a.nesting.removed_index != b.nesting.removed_index)
        throw NestingMismatch(a.nesting.parent.name() + " vs " + b.nesting.parent.name());
    std::vector<TensorSector> sectors(a.N + b.N + 1);
    for (int K = 0; K <= a.N + b.N; ++K) sectors[K].total_charge_label = K;
    for (int I = 0; I <= a.N; ++I)
        for (int J = 0; J <= b.N; ++J) {
            auto& s = sectors[I + J];
            s.pairs.emplace_back(I, J);
            s.dim += a.blocks[I].dim * b.blocks[J].dim;
        }
    for (auto& s : sectors)
        std::sort(s.pairs.begin(), s.pairs.end());
    return sectors;
}

std::optional<QMat> invariant_form(const MatrixRep& rep) {
    const int n = rep.dim;
    std::vector<const QMat*> gens;
    for (const auto& m : rep.e) gens.push_back(&m);
    for (const auto& m : rep.f) gens.push_back(&m);
    // x^T G + G x = 0 for generators x; h-equations follow from [e,f] = h
    QMat sys(static_cast<int>(gens.size()) * n * n, n * n);
    int row = 0;
    for (const QMat* gp : gens) {
        const QMat& x = *gp;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                // (x^T G + G x)(i,j) = Σ_k x(k,i) G(k,j) + G(i,k) x(k,j)
                for (int k = 0; k < n; ++k) {
                    sys(row, k * n + j) += x(k, i);
                    sys(row, i * n + k) += x(k, j);
                }
                ++row;
            }
    }
    QMat ker = sys.kernel();
    if (ker.cols() != 1) return std::nullopt;
    QMat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = ker(i * n + j, 0);
    // normalize: first nonzero entry = 1
    for (int i = 0; i < n * n; ++i)
        if (sgn(ker(i, 0)) != 0) {
            Rat lead = ker(i, 0);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) g(a, b) /= lead;
            break;
        }
    return g;
}

}  // namespace naba
