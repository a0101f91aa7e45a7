#include "naba/chain.hpp"

#include <algorithm>

#include "naba/errors.hpp"
#include "naba/prng.hpp"

namespace naba {

namespace {

void validate_twist(const ChainSpec& spec) {
    if (static_cast<int>(spec.twist.size()) != spec.aux_dim())
        throw NestingMismatch("twist size does not match the auxiliary dimension");
    for (const Rat& z : spec.twist)
        if (sgn(z) == 0) throw NestingMismatch("twist must be invertible");
    // hypothesis of the commuting-transfer corollary: Z^I ⊗ Z^J commutes with
    // D^{IJ}(w); checked exactly at three generic points
    Prng rng(0x7157);
    std::vector<Rat> avoid = spec.r_aux_aux.singular;
    avoid.push_back(Rat(0));
    const int N = spec.aux.N;
    int done = 0, tries = 0;
    while (done < 3) {
        Rat w = rng.next_rat_avoiding(avoid, 10, 4);
        try {
            for (int I = 0; I <= N; ++I)
                for (int J = 0; J <= N; ++J) {
                    const auto& bi = spec.aux.blocks[I];
                    const auto& bj = spec.aux.blocks[J];
                    QMat zi(bi.dim, bi.dim), zj(bj.dim, bj.dim);
                    for (int k = 0; k < bi.dim; ++k) zi(k, k) = spec.twist[bi.offset + k];
                    for (int k = 0; k < bj.dim; ++k) zj(k, k) = spec.twist[bj.offset + k];
                    QMat zz = kron(zi, zj);
                    if (!commutator(zz, spec.dfam.block(I, J, w)).is_zero())
                        throw NestingMismatch("twist does not commute with D^{" + std::to_string(I) +
                                              "," + std::to_string(J) + "}");
                }
            ++done;
        } catch (const SingularDBlock&) {
            if (++tries > 50) throw;
        }
    }
}

}  // namespace

ChainSpec defining_chain(const std::string& algebra, int p, int length, std::vector<Rat> shifts,
                         std::vector<Rat> twist, const Rat& hbar) {
    RootSystem rs = build_root_system(algebra);
    NestingData nd = remove_node(rs, p);
    ChargeDecomposition dec = charge_decompose(defining_rep(rs), nd);
    RMatrix r = (rs.family == Family::A) ? yang_rmatrix(dec.rep.dim, hbar)
                                         : zz_rmatrix(dec.rep, hbar, nullptr);
    if (shifts.empty()) shifts.assign(length, Rat(0));
    if (static_cast<int>(shifts.size()) != length)
        throw NestingMismatch("shift count does not match the chain length");
    ChainSpec spec{nd, dec, r, DFamily(r, block_structure(dec)), {}, {}, hbar};
    for (int l = 0; l < length; ++l) spec.sites.push_back({dec, shifts[l], r});
    if (twist.empty()) twist.assign(dec.rep.dim, Rat(1));
    spec.twist = std::move(twist);
    validate_twist(spec);
    return spec;
}

ChainSpec spin1_aux_chain(int length, std::vector<Rat> shifts, const Rat& hbar) {
    Sl2Tower t = sl2_spin1_tower(hbar);
    RootSystem a1 = build_root_system("A1");
    NestingData nd = remove_node(a1, 1);
    ChargeDecomposition aux = charge_decompose(t.rep_w, nd);
    ChargeDecomposition site = charge_decompose(t.rep_v, nd);
    if (shifts.empty()) shifts.assign(length, Rat(0));
    if (static_cast<int>(shifts.size()) != length)
        throw NestingMismatch("shift count does not match the chain length");
    ChainSpec spec{nd, aux, t.r_ww, DFamily(t.r_ww, block_structure(aux)), {}, {}, hbar};
    for (int l = 0; l < length; ++l) spec.sites.push_back({site, shifts[l], t.r_wv});
    spec.twist.assign(aux.rep.dim, Rat(1));
    validate_twist(spec);
    return spec;
}

template <typename K>
Mat<K> monodromy(const ChainSpec& spec, const K& u) {
    const int L = static_cast<int>(spec.sites.size());
    std::vector<int> dims;
    dims.push_back(spec.aux_dim());
    for (const auto& s : spec.sites) dims.push_back(s.dec.rep.dim);
    Mat<K> t = Mat<K>::identity(total_dim(dims));
    // ordered product R_{a,L}(u−c_L) ··· R_{a,1}(u−c_1)
    for (int l = 0; l < L; ++l) {
        K arg = u - to_field<K>(spec.sites[l].shift);
        Mat<K> r = reval(spec.sites[l].r_aux_site, arg);
        t = on_two_legs(r, dims, 0, 1 + l) * t;
    }
    return t;
}

template QMat monodromy<Rat>(const ChainSpec&, const Rat&);
template CMat monodromy<Cplx>(const ChainSpec&, const Cplx&);

template <typename K>
Mat<K> t_block(const ChainSpec& spec, const Mat<K>& t, int I, int J) {
    const int dm = spec.m_dim();
    const auto& bi = spec.aux.blocks[I];
    const auto& bj = spec.aux.blocks[J];
    std::vector<int> rows, cols;
    rows.reserve(bi.dim * dm);
    cols.reserve(bj.dim * dm);
    for (int a = 0; a < bi.dim; ++a)
        for (int m = 0; m < dm; ++m) rows.push_back((bi.offset + a) * dm + m);
    for (int b = 0; b < bj.dim; ++b)
        for (int m = 0; m < dm; ++m) cols.push_back((bj.offset + b) * dm + m);
    return t.submatrix(rows, cols);
}

template QMat t_block<Rat>(const ChainSpec&, const QMat&, int, int);
template CMat t_block<Cplx>(const ChainSpec&, const CMat&, int, int);

template <typename K>
Mat<K> transfer(const ChainSpec& spec, const K& u) {
    Mat<K> t = monodromy(spec, u);
    Mat<K> z(spec.aux_dim(), spec.aux_dim());
    for (int a = 0; a < spec.aux_dim(); ++a) z(a, a) = to_field<K>(spec.twist[a]);
    return weighted_partial_trace_first(t, z, spec.aux_dim(), spec.m_dim());
}

template QMat transfer<Rat>(const ChainSpec&, const Rat&);
template CMat transfer<Cplx>(const ChainSpec&, const Cplx&);

int m_charge(const ChainSpec& spec, int m_index) {
    int charge = 0;
    int rem = m_index;
    for (int l = static_cast<int>(spec.sites.size()) - 1; l >= 0; --l) {
        const int d = spec.sites[l].dec.rep.dim;
        charge += spec.sites[l].dec.block_of(rem % d);
        rem /= d;
    }
    return charge;
}

std::vector<int> vacuum_indices(const ChainSpec& spec) {
    std::vector<int> out;
    for (int m = 0; m < spec.m_dim(); ++m)
        if (m_charge(spec, m) == 0) out.push_back(m);
    return out;
}

CheckResult check_vacuum_characterization(const ChainSpec& spec, uint64_t seed) {
    const std::vector<int> vac = vacuum_indices(spec);
    const int dm = spec.m_dim();
    const int N = spec.aux.N;
    Prng rng(seed);
    std::vector<Rat> avoid = spec.r_aux_aux.singular;
    for (const auto& s : spec.sites)
        for (const Rat& sg : s.r_aux_site.singular) avoid.push_back(sg + s.shift);
    // slice each C block per auxiliary column b, giving maps M → V^I ⊗ M, and
    // stack them across blocks and sample points: the joint kernel over M must
    // be exactly span{e_m : m ∈ M⁰}
    std::vector<QMat> slices;
    int rows = 0;
    for (int sample = 0; sample < 3; ++sample) {
        Rat u = rng.next_rat_avoiding(avoid, 14, 4);
        QMat t;
        try {
            t = monodromy(spec, u);
        } catch (const SingularPoint&) {
            --sample;
            continue;
        }
        for (int I = 0; I <= N; ++I)
            for (int J = 0; J < I; ++J) {
                QMat blk = t_block(spec, t, I, J);
                // annihilation of M⁰ exactly, all aux columns at once
                for (int c = 0; c < blk.cols(); ++c) {
                    if (m_charge(spec, c % dm) != 0) continue;
                    for (int r = 0; r < blk.rows(); ++r)
                        if (sgn(blk(r, c)) != 0)
                            return {false, blk.max_abs(), "a C block does not annihilate M0"};
                }
                for (int b = 0; b < spec.aux.blocks[J].dim; ++b) {
                    std::vector<int> cols(dm);
                    for (int m = 0; m < dm; ++m) cols[m] = b * dm + m;
                    std::vector<int> all_rows(blk.rows());
                    for (int r = 0; r < blk.rows(); ++r) all_rows[r] = r;
                    slices.push_back(blk.submatrix(all_rows, cols));
                    rows += blk.rows();
                }
            }
    }
    if (!slices.empty()) {
        QMat stacked(rows, dm);
        int at = 0;
        for (const auto& s : slices) {
            for (int i = 0; i < s.rows(); ++i)
                for (int j = 0; j < s.cols(); ++j) stacked(at + i, j) = s(i, j);
            at += s.rows();
        }
        QMat ker = stacked.kernel();
        if (ker.cols() != static_cast<int>(vac.size()))
            return {false, 1.0,
                    "joint C kernel has dimension " + std::to_string(ker.cols()) + ", expected " +
                        std::to_string(vac.size())};
    }
    return {true, 0, "vacuum sector = charge-zero = joint C kernel"};
}

CheckResult check_rtt(const ChainSpec& spec, const Rat& u, const Rat& v) {
    const int da = spec.aux_dim();
    std::vector<int> full = {da, da};
    for (const auto& s : spec.sites) full.push_back(s.dec.rep.dim);
    auto t_on = [&](int leg, const Rat& x) {
        QMat t = QMat::identity(total_dim(full));
        for (size_t l = 0; l < spec.sites.size(); ++l) {
            QMat r = spec.sites[l].r_aux_site(x - spec.sites[l].shift);
            t = on_two_legs(r, full, leg, 2 + static_cast<int>(l)) * t;
        }
        return t;
    };
    QMat t1 = t_on(0, u);
    QMat t2 = t_on(1, v);
    QMat r12 = on_two_legs(spec.r_aux_aux(u - v), full, 0, 1);
    QMat defect = r12 * t1 * t2 - t2 * t1 * r12;
    return {defect.is_zero(), defect.max_abs(), "rtt at (" + to_string(u) + "," + to_string(v) + ")"};
}

CheckResult check_grading(const ChainSpec& spec, const Rat& u) {
    QMat t = monodromy(spec, u);
    const int N = spec.aux.N;
    const int dm = spec.m_dim();
    for (int I = 0; I <= N; ++I)
        for (int J = 0; J <= N; ++J) {
            QMat blk = t_block(spec, t, I, J);
            for (int r = 0; r < blk.rows(); ++r)
                for (int c = 0; c < blk.cols(); ++c) {
                    if (sgn(blk(r, c)) == 0) continue;
                    if (m_charge(spec, r % dm) != m_charge(spec, c % dm) - (I - J))
                        return {false, 1.0,
                                "block (" + std::to_string(I) + "," + std::to_string(J) +
                                    ") breaks the grading"};
                }
        }
    return {true, 0, "grading support scan at u=" + to_string(u)};
}

CheckResult check_g_symmetry(const ChainSpec& spec, const Rat& u) {
    QMat t = monodromy(spec, u);
    std::vector<int> dims;
    dims.push_back(spec.aux_dim());
    for (const auto& s : spec.sites) dims.push_back(s.dec.rep.dim);
    const int r = spec.nesting.parent.rank;
    for (int i = 0; i < r; ++i) {
        for (int kind = 0; kind < 3; ++kind) {
            auto pick = [&](const MatrixRep& rep) -> const QMat& {
                return kind == 0 ? rep.e[i] : (kind == 1 ? rep.f[i] : rep.h[i]);
            };
            QMat dx = on_one_leg(pick(spec.aux.rep), dims, 0);
            for (size_t l = 0; l < spec.sites.size(); ++l)
                dx = dx + on_one_leg(pick(spec.sites[l].dec.rep), dims, 1 + static_cast<int>(l));
            if (!commutator(dx, t).is_zero())
                return {false, 1.0, "generator " + std::to_string(i) + " kind " + std::to_string(kind)};
        }
    }
    return {true, 0, "g-symmetry of T(u) at u=" + to_string(u)};
}

CheckResult check_transfer_commutativity(const ChainSpec& spec, const Rat& u, const Rat& v) {
    QMat c = commutator(transfer(spec, u), transfer(spec, v));
    return {c.is_zero(), c.max_abs(), "[t(u),t(v)] at (" + to_string(u) + "," + to_string(v) + ")"};
}

CheckResult check_daa(const ChainSpec& spec, int I, int J, const Rat& u, const Rat& v) {
    const int dm = spec.m_dim();
    const int dI = spec.aux.blocks[I].dim, dJ = spec.aux.blocks[J].dim;
    QMat tu = monodromy(spec, u);
    QMat tv = monodromy(spec, v);
    std::vector<int> dims = {dI, dJ, dm};
    QMat ai_full = on_two_legs(t_block(spec, tu, I, I), dims, 0, 2);
    QMat aj_full = on_two_legs(t_block(spec, tv, J, J), dims, 1, 2);
    QMat d = on_two_legs(spec.dfam.block(I, J, u - v), dims, 0, 1);
    QMat x = d * ai_full * aj_full - aj_full * ai_full * d;
    for (int col = 0; col < x.cols(); ++col) {
        if (m_charge(spec, col % dm) != 0) continue;
        for (int row = 0; row < x.rows(); ++row)
            if (sgn(x(row, col)) != 0) return {false, x.max_abs(), "DAA defect on M0"};
    }
    return {true, 0, "daa (" + std::to_string(I) + "," + std::to_string(J) + ")"};
}

AbTermReport check_ab_relation(const ChainSpec& spec, int I, int J, const Rat& u, const Rat& v) {
    AbTermReport rep;
    const int N = spec.aux.N;
    if (J + 1 > N) {
        rep.pass = true;
        rep.detail = "B^J_{J+1} vanishes for J = N";
        return rep;
    }
    const int dm = spec.m_dim();
    auto bd = [&](int X) { return spec.aux.blocks[X].dim; };
    const int dI = bd(I), dJ = bd(J), dJ1 = bd(J + 1);
    const Rat w = u - v;

    QMat tu = monodromy(spec, u);
    QMat tv = monodromy(spec, v);
    const GaussFactors& gf = spec.dfam.factors(w);
    const BlockStructure& bs = spec.dfam.structure();

    // all operators assembled on legs (a, b, M); input dims (dI, dJ1, dm)
    std::vector<int> start = {dI, dJ1, dm};

    // LHS: A^I(u)_a B^J_{J+1}(v)_b
    QMat b_v = on_two_legs(t_block(spec, tv, J, J + 1), start, 1, 2, dJ, dm);
    std::vector<int> after_b = {dI, dJ, dm};
    QMat lhs = on_two_legs(t_block(spec, tu, I, I), after_b, 0, 2) * b_v;

    // wanted: (D^{IJ})^{-1}_{ab} B^J_{J+1}(v)_b A^I(u)_a D^{I,J+1}_{ab}
    QMat d_ij_inv = on_two_legs(spec.dfam.block(I, J, w).inverse(), after_b, 0, 1);
    QMat d_ij1 = on_two_legs(spec.dfam.block(I, J + 1, w), start, 0, 1);
    QMat a_u_start = on_two_legs(t_block(spec, tu, I, I), start, 0, 2);
    QMat wanted = d_ij_inv * b_v * a_u_start * d_ij1;
    rep.wanted_present = !wanted.is_zero();

    // unwanted1: P^{I,J}_{J,I} B^I_{I+1}(u)_b A^J(v)_a P^{J,I+1}_{I+1,J} L^{I+1,J}_{I,J+1}
    QMat un1(lhs.rows(), lhs.cols());
    if (I + 1 <= N) {
        QMat l_blk = gf.l_block(bs, {I + 1, J}, {I, J + 1});
        if (!l_blk.is_zero()) {
            QMat l_full = on_two_legs(l_blk, start, 0, 1, bd(I + 1), dJ);
            std::vector<int> s1 = {bd(I + 1), dJ, dm};
            QMat p1 = on_two_legs(permutation_op<Rat>(bd(I + 1), dJ), s1, 0, 1, dJ, bd(I + 1));
            std::vector<int> s2 = {dJ, bd(I + 1), dm};
            QMat a_v = on_two_legs(t_block(spec, tv, J, J), s2, 0, 2);
            QMat b_u = on_two_legs(t_block(spec, tu, I, I + 1), s2, 1, 2, dI, dm);
            std::vector<int> s3 = {dJ, dI, dm};
            QMat p2 = on_two_legs(permutation_op<Rat>(dJ, dI), s3, 0, 1, dI, dJ);
            un1 = p2 * b_u * a_v * p1 * l_full;
            rep.unwanted1_present = !un1.is_zero();
        }
    }

    // unwanted2: L^{I,J}_{I−1,J+1} P^{I−1,J+1}_{J+1,I−1} B^{I−1}_I(u)_b A^{J+1}(v)_a P^{J+1,I}_{I,J+1}
    QMat un2(lhs.rows(), lhs.cols());
    if (I - 1 >= 0) {
        QMat l_blk = gf.l_block(bs, {I, J}, {I - 1, J + 1});
        if (!l_blk.is_zero()) {
            QMat p1 = on_two_legs(permutation_op<Rat>(dI, dJ1), start, 0, 1, dJ1, dI);
            std::vector<int> s1 = {dJ1, dI, dm};
            QMat a_v = on_two_legs(t_block(spec, tv, J + 1, J + 1), s1, 0, 2);
            QMat b_u = on_two_legs(t_block(spec, tu, I - 1, I), s1, 1, 2, bd(I - 1), dm);
            std::vector<int> s2 = {dJ1, bd(I - 1), dm};
            QMat p2 = on_two_legs(permutation_op<Rat>(dJ1, bd(I - 1)), s2, 0, 1, bd(I - 1), dJ1);
            std::vector<int> s3 = {bd(I - 1), dJ1, dm};
            QMat l_full = on_two_legs(l_blk, s3, 0, 1, dI, dJ);
            un2 = l_full * p2 * b_u * a_v * p1;
            rep.unwanted2_present = !un2.is_zero();
        }
    }

    QMat defect = lhs - wanted - un1 + un2;
    rep.pass = true;
    for (int col = 0; col < defect.cols(); ++col) {
        if (m_charge(spec, col % dm) != 0) continue;
        for (int row = 0; row < defect.rows(); ++row)
            if (sgn(defect(row, col)) != 0) {
                rep.pass = false;
                rep.residual = defect.max_abs();
                rep.detail = "AB defect on M0";
                return rep;
            }
    }
    rep.detail = "ab (" + std::to_string(I) + "," + std::to_string(J) + ") at (u,v)=(" +
                 to_string(u) + "," + to_string(v) + ")";
    return rep;
}

}  // namespace naba
