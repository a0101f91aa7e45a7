#include "naba/blockgauss.hpp"

#include <algorithm>
#include <climits>
#include <memory>

#include "naba/errors.hpp"
#include "naba/prng.hpp"

namespace naba {

BlockStructure block_structure(const ChargeDecomposition& dec) {
    BlockStructure bs;
    bs.dec = dec;
    bs.sectors = tensor_charge_blocks(dec, dec);
    bs.dim = dec.rep.dim * dec.rep.dim;
    return bs;
}

std::vector<int> BlockStructure::pair_indices(int I, int J) const {
    const int d = dec.rep.dim;
    std::vector<int> out;
    out.reserve(block_dim(I, J));
    for (int a : dec.indices(I))
        for (int b : dec.indices(J)) out.push_back(a * d + b);
    return out;
}

QMat charge_block(const QMat& m, const BlockStructure& bs, BlockId row, BlockId col) {
    return m.submatrix(bs.pair_indices(row.first, row.second),
                       bs.pair_indices(col.first, col.second));
}

QMat GaussFactors::u_block(const BlockStructure& bs, BlockId row, BlockId col) const {
    if (row == col) return QMat::identity(bs.block_dim(row.first, row.second));
    auto it = upper.find({row, col});
    if (it != upper.end()) return it->second;
    return QMat(bs.block_dim(row.first, row.second), bs.block_dim(col.first, col.second));
}

QMat GaussFactors::l_block(const BlockStructure& bs, BlockId row, BlockId col) const {
    if (row == col) return QMat::identity(bs.block_dim(row.first, row.second));
    auto it = lower.find({row, col});
    if (it != lower.end()) return it->second;
    return QMat(bs.block_dim(row.first, row.second), bs.block_dim(col.first, col.second));
}

namespace {

QMat invert_pivot(const QMat& d, BlockId id, const Rat& u) {
    try {
        return d.inverse();
    } catch (const std::domain_error&) {
        throw SingularDBlock(id.first, id.second, to_string(u));
    }
}

// Elimination over one total-charge sector. With `from_bottom` the pivots are
// taken from the high-I end of the sector, which yields the UDL variant; the
// top-down order yields LDU. In both cases the sector matrix expands as
// R_{rc} = Σ_t LEFT_{rt} D_t RIGHT_{tc} with LEFT/RIGHT supported on pairs
// whose second member was pivoted no later than the first.
void decompose_sector(const QMat& rm, const BlockStructure& bs, const TensorSector& sector,
                      bool from_bottom, const Rat& u, GaussFactors& gf) {
    const auto& pairs = sector.pairs;
    const int s = static_cast<int>(pairs.size());
    std::vector<int> order(s);
    for (int t = 0; t < s; ++t) order[t] = from_bottom ? s - 1 - t : t;

    std::map<std::pair<int, int>, QMat> left, right;  // keyed by (row_pos, col_pos)
    std::map<int, QMat> dd, dinv;

    auto rblock = [&](int rp, int cp) { return charge_block(rm, bs, pairs[rp], pairs[cp]); };

    for (int step = 0; step < s; ++step) {
        const int t = order[step];
        for (int sstep = 0; sstep < step; ++sstep) {
            const int q = order[sstep];
            QMat num_left = rblock(t, q);
            QMat num_right = rblock(q, t);
            for (int kstep = 0; kstep < sstep; ++kstep) {
                const int k = order[kstep];
                num_left = num_left - left.at({t, k}) * dd.at(k) * right.at({k, q});
                num_right = num_right - left.at({q, k}) * dd.at(k) * right.at({k, t});
            }
            left[{t, q}] = num_left * dinv.at(q);
            right[{q, t}] = dinv.at(q) * num_right;
        }
        QMat dblock = rblock(t, t);
        for (int sstep = 0; sstep < step; ++sstep) {
            const int k = order[sstep];
            dblock = dblock - left.at({t, k}) * dd.at(k) * right.at({k, t});
        }
        dd[t] = dblock;
        dinv[t] = invert_pivot(dblock, pairs[t], u);
    }

    for (int t = 0; t < s; ++t) gf.d[pairs[t]] = dd.at(t);
    // UDL: the left factor is block upper-triangular; LDU: block lower.
    auto& left_map = from_bottom ? gf.upper : gf.lower;
    auto& right_map = from_bottom ? gf.lower : gf.upper;
    for (const auto& [key, m] : left) left_map[{pairs[key.first], pairs[key.second]}] = m;
    for (const auto& [key, m] : right) right_map[{pairs[key.first], pairs[key.second]}] = m;
}

GaussFactors decompose(const RMatrix& r, const BlockStructure& bs, const Rat& u,
                       GaussVariant variant) {
    GaussFactors gf;
    gf.u = u;
    gf.variant = variant;
    QMat rm = r(u);
    for (const auto& sector : bs.sectors)
        decompose_sector(rm, bs, sector, variant == GaussVariant::UDL, u, gf);
    return gf;
}

}  // namespace

GaussFactors udl_decompose(const RMatrix& r, const BlockStructure& bs, const Rat& u) {
    return decompose(r, bs, u, GaussVariant::UDL);
}

GaussFactors ldu_decompose(const RMatrix& r, const BlockStructure& bs, const Rat& u) {
    return decompose(r, bs, u, GaussVariant::LDU);
}

QMat reassemble(const GaussFactors& gf, const BlockStructure& bs) {
    const int d = bs.dec.rep.dim;
    QMat out(d * d, d * d);
    for (const auto& sector : bs.sectors) {
        const auto& pairs = sector.pairs;
        const int s = static_cast<int>(pairs.size());
        // sector triangular product: out_sector = Σ_{t} col(t)·D·row(t)
        for (int rp = 0; rp < s; ++rp)
            for (int cp = 0; cp < s; ++cp) {
                QMat acc(bs.block_dim(pairs[rp].first, pairs[rp].second),
                         bs.block_dim(pairs[cp].first, pairs[cp].second));
                for (int t = 0; t < s; ++t) {
                    QMat left = (gf.variant == GaussVariant::UDL)
                                    ? gf.u_block(bs, pairs[rp], pairs[t])
                                    : gf.l_block(bs, pairs[rp], pairs[t]);
                    QMat right = (gf.variant == GaussVariant::UDL)
                                     ? gf.l_block(bs, pairs[t], pairs[cp])
                                     : gf.u_block(bs, pairs[t], pairs[cp]);
                    if (left.is_zero() || right.is_zero()) continue;
                    acc = acc + left * gf.d.at(pairs[t]) * right;
                }
                auto rows = bs.pair_indices(pairs[rp].first, pairs[rp].second);
                auto cols = bs.pair_indices(pairs[cp].first, pairs[cp].second);
                for (size_t a = 0; a < rows.size(); ++a)
                    for (size_t b = 0; b < cols.size(); ++b) out(rows[a], cols[b]) = acc(a, b);
            }
    }
    return out;
}

std::map<BlockId, QMat> d_blocks_by_generic_lu(const RMatrix& r, const BlockStructure& bs,
                                               const Rat& u) {
    // Reverse each sector's block order and run forward block LDU; the
    // diagonal pivots must coincide with the UDL D blocks.
    QMat rm = r(u);
    std::map<BlockId, QMat> out;
    for (const auto& sector : bs.sectors) {
        std::vector<BlockId> pairs(sector.pairs.rbegin(), sector.pairs.rend());
        const int s = static_cast<int>(pairs.size());
        std::map<std::pair<int, int>, QMat> low, up;
        std::vector<QMat> dd(s), dinv(s);
        for (int k = 0; k < s; ++k) {
            for (int i = 0; i < k; ++i) {
                QMat nl = charge_block(rm, bs, pairs[k], pairs[i]);
                QMat nu = charge_block(rm, bs, pairs[i], pairs[k]);
                for (int j = 0; j < i; ++j) {
                    nl = nl - low.at({k, j}) * dd[j] * up.at({j, i});
                    nu = nu - low.at({i, j}) * dd[j] * up.at({j, k});
                }
                low[{k, i}] = nl * dinv[i];
                up[{i, k}] = dinv[i] * nu;
            }
            QMat d = charge_block(rm, bs, pairs[k], pairs[k]);
            for (int j = 0; j < k; ++j) d = d - low.at({k, j}) * dd[j] * up.at({j, k});
            dd[k] = d;
            dinv[k] = invert_pivot(d, pairs[k], u);
        }
        for (int k = 0; k < s; ++k) out[pairs[k]] = dd[k];
    }
    return out;
}

const GaussFactors& DFamily::factors(const Rat& u) const {
    auto it = cache_.find(u);
    if (it == cache_.end()) it = cache_.emplace(u, udl_decompose(r_, bs_, u)).first;
    return it->second;
}

const QMat& DFamily::block(int I, int J, const Rat& u) const {
    return factors(u).d.at({I, J});
}

QMat DFamily::tilde_block(int I, int J, const Rat& u) const {
    return invert_pivot(block(I, J, -u), {I, J}, u);
}

DIdentityReport check_d_identities(const DFamily& fam, const Rat& u) {
    const int N = fam.N();
    DIdentityReport rep;
    rep.dj0 = rep.dnj = rep.d0j = rep.djn = rep.pdp = true;
    const BlockStructure& bs = fam.structure();
    QMat rm_pos = fam.rmatrix()(u);
    QMat rm_neg = fam.rmatrix()(-u);
    for (int J = 0; J <= N; ++J) {
        rep.dj0 = rep.dj0 && (fam.block(J, 0, u) == charge_block(rm_pos, bs, {J, 0}, {J, 0}));
        rep.dnj = rep.dnj && (fam.block(N, J, u) == charge_block(rm_pos, bs, {N, J}, {N, J}));
        rep.d0j = rep.d0j && (fam.block(0, J, u) ==
                              invert_pivot(charge_block(rm_neg, bs, {0, J}, {0, J}), {0, J}, u));
        rep.djn = rep.djn && (fam.block(J, N, u) ==
                              invert_pivot(charge_block(rm_neg, bs, {J, N}, {J, N}), {J, N}, u));
    }
    for (int I = 0; I <= N; ++I)
        for (int J = 0; J <= N; ++J) {
            // P D^{IJ}(u) P maps V^J⊗V^I to itself; compare with [D^{JI}(−u)]^{-1}
            const int dI = bs.dec.blocks[I].dim, dJ = bs.dec.blocks[J].dim;
            QMat p_ij = permutation_op<Rat>(dI, dJ);  // V^I⊗V^J → V^J⊗V^I
            QMat p_ji = permutation_op<Rat>(dJ, dI);
            QMat lhs = p_ij * fam.block(I, J, u) * p_ji;
            QMat rhs = invert_pivot(fam.block(J, I, -u), {J, I}, u);
            rep.pdp = rep.pdp && (lhs == rhs);
        }
    return rep;
}

CheckResult check_nested_ybe(const DFamily& fam, int I, int J, int K, const Rat& u, const Rat& v,
                             bool tilde) {
    const auto& blocks = fam.structure().dec.blocks;
    std::vector<int> dims = {blocks[I].dim, blocks[J].dim, blocks[K].dim};
    auto get = [&](int a, int b, const Rat& x) {
        return tilde ? fam.tilde_block(a, b, x) : fam.block(a, b, x);
    };
    QMat d12 = on_two_legs(get(I, J, u), dims, 0, 1);
    QMat d13 = on_two_legs(get(I, K, u + v), dims, 0, 2);
    QMat d23 = on_two_legs(get(J, K, v), dims, 1, 2);
    QMat defect = d12 * d13 * d23 - d23 * d13 * d12;
    return {defect.is_zero(), defect.max_abs(),
            std::string(tilde ? "tilde " : "") + "nested ybe (" + std::to_string(I) + "," +
                std::to_string(J) + "," + std::to_string(K) + ")"};
}

Rat normalization_factor(const DFamily& fam, int I, const Rat& u) {
    const auto& bs = fam.structure();
    const auto& b0 = bs.dec.blocks[0];
    const auto& bI = bs.dec.blocks[I];
    // ray = (g-highest vector of V⁰) ⊗ (ĝ-highest vector of V^I), block-local
    const int ray = (b0.hw_index - b0.offset) * bI.dim + (bI.hw_index - bI.offset);
    QMat d = fam.block(0, I, u);
    for (int k = 0; k < d.rows(); ++k)
        if (k != ray && sgn(d(k, ray)) != 0)
            throw NotEigenvector("D^{0," + std::to_string(I) + "} does not preserve the ray");
    return d(ray, ray);
}

RatFun normalization_factor_function(const DFamily& fam, int I, int max_deg) {
    return reconstruct_function(
        [&](const Rat& u) { return normalization_factor(fam, I, u); }, max_deg, max_deg);
}

ProjectorLimit projector_limit(const DFamily& fam, int J, int max_deg) {
    const auto& blocks = fam.structure().dec.blocks;
    if (J + 1 > fam.N()) throw std::invalid_argument("projector_limit: J+1 out of range");
    const int dJ1 = blocks[J + 1].dim, dJ = blocks[J].dim;
    auto entry_fun = [&](const Rat& u) {
        QMat inv = invert_pivot(fam.block(J + 1, J, u), {J + 1, J}, u);
        return partial_transpose_second(inv, dJ1, dJ);
    };
    std::vector<std::vector<RatFun>> funs;
    int deg = max_deg;
    for (int attempt = 0; attempt < 3; ++attempt) {
        try {
            funs = reconstruct_matrix(entry_fun, dJ1 * dJ, dJ1 * dJ, deg, deg);
            break;
        } catch (const ReconstructionFailed&) {
            deg += 4;
            if (attempt == 2) throw;
        }
    }
    ProjectorLimit pl;
    int order = INT_MAX;
    for (const auto& row : funs)
        for (const auto& f : row)
            if (!f.is_zero()) order = std::min(order, f.order_at_zero());
    if (order == INT_MAX) throw ReconstructionFailed("projector_limit: zero matrix");
    pl.order = order;
    pl.pi_hat = QMat(dJ1 * dJ, dJ1 * dJ);
    for (int i = 0; i < dJ1 * dJ; ++i)
        for (int j = 0; j < dJ1 * dJ; ++j) {
            const RatFun& f = funs[i][j];
            if (!f.is_zero() && f.order_at_zero() == order) pl.pi_hat(i, j) = f.leading_at_zero();
        }
    // idempotency up to scale: Π̂² = c·Π̂
    QMat sq = pl.pi_hat * pl.pi_hat;
    Rat c = 0;
    for (int i = 0; i < sq.rows() && sgn(c) == 0; ++i)
        for (int j = 0; j < sq.cols(); ++j)
            if (sgn(pl.pi_hat(i, j)) != 0) { c = sq(i, j) / pl.pi_hat(i, j); break; }
    pl.scale = c;
    pl.idempotent = sgn(c) != 0 && (sq == pl.pi_hat * c);
    pl.rank = pl.pi_hat.rank();
    if (pl.idempotent) pl.pi = pl.pi_hat * (Rat(1) / c);
    return pl;
}

RMatrix fused_aux_rmatrix(const DFamily& fam, int I, int J, const ProjectorLimit& pl) {
    if (!pl.idempotent || pl.rank == 0)
        throw ConjectureFailed("projector limit is not a nonzero idempotent");
    const auto& blocks = fam.structure().dec.blocks;
    const int dI = blocks[I].dim, dJ1 = blocks[J + 1].dim, dJ = blocks[J].dim;
    Projector proj = make_projector(pl.pi);
    const int w = proj.rank;

    // exchange consistency at sample points:
    // Π D^{I,J+1}(u) [D^{IJ}(u)^{-1}]^{t_J} = [D^{IJ}(u)^{-1}]^{t_J} D^{I,J+1}(u) Π
    std::vector<int> dims = {dI, dJ1, dJ};
    auto assemble = [&](const Rat& u) {
        QMat d1 = on_two_legs(fam.block(I, J + 1, u), dims, 0, 1);
        QMat d0inv = invert_pivot(fam.block(I, J, u), {I, J}, u);
        QMat d0t = on_two_legs(partial_transpose_second(d0inv, dI, dJ), dims, 0, 2);
        QMat pi_full = on_two_legs(proj.pi, dims, 1, 2);
        QMat lhs = pi_full * d1 * d0t;
        QMat rhs = d0t * d1 * pi_full;
        if (!(lhs == rhs))
            throw ConjectureFailed("fusion exchange consistency fails at u = " + to_string(u));
        return d1 * d0t;
    };
    Prng rng(0xA0AULL);
    std::vector<Rat> avoid = fam.rmatrix().singular;
    avoid.push_back(Rat(0));
    int done = 0, tries = 0;
    while (done < 3) {
        Rat u = rng.next_rat_avoiding(avoid, 12, 5);
        try {
            assemble(u);
            ++done;
        } catch (const SingularDBlock&) {
            if (++tries > 60) throw;
        } catch (const std::domain_error&) {
            if (++tries > 60) throw;
        }
    }

    RMatrix r;
    r.hbar = fam.rmatrix().hbar;
    r.dim_left = dI;
    r.dim_right = w;
    r.singular = fam.rmatrix().singular;
    r.singular.push_back(Rat(0));
    r.name = "Raux[I=" + std::to_string(I) + ",J=" + std::to_string(J) + ";" + fam.rmatrix().name + "]";

    // normalization at infinity via reconstruction on the compressed matrix
    QMat fc = kron(QMat::identity(dI), proj.proj);
    QMat ec = kron(QMat::identity(dI), proj.embed);
    auto raw_eval = [&fam, I, J, dims, dI, dJ, fc, ec](const Rat& u) {
        QMat d1 = on_two_legs(fam.block(I, J + 1, u), dims, 0, 1);
        QMat d0inv = fam.block(I, J, u).inverse();
        QMat d0t = on_two_legs(partial_transpose_second(d0inv, dI, dJ), dims, 0, 2);
        return fc * (d1 * d0t) * ec;
    };
    auto funs = reconstruct_matrix(raw_eval, dI * w, dI * w, 8, 8);
    QMat lim(dI * w, dI * w);
    for (int i = 0; i < dI * w; ++i)
        for (int j = 0; j < dI * w; ++j)
            lim(i, j) = funs[i][j].is_zero() ? Rat(0) : funs[i][j].limit_at_infinity();
    // expect a scalar multiple of the identity
    Rat c = lim(0, 0);
    if (sgn(c) == 0 || !(lim == QMat::identity(dI * w) * c))
        throw ConjectureFailed("fused matrix limit at infinity is not scalar");
    Rat cinv = 1 / c;

    auto funs_shared = std::make_shared<std::vector<std::vector<RatFun>>>(std::move(funs));
    r.eval_q = [funs_shared, cinv, dI, w](const Rat& u) {
        QMat m(dI * w, dI * w);
        for (int i = 0; i < dI * w; ++i)
            for (int j = 0; j < dI * w; ++j)
                m(i, j) = (*funs_shared)[i][j].is_zero() ? Rat(0)
                                                         : (*funs_shared)[i][j].eval(u) * cinv;
        return m;
    };
    r.eval_c = [funs_shared, cinv, dI, w](const Cplx& u) {
        CMat m(dI * w, dI * w);
        double ci = to_double(cinv);
        for (int i = 0; i < dI * w; ++i)
            for (int j = 0; j < dI * w; ++j) {
                const RatFun& f = (*funs_shared)[i][j];
                if (f.is_zero()) continue;
                Cplx num = 0, den = 0;
                for (int a = static_cast<int>(f.num.c.size()) - 1; a >= 0; --a)
                    num = num * u + to_double(f.num.c[a]);
                for (int a = static_cast<int>(f.den.c.size()) - 1; a >= 0; --a)
                    den = den * u + to_double(f.den.c[a]);
                m(i, j) = num / den * ci;
            }
        return m;
    };
    return r;
}

std::optional<int> fit_sl2_ratio_parameter(const DFamily& fam, int n_min, int n_max) {
    const int N = fam.N();
    const auto& blocks = fam.structure().dec.blocks;
    for (int I = 0; I <= N; ++I)
        if (blocks[I].dim != 1) return std::nullopt;  // scalar blocks only

    // measured ratios D^{I,J+1}/D^{IJ} as rational functions
    std::vector<std::tuple<int, int, RatFun>> measured;
    for (int I = 0; I <= N; ++I)
        for (int J = 0; J + 1 <= N; ++J) {
            RatFun f = reconstruct_function(
                [&](const Rat& u) -> Rat {
                    Rat d0 = fam.block(I, J, u)(0, 0);
                    if (sgn(d0) == 0) throw SingularPoint("ratio");
                    return fam.block(I, J + 1, u)(0, 0) / d0;
                },
                2 * N + 2, 2 * N + 2);
            measured.emplace_back(I, J, f);
        }
    for (int n = n_min; n <= n_max; ++n) {
        bool all = true;
        for (const auto& [I, J, f] : measured) {
            // (u+J−n)(u+J+1) / ((u+J−I)(u+J−I+1)) compared pointwise
            for (int s = 1; s <= 5 && all; ++s) {
                Rat u = rat(2 * s + 1, 2);  // generic half-integers clear of small poles
                Rat numer = (u + J - n) * (u + J + 1);
                Rat denom = (u + J - I) * (u + J - I + 1);
                if (sgn(denom) == 0) { continue; }
                Rat lhs;
                try {
                    lhs = f.eval(u);
                } catch (const std::domain_error&) {
                    continue;
                }
                if (lhs != numer / denom) all = false;
            }
            if (!all) break;
        }
        if (all) return n;
    }
    return std::nullopt;
}

}  // namespace naba
