#pragma once

#include <functional>
#include <string>
#include <vector>

#include "naba/matrix.hpp"
#include "naba/repkit.hpp"

namespace naba {

// Parameter-dependent matrix on C^{dim_left} ⊗ C^{dim_right}, exact at
// rational spectral points, normalized to the identity at u → ∞.
struct RMatrix {
    int dim_left = 0, dim_right = 0;
    Rat hbar = 1;
    std::vector<Rat> singular;  // evaluation poles
    std::function<QMat(const Rat&)> eval_q;
    std::function<CMat(const Cplx&)> eval_c;
    std::string name;

    int dim() const { return dim_left * dim_right; }
    bool is_singular(const Rat& u) const;
    QMat operator()(const Rat& u) const;  // throws SingularPoint on poles
    CMat at(const Cplx& u) const;
};

template <typename K>
Mat<K> reval(const RMatrix& r, const K& u) {
    if constexpr (std::is_same_v<K, Rat>) return r(u);
    else return r.at(u);
}

// R(u) = (u·I + ħ·P)/(u + ħ) on C^n ⊗ C^n.
RMatrix yang_rmatrix(int n, const Rat& hbar);

// Frozen conventions of a B/C/D vector-representation R-matrix.
struct ZZConventions {
    int c_p = 0, c_q = 0;  // signs of the P and Q terms
    Rat kappa;             // Q-term pole position in units of ħ
    int pq_sign = 0;       // PQ = QP = ±Q
    QMat form;             // invariant bilinear form of the rep
    QMat q_op;             // Q normalized so Q² = dim·Q
};

// R(u) = s(u)(I + c_P ħ/u P + c_Q ħ/(u−κħ) Q) with signs fixed by an exact
// YBE search and s(u) normalizing the highest-weight ray action to 1.
RMatrix zz_rmatrix(const MatrixRep& rep, const Rat& hbar, ZZConventions* out = nullptr);

struct CheckResult {
    bool pass = false;
    double residual = 0;  // max |entry| of the defect, as double
    std::string detail;
};

CheckResult check_ybe(const RMatrix& r, const Rat& u, const Rat& v);
// YBE on A⊗B⊗C from three pair matrices.
CheckResult check_mixed_ybe(const RMatrix& r_ab, const RMatrix& r_ac, const RMatrix& r_bc,
                            const Rat& u, const Rat& v);
CheckResult check_unitarity(const RMatrix& r, const Rat& u);
CheckResult check_prp(const RMatrix& r, const Rat& u);
// [x⊗1 + 1⊗x, R(u)] = 0 for all generator pairs (x_left, x_right).
CheckResult check_g_invariance(const RMatrix& r, const std::vector<QMat>& gens_left,
                               const std::vector<QMat>& gens_right, const Rat& u);
CheckResult check_g_invariance(const RMatrix& r, const MatrixRep& rep, const Rat& u);
// R(u) → I as u → ∞, via entrywise rational reconstruction.
CheckResult check_identity_at_infinity(const RMatrix& r, int degree_bound);

// Projector data with an exact section: embed·proj = Π, proj·embed = I.
struct Projector {
    QMat pi, embed, proj;
    int rank = 0;
};
Projector make_projector(const QMat& pi);

// Fusion on the first factor: W = im(Π) ⊂ A⊗B at relative shift z1, where
// r_ab(z1) must equal λ·Π exactly. Result acts on W ⊗ C.
RMatrix fuse_pair(const RMatrix& r_ac, const RMatrix& r_bc, const RMatrix& r_ab,
                  const QMat& pi, const Rat& z1);
// Same-space form: all three pair matrices coincide.
RMatrix fuse(const RMatrix& r, const QMat& pi, const Rat& z1);
// Fusion on the second factor: W = im(Π) ⊂ A⊗B, result acts on X ⊗ W.
RMatrix fuse_second(const RMatrix& r_xa, const RMatrix& r_xb, const RMatrix& r_ab,
                    const QMat& pi, const Rat& z1);

// Generators compressed to a fused subspace: x ↦ proj·Δ(x)·embed.
std::vector<QMat> fused_generators(const std::vector<QMat>& gens_a,
                                   const std::vector<QMat>& gens_b, const Projector& p);

// sl₂ fusion tower: spin-1 machinery fused from the defining representation.
struct Sl2Tower {
    Rat hbar;
    RMatrix r_vv, r_wv, r_ww;
    Projector sym;        // symmetrizer V⊗V → W
    MatrixRep rep_v;      // defining rep of A1
    MatrixRep rep_w;      // spin-1 rep carried by W (valid MatrixRep)
};
Sl2Tower sl2_spin1_tower(const Rat& hbar);

}  // namespace naba
