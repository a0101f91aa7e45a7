#pragma once

#include <map>
#include <optional>
#include <vector>

#include "naba/ratfun.hpp"
#include "naba/repkit.hpp"
#include "naba/rmat.hpp"

namespace naba {

using BlockId = std::pair<int, int>;  // (I, J) charge pair

// Charge-pair block layout of V⊗V, ordered by total charge then by the first
// factor's label.
struct BlockStructure {
    ChargeDecomposition dec;
    std::vector<TensorSector> sectors;
    int dim = 0;  // dim(V)²

    std::vector<int> pair_indices(int I, int J) const;  // tensor indices, row-major
    int block_dim(int I, int J) const {
        return dec.blocks[I].dim * dec.blocks[J].dim;
    }
    int N() const { return dec.N; }
};

BlockStructure block_structure(const ChargeDecomposition& dec);

// Submatrix R^{IJ}_{KL} of an operator on V⊗V.
QMat charge_block(const QMat& m, const BlockStructure& bs, BlockId row, BlockId col);

enum class GaussVariant { UDL, LDU };

struct GaussFactors {
    Rat u;
    GaussVariant variant = GaussVariant::UDL;
    std::map<BlockId, QMat> d;
    std::map<std::pair<BlockId, BlockId>, QMat> upper;  // (row, col), row before col
    std::map<std::pair<BlockId, BlockId>, QMat> lower;  // (row, col), row after col

    // Triangular block with identity diagonal and zero outside its sector.
    QMat u_block(const BlockStructure& bs, BlockId row, BlockId col) const;
    QMat l_block(const BlockStructure& bs, BlockId row, BlockId col) const;
    const QMat& d_block(BlockId id) const { return d.at(id); }
};

// R(u) = U·D·L over the charge-pair blocks (recursive elimination from the
// bottom of each total-charge sector).
GaussFactors udl_decompose(const RMatrix& r, const BlockStructure& bs, const Rat& u);
// R(u) = L̃·D̃·Ũ (elimination from the top of each sector).
GaussFactors ldu_decompose(const RMatrix& r, const BlockStructure& bs, const Rat& u);

// Full reassembly U·D·L (or L̃·D̃·Ũ) for reconstruction checks.
QMat reassemble(const GaussFactors& gf, const BlockStructure& bs);

// Independent route: textbook block LDU of each reversed sector. Returns the
// D blocks only; used as the uniqueness oracle.
std::map<BlockId, QMat> d_blocks_by_generic_lu(const RMatrix& r, const BlockStructure& bs,
                                               const Rat& u);

// Memoizing provider of D blocks over rational spectral points.
class DFamily {
  public:
    DFamily(RMatrix r, BlockStructure bs) : r_(std::move(r)), bs_(std::move(bs)) {}

    const GaussFactors& factors(const Rat& u) const;
    const QMat& block(int I, int J, const Rat& u) const;  // D^{IJ}(u)
    QMat tilde_block(int I, int J, const Rat& u) const;   // D̃^{IJ}(u) = [D^{IJ}(−u)]^{-1}

    const RMatrix& rmatrix() const { return r_; }
    const BlockStructure& structure() const { return bs_; }
    int N() const { return bs_.N(); }

  private:
    RMatrix r_;
    BlockStructure bs_;
    mutable std::map<Rat, GaussFactors> cache_;
};

struct DIdentityReport {
    bool dj0 = false, dnj = false, d0j = false, djn = false, pdp = false;
    bool pass() const { return dj0 && dnj && d0j && djn && pdp; }
};

// The five D-matrix relations, 0-based block labels.
DIdentityReport check_d_identities(const DFamily& fam, const Rat& u);

// D^{IJ}(u) D^{IK}(u+v) D^{JK}(v) = D^{JK}(v) D^{IK}(u+v) D^{IJ}(u); with
// `tilde` set, the same for the D̃ family.
CheckResult check_nested_ybe(const DFamily& fam, int I, int J, int K, const Rat& u, const Rat& v,
                             bool tilde = false);

// Eigenvalue of D^{0I}(u) on the (highest-weight ⊗ ĝ-highest-weight) ray.
Rat normalization_factor(const DFamily& fam, int I, const Rat& u);
// Same, reconstructed as a rational function of u.
RatFun normalization_factor_function(const DFamily& fam, int I, int max_deg = 6);

struct ProjectorLimit {
    int order = 0;      // Laurent order k at u → 0
    Rat scale;          // Π̂ = scale · Π with Π idempotent
    QMat pi_hat;        // leading Laurent coefficient
    QMat pi;            // pi_hat / scale when idempotent
    bool idempotent = false;
    int rank = 0;
};

// Laurent leading term of [(D^{J+1,J}(u))^{-1}]^{t_J} at u = 0.
ProjectorLimit projector_limit(const DFamily& fam, int J, int max_deg = 10);

// Fused auxiliary R-matrix Π D^{I,J+1}(u) [D^{IJ}(u)^{-1}]^{t_J} Π compressed
// to V^I ⊗ im(Π); throws ConjectureFailed when the projector input fails its
// checks or the exchange consistency does not hold.
RMatrix fused_aux_rmatrix(const DFamily& fam, int I, int J, const ProjectorLimit& pl);

// Fit of the sl₂ ratio D^{I,J+1}(u)/D^{IJ}(u) against
// (u+J−N)(u+J+1)/((u+J−I)(u+J−I+1)) over all scalar block pairs; returns the
// single integer N that matches all of them, if any.
std::optional<int> fit_sl2_ratio_parameter(const DFamily& fam, int n_min, int n_max);

}  // namespace naba
