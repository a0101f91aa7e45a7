#pragma once

#include <string>
#include <vector>

#include "naba/blockgauss.hpp"
#include "naba/repkit.hpp"
#include "naba/rmat.hpp"

namespace naba {

struct ChainSite {
    ChargeDecomposition dec;
    Rat shift;
    RMatrix r_aux_site;
};

// Spin chain data: auxiliary space with its charge decomposition, sites with
// shifts, and a block-diagonal twist on the auxiliary space.
struct ChainSpec {
    NestingData nesting;
    ChargeDecomposition aux;
    RMatrix r_aux_aux;
    DFamily dfam;  // D blocks of r_aux_aux over the aux block structure
    std::vector<ChainSite> sites;
    std::vector<Rat> twist;  // diagonal entries on the aux space
    Rat hbar = 1;

    int aux_dim() const { return aux.rep.dim; }
    int m_dim() const {
        int d = 1;
        for (const auto& s : sites) d *= s.dec.rep.dim;
        return d;
    }
    std::vector<int> site_dims() const {
        std::vector<int> out;
        for (const auto& s : sites) out.push_back(s.dec.rep.dim);
        return out;
    }
    int n_blocks() const { return aux.N + 1; }
};

// Homogeneous chain with the defining representation as both auxiliary space
// and site rep. Empty shifts mean all zero; empty twist means identity.
ChainSpec defining_chain(const std::string& algebra, int p, int length,
                         std::vector<Rat> shifts = {}, std::vector<Rat> twist = {},
                         const Rat& hbar = Rat(1));

// sl2 chain with the fused spin-1 auxiliary space over spin-1/2 sites.
ChainSpec spin1_aux_chain(int length, std::vector<Rat> shifts = {}, const Rat& hbar = Rat(1));

// T(u) = R_{a,L}(u−c_L)···R_{a,1}(u−c_1) on aux ⊗ M.
template <typename K>
Mat<K> monodromy(const ChainSpec& spec, const K& u);

// Charge-pair block T^I_J as a map (V^J ⊗ M) → (V^I ⊗ M).
template <typename K>
Mat<K> t_block(const ChainSpec& spec, const Mat<K>& t, int I, int J);

// t(u) = tr_a(Z_a T_a(u)) on M.
template <typename K>
Mat<K> transfer(const ChainSpec& spec, const K& u);

// Basis indices of the charge-zero subspace M⁰.
std::vector<int> vacuum_indices(const ChainSpec& spec);
// Total site charge label of an M basis index.
int m_charge(const ChainSpec& spec, int m_index);

// M⁰ = joint kernel of all C blocks, checked exactly at three sample points.
CheckResult check_vacuum_characterization(const ChainSpec& spec, uint64_t seed = 99);

CheckResult check_rtt(const ChainSpec& spec, const Rat& u, const Rat& v);
CheckResult check_grading(const ChainSpec& spec, const Rat& u);
// Δ(x)-commutation of T(u) for all g generators on aux ⊗ M.
CheckResult check_g_symmetry(const ChainSpec& spec, const Rat& u);
CheckResult check_transfer_commutativity(const ChainSpec& spec, const Rat& u, const Rat& v);

// D^{IJ}(u−v) A^I(u) A^J(v) − A^J(v) A^I(u) D^{IJ}(u−v) annihilates
// V^I ⊗ V^J ⊗ M⁰.
CheckResult check_daa(const ChainSpec& spec, int I, int J, const Rat& u, const Rat& v);

struct AbTermReport {
    bool pass = false;
    bool wanted_present = false;
    bool unwanted1_present = false;  // the B(u)A(v) exchange term
    bool unwanted2_present = false;  // the B^{I−1}(u)A^{J+1}(v) term
    double residual = 0;
    std::string detail;
};

// A^I(u) B^J_{J+1}(v) = wanted + unwanted1 − unwanted2 on V^I ⊗ V^{J+1} ⊗ M⁰.
AbTermReport check_ab_relation(const ChainSpec& spec, int I, int J, const Rat& u, const Rat& v);

}  // namespace naba
