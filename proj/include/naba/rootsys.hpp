#pragma once

#include <string>
#include <vector>

#include "naba/matrix.hpp"
#include "naba/rational.hpp"

namespace naba {

enum class Family { A, B, C, D };

char family_letter(Family f);
Family family_from_letter(char c);

// Cartan data for a simple Lie algebra in the Bourbaki labelling.
//
// Conventions: d_j = (α_j,α_j)/2 with long roots of squared length 2,
// a_ij = (α_i,α_j)/d_j, so A·diag(d) is symmetric. All vectors live in
// simple-root coordinates; the bilinear form in those coordinates is the
// Gram matrix G_ij = (α_i,α_j).
class RootSystem {
  public:
    RootSystem() = default;

    Family family = Family::A;
    int rank = 0;
    QMat cartan;                   // a_ij
    std::vector<Rat> symmetrizers; // d_i
    QMat gram;                     // G_ij = a_ij d_j
    QMat gram_inv;
    std::vector<std::vector<Rat>> simple_roots;        // unit vectors, α-basis
    std::vector<std::vector<Rat>> fundamental_weights; // rows of diag(d)·G^{-1}
    std::vector<std::vector<Rat>> fundamental_coweights; // rows of G^{-1}
    std::vector<long> highest_root_coeffs;

    std::string name() const { return std::string(1, family_letter(family)) + std::to_string(rank); }

    // Bilinear pairing of two α-coordinate vectors.
    Rat pairing(const std::vector<Rat>& x, const std::vector<Rat>& y) const;

    // ⟨x, α_i^∨⟩ = (x, α_i)/d_i for an α-coordinate vector x.
    Rat dynkin_label(const std::vector<Rat>& x, int i) const;

    bool is_end_node(int p) const;  // 1-based
    std::vector<int> neighbours(int p) const;
};

// All positive roots as integer coefficient vectors over the simple roots,
// grown by root strings from the Cartan matrix alone. Sorted by height.
std::vector<std::vector<long>> positive_roots(const RootSystem& rs);

struct NestingData {
    RootSystem parent;
    int removed_index = 0;  // 1-based node p
    RootSystem sub;         // diagram subalgebra; rank 0 when parent has rank 1
    std::vector<int> node_map;  // sub node i (1-based) -> parent node label
    long max_charge = 0;        // n_p, the p-th highest-root coefficient

    std::vector<Rat> coweight() const;  // ω^∨_p in parent α-coordinates
};

RootSystem build_root_system(Family family, int rank);
RootSystem build_root_system(const std::string& name);  // e.g. "B2"

NestingData remove_node(const RootSystem& rs, int p);

std::vector<Rat> charge_coweight(const NestingData& nd);

}  // namespace naba
