#pragma once

#include <optional>
#include <string>
#include <vector>

#include "naba/matrix.hpp"
#include "naba/rootsys.hpp"

namespace naba {

// Weight-basis matrix representation with the symmetrized Cartan convention
// [h_i, e_j] = (α_i,α_j) e_j, [e_i, f_j] = δ_ij h_i. Weights are stored in
// simple-root coordinates.
struct MatrixRep {
    RootSystem algebra;
    int dim = 0;
    std::vector<QMat> e, f, h;  // one per simple root
    std::vector<std::vector<Rat>> basis_weights;

    // h-eigenvalue of basis vector k under h_i (1-based i).
    Rat weight_pairing(int k, int i) const {
        return algebra.pairing(basis_weights[k], algebra.simple_roots[i - 1]);
    }
};

// Vector (defining) representations: dim r+1 for A_r, 2r+1 for B_r, 2r for C_r/D_r.
MatrixRep defining_rep(const RootSystem& rs);

// Matrix of the charge operator −h^p in the rep's basis (diagonal).
QMat charge_operator(const MatrixRep& rep, const NestingData& nesting);

struct ChargeBlock {
    Rat charge;                  // c_0 + J
    int offset = 0, dim = 0;     // contiguous range in the sorted basis
    int hw_index = 0;            // basis index of the ĝ-highest vector
    std::vector<Rat> hw_weight;  // full g-weight of that vector (α-coords)
    std::vector<Rat> sub_labels; // ĝ Dynkin labels (ordered by sub node)
};

struct ChargeDecomposition {
    MatrixRep rep;  // basis sorted by (charge, weight lex desc)
    NestingData nesting;
    std::vector<ChargeBlock> blocks;
    int N = 0;  // number of blocks − 1
    Rat c0;

    const ChargeBlock& block(int J) const { return blocks.at(J); }
    std::vector<int> indices(int J) const {
        std::vector<int> out(blocks.at(J).dim);
        for (int k = 0; k < blocks[J].dim; ++k) out[k] = blocks[J].offset + k;
        return out;
    }
    // Charge label J of a basis index.
    int block_of(int idx) const;
};

// Decompose `rep` into charge eigenspaces; sorts the basis, verifies that the
// spectrum is an integer ladder and that every block is ĝ-irreducible.
ChargeDecomposition charge_decompose(const MatrixRep& rep, const NestingData& nesting);

struct TensorSector {
    long total_charge_label = 0;              // K = I+J
    std::vector<std::pair<int, int>> pairs;   // ordered by I
    int dim = 0;
};

std::vector<TensorSector> tensor_charge_blocks(const ChargeDecomposition& a,
                                               const ChargeDecomposition& b);

// Invariant bilinear form of the rep: solves x^T G + G x = 0 for all
// generators. Returns nullopt when the rep is not self-dual.
std::optional<QMat> invariant_form(const MatrixRep& rep);

}  // namespace naba
