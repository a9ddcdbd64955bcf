#pragma once

#include <span>
#include <string>
#include <vector>

#include "nkerr/liouvillian.hpp"

namespace nkerr {

// Z_n symmetry sector of a Liouville-space index (p, q).
//
// Weak symmetry: k = mod(p - q, n). Strong symmetry: (k_L, k_R) =
// (mod(p, n), mod(q, n)). The sign convention mod(p-q, n) is fixed here once;
// relabeling k -> n-k is a gauge choice and changes nothing physical.
struct SectorLabel {
    enum class Kind { none, weak, strong };
    Kind kind = Kind::none;
    int k = 0;        // weak quantum number
    int k_left = 0;   // strong quantum numbers
    int k_right = 0;

    static SectorLabel weak(int k);
    static SectorLabel strong(int k_left, int k_right);

    bool is_population() const;  // sector that can hold a trace-class state
    bool operator==(const SectorLabel&) const = default;
};

std::string to_string(const SectorLabel& label);

// Label for every flattened (p, q) index under the row-major convention.
std::vector<SectorLabel> label_sectors(int n, FockCutoff cutoff, SymmetryKind kind);

SectorLabel label_of_index(Index liouville_index, int n, int n_c, SymmetryKind kind);

// Permutation exposing the block-diagonal structure plus the blocks
// themselves. permutation[new_position] = original index; each block is a
// contiguous segment [start, start+length) of the permutation. Within a
// block the original index order is kept, so the layout is deterministic.
struct BlockDecomposition {
    struct Block {
        int start = 0;
        int length = 0;
        SectorLabel label;
    };

    std::vector<int> permutation;
    std::vector<Block> blocks;
    std::vector<SparseComplexMatrix> block_matrices;

    std::span<const int> block_indices(int which) const;
    int block_count() const { return static_cast<int>(blocks.size()); }
};

// Connected components of the symmetrized nonzero pattern of the
// superoperator, treated as an undirected graph. Runs in time linear in the
// number of stored entries. Blocks are ordered by their smallest original
// index and carry no sector labels.
BlockDecomposition find_blocks_graph(const Superoperator& sup);

// Label-aggregated decomposition: buckets indices by Z_n sector and checks
// that no stored entry couples different sectors (i.e. the model really has
// the symmetry). Blocks are ordered by label: k = 0..n-1 for weak, (k_L, k_R)
// row-major for strong. Throws if an entry crosses sectors.
BlockDecomposition sector_decomposition(const Superoperator& sup, int n, SymmetryKind kind);

// Submatrix of the permuted superoperator restricted to one block.
SparseComplexMatrix extract_block(const Superoperator& sup, const BlockDecomposition& dec,
                                  int which);

// True when every matrix element living outside the given sector is below
// tol in magnitude (the checkerboard test).
bool verify_structure(const DensityMatrix& rho, const SectorLabel& label, int n,
                      double tol = 1e-8);

}  // namespace nkerr
