#include "nkerr/symmetry.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace nkerr {

SectorLabel SectorLabel::weak(int k) {
    SectorLabel l;
    l.kind = Kind::weak;
    l.k = k;
    return l;
}

SectorLabel SectorLabel::strong(int k_left, int k_right) {
    SectorLabel l;
    l.kind = Kind::strong;
    l.k_left = k_left;
    l.k_right = k_right;
    return l;
}

bool SectorLabel::is_population() const {
    if (kind == Kind::weak) return k == 0;
    if (kind == Kind::strong) return k_left == k_right;
    return false;
}

std::string to_string(const SectorLabel& label) {
    switch (label.kind) {
        case SectorLabel::Kind::weak:
            return "k=" + std::to_string(label.k);
        case SectorLabel::Kind::strong:
            return "(" + std::to_string(label.k_left) + "," + std::to_string(label.k_right) + ")";
        default:
            return "unlabeled";
    }
}

SectorLabel label_of_index(Index liouville_index, int n, int n_c, SymmetryKind kind) {
    const int p = static_cast<int>(liouville_index / n_c);
    const int q = static_cast<int>(liouville_index % n_c);
    if (kind == SymmetryKind::weak) {
        return SectorLabel::weak(((p - q) % n + n) % n);
    }
    return SectorLabel::strong(p % n, q % n);
}

std::vector<SectorLabel> label_sectors(int n, FockCutoff cutoff, SymmetryKind kind) {
    if (n < 1) throw std::invalid_argument("drive order n must be at least 1");
    const Index dim = static_cast<Index>(cutoff.n_c) * cutoff.n_c;
    std::vector<SectorLabel> labels;
    labels.reserve(static_cast<std::size_t>(dim));
    for (Index i = 0; i < dim; ++i) {
        labels.push_back(label_of_index(i, n, cutoff.n_c, kind));
    }
    return labels;
}

std::span<const int> BlockDecomposition::block_indices(int which) const {
    const Block& b = blocks.at(static_cast<std::size_t>(which));
    return std::span<const int>(permutation.data() + b.start,
                                static_cast<std::size_t>(b.length));
}

namespace {

// Union-find with path halving; the representative is not meaningful by
// itself, components are read back in index order afterwards.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) parent_[b] = a; else parent_[a] = b;
    }

private:
    std::vector<std::size_t> parent_;
};

SparseComplexMatrix restrict_to(const SparseComplexMatrix& m, std::span<const int> indices,
                                const std::vector<int>& local_of_global) {
    std::vector<Entry> entries;
    for (const Entry& e : m.entries()) {
        const int lr = local_of_global[static_cast<std::size_t>(e.row)];
        const int lc = local_of_global[static_cast<std::size_t>(e.col)];
        if (lr >= 0 && lc >= 0) entries.push_back({lr, lc, e.value});
    }
    const Index d = static_cast<Index>(indices.size());
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    return SparseComplexMatrix::from_entries_presorted(d, d, std::move(entries));
}

void fill_block_matrices(const Superoperator& sup, BlockDecomposition& dec) {
    const std::size_t dim = static_cast<std::size_t>(sup.matrix.rows());
    std::vector<int> local_of_global(dim, -1);
    dec.block_matrices.reserve(dec.blocks.size());
    for (int b = 0; b < dec.block_count(); ++b) {
        const auto idx = dec.block_indices(b);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            local_of_global[static_cast<std::size_t>(idx[i])] = static_cast<int>(i);
        }
        dec.block_matrices.push_back(restrict_to(sup.matrix, idx, local_of_global));
        for (int g : idx) local_of_global[static_cast<std::size_t>(g)] = -1;
    }
}

}  // namespace

BlockDecomposition find_blocks_graph(const Superoperator& sup) {
    if (!sup.matrix.is_square()) {
        throw std::invalid_argument("superoperator matrix must be square");
    }
    const std::size_t dim = static_cast<std::size_t>(sup.matrix.rows());
    DisjointSets sets(dim);
    // An entry (r, c) is an undirected edge; unioning both orientations covers
    // the |L| + |L^T| symmetrized pattern.
    for (const Entry& e : sup.matrix.entries()) {
        sets.unite(static_cast<std::size_t>(e.row), static_cast<std::size_t>(e.col));
    }

    std::vector<int> component_id(dim, -1);
    std::vector<std::vector<int>> members;
    for (std::size_t i = 0; i < dim; ++i) {
        const std::size_t root = sets.find(i);
        if (component_id[root] < 0) {
            component_id[root] = static_cast<int>(members.size());
            members.emplace_back();
        }
        members[static_cast<std::size_t>(component_id[root])].push_back(static_cast<int>(i));
    }

    BlockDecomposition dec;
    dec.permutation.reserve(dim);
    int start = 0;
    for (const auto& m : members) {
        dec.blocks.push_back({start, static_cast<int>(m.size()), SectorLabel{}});
        dec.permutation.insert(dec.permutation.end(), m.begin(), m.end());
        start += static_cast<int>(m.size());
    }
    fill_block_matrices(sup, dec);
    return dec;
}

BlockDecomposition sector_decomposition(const Superoperator& sup, int n, SymmetryKind kind) {
    if (n < 1) throw std::invalid_argument("drive order n must be at least 1");
    if (!sup.matrix.is_square()) {
        throw std::invalid_argument("superoperator matrix must be square");
    }
    const std::size_t dim = static_cast<std::size_t>(sup.matrix.rows());
    const int n_c = sup.n_c;
    if (static_cast<std::size_t>(n_c) * n_c != dim) {
        throw std::invalid_argument("superoperator dimension is not n_c^2");
    }

    const int sector_count = (kind == SymmetryKind::weak) ? n : n * n;
    auto sector_of = [&](Index i) {
        const SectorLabel l = label_of_index(i, n, n_c, kind);
        return (kind == SymmetryKind::weak) ? l.k : l.k_left * n + l.k_right;
    };

    // The label partition is only a valid block structure if no entry couples
    // two sectors; otherwise the claimed symmetry is absent from the model.
    for (const Entry& e : sup.matrix.entries()) {
        if (sector_of(e.row) != sector_of(e.col)) {
            throw std::invalid_argument(
                "superoperator entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                ") couples sectors " + to_string(label_of_index(e.row, n, n_c, kind)) + " and " +
                to_string(label_of_index(e.col, n, n_c, kind)) +
                "; the model does not have the requested Z_" + std::to_string(n) + " symmetry");
        }
    }

    std::vector<std::vector<int>> members(static_cast<std::size_t>(sector_count));
    for (Index i = 0; i < static_cast<Index>(dim); ++i) {
        members[static_cast<std::size_t>(sector_of(i))].push_back(static_cast<int>(i));
    }

    BlockDecomposition dec;
    dec.permutation.reserve(dim);
    int start = 0;
    for (int s = 0; s < sector_count; ++s) {
        const SectorLabel label = (kind == SymmetryKind::weak)
                                      ? SectorLabel::weak(s)
                                      : SectorLabel::strong(s / n, s % n);
        dec.blocks.push_back({start, static_cast<int>(members[s].size()), label});
        dec.permutation.insert(dec.permutation.end(), members[s].begin(), members[s].end());
        start += static_cast<int>(members[s].size());
    }
    fill_block_matrices(sup, dec);
    return dec;
}

SparseComplexMatrix extract_block(const Superoperator& sup, const BlockDecomposition& dec,
                                  int which) {
    if (which < 0 || which >= dec.block_count()) {
        throw std::out_of_range("block index out of range");
    }
    const std::size_t dim = static_cast<std::size_t>(sup.matrix.rows());
    std::vector<int> local_of_global(dim, -1);
    const auto idx = dec.block_indices(which);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        local_of_global[static_cast<std::size_t>(idx[i])] = static_cast<int>(i);
    }
    return restrict_to(sup.matrix, idx, local_of_global);
}

bool verify_structure(const DensityMatrix& rho, const SectorLabel& label, int n, double tol) {
    const int n_c = static_cast<int>(rho.data.rows());
    const SymmetryKind kind =
        (label.kind == SectorLabel::Kind::strong) ? SymmetryKind::strong : SymmetryKind::weak;
    for (int p = 0; p < n_c; ++p) {
        for (int q = 0; q < n_c; ++q) {
            const SectorLabel here =
                label_of_index(static_cast<Index>(p) * n_c + q, n, n_c, kind);
            if (!(here == label) && std::abs(rho.data(p, q)) >= tol) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace nkerr
