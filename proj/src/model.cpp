#include "nkerr/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nkerr {

int min_interaction_orders(int n) {
    return n / 2 + 1;
}

void validate(const ModelSpec& spec) {
    if (spec.n < 1) {
        throw std::invalid_argument("drive order n must be at least 1");
    }
    const int needed = min_interaction_orders(spec.n);
    if (static_cast<int>(spec.u.size()) < needed) {
        throw std::invalid_argument("interaction list must reach order floor(n/2+1) = " +
                                    std::to_string(needed) + "; got " +
                                    std::to_string(spec.u.size()) + " entries");
    }
    if (spec.g_n < 0.0) {
        throw std::invalid_argument("drive amplitude must be non-negative (phase gauge)");
    }
    if (spec.gamma < 0.0 || spec.eta_n < 0.0) {
        throw std::invalid_argument("loss rates must be non-negative");
    }
    if (!(spec.scale_l > 0.0)) {
        throw std::invalid_argument("thermodynamic scale L must be positive");
    }
}

SymmetryKind symmetry_kind(const ModelSpec& spec) {
    return spec.gamma == 0.0 ? SymmetryKind::strong : SymmetryKind::weak;
}

SparseComplexMatrix build_hamiltonian(const ModelSpec& spec) {
    validate(spec);
    if (spec.cutoff.n_c <= spec.n) {
        throw std::invalid_argument("cutoff must exceed the drive order, otherwise the "
                                    "drive term vanishes identically");
    }
    const Index dim = spec.cutoff.n_c;
    std::vector<Entry> entries;

    // (a^dag)^m a^m is diagonal with the falling factorial p(p-1)...(p-m+1).
    for (Index p = 0; p < dim; ++p) {
        double val = 0.0;
        for (std::size_t mi = 0; mi < spec.u.size(); ++mi) {
            const int m = static_cast<int>(mi) + 1;
            if (spec.u[mi] == 0.0 || p < m) continue;
            double falling = 1.0;
            for (int j = 0; j < m; ++j) falling *= static_cast<double>(p - j);
            val += spec.u[mi] / static_cast<double>(m) * falling;
        }
        if (val != 0.0) entries.push_back({p, p, Complex(val, 0.0)});
    }

    // G_n [a^n + (a^dag)^n]: <p|a^n|p+n> = sqrt((p+1)...(p+n)).
    if (spec.g_n != 0.0) {
        for (Index p = 0; p + spec.n < dim; ++p) {
            double amp = 1.0;
            for (int j = 1; j <= spec.n; ++j) amp *= static_cast<double>(p + j);
            amp = spec.g_n * std::sqrt(amp);
            entries.push_back({p, p + spec.n, Complex(amp, 0.0)});
            entries.push_back({p + spec.n, p, Complex(amp, 0.0)});
        }
    }

    return SparseComplexMatrix::from_triplets(dim, dim, std::move(entries));
}

std::vector<JumpOp> build_jump_ops(const ModelSpec& spec) {
    validate(spec);
    std::vector<JumpOp> jumps;
    const SparseComplexMatrix a = destroy(spec.cutoff);
    if (spec.gamma > 0.0) {
        jumps.push_back({a, spec.gamma});
    }
    if (spec.eta_n > 0.0) {
        jumps.push_back({matpow(a, spec.n), spec.eta_n});
    }
    return jumps;
}

RescaledModel rescale(const ModelSpec& spec, double l) {
    validate(spec);
    if (!(l > 0.0)) {
        throw std::invalid_argument("rescaling factor must be positive");
    }
    RescaledModel out{spec, l};
    out.spec.g_n = spec.g_n / std::sqrt(std::pow(l, spec.n - 2));
    for (std::size_t mi = 0; mi < out.spec.u.size(); ++mi) {
        out.spec.u[mi] = spec.u[mi] / std::pow(l, static_cast<double>(mi));
    }
    out.spec.eta_n = spec.eta_n / std::pow(l, spec.n - 1);
    out.spec.scale_l = spec.scale_l * l;
    return out;
}

int suggest_cutoff(const ModelSpec& spec, double max_semiclassical_density) {
    const double photons = 3.0 * max_semiclassical_density * spec.scale_l;
    return static_cast<int>(std::ceil(std::max(8.0, photons)));
}

}  // namespace nkerr
