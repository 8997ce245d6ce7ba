#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace qglab {

/// Uniform n-by-n grid on the 2-pi periodic square, together with the
/// dealiased spectral lattice {k : |k_i| <= K}, K = floor(fraction * n/2).
/// The physical grid is always n x n; the dealias mask lives purely in
/// spectral space.
class TorusGrid {
public:
    TorusGrid(int n, double dealias_fraction = 2.0 / 3.0)
        : n_(n), dealias_fraction_(dealias_fraction) {
        if (n < 8 || n % 2 != 0)
            throw std::invalid_argument("TorusGrid: n must be even and >= 8, got " + std::to_string(n));
        if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
            throw std::invalid_argument("TorusGrid: dealias_fraction must lie in (0,1]");
        max_mode_ = static_cast<int>(std::floor(dealias_fraction * (n / 2)));
        if (max_mode_ < 1)
            throw std::invalid_argument("TorusGrid: retained lattice is empty");
        // |k_i| <= 127 keeps integer-times-coefficient products exact after
        // the 46-bit mantissa split used by the Riesz velocity.
        if (max_mode_ > 127)
            throw std::invalid_argument("TorusGrid: retained modes above 127 unsupported");
    }

    int n() const { return n_; }
    double dealias_fraction() const { return dealias_fraction_; }
    /// Largest retained |k_i|.
    int max_mode() const { return max_mode_; }
    /// Lattice points per axis, 2K+1.
    int lattice_extent() const { return 2 * max_mode_ + 1; }
    /// Total retained lattice points, (2K+1)^2 (including k = 0).
    int lattice_size() const { return lattice_extent() * lattice_extent(); }

    bool in_lattice(int k1, int k2) const {
        return k1 >= -max_mode_ && k1 <= max_mode_ && k2 >= -max_mode_ && k2 <= max_mode_;
    }

    /// Flat index of lattice point (k1,k2), row-major over k2 then k1.
    int index_of(int k1, int k2) const {
        return (k2 + max_mode_) * lattice_extent() + (k1 + max_mode_);
    }
    int k1_at(int idx) const { return idx % lattice_extent() - max_mode_; }
    int k2_at(int idx) const { return idx / lattice_extent() - max_mode_; }

    /// True on the canonical half lattice {k2 > 0} u {k1 > 0, k2 = 0}
    /// (one representative per Hermitian pair).
    static bool in_half_lattice(int k1, int k2) {
        return k2 > 0 || (k2 == 0 && k1 > 0);
    }

    bool operator==(const TorusGrid& o) const {
        return n_ == o.n_ && max_mode_ == o.max_mode_;
    }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }

private:
    int n_;
    double dealias_fraction_;
    int max_mode_;
};

}  // namespace qglab
