#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "qglab/grid.hpp"
#include "qglab/rng.hpp"

namespace qglab {

using Complex = std::complex<double>;

/// Zero-mean real scalar field on the torus, stored as complex coefficients
/// c(k) of exp(i k.xi) over the retained lattice. Invariants: c(0) = 0,
/// c(-k) = conj(c(k)), and nothing outside the lattice (by storage).
class SpectralField {
public:
    explicit SpectralField(const TorusGrid& grid)
        : grid_(grid), coeffs_(grid.lattice_size(), Complex{0.0, 0.0}) {}

    const TorusGrid& grid() const { return grid_; }

    Complex coeff(int k1, int k2) const {
        if (!grid_.in_lattice(k1, k2)) return Complex{0.0, 0.0};
        return coeffs_[grid_.index_of(k1, k2)];
    }

    /// Sets c(k) and mirrors the conjugate so the field stays real.
    void set_coeff(int k1, int k2, Complex value) {
        if (!grid_.in_lattice(k1, k2))
            throw std::out_of_range("SpectralField: mode outside retained lattice");
        if (k1 == 0 && k2 == 0) return;  // zero-mean sector
        coeffs_[grid_.index_of(k1, k2)] = value;
        coeffs_[grid_.index_of(-k1, -k2)] = std::conj(value);
    }

    Complex& raw(int idx) { return coeffs_[idx]; }
    const Complex& raw(int idx) const { return coeffs_[idx]; }
    int size() const { return static_cast<int>(coeffs_.size()); }

    /// Projects onto the invariant set: zero mean, exact Hermitian symmetry.
    void symmetrize() {
        const int K = grid_.max_mode();
        coeffs_[grid_.index_of(0, 0)] = Complex{0.0, 0.0};
        for (int k2 = -K; k2 <= K; ++k2)
            for (int k1 = -K; k1 <= K; ++k1) {
                if (!TorusGrid::in_half_lattice(k1, k2)) continue;
                const Complex a = coeffs_[grid_.index_of(k1, k2)];
                const Complex b = coeffs_[grid_.index_of(-k1, -k2)];
                const Complex avg = 0.5 * (a + std::conj(b));
                coeffs_[grid_.index_of(k1, k2)] = avg;
                coeffs_[grid_.index_of(-k1, -k2)] = std::conj(avg);
            }
    }

    bool is_hermitian(double tol = 0.0) const {
        const int K = grid_.max_mode();
        if (std::abs(coeffs_[grid_.index_of(0, 0)]) > tol) return false;
        for (int k2 = -K; k2 <= K; ++k2)
            for (int k1 = -K; k1 <= K; ++k1) {
                if (!TorusGrid::in_half_lattice(k1, k2)) continue;
                const Complex d = coeffs_[grid_.index_of(k1, k2)] -
                                  std::conj(coeffs_[grid_.index_of(-k1, -k2)]);
                if (std::abs(d) > tol) return false;
            }
        return true;
    }

    SpectralField& operator+=(const SpectralField& o) {
        check_same_grid(o);
        for (int i = 0; i < size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        check_same_grid(o);
        for (int i = 0; i < size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    SpectralField& operator*=(double a) {
        for (auto& c : coeffs_) c *= a;
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double a, SpectralField f) { return f *= a; }

    bool identical_to(const SpectralField& o) const {
        if (grid_ != o.grid_) return false;
        for (int i = 0; i < size(); ++i)
            if (coeffs_[i] != o.coeffs_[i]) return false;
        return true;
    }

private:
    void check_same_grid(const SpectralField& o) const {
        if (grid_ != o.grid_) throw std::invalid_argument("SpectralField: grid mismatch");
    }

    TorusGrid grid_;
    std::vector<Complex> coeffs_;
};

/// Divergence-free velocity on the torus; both components share one grid.
struct VelocityField {
    SpectralField u1;
    SpectralField u2;

    explicit VelocityField(const TorusGrid& grid) : u1(grid), u2(grid) {}
};

/// Smooth random field: Gaussian coefficients damped by exp(-|k|^2 / (2 w^2)),
/// drawn from the counter stream of (seed, salt). Deterministic.
inline SpectralField random_smooth_field(const TorusGrid& grid, std::uint64_t seed,
                                         std::uint64_t salt = 0, double width = 4.0) {
    SpectralField f(grid);
    const int K = grid.max_mode();
    for (int k2 = -K; k2 <= K; ++k2)
        for (int k1 = -K; k1 <= K; ++k1) {
            if (!TorusGrid::in_half_lattice(k1, k2)) continue;
            rng::Key key(seed);
            key.absorb(static_cast<std::uint64_t>(rng::Stream::field_init))
                .absorb(salt)
                .absorb_i64(k1)
                .absorb_i64(k2);
            auto [a, b] = rng::normal_pair(key);
            const double damp = std::exp(-0.5 * (k1 * k1 + k2 * k2) / (width * width));
            f.set_coeff(k1, k2, damp * Complex{a, b});
        }
    return f;
}

}  // namespace qglab
