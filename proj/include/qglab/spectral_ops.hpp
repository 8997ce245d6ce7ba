#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qglab/fft.hpp"
#include "qglab/field.hpp"

namespace qglab {

inline constexpr double two_pi = 6.283185307179586476925286766559;

namespace detail {

/// Rounds a double to 46 significant bits (Veltkamp split with s = 7).
/// After this, products with integers |m| <= 127 are exact, which makes the
/// spectral divergence of the Riesz velocity cancel to exactly zero.
inline double trunc46(double x) {
    const double c = 129.0 * x;
    return c - (c - x);
}

inline Complex trunc46(Complex z) { return {trunc46(z.real()), trunc46(z.imag())}; }

}  // namespace detail

/// Velocity from the scalar via the perpendicular Riesz transform:
/// u1(k) = i k2 theta(k)/|k|, u2(k) = -i k1 theta(k)/|k|.
inline VelocityField riesz_velocity(const SpectralField& theta) {
    const TorusGrid& g = theta.grid();
    VelocityField u(g);
    const int K = g.max_mode();
    for (int k2 = -K; k2 <= K; ++k2)
        for (int k1 = -K; k1 <= K; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            const int idx = g.index_of(k1, k2);
            const double inv_norm = 1.0 / std::sqrt(static_cast<double>(k1 * k1 + k2 * k2));
            const Complex scaled = theta.raw(idx) * inv_norm;
            const Complex w = detail::trunc46(scaled);
            // i * (k2 w) and -i * (k1 w); the k_j * w products are exact.
            const Complex k2w = static_cast<double>(k2) * w;
            const Complex k1w = static_cast<double>(k1) * w;
            u.u1.raw(idx) = Complex{-k2w.imag(), k2w.real()};
            u.u2.raw(idx) = Complex{k1w.imag(), -k1w.real()};
        }
    return u;
}

/// Spectral multiplier |k|^s (fractional Laplacian calculus: Lambda^s).
/// Well-defined for every real s on the zero-mean sector.
inline SpectralField fractional_power(const SpectralField& theta, double s) {
    const TorusGrid& g = theta.grid();
    SpectralField out(g);
    const int K = g.max_mode();
    for (int k2 = -K; k2 <= K; ++k2)
        for (int k1 = -K; k1 <= K; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            const int idx = g.index_of(k1, k2);
            const double m = std::pow(static_cast<double>(k1 * k1 + k2 * k2), 0.5 * s);
            out.raw(idx) = m * theta.raw(idx);
        }
    return out;
}

/// Spatial derivative d/dxi_j, j in {1,2}.
inline SpectralField derivative(const SpectralField& theta, int axis) {
    const TorusGrid& g = theta.grid();
    SpectralField out(g);
    const int K = g.max_mode();
    for (int k2 = -K; k2 <= K; ++k2)
        for (int k1 = -K; k1 <= K; ++k1) {
            const int idx = g.index_of(k1, k2);
            const double kj = axis == 1 ? k1 : k2;
            const Complex c = theta.raw(idx);
            out.raw(idx) = Complex{-kj * c.imag(), kj * c.real()};
        }
    return out;
}

/// Poisson-kernel mollifier, multiplier exp(-delta |k|).
inline SpectralField poisson_mollify(const SpectralField& theta, double delta) {
    if (delta < 0.0) throw std::invalid_argument("poisson_mollify: delta must be >= 0");
    const TorusGrid& g = theta.grid();
    SpectralField out(g);
    const int K = g.max_mode();
    for (int k2 = -K; k2 <= K; ++k2)
        for (int k1 = -K; k1 <= K; ++k1) {
            const int idx = g.index_of(k1, k2);
            const double m = std::exp(-delta * std::sqrt(static_cast<double>(k1 * k1 + k2 * k2)));
            out.raw(idx) = m * theta.raw(idx);
        }
    return out;
}

/// Sobolev norm via Parseval in the L2-orthonormalized trigonometric basis:
/// ||f||_{H^s}^2 = (2 pi)^2 sum_k |k|^{2s} |c(k)|^2. Order 0 is the L2 norm.
inline double sobolev_norm(const SpectralField& theta, double s) {
    const TorusGrid& g = theta.grid();
    const int K = g.max_mode();
    double sum = 0.0;
    for (int k2 = -K; k2 <= K; ++k2)
        for (int k1 = -K; k1 <= K; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            const Complex c = theta.raw(g.index_of(k1, k2));
            const double m = std::pow(static_cast<double>(k1 * k1 + k2 * k2), s);
            sum += m * (c.real() * c.real() + c.imag() * c.imag());
        }
    return two_pi * std::sqrt(sum);
}

/// L2 inner product <f, g> = (2 pi)^2 sum_k c_f(k) conj(c_g(k)).
inline double inner_product(const SpectralField& f, const SpectralField& g) {
    double sum = 0.0;
    for (int i = 0; i < f.size(); ++i) {
        const Complex a = f.raw(i);
        const Complex b = g.raw(i);
        sum += a.real() * b.real() + a.imag() * b.imag();
    }
    return two_pi * two_pi * sum;
}

/// Lp norm by rectangle-rule quadrature on the physical grid (spectrally
/// accurate for smooth periodic integrands).
inline double lp_norm(const SpectralField& theta, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    const Transform& tr = Transform::of(theta.grid().n());
    std::vector<double> phys;
    tr.to_physical(theta, phys);
    const double cell = std::pow(two_pi / theta.grid().n(), 2);
    double sum = 0.0;
    for (double v : phys) sum += std::pow(std::abs(v), p);
    return std::pow(sum * cell, 1.0 / p);
}

inline double linf_norm_physical(const std::vector<double>& phys) {
    double m = 0.0;
    for (double v : phys) m = std::max(m, std::abs(v));
    return m;
}

/// Dealiased advection term u . grad(theta) with u = riesz_velocity(theta).
/// Products are formed on the physical grid; afterwards every mode outside
/// the retained lattice and the mean mode are zeroed, so retained modes equal
/// the exact spectral convolution (2/3-rule exactness).
inline SpectralField nonlinear_term(const SpectralField& theta) {
    const TorusGrid& g = theta.grid();
    const Transform& tr = Transform::of(g.n());
    const VelocityField u = riesz_velocity(theta);
    const SpectralField gx = derivative(theta, 1);
    const SpectralField gy = derivative(theta, 2);

    std::vector<double> pu1, pu2, pgx, pgy;
    tr.to_physical(u.u1, pu1);
    tr.to_physical(u.u2, pu2);
    tr.to_physical(gx, pgx);
    tr.to_physical(gy, pgy);
    for (std::size_t i = 0; i < pu1.size(); ++i) pu1[i] = pu1[i] * pgx[i] + pu2[i] * pgy[i];

    SpectralField out(g);
    tr.from_physical(pu1, out);  // gathers retained modes only, zeroes the mean
    return out;
}

/// Same advection term, with the velocity's field held fixed (u from `carrier`
/// acting on `transported`). Used by the transformed dynamics.
inline SpectralField advect(const SpectralField& carrier, const SpectralField& transported,
                            double* linf_velocity = nullptr) {
    const TorusGrid& g = carrier.grid();
    const Transform& tr = Transform::of(g.n());
    const VelocityField u = riesz_velocity(carrier);
    const SpectralField gx = derivative(transported, 1);
    const SpectralField gy = derivative(transported, 2);

    std::vector<double> pu1, pu2, pgx, pgy;
    tr.to_physical(u.u1, pu1);
    tr.to_physical(u.u2, pu2);
    tr.to_physical(gx, pgx);
    tr.to_physical(gy, pgy);
    if (linf_velocity) {
        double m = 0.0;
        for (std::size_t i = 0; i < pu1.size(); ++i)
            m = std::max(m, std::sqrt(pu1[i] * pu1[i] + pu2[i] * pu2[i]));
        *linf_velocity = m;
    }
    for (std::size_t i = 0; i < pu1.size(); ++i) pu1[i] = pu1[i] * pgx[i] + pu2[i] * pgy[i];

    SpectralField out(g);
    tr.from_physical(pu1, out);
    return out;
}

/// Fraction of the squared L2 mass carried by the top third of retained
/// modes; a resolution diagnostic.
inline double high_shell_energy_fraction(const SpectralField& theta) {
    const TorusGrid& g = theta.grid();
    const int K = g.max_mode();
    const int cut = (2 * K) / 3;
    double total = 0.0, high = 0.0;
    for (int k2 = -K; k2 <= K; ++k2)
        for (int k1 = -K; k1 <= K; ++k1) {
            const Complex c = theta.raw(g.index_of(k1, k2));
            const double e = std::norm(c);
            total += e;
            if (std::max(std::abs(k1), std::abs(k2)) > cut) high += e;
        }
    return total > 0.0 ? high / total : 0.0;
}

}  // namespace qglab
