#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qglab/fft.hpp"
#include "qglab/field.hpp"
#include "qglab/spectral_ops.hpp"
#include "test_helpers.hpp"

using namespace qglab;
using namespace qglab::testing;

TEST_CASE("round-trip transform reproduces retained-lattice fields") {
    for (int n : {8, 64}) {
        TorusGrid g(n);
        for (std::uint64_t s = 0; s < 10; ++s) {
            SpectralField f = random_smooth_field(g, 1234, s, 6.0);
            const Transform& tr = Transform::of(n);
            std::vector<double> phys;
            tr.to_physical(f, phys);
            SpectralField back(g);
            tr.from_physical(phys, back);
            double num = 0.0, den = 0.0;
            for (int i = 0; i < f.size(); ++i) {
                num += std::norm(back.raw(i) - f.raw(i));
                den += std::norm(f.raw(i));
            }
            REQUIRE(std::sqrt(num / den) < 1e-12);
        }
    }
}

TEST_CASE("riesz velocity of sin(x1) is (0, -cos(x1))") {
    TorusGrid g(64);
    SpectralField theta = sine_field(g, 1, 0);
    VelocityField u = riesz_velocity(theta);
    SpectralField want = cosine_field(g, 1, 0, -1.0);
    for (int i = 0; i < theta.size(); ++i) {
        REQUIRE(std::abs(u.u1.raw(i)) == 0.0);
        REQUIRE(std::abs(u.u2.raw(i) - want.raw(i)) < 1e-14);
    }
}

TEST_CASE("riesz velocity of zero is zero") {
    TorusGrid g(16);
    SpectralField theta(g);
    VelocityField u = riesz_velocity(theta);
    for (int i = 0; i < theta.size(); ++i) {
        REQUIRE(u.u1.raw(i) == Complex{0.0, 0.0});
        REQUIRE(u.u2.raw(i) == Complex{0.0, 0.0});
    }
}

TEST_CASE("spectral incompressibility is exact per retained mode") {
    for (int n : {8, 64, 128}) {
        TorusGrid g(n);
        const int K = g.max_mode();
        for (std::uint64_t s = 0; s < 20; ++s) {
            SpectralField theta = random_smooth_field(g, 777 + s, s, 0.45 * K);
            VelocityField u = riesz_velocity(theta);
            for (int k2 = -K; k2 <= K; ++k2)
                for (int k1 = -K; k1 <= K; ++k1) {
                    const int idx = g.index_of(k1, k2);
                    const Complex div = static_cast<double>(k1) * u.u1.raw(idx) +
                                        static_cast<double>(k2) * u.u2.raw(idx);
                    REQUIRE(div.real() == 0.0);
                    REQUIRE(div.imag() == 0.0);
                }
        }
    }
}

TEST_CASE("fractional power multipliers") {
    TorusGrid g(32);

    SECTION("s = 0 is the identity") {
        SpectralField f = random_smooth_field(g, 9, 0);
        SpectralField out = fractional_power(f, 0.0);
        REQUIRE(out.identical_to(f));
    }
    SECTION("Lambda^2 sin(2 x2) = 4 sin(2 x2)") {
        SpectralField f = sine_field(g, 0, 2);
        SpectralField out = fractional_power(f, 2.0);
        SpectralField want = sine_field(g, 0, 2, 4.0);
        for (int i = 0; i < f.size(); ++i) REQUIRE(std::abs(out.raw(i) - want.raw(i)) < 1e-15);
    }
    SECTION("|k| = 1 modes are fixed points for any exponent") {
        SpectralField f = sine_field(g, 1, 0);
        for (double a : {0.55, 0.75, 0.9, 2.0, -0.5}) {
            SpectralField out = fractional_power(f, 2.0 * a);
            for (int i = 0; i < f.size(); ++i) REQUIRE(std::abs(out.raw(i) - f.raw(i)) < 1e-15);
        }
    }
    SECTION("negative power inverts on zero-mean fields") {
        SpectralField f = random_smooth_field(g, 4, 1);
        for (double s : {0.75, 1.5, -0.5}) {
            SpectralField back = fractional_power(fractional_power(f, s), -s);
            double num = 0.0, den = 0.0;
            for (int i = 0; i < f.size(); ++i) {
                num += std::norm(back.raw(i) - f.raw(i));
                den += std::norm(f.raw(i));
            }
            REQUIRE(std::sqrt(num / den) < 1e-12);
        }
    }
}

TEST_CASE("sobolev norm") {
    TorusGrid g(64);
    SECTION("zero field") { REQUIRE(sobolev_norm(SpectralField(g), 1.3) == 0.0); }
    SECTION("sin(x1) has L2 norm pi sqrt(2)") {
        SpectralField f = sine_field(g, 1, 0);
        REQUIRE(rel_err(sobolev_norm(f, 0.0), 4.442882938158366) < 1e-13);
    }
    SECTION("single mode at |k| = 2 scales by 2^s") {
        SpectralField f = sine_field(g, 2, 0, 0.7);
        const double l2 = sobolev_norm(f, 0.0);
        for (double s : {-0.5, 0.5, 1.0, 2.5})
            REQUIRE(rel_err(sobolev_norm(f, s), std::pow(2.0, s) * l2) < 1e-12);
    }
}

TEST_CASE("lp norm quadrature") {
    TorusGrid g(64);
    SECTION("parseval: p = 2 agrees with sobolev order 0") {
        for (std::uint64_t s = 0; s < 5; ++s) {
            SpectralField f = random_smooth_field(g, 31 + s, s);
            REQUIRE(rel_err(lp_norm(f, 2.0), sobolev_norm(f, 0.0)) < 1e-12);
        }
    }
    SECTION("sin(x1) in L2 and L4") {
        SpectralField f = sine_field(g, 1, 0);
        REQUIRE(rel_err(lp_norm(f, 2.0), 4.442882938158366) < 1e-12);
        // (int sin^4 over the square)^(1/4) = (3 pi^2 / 2)^(1/4)
        REQUIRE(rel_err(lp_norm(f, 4.0), 1.961542630300344) < 1e-12);
    }
}

TEST_CASE("poisson mollifier") {
    TorusGrid g(32);
    SECTION("delta = 0 is the identity") {
        SpectralField f = random_smooth_field(g, 8, 2);
        REQUIRE(poisson_mollify(f, 0.0).identical_to(f));
    }
    SECTION("sin(x1) shrinks by exp(-delta)") {
        SpectralField f = sine_field(g, 1, 0);
        for (double d : {0.1, 1.0, 3.0}) {
            SpectralField out = poisson_mollify(f, d);
            SpectralField want = sine_field(g, 1, 0, std::exp(-d));
            for (int i = 0; i < f.size(); ++i) REQUIRE(std::abs(out.raw(i) - want.raw(i)) < 1e-15);
        }
    }
    SECTION("never increases any Sobolev norm") {
        SpectralField f = random_smooth_field(g, 21, 3);
        for (double d : {0.0, 0.05, 0.7})
            for (double s : {-0.5, 0.0, 1.0, 2.0})
                REQUIRE(sobolev_norm(poisson_mollify(f, d), s) <= sobolev_norm(f, s) * (1 + 1e-15));
    }
    SECTION("negative delta rejected") {
        SpectralField f(g);
        REQUIRE_THROWS_AS(poisson_mollify(f, -0.1), std::invalid_argument);
    }
}

TEST_CASE("advection of sin(x1) by its own Riesz velocity vanishes") {
    TorusGrid g(64);
    SpectralField theta = sine_field(g, 1, 0);
    SpectralField nl = nonlinear_term(theta);
    for (int i = 0; i < nl.size(); ++i) REQUIRE(std::abs(nl.raw(i)) < 1e-14);
}

TEST_CASE("skew symmetry of the advection pairing") {
    TorusGrid g(64);
    for (std::uint64_t s = 0; s < 100; ++s) {
        SpectralField theta = random_smooth_field(g, 5000 + s, s);
        const double h1 = sobolev_norm(theta, 1.0);
        const double pairing = std::abs(inner_product(nonlinear_term(theta), theta));
        REQUIRE(pairing <= 1e-10 * h1 * h1);
    }
}

TEST_CASE("advection adjoint identity with frozen velocity") {
    TorusGrid g(64);
    for (std::uint64_t s = 0; s < 20; ++s) {
        SpectralField theta = random_smooth_field(g, 600 + s, 2 * s);
        SpectralField phi = random_smooth_field(g, 600 + s, 2 * s + 1);
        const double lhs = inner_product(advect(theta, phi), theta);
        const double rhs = -inner_product(advect(theta, theta), phi);
        const double scale = sobolev_norm(theta, 1.0) * sobolev_norm(theta, 1.0) +
                             sobolev_norm(phi, 1.0) * sobolev_norm(phi, 1.0);
        REQUIRE(std::abs(lhs - rhs) <= 1e-10 * scale);
    }
}

TEST_CASE("dealiased advection equals brute-force convolution on n = 8") {
    TorusGrid g(8);
    for (std::uint64_t s = 0; s < 10; ++s) {
        SpectralField theta = random_smooth_field(g, 99 + s, s, 1.5);
        SpectralField fast = nonlinear_term(theta);
        SpectralField slow = convolution_oracle(theta);
        for (int i = 0; i < fast.size(); ++i)
            REQUIRE(std::abs(fast.raw(i) - slow.raw(i)) < 1e-10);
    }
}

TEST_CASE("operations preserve the real-field invariants") {
    TorusGrid g(32);
    SpectralField theta = random_smooth_field(g, 404, 0);
    REQUIRE(theta.is_hermitian());
    REQUIRE(nonlinear_term(theta).is_hermitian());
    REQUIRE(fractional_power(theta, 0.8).is_hermitian());
    REQUIRE(poisson_mollify(theta, 0.3).is_hermitian());
    VelocityField u = riesz_velocity(theta);
    REQUIRE(u.u1.is_hermitian());
    REQUIRE(u.u2.is_hermitian());
}
