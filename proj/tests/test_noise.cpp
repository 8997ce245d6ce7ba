#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qglab/noise.hpp"
#include "test_helpers.hpp"

using namespace qglab;
using namespace qglab::testing;

namespace {
CovarianceSpectrum small_table() {
    return CovarianceSpectrum::from_table({{1, 0, 0.5}, {2, 1, 0.25}, {0, 1, 0.1}});
}
}  // namespace

TEST_CASE("hypothesis E.1 checker") {
    SECTION("worked example: s=1, alpha=3/4, sigma0=0.3, eps0=0.1") {
        auto spec = CovarianceSpectrum::power_law(0.1, 3.5);
        E1Report r = check_hypothesis_e1(spec, 1.0, 0.75, 0.3, 0.1, 32);
        REQUIRE(r.m_star == Catch::Approx(4.2).margin(1e-12));
        REQUIRE(r.verdict == E1Report::Verdict::admissible);  // q = 3.5 > 3.1
        auto spec_bad = CovarianceSpectrum::power_law(0.1, 3.0);
        REQUIRE(check_hypothesis_e1(spec_bad, 1.0, 0.75, 0.3, 0.1, 32).verdict ==
                E1Report::Verdict::inadmissible);  // q = 3.0 < 3.1
    }
    SECTION("zero spectrum is admissible with zero trace") {
        E1Report r = check_hypothesis_e1(CovarianceSpectrum::zero(), 1.0, 0.75, 0.3, 0.1, 16);
        REQUIRE(r.verdict == E1Report::Verdict::admissible);
        REQUIRE(r.truncated_trace == 0.0);
    }
    SECTION("finite tables are admissible regardless of exponents") {
        E1Report r = check_hypothesis_e1(small_table(), 1.0, 0.9, 0.5, 2.0, 16);
        REQUIRE(r.verdict == E1Report::Verdict::admissible);
        REQUIRE(r.truncated_trace > 0.0);
    }
    SECTION("parameter domain errors") {
        auto spec = CovarianceSpectrum::power_law(0.1, 4.0);
        REQUIRE_THROWS_WITH(check_hypothesis_e1(spec, 0.2, 0.75, 0.5, 0.1, 16),
                            Catch::Matchers::ContainsSubstring("out of range"));
        REQUIRE_THROWS_WITH(check_hypothesis_e1(spec, 1.0, 0.75, 0.3, 0.0, 16),
                            Catch::Matchers::ContainsSubstring("out of range"));
        REQUIRE_THROWS(check_hypothesis_e1(spec, 1.0, 0.4, 0.3, 0.1, 16));
        REQUIRE_THROWS(check_hypothesis_e1(spec, 1.0, 0.75, 0.3, 0.1, 3));
    }
    SECTION("verdict matches the closed-form inequality on random tuples") {
        for (int trial = 0; trial < 50; ++trial) {
            rng::Key key(4242);
            key.absorb_i64(trial);
            const double s = 0.5 + 1.5 * rng::uniform01(key.digest(0));
            const double alpha = 0.55 + 0.4 * rng::uniform01(key.digest(1));
            const double sigma0 = std::max(0.0, 1.0 - s) + 0.05 + rng::uniform01(key.digest(2));
            const double eps0 = 0.05 + rng::uniform01(key.digest(3));
            const double q = 1.0 + 4.0 * rng::uniform01(key.digest(4));
            auto spec = CovarianceSpectrum::power_law(0.3, q);
            E1Report r = check_hypothesis_e1(spec, s, alpha, sigma0, eps0, 8);
            const double m_star =
                std::max(2.0 * s + 2.0 - 2.0 * alpha + 2.0 * sigma0, 4.0 + 2.0 * eps0);
            const bool want = 2.0 * q - m_star > 2.0;
            REQUIRE((r.verdict == E1Report::Verdict::admissible) == want);
        }
    }
}

TEST_CASE("wiener increments") {
    WienerRealization path(7, 0.0625, small_table());

    SECTION("deterministic in (seed, mode, bin)") {
        auto a = path.increment(1, 0, 12);
        auto b = path.increment(1, 0, 12);
        REQUIRE(a.first == b.first);
        REQUIRE(a.second == b.second);
        WienerRealization again(7, 0.0625, small_table());
        auto c = again.increment(1, 0, 12);
        REQUIRE(a.first == c.first);
    }
    SECTION("zero mode rejected") {
        REQUIRE_THROWS_WITH(path.increment(0, 0, 3),
                            Catch::Matchers::ContainsSubstring("zero mean mode"));
    }
    SECTION("sample variance of 1e5 bins within 3 standard errors") {
        const int N = 100000;
        double sum = 0.0, sum2 = 0.0;
        for (int j = 0; j < N; ++j) {
            auto [c, s] = path.increment(1, 0, j);
            sum += c;
            sum2 += c * c;
            (void)s;
        }
        const double mean = sum / N;
        const double var = sum2 / N - mean * mean;
        const double want = 0.25 * 0.0625;  // g^2 * bin width
        REQUIRE(std::abs(var - want) <= 3.0 * want * std::sqrt(2.0 / N));
    }
    SECTION("disjoint bins uncorrelated within 3 standard errors") {
        const int N = 100000;
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (int j = 0; j < N; ++j) {
            auto [a, u1] = path.increment(1, 0, 2 * j);
            auto [b, u2] = path.increment(1, 0, 2 * j + 1);
            (void)u1; (void)u2;
            sxy += a * b;
            sxx += a * a;
            syy += b * b;
        }
        const double corr = sxy / std::sqrt(sxx * syy);
        REQUIRE(std::abs(corr) <= 3.0 / std::sqrt(static_cast<double>(N)));
    }
    SECTION("pullback: extending into the past preserves later increments") {
        auto late = path.increment(2, 1, 1000);
        for (std::int64_t b = -100000; b < -99990; ++b) (void)path.increment(2, 1, b);
        auto late2 = path.increment(2, 1, 1000);
        REQUIRE(late.first == late2.first);
        REQUIRE(late.second == late2.second);
    }
}

TEST_CASE("wiener shift") {
    WienerRealization path(99, 0.25, small_table());

    SECTION("shift by zero is the identity") {
        auto s = path.shift(0.0);
        auto a = path.increment(1, 0, 5);
        auto b = s.increment(1, 0, 5);
        REQUIRE(a.first == b.first);
        REQUIRE(a.second == b.second);
    }
    SECTION("shifts compose additively") {
        auto s1 = path.shift(0.5).shift(1.25);
        auto s2 = path.shift(1.75);
        for (std::int64_t b : {-7, 0, 3}) {
            REQUIRE(s1.increment(2, 1, b).first == s2.increment(2, 1, b).first);
            REQUIRE(s1.increment(2, 1, b).second == s2.increment(2, 1, b).second);
        }
    }
    SECTION("shifted path reads later bins of the original") {
        auto s = path.shift(0.75);  // 3 bins
        REQUIRE(s.increment(1, 0, 0).first == path.increment(1, 0, 3).first);
    }
    SECTION("W_shifted(t) = W(t+r) - W(r) on the bin grid") {
        auto s = path.shift(1.0);  // 4 bins
        double w_shift = 0.0, w_orig = 0.0;
        for (std::int64_t b = 0; b < 8; ++b) w_shift += s.increment(1, 0, b).first;
        for (std::int64_t b = 4; b < 12; ++b) w_orig += path.increment(1, 0, b).first;
        REQUIRE(w_shift == w_orig);
    }
    SECTION("non-aligned shift rejected") {
        REQUIRE_THROWS_WITH(path.shift(0.3),
                            Catch::Matchers::ContainsSubstring("align with the bin grid"));
    }
}

TEST_CASE("dyadic bridge refinement") {
    WienerRealization path(5, 0.5, small_table());

    SECTION("micro increments sum to the bin increment") {
        for (int level : {1, 2, 4}) {
            std::vector<double> micro;
            path.fill_micro_increments(1, 0, 0, 17, level, micro);
            REQUIRE(static_cast<int>(micro.size()) == (1 << level));
            double sum = 0.0;
            for (double x : micro) sum += x;
            const double bin = path.increment(1, 0, 17).first;
            REQUIRE(sum == Catch::Approx(bin).epsilon(1e-12));
        }
    }
    SECTION("values at shared dyadic points agree across resolutions") {
        std::vector<double> lo, hi;
        path.fill_micro_increments(2, 1, 1, -4, 2, lo);
        path.fill_micro_increments(2, 1, 1, -4, 3, hi);
        double wl = 0.0, wh = 0.0;
        for (int j = 0; j < 2; ++j) wl += lo[j];
        for (int j = 0; j < 4; ++j) wh += hi[j];
        REQUIRE(wl == Catch::Approx(wh).epsilon(1e-12));
    }
    SECTION("micro variance scales with the interval width") {
        const int N = 20000;
        double sum2 = 0.0;
        for (int j = 0; j < N; ++j) {
            std::vector<double> micro;
            path.fill_micro_increments(1, 0, 0, j, 2, micro);
            sum2 += micro[1] * micro[1];
        }
        const double want = 0.25 * 0.5 / 4.0;  // g^2 h / 4
        REQUIRE(std::abs(sum2 / N - want) <= 4.0 * want * std::sqrt(2.0 / N));
    }
}
