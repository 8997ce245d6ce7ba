#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qglab/grid.hpp"
#include "qglab/rng.hpp"

namespace qglab {

/// Diagonal-in-Fourier covariance spectrum of the forcing: per-mode noise
/// amplitudes g_k with g_{-k} = g_k and g_0 = 0.
class CovarianceSpectrum {
public:
    enum class Kind { power_law, table };

    static CovarianceSpectrum power_law(double sigma, double q) {
        if (sigma < 0.0) throw std::invalid_argument("spectrum: sigma must be >= 0");
        CovarianceSpectrum s;
        s.kind_ = Kind::power_law;
        s.sigma_ = sigma;
        s.q_ = q;
        return s;
    }

    static CovarianceSpectrum zero() { return power_law(0.0, 0.0); }

    static CovarianceSpectrum from_table(const std::vector<std::tuple<int, int, double>>& rows) {
        CovarianceSpectrum s;
        s.kind_ = Kind::table;
        s.sigma_ = 1.0;
        for (auto [k1, k2, g] : rows) {
            if (g < 0.0) throw std::invalid_argument("spectrum table: g_k must be >= 0");
            if (k1 == 0 && k2 == 0) {
                if (g != 0.0) throw std::invalid_argument("spectrum table: g_0 must be 0");
                continue;
            }
            s.table_[canonical(k1, k2)] = g;
        }
        return s;
    }

    Kind kind() const { return kind_; }
    double sigma() const { return sigma_; }
    double q() const { return q_; }

    /// Amplitude g_k; symmetric in k by construction.
    double amp(int k1, int k2) const {
        if (k1 == 0 && k2 == 0) return 0.0;
        if (kind_ == Kind::power_law) {
            return sigma_ * std::pow(static_cast<double>(k1 * k1 + k2 * k2), -0.5 * q_);
        }
        auto it = table_.find(canonical(k1, k2));
        return it == table_.end() ? 0.0 : it->second;
    }

    /// Largest |k|_inf carried by a table; 0 for an empty table.
    int table_support() const {
        int m = 0;
        for (auto& [k, g] : table_)
            m = std::max({m, std::abs(k.first), std::abs(k.second)});
        return m;
    }

    std::string describe() const {
        if (kind_ == Kind::power_law)
            return "power-law sigma=" + std::to_string(sigma_) + " q=" + std::to_string(q_);
        return "table with " + std::to_string(table_.size()) + " entries, support |k|max=" +
               std::to_string(table_support());
    }

private:
    static std::pair<int, int> canonical(int k1, int k2) {
        return TorusGrid::in_half_lattice(k1, k2) ? std::make_pair(k1, k2)
                                                  : std::make_pair(-k1, -k2);
    }

    Kind kind_ = Kind::power_law;
    double sigma_ = 0.0;
    double q_ = 0.0;
    std::map<std::pair<int, int>, double> table_;
};

/// Outcome of the trace-class admissibility check.
struct E1Report {
    double s = 0.0;
    double alpha = 0.0;
    double sigma0 = 0.0;
    double eps0 = 0.0;
    int truncation_radius = 0;
    double m_star = 0.0;
    double truncated_trace = 0.0;
    bool analytic_condition = false;
    enum class Verdict { admissible, inadmissible, inconclusive } verdict = Verdict::inconclusive;
    std::string spectrum;

    std::string verdict_name() const {
        switch (verdict) {
            case Verdict::admissible: return "admissible";
            case Verdict::inadmissible: return "inadmissible";
            default: return "inconclusive";
        }
    }
};

/// Checks the weighted-trace condition: with m* = (2s+2-2a+2s0) v (4+2e0),
/// the spectrum must satisfy sum_k |k|^{m*} g_k^2 < infinity. For power laws
/// this reduces to the 2D lattice comparison 2q - m* > 2; finite tables are
/// always admissible.
inline E1Report check_hypothesis_e1(const CovarianceSpectrum& spectrum, double s, double alpha,
                                    double sigma0, double eps0, int truncation_radius) {
    if (!(alpha > 0.5 && alpha < 1.0))
        throw std::invalid_argument("check_hypothesis_e1: alpha must lie in (1/2,1)");
    if (!(sigma0 > std::max(0.0, 1.0 - s)) || !(eps0 > 0.0))
        throw std::invalid_argument("check_hypothesis_e1: hypothesis parameters out of range");
    if (truncation_radius < 4)
        throw std::invalid_argument("check_hypothesis_e1: truncation radius must be >= 4");

    E1Report r;
    r.s = s;
    r.alpha = alpha;
    r.sigma0 = sigma0;
    r.eps0 = eps0;
    r.truncation_radius = truncation_radius;
    r.m_star = std::max(2.0 * s + 2.0 - 2.0 * alpha + 2.0 * sigma0, 4.0 + 2.0 * eps0);
    r.spectrum = spectrum.describe();

    const int K = truncation_radius;
    double trace = 0.0;
    for (int k2 = -K; k2 <= K; ++k2)
        for (int k1 = -K; k1 <= K; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            const double kk = static_cast<double>(k1 * k1 + k2 * k2);
            if (kk > static_cast<double>(K) * K) continue;
            const double g = spectrum.amp(k1, k2);
            trace += std::pow(kk, 0.5 * r.m_star) * g * g;
        }
    r.truncated_trace = trace;

    if (spectrum.kind() == CovarianceSpectrum::Kind::table || spectrum.sigma() == 0.0) {
        r.analytic_condition = true;  // finitely many nonzero modes
        r.verdict = E1Report::Verdict::admissible;
    } else {
        r.analytic_condition = 2.0 * spectrum.q() - r.m_star > 2.0;
        r.verdict = r.analytic_condition ? E1Report::Verdict::admissible
                                         : E1Report::Verdict::inadmissible;
    }
    return r;
}

/// Reproducible two-sided Wiener path. Every increment is a pure function of
/// (seed, mode, absolute bin), so extending the path into the past refines
/// nothing that was already drawn, and the Wiener shift is an integer
/// relabeling of bins. Sub-bin resolution comes from a dyadic Brownian
/// bridge, also counter-keyed.
class WienerRealization {
public:
    WienerRealization(std::uint64_t seed, double bin_width, CovarianceSpectrum spectrum,
                      double amplitude_scale = 1.0)
        : seed_(seed), bin_width_(bin_width), spectrum_(std::move(spectrum)),
          scale_(amplitude_scale) {
        if (!(bin_width > 0.0)) throw std::invalid_argument("WienerRealization: bin width must be > 0");
        if (amplitude_scale < 0.0)
            throw std::invalid_argument("WienerRealization: amplitude scale must be >= 0");
    }

    std::uint64_t seed() const { return seed_; }
    double bin_width() const { return bin_width_; }
    const CovarianceSpectrum& spectrum() const { return spectrum_; }
    double amplitude_scale() const { return scale_; }
    std::int64_t origin_offset_bins() const { return offset_bins_; }
    double origin_offset() const { return static_cast<double>(offset_bins_) * bin_width_; }

    /// Effective noise amplitude of mode k (spectrum times the epsilon scale).
    double amp(int k1, int k2) const { return scale_ * spectrum_.amp(k1, k2); }

    /// Converts a path-local time to an absolute bin index; the time must sit
    /// on the bin grid.
    std::int64_t bin_of(double t, const char* what = "time") const {
        const double q = t / bin_width_;
        const double r = std::nearbyint(q);
        if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q)))
            throw std::invalid_argument(std::string(what) +
                                        " must align with the Wiener bin grid (bin width " +
                                        std::to_string(bin_width_) + ", got " + std::to_string(t) + ")");
        return static_cast<std::int64_t>(r) + offset_bins_;
    }

    /// Wiener shift by r (an integer multiple of the bin width): the result
    /// reads bin j where the original read bin j + r/bin_width.
    WienerRealization shift(double r) const {
        const double q = r / bin_width_;
        const double rq = std::nearbyint(q);
        if (std::abs(q - rq) > 1e-9 * std::max(1.0, std::abs(q)))
            throw std::invalid_argument("shift must align with the bin grid (bin width " +
                                        std::to_string(bin_width_) + ", got " + std::to_string(r) + ")");
        WienerRealization out(*this);
        out.offset_bins_ += static_cast<std::int64_t>(rq);
        return out;
    }

    /// Increment of the two trigonometric components of mode k over one bin,
    /// each Gaussian(0, g_k^2 * bin_width).
    std::pair<double, double> increment(int k1, int k2, std::int64_t bin) const {
        if (k1 == 0 && k2 == 0)
            throw std::invalid_argument("noise has zero mean mode");
        const std::int64_t b = bin + offset_bins_;
        const double g = amp(k1, k2);
        const double sd = g * std::sqrt(bin_width_);
        return {sd * unit_bin_draw(k1, k2, 0, b), sd * unit_bin_draw(k1, k2, 1, b)};
    }

    /// All 2^level sub-increments of mode k's component over one absolute bin,
    /// consistent with the bin total (left+right sums telescope exactly).
    void fill_micro_increments(int k1, int k2, int comp, std::int64_t bin_abs, int level,
                               std::vector<double>& out) const {
        fill_micro_impl(amp(k1, k2), k1, k2, comp, bin_abs, level, out);
    }

    /// Scalar channel (multiplicative noise component j): unit amplitude.
    double scalar_increment(int j, std::int64_t bin) const {
        const std::int64_t b = bin + offset_bins_;
        return std::sqrt(bin_width_) * unit_bin_draw(j, scalar_mark, 0, b);
    }

    void fill_scalar_micro_increments(int j, std::int64_t bin_abs, int level,
                                      std::vector<double>& out) const {
        fill_micro_impl(1.0, j, scalar_mark, 0, bin_abs, level, out);
    }

    /// Value of scalar channel j at a path-local bin boundary, with W(0) = 0
    /// in this path's frame: left-associated sum of bin increments outward
    /// from the (possibly shifted) origin.
    double scalar_value_at_bin(int j, std::int64_t bin_local) const {
        const double sd = std::sqrt(bin_width_);
        double w = 0.0;
        if (bin_local >= 0)
            for (std::int64_t b = 0; b < bin_local; ++b)
                w += sd * unit_bin_draw(j, scalar_mark, 0, b + offset_bins_);
        else
            for (std::int64_t b = -1; b >= bin_local; --b)
                w -= sd * unit_bin_draw(j, scalar_mark, 0, b + offset_bins_);
        return w;
    }

    /// Keyed standard normal for the OU conditional remainder over the micro
    /// interval (bin_abs, level, pos).
    double ou_residual_draw(int k1, int k2, int comp, std::int64_t bin_abs, int level,
                            int pos) const {
        rng::Key key(seed_);
        key.absorb(static_cast<std::uint64_t>(rng::Stream::ou_residual))
            .absorb_i64(k1).absorb_i64(k2).absorb_i64(comp)
            .absorb_i64(bin_abs).absorb_i64(level).absorb_i64(pos);
        return rng::normal(key);
    }

    /// Keyed standard normal for the stationary anchor at an absolute bin.
    double anchor_draw(int k1, int k2, int comp, std::int64_t anchor_bin) const {
        rng::Key key(seed_);
        key.absorb(static_cast<std::uint64_t>(rng::Stream::ou_anchor))
            .absorb_i64(k1).absorb_i64(k2).absorb_i64(comp).absorb_i64(anchor_bin);
        return rng::normal(key);
    }

private:
    static constexpr int scalar_mark = 0x7fffffff;  // outside any retained lattice

    /// Standard-normal bin draw for (mode, component, absolute bin).
    double unit_bin_draw(int k1, int k2, int comp, std::int64_t bin_abs) const {
        rng::Key key(seed_);
        key.absorb(static_cast<std::uint64_t>(rng::Stream::bin_increment))
            .absorb_i64(k1).absorb_i64(k2).absorb_i64(comp).absorb_i64(bin_abs);
        return rng::normal(key);
    }

    double bridge_draw(int k1, int k2, int comp, std::int64_t bin_abs, int level, int pos) const {
        rng::Key key(seed_);
        key.absorb(static_cast<std::uint64_t>(rng::Stream::bridge))
            .absorb_i64(k1).absorb_i64(k2).absorb_i64(comp)
            .absorb_i64(bin_abs).absorb_i64(level).absorb_i64(pos);
        return rng::normal(key);
    }

    void fill_micro_impl(double g, int k1, int k2, int comp, std::int64_t bin_abs, int level,
                         std::vector<double>& out) const {
        const int m = 1 << level;
        out.assign(static_cast<std::size_t>(m), 0.0);
        out[0] = g * std::sqrt(bin_width_) * unit_bin_draw(k1, k2, comp, bin_abs);
        // Split intervals level by level; left half gets I/2 + N(0, g^2 h/4),
        // right half the remainder of the parent increment.
        double h = bin_width_;
        for (int l = 0; l < level; ++l) {
            const int blocks = 1 << l;
            const int stride = m / blocks;
            for (int blk = blocks - 1; blk >= 0; --blk) {
                const double total = out[static_cast<std::size_t>(blk) * stride];
                const double mid =
                    0.5 * total + g * 0.5 * std::sqrt(h) * bridge_draw(k1, k2, comp, bin_abs, l, blk);
                out[static_cast<std::size_t>(blk) * stride] = mid;
                out[static_cast<std::size_t>(blk) * stride + stride / 2] = total - mid;
            }
            h *= 0.5;
        }
    }

    std::uint64_t seed_;
    double bin_width_;
    CovarianceSpectrum spectrum_;
    double scale_;
    std::int64_t offset_bins_ = 0;
};

}  // namespace qglab
