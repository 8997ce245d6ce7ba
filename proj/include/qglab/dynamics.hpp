#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qglab/ou.hpp"
#include "qglab/spectral_ops.hpp"

namespace qglab {

enum class Integrator { imex_cnab, etd1, etd2 };

inline const char* integrator_name(Integrator i) {
    switch (i) {
        case Integrator::imex_cnab: return "imex-cnab";
        case Integrator::etd1: return "etd1";
        default: return "etd2";
    }
}

enum class NoiseMode { none, additive, multiplicative };

inline const char* noise_mode_name(NoiseMode m) {
    switch (m) {
        case NoiseMode::none: return "none";
        case NoiseMode::additive: return "additive";
        default: return "multiplicative";
    }
}

/// Everything that defines the stochastic flow S(t,r;omega): dissipation
/// exponent and strength, grid, step, integrator, and the noise description.
struct FlowConfig {
    double alpha = 0.75;
    double kappa = 1.0;
    TorusGrid grid{64};
    double dt = 1e-3;
    Integrator integrator = Integrator::imex_cnab;

    NoiseMode noise = NoiseMode::none;
    double gamma = 10.0;                      // OU damping (additive mode)
    CovarianceSpectrum spectrum = CovarianceSpectrum::zero();
    double eps = 1.0;                         // amplitude scale on the spectrum
    std::vector<double> b;                    // multiplicative coefficients
    double bin_width = 4e-3;
    bool nonlinearity = true;                 // advection on/off (linear-only tests)

    double lambda1() const { return kappa; }  // smallest retained |k|^2 is 1

    OUParams ou() const {
        OUParams p;
        p.gamma = gamma;
        p.kappa = kappa;
        p.alpha = alpha;
        return p;
    }

    WienerRealization make_path(std::uint64_t seed) const {
        return WienerRealization(seed, bin_width, spectrum, eps);
    }

    void validate() const {
        if (!(kappa > 0.0)) throw std::invalid_argument("FlowConfig: kappa must be > 0");
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("FlowConfig: alpha must lie in (0,1)");
        if (!(dt > 0.0)) throw std::invalid_argument("FlowConfig: dt must be > 0");
        if (gamma < 0.0) throw std::invalid_argument("FlowConfig: gamma must be >= 0");
        if (eps < 0.0) throw std::invalid_argument("FlowConfig: eps must be >= 0");
        if (noise == NoiseMode::multiplicative && b.empty())
            throw std::invalid_argument("FlowConfig: multiplicative mode needs b coefficients");
        const double q = bin_width / dt;
        const int level = static_cast<int>(std::lround(std::log2(q)));
        if (level < 0 || level > 24 || std::abs(q - std::ldexp(1.0, level)) > 1e-9 * std::max(1.0, q))
            throw std::invalid_argument(
                "FlowConfig: dt must divide the Wiener bin width with a power-of-two quotient "
                "(bin width " + std::to_string(bin_width) + ", dt " + std::to_string(dt) + ")");
    }
};

/// Thrown when a coefficient leaves the representable range; carries the
/// simulation time of the offending step.
class FlowBlowUp : public std::runtime_error {
public:
    FlowBlowUp(double t, const std::string& what)
        : std::runtime_error("blow-up detected at t = " + std::to_string(t) + ": " + what),
          time(t) {}
    double time;
};

/// Pathwise integrator of the transformed equations. Additive mode evolves
/// v = theta - z with the exact per-mode OU update for z; multiplicative mode
/// evolves v = beta theta / beta(start) so the initial transform is exact.
/// The linear symbol is treated by Crank-Nicolson (imex-cnab) or exactly
/// (etd1/etd2); the advection, the gamma z source, and the beta^{-1} scaling
/// are explicit.
class Stepper {
public:
    Stepper(const FlowConfig& cfg, const WienerRealization& path, double start_time,
            const SpectralField& theta0)
        : cfg_(cfg), path_(path), v_(cfg.grid), f_prev_(cfg.grid), scratch_(cfg.grid) {
        cfg.validate();
        if (theta0.grid() != cfg.grid) throw std::invalid_argument("Stepper: grid mismatch");
        const double q = cfg.bin_width / cfg.dt;
        level_ = static_cast<int>(std::lround(std::log2(q)));
        steps_per_bin_ = 1 << level_;
        start_time_ = start_time;
        steps_ = 0;

        const TorusGrid& g = cfg.grid;
        const int K = g.max_mode();
        lin_decay_.assign(g.lattice_size(), 0.0);
        lin_phi1dt_.assign(g.lattice_size(), 0.0);
        lin_phi2dt_.assign(g.lattice_size(), 0.0);
        cn_num_.assign(g.lattice_size(), 0.0);
        cn_inv_.assign(g.lattice_size(), 0.0);
        for (int k2 = -K; k2 <= K; ++k2)
            for (int k1 = -K; k1 <= K; ++k1) {
                const int idx = g.index_of(k1, k2);
                if (k1 == 0 && k2 == 0) continue;
                const double lam = cfg.kappa * std::pow(static_cast<double>(k1 * k1 + k2 * k2), cfg.alpha);
                const double x = lam * cfg.dt;
                const double E = std::exp(-x);
                lin_decay_[idx] = E;
                lin_phi1dt_[idx] = (1.0 - E) / lam;
                lin_phi2dt_[idx] = (E - 1.0 + x) / (lam * x);
                cn_num_[idx] = 1.0 - 0.5 * x;
                cn_inv_[idx] = 1.0 / (1.0 + 0.5 * x);
            }

        if (cfg.noise == NoiseMode::additive) {
            ou_.emplace(cfg.ou(), cfg.grid, path, cfg.dt);
            ou_->init_at(start_time);
            v_ = theta0 - ou_->z();
        } else if (cfg.noise == NoiseMode::multiplicative) {
            v_ = theta0;
            w_accum_.assign(cfg.b.size(), 0.0);
            scalar_cache_.assign(cfg.b.size(), {});
            start_bin_ = path.bin_of(start_time, "flow start time");
            scalar_bin_ = start_bin_;
            scalar_sub_ = 0;
        } else {
            v_ = theta0;
        }
    }

    double time() const { return start_time_ + static_cast<double>(steps_) * cfg_.dt; }
    const SpectralField& v() const { return v_; }

    /// exp(-sum b_j (W_j(t) - W_j(start))); identically 1 outside
    /// multiplicative mode.
    double beta_rel() const {
        if (cfg_.noise != NoiseMode::multiplicative) return 1.0;
        double s = 0.0;
        for (std::size_t j = 0; j < cfg_.b.size(); ++j) s += cfg_.b[j] * w_accum_[j];
        return std::exp(-s);
    }

    /// Scalar Wiener values accumulated since the start of the run.
    const std::vector<double>& scalar_w() const { return w_accum_; }

    SpectralField theta() const {
        if (cfg_.noise == NoiseMode::additive) return v_ + ou_->z();
        if (cfg_.noise == NoiseMode::multiplicative) {
            SpectralField out = v_;
            out *= 1.0 / beta_rel();
            return out;
        }
        return v_;
    }

    const SpectralField& z() const {
        if (!ou_) throw std::logic_error("Stepper: no OU state outside additive mode");
        return ou_->z();
    }

    /// exp(-sum b_j W_j(start)): converts the run-relative v to the absolute
    /// transform v = beta theta. 1 outside multiplicative mode.
    double v_start_scale() const {
        if (cfg_.noise != NoiseMode::multiplicative) return 1.0;
        const std::int64_t local = start_bin_ - path_.origin_offset_bins();
        double s = 0.0;
        for (std::size_t j = 0; j < cfg_.b.size(); ++j)
            s += cfg_.b[j] * path_.scalar_value_at_bin(static_cast<int>(j), local);
        return std::exp(-s);
    }

    /// Largest observed dt * |u|_inf * K (CFL-style advisory; > 0.5 suggests
    /// the explicit advection step is under-resolved).
    double cfl_advisory() const { return cfl_max_; }

    void step() {
        SpectralField f(cfg_.grid);
        compute_forcing(f);
        switch (cfg_.integrator) {
            case Integrator::etd1: apply_etd1(f); break;
            case Integrator::etd2:
                if (steps_ == 0) apply_etd1(f);
                else apply_etd2(f);
                break;
            case Integrator::imex_cnab:
                if (steps_ == 0) apply_etd1(f);
                else apply_cnab(f);
                break;
        }
        f_prev_ = f;
        if (ou_) ou_->step();
        if (cfg_.noise == NoiseMode::multiplicative) advance_scalars();
        ++steps_;
        check_finite();
    }

    void run_until(double t_end) {
        const double q = (t_end - time()) / cfg_.dt;
        const double r = std::nearbyint(q);
        if (r < -0.5 || std::abs(q - r) > 1e-6)
            throw std::invalid_argument("Stepper: end time must sit on the dt grid");
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(r); ++i) step();
    }

private:
    void compute_forcing(SpectralField& f) {
        double linf = 0.0;
        if (cfg_.noise == NoiseMode::additive) {
            if (cfg_.nonlinearity) {
                scratch_ = v_ + ou_->z();
                f = advect(scratch_, scratch_, &linf);
                f *= -1.0;
            }
            const SpectralField& zf = ou_->z();
            for (int i = 0; i < f.size(); ++i) f.raw(i) += cfg_.gamma * zf.raw(i);
        } else if (cfg_.noise == NoiseMode::multiplicative) {
            if (cfg_.nonlinearity) {
                f = advect(v_, v_, &linf);
                f *= -1.0 / beta_rel();
            }
        } else if (cfg_.nonlinearity) {
            f = advect(v_, v_, &linf);
            f *= -1.0;
        }
        cfl_max_ = std::max(cfl_max_, cfg_.dt * linf * cfg_.grid.max_mode());
    }

    void apply_etd1(const SpectralField& f) {
        for (int i = 0; i < v_.size(); ++i)
            v_.raw(i) = lin_decay_[i] * v_.raw(i) + lin_phi1dt_[i] * f.raw(i);
    }

    void apply_etd2(const SpectralField& f) {
        for (int i = 0; i < v_.size(); ++i) {
            const Complex diff = f.raw(i) - f_prev_.raw(i);
            v_.raw(i) = lin_decay_[i] * v_.raw(i) + lin_phi1dt_[i] * f.raw(i) +
                        lin_phi2dt_[i] * diff;
        }
    }

    void apply_cnab(const SpectralField& f) {
        const double dt = cfg_.dt;
        for (int i = 0; i < v_.size(); ++i) {
            const Complex ab = 1.5 * f.raw(i) - 0.5 * f_prev_.raw(i);
            v_.raw(i) = cn_inv_[i] * (cn_num_[i] * v_.raw(i) + dt * ab);
        }
    }

    void advance_scalars() {
        for (std::size_t j = 0; j < cfg_.b.size(); ++j) {
            auto& cache = scalar_cache_[j];
            if (scalar_sub_ == 0 || cache.empty())
                path_.fill_scalar_micro_increments(static_cast<int>(j), scalar_bin_, level_, cache);
            w_accum_[j] += cache[static_cast<std::size_t>(scalar_sub_)];
        }
        if (++scalar_sub_ == steps_per_bin_) {
            scalar_sub_ = 0;
            ++scalar_bin_;
        }
    }

    void check_finite() {
        for (int i = 0; i < v_.size(); ++i) {
            const Complex c = v_.raw(i);
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()) ||
                std::abs(c.real()) > 1e100 || std::abs(c.imag()) > 1e100)
                throw FlowBlowUp(time(), "non-finite coefficient (dt too large?)");
        }
    }

    FlowConfig cfg_;
    WienerRealization path_;
    SpectralField v_;
    SpectralField f_prev_;
    SpectralField scratch_;
    std::vector<double> lin_decay_;
    std::vector<double> lin_phi1dt_;
    std::vector<double> lin_phi2dt_;
    std::vector<double> cn_num_;
    std::vector<double> cn_inv_;
    std::optional<OUEvolver> ou_;
    std::vector<double> w_accum_;
    std::vector<std::vector<double>> scalar_cache_;
    std::int64_t start_bin_ = 0;
    std::int64_t scalar_bin_ = 0;
    int scalar_sub_ = 0;
    int level_ = 0;
    int steps_per_bin_ = 1;
    double start_time_ = 0.0;
    std::int64_t steps_ = 0;
    double cfl_max_ = 0.0;
};

/// The stochastic flow: S(t,r;omega) theta0. Initialises the transform at r,
/// integrates to t, reconstructs theta. t == r returns theta0 unchanged (the
/// flow at zero elapsed time is the identity by definition).
inline SpectralField flow(const FlowConfig& cfg, const WienerRealization& path, double r,
                          double t, const SpectralField& theta0) {
    if (t < r) throw std::invalid_argument("flow: end time precedes start time");
    if (t == r) return theta0;
    Stepper st(cfg, path, r, theta0);
    st.run_until(t);
    return st.theta();
}

/// Explicit Euler-Maruyama discretisation of the untransformed equation,
/// using the same Wiener increments as the transformed run. Serves as an
/// independent cross-check, not as the primary integrator.
class EmOracle {
public:
    EmOracle(const FlowConfig& cfg, const WienerRealization& path, double start_time,
             const SpectralField& theta0)
        : cfg_(cfg), path_(path), theta_(theta0) {
        cfg.validate();
        const double q = cfg.bin_width / cfg.dt;
        level_ = static_cast<int>(std::lround(std::log2(q)));
        steps_per_bin_ = 1 << level_;
        bin_ = path.bin_of(start_time, "EM start time");
        sub_ = 0;
        start_time_ = start_time;
        const int K = cfg.grid.max_mode();
        lam_.assign(cfg.grid.lattice_size(), 0.0);
        for (int k2 = -K; k2 <= K; ++k2)
            for (int k1 = -K; k1 <= K; ++k1) {
                if (k1 == 0 && k2 == 0) continue;
                lam_[cfg.grid.index_of(k1, k2)] =
                    cfg.kappa * std::pow(static_cast<double>(k1 * k1 + k2 * k2), cfg.alpha);
            }
        if (cfg.noise == NoiseMode::multiplicative) {
            b2_half_ = 0.0;
            for (double bj : cfg.b) b2_half_ += 0.5 * bj * bj;
        }
    }

    /// Largest dt for which the explicit diffusion step is stable.
    double explicit_stability_limit() const {
        double lmax = 0.0;
        for (double l : lam_) lmax = std::max(lmax, l);
        return 2.0 / lmax;
    }

    double time() const { return start_time_ + static_cast<double>(steps_) * cfg_.dt; }
    const SpectralField& theta() const { return theta_; }

    void step() {
        const TorusGrid& g = cfg_.grid;
        SpectralField drift(g);
        if (cfg_.nonlinearity) {
            drift = advect(theta_, theta_);
            drift *= -1.0;
        }
        for (int i = 0; i < drift.size(); ++i) drift.raw(i) -= lam_[i] * theta_.raw(i);
        if (cfg_.noise == NoiseMode::multiplicative)
            for (int i = 0; i < drift.size(); ++i) drift.raw(i) += b2_half_ * theta_.raw(i);

        for (int i = 0; i < theta_.size(); ++i) theta_.raw(i) += cfg_.dt * drift.raw(i);

        if (cfg_.noise == NoiseMode::additive) {
            static const double inv = 1.0 / (2.0 * std::sqrt(2.0) * 3.14159265358979323846264338328);
            const int K = g.max_mode();
            std::vector<double> mc, ms;
            for (int k2 = -K; k2 <= K; ++k2)
                for (int k1 = -K; k1 <= K; ++k1) {
                    if (!TorusGrid::in_half_lattice(k1, k2)) continue;
                    if (path_.amp(k1, k2) == 0.0) continue;
                    path_.fill_micro_increments(k1, k2, 0, bin_, level_, mc);
                    path_.fill_micro_increments(k1, k2, 1, bin_, level_, ms);
                    const Complex dw{mc[static_cast<std::size_t>(sub_)] * inv,
                                     -ms[static_cast<std::size_t>(sub_)] * inv};
                    theta_.raw(g.index_of(k1, k2)) += dw;
                    theta_.raw(g.index_of(-k1, -k2)) += std::conj(dw);
                }
        } else if (cfg_.noise == NoiseMode::multiplicative) {
            double kick = 0.0;
            std::vector<double> mi;
            for (std::size_t j = 0; j < cfg_.b.size(); ++j) {
                path_.fill_scalar_micro_increments(static_cast<int>(j), bin_, level_, mi);
                kick += cfg_.b[j] * mi[static_cast<std::size_t>(sub_)];
            }
            for (int i = 0; i < theta_.size(); ++i) theta_.raw(i) -= kick * theta_.raw(i);
        }

        if (++sub_ == steps_per_bin_) {
            sub_ = 0;
            ++bin_;
        }
        ++steps_;
        for (int i = 0; i < theta_.size(); ++i) {
            const Complex c = theta_.raw(i);
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()) ||
                std::abs(c.real()) > 1e100 || std::abs(c.imag()) > 1e100)
                throw FlowBlowUp(time(), "EM oracle overflow (dt above stability limit?)");
        }
    }

    void run_until(double t_end) {
        const double q = (t_end - time()) / cfg_.dt;
        const double r = std::nearbyint(q);
        if (r < -0.5 || std::abs(q - r) > 1e-6)
            throw std::invalid_argument("EmOracle: end time must sit on the dt grid");
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(r); ++i) step();
    }

private:
    FlowConfig cfg_;
    WienerRealization path_;
    SpectralField theta_;
    std::vector<double> lam_;
    double b2_half_ = 0.0;
    int level_ = 0;
    int steps_per_bin_ = 1;
    std::int64_t bin_ = 0;
    int sub_ = 0;
    double start_time_ = 0.0;
    std::int64_t steps_ = 0;
};

}  // namespace qglab
