#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qglab/dynamics.hpp"
#include "qglab/parallel.hpp"

namespace qglab {

// ---------------------------------------------------------------------------
// Initial-data sampling

/// Deterministic low-mode fields plus seeded smooth random fields, scaled to
/// a prescribed H^s norm. Index 0,1 are the fixed trigonometric members.
inline SpectralField initial_datum(const TorusGrid& grid, std::uint64_t seed, int index,
                                   double norm_order, double target_norm) {
    SpectralField f(grid);
    if (index == 0) {
        f.set_coeff(1, 0, Complex{0.0, -0.5});
        f.set_coeff(0, 1, Complex{0.5, 0.0});
    } else if (index == 1) {
        f.set_coeff(1, 1, Complex{0.35, -0.35});
        f.set_coeff(2, -1, Complex{0.0, 0.25});
    } else {
        f = random_smooth_field(grid, seed, 0x1D5 + static_cast<std::uint64_t>(index), 3.0);
    }
    const double norm = sobolev_norm(f, norm_order);
    if (norm == 0.0) throw std::logic_error("initial_datum: degenerate sample");
    f *= target_norm / norm;
    return f;
}

// ---------------------------------------------------------------------------
// Pullback convergence

struct PullbackExperiment {
    FlowConfig cfg;
    std::uint64_t seed = 1;
    std::vector<SpectralField> theta0;
    std::vector<double> t0_schedule;  // strictly decreasing
    double eval_time = 0.0;
    double norm_order = 1.0;
    double tolerance = 1e-6;
};

struct PullbackReport {
    std::vector<double> t0;
    std::vector<std::vector<double>> state_norm;       // [depth][datum]
    std::vector<std::vector<double>> successive_diff;  // [depth-1][datum]
    std::vector<double> spread;                        // per depth
    std::vector<double> max_diff;                      // per depth-1, over data
    bool degenerate = false;
    bool cauchy = false;
    double final_diff = 0.0;
    double final_spread = 0.0;
};

inline PullbackReport run_pullback(const PullbackExperiment& exp) {
    if (exp.theta0.empty()) throw std::invalid_argument("run_pullback: no initial data");
    for (std::size_t i = 1; i < exp.t0_schedule.size(); ++i)
        if (!(exp.t0_schedule[i] < exp.t0_schedule[i - 1]))
            throw std::invalid_argument("run_pullback: t0 schedule must be strictly decreasing");

    const int depths = static_cast<int>(exp.t0_schedule.size());
    const int data = static_cast<int>(exp.theta0.size());
    std::vector<SpectralField> states(static_cast<std::size_t>(depths) * data,
                                      SpectralField(exp.cfg.grid));
    const WienerRealization path = exp.cfg.make_path(exp.seed);

    parallel_for(depths * data, [&](int idx) {
        const int i = idx / data;
        const int j = idx % data;
        try {
            states[static_cast<std::size_t>(idx)] =
                flow(exp.cfg, path, exp.t0_schedule[static_cast<std::size_t>(i)], exp.eval_time,
                     exp.theta0[static_cast<std::size_t>(j)]);
        } catch (const FlowBlowUp& e) {
            throw FlowBlowUp(e.time, "pullback run from t0 = " +
                                         std::to_string(exp.t0_schedule[static_cast<std::size_t>(i)]) +
                                         " failed: " + e.what());
        }
    });

    PullbackReport rep;
    rep.t0 = exp.t0_schedule;
    rep.state_norm.resize(static_cast<std::size_t>(depths));
    rep.spread.resize(static_cast<std::size_t>(depths));
    for (int i = 0; i < depths; ++i) {
        rep.state_norm[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(data));
        double spread = 0.0;
        for (int j = 0; j < data; ++j) {
            const SpectralField& x = states[static_cast<std::size_t>(i * data + j)];
            rep.state_norm[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                sobolev_norm(x, exp.norm_order);
            for (int j2 = 0; j2 < j; ++j2)
                spread = std::max(
                    spread, sobolev_norm(x - states[static_cast<std::size_t>(i * data + j2)],
                                         exp.norm_order));
        }
        rep.spread[static_cast<std::size_t>(i)] = spread;
    }
    if (depths < 2) {
        rep.degenerate = true;
        return rep;
    }
    rep.successive_diff.resize(static_cast<std::size_t>(depths - 1));
    rep.max_diff.resize(static_cast<std::size_t>(depths - 1));
    for (int i = 0; i + 1 < depths; ++i) {
        rep.successive_diff[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(data));
        double mx = 0.0;
        for (int j = 0; j < data; ++j) {
            const double d = sobolev_norm(states[static_cast<std::size_t>((i + 1) * data + j)] -
                                              states[static_cast<std::size_t>(i * data + j)],
                                          exp.norm_order);
            rep.successive_diff[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d;
            mx = std::max(mx, d);
        }
        rep.max_diff[static_cast<std::size_t>(i)] = mx;
    }
    rep.final_diff = rep.max_diff.back();
    rep.final_spread = rep.spread.back();

    // Cauchy verdict: differences nonincreasing (5% slack) from some index on,
    // with the last difference and spread below tolerance.
    int monotone_from = depths - 1;
    for (int i = depths - 2; i >= 1; --i) {
        if (rep.max_diff[static_cast<std::size_t>(i)] <=
            rep.max_diff[static_cast<std::size_t>(i - 1)] * 1.05)
            monotone_from = i - 1;
        else
            break;
    }
    rep.cauchy = monotone_from < depths - 1 && rep.final_diff < exp.tolerance &&
                 rep.final_spread < exp.tolerance;
    return rep;
}

// ---------------------------------------------------------------------------
// Synchronization

/// Critical-coupling diagnostics: p = (alpha+1)/(alpha-1/2) and the explicit
/// coupling margin delta0.
inline std::pair<double, double> sync_threshold(double alpha, double kappa, double lambda1,
                                                double E0, double C_S, double C_R) {
    if (!(alpha > 0.5 && alpha < 1.0))
        throw std::invalid_argument("sync_threshold: supercritical: p undefined");
    if (!(kappa > 0.0 && lambda1 > 0.0 && C_S > 0.0 && C_R > 0.0) || E0 < 0.0)
        throw std::invalid_argument("sync_threshold: constants must be positive (E0 >= 0)");
    const double p = (alpha + 1.0) / (alpha - 0.5);
    const double delta0 = kappa - std::pow(2.0, 0.5 * p) * std::pow(C_R, p) *
                                      std::pow(C_S, 2.0 * p) * std::pow(kappa, 1.0 - p) *
                                      std::pow(p * (p - 1.0), 0.5 * p) *
                                      std::pow(lambda1, -0.5 * p) * std::pow(E0, 0.5 * p);
    return {p, delta0};
}

struct SyncExperiment {
    FlowConfig cfg;
    std::uint64_t seed = 1;
    SpectralField theta0;
    SpectralField theta0_tilde;
    double start_time = 0.0;
    double horizon = 10.0;
    int stride = 10;  // steps between samples

    explicit SyncExperiment(const FlowConfig& c)
        : cfg(c), theta0(c.grid), theta0_tilde(c.grid) {}
};

struct SyncRow {
    double t;
    double dist_sq_hneg;  // |Lambda^{-1/2}(theta - theta~)|^2
    double dist_h1;       // |Lambda(theta - theta~)|
};

struct SyncReport {
    std::vector<SyncRow> rows;
    double fitted_rate = 0.0;     // positive = contraction, from the tail half
    double terminal_ratio = 0.0;  // d(horizon)/d(0)
    bool synchronizing = false;
};

inline SyncReport run_sync(const SyncExperiment& exp) {
    Stepper a(exp.cfg, exp.cfg.make_path(exp.seed), exp.start_time, exp.theta0);
    Stepper b(exp.cfg, exp.cfg.make_path(exp.seed), exp.start_time, exp.theta0_tilde);
    SyncReport rep;

    auto sample = [&]() {
        // theta - theta~ equals v - v~ (additive) or beta^{-1}(v - v~)
        // (multiplicative, beta shared); the transform offset cancels.
        SpectralField diff = a.v() - b.v();
        double scale = 1.0;
        if (exp.cfg.noise == NoiseMode::multiplicative)
            scale = a.v_start_scale() / a.beta_rel();
        const double hneg = scale * sobolev_norm(diff, -0.5);
        rep.rows.push_back({a.time(), hneg * hneg, scale * sobolev_norm(diff, 1.0)});
    };

    sample();
    const auto steps = static_cast<std::int64_t>(std::llround(exp.horizon / exp.cfg.dt));
    for (std::int64_t i = 1; i <= steps; ++i) {
        a.step();
        b.step();
        if (i % exp.stride == 0 || i == steps) sample();
    }

    const double d0 = rep.rows.front().dist_sq_hneg;
    const double dend = rep.rows.back().dist_sq_hneg;
    rep.terminal_ratio = d0 > 0.0 ? dend / d0 : 0.0;

    // Least-squares slope of log d^2 over the tail half.
    std::size_t lo = rep.rows.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (std::size_t i = lo; i < rep.rows.size(); ++i) {
        if (rep.rows[i].dist_sq_hneg <= 0.0) continue;
        const double x = rep.rows[i].t;
        const double y = std::log(rep.rows[i].dist_sq_hneg);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++count;
    }
    if (count >= 2) {
        const double denom = count * sxx - sx * sx;
        rep.fitted_rate = denom != 0.0 ? -(count * sxy - sx * sy) / denom : 0.0;
    } else {
        rep.fitted_rate = 0.0;
    }
    rep.synchronizing = d0 == 0.0 || (rep.fitted_rate > 0.0 && rep.terminal_ratio < 1e-3);
    return rep;
}

// ---------------------------------------------------------------------------
// Absorption

struct AbsorptionExperiment {
    FlowConfig cfg;
    std::uint64_t seed = 1;
    double rho = 1.0;             // initial H^s ball radius
    std::vector<double> t0_schedule;
    double norm_order = 1.0;      // s
    double compact_delta = 0.25;  // extra smoothness recorded at time 0
    int samples = 3;              // initial data per t0
    double stability_tol = 0.10;
};

struct AbsorptionSample {
    double t0;
    double norm_at_minus_one_sq;   // |L^s v(-1)|^2, max over data
    double sup_sq;                 // sup_{[-1,0]} |L^s v|^2, max over data
    double dissipation_integral;   // int_{-1}^0 |L^{s+a} v|^2, max over data
    double compact_norm_sq;        // |L^{s+delta} theta(0)|^2, max over data
};

struct AbsorptionReport {
    std::vector<AbsorptionSample> per_t0;
    double variation_norm = 0.0;  // relative variation across the 3 deepest t0
    double variation_sup = 0.0;
    double variation_int = 0.0;
    bool absorbing = false;
};

inline AbsorptionReport run_absorption(const AbsorptionExperiment& exp) {
    if (exp.t0_schedule.size() < 3)
        throw std::invalid_argument("run_absorption: need at least three pullback depths");
    const int depths = static_cast<int>(exp.t0_schedule.size());
    const int data = exp.samples;
    const WienerRealization path = exp.cfg.make_path(exp.seed);

    struct Cell {
        double at_minus1 = 0.0, sup = 0.0, integral = 0.0, compact = 0.0;
    };
    std::vector<Cell> cells(static_cast<std::size_t>(depths) * data);

    parallel_for(depths * data, [&](int idx) {
        const int i = idx / data;
        const int j = idx % data;
        const double t0 = exp.t0_schedule[static_cast<std::size_t>(i)];
        SpectralField theta0 =
            initial_datum(exp.cfg.grid, exp.seed, j, exp.norm_order, exp.rho);
        Stepper st(exp.cfg, path, t0, theta0);
        const double vscale = st.v_start_scale();
        st.run_until(-1.0);
        Cell c;
        const double n1 = vscale * sobolev_norm(st.v(), exp.norm_order);
        c.at_minus1 = n1 * n1;
        c.sup = c.at_minus1;
        double prev_diss = std::pow(vscale * sobolev_norm(st.v(), exp.norm_order + exp.cfg.alpha), 2);
        const auto steps = static_cast<std::int64_t>(std::llround(1.0 / exp.cfg.dt));
        for (std::int64_t k = 0; k < steps; ++k) {
            st.step();
            const double ns = std::pow(vscale * sobolev_norm(st.v(), exp.norm_order), 2);
            c.sup = std::max(c.sup, ns);
            const double diss =
                std::pow(vscale * sobolev_norm(st.v(), exp.norm_order + exp.cfg.alpha), 2);
            c.integral += 0.5 * (prev_diss + diss) * exp.cfg.dt;
            prev_diss = diss;
        }
        c.compact = std::pow(sobolev_norm(st.theta(), exp.norm_order + exp.compact_delta), 2);
        cells[static_cast<std::size_t>(idx)] = c;
    });

    AbsorptionReport rep;
    for (int i = 0; i < depths; ++i) {
        AbsorptionSample s;
        s.t0 = exp.t0_schedule[static_cast<std::size_t>(i)];
        s.norm_at_minus_one_sq = 0.0;
        s.sup_sq = 0.0;
        s.dissipation_integral = 0.0;
        s.compact_norm_sq = 0.0;
        for (int j = 0; j < data; ++j) {
            const Cell& c = cells[static_cast<std::size_t>(i * data + j)];
            s.norm_at_minus_one_sq = std::max(s.norm_at_minus_one_sq, c.at_minus1);
            s.sup_sq = std::max(s.sup_sq, c.sup);
            s.dissipation_integral = std::max(s.dissipation_integral, c.integral);
            s.compact_norm_sq = std::max(s.compact_norm_sq, c.compact);
        }
        rep.per_t0.push_back(s);
    }

    auto variation = [&](auto get) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int i = depths - 3; i < depths; ++i) {
            const double v = get(rep.per_t0[static_cast<std::size_t>(i)]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return hi > 0.0 ? (hi - lo) / hi : 0.0;
    };
    rep.variation_norm = variation([](const AbsorptionSample& s) { return s.norm_at_minus_one_sq; });
    rep.variation_sup = variation([](const AbsorptionSample& s) { return s.sup_sq; });
    rep.variation_int = variation([](const AbsorptionSample& s) { return s.dissipation_integral; });
    rep.absorbing = rep.variation_norm < exp.stability_tol &&
                    rep.variation_sup < exp.stability_tol &&
                    rep.variation_int < exp.stability_tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Lp decay

struct LpDecayRow {
    double t;
    double norm;
    double bound;
};

struct EnergyRow {
    double t;            // left endpoint of the unit window
    double lhs;          // |v(t+1)|^2 + kappa int_t^{t+1} |L^a v|^2
    double bound;        // |v(t0)|^2 exp(-2 lam1 (t - t0))
};

struct LpDecayReport {
    double p = 2.0;
    bool hard_verdict = false;      // multiplicative / zero-noise modes only
    bool bound_holds = true;
    double first_violation = std::numeric_limits<double>::quiet_NaN();
    double max_ratio = 0.0;         // max over strides of norm/bound
    std::vector<LpDecayRow> rows;
    std::vector<EnergyRow> energy_rows;  // p = 2 only
    bool energy_holds = true;
};

/// Checks ||v(t)||_p <= ||v(t0)||_p exp(-2 lam1 (t-t0)/p) (1+tol) along one
/// trajectory; for p = 2 also the discrete unit-window energy inequality.
/// Additive runs are report-only (the exact envelope involves path-dependent
/// z integrals), so hard_verdict is false there.
inline std::vector<LpDecayReport> run_lp_decay_multi(const FlowConfig& cfg,
                                                     const std::vector<double>& ps,
                                                     const SpectralField& theta0, double t0,
                                                     double horizon, std::uint64_t seed,
                                                     int stride = 10, double tol = 0.02) {
    const WienerRealization path = cfg.make_path(seed);
    Stepper st(cfg, path, t0, theta0);
    const double vscale = st.v_start_scale();
    const bool hard = cfg.noise != NoiseMode::additive;
    const double lam1 = cfg.lambda1();

    std::vector<LpDecayReport> reports;
    std::vector<double> norm0(ps.size());
    for (std::size_t ip = 0; ip < ps.size(); ++ip) {
        LpDecayReport r;
        r.p = ps[ip];
        r.hard_verdict = hard;
        reports.push_back(r);
        norm0[ip] = vscale * lp_norm(st.v(), ps[ip]);
        reports[ip].rows.push_back({t0, norm0[ip], norm0[ip] * (1.0 + tol)});
    }

    const bool track_energy =
        std::find(ps.begin(), ps.end(), 2.0) != ps.end() && horizon >= 1.0;
    const double e0 = std::pow(vscale * sobolev_norm(st.v(), 0.0), 2);
    double window_integral = 0.0;
    double prev_diss = std::pow(vscale * sobolev_norm(st.v(), cfg.alpha), 2);
    const auto steps_per_unit = static_cast<std::int64_t>(std::llround(1.0 / cfg.dt));

    const auto steps = static_cast<std::int64_t>(std::llround(horizon / cfg.dt));
    std::vector<double> integral_at_unit;
    for (std::int64_t i = 1; i <= steps; ++i) {
        st.step();
        const double t = st.time();
        if (track_energy) {
            const double diss = std::pow(vscale * sobolev_norm(st.v(), cfg.alpha), 2);
            window_integral += 0.5 * (prev_diss + diss) * cfg.dt;
            prev_diss = diss;
            if (i % steps_per_unit == 0) integral_at_unit.push_back(window_integral);
        }
        if (i % stride == 0 || i == steps) {
            for (std::size_t ip = 0; ip < ps.size(); ++ip) {
                const double norm = vscale * lp_norm(st.v(), ps[ip]);
                const double bound =
                    norm0[ip] * std::exp(-2.0 * lam1 * (t - t0) / ps[ip]) * (1.0 + tol);
                reports[ip].rows.push_back({t, norm, bound});
                if (norm0[ip] > 0.0) {
                    const double envelope = norm0[ip] * std::exp(-2.0 * lam1 * (t - t0) / ps[ip]);
                    reports[ip].max_ratio =
                        std::max(reports[ip].max_ratio, envelope > 0.0 ? norm / envelope : 0.0);
                }
                if (norm > bound && reports[ip].bound_holds) {
                    reports[ip].bound_holds = false;
                    reports[ip].first_violation = t;
                }
            }
        }
    }

    if (track_energy) {
        // Recompute windows from the recorded integrals: I(j) = int_{t0}^{t0+j}
        const std::size_t ip2 =
            static_cast<std::size_t>(std::find(ps.begin(), ps.end(), 2.0) - ps.begin());
        auto& r2 = reports[ip2];
        // Unit windows [t0+m, t0+m+1]; |v| at the right edge comes from the
        // sampled rows (stride divides the unit-step count in our configs).
        for (std::size_t m = 0; m < integral_at_unit.size(); ++m) {
            const double t_left = t0 + static_cast<double>(m);
            const double i_window =
                m == 0 ? integral_at_unit[0] : integral_at_unit[m] - integral_at_unit[m - 1];
            double v_sq = -1.0;
            for (const auto& row : r2.rows)
                if (std::abs(row.t - (t_left + 1.0)) < 0.5 * cfg.dt) {
                    v_sq = row.norm * row.norm;
                    break;
                }
            if (v_sq < 0.0) continue;
            const double lhs = v_sq + cfg.kappa * i_window;
            const double bound = e0 * std::exp(-2.0 * lam1 * (t_left - t0)) * (1.0 + tol);
            r2.energy_rows.push_back({t_left, lhs, bound});
            if (lhs > bound) r2.energy_holds = false;
        }
    }
    return reports;
}

inline LpDecayReport run_lp_decay(const FlowConfig& cfg, double p, const SpectralField& theta0,
                                  double t0, double horizon, std::uint64_t seed, int stride = 10,
                                  double tol = 0.02) {
    return run_lp_decay_multi(cfg, {p}, theta0, t0, horizon, seed, stride, tol)[0];
}

// ---------------------------------------------------------------------------
// Positivity functional

struct PositivityResult {
    double value = 0.0;
    bool resolution_warning = false;
};

/// Evaluates int |theta|^{p-2} theta (kappa L^{2a} theta - (2 lam1/p) theta)
/// by grid quadrature, with the fractional power applied spectrally.
inline PositivityResult check_positivity(const SpectralField& theta, double kappa, double alpha,
                                         double p) {
    if (!(p > 2.0)) throw std::invalid_argument("check_positivity: p must exceed 2");
    PositivityResult res;
    res.resolution_warning = high_shell_energy_fraction(theta) > 1e-6;

    const Transform& tr = Transform::of(theta.grid().n());
    std::vector<double> th, lth;
    tr.to_physical(theta, th);
    tr.to_physical(fractional_power(theta, 2.0 * alpha), lth);
    const double lam1 = kappa;
    const double cell = std::pow(two_pi / theta.grid().n(), 2);
    double acc = 0.0;
    for (std::size_t i = 0; i < th.size(); ++i) {
        const double w = std::pow(std::abs(th[i]), p - 2.0) * th[i];
        acc += w * (kappa * lth[i] - (2.0 * lam1 / p) * th[i]);
    }
    res.value = acc * cell;
    return res;
}

// ---------------------------------------------------------------------------
// Semicontinuity sweep

struct SemicontinuitySweep {
    FlowConfig cfg;  // additive; eps is overwritten by the schedule
    std::uint64_t seed = 1;
    std::vector<SpectralField> theta0;
    std::vector<double> eps_schedule;  // strictly decreasing, >= 0
    double pullback_depth = 2.0;       // runs over [-depth, 0]
    double norm_order = 1.0;
    double slack = 0.05;
    double shrink_target = 0.1;
};

struct SemicontinuityReport {
    std::vector<double> eps;
    std::vector<double> distance;       // D(eps) = max over data
    std::vector<double> halving_ratio;  // D(eps_{i+1})/D(eps_i) where eps exactly halves
    bool nonincreasing = false;
    double shrink_ratio = 0.0;          // D(min)/D(max)
    bool semicontinuous = false;
};

inline SemicontinuityReport run_semicontinuity(const SemicontinuitySweep& exp) {
    for (std::size_t i = 1; i < exp.eps_schedule.size(); ++i)
        if (!(exp.eps_schedule[i] < exp.eps_schedule[i - 1]) || exp.eps_schedule[i] < 0.0)
            throw std::invalid_argument(
                "run_semicontinuity: eps schedule must be strictly decreasing and >= 0");
    if (exp.cfg.noise != NoiseMode::additive)
        throw std::invalid_argument("run_semicontinuity: additive noise mode required");

    const int data = static_cast<int>(exp.theta0.size());
    const int neps = static_cast<int>(exp.eps_schedule.size());

    // Deterministic reference: the same flow with the noise amplitude at zero.
    std::vector<SpectralField> reference(static_cast<std::size_t>(data),
                                         SpectralField(exp.cfg.grid));
    FlowConfig det = exp.cfg;
    det.eps = 0.0;
    parallel_for(data, [&](int j) {
        reference[static_cast<std::size_t>(j)] =
            flow(det, det.make_path(exp.seed), -exp.pullback_depth, 0.0,
                 exp.theta0[static_cast<std::size_t>(j)]);
    });

    SemicontinuityReport rep;
    rep.eps = exp.eps_schedule;
    rep.distance.assign(static_cast<std::size_t>(neps), 0.0);
    std::vector<double> dists(static_cast<std::size_t>(neps) * data, 0.0);
    parallel_for(neps * data, [&](int idx) {
        const int i = idx / data;
        const int j = idx % data;
        FlowConfig cfg = exp.cfg;
        cfg.eps = exp.eps_schedule[static_cast<std::size_t>(i)];
        SpectralField endstate = flow(cfg, cfg.make_path(exp.seed), -exp.pullback_depth, 0.0,
                                      exp.theta0[static_cast<std::size_t>(j)]);
        dists[static_cast<std::size_t>(idx)] =
            sobolev_norm(endstate - reference[static_cast<std::size_t>(j)], exp.norm_order);
    });
    for (int i = 0; i < neps; ++i)
        for (int j = 0; j < data; ++j)
            rep.distance[static_cast<std::size_t>(i)] =
                std::max(rep.distance[static_cast<std::size_t>(i)],
                         dists[static_cast<std::size_t>(i * data + j)]);

    rep.nonincreasing = true;
    for (int i = 1; i < neps; ++i) {
        if (rep.distance[static_cast<std::size_t>(i)] >
            rep.distance[static_cast<std::size_t>(i - 1)] * (1.0 + exp.slack))
            rep.nonincreasing = false;
        const double ratio_eps =
            exp.eps_schedule[static_cast<std::size_t>(i)] /
            exp.eps_schedule[static_cast<std::size_t>(i - 1)];
        if (std::abs(ratio_eps - 0.5) < 1e-12 &&
            rep.distance[static_cast<std::size_t>(i - 1)] > 0.0)
            rep.halving_ratio.push_back(rep.distance[static_cast<std::size_t>(i)] /
                                        rep.distance[static_cast<std::size_t>(i - 1)]);
    }
    const double dmax = rep.distance.front();
    rep.shrink_ratio = dmax > 0.0 ? rep.distance.back() / dmax : 0.0;
    rep.semicontinuous = rep.nonincreasing && rep.shrink_ratio < exp.shrink_target;
    return rep;
}

}  // namespace qglab
