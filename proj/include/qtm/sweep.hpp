#pragma once

/// Sweep runners behind the CLI subcommands: parameter grids in, CSV datasets
/// out. Grid points run on a worker pool; records are written in grid order
/// regardless of completion order, so fixed configs and seeds give
/// byte-identical files (the timestamp header can be suppressed).

#include <algorithm>
#include <cmath>
#include <ctime>
#include <string>
#include <vector>

#include "cavity.hpp"
#include "concurrence.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "diamond.hpp"
#include "parallel.hpp"
#include "thermo.hpp"
#include "trajectories.hpp"

namespace qtm {

struct AxisSpec {
    double min = 0.0;
    double max = 1.0;
    long count = 2;
    bool log = false;
};

inline AxisSpec axis_from_config(const KeyValueConfig& cfg, const std::string& name,
                                 const AxisSpec& fallback) {
    AxisSpec ax;
    ax.min = cfg.get_double(name + ".min", fallback.min);
    ax.max = cfg.get_double(name + ".max", fallback.max);
    ax.count = cfg.get_long(name + ".count", fallback.count);
    const std::string spacing = cfg.get_string(name + ".spacing", fallback.log ? "log" : "linear");
    if (spacing == "log") ax.log = true;
    else if (spacing == "linear") ax.log = false;
    else throw ConfigError(cfg.source() + ": axis '" + name + "': spacing must be linear or log");
    if (ax.count < 2) throw ConfigError(cfg.source() + ": axis '" + name + "': count must be >= 2");
    if (ax.log && (ax.min <= 0.0 || ax.max <= 0.0))
        throw ConfigError(cfg.source() + ": axis '" + name + "': log spacing needs positive bounds");
    return ax;
}

inline std::vector<double> axis_values(const AxisSpec& ax) {
    std::vector<double> v(static_cast<std::size_t>(ax.count));
    for (long i = 0; i < ax.count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(ax.count - 1);
        v[static_cast<std::size_t>(i)] =
            ax.log ? ax.min * std::pow(ax.max / ax.min, t) : ax.min + (ax.max - ax.min) * t;
    }
    return v;
}

inline std::string error_code(const std::exception& e) {
    if (dynamic_cast<const DegenerateSteadyStateError*>(&e)) return "degenerate-steady-state";
    if (dynamic_cast<const SingularSystemError*>(&e)) return "singular-system";
    if (dynamic_cast<const NoConvergenceError*>(&e)) return "no-convergence";
    if (dynamic_cast<const NumericalPSDError*>(&e)) return "psd-violation";
    if (dynamic_cast<const HermiticityError*>(&e)) return "hermiticity";
    if (dynamic_cast<const DimensionError*>(&e)) return "dimension";
    if (dynamic_cast<const MapUndefinedError*>(&e)) return "map-undefined";
    return "error";
}

struct SweepResult {
    std::size_t total = 0;
    std::size_t failed = 0;
    std::vector<std::string> outputs; // files written
};

namespace detail {

inline std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct CommonOptions {
    std::string out;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    bool timestamp = true;
};

inline CommonOptions common_options(const KeyValueConfig& cfg, const std::string& default_out) {
    CommonOptions o;
    o.out = cfg.get_string("out", default_out);
    o.seed = static_cast<std::uint64_t>(cfg.get_long("seed", 1));
    o.workers = static_cast<unsigned>(cfg.get_long("workers", 0));
    if (o.workers == 0) o.workers = default_workers();
    o.timestamp = cfg.get_bool("timestamp", true);
    return o;
}

/// Evaluate one row per grid point in parallel. `coords(i)` never throws;
/// exceptions from `outputs(i)` turn into blank output cells plus an error
/// code, and rows keep their grid position either way.
template <typename Coords, typename Outputs>
std::size_t fill_rows(std::vector<std::vector<std::string>>& rows, unsigned workers,
                      std::size_t n_outputs, Coords&& coords, Outputs&& outputs) {
    std::atomic<std::size_t> failures{0};
    parallel_for(rows.size(), workers, [&](std::size_t i) {
        std::vector<std::string> row = coords(i);
        try {
            const std::vector<std::string> out = outputs(i);
            row.insert(row.end(), out.begin(), out.end());
            row.push_back(""); // error column
        } catch (const std::exception& e) {
            for (std::size_t k = 0; k < n_outputs; ++k) row.push_back("");
            row.push_back(error_code(e));
            failures.fetch_add(1);
        }
        rows[i] = std::move(row);
    });
    return failures.load();
}

} // namespace detail

/// Steady-state concurrence (both routes) and thermodynamics over a
/// (beta_A, beta_S) grid.
inline SweepResult run_effective_grid(const KeyValueConfig& cfg) {
    const auto opts = detail::common_options(cfg, "effective_grid.csv");
    const AxisSpec beta_a_ax = axis_from_config(cfg, "beta_a", {-5.0, 8.0, 101, false});
    const AxisSpec beta_s_ax = axis_from_config(cfg, "beta_s", {-5.0, 8.0, 101, false});
    const double gamma_plus = cfg.get_double("gamma_plus", 1.0);
    const double omega0 = cfg.get_double("omega0", 1.0);
    cfg.reject_unused();

    const auto betas_a = axis_values(beta_a_ax);
    const auto betas_s = axis_values(beta_s_ax);
    const std::size_t n = betas_a.size() * betas_s.size();
    std::vector<std::vector<std::string>> rows(n);

    const std::size_t failures = detail::fill_rows(
        rows, opts.workers, 7,
        [&](std::size_t i) -> std::vector<std::string> {
            return {format_double(betas_a[i / betas_s.size()]),
                    format_double(betas_s[i % betas_s.size()])};
        },
        [&](std::size_t i) -> std::vector<std::string> {
            const double ba = betas_a[i / betas_s.size()];
            const double bs = betas_s[i % betas_s.size()];
            const double analytic = analytic_concurrence(ba, bs);
            const OpenSystem sys = build_diamond(rates_from_betas(ba, bs, gamma_plus, omega0));
            const SteadyState ss = steady_state(sys);
            const double numeric = concurrence(TwoQubitState(ss.rho));
            const ThermoReport th = entropy_rate(sys, ss.rho, {{"A", ba}, {"S", bs}}, gamma_plus);
            return {format_double(analytic),
                    format_double(numeric),
                    format_double(th.heat_currents.at("A")),
                    format_double(th.heat_currents.at("S")),
                    format_double(th.entropy_rate),
                    format_double(th.entropy_rate_normalized),
                    format_double(th.entropy_rate / (omega0 * gamma_plus))};
        });

    CsvWriter csv(opts.out,
                  {"beta_A", "beta_S", "concurrence_analytic", "concurrence_numeric", "qdot_A",
                   "qdot_S", "sdot", "sdot_norm", "sdot_norm_w0", "error"},
                  opts.timestamp, detail::utc_timestamp());
    for (auto& r : rows) csv.row(r);
    return {n, failures, {opts.out}};
}

/// Full-model vs mapped effective-model concurrence along a kappa/g scan.
inline SweepResult run_cavity_kappa_scan(const KeyValueConfig& cfg) {
    const auto opts = detail::common_options(cfg, "cavity_kappa_scan.csv");
    const AxisSpec kappa_ax = axis_from_config(cfg, "kappa_over_g", {0.1, 100.0, 25, true});
    const double g_over_w0 = cfg.get_double("g_over_omega0", 1e-3);
    const double gamma_over_g = cfg.get_double("gamma_over_g", 0.0);
    const double p_over_g = cfg.get_double("p_over_g", 2e-4);
    const double c_tol = cfg.get_double("c_tol", 1e-4);
    cfg.reject_unused();

    const auto kappas = axis_values(kappa_ax);
    std::vector<std::vector<std::string>> rows(kappas.size());
    const std::size_t failures = detail::fill_rows(
        rows, opts.workers, 3,
        [&](std::size_t i) -> std::vector<std::string> { return {format_double(kappas[i])}; },
        [&](std::size_t i) -> std::vector<std::string> {
            CavitySpec spec;
            spec.omega0 = 1.0;
            spec.g = g_over_w0;
            spec.kappa = kappas[i] * spec.g;
            spec.gamma = gamma_over_g * spec.g;
            spec.p = p_over_g * spec.g;
            const ConvergedSteadyState conv = converged_steady_state(spec, c_tol);
            const MappedEffectiveParams m = adiabatic_rates(spec);
            const double c_eff = concurrence_from_rate_ratios(m.gamma_minus_A / m.gamma_plus,
                                                              m.gamma_minus_S / m.gamma_plus);
            return {format_double(conv.concurrence_value), format_double(c_eff),
                    std::to_string(conv.n_used)};
        });

    CsvWriter csv(opts.out, {"kappa_over_g", "C_full", "C_effective_mapped", "n_used", "error"},
                  opts.timestamp, detail::utc_timestamp());
    for (auto& r : rows) csv.row(r);
    return {kappas.size(), failures, {opts.out}};
}

/// Full-model concurrence over a (p/g, kappa/g) grid; appends a summary
/// comment with the grid maximum and its location.
inline SweepResult run_cavity_grid(const KeyValueConfig& cfg) {
    const auto opts = detail::common_options(cfg, "cavity_grid.csv");
    const AxisSpec p_ax = axis_from_config(cfg, "p_over_g", {1e-5, 1e-1, 41, true});
    const AxisSpec kappa_ax = axis_from_config(cfg, "kappa_over_g", {0.1, 100.0, 41, true});
    const double g_over_w0 = cfg.get_double("g_over_omega0", 1e-3);
    const double gamma_over_g = cfg.get_double("gamma_over_g", 1e-3);
    const double c_tol = cfg.get_double("c_tol", 1e-4);
    cfg.reject_unused();

    const auto ps = axis_values(p_ax);
    const auto kappas = axis_values(kappa_ax);
    const std::size_t n = ps.size() * kappas.size();
    std::vector<std::vector<std::string>> rows(n);
    std::vector<double> c_values(n, -1.0);
    std::vector<long> n_used_values(n, 0);

    const std::size_t failures = detail::fill_rows(
        rows, opts.workers, 2,
        [&](std::size_t i) -> std::vector<std::string> {
            return {format_double(ps[i / kappas.size()]),
                    format_double(kappas[i % kappas.size()])};
        },
        [&](std::size_t i) -> std::vector<std::string> {
            CavitySpec spec;
            spec.omega0 = 1.0;
            spec.g = g_over_w0;
            spec.kappa = kappas[i % kappas.size()] * spec.g;
            spec.gamma = gamma_over_g * spec.g;
            spec.p = ps[i / kappas.size()] * spec.g;
            const ConvergedSteadyState conv = converged_steady_state(spec, c_tol);
            c_values[i] = conv.concurrence_value;
            n_used_values[i] = conv.n_used;
            return {format_double(conv.concurrence_value), std::to_string(conv.n_used)};
        });

    CsvWriter csv(opts.out, {"p_over_g", "kappa_over_g", "C_full", "n_used", "error"},
                  opts.timestamp, detail::utc_timestamp());
    for (auto& r : rows) csv.row(r);
    const auto best = std::max_element(c_values.begin(), c_values.end());
    if (best != c_values.end() && *best >= 0.0) {
        const std::size_t i = static_cast<std::size_t>(best - c_values.begin());
        csv.comment("max C_full = " + format_double(*best) +
                    " at p_over_g = " + format_double(ps[i / kappas.size()]) +
                    ", kappa_over_g = " + format_double(kappas[i % kappas.size()]) +
                    ", n_used = " + std::to_string(n_used_values[i]));
    }
    return {n, failures, {opts.out}};
}

/// Concurrence at the operating point under added pure dephasing, symmetric
/// detuning, and incoherent cavity pumping; one CSV per scan.
inline SweepResult run_robustness(const KeyValueConfig& cfg) {
    const auto opts = detail::common_options(cfg, "robustness.csv");
    const double g_over_w0 = cfg.get_double("g_over_omega0", 1e-3);
    const double gamma_over_g = cfg.get_double("gamma_over_g", 1e-3);
    const double p_over_g = cfg.get_double("p_over_g", 5e-3);
    const double kappa_over_g = cfg.get_double("kappa_over_g", 2.0);
    const double c_tol = cfg.get_double("c_tol", 1e-4);
    const AxisSpec gz_ax = axis_from_config(cfg, "gamma_z_over_g", {0.0, 1e-2, 11, false});
    const AxisSpec delta_ax = axis_from_config(cfg, "delta_over_g", {0.0, 0.5, 11, false});
    const AxisSpec pc_ax = axis_from_config(cfg, "p_c_over_g", {0.0, 0.1, 11, false});
    cfg.reject_unused();

    CavitySpec base;
    base.omega0 = 1.0;
    base.g = g_over_w0;
    base.kappa = kappa_over_g * base.g;
    base.gamma = gamma_over_g * base.g;
    base.p = p_over_g * base.g;

    SweepResult result;
    auto run_scan = [&](const std::string& name, const AxisSpec& ax,
                        auto apply) {
        const auto values = axis_values(ax);
        std::vector<std::vector<std::string>> rows(values.size());
        result.failed += detail::fill_rows(
            rows, opts.workers, 2,
            [&](std::size_t i) -> std::vector<std::string> { return {format_double(values[i])}; },
            [&](std::size_t i) -> std::vector<std::string> {
                CavitySpec spec = base;
                apply(spec, values[i] * base.g);
                const ConvergedSteadyState conv = converged_steady_state(spec, c_tol);
                return {format_double(conv.concurrence_value), std::to_string(conv.n_used)};
            });
        result.total += values.size();

        std::string path = opts.out;
        const auto dot = path.rfind(".csv");
        if (dot != std::string::npos) path = path.substr(0, dot) + "_" + name + ".csv";
        else path += "_" + name;
        CsvWriter csv(path, {"value", "C_full", "n_used", "error"}, opts.timestamp,
                      detail::utc_timestamp());
        for (auto& r : rows) csv.row(r);
        result.outputs.push_back(path);
    };

    run_scan("gamma_z", gz_ax, [](CavitySpec& s, double v) { s.gamma_z = v; });
    run_scan("delta", delta_ax, [](CavitySpec& s, double v) { s.delta = v; });
    run_scan("p_c", pc_ax, [](CavitySpec& s, double v) { s.p_c = v; });
    return result;
}

struct TrajectoryReport {
    EnsembleStats stats;
    double thermo_rate = 0.0;
    bool ft_pass = false;
    bool second_law_pass = false;
    bool rate_match_pass = false;
};

inline TrajectoryReport evaluate_trajectory_report(const EnsembleStats& stats, double thermo_rate,
                                                   bool equilibrium) {
    TrajectoryReport rep;
    rep.stats = stats;
    rep.thermo_rate = thermo_rate;
    rep.ft_pass = std::abs(stats.mean_exp_neg_ds - 1.0) <= 3.0 * stats.se_exp_neg_ds;
    rep.second_law_pass = equilibrium ? std::abs(stats.mean_ds) <= 3.0 * stats.se_ds
                                      : stats.mean_ds > 3.0 * stats.se_ds;
    const double se_rate = stats.duration > 0.0 ? stats.se_ds / stats.duration : 0.0;
    rep.rate_match_pass = std::abs(stats.rate_estimate - thermo_rate) <= 3.0 * se_rate;
    return rep;
}

inline TrajectoryReport trajectory_report(double beta_a, double beta_s, double gamma_plus,
                                          double omega0, std::size_t n_traj, double duration,
                                          std::uint64_t seed, unsigned workers) {
    const OpenSystem sys = build_diamond(rates_from_betas(beta_a, beta_s, gamma_plus, omega0));
    const SteadyState ss = steady_state(sys);
    const auto records = run_ensemble(sys, ss, n_traj, duration, seed, workers);
    const double rate =
        entropy_rate(sys, ss.rho, {{"A", beta_a}, {"S", beta_s}}, gamma_plus).entropy_rate;
    return evaluate_trajectory_report(ensemble_estimators(records), rate, beta_a == beta_s);
}

/// Trajectory-ensemble report: estimator statistics plus pass/fail entries
/// for the fluctuation theorem, the Second Law, and consistency with the
/// deterministic entropy-production rate.
inline SweepResult run_trajectories(const KeyValueConfig& cfg) {
    const auto opts = detail::common_options(cfg, "trajectories.csv");
    const double beta_a = cfg.get_double("beta_a", -1.0);
    const double beta_s = cfg.get_double("beta_s", 2.0);
    const double gamma_plus = cfg.get_double("gamma_plus", 1.0);
    const double omega0 = cfg.get_double("omega0", 1.0);
    const long n_traj = cfg.get_long("n_traj", 10000);
    const double duration = cfg.get_double("duration", 20.0);
    const bool dump_events = cfg.get_bool("dump_events", false);
    cfg.reject_unused();
    if (n_traj < 2) throw ConfigError(cfg.source() + ": n_traj must be >= 2");

    const OpenSystem sys = build_diamond(rates_from_betas(beta_a, beta_s, gamma_plus, omega0));
    const SteadyState ss = steady_state(sys);
    const auto records =
        run_ensemble(sys, ss, static_cast<std::size_t>(n_traj), duration, opts.seed, opts.workers);
    const double rate =
        entropy_rate(sys, ss.rho, {{"A", beta_a}, {"S", beta_s}}, gamma_plus).entropy_rate;
    const TrajectoryReport rep =
        evaluate_trajectory_report(ensemble_estimators(records), rate, beta_a == beta_s);

    CsvWriter csv(opts.out, {"quantity", "value"}, opts.timestamp, detail::utc_timestamp());
    auto put = [&](const std::string& k, const std::string& v) { csv.row({k, v}); };
    put("beta_A", format_double(beta_a));
    put("beta_S", format_double(beta_s));
    put("n_trajectories", std::to_string(rep.stats.n));
    put("duration", format_double(rep.stats.duration));
    put("mean_dS", format_double(rep.stats.mean_ds));
    put("se_dS", format_double(rep.stats.se_ds));
    put("mean_exp_neg_dS", format_double(rep.stats.mean_exp_neg_ds));
    put("se_exp_neg_dS", format_double(rep.stats.se_exp_neg_ds));
    put("rate_estimate", format_double(rep.stats.rate_estimate));
    put("thermo_entropy_rate", format_double(rep.thermo_rate));
    put("ft_pass", rep.ft_pass ? "1" : "0");
    put("second_law_pass", rep.second_law_pass ? "1" : "0");
    put("rate_match_pass", rep.rate_match_pass ? "1" : "0");

    SweepResult result{1, 0, {opts.out}};
    if (dump_events) {
        std::string path = opts.out + ".events.csv";
        CsvWriter ev(path,
                     {"record", "trajectory_id", "time", "label", "direction", "delta_q",
                      "ds_boundary", "ds_conditional"},
                     opts.timestamp, detail::utc_timestamp());
        for (std::size_t i = 0; i < records.size(); ++i) {
            for (const auto& e : records[i].events)
                ev.row({"event", std::to_string(i), format_double(e.time), e.label,
                        to_string(e.direction), format_double(e.delta_q), "", ""});
            ev.row({"trajectory", std::to_string(i), "", "", "", "",
                    format_double(records[i].ds_boundary),
                    format_double(records[i].ds_conditional)});
        }
        result.outputs.push_back(path);
    }
    return result;
}

} // namespace qtm
