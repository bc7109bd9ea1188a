// Sweep runner and figure-dataset reproducer for the driven-dissipative
// two-qubit machine. See README.md for the config format and examples.

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <string>

#include "qtm/qtm.hpp"

namespace {

struct RunFlags {
    std::string config;
    std::string out;
    long seed = -1;
    long workers = -1;
    bool no_timestamp = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
    cmd->add_option("--config", flags.config, "key = value config file");
    cmd->add_option("--out", flags.out, "output CSV path");
    cmd->add_option("--seed", flags.seed, "RNG base seed");
    cmd->add_option("--workers", flags.workers, "worker thread count (0 = all cores)");
    cmd->add_flag("--no-timestamp", flags.no_timestamp, "suppress the timestamp header line");
}

int run_mode(const std::string& mode, const RunFlags& flags,
             const std::function<qtm::SweepResult(const qtm::KeyValueConfig&)>& runner) {
    try {
        qtm::KeyValueConfig cfg = flags.config.empty()
                                      ? qtm::KeyValueConfig()
                                      : qtm::KeyValueConfig::from_file(flags.config);
        const std::string cfg_mode = cfg.get_string("mode", mode);
        if (cfg_mode != mode)
            throw qtm::ConfigError(flags.config + ": config is for mode '" + cfg_mode +
                                   "', not '" + mode + "'");
        if (!flags.out.empty()) cfg.set("out", flags.out);
        if (flags.seed >= 0) cfg.set("seed", std::to_string(flags.seed));
        if (flags.workers >= 0) cfg.set("workers", std::to_string(flags.workers));
        if (flags.no_timestamp) cfg.set("timestamp", "false");

        const qtm::SweepResult result = runner(cfg);
        for (const auto& f : result.outputs) std::printf("wrote %s\n", f.c_str());
        if (result.failed > 0)
            std::fprintf(stderr, "%zu of %zu grid points failed (see the error column)\n",
                         result.failed, result.total);
        if (result.failed == 0) return 0;
        return result.failed == result.total ? 3 : 2;
    } catch (const qtm::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

int run_plot(const std::string& in, qtm::PlotSpec spec, const std::string& out) {
    try {
        const qtm::CsvTable table = qtm::read_csv(in);
        qtm::emit_plot(table, spec, out);
        std::printf("wrote %s\n", out.c_str());
        return 0;
    } catch (const qtm::ColumnError& e) {
        std::fprintf(stderr, "column error: %s\n", e.what());
        return 1;
    } catch (const qtm::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"steady-state entanglement and entropy production in a "
                 "driven-dissipative two-qubit machine"};
    app.require_subcommand(1);

    RunFlags flags;
    int rc = 0;

    auto* effective = app.add_subcommand(
        "effective-grid", "concurrence + thermodynamics over a (beta_A, beta_S) grid");
    add_run_flags(effective, flags);
    effective->callback([&] { rc = run_mode("effective-grid", flags, qtm::run_effective_grid); });

    auto* kappa_scan = app.add_subcommand(
        "cavity-kappa-scan", "full vs effective-model concurrence along a kappa/g scan");
    add_run_flags(kappa_scan, flags);
    kappa_scan->callback(
        [&] { rc = run_mode("cavity-kappa-scan", flags, qtm::run_cavity_kappa_scan); });

    auto* grid = app.add_subcommand("cavity-grid",
                                    "full-model concurrence over a (p/g, kappa/g) grid");
    add_run_flags(grid, flags);
    grid->callback([&] { rc = run_mode("cavity-grid", flags, qtm::run_cavity_grid); });

    auto* robust = app.add_subcommand(
        "robustness", "concurrence under dephasing, detuning and cavity pumping scans");
    add_run_flags(robust, flags);
    robust->callback([&] { rc = run_mode("robustness", flags, qtm::run_robustness); });

    auto* traj = app.add_subcommand(
        "trajectories", "quantum-jump ensemble report: fluctuation theorem and entropy rate");
    add_run_flags(traj, flags);
    traj->callback([&] { rc = run_mode("trajectories", flags, qtm::run_trajectories); });

    std::string plot_in, plot_out = "plot.svg";
    qtm::PlotSpec plot_spec;
    auto* plot = app.add_subcommand("plot", "render a sweep CSV as a standalone SVG");
    plot->add_option("--in", plot_in, "input CSV")->required();
    plot->add_option("--kind", plot_spec.kind, "heatmap | line");
    plot->add_option("--x", plot_spec.x, "x column")->required();
    plot->add_option("--y", plot_spec.y, "y column (heatmap)");
    plot->add_option("--z", plot_spec.z, "value column (heatmap)");
    plot->add_option("--series", plot_spec.series, "y column(s) (line)");
    plot->add_option("--contour", plot_spec.contours, "contour level(s) (heatmap)");
    plot->add_flag("--logx", plot_spec.logx, "log-scale x axis (line)");
    plot->add_flag("--logy", plot_spec.logy, "log-scale y axis (line)");
    plot->add_option("--title", plot_spec.title, "plot title");
    plot->add_option("--out", plot_out, "output SVG path");
    plot->callback([&] { rc = run_plot(plot_in, plot_spec, plot_out); });

    CLI11_PARSE(app, argc, argv);
    return rc;
}
