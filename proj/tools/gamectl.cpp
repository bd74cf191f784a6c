// gamectl: analyze, design, simulate, sweep and evaluate from the shell.
//
// Exit codes: 0 success, 1 evaluation mismatch, 2 input or run error.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gamectl/abm.hpp"
#include "gamectl/control.hpp"
#include "gamectl/error.hpp"
#include "gamectl/io.hpp"
#include "gamectl/metrics.hpp"
#include "gamectl/workflow.hpp"

using namespace gamectl;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string game = "builtin:paper";
    std::optional<double> b;
    std::vector<double> b_grid;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;
    std::optional<std::size_t> rounds;
    std::optional<double> horizon;
    std::optional<double> step;
    std::string tax_mode = "channel_sum";
    std::string selector = "complex_pair";
    std::string out;
    std::vector<std::string> engines;
    std::size_t threads = 0;
    std::optional<std::size_t> agents;
    std::optional<double> prob_revision;
    std::optional<double> prob_mutation;
    std::string summary;
};

DesignOptions design_options(const Options& o) {
    DesignOptions d;
    d.tax_mode = parse_tax_mode(o.tax_mode);
    d.selector = parse_shift_selector(o.selector);
    return d;
}

std::vector<double> grid_or_single(const Options& o) {
    if (!o.b_grid.empty()) return o.b_grid;
    if (o.b) return {*o.b};
    return default_b_grid();
}

double single_b(const Options& o) {
    if (!o.b) throw Error(ErrorKind::input, "--b is required");
    return *o.b;
}

ABMConfig abm_config(const Options& o) {
    ABMConfig cfg;
    if (o.agents) {
        cfg.n_agents = *o.agents;
        cfg.initial_counts.clear();
        cfg.random_initial = false;
    }
    if (o.rounds) cfg.rounds = *o.rounds;
    if (o.prob_revision) cfg.prob_revision = *o.prob_revision;
    if (o.prob_mutation) cfg.prob_mutation = *o.prob_mutation;
    cfg.seed = o.seed;
    return cfg;
}

// Even split of n_agents when --agents overrides the population size.
void fill_counts(ABMConfig& cfg, std::size_t n) {
    if (!cfg.initial_counts.empty()) return;
    cfg.initial_counts.assign(n, cfg.n_agents / n);
    for (std::size_t i = 0; i < cfg.n_agents % n; ++i) ++cfg.initial_counts[i];
}

OdeConfig ode_config(const Options& o) {
    OdeConfig cfg;
    if (o.step) cfg.step = *o.step;
    if (o.horizon) cfg.horizon = *o.horizon;
    return cfg;
}

fs::path out_dir(const Options& o) {
    const fs::path p = o.out.empty() ? fs::path(".") : fs::path(o.out);
    fs::create_directories(p);
    return p;
}

fs::path out_file(const Options& o, const char* fallback) {
    const fs::path p = o.out.empty() ? fs::path(fallback) : fs::path(o.out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
}

fs::path sibling(const fs::path& csv, const std::string& suffix) {
    return csv.parent_path() / (csv.stem().string() + suffix);
}

int cmd_analyze(const Options& o) {
    const auto A = resolve_game(o.game);
    const auto an = analyze(A);
    for (const auto& e : an.equilibria) {
        std::cout << "equilibrium";
        for (auto v : e.equilibrium.point.values()) std::cout << ' ' << format_number(v);
        std::cout << "  payoff " << format_number(e.equilibrium.expected_payoff) << "\n  spectrum";
        for (const auto& z : e.eigen.eigenvalues) {
            std::cout << ' ' << format_number(z.real());
            if (z.imag() != 0.0) std::cout << (z.imag() > 0 ? "+" : "") << format_number(z.imag()) << 'i';
        }
        std::cout << '\n';
    }
    const fs::path path = out_dir(o) / "analysis.json";
    write_file(path.string(), to_json(an).dump(2) + "\n");
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_design(const Options& o) {
    const auto A = resolve_game(o.game);
    const auto refs = resolve_references(A);
    const auto outcome = design(A, refs, DesignRequest{grid_or_single(o), std::nullopt, design_options(o)});
    const fs::path dir = out_dir(o);
    std::ostringstream gains;
    write_gains_csv(gains, outcome.designs);
    write_file((dir / "gains.csv").string(), gains.str());
    write_file((dir / "design_report.json").string(), outcome.report.dump(2) + "\n");
    std::cout << gains.str();
    for (const auto& d : outcome.designs) {
        for (const auto& w : d.warnings) std::cerr << "warning (b=" << format_number(d.controller.b) << "): " << w << '\n';
    }
    return 0;
}

int cmd_simulate(const Options& o, bool abm) {
    const auto A = resolve_game(o.game);
    const auto refs = resolve_references(A);
    const double b = single_b(o);
    const auto d = design(A, refs, DesignRequest{{b}, std::nullopt, design_options(o)}).designs.front();
    const Eigen::VectorXd n1 = refs.primary.point.values(), n2 = refs.secondary.point.values();

    Trajectory traj;
    Json manifest;
    MetricsOptions mo;
    mo.nash1_threshold = refs.primary_threshold;
    mo.nash2_threshold = refs.secondary_threshold;
    if (abm) {
        ABMConfig cfg = abm_config(o);
        fill_counts(cfg, A.size());
        cfg.controller = d.controller;
        const auto t0 = std::chrono::steady_clock::now();
        traj = run_abm(A, cfg);
        manifest = abm_manifest(cfg, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        mo.selection_threshold = 0.1;
        mo.terminal_window = 0.05;
    } else {
        const OdeConfig cfg = ode_config(o);
        traj = simulate_ode(A, d.controller, cfg);
        manifest = Json{{"engine", "ode"},
                        {"step", cfg.step},
                        {"horizon", cfg.horizon},
                        {"integrator", "rk4, clip and renormalize"},
                        {"controller", to_json(d)}};
    }
    const auto report = evaluate_trajectory(traj, n1, n2, mo);
    manifest["metrics"] = to_json(report);

    const fs::path csv = out_file(o, abm ? "abm.csv" : "ode.csv");
    std::ostringstream os;
    write_trajectory_csv(os, traj, &report.d_nash1, &report.d_nash2);
    write_file(csv.string(), os.str());
    write_file(sibling(csv, "_manifest.json").string(), manifest.dump(2) + "\n");
    std::cout << "wrote " << csv.string() << " (" << traj.size() << " rows), selected " << to_string(report.selected) << '\n';
    return 0;
}

int cmd_sweep(const Options& o) {
    SweepConfig cfg;
    cfg.game = o.game;
    if (!o.b_grid.empty()) cfg.b_grid = o.b_grid;
    if (!o.engines.empty()) cfg.engines = o.engines;
    if (!o.seeds.empty()) cfg.seeds = o.seeds;
    cfg.output_dir = o.out.empty() ? "sweep" : o.out;
    cfg.tax_mode = parse_tax_mode(o.tax_mode);
    cfg.selector = parse_shift_selector(o.selector);
    cfg.ode = ode_config(o);
    cfg.abm = abm_config(o);
    cfg.threads = o.threads;
    const auto A = resolve_game(cfg.game);
    fill_counts(cfg.abm, A.size());

    const auto out = sweep(A, cfg);
    for (const auto& f : out.failures) std::cerr << "run failed: " << f << '\n';
    std::cout << "wrote " << out.rows.size() << " rows to " << (fs::path(cfg.output_dir) / "summary.csv").string()
              << "; predictions " << (evaluation_passed(out.evaluation) ? "confirmed" : "not all confirmed") << '\n';
    return 0;
}

int cmd_evaluate(const Options& o) {
    if (o.summary.empty()) throw Error(ErrorKind::input, "--summary is required");
    const auto A = resolve_game(o.game);
    std::istringstream in(read_file(o.summary));
    const auto rows = read_summary_csv(in);
    ABMConfig cfg = abm_config(o);
    const auto ev = evaluate(rows, A, cfg);
    fs::path dir = fs::path(o.summary).parent_path();
    if (!o.out.empty()) dir = o.out;
    if (!dir.empty()) fs::create_directories(dir);
    const fs::path path = dir / "evaluation.json";
    write_file(path.string(), ev.dump(2) + "\n");
    const bool ok = evaluation_passed(ev);
    for (const auto& [name, p] : ev["predictions"].items()) {
        std::cout << name << ": " << (p.value("pass", false) ? "confirmed" : "NOT confirmed") << '\n';
    }
    std::cout << "wrote " << path.string() << '\n';
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pole-placement control of population games"};
    app.set_config("--config", "", "Flat TOML/INI file whose keys are the long flag names");
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--game", o.game, "Payoff CSV path or builtin:paper")->capture_default_str();
    app.add_option("--b", o.b, "Pole shift b in [-1, 1]");
    app.add_option("--b-grid,--b_grid", o.b_grid, "Comma-separated b values")->delimiter(',');
    app.add_option("--seed", o.seed, "ABM seed")->capture_default_str();
    app.add_option("--seeds", o.seeds, "Comma-separated ABM seeds for sweeps")->delimiter(',');
    app.add_option("--rounds", o.rounds, "ABM rounds");
    app.add_option("--horizon", o.horizon, "ODE horizon");
    app.add_option("--step", o.step, "ODE step");
    app.add_option("--tax-mode,--tax_mode", o.tax_mode, "channel_sum or plain")->capture_default_str();
    app.add_option("--selector", o.selector, "complex_pair or trailing")->capture_default_str();
    app.add_option("--out", o.out, "Output directory (file for simulate-*)");
    app.add_option("--engines", o.engines, "Comma-separated subset of ode,abm")->delimiter(',');
    app.add_option("--threads", o.threads, "Sweep worker threads, 0 for all cores")->capture_default_str();
    app.add_option("--agents", o.agents, "ABM population size");
    app.add_option("--prob-revision,--prob_revision", o.prob_revision, "ABM revision probability");
    app.add_option("--prob-mutation,--prob_mutation", o.prob_mutation, "ABM mutation probability");
    app.add_option("--summary", o.summary, "summary.csv to evaluate");

    auto* analyze_cmd = app.add_subcommand("analyze", "Equilibria, Jacobians, spectra and eigencycles");
    auto* design_cmd = app.add_subcommand("design", "Gain table for --b or --b-grid");
    auto* ode_cmd = app.add_subcommand("simulate-ode", "One controlled ODE run");
    auto* abm_cmd = app.add_subcommand("simulate-abm", "One controlled agent-based run");
    auto* sweep_cmd = app.add_subcommand("sweep", "Design, simulate and evaluate over a b grid");
    auto* eval_cmd = app.add_subcommand("evaluate", "Re-evaluate a summary.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*analyze_cmd) return cmd_analyze(o);
        if (*design_cmd) return cmd_design(o);
        if (*ode_cmd) return cmd_simulate(o, false);
        if (*abm_cmd) return cmd_simulate(o, true);
        if (*sweep_cmd) return cmd_sweep(o);
        if (*eval_cmd) return cmd_evaluate(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
