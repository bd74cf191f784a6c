#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gamectl/abm.hpp"
#include "gamectl/control.hpp"
#include "gamectl/eigensystem.hpp"
#include "gamectl/game.hpp"
#include "gamectl/io.hpp"
#include "gamectl/metrics.hpp"

namespace gamectl {

/// Theory side for one equilibrium: J°, its spectrum and, when it has a
/// rotating mode, the predicted eigencycles.
struct EquilibriumAnalysis {
    Equilibrium equilibrium;
    Eigen::MatrixXd jacobian;
    EigenSystem eigen;
    bool payoff_eigen_ok = false;
    std::optional<std::size_t> complex_index;
    std::optional<EigencycleSet> eigencycles;
};

struct Analysis {
    std::vector<EquilibriumAnalysis> equilibria;
};

/// Throws Error{input} when the game has no equilibrium.
Analysis analyze(const PayoffMatrix& A);
Json to_json(const Analysis& analysis);

/// The two reference equilibria of a run. `primary` carries the assigned
/// poles (Nash_1 of the built-in game), `secondary` is the alternative the
/// controller can steer towards (Nash_2).
struct References {
    Equilibrium primary;
    Equilibrium secondary;
    double primary_threshold = 0.0;
    double secondary_threshold = 0.0;
};

/// Built-in game: Nash_1, Nash_2 and the 0.184 / 0.273 thresholds.
/// Otherwise: the first equilibrium with a rotating mode (or the first one)
/// and the remaining one of largest support, with thresholds at half the
/// distance from the uniform state.
References resolve_references(const PayoffMatrix& A);

struct DesignRequest {
    std::vector<double> b_grid = default_b_grid();
    std::optional<Eigen::VectorXd> channel;  // defaults to paper_channel() for n = 5
    DesignOptions options;
};

struct DesignOutcome {
    std::vector<ControllerDesign> designs;
    Json report;
};

/// Designs one controller per b around `primary`. Any failing row throws.
DesignOutcome design(const PayoffMatrix& A, const References& refs, const DesignRequest& request);

struct OdeConfig {
    double step = 0.01;
    double horizon = 200.0;
    std::optional<Eigen::VectorXd> x0;  // uniform when absent
};

Trajectory simulate_ode(const PayoffMatrix& A, const Controller& c, const OdeConfig& cfg);

struct SweepConfig {
    std::string game = "builtin:paper";
    std::vector<double> b_grid = default_b_grid();
    std::vector<std::string> engines{"ode", "abm"};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::string output_dir = "sweep";
    TaxMode tax_mode = TaxMode::channel_sum;
    ShiftSelector selector = ShiftSelector::complex_pair;
    OdeConfig ode;
    ABMConfig abm;
    MetricsOptions ode_metrics{0.5, 0.05, 0.0};
    MetricsOptions abm_metrics{0.5, 0.1, 0.05};
    std::size_t threads = 0;  // 0: hardware concurrency

    void validate() const;
};

struct SweepOutcome {
    DesignOutcome design;
    std::vector<SummaryRow> rows;
    Json evaluation;
    std::vector<std::string> failures;
};

/// Designs the gains, runs every (b, engine, seed) on a worker pool with one
/// output file set per run, then aggregates summary.csv and
/// evaluation.json single-threaded.
SweepOutcome sweep(const PayoffMatrix& A, const SweepConfig& cfg);

struct EvaluationOptions {
    double cycle_vanish_ratio = 0.1;
    double sign_floor = 1e-12;  // |L| below this counts as "no measurement"
    double decided_b = 0.4;  // |b| from which selection must be decided
};

/// Checks the three theory predictions (selection direction, convergence
/// speed ordering, cycle signature) on summary rows alone. The game is only
/// used to recompute the theoretical eigencycles. Also records the
/// ODE-time-per-ABM-round calibration factor.
Json evaluate(const std::vector<SummaryRow>& rows, const PayoffMatrix& A, const ABMConfig& abm = {},
              const EvaluationOptions& options = {});

/// True when every prediction in an evaluate() result passed.
bool evaluation_passed(const Json& evaluation);

}  // namespace gamectl
