#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gamectl/controller.hpp"
#include "gamectl/dynamics.hpp"
#include "gamectl/game.hpp"
#include "gamectl/rng.hpp"

namespace gamectl {

struct ABMConfig {
    std::size_t n_agents = 1000;
    std::vector<std::size_t> initial_counts{200, 200, 200, 200, 200};
    double prob_revision = 0.2;
    double prob_mutation = 0.05;
    std::size_t rounds = 6000;
    std::uint64_t seed = 1;
    std::optional<Controller> controller;
    /// Draw the initial strategies uniformly at random instead of using
    /// `initial_counts`.
    bool random_initial = false;
    /// Normalizer of the pairwise-difference rule. Defaults to the payoff
    /// range max(A) - min(A).
    std::optional<double> adoption_scale;

    /// Throws Error{input} on out-of-range probabilities or counts that do
    /// not add up to n_agents.
    void validate(std::size_t n_strategies) const;
};

/// Strategy of every agent plus the per-strategy counts.
class Population {
public:
    Population(std::vector<std::size_t> strategies, std::size_t n_strategies);

    std::size_t size() const noexcept { return strategies_.size(); }
    std::size_t n_strategies() const noexcept { return counts_.size(); }
    std::size_t strategy(std::size_t agent) const { return strategies_[agent]; }
    const std::vector<std::size_t>& strategies() const noexcept { return strategies_; }
    const std::vector<std::size_t>& counts() const noexcept { return counts_; }

    /// count_j / n_agents
    Eigen::VectorXd frequencies() const;

private:
    std::vector<std::size_t> strategies_;
    std::vector<std::size_t> counts_;
};

/// Agents 0..c_1-1 play strategy 0, the next c_2 play strategy 1, and so on.
/// With `random_initial` each agent draws its strategy from `rng` instead.
Population init_population(const ABMConfig& cfg, std::size_t n_strategies, Rng* rng = nullptr);

/// Expected payoff of each strategy against the whole population plus the
/// controller's per-agent adjustment.
Eigen::VectorXd controlled_payoffs(const PayoffMatrix& A, const Eigen::VectorXd& x, const Controller* c);

/// Payoff range of A; the default adoption normalizer.
double default_adoption_scale(const PayoffMatrix& A);

/// One synchronous round of revisions. Payoffs are frozen at the state the
/// round starts from. Adoption probabilities above 1 are clamped.
Population revision_step(const Population& pop, const PayoffMatrix& A, const Controller* c,
                         double prob_revision, double prob_mutation, double adoption_scale, Rng& rng);

/// Records rounds + 1 frequency states at times 0, 1, ..., rounds.
Trajectory run_abm(const PayoffMatrix& A, const ABMConfig& cfg);

}  // namespace gamectl
