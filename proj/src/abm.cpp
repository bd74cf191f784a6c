#include "gamectl/abm.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "gamectl/error.hpp"

namespace gamectl {

void ABMConfig::validate(std::size_t n_strategies) const {
    auto check_prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::input, std::string(name) + " must lie in [0, 1]");
    };
    check_prob(prob_revision, "prob_revision");
    check_prob(prob_mutation, "prob_mutation");
    if (n_agents < 2) throw Error(ErrorKind::input, "the population needs at least two agents");
    if (!random_initial) {
        if (initial_counts.size() != n_strategies) {
            throw Error(ErrorKind::input, "initial_counts has " + std::to_string(initial_counts.size()) +
                                              " entries for a game with " + std::to_string(n_strategies) +
                                              " strategies");
        }
        const auto total = std::accumulate(initial_counts.begin(), initial_counts.end(), std::size_t{0});
        if (total != n_agents) {
            throw Error(ErrorKind::input, "initial counts sum to " + std::to_string(total) + ", expected n_agents = " +
                                              std::to_string(n_agents));
        }
    }
    if (adoption_scale && !(*adoption_scale > 0.0)) {
        throw Error(ErrorKind::input, "adoption_scale must be positive");
    }
    if (controller && static_cast<std::size_t>(controller->K.size()) != n_strategies) {
        throw Error(ErrorKind::dimension, "controller size does not match the game");
    }
}

Population::Population(std::vector<std::size_t> strategies, std::size_t n_strategies)
    : strategies_(std::move(strategies)), counts_(n_strategies, 0) {
    for (std::size_t s : strategies_) {
        if (s >= n_strategies) throw Error(ErrorKind::dimension, "agent strategy out of range");
        ++counts_[s];
    }
}

Eigen::VectorXd Population::frequencies() const {
    Eigen::VectorXd x(static_cast<Eigen::Index>(counts_.size()));
    const auto n = static_cast<double>(strategies_.size());
    for (std::size_t j = 0; j < counts_.size(); ++j) x[static_cast<Eigen::Index>(j)] = static_cast<double>(counts_[j]) / n;
    return x;
}

Population init_population(const ABMConfig& cfg, std::size_t n_strategies, Rng* rng) {
    cfg.validate(n_strategies);
    std::vector<std::size_t> strategies;
    strategies.reserve(cfg.n_agents);
    if (cfg.random_initial) {
        if (!rng) throw Error(ErrorKind::input, "random initial condition needs a generator");
        for (std::size_t i = 0; i < cfg.n_agents; ++i) strategies.push_back(rng->below(n_strategies));
    } else {
        for (std::size_t j = 0; j < n_strategies; ++j) strategies.insert(strategies.end(), cfg.initial_counts[j], j);
    }
    return Population(std::move(strategies), n_strategies);
}

Eigen::VectorXd controlled_payoffs(const PayoffMatrix& A, const Eigen::VectorXd& x, const Controller* c) {
    Eigen::VectorXd U = payoffs(A, x);
    if (c) U += per_agent_adjustment(*c, x);
    return U;
}

double default_adoption_scale(const PayoffMatrix& A) {
    const double range = A.max_entry() - A.min_entry();
    return range > 0.0 ? range : 1.0;
}

Population revision_step(const Population& pop, const PayoffMatrix& A, const Controller* c,
                         double prob_revision, double prob_mutation, double adoption_scale, Rng& rng) {
    const std::size_t N = pop.size();
    const std::size_t n = pop.n_strategies();
    const Eigen::VectorXd Uc = controlled_payoffs(A, pop.frequencies(), c);
    const auto& old = pop.strategies();

    std::vector<std::size_t> next = old;
    for (std::size_t i = 0; i < N; ++i) {
        if (!rng.bernoulli(prob_revision)) continue;
        if (rng.bernoulli(prob_mutation)) {
            next[i] = rng.below(n);
            continue;
        }
        std::size_t other = rng.below(N - 1);
        if (other >= i) ++other;
        const std::size_t cand = old[other];
        const double gain = Uc[static_cast<Eigen::Index>(cand)] - Uc[static_cast<Eigen::Index>(old[i])];
        const double p = std::clamp(gain / adoption_scale, 0.0, 1.0);
        if (rng.uniform() < p) next[i] = cand;
    }
    return Population(std::move(next), n);
}

Trajectory run_abm(const PayoffMatrix& A, const ABMConfig& cfg) {
    const std::size_t n = A.size();
    cfg.validate(n);
    Rng rng(cfg.seed);
    Population pop = init_population(cfg, n, &rng);
    const Controller* c = cfg.controller ? &*cfg.controller : nullptr;
    const double scale = cfg.adoption_scale.value_or(default_adoption_scale(A));

    Trajectory traj;
    traj.meta = TrajectoryMeta{"abm", c ? c->b : 0.0, cfg.seed, 1.0};
    traj.times.reserve(cfg.rounds + 1);
    traj.states.reserve(cfg.rounds + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(pop.frequencies());
    for (std::size_t r = 1; r <= cfg.rounds; ++r) {
        pop = revision_step(pop, A, c, cfg.prob_revision, cfg.prob_mutation, scale, rng);
        traj.times.push_back(static_cast<double>(r));
        traj.states.push_back(pop.frequencies());
    }
    return traj;
}

}  // namespace gamectl
