#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gamectl/controller.hpp"
#include "gamectl/game.hpp"

namespace gamectl {

/// Guard for the per-agent reward division by x_j.
inline constexpr double population_epsilon = 1e-12;

// Velocity fields. States may be slightly off the simplex (RK4 stages), so
// these take raw vectors.
Eigen::VectorXd replicator_field(const PayoffMatrix& A, const Eigen::VectorXd& x);
Eigen::VectorXd controlled_field(const PayoffMatrix& A, const Eigen::VectorXd& x, const Controller& c);

double tax(const Controller& c, const Eigen::VectorXd& x);

/// Payoff change seen by one agent of each strategy: B_j(K·x)/x_j + T, or
/// just T where no agent of strategy j exists.
Eigen::VectorXd per_agent_adjustment(const Controller& c, const Eigen::VectorXd& x);

/// d(replicator_field)/dx:
///   J°_ij = δ_ij (U_i - Ū) + x_i (A_ij - U_j - (Aᵀx)_j)
Eigen::MatrixXd jacobian_replicator(const PayoffMatrix& A, const Eigen::VectorXd& x);

/// d(controlled_field)/dx = J° + B·K - s·x·K + T(x)·I with s the tax scale.
/// Where K·x = 0 (at the anchor) the last term vanishes and this is the
/// familiar J° + B·K - s·x·K.
Eigen::MatrixXd jacobian_controlled(const PayoffMatrix& A, const Eigen::VectorXd& x, const Controller& c);

struct TrajectoryMeta {
    std::string field_kind;  // "replicator", "controlled", "abm"
    double b = 0.0;
    std::uint64_t seed = 0;
    double step = 0.0;
};

/// Time-stamped states. `times` is strictly increasing and each state is on
/// the simplex.
struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    TrajectoryMeta meta;

    std::size_t size() const noexcept { return times.size(); }
    std::size_t dimension() const { return states.empty() ? 0 : static_cast<std::size_t>(states.front().size()); }
};

using VelocityField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Fixed-step RK4 with clip-and-renormalize after every step. Records every
/// state, so the result has round(horizon / h) + 1 samples.
///
/// Throws Error{integration} when a step lands more than 1e-6 outside the
/// simplex before projection: a sum drift, or a negative component beyond
/// twice the explicit-Euler prediction from the current state.
Trajectory integrate(const VelocityField& field, const SimplexState& x0, double h, double horizon);

}  // namespace gamectl
