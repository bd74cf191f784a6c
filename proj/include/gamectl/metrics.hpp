#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gamectl/dynamics.hpp"
#include "gamectl/eigensystem.hpp"
#include "gamectl/game.hpp"

namespace gamectl {

// Half-convergence thresholds for the built-in game: half the distance from
// the uniform state to Nash_1 (0.1826) and to Nash_2 (0.2739), rounded up.
inline constexpr double nash1_half_threshold = 0.184;
inline constexpr double nash2_half_threshold = 0.273;

using AngularMomentumSet = PairValues;

/// States after dropping the leading `discard_fraction` of samples.
std::span<const Eigen::VectorXd> tail_window(const Trajectory& traj, double discard_fraction);

/// Componentwise time average of the retained states.
Eigen::VectorXd mean_distribution(const Trajectory& traj, double discard_fraction);

/// Euclidean distance of every state to `target`.
std::vector<double> distance_series(const Trajectory& traj, const Eigen::VectorXd& target);

/// First time d(t) <= threshold, interpolated linearly between samples.
std::optional<double> half_time(std::span<const double> times, std::span<const double> d, double threshold);

/// Mean cross product of consecutive projections onto plane (m, n):
///   (1/t') sum_t [x_m(t) x_n(t+1) - x_n(t) x_m(t+1)],  t' = samples - 1.
/// Measured about the origin unless `center` is given. Positive means
/// counter-clockwise (from axis m towards axis n).
double angular_momentum(std::span<const Eigen::VectorXd> states, std::size_t m, std::size_t n,
                        const Eigen::VectorXd* center = nullptr);

/// All C(n, 2) planes at once.
AngularMomentumSet angular_momenta(std::span<const Eigen::VectorXd> states,
                                   const Eigen::VectorXd* center = nullptr);

/// sqrt(sum L_mn^2)
double cycle_strength(std::span<const double> L);

enum class Selection { nash1, nash2, undecided };
std::string_view to_string(Selection s);
Selection parse_selection(std::string_view text);

struct MetricsOptions {
    double discard_fraction = 0.5;  // burn-in for mean_distribution and L
    double selection_threshold = 0.05;
    /// Fraction of trailing samples averaged into the "terminal" state; 0
    /// uses the last sample alone.
    double terminal_window = 0.0;
    double nash1_threshold = nash1_half_threshold;
    double nash2_threshold = nash2_half_threshold;
};

struct MetricsReport {
    Eigen::VectorXd mean_distribution;
    std::vector<double> d_nash1;
    std::vector<double> d_nash2;
    double terminal_d_nash1 = 0.0;
    double terminal_d_nash2 = 0.0;
    std::optional<double> tau_half_nash1;
    std::optional<double> tau_half_nash2;
    /// tau toward whichever equilibrium the terminal state is closer to.
    std::optional<double> tau_half;
    AngularMomentumSet L;
    double L_strength = 0.0;
    Selection selected = Selection::undecided;
};

/// Computes every observable of one run against the two reference
/// equilibria.
MetricsReport evaluate_trajectory(const Trajectory& traj, const Eigen::VectorXd& nash1,
                                  const Eigen::VectorXd& nash2, const MetricsOptions& options = {});

}  // namespace gamectl
