#include "gamectl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "gamectl/error.hpp"

namespace gamectl {

std::span<const Eigen::VectorXd> tail_window(const Trajectory& traj, double discard_fraction) {
    if (!(discard_fraction >= 0.0 && discard_fraction < 1.0)) {
        throw Error(ErrorKind::input, "discard fraction must lie in [0, 1)");
    }
    const std::size_t n = traj.states.size();
    if (n == 0) throw Error(ErrorKind::input, "empty trajectory");
    auto skip = static_cast<std::size_t>(std::floor(discard_fraction * static_cast<double>(n)));
    skip = std::min(skip, n - 1);
    return std::span<const Eigen::VectorXd>(traj.states).subspan(skip);
}

Eigen::VectorXd mean_distribution(const Trajectory& traj, double discard_fraction) {
    const auto window = tail_window(traj, discard_fraction);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(window.front().size());
    for (const auto& x : window) sum += x;
    return sum / static_cast<double>(window.size());
}

std::vector<double> distance_series(const Trajectory& traj, const Eigen::VectorXd& target) {
    std::vector<double> d;
    d.reserve(traj.states.size());
    for (const auto& x : traj.states) {
        if (x.size() != target.size()) throw Error(ErrorKind::dimension, "state and target lengths differ");
        d.push_back((x - target).norm());
    }
    return d;
}

std::optional<double> half_time(std::span<const double> times, std::span<const double> d, double threshold) {
    if (times.size() != d.size()) throw Error(ErrorKind::dimension, "time and distance series lengths differ");
    if (d.empty()) return std::nullopt;
    if (d[0] <= threshold) return times[0];
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (d[i] <= threshold) {
            const double frac = (d[i - 1] - threshold) / (d[i - 1] - d[i]);
            return times[i - 1] + frac * (times[i] - times[i - 1]);
        }
    }
    return std::nullopt;
}

double angular_momentum(std::span<const Eigen::VectorXd> states, std::size_t m, std::size_t n,
                        const Eigen::VectorXd* center) {
    if (states.size() < 2) throw Error(ErrorKind::input, "angular momentum needs at least two samples");
    const auto dim = static_cast<std::size_t>(states.front().size());
    if (m >= dim || n >= dim) throw Error(ErrorKind::dimension, "plane index out of range");
    const auto im = static_cast<Eigen::Index>(m);
    const auto in = static_cast<Eigen::Index>(n);
    const double cm = center ? (*center)[im] : 0.0;
    const double cn = center ? (*center)[in] : 0.0;
    double sum = 0.0;
    for (std::size_t t = 0; t + 1 < states.size(); ++t) {
        const double am = states[t][im] - cm, an = states[t][in] - cn;
        const double bm = states[t + 1][im] - cm, bn = states[t + 1][in] - cn;
        sum += am * bn - an * bm;
    }
    return sum / static_cast<double>(states.size() - 1);
}

AngularMomentumSet angular_momenta(std::span<const Eigen::VectorXd> states, const Eigen::VectorXd* center) {
    if (states.empty()) throw Error(ErrorKind::input, "empty state window");
    AngularMomentumSet set;
    const auto dim = static_cast<std::size_t>(states.front().size());
    for (std::size_t m = 0; m < dim; ++m) {
        for (std::size_t n = m + 1; n < dim; ++n) {
            set.pairs.emplace_back(m, n);
            set.values.push_back(angular_momentum(states, m, n, center));
        }
    }
    return set;
}

double cycle_strength(std::span<const double> L) {
    double s = 0.0;
    for (double v : L) s += v * v;
    return std::sqrt(s);
}

std::string_view to_string(Selection s) {
    switch (s) {
        case Selection::nash1: return "Nash_1";
        case Selection::nash2: return "Nash_2";
        case Selection::undecided: return "undecided";
    }
    return "undecided";
}

Selection parse_selection(std::string_view text) {
    if (text == "Nash_1") return Selection::nash1;
    if (text == "Nash_2") return Selection::nash2;
    if (text == "undecided") return Selection::undecided;
    throw Error(ErrorKind::input, "unknown selection tag '" + std::string(text) + "'");
}

MetricsReport evaluate_trajectory(const Trajectory& traj, const Eigen::VectorXd& nash1,
                                  const Eigen::VectorXd& nash2, const MetricsOptions& options) {
    if (!(options.terminal_window >= 0.0 && options.terminal_window < 1.0)) {
        throw Error(ErrorKind::input, "terminal window must lie in [0, 1)");
    }
    MetricsReport r;
    r.mean_distribution = mean_distribution(traj, options.discard_fraction);
    r.d_nash1 = distance_series(traj, nash1);
    r.d_nash2 = distance_series(traj, nash2);

    const Eigen::VectorXd terminal =
        options.terminal_window > 0.0 ? mean_distribution(traj, 1.0 - options.terminal_window) : traj.states.back();
    r.terminal_d_nash1 = (terminal - nash1).norm();
    r.terminal_d_nash2 = (terminal - nash2).norm();
    if (r.terminal_d_nash1 < options.selection_threshold && r.terminal_d_nash1 <= r.terminal_d_nash2) {
        r.selected = Selection::nash1;
    } else if (r.terminal_d_nash2 < options.selection_threshold) {
        r.selected = Selection::nash2;
    }

    r.tau_half_nash1 = half_time(traj.times, r.d_nash1, options.nash1_threshold);
    r.tau_half_nash2 = half_time(traj.times, r.d_nash2, options.nash2_threshold);
    r.tau_half = r.terminal_d_nash1 <= r.terminal_d_nash2 ? r.tau_half_nash1 : r.tau_half_nash2;

    r.L = angular_momenta(tail_window(traj, options.discard_fraction));
    r.L_strength = cycle_strength(r.L.values);
    return r;
}

}  // namespace gamectl
