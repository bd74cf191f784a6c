#include "gamectl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gamectl/error.hpp"

namespace gamectl {

std::string_view to_string(TaxMode mode) {
    return mode == TaxMode::channel_sum ? "channel_sum" : "plain";
}

TaxMode parse_tax_mode(std::string_view text) {
    if (text == "channel_sum") return TaxMode::channel_sum;
    if (text == "plain") return TaxMode::plain;
    throw Error(ErrorKind::input, "unknown tax mode '" + std::string(text) + "' (expected channel_sum or plain)");
}

double Controller::tax_scale() const {
    return tax_mode == TaxMode::channel_sum ? B.sum() : 1.0;
}

Controller zero_controller(const Eigen::VectorXd& B, const Equilibrium& anchor, TaxMode mode) {
    return Controller{B, Eigen::RowVectorXd::Zero(B.size()), 0.0, mode, anchor};
}

namespace {

void check_controller(const Controller& c, const Eigen::VectorXd& x) {
    if (c.B.size() != x.size() || c.K.size() != x.size()) {
        throw Error(ErrorKind::dimension, "controller B/K length does not match the state dimension");
    }
}

}  // namespace

Eigen::VectorXd replicator_field(const PayoffMatrix& A, const Eigen::VectorXd& x) {
    const Eigen::VectorXd U = payoffs(A, x);
    const double mean = x.dot(U);
    return x.cwiseProduct((U.array() - mean).matrix());
}

double tax(const Controller& c, const Eigen::VectorXd& x) {
    return -c.tax_scale() * c.feedback(x);
}

Eigen::VectorXd controlled_field(const PayoffMatrix& A, const Eigen::VectorXd& x, const Controller& c) {
    check_controller(c, x);
    const double kx = c.feedback(x);
    return replicator_field(A, x) + c.B * kx + tax(c, x) * x;
}

Eigen::VectorXd per_agent_adjustment(const Controller& c, const Eigen::VectorXd& x) {
    check_controller(c, x);
    const double kx = c.feedback(x);
    const double t = tax(c, x);
    Eigen::VectorXd adj = Eigen::VectorXd::Constant(x.size(), t);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (x[j] > population_epsilon) adj[j] += c.B[j] * kx / x[j];
    }
    return adj;
}

Eigen::MatrixXd jacobian_replicator(const PayoffMatrix& A, const Eigen::VectorXd& x) {
    const Eigen::MatrixXd& M = A.real();
    const Eigen::VectorXd U = payoffs(A, x);
    const double mean = x.dot(U);
    const Eigen::VectorXd ATx = M.transpose() * x;
    // d Ū / d x_j = U_j + (Aᵀx)_j
    const Eigen::RowVectorXd grad_mean = (U + ATx).transpose();
    Eigen::MatrixXd J = x.asDiagonal() * (M - Eigen::VectorXd::Ones(x.size()) * grad_mean);
    J.diagonal() += (U.array() - mean).matrix();
    return J;
}

Eigen::MatrixXd jacobian_controlled(const PayoffMatrix& A, const Eigen::VectorXd& x, const Controller& c) {
    check_controller(c, x);
    Eigen::MatrixXd J = jacobian_replicator(A, x);
    J += (c.B - c.tax_scale() * x) * c.K;
    J.diagonal().array() += tax(c, x);
    return J;
}

Trajectory integrate(const VelocityField& field, const SimplexState& x0, double h, double horizon) {
    if (!(h > 0.0)) throw Error(ErrorKind::input, "step size must be positive");
    if (!(horizon >= h)) throw Error(ErrorKind::input, "horizon must be at least one step");
    constexpr double leave_tolerance = 1e-6;

    const auto steps = static_cast<std::size_t>(std::llround(horizon / h));
    Trajectory traj;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.meta.step = h;

    Eigen::VectorXd x = x0.values();
    traj.times.push_back(0.0);
    traj.states.push_back(x);
    for (std::size_t s = 1; s <= steps; ++s) {
        const Eigen::VectorXd k1 = field(x);
        const Eigen::VectorXd k2 = field(x + 0.5 * h * k1);
        const Eigen::VectorXd k3 = field(x + 0.5 * h * k2);
        const Eigen::VectorXd k4 = field(x + h * k3);
        Eigen::VectorXd next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double drift = std::abs(next.sum() - 1.0);
        const double low = next.minCoeff();
        // B_j K.x does not vanish with x_j, so faces are not invariant.
        double overshoot = 0.0;
        for (Eigen::Index j = 0; j < next.size(); ++j) {
            const double euler = std::min(0.0, x[j] + h * k1[j]);
            overshoot = std::max(overshoot, 2.0 * euler - next[j]);
        }
        if (!next.allFinite() || (low < -leave_tolerance && overshoot > leave_tolerance) || drift > leave_tolerance) {
            std::ostringstream os;
            os << "integration left the simplex at t = " << static_cast<double>(s) * h
               << " (min component " << low << ", sum drift " << drift
               << "); try a smaller step than h = " << h;
            throw Error(ErrorKind::integration, os.str());
        }
        next = next.cwiseMax(0.0);
        next /= next.sum();
        x = std::move(next);
        traj.times.push_back(static_cast<double>(s) * h);
        traj.states.push_back(x);
    }
    return traj;
}

}  // namespace gamectl
