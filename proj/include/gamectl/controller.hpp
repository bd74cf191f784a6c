#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "gamectl/game.hpp"

namespace gamectl {

/// How the budget-balancing tax scales with the reward.
///
/// channel_sum: T = -(sum_m B_m)(K·x). Budget balanced; keeps the field
///              tangent to the simplex.
/// plain:       T = -(K·x). Balanced only when sum_m B_m = 1.
enum class TaxMode { channel_sum, plain };

std::string_view to_string(TaxMode mode);
TaxMode parse_tax_mode(std::string_view text);

/// State feedback acting on payoffs: strategies on channel B receive the
/// reward B(K·x), every agent pays the uniform tax T(x).
///
/// The closed loop linearizes to J° + B·K + T (note the plus sign, unlike
/// the textbook J - BK).
struct Controller {
    Eigen::VectorXd B;  // n×1 channel
    Eigen::RowVectorXd K;  // 1×n gain
    double b = 0.0;  // pole-shift parameter the gain was designed for
    TaxMode tax_mode = TaxMode::channel_sum;
    Equilibrium anchor;  // equilibrium whose poles are assigned

    /// sum_m B_m in channel_sum mode, 1 in plain mode.
    double tax_scale() const;
    double feedback(const Eigen::VectorXd& x) const { return K.dot(x); }
};

/// K = 0 on the given channel: the uncontrolled field.
Controller zero_controller(const Eigen::VectorXd& B, const Equilibrium& anchor,
                           TaxMode mode = TaxMode::channel_sum);

}  // namespace gamectl
