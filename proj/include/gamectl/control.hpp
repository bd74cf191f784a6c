#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gamectl/controller.hpp"
#include "gamectl/eigensystem.hpp"
#include "gamectl/game.hpp"

namespace gamectl {

/// Desired closed-loop spectrum; always closed under conjugation.
struct PoleTarget {
    std::vector<Complex> values;

    /// Throws Error{dimension} when `values` is not conjugate-closed.
    static PoleTarget from(std::vector<Complex> values, double tol = 1e-9);
};

/// Which open-loop poles the shift parameter b moves.
///
/// complex_pair: the real part of the first conjugate pair (the rotating
///               mode at Nash_1) becomes Re λ + b. This is the default.
/// trailing:     the last two entries of the descending-real-part sort
///               (the two most negative poles at Nash_1).
enum class ShiftSelector { complex_pair, trailing };

std::string_view to_string(ShiftSelector s);
ShiftSelector parse_shift_selector(std::string_view text);

/// Applies λᶜ = λ° + b·mask. `open_loop` must be in eig() order and b in
/// [-1, 1]. Throws Error{degenerate_target} if a shifted pole lands within
/// 1e-9 of an untouched one.
PoleTarget desired_poles(const std::vector<Complex>& open_loop, double b,
                         ShiftSelector selector = ShiftSelector::complex_pair);

/// Channel seen by the linearization once the tax is folded in:
/// B - (sum B)·x* for channel_sum, B - x* for plain.
/// Throws Error{uncontrollable} if it vanishes.
Eigen::VectorXd effective_channel(const Eigen::VectorXd& B, const Eigen::VectorXd& anchor, TaxMode mode);

/// Numerical rank of [b, Jb, ..., J^{n-1}b] relative to its largest
/// singular value.
std::size_t controllability_rank(const Eigen::MatrixXd& J, const Eigen::VectorXd& b, double tol = 1e-8);

/// Real coefficients (monic, highest degree first) of prod (s - r).
Eigen::VectorXd characteristic_coefficients(const std::vector<Complex>& roots);

/// Ackermann's formula for the closed loop J + b·K. Requires full
/// controllability rank.
Eigen::RowVectorXd place_poles_ackermann(const Eigen::MatrixXd& J, const Eigen::VectorXd& b,
                                         const PoleTarget& target);

/// Solves for K by matching characteristic-polynomial coefficients:
///   det(sI - J - bK) = p(s) - K·adj(sI - J)·b
/// which is linear in K. The optional `null_point` adds the row K·x* = 0,
/// which makes K unique when a mode orthogonal to the channel cannot be
/// moved (and is not asked to move).
///
/// Throws Error{infeasible} when the (augmented) system is inconsistent, or
/// when it is rank deficient and no `null_point` is given.
Eigen::RowVectorXd place_poles(const Eigen::MatrixXd& J, const Eigen::VectorXd& b, const PoleTarget& target,
                               const std::optional<Eigen::VectorXd>& null_point = std::nullopt);

/// A designed controller together with the checks that were run on it.
struct ControllerDesign {
    Controller controller;
    std::vector<Complex> open_loop;
    PoleTarget target;
    std::vector<Complex> closed_loop;  // spectrum of jacobian_controlled at the anchor
    Eigen::VectorXd effective_channel;
    std::size_t controllability_rank = 0;
    double pole_error = 0.0;  // spectrum_mismatch(closed_loop, target)
    double constraint_residual = 0.0;  // |K·x*|
    std::vector<std::string> warnings;
};

struct DesignOptions {
    TaxMode tax_mode = TaxMode::channel_sum;
    ShiftSelector selector = ShiftSelector::complex_pair;
    double constraint_tolerance = 1e-6;
    double pole_tolerance = 1e-6;
};

/// J° at the anchor -> eig -> desired_poles -> effective_channel ->
/// place_poles, then verifies |K·x*| and the closed-loop spectrum.
///
/// A target pole with non-negative real part is allowed (it is how the
/// anchor gets destabilized) and is reported as a warning.
ControllerDesign build_controller(const PayoffMatrix& A, const Equilibrium& anchor, const Eigen::VectorXd& B,
                                  double b, const DesignOptions& options = {});

/// B = [0 0 0 1 1]ᵀ, rewarding the anti-coordination strategies.
Eigen::VectorXd paper_channel();

/// b = -1, -0.8, ..., 1.
std::vector<double> default_b_grid();

}  // namespace gamectl
