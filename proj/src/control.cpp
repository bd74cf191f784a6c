#include "gamectl/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gamectl/dynamics.hpp"
#include "gamectl/error.hpp"

namespace gamectl {

PoleTarget PoleTarget::from(std::vector<Complex> values, double tol) {
    std::vector<bool> used(values.size(), false);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (used[i]) continue;
        if (std::abs(values[i].imag()) <= tol) {
            used[i] = true;
            continue;
        }
        bool matched = false;
        for (std::size_t j = 0; j < values.size() && !matched; ++j) {
            if (j == i || used[j]) continue;
            if (std::abs(values[j] - std::conj(values[i])) <= tol) {
                used[i] = used[j] = matched = true;
            }
        }
        if (!matched) {
            std::ostringstream os;
            os << "pole target is not closed under conjugation: " << values[i] << " has no partner";
            throw Error(ErrorKind::dimension, os.str());
        }
    }
    return PoleTarget{std::move(values)};
}

std::string_view to_string(ShiftSelector s) {
    return s == ShiftSelector::complex_pair ? "complex_pair" : "trailing";
}

ShiftSelector parse_shift_selector(std::string_view text) {
    if (text == "complex_pair") return ShiftSelector::complex_pair;
    if (text == "trailing") return ShiftSelector::trailing;
    throw Error(ErrorKind::input, "unknown shift selector '" + std::string(text) +
                                      "' (expected complex_pair or trailing)");
}

PoleTarget desired_poles(const std::vector<Complex>& open_loop, double b, ShiftSelector selector) {
    if (!(b >= -1.0 && b <= 1.0)) {
        throw Error(ErrorKind::input, "pole shift b = " + std::to_string(b) + " is outside [-1, 1]");
    }
    const std::size_t n = open_loop.size();
    if (n < 2) throw Error(ErrorKind::dimension, "need at least two poles to shift");

    std::vector<bool> shifted(n, false);
    if (selector == ShiftSelector::trailing) {
        shifted[n - 2] = shifted[n - 1] = true;
    } else {
        std::optional<std::size_t> first;
        for (std::size_t i = 0; i < n && !first; ++i) {
            if (std::abs(open_loop[i].imag()) > 1e-9) first = i;
        }
        if (!first) throw Error(ErrorKind::input, "open-loop spectrum has no complex pair to shift");
        shifted[*first] = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != *first && std::abs(open_loop[j] - std::conj(open_loop[*first])) <= 1e-9) {
                shifted[j] = true;
                break;
            }
        }
    }

    std::vector<Complex> values = open_loop;
    for (std::size_t i = 0; i < n; ++i) {
        if (shifted[i]) values[i] += b;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!shifted[i] || b == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (!shifted[j] && std::abs(values[i] - values[j]) <= 1e-9) {
                std::ostringstream os;
                os << "shifted pole " << values[i] << " coincides with the untouched pole " << values[j];
                throw Error(ErrorKind::degenerate_target, os.str());
            }
        }
    }
    return PoleTarget::from(std::move(values));
}

Eigen::VectorXd effective_channel(const Eigen::VectorXd& B, const Eigen::VectorXd& anchor, TaxMode mode) {
    if (B.size() != anchor.size()) throw Error(ErrorKind::dimension, "channel and anchor lengths differ");
    const double scale = mode == TaxMode::channel_sum ? B.sum() : 1.0;
    Eigen::VectorXd eff = B - scale * anchor;
    if (eff.lpNorm<Eigen::Infinity>() <= 1e-12) {
        throw Error(ErrorKind::uncontrollable, "effective control channel is zero");
    }
    return eff;
}

namespace {

Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& J, const Eigen::VectorXd& b) {
    const Eigen::Index n = J.rows();
    Eigen::MatrixXd C(n, n);
    Eigen::VectorXd col = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        C.col(k) = col;
        col = J * col;
    }
    return C;
}

void check_shapes(const Eigen::MatrixXd& J, const Eigen::VectorXd& b, const PoleTarget& target) {
    if (J.rows() != J.cols() || J.rows() != b.size() ||
        static_cast<std::size_t>(J.rows()) != target.values.size()) {
        throw Error(ErrorKind::dimension, "pole placement inputs have inconsistent sizes");
    }
}

}  // namespace

std::size_t controllability_rank(const Eigen::MatrixXd& J, const Eigen::VectorXd& b, double tol) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(controllability_matrix(J, b));
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0) return 0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] > tol * s[0]) ++rank;
    }
    return rank;
}

Eigen::VectorXd characteristic_coefficients(const std::vector<Complex>& roots) {
    std::vector<Complex> c{1.0};
    for (const auto& r : roots) {
        std::vector<Complex> next(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k] += c[k];
            next[k + 1] -= r * c[k];
        }
        c = std::move(next);
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(c.size()));
    for (std::size_t k = 0; k < c.size(); ++k) out[static_cast<Eigen::Index>(k)] = c[k].real();
    return out;
}

Eigen::RowVectorXd place_poles_ackermann(const Eigen::MatrixXd& J, const Eigen::VectorXd& b,
                                         const PoleTarget& target) {
    check_shapes(J, b, target);
    const Eigen::Index n = J.rows();
    if (controllability_rank(J, b) < static_cast<std::size_t>(n)) {
        throw Error(ErrorKind::infeasible, "Ackermann's formula needs a controllable pair");
    }
    const Eigen::VectorXd q = characteristic_coefficients(target.values);
    // q(J) by Horner.
    Eigen::MatrixXd qJ = Eigen::MatrixXd::Identity(n, n) * q[0];
    for (Eigen::Index k = 1; k <= n; ++k) {
        qJ = J * qJ + q[k] * Eigen::MatrixXd::Identity(n, n);
    }
    const Eigen::MatrixXd C = controllability_matrix(J, b);
    const Eigen::MatrixXd X = C.fullPivLu().solve(qJ);
    // J - b·K_classic has the target spectrum; J + b·K wants K = -K_classic.
    return -X.row(n - 1);
}

Eigen::RowVectorXd place_poles(const Eigen::MatrixXd& J, const Eigen::VectorXd& b, const PoleTarget& target,
                               const std::optional<Eigen::VectorXd>& null_point) {
    check_shapes(J, b, target);
    const Eigen::Index n = J.rows();

    const Eigen::VectorXd p = characteristic_coefficients(spectrum(J));
    const Eigen::VectorXd q = characteristic_coefficients(target.values);

    // adj(sI - J) = sum_k N_k s^{n-1-k}, N_0 = I, N_k = J N_{k-1} + p_k I.
    // Matching the s^{n-1-k} coefficient gives (N_k b)·K = p_{k+1} - q_{k+1}.
    const Eigen::Index rows = n + (null_point ? 1 : 0);
    Eigen::MatrixXd M(rows, n);
    Eigen::VectorXd rhs(rows);
    Eigen::MatrixXd N = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        M.row(k) = (N * b).transpose();
        rhs[k] = p[k + 1] - q[k + 1];
        N = J * N + p[k + 1] * Eigen::MatrixXd::Identity(n, n);
    }
    if (null_point) {
        if (null_point->size() != n) throw Error(ErrorKind::dimension, "constraint point has the wrong length");
        M.row(n) = null_point->transpose();
        rhs[n] = 0.0;
    }

    const std::size_t ctrb = controllability_rank(J, b);
    if (ctrb < static_cast<std::size_t>(n) && !null_point) {
        throw Error(ErrorKind::infeasible, "controllability rank " + std::to_string(ctrb) + " < " +
                                               std::to_string(n) +
                                               "; the gain is not determined without an equilibrium constraint");
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
    cod.setThreshold(1e-10);
    const Eigen::VectorXd k = cod.solve(rhs);
    const double scale = std::max({1.0, M.lpNorm<Eigen::Infinity>(), rhs.lpNorm<Eigen::Infinity>()});
    const double residual = (M * k - rhs).lpNorm<Eigen::Infinity>();
    if (!k.allFinite() || residual > 1e-8 * scale) {
        std::ostringstream os;
        os << "pole placement is infeasible: coefficient system residual " << residual
           << " (controllability rank " << ctrb << " of " << n << ")";
        throw Error(ErrorKind::infeasible, os.str());
    }
    return k.transpose();
}

ControllerDesign build_controller(const PayoffMatrix& A, const Equilibrium& anchor, const Eigen::VectorXd& B,
                                  double b, const DesignOptions& options) {
    const Eigen::VectorXd& xs = anchor.point.values();
    if (static_cast<std::size_t>(B.size()) != A.size()) {
        throw Error(ErrorKind::dimension, "channel length does not match the game");
    }
    if (replicator_field(A, xs).lpNorm<Eigen::Infinity>() > 1e-9) {
        throw Error(ErrorKind::input, "anchor is not a rest point of the replicator field");
    }

    ControllerDesign d;
    const Eigen::MatrixXd J0 = jacobian_replicator(A, xs);
    d.open_loop = spectrum(J0);
    d.target = desired_poles(d.open_loop, b, options.selector);
    d.effective_channel = effective_channel(B, xs, options.tax_mode);
    d.controllability_rank = controllability_rank(J0, d.effective_channel);

    // A full-rank pair fixes K on its own and K·x* = 0 is checked afterwards.
    // Otherwise the constraint is what pins K down.
    std::optional<Eigen::VectorXd> constraint;
    if (d.controllability_rank < static_cast<std::size_t>(J0.rows())) constraint = xs;
    const Eigen::RowVectorXd K = place_poles(J0, d.effective_channel, d.target, constraint);

    d.controller = Controller{B, K, b, options.tax_mode, anchor};
    d.constraint_residual = std::abs(K.dot(xs));
    if (d.constraint_residual > options.constraint_tolerance) {
        std::ostringstream os;
        os << "equilibrium conservation violated: |K·x*| = " << d.constraint_residual;
        throw Error(ErrorKind::constraint, os.str());
    }

    d.closed_loop = spectrum(jacobian_controlled(A, xs, d.controller));
    d.pole_error = spectrum_mismatch(d.closed_loop, d.target.values);
    if (d.pole_error > options.pole_tolerance) {
        std::ostringstream os;
        os << "closed-loop spectrum misses the target by " << d.pole_error;
        throw Error(ErrorKind::numerical, os.str());
    }

    for (const auto& pole : d.target.values) {
        if (pole.real() >= -1e-9) {
            std::ostringstream os;
            os << (std::abs(pole.real()) <= 1e-9 ? "marginal" : "unstable") << " target pole " << pole.real()
               << (pole.imag() >= 0 ? "+" : "") << pole.imag() << "i: anchor is not asymptotically stable";
            d.warnings.push_back(os.str());
        }
    }
    return d;
}

Eigen::VectorXd paper_channel() {
    Eigen::VectorXd B(5);
    B << 0, 0, 0, 1, 1;
    return B;
}

std::vector<double> default_b_grid() {
    std::vector<double> grid;
    for (int i = -5; i <= 5; ++i) grid.push_back(i / 5.0);
    return grid;
}

}  // namespace gamectl
