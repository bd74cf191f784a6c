#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gamectl {

using Complex = std::complex<double>;

/// Spectrum of a real square matrix with paired right eigenvectors.
///
/// Eigenvalues are sorted by descending real part, ties by descending
/// imaginary part, so a conjugate pair appears as (α + iω, α - iω). Each
/// column of `right_vectors` has unit 2-norm and its largest-magnitude
/// component is real and positive.
struct EigenSystem {
    std::vector<Complex> eigenvalues;
    Eigen::MatrixXcd right_vectors;
    std::optional<Eigen::MatrixXcd> left_vectors;  // rows; present when V is invertible
    double max_residual = 0.0;  // max over pairs of ||J v - λ v||_inf

    std::size_t size() const noexcept { return eigenvalues.size(); }
    Eigen::VectorXcd vector(std::size_t i) const { return right_vectors.col(static_cast<Eigen::Index>(i)); }
};

EigenSystem eig(const Eigen::MatrixXd& J);

/// Eigenvalues only, same ordering as eig().
std::vector<Complex> spectrum(const Eigen::MatrixXd& J);

/// Checks that 1ᵀ is a left eigenvector and x* a right eigenvector of J,
/// both with eigenvalue -payoff.
bool payoff_eigen_check(const Eigen::MatrixXd& J, const Eigen::VectorXd& rest_point, double payoff,
                        double tol = 1e-8);

/// One real value per coordinate plane (m, n), m < n, of an n-strategy
/// space: C(n, 2) entries in lexicographic order.
struct PairValues {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // 0-based (m, n), m < n
    std::vector<double> values;

    /// Antisymmetric lookup: value(n, m) = -value(m, n), value(m, m) = 0.
    double value(std::size_t m, std::size_t n) const;
};

/// Rotation strength of a complex eigenvector in each coordinate plane.
using EigencycleSet = PairValues;

/// value(m, n) = Im(conj(v_m) v_n) for every m < n.
EigencycleSet eigencycles(const Eigen::VectorXcd& v);

/// Sum of squared values over pairs with both indices in `group`, divided
/// by the total sum of squares (0 when everything vanishes).
double squared_mass_fraction(const PairValues& set, const std::vector<std::size_t>& group);

/// Eigencycles oriented like a measured angular momentum.
///
/// A conjugate pair α ± iω generates the real motion Re(v e^{(α+iω)t}). Its
/// rotation in the (m, n) plane has the sign of Im(v_m conj(v_n)), i.e. of
/// the eigencycle of the partner vector conj(v). This picks the member of
/// the pair with negative imaginary part so that positive values mean
/// counter-clockwise motion from axis m towards axis n.
EigencycleSet rotation_eigencycles(const EigenSystem& es, std::size_t index);

/// Index of the first eigenvalue with |Im| > tol, if any.
std::optional<std::size_t> first_complex_index(const EigenSystem& es, double tol = 1e-9);

/// Greedy nearest pairing of two spectra (conjugate pairs stay together).
/// Returns the largest distance between matched eigenvalues, or +inf when
/// the sizes differ.
double spectrum_mismatch(const std::vector<Complex>& a, const std::vector<Complex>& b);

}  // namespace gamectl
