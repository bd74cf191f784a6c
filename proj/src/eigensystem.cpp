#include "gamectl/eigensystem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "gamectl/error.hpp"

namespace gamectl {

namespace {

bool spectral_order(const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

}  // namespace

EigenSystem eig(const Eigen::MatrixXd& J) {
    if (J.rows() != J.cols()) throw Error(ErrorKind::dimension, "eig needs a square matrix");
    if (J.rows() > 20) throw Error(ErrorKind::dimension, "eig is meant for small matrices (n <= 20)");
    const Eigen::Index n = J.rows();

    Eigen::EigenSolver<Eigen::MatrixXd> solver(J, true);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::numerical, "eigenvalue iteration did not converge");
    }
    const Eigen::VectorXcd values = solver.eigenvalues();
    const Eigen::MatrixXcd vectors = solver.eigenvectors();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return spectral_order(values[a], values[b]); });

    EigenSystem es;
    es.right_vectors.resize(n, n);
    const Eigen::MatrixXcd Jc = J.cast<Complex>();
    for (Eigen::Index k = 0; k < n; ++k) {
        const Complex lambda = values[order[static_cast<std::size_t>(k)]];
        Eigen::VectorXcd v = vectors.col(order[static_cast<std::size_t>(k)]);
        const double norm = v.norm();
        if (norm > 0) v /= norm;
        Eigen::Index big = 0;
        v.cwiseAbs().maxCoeff(&big);
        if (std::abs(v[big]) > 0) v *= std::conj(v[big]) / std::abs(v[big]);
        v[big] = Complex(v[big].real(), 0.0);

        es.eigenvalues.push_back(lambda);
        es.right_vectors.col(k) = v;
        es.max_residual = std::max(es.max_residual, (Jc * v - lambda * v).lpNorm<Eigen::Infinity>());
    }

    const double scale = std::max(1.0, J.lpNorm<Eigen::Infinity>());
    if (!std::isfinite(es.max_residual) || es.max_residual > 1e-6 * scale) {
        std::ostringstream os;
        os << "eigen-decomposition is inaccurate: max residual ||Jv - λv|| = " << es.max_residual;
        throw Error(ErrorKind::numerical, os.str());
    }

    Eigen::FullPivLU<Eigen::MatrixXcd> lu(es.right_vectors);
    if (lu.isInvertible() && lu.rcond() > 1e-10) es.left_vectors = lu.inverse();
    return es;
}

std::vector<Complex> spectrum(const Eigen::MatrixXd& J) {
    if (J.rows() != J.cols()) throw Error(ErrorKind::dimension, "spectrum needs a square matrix");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(J, false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::numerical, "eigenvalue iteration did not converge");
    }
    std::vector<Complex> out(solver.eigenvalues().begin(), solver.eigenvalues().end());
    std::stable_sort(out.begin(), out.end(), spectral_order);
    return out;
}

bool payoff_eigen_check(const Eigen::MatrixXd& J, const Eigen::VectorXd& rest_point, double payoff, double tol) {
    if (J.rows() != J.cols() || J.rows() != rest_point.size()) return false;
    const Eigen::RowVectorXd ones = Eigen::RowVectorXd::Ones(J.cols());
    const bool left = (ones * J + payoff * ones).lpNorm<Eigen::Infinity>() <= tol;
    const bool right = (J * rest_point + payoff * rest_point).lpNorm<Eigen::Infinity>() <= tol;
    return left && right;
}

double PairValues::value(std::size_t m, std::size_t n) const {
    if (m == n) return 0.0;
    const bool swapped = m > n;
    if (swapped) std::swap(m, n);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (pairs[k].first == m && pairs[k].second == n) return swapped ? -values[k] : values[k];
    }
    throw Error(ErrorKind::dimension, "index pair outside the eigencycle set");
}

EigencycleSet eigencycles(const Eigen::VectorXcd& v) {
    EigencycleSet set;
    const auto n = static_cast<std::size_t>(v.size());
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t k = m + 1; k < n; ++k) {
            set.pairs.emplace_back(m, k);
            set.values.push_back(
                (std::conj(v[static_cast<Eigen::Index>(m)]) * v[static_cast<Eigen::Index>(k)]).imag());
        }
    }
    return set;
}

double squared_mass_fraction(const PairValues& set, const std::vector<std::size_t>& group) {
    double inside = 0.0, total = 0.0;
    for (std::size_t k = 0; k < set.pairs.size(); ++k) {
        const double sq = set.values[k] * set.values[k];
        total += sq;
        const bool in_m = std::find(group.begin(), group.end(), set.pairs[k].first) != group.end();
        const bool in_n = std::find(group.begin(), group.end(), set.pairs[k].second) != group.end();
        if (in_m && in_n) inside += sq;
    }
    return total > 0.0 ? inside / total : 0.0;
}

EigencycleSet rotation_eigencycles(const EigenSystem& es, std::size_t index) {
    Eigen::VectorXcd v = es.vector(index);
    if (es.eigenvalues.at(index).imag() > 0) v = v.conjugate().eval();
    return eigencycles(v);
}

std::optional<std::size_t> first_complex_index(const EigenSystem& es, double tol) {
    for (std::size_t i = 0; i < es.size(); ++i) {
        if (std::abs(es.eigenvalues[i].imag()) > tol) return i;
    }
    return std::nullopt;
}

double spectrum_mismatch(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    const std::size_t n = a.size();
    std::vector<bool> used_a(n, false), used_b(n, false);
    double worst = 0.0;
    // Repeatedly take the globally closest unmatched pair. For two
    // conjugate-closed spectra this pairs mirror images with mirror images.
    for (std::size_t round = 0; round < n; ++round) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (used_a[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (used_b[j]) continue;
                const double d = std::abs(a[i] - b[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        used_a[bi] = used_b[bj] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace gamectl
