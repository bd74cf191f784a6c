#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gamectl/dynamics.hpp"
#include "gamectl/game.hpp"

namespace testing {

// J°(Nash_1) of the built-in game, in ninths.
inline Eigen::MatrixXd ninths_jacobian_nash1() {
    Eigen::MatrixXd J(5, 5);
    J << -4, -4, 2, 1, 1,
          2, -4, -4, -5, 7,
         -4, 2, -4, 7, 4,
          0, 0, 0, -9, 0,
          0, 0, 0, 0, -18;
    return J / 9.0;
}

struct GainRow {
    double b;
    std::array<double, 5> k;
};

// Reference gains for B = (0,0,0,1,1).
inline const std::vector<GainRow>& gain_table_rows() {
    static const std::vector<GainRow> rows{
        {-0.8, {0.5247, 0.9485, -1.4732, -1.8335, 0.2335}},
        {-0.6, {0.4843, 0.5524, -1.0368, -1.3232, 0.1232}},
        {-0.4, {0.3834, 0.2623, -0.6458, -0.8476, 0.0476}},
        {-0.2, {0.2220, 0.0782, -0.3002, -0.4065, 0.0065}},
        {0.0, {0, 0, 0, 0, 0}},
        {0.2, {-0.2825, 0.0277, 0.2548, 0.3719, 0.0281}},
        {0.4, {-0.6256, 0.1614, 0.4641, 0.7092, 0.0908}},
        {0.6, {-1.0292, 0.4011, 0.6281, 1.0119, 0.1881}},
        {0.8, {-1.4933, 0.7467, 0.7467, 1.2800, 0.3200}},
    };
    return rows;
}

inline std::vector<std::complex<double>> shifted_nash1_spectrum(double b) {
    const double s3 = std::sqrt(3.0) / 3.0;
    return {{-1.0 / 3.0 + b, s3}, {-1.0 / 3.0 + b, -s3}, {-2.0 / 3.0, 0}, {-1, 0}, {-2, 0}};
}

// Uniform sample from the interior of the simplex (flat Dirichlet), kept
// at least `floor` away from the faces.
inline Eigen::VectorXd random_interior(std::mt19937_64& gen, std::size_t n, double floor = 1e-3) {
    std::exponential_distribution<double> e(1.0);
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (auto& v : x) v = e(gen) + floor;
    return x / x.sum();
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& gen, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::MatrixXd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (auto& v : M.reshaped()) v = u(gen);
    return M;
}

inline gamectl::PayoffMatrix random_game(std::mt19937_64& gen, std::size_t n) {
    std::uniform_int_distribution<int> u(-4, 4);
    std::vector<gamectl::Rational> e;
    for (std::size_t i = 0; i < n * n; ++i) e.emplace_back(u(gen), 2);
    return gamectl::PayoffMatrix(n, std::move(e));
}

template <class F>
Eigen::MatrixXd central_difference(F&& f, const Eigen::VectorXd& x, double h = 1e-6) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd J(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        J.col(j) = (f(xp) - f(xm)) / (2 * h);
    }
    return J;
}

}  // namespace testing
