#include <doctest.h>

#include "gamectl/dynamics.hpp"
#include "gamectl/eigensystem.hpp"
#include "support.hpp"

using namespace gamectl;

TEST_CASE("spectrum at Nash_1 and Nash_2") {
    const auto A = paper_game();
    const auto es1 = eig(jacobian_replicator(A, paper_nash1().values()));
    CHECK(spectrum_mismatch(es1.eigenvalues, testing::shifted_nash1_spectrum(0.0)) <= 1e-9);
    // Ordering: pair first, +imag before -imag.
    CHECK(es1.eigenvalues[0].imag() > 0);
    CHECK(es1.eigenvalues[1].imag() < 0);

    const auto es2 = eig(jacobian_replicator(A, paper_nash2().values()));
    const std::vector<Complex> expected{0.0, -0.5, -0.5, -1.5, -1.5};
    CHECK(spectrum_mismatch(es2.eigenvalues, expected) <= 1e-9);
}

TEST_CASE("identity and residuals") {
    const auto es = eig(Eigen::MatrixXd::Identity(4, 4));
    for (const auto& l : es.eigenvalues) CHECK(std::abs(l - 1.0) <= 1e-14);
    CHECK(es.left_vectors.has_value());
}

TEST_CASE("random matrices: residuals, conjugate closure, unit vectors (100 samples)") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::MatrixXd J = testing::random_matrix(gen, 5, -2, 2);
        const auto es = eig(J);
        CHECK(es.max_residual < 1e-8);
        for (std::size_t i = 0; i < es.size(); ++i) {
            const Eigen::VectorXcd v = es.vector(i);
            CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
            CHECK(((J.cast<Complex>() * v) - es.eigenvalues[i] * v).lpNorm<Eigen::Infinity>() < 1e-8);
        }
        std::vector<Complex> conj;
        for (const auto& l : es.eigenvalues) conj.push_back(std::conj(l));
        CHECK(spectrum_mismatch(es.eigenvalues, conj) <= 1e-10);
        for (std::size_t i = 1; i < es.size(); ++i) {
            CHECK(es.eigenvalues[i - 1].real() >= es.eigenvalues[i].real());
        }
    }
}

TEST_CASE("payoff eigen check") {
    const auto A = paper_game();
    CHECK(payoff_eigen_check(jacobian_replicator(A, paper_nash1().values()), paper_nash1().values(), 2.0 / 3.0));
    CHECK(payoff_eigen_check(jacobian_replicator(A, paper_nash2().values()), paper_nash2().values(), 0.5));
    CHECK_FALSE(payoff_eigen_check(Eigen::MatrixXd::Identity(5, 5), SimplexState::uniform(5).values(), 1.0));
}

TEST_CASE("eigencycles of simple vectors") {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(5);
    v[0] = 1.0 / std::sqrt(2.0);
    v[1] = Complex(0, 1.0 / std::sqrt(2.0));
    const auto set = eigencycles(v);
    REQUIRE(set.pairs.size() == 10);
    CHECK(set.value(0, 1) == doctest::Approx(0.5));
    CHECK(set.value(1, 0) == doctest::Approx(-0.5));
    CHECK(set.value(2, 2) == 0.0);
    for (std::size_t k = 1; k < 10; ++k) CHECK(set.values[k] == 0.0);

    const auto real = eigencycles(Eigen::VectorXcd::Ones(5) / std::sqrt(5.0));
    for (double x : real.values) CHECK(x == 0.0);
}

TEST_CASE("rotating mode at Nash_1 lives on strategies 1-3") {
    const auto es = eig(jacobian_replicator(paper_game(), paper_nash1().values()));
    const auto idx = first_complex_index(es);
    REQUIRE(idx);
    const auto cyc = rotation_eigencycles(es, *idx);
    for (std::size_t k = 0; k < cyc.pairs.size(); ++k) {
        if (cyc.pairs[k].first >= 3 || cyc.pairs[k].second >= 3) CHECK(std::abs(cyc.values[k]) <= 1e-12);
    }
    // Orientation 1 -> 2 -> 3 -> 1.
    CHECK(cyc.value(0, 1) > 0);
    CHECK(cyc.value(0, 2) < 0);
    CHECK(cyc.value(1, 2) > 0);
    CHECK(squared_mass_fraction(cyc, {0, 1, 2}) == doctest::Approx(1.0));
}

TEST_CASE("rotation sign agrees with the linear flow") {
    // dx/dt = Jx for a planar rotation ccw in (0,1): L_01 of Re(v e^{λt})
    // must be positive.
    Eigen::MatrixXd J(2, 2);
    J << -0.1, -1.0, 1.0, -0.1;
    const auto es = eig(J);
    const auto cyc = rotation_eigencycles(es, 0);
    CHECK(cyc.value(0, 1) > 0);
}
