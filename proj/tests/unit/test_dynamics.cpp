#include <doctest.h>

#include "gamectl/control.hpp"
#include "gamectl/dynamics.hpp"
#include "gamectl/error.hpp"
#include "support.hpp"

using namespace gamectl;

namespace {

Equilibrium nash1_eq() {
    return Equilibrium{paper_nash1(), {0, 1, 2}, 2.0 / 3.0, Equilibrium::Kind::interior_of_support};
}

Controller random_controller(std::mt19937_64& gen, std::size_t n, TaxMode mode) {
    std::uniform_real_distribution<double> u(-2, 2);
    Eigen::VectorXd B(static_cast<Eigen::Index>(n));
    Eigen::RowVectorXd K(static_cast<Eigen::Index>(n));
    for (auto& v : B) v = u(gen);
    for (auto& v : K) v = u(gen);
    return Controller{B, K, 0.0, mode, Equilibrium{SimplexState::uniform(n), {}, 0.0}};
}

}  // namespace

TEST_CASE("replicator Jacobian at Nash_1 equals the ninths matrix") {
    const Eigen::MatrixXd J = jacobian_replicator(paper_game(), paper_nash1().values());
    CHECK((J - testing::ninths_jacobian_nash1()).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("rest points") {
    const auto A = paper_game();
    CHECK(replicator_field(A, paper_nash1().values()).lpNorm<Eigen::Infinity>() <= 1e-15);
    CHECK(replicator_field(A, paper_nash2().values()).lpNorm<Eigen::Infinity>() <= 1e-15);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(replicator_field(A, SimplexState::vertex(5, i).values()).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("per-agent adjustment by direct substitution") {
    Eigen::VectorXd B(5);
    B << 0, 0, 0, 1, 1;
    Eigen::RowVectorXd K = Eigen::RowVectorXd::Zero(5);
    K[3] = 1.0;
    const Controller c{B, K, 0.0, TaxMode::plain, nash1_eq()};
    const Eigen::VectorXd adj = per_agent_adjustment(c, paper_nash2().values());
    Eigen::VectorXd expected(5);
    expected << -0.5, -0.5, -0.5, 0.5, 0.5;  // Kx = 1/2, tax = -1/2, reward 1·(1/2)/(1/2)
    CHECK((adj - expected).norm() <= 1e-15);

    const Controller cs{B, K, 0.0, TaxMode::channel_sum, nash1_eq()};
    Eigen::VectorXd expected_cs(5);
    expected_cs << -1, -1, -1, 0, 0;
    CHECK((per_agent_adjustment(cs, paper_nash2().values()) - expected_cs).norm() <= 1e-15);
}

TEST_CASE("adjustment skips extinct strategies") {
    Eigen::VectorXd B(3);
    B << 1, 0, 0;
    const Controller c{B, Eigen::RowVector3d(0, 1, 0), 0.0, TaxMode::channel_sum,
                       Equilibrium{SimplexState::uniform(3), {}, 0.0}};
    const Eigen::VectorXd adj = per_agent_adjustment(c, Eigen::Vector3d(0, 1, 0));
    CHECK(adj[0] == doctest::Approx(-1.0));
    CHECK(std::isfinite(adj[0]));
}

TEST_CASE("analytic Jacobians match central differences (100 random points)") {
    std::mt19937_64 gen(3);
    const auto A = paper_game();
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXd x = testing::random_interior(gen, 5);
        const auto c = random_controller(gen, 5, trial % 2 ? TaxMode::plain : TaxMode::channel_sum);
        const Eigen::MatrixXd fd0 =
            testing::central_difference([&](const Eigen::VectorXd& y) { return replicator_field(A, y); }, x);
        const Eigen::MatrixXd fdc =
            testing::central_difference([&](const Eigen::VectorXd& y) { return controlled_field(A, y, c); }, x);
        CHECK((jacobian_replicator(A, x) - fd0).lpNorm<Eigen::Infinity>() <= 1e-5);
        CHECK((jacobian_controlled(A, x, c) - fdc).lpNorm<Eigen::Infinity>() <= 1e-5);
    }
}

TEST_CASE("tangency, payoff conservation and column sums (100 random inputs)") {
    std::mt19937_64 gen(5);
    const auto A = paper_game();
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXd x = testing::random_interior(gen, 5);
        auto c = random_controller(gen, 5, TaxMode::channel_sum);
        CHECK(std::abs(replicator_field(A, x).sum()) <= 1e-12);
        CHECK(std::abs(controlled_field(A, x, c).sum()) <= 1e-9);

        const Eigen::VectorXd Uc = payoffs(A, x) + per_agent_adjustment(c, x);
        CHECK(std::abs(x.dot(Uc) - mean_payoff(A, x)) <= 1e-9);

        // General form: columns shift by the tax, tangent directions are unaffected.
        const Eigen::MatrixXd J0 = jacobian_replicator(A, x);
        const Eigen::MatrixXd Jc = jacobian_controlled(A, x, c);
        const Eigen::RowVectorXd shift = Jc.colwise().sum() - J0.colwise().sum();
        CHECK((shift.array() - tax(c, x)).abs().maxCoeff() <= 1e-9);
        Eigen::VectorXd v = testing::random_interior(gen, 5) - x;
        CHECK(std::abs(Jc.colwise().sum().dot(v) - J0.colwise().sum().dot(v)) <= 1e-9);

        // With K·x = 0 the column sums agree exactly.
        c.K -= (c.K.dot(x) / x.squaredNorm()) * x.transpose();
        const Eigen::MatrixXd Jk = jacobian_controlled(A, x, c);
        CHECK((Jk.colwise().sum() - J0.colwise().sum()).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
}

TEST_CASE("plain tax mode breaks tangency when sum B != 1") {
    Eigen::VectorXd B(5);
    B << 0, 0, 0, 1, 1;
    const Controller c{B, Eigen::RowVectorXd::Ones(5), 0.0, TaxMode::plain, nash1_eq()};
    const Eigen::VectorXd x = SimplexState::uniform(5).values();
    CHECK(controlled_field(paper_game(), x, c).sum() == doctest::Approx(1.0));  // (ΣB - 1)·K·x
}

TEST_CASE("equilibrium conservation: K·x* = 0 leaves x* at rest") {
    std::mt19937_64 gen(8);
    const auto A = paper_game();
    const Eigen::VectorXd xs = paper_nash1().values();
    for (int trial = 0; trial < 100; ++trial) {
        auto c = random_controller(gen, 5, TaxMode::channel_sum);
        c.K -= (c.K.dot(xs) / xs.squaredNorm()) * xs.transpose();
        CHECK(controlled_field(A, xs, c).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
}

TEST_CASE("integrator keeps rest points and the simplex") {
    const auto A = paper_game();
    auto field = [&](const Eigen::VectorXd& x) { return replicator_field(A, x); };
    const auto rest = integrate(field, paper_nash1(), 0.01, 1.0);
    CHECK(rest.size() == 101);
    for (const auto& x : rest.states) CHECK((x - paper_nash1().values()).lpNorm<Eigen::Infinity>() <= 1e-9);

    const auto run = integrate(field, SimplexState::uniform(5), 0.01, 200.0);
    CHECK(run.size() == 20001);
    CHECK(run.times.back() == doctest::Approx(200.0));
    for (const auto& x : run.states) {
        CHECK(std::abs(x.sum() - 1.0) <= 1e-9);
        CHECK(x.minCoeff() >= 0.0);
    }
    const double d1 = (run.states.back() - paper_nash1().values()).norm();
    const double d2 = (run.states.back() - paper_nash2().values()).norm();
    CHECK(std::min(d1, d2) <= 1e-3);
}

TEST_CASE("integrator rejects bad steps") {
    const auto A = paper_game();
    auto field = [&](const Eigen::VectorXd& x) { return replicator_field(A, x); };
    CHECK_THROWS_AS(integrate(field, SimplexState::uniform(5), 0.0, 1.0), Error);
    CHECK_THROWS_AS(integrate(field, SimplexState::uniform(5), 0.1, 0.01), Error);
    // A push out of a face that matches the local velocity is projected.
    auto steep = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(x.size());
        v[0] = -50.0;
        v[1] = 50.0;
        return v;
    };
    const auto projected = integrate(steep, SimplexState::uniform(5), 0.1, 1.0);
    CHECK(projected.states.back()[0] == 0.0);
    CHECK(std::abs(projected.states.back().sum() - 1.0) <= 1e-12);
    // RK4 is unstable for this stiff pull at h = 0.1.
    auto stiff = [](const Eigen::VectorXd& x) {
        return Eigen::VectorXd(-100.0 * (x - SimplexState::uniform(5).values()));
    };
    try {
        integrate(stiff, SimplexState::vertex(5, 0), 0.1, 1.0);
        FAIL("expected an integration error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::integration);
    }
    CHECK_NOTHROW(integrate(stiff, SimplexState::vertex(5, 0), 0.01, 1.0));
}
