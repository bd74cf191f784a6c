#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <boost/rational.hpp>

namespace gamectl {

using Rational = boost::rational<std::int64_t>;

/// Square payoff matrix of a one-population symmetric game.
///
/// Entries are held as exact rationals; `real()` is the floating-point view
/// used by the dynamics. Row i holds the payoff of strategy i against each
/// opponent strategy j.
class PayoffMatrix {
public:
    PayoffMatrix(std::size_t n, std::vector<Rational> entries,
                 std::vector<std::string> labels = {});

    static PayoffMatrix from_rows(const std::vector<std::vector<Rational>>& rows,
                                  std::vector<std::string> labels = {});

    std::size_t size() const noexcept { return n_; }
    const Rational& at(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
    const Eigen::MatrixXd& real() const noexcept { return real_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    double min_entry() const { return real_.minCoeff(); }
    double max_entry() const { return real_.maxCoeff(); }

    friend bool operator==(const PayoffMatrix& a, const PayoffMatrix& b) {
        return a.n_ == b.n_ && a.entries_ == b.entries_;
    }

private:
    std::size_t n_;
    std::vector<Rational> entries_;
    std::vector<std::string> labels_;
    Eigen::MatrixXd real_;
};

/// The 5-strategy game with a rock-paper-scissors face and an
/// anti-coordination face.
PayoffMatrix paper_game();

/// Parses n rows of n comma-separated entries. Entries may be integers,
/// decimals ("-0.25") or fractions ("2/3"); all are converted exactly.
/// Throws Error{input} with a line/column diagnostic on malformed input.
PayoffMatrix parse_game_csv(std::string_view text);
PayoffMatrix load_game_csv(const std::string& path);

/// Either "builtin:paper" or a path to a CSV file.
PayoffMatrix resolve_game(const std::string& spec);

Rational parse_rational(std::string_view token);

/// Probability vector over the strategies.
class SimplexState {
public:
    static constexpr double negative_slack = 1e-12;
    static constexpr double sum_tolerance = 1e-9;

    /// Validates and stores x. Throws Error{input} if x is not on the simplex.
    explicit SimplexState(Eigen::VectorXd x);

    static SimplexState uniform(std::size_t n);
    static SimplexState vertex(std::size_t n, std::size_t i);
    /// Clips negatives to zero and renormalizes before validating.
    static SimplexState project(Eigen::VectorXd x);

    std::size_t size() const noexcept { return static_cast<std::size_t>(x_.size()); }
    double operator[](std::size_t i) const { return x_[static_cast<Eigen::Index>(i)]; }
    const Eigen::VectorXd& values() const noexcept { return x_; }

    static bool is_valid(const Eigen::VectorXd& x);

private:
    Eigen::VectorXd x_;
};

/// Nash_1 = (1,1,1,0,0)/3 and Nash_2 = (0,0,0,1,1)/2 of `paper_game()`.
SimplexState paper_nash1();
SimplexState paper_nash2();

struct Equilibrium {
    enum class Kind { interior_of_support, vertex };

    SimplexState point = SimplexState::uniform(1);
    std::vector<std::size_t> support;  // 0-based strategy indices
    double expected_payoff = 0.0;
    Kind kind = Kind::interior_of_support;
};

Eigen::VectorXd payoffs(const PayoffMatrix& A, const Eigen::VectorXd& x);
double mean_payoff(const PayoffMatrix& A, const Eigen::VectorXd& x);

/// Support enumeration over all 2^n - 1 supports (n <= 10).
///
/// For each support S the indifference system (A x)_i = c for i in S,
/// sum x = 1, x = 0 off S is solved. Singular systems that are still
/// consistent contribute their minimum-norm solution; inconsistent ones are
/// skipped. Candidates with x >= -tol on S and no profitable deviation off
/// S are kept; points closer than 1e-7 in the max-norm are merged.
std::vector<Equilibrium> find_equilibria(const PayoffMatrix& A, double tol = 1e-9);

bool is_nash(const PayoffMatrix& A, const Eigen::VectorXd& x, double tol = 1e-9);

/// Looks up the equilibrium nearest to `point` (max-norm) among `eqs`.
const Equilibrium* nearest_equilibrium(const std::vector<Equilibrium>& eqs,
                                       const Eigen::VectorXd& point,
                                       double within = 1e-6);

}  // namespace gamectl
