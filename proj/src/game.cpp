#include "gamectl/game.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "gamectl/error.hpp"

namespace gamectl {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::dimension: return "dimension";
        case ErrorKind::input: return "input";
        case ErrorKind::numerical: return "numerical";
        case ErrorKind::integration: return "integration";
        case ErrorKind::degenerate_target: return "degenerate_target";
        case ErrorKind::uncontrollable: return "uncontrollable";
        case ErrorKind::infeasible: return "infeasible";
        case ErrorKind::constraint: return "constraint";
    }
    return "unknown";
}

PayoffMatrix::PayoffMatrix(std::size_t n, std::vector<Rational> entries,
                           std::vector<std::string> labels)
    : n_(n), entries_(std::move(entries)), labels_(std::move(labels)) {
    if (n_ < 2) throw Error(ErrorKind::dimension, "payoff matrix needs at least 2 strategies");
    if (entries_.size() != n_ * n_) {
        throw Error(ErrorKind::dimension, "payoff matrix is not square: " +
                                              std::to_string(entries_.size()) + " entries for n = " +
                                              std::to_string(n_));
    }
    if (labels_.empty()) {
        for (std::size_t i = 0; i < n_; ++i) labels_.push_back("x" + std::to_string(i + 1));
    }
    if (labels_.size() != n_) throw Error(ErrorKind::dimension, "label count does not match n");

    real_.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            const auto& r = entries_[i * n_ + j];
            real_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
        }
    }
}

PayoffMatrix PayoffMatrix::from_rows(const std::vector<std::vector<Rational>>& rows,
                                     std::vector<std::string> labels) {
    const std::size_t n = rows.size();
    std::vector<Rational> flat;
    flat.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            throw Error(ErrorKind::dimension, "row " + std::to_string(i + 1) + " has " +
                                                  std::to_string(rows[i].size()) +
                                                  " entries, expected " + std::to_string(n));
        }
        flat.insert(flat.end(), rows[i].begin(), rows[i].end());
    }
    return PayoffMatrix(n, std::move(flat), std::move(labels));
}

PayoffMatrix paper_game() {
    using R = Rational;
    return PayoffMatrix::from_rows({
        {R(0), R(0), R(2), R(0), R(-2)},
        {R(2), R(0), R(0), R(-2), R(0)},
        {R(0), R(2), R(0), R(2), R(-1)},
        {R(-2), R(0), R(1), R(0), R(1)},
        {R(0), R(-2), R(-2), R(1), R(0)},
    });
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::int64_t parse_integer(std::string_view s, std::string_view whole) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorKind::input, "not a number: '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace

Rational parse_rational(std::string_view token) {
    const auto s = trim(token);
    if (s.empty()) throw Error(ErrorKind::input, "empty entry");

    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = parse_integer(trim(s.substr(0, slash)), s);
        auto den = parse_integer(trim(s.substr(slash + 1)), s);
        if (den == 0) throw Error(ErrorKind::input, "zero denominator in '" + std::string(s) + "'");
        return Rational(num, den);
    }

    std::string_view body = s;
    bool negative = false;
    if (body.front() == '+' || body.front() == '-') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    int exponent = 0;
    if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
        auto ex = body.substr(e + 1);
        if (!ex.empty() && ex.front() == '+') ex.remove_prefix(1);
        exponent = static_cast<int>(parse_integer(ex, s));
        if (exponent < -15 || exponent > 15) throw Error(ErrorKind::input, "exponent out of range in '" + std::string(s) + "'");
        body = body.substr(0, e);
    }
    auto dot = body.find('.');
    std::string digits(body.substr(0, dot));
    std::int64_t scale = 1;
    if (dot != std::string_view::npos) {
        auto frac = body.substr(dot + 1);
        if (frac.size() > 15) throw Error(ErrorKind::input, "too many decimals in '" + std::string(s) + "'");
        digits += frac;
        for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
    }
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        throw Error(ErrorKind::input, "not a number: '" + std::string(s) + "'");
    }
    auto value = parse_integer(digits, s);
    for (; exponent > 0; --exponent) {
        if (scale > 1) {
            scale /= 10;
        } else {
            if (std::abs(value) > std::numeric_limits<std::int64_t>::max() / 10) {
                throw Error(ErrorKind::input, "entry too large: '" + std::string(s) + "'");
            }
            value *= 10;
        }
    }
    for (; exponent < 0; ++exponent) {
        if (scale > std::numeric_limits<std::int64_t>::max() / 10) {
            throw Error(ErrorKind::input, "entry too precise: '" + std::string(s) + "'");
        }
        scale *= 10;
    }
    return Rational(negative ? -value : value, scale);
}

PayoffMatrix parse_game_csv(std::string_view text) {
    std::vector<std::vector<Rational>> rows;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = trim(text.substr(start, end - start));
        ++line_no;
        start = end + 1;
        if (line.empty() || line.front() == '#') {
            if (end == text.size()) break;
            continue;
        }
        std::vector<Rational> row;
        std::size_t col = 0;
        std::size_t pos = 0;
        while (true) {
            auto comma = line.find(',', pos);
            auto cell = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
            ++col;
            try {
                row.push_back(parse_rational(cell));
            } catch (const Error& e) {
                throw Error(ErrorKind::input, "line " + std::to_string(line_no) + ", column " +
                                                  std::to_string(col) + ": " + e.what());
            }
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        rows.push_back(std::move(row));
        if (end == text.size()) break;
    }
    if (rows.empty()) throw Error(ErrorKind::input, "game file has no rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) {
            throw Error(ErrorKind::input, "row " + std::to_string(i + 1) + " has " +
                                              std::to_string(rows[i].size()) + " columns; a " +
                                              std::to_string(rows.size()) + "-row game needs " +
                                              std::to_string(rows.size()));
        }
    }
    if (rows.size() < 2) throw Error(ErrorKind::input, "game needs at least 2 strategies");
    return PayoffMatrix::from_rows(rows);
}

PayoffMatrix load_game_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::input, "cannot open game file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_game_csv(buf.str());
}

PayoffMatrix resolve_game(const std::string& spec) {
    if (spec.empty() || spec == "builtin:paper") return paper_game();
    if (spec.rfind("builtin:", 0) == 0) {
        throw Error(ErrorKind::input, "unknown builtin game '" + spec + "' (known: builtin:paper)");
    }
    return load_game_csv(spec);
}

// --- SimplexState -----------------------------------------------------------

bool SimplexState::is_valid(const Eigen::VectorXd& x) {
    if (x.size() == 0 || !x.allFinite()) return false;
    return x.minCoeff() >= -negative_slack && std::abs(x.sum() - 1.0) <= sum_tolerance;
}

SimplexState::SimplexState(Eigen::VectorXd x) : x_(std::move(x)) {
    if (!is_valid(x_)) {
        std::ostringstream os;
        os << "state is not on the simplex (sum = " << x_.sum()
           << ", min = " << (x_.size() ? x_.minCoeff() : 0.0) << ")";
        throw Error(ErrorKind::input, os.str());
    }
}

SimplexState SimplexState::uniform(std::size_t n) {
    return SimplexState(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

SimplexState SimplexState::vertex(std::size_t n, std::size_t i) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    x[static_cast<Eigen::Index>(i)] = 1.0;
    return SimplexState(std::move(x));
}

SimplexState SimplexState::project(Eigen::VectorXd x) {
    x = x.cwiseMax(0.0);
    const double s = x.sum();
    if (!(s > 0.0)) throw Error(ErrorKind::input, "cannot project a non-positive vector onto the simplex");
    return SimplexState(x / s);
}

SimplexState paper_nash1() {
    Eigen::VectorXd x(5);
    x << 1.0 / 3, 1.0 / 3, 1.0 / 3, 0, 0;
    return SimplexState(x);
}

SimplexState paper_nash2() {
    Eigen::VectorXd x(5);
    x << 0, 0, 0, 0.5, 0.5;
    return SimplexState(x);
}

// --- payoffs and equilibria ---------------------------------------------------

namespace {

void check_dims(const PayoffMatrix& A, const Eigen::VectorXd& x) {
    if (static_cast<std::size_t>(x.size()) != A.size()) {
        throw Error(ErrorKind::dimension, "state has " + std::to_string(x.size()) +
                                              " components but the game has " +
                                              std::to_string(A.size()) + " strategies");
    }
}

}  // namespace

Eigen::VectorXd payoffs(const PayoffMatrix& A, const Eigen::VectorXd& x) {
    check_dims(A, x);
    return A.real() * x;
}

double mean_payoff(const PayoffMatrix& A, const Eigen::VectorXd& x) {
    check_dims(A, x);
    return x.dot(A.real() * x);
}

bool is_nash(const PayoffMatrix& A, const Eigen::VectorXd& x, double tol) {
    const Eigen::VectorXd U = payoffs(A, x);
    return U.maxCoeff() <= x.dot(U) + tol;
}

std::vector<Equilibrium> find_equilibria(const PayoffMatrix& A, double tol) {
    const std::size_t n = A.size();
    if (n > 10) throw Error(ErrorKind::dimension, "support enumeration is limited to n <= 10");
    const Eigen::MatrixXd& M = A.real();
    constexpr double merge_distance = 1e-7;

    std::vector<Equilibrium> found;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<Eigen::Index> S;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) S.push_back(static_cast<Eigen::Index>(i));
        }
        const auto k = static_cast<Eigen::Index>(S.size());

        // Unknowns: x_S (k) and c. Rows: (A x)_i - c = 0 for i in S, then sum x_S = 1.
        Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(k + 1, k + 1);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
        for (Eigen::Index r = 0; r < k; ++r) {
            for (Eigen::Index c = 0; c < k; ++c) sys(r, c) = M(S[r], S[c]);
            sys(r, k) = -1.0;
        }
        sys.row(k).head(k).setOnes();
        rhs[k] = 1.0;

        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys);
        cod.setThreshold(1e-12);
        const Eigen::VectorXd sol = cod.solve(rhs);
        if (!sol.allFinite() || (sys * sol - rhs).lpNorm<Eigen::Infinity>() > 1e-9) continue;

        Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        for (Eigen::Index r = 0; r < k; ++r) x[S[r]] = sol[r];
        if (x.minCoeff() < -tol) continue;
        const double c = sol[k];
        const Eigen::VectorXd U = M * x;
        bool stable = true;
        for (std::size_t j = 0; j < n && stable; ++j) {
            if (!(mask & (1u << j)) && U[static_cast<Eigen::Index>(j)] > c + tol) stable = false;
        }
        if (!stable) continue;

        x = x.cwiseMax(0.0);
        x /= x.sum();
        const bool duplicate = std::any_of(found.begin(), found.end(), [&](const Equilibrium& e) {
            return (e.point.values() - x).lpNorm<Eigen::Infinity>() < merge_distance;
        });
        if (duplicate) continue;

        Equilibrium eq{SimplexState(x), {}, mean_payoff(A, x), Equilibrium::Kind::interior_of_support};
        for (std::size_t i = 0; i < n; ++i) {
            if (x[static_cast<Eigen::Index>(i)] > tol) eq.support.push_back(i);
        }
        if (eq.support.size() == 1) eq.kind = Equilibrium::Kind::vertex;
        found.push_back(std::move(eq));
    }
    return found;
}

const Equilibrium* nearest_equilibrium(const std::vector<Equilibrium>& eqs,
                                       const Eigen::VectorXd& point, double within) {
    const Equilibrium* best = nullptr;
    double best_d = within;
    for (const auto& e : eqs) {
        if (e.point.size() != static_cast<std::size_t>(point.size())) continue;
        const double d = (e.point.values() - point).lpNorm<Eigen::Infinity>();
        if (d <= best_d) {
            best_d = d;
            best = &e;
        }
    }
    return best;
}

}  // namespace gamectl
