#include "gamectl/io.hpp"

#include <cctype>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gamectl/error.hpp"

namespace gamectl {

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

double to_double(const std::string& s, std::size_t line) {
    // strtod keeps subnormal values that stod rejects as out of range.
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || std::isspace(static_cast<unsigned char>(s.front()))) {
        throw Error(ErrorKind::input, "line " + std::to_string(line) + ": '" + s + "' is not a number");
    }
    return v;
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::optional<double> parse_optional(const std::string& s, std::size_t line) {
    if (s.empty()) return std::nullopt;
    return to_double(s, line);
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

}  // namespace

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::vector<double>* d1,
                          const std::vector<double>* d2) {
    const std::size_t n = traj.dimension();
    const bool with_d = d1 && d2;
    if (with_d && (d1->size() != traj.size() || d2->size() != traj.size())) {
        throw Error(ErrorKind::dimension, "distance series length differs from the trajectory");
    }
    out << 't';
    for (std::size_t j = 1; j <= n; ++j) out << ",x" << j;
    if (with_d) out << ",d1,d2";
    out << '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << format_number(traj.times[i]);
        for (Eigen::Index j = 0; j < traj.states[i].size(); ++j) out << ',' << format_number(traj.states[i][j]);
        if (with_d) out << ',' << format_number((*d1)[i]) << ',' << format_number((*d2)[i]);
        out << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::input, "empty trajectory file");
    const auto header = split(strip_cr(line));
    std::size_t n = 0;
    while (n + 1 < header.size() && header[n + 1] == "x" + std::to_string(n + 1)) ++n;
    if (header.empty() || header[0] != "t" || n == 0) {
        throw Error(ErrorKind::input, "trajectory header must start with t,x1");
    }
    Trajectory traj;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() < n + 1) throw Error(ErrorKind::input, "line " + std::to_string(lineno) + ": too few columns");
        traj.times.push_back(to_double(cells[0], lineno));
        Eigen::VectorXd x(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) x[static_cast<Eigen::Index>(j)] = to_double(cells[j + 1], lineno);
        traj.states.push_back(std::move(x));
    }
    return traj;
}

void write_gains_csv(std::ostream& out, const std::vector<ControllerDesign>& designs) {
    const std::size_t n = designs.empty() ? 0 : static_cast<std::size_t>(designs.front().controller.K.size());
    out << 'b';
    for (std::size_t j = 1; j <= n; ++j) out << ",k" << j;
    out << '\n';
    for (const auto& d : designs) {
        // Gains that vanish to rounding are written as 0 so the b = 0 row is exact.
        out << format_number(d.controller.b);
        for (Eigen::Index j = 0; j < d.controller.K.size(); ++j) {
            const double k = d.controller.K[j];
            out << ',' << format_number(std::abs(k) < 1e-13 ? 0.0 : k);
        }
        out << '\n';
    }
}

Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const EigenSystem& es) {
    Json values = Json::array();
    for (const auto& v : es.eigenvalues) values.push_back(complex_to_json(v));
    Json vectors = Json::array();
    for (std::size_t k = 0; k < es.size(); ++k) {
        Json col = Json::array();
        const Eigen::VectorXcd v = es.vector(k);
        for (Eigen::Index i = 0; i < v.size(); ++i) col.push_back(complex_to_json(v[i]));
        vectors.push_back(std::move(col));
    }
    return Json{{"eigenvalues", std::move(values)}, {"vectors", std::move(vectors)}, {"max_residual", es.max_residual}};
}

Json to_json(const PairValues& values) {
    Json out = Json::object();
    for (std::size_t k = 0; k < values.pairs.size(); ++k) {
        out[std::to_string(values.pairs[k].first + 1) + "," + std::to_string(values.pairs[k].second + 1)] =
            values.values[k];
    }
    return out;
}

Json to_json(const MetricsReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    return Json{{"mean_distribution", std::vector<double>(r.mean_distribution.begin(), r.mean_distribution.end())},
                {"tau_half", opt(r.tau_half)},
                {"L", to_json(r.L)},
                {"L_strength", r.L_strength},
                {"selected", std::string(to_string(r.selected))},
                {"tau_half_nash1", opt(r.tau_half_nash1)},
                {"tau_half_nash2", opt(r.tau_half_nash2)},
                {"terminal_d_nash1", r.terminal_d_nash1},
                {"terminal_d_nash2", r.terminal_d_nash2}};
}

Json to_json(const ControllerDesign& d) {
    Json open = Json::array(), target = Json::array(), closed = Json::array();
    for (const auto& z : d.open_loop) open.push_back(complex_to_json(z));
    for (const auto& z : d.target.values) target.push_back(complex_to_json(z));
    for (const auto& z : d.closed_loop) closed.push_back(complex_to_json(z));
    return Json{{"b", d.controller.b},
                {"K", std::vector<double>(d.controller.K.begin(), d.controller.K.end())},
                {"tax_mode", std::string(to_string(d.controller.tax_mode))},
                {"open_loop", std::move(open)},
                {"target", std::move(target)},
                {"closed_loop", std::move(closed)},
                {"controllability_rank", d.controllability_rank},
                {"pole_error", d.pole_error},
                {"constraint_residual", d.constraint_residual},
                {"warnings", d.warnings}};
}

Json abm_manifest(const ABMConfig& cfg, double wall_seconds) {
    Json j{{"n_agents", cfg.n_agents},
           {"initial_counts", cfg.initial_counts},
           {"prob_revision", cfg.prob_revision},
           {"prob_mutation", cfg.prob_mutation},
           {"rounds", cfg.rounds},
           {"seed", cfg.seed},
           {"random_initial", cfg.random_initial},
           {"rng", "mt19937_64; uniform=(u64>>11)*2^-53; below=Lemire"}};
    j["adoption_scale"] = cfg.adoption_scale ? Json(*cfg.adoption_scale) : Json("payoff range");
    if (cfg.controller) {
        const auto& c = *cfg.controller;
        j["controller"] = Json{{"b", c.b},
                               {"B", std::vector<double>(c.B.begin(), c.B.end())},
                               {"K", std::vector<double>(c.K.begin(), c.K.end())},
                               {"tax_mode", std::string(to_string(c.tax_mode))}};
    } else {
        j["controller"] = nullptr;
    }
    j["wall_seconds"] = wall_seconds;
    return j;
}

SummaryRow SummaryRow::from_report(double b, std::string engine, std::uint64_t seed, const MetricsReport& r) {
    SummaryRow row;
    row.b = b;
    row.engine = std::move(engine);
    row.seed = seed;
    row.selected = r.selected;
    row.tau_half = r.tau_half;
    row.L_strength = r.L_strength;
    row.rho = r.mean_distribution;
    row.L = r.L.values;
    row.tau_nash1 = r.tau_half_nash1;
    row.tau_nash2 = r.tau_half_nash2;
    row.d1_end = r.terminal_d_nash1;
    row.d2_end = r.terminal_d_nash2;
    return row;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, std::size_t n) {
    out << "b,engine,seed,selected,tau_half,L_strength";
    for (std::size_t j = 1; j <= n; ++j) out << ",rho" << j;
    for (std::size_t m = 1; m <= n; ++m) {
        for (std::size_t k = m + 1; k <= n; ++k) out << ",L" << m << '_' << k;
    }
    out << ",tau_nash1,tau_nash2,d1_end,d2_end,error\n";
    const std::size_t n_pairs = n * (n - 1) / 2;
    for (const auto& r : rows) {
        out << format_number(r.b) << ',' << r.engine << ',' << r.seed << ',' << to_string(r.selected) << ','
            << optional_number(r.tau_half) << ',' << format_number(r.L_strength);
        for (std::size_t j = 0; j < n; ++j) {
            out << ',' << (static_cast<std::size_t>(r.rho.size()) == n ? format_number(r.rho[static_cast<Eigen::Index>(j)]) : "");
        }
        for (std::size_t k = 0; k < n_pairs; ++k) out << ',' << (r.L.size() == n_pairs ? format_number(r.L[k]) : "");
        out << ',' << optional_number(r.tau_nash1) << ',' << optional_number(r.tau_nash2) << ','
            << format_number(r.d1_end) << ',' << format_number(r.d2_end) << ',' << sanitize(r.error) << '\n';
    }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::input, "empty summary file");
    const auto header = split(strip_cr(line));
    std::size_t n = 0;
    while (6 + n < header.size() && header[6 + n] == "rho" + std::to_string(n + 1)) ++n;
    const std::size_t n_pairs = n * (n - 1) / 2;
    const std::size_t expected = 6 + n + n_pairs + 5;
    if (header.size() != expected || header[0] != "b" || header[1] != "engine" || n == 0) {
        throw Error(ErrorKind::input, "summary.csv header does not match the expected layout");
    }
    std::vector<SummaryRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto c = split(line);
        if (c.size() != expected) {
            throw Error(ErrorKind::input, "summary.csv line " + std::to_string(lineno) + ": expected " +
                                              std::to_string(expected) + " columns, got " + std::to_string(c.size()));
        }
        SummaryRow r;
        r.b = to_double(c[0], lineno);
        r.engine = c[1];
        r.seed = static_cast<std::uint64_t>(std::stoull(c[2]));
        r.selected = parse_selection(c[3]);
        r.tau_half = parse_optional(c[4], lineno);
        r.L_strength = to_double(c[5], lineno);
        r.error = c[expected - 1];
        if (r.error.empty()) {
            r.rho.resize(static_cast<Eigen::Index>(n));
            for (std::size_t j = 0; j < n; ++j) r.rho[static_cast<Eigen::Index>(j)] = to_double(c[6 + j], lineno);
            for (std::size_t k = 0; k < n_pairs; ++k) r.L.push_back(to_double(c[6 + n + k], lineno));
        }
        r.tau_nash1 = parse_optional(c[6 + n + n_pairs], lineno);
        r.tau_nash2 = parse_optional(c[7 + n + n_pairs], lineno);
        r.d1_end = to_double(c[8 + n + n_pairs], lineno);
        r.d2_end = to_double(c[9 + n + n_pairs], lineno);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::input, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error(ErrorKind::input, "failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::input, "cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace gamectl
