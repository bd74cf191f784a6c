// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: acceptance [--allow-fail ID[,ID...]]
// Exit status is 0 when every criterion passes or every failure is listed
// in --allow-fail. Allowed failures are still printed as FAIL.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gamectl/abm.hpp"
#include "gamectl/control.hpp"
#include "gamectl/dynamics.hpp"
#include "gamectl/eigensystem.hpp"
#include "gamectl/io.hpp"
#include "gamectl/metrics.hpp"
#include "gamectl/workflow.hpp"
#include "support.hpp"

using namespace gamectl;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    std::vector<std::string> notes;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const PayoffMatrix& game() {
    static const PayoffMatrix A = paper_game();
    return A;
}

const References& refs() {
    static const References r = resolve_references(game());
    return r;
}

Controller controller_for(double b) {
    return build_controller(game(), refs().primary, paper_channel(), b).controller;
}

std::vector<double> seed_mean_L(double b, const std::vector<std::uint64_t>& seeds, double discard,
                                std::size_t rounds = ABMConfig{}.rounds) {
    std::vector<double> sum(10, 0.0);
    ABMConfig cfg;
    cfg.rounds = rounds;
    cfg.controller = controller_for(b);
    for (auto s : seeds) {
        cfg.seed = s;
        const auto L = angular_momenta(tail_window(run_abm(game(), cfg), discard));
        for (std::size_t k = 0; k < 10; ++k) sum[k] += L.values[k] / static_cast<double>(seeds.size());
    }
    return sum;
}

PairValues as_pairs(std::vector<double> v) {
    PairValues p = angular_momenta(std::vector<Eigen::VectorXd>{Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(5)});
    p.values = std::move(v);
    return p;
}

// 1 ---------------------------------------------------------------------
Outcome jacobian_reproduction() {
    const Eigen::VectorXd xs = paper_nash1().values();
    const Eigen::MatrixXd J = jacobian_replicator(game(), xs);
    const double err = (J - testing::ninths_jacobian_nash1()).lpNorm<Eigen::Infinity>();
    const int reps = 1000;
    const auto t0 = Clock::now();
    double sink = 0;
    for (int i = 0; i < reps; ++i) sink += jacobian_replicator(game(), xs)(0, 0);
    const double per_call = seconds_since(t0) / reps;
    Outcome o;
    o.pass = err <= 1e-12 && per_call < 1e-3 && sink != 0.0;
    o.detail = "max |J - J_ninths| = " + fmt("%.2e", err) + ", " + fmt("%.2e", per_call) + " s per call";
    return o;
}

// 2 ---------------------------------------------------------------------
Outcome spectrum_reproduction() {
    const auto es1 = eig(jacobian_replicator(game(), paper_nash1().values()));
    const auto es2 = eig(jacobian_replicator(game(), paper_nash2().values()));
    const double e1 = spectrum_mismatch(es1.eigenvalues, testing::shifted_nash1_spectrum(0.0));
    const double e2 = spectrum_mismatch(es2.eigenvalues, {0.0, -0.5, -0.5, -1.5, -1.5});
    Outcome o;
    o.pass = e1 <= 1e-9 && e2 <= 1e-9;
    o.detail = "Nash_1 mismatch " + fmt("%.2e", e1) + ", Nash_2 mismatch " + fmt("%.2e", e2);
    return o;
}

// 3 ---------------------------------------------------------------------
Outcome gain_table() {
    Outcome o;
    std::vector<std::string> matching;
    double worst_k_best = 1e300, worst_pole_best = 0, worst_kx_best = 0;
    for (TaxMode mode : {TaxMode::channel_sum, TaxMode::plain}) {
        double worst_k = 0, worst_pole = 0, worst_kx = 0;
        bool ok = true;
        std::vector<double> grid;
        for (const auto& row : testing::gain_table_rows()) grid.push_back(row.b);
        try {
            const auto out = design(game(), refs(), DesignRequest{grid, std::nullopt, DesignOptions{mode}});
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const auto& d = out.designs[i];
                for (int j = 0; j < 5; ++j) {
                    worst_k = std::max(worst_k, std::abs(d.controller.K[j] - testing::gain_table_rows()[i].k[static_cast<std::size_t>(j)]));
                }
                worst_pole = std::max(worst_pole, spectrum_mismatch(d.closed_loop, testing::shifted_nash1_spectrum(grid[i])));
                worst_kx = std::max(worst_kx, d.constraint_residual);
            }
        } catch (const std::exception& e) {
            ok = false;
            o.notes.push_back(std::string(to_string(mode)) + ": " + e.what());
        }
        ok = ok && worst_k <= 1e-3 && worst_pole <= 1e-6 && worst_kx <= 1e-3;
        o.notes.push_back(std::string(to_string(mode)) + ": max |dK| " + fmt("%.2e", worst_k) + ", pole error " +
                          fmt("%.2e", worst_pole) + ", max |K.x*| " + fmt("%.2e", worst_kx) + (ok ? " (match)" : " (no match)"));
        if (ok) {
            matching.push_back(std::string(to_string(mode)));
            if (worst_k < worst_k_best) {
                worst_k_best = worst_k;
                worst_pole_best = worst_pole;
                worst_kx_best = worst_kx;
            }
        }
    }
    o.pass = !matching.empty();
    std::string modes;
    for (const auto& m : matching) modes += (modes.empty() ? "" : "+") + m;
    o.detail = o.pass ? "matching tax_mode: " + modes + "; max |dK| " + fmt("%.2e", worst_k_best) + ", pole error " +
                            fmt("%.2e", worst_pole_best) + ", max |K.x*| " + fmt("%.2e", worst_kx_best)
                      : "no tax_mode reproduces the table";
    return o;
}

// 4 ---------------------------------------------------------------------
Outcome conservation_suite() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(-2, 2);
    const int samples = 200;
    double tangency = 0, budget = 0, rest = 0, colsum = 0;
    const Eigen::VectorXd xs = paper_nash1().values();
    for (int t = 0; t < samples; ++t) {
        const Eigen::VectorXd x = testing::random_interior(gen, 5);
        Eigen::VectorXd B(5);
        Eigen::RowVectorXd K(5);
        for (auto& v : B) v = u(gen);
        for (auto& v : K) v = u(gen);
        Controller c{B, K, 0.0, TaxMode::channel_sum, refs().primary};
        tangency = std::max(tangency, std::abs(controlled_field(game(), x, c).sum()));
        budget = std::max(budget, std::abs(x.dot(per_agent_adjustment(c, x))));

        Controller cr = c;
        cr.K -= (K.dot(xs) / xs.squaredNorm()) * xs.transpose();
        rest = std::max(rest, controlled_field(game(), xs, cr).lpNorm<Eigen::Infinity>());

        Controller cx = c;
        cx.K -= (K.dot(x) / x.squaredNorm()) * x.transpose();
        colsum = std::max(colsum, (jacobian_controlled(game(), x, cx).colwise().sum() -
                                   jacobian_replicator(game(), x).colwise().sum()).lpNorm<Eigen::Infinity>());
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = tangency <= 1e-9 && budget <= 1e-9 && rest <= 1e-9 && colsum <= 1e-9 && secs < 10.0;
    o.detail = std::to_string(samples) + " samples each: tangency " + fmt("%.1e", tangency) + ", budget " +
               fmt("%.1e", budget) + ", rest point " + fmt("%.1e", rest) + ", column sums " + fmt("%.1e", colsum) +
               ", " + fmt("%.2f", secs) + " s";
    return o;
}

// 5 ---------------------------------------------------------------------
Outcome ode_selection() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (double b : {-0.8, -0.4, 0.4, 0.8}) {
        const auto traj = simulate_ode(game(), controller_for(b), OdeConfig{});
        const Eigen::VectorXd& target = b < 0 ? refs().primary.point.values() : refs().secondary.point.values();
        const double d = (traj.states.back() - target).norm();
        ok = ok && d < 0.01;
        detail += (detail.empty() ? "" : ", ") + std::string("b=") + format_number(b) + (b < 0 ? " d1=" : " d2=") + fmt("%.1e", d);
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = ok && secs < 5.0;
    o.detail = detail + ", " + fmt("%.2f", secs) + " s";
    return o;
}

// 6 ---------------------------------------------------------------------
bool strictly(const std::vector<double>& v, bool increasing) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (increasing ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1])) return false;
    }
    return true;
}

std::string join(const std::vector<double>& v, const char* f) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + fmt(f, x);
    return s;
}

Outcome speed_ordering() {
    const std::vector<double> left{-0.8, -0.6, -0.4, -0.2, 0.0};
    const std::vector<double> right{0.2, 0.4, 0.6, 0.8};
    const Eigen::VectorXd n1 = refs().primary.point.values(), n2 = refs().secondary.point.values();
    Outcome o;

    auto taus = [&](const Trajectory& t, bool first) {
        const auto d = distance_series(t, first ? n1 : n2);
        const auto tau = half_time(t.times, d, first ? nash1_half_threshold : nash2_half_threshold);
        return tau.value_or(std::numeric_limits<double>::quiet_NaN());
    };

    std::vector<double> ode_l, ode_r;
    for (double b : left) ode_l.push_back(taus(simulate_ode(game(), controller_for(b), OdeConfig{}), true));
    for (double b : right) ode_r.push_back(taus(simulate_ode(game(), controller_for(b), OdeConfig{}), false));
    const bool ode_ok = strictly(ode_l, true) && strictly(ode_r, false);
    o.notes.push_back("ODE tau_184 " + join(ode_l, "%.3g") + " | tau_273 " + join(ode_r, "%.3g") + (ode_ok ? " (ordered)" : " (NOT ordered)"));

    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    int inc = 0, dec = 0;
    for (auto s : seeds) {
        std::vector<double> l, r;
        ABMConfig cfg;
        cfg.seed = s;
        for (double b : left) {
            cfg.controller = controller_for(b);
            l.push_back(taus(run_abm(game(), cfg), true));
        }
        for (double b : right) {
            cfg.controller = controller_for(b);
            r.push_back(taus(run_abm(game(), cfg), false));
        }
        const bool li = strictly(l, true), rd = strictly(r, false);
        inc += li;
        dec += rd;
        o.notes.push_back("ABM seed " + std::to_string(s) + " tau_184 " + join(l, "%.0f") + " | tau_273 " + join(r, "%.0f") +
                          (li && rd ? " (ordered)" : " (NOT ordered)"));
    }
    const bool abm_ok = inc * 2 > static_cast<int>(seeds.size()) && dec * 2 > static_cast<int>(seeds.size());
    o.pass = ode_ok && abm_ok;
    o.detail = std::string("ODE ") + (ode_ok ? "ordered" : "not ordered") + "; ABM increasing in " + std::to_string(inc) +
               "/5 seeds, decreasing in " + std::to_string(dec) + "/5 seeds";
    return o;
}

// 7 ---------------------------------------------------------------------
Outcome cycle_signature() {
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    const auto lo = seed_mean_L(-0.8, seeds, 0.5);
    const auto hi = seed_mean_L(0.8, seeds, 0.5);
    const double conc = squared_mass_fraction(as_pairs(lo), refs().primary.support);
    const double s_lo = cycle_strength(lo), s_hi = cycle_strength(hi);
    const double ratio = s_hi / s_lo;
    Outcome o;
    o.pass = conc >= 0.9 && ratio < 0.1;
    o.detail = "ABM tail window (last 50%, 5 seeds, seed-mean L): share in {1,2,3} at b=-0.8 = " + fmt("%.3f", conc) +
               " (need >= 0.9); |L|(+0.8)/|L|(-0.8) = " + fmt("%.3f", ratio) + " (need < 0.1)";
    o.notes.push_back("|L|(-0.8) = " + fmt("%.3e", s_lo) + ", |L|(+0.8) = " + fmt("%.3e", s_hi));
    // Per-seed view for the record.
    for (auto s : seeds) {
        const auto l = seed_mean_L(-0.8, {s}, 0.5);
        const auto h = seed_mean_L(0.8, {s}, 0.5);
        o.notes.push_back("seed " + std::to_string(s) + ": share " +
                          fmt("%.3f", squared_mass_fraction(as_pairs(l), refs().primary.support)) + ", ratio " +
                          fmt("%.3f", cycle_strength(h) / cycle_strength(l)));
    }
    // Diagnostic: ten times longer runs.
    const auto lo10 = seed_mean_L(-0.8, seeds, 0.5, 60000);
    const auto hi10 = seed_mean_L(0.8, seeds, 0.5, 60000);
    o.notes.push_back("60000 rounds: share " + fmt("%.3f", squared_mass_fraction(as_pairs(lo10), refs().primary.support)) +
                      ", ratio " + fmt("%.3f", cycle_strength(hi10) / cycle_strength(lo10)));
    // Diagnostic: the converged ODE tail.
    const auto odl = simulate_ode(game(), controller_for(-0.8), OdeConfig{});
    o.notes.push_back("ODE b=-0.8 tail |L| = " + fmt("%.1e", cycle_strength(angular_momenta(tail_window(odl, 0.5)).values)) +
                      " (converged; not informative)");
    return o;
}

// 8 ---------------------------------------------------------------------
Outcome eigencycle_consistency() {
    const auto es = eig(jacobian_replicator(game(), paper_nash1().values()));
    const auto ci = first_complex_index(es);
    Outcome o;
    if (!ci) {
        o.detail = "no rotating mode at Nash_1";
        return o;
    }
    const auto theory = rotation_eigencycles(es, *ci);
    const auto& sup = refs().primary.support;
    const Eigen::VectorXd xs = refs().primary.point.values();
    auto pattern = [&](const PairValues& p) {
        std::string s;
        for (std::size_t i = 0; i < sup.size(); ++i) {
            for (std::size_t j = i + 1; j < sup.size(); ++j) s += p.value(sup[i], sup[j]) > 0 ? '+' : '-';
        }
        return s;
    };
    const std::string want = pattern(theory);
    bool ok = true;
    std::string detail = "theory " + want + " on (1,2),(1,3),(2,3);";
    for (double b : {-0.4, -0.6, -0.8, -1.0}) {
        const auto traj = simulate_ode(game(), controller_for(b), OdeConfig{});
        const auto d = distance_series(traj, xs);
        // Linear regime: from the first sample within 1e-3 of Nash_1 until
        // the deviation falls below 1e-9.
        std::size_t lo = 0, hi = d.size();
        while (lo < d.size() && d[lo] > 1e-3) ++lo;
        for (std::size_t i = lo; i < d.size(); ++i) {
            if (d[i] < 1e-9) {
                hi = i;
                break;
            }
        }
        std::string got = "n/a";
        if (hi > lo + 1) {
            const std::span<const Eigen::VectorXd> win(traj.states.data() + lo, hi - lo);
            got = pattern(angular_momenta(win, &xs));
            const auto origin = angular_momenta(traj.states);
            o.notes.push_back("b=" + format_number(b) + ": window samples " + std::to_string(lo) + ".." + std::to_string(hi) +
                              ", equilibrium-centered " + got + ", whole-run origin-centered " + pattern(origin));
        }
        ok = ok && got == want;
        detail += " b=" + format_number(b) + " " + got;
    }
    // Corroboration on the agent-based engine (origin-centered tail, seed-mean).
    for (double b : {-0.4, -0.8}) {
        o.notes.push_back("ABM b=" + format_number(b) + " tail origin-centered " + pattern(as_pairs(seed_mean_L(b, {1, 2, 3, 4, 5}, 0.5))));
    }
    o.pass = ok;
    o.detail = detail;
    return o;
}

// 9 ---------------------------------------------------------------------
Outcome abm_scale() {
    ABMConfig cfg;
    cfg.seed = 77;
    cfg.controller = controller_for(-0.4);
    const auto t0 = Clock::now();
    const auto a = run_abm(game(), cfg);
    const double secs = seconds_since(t0);
    const auto b = run_abm(game(), cfg);
    std::ostringstream sa, sb;
    write_trajectory_csv(sa, a);
    write_trajectory_csv(sb, b);
    const bool same = sa.str() == sb.str();
    Outcome o;
    o.pass = secs <= 60.0 && same && a.size() == 6001;
    o.detail = "1000 agents x 6000 rounds in " + fmt("%.3f", secs) + " s; identical seeds " + (same ? "identical" : "DIFFER") +
               " (" + std::to_string(a.size()) + " rows)";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> allowed;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--allow-fail") == 0 && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) allowed.insert(std::stoi(tok));
        }
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Jacobian reproduction", jacobian_reproduction},
        {"Spectrum reproduction", spectrum_reproduction},
        {"Gain-table reproduction", gain_table},
        {"Conservation suite", conservation_suite},
        {"Equilibrium selection (ODE)", ode_selection},
        {"Convergence-speed ordering (ODE + ABM)", speed_ordering},
        {"Cycle signature", cycle_signature},
        {"Eigencycle/measurement consistency", eigencycle_consistency},
        {"ABM determinism and scale", abm_scale},
    };

    int failed = 0, unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = seconds_since(t0);
        std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << id << "] " << criteria[i].first << ": " << o.detail << " ("
                  << fmt("%.2f", secs) << " s)\n";
        for (const auto& n : o.notes) std::cout << "        " << n << "\n";
        if (!o.pass) {
            ++failed;
            if (!allowed.count(id)) ++unexpected;
        }
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed";
    if (failed > unexpected) std::cout << " (" << (failed - unexpected) << " failure(s) listed in --allow-fail)";
    std::cout << "\n";
    return unexpected == 0 ? 0 : 1;
}
