#include "gamectl/workflow.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "gamectl/error.hpp"

namespace gamectl {

namespace fs = std::filesystem;

Analysis analyze(const PayoffMatrix& A) {
    Analysis out;
    for (auto& eq : find_equilibria(A)) {
        EquilibriumAnalysis e{eq, jacobian_replicator(A, eq.point.values()), {}, false, std::nullopt, std::nullopt};
        e.eigen = eig(e.jacobian);
        e.payoff_eigen_ok = payoff_eigen_check(e.jacobian, eq.point.values(), eq.expected_payoff);
        e.complex_index = first_complex_index(e.eigen);
        if (e.complex_index) e.eigencycles = rotation_eigencycles(e.eigen, *e.complex_index);
        out.equilibria.push_back(std::move(e));
    }
    if (out.equilibria.empty()) throw Error(ErrorKind::input, "the game has no symmetric equilibrium");
    return out;
}

Json to_json(const Analysis& analysis) {
    Json list = Json::array();
    for (const auto& e : analysis.equilibria) {
        const auto& x = e.equilibrium.point.values();
        std::vector<std::size_t> support;
        for (auto s : e.equilibrium.support) support.push_back(s + 1);
        Json rows = Json::array();
        for (Eigen::Index i = 0; i < e.jacobian.rows(); ++i) {
            rows.push_back(std::vector<double>(e.jacobian.row(i).begin(), e.jacobian.row(i).end()));
        }
        list.push_back(Json{{"point", std::vector<double>(x.begin(), x.end())},
                            {"support", support},
                            {"expected_payoff", e.equilibrium.expected_payoff},
                            {"kind", e.equilibrium.kind == Equilibrium::Kind::vertex ? "vertex" : "interior_of_support"},
                            {"jacobian", std::move(rows)},
                            {"eigensystem", to_json(e.eigen)},
                            {"payoff_eigen_check", e.payoff_eigen_ok},
                            {"eigencycles", e.eigencycles ? to_json(*e.eigencycles) : Json(nullptr)}});
    }
    return Json{{"equilibria", std::move(list)}};
}

References resolve_references(const PayoffMatrix& A) {
    if (A == paper_game()) {
        const auto eqs = find_equilibria(A);
        const auto* e1 = nearest_equilibrium(eqs, paper_nash1().values());
        const auto* e2 = nearest_equilibrium(eqs, paper_nash2().values());
        if (!e1 || !e2) throw Error(ErrorKind::numerical, "built-in equilibria not recovered");
        return References{*e1, *e2, nash1_half_threshold, nash2_half_threshold};
    }
    const Analysis an = analyze(A);
    std::size_t primary = 0;
    for (std::size_t i = 0; i < an.equilibria.size(); ++i) {
        if (an.equilibria[i].complex_index) {
            primary = i;
            break;
        }
    }
    std::size_t secondary = primary;
    for (std::size_t i = 0; i < an.equilibria.size(); ++i) {
        if (i == primary) continue;
        if (secondary == primary ||
            an.equilibria[i].equilibrium.support.size() > an.equilibria[secondary].equilibrium.support.size()) {
            secondary = i;
        }
    }
    const Eigen::VectorXd u = SimplexState::uniform(A.size()).values();
    const auto& p = an.equilibria[primary].equilibrium;
    const auto& s = an.equilibria[secondary].equilibrium;
    return References{p, s, 0.5 * (u - p.point.values()).norm(), 0.5 * (u - s.point.values()).norm()};
}

DesignOutcome design(const PayoffMatrix& A, const References& refs, const DesignRequest& request) {
    if (request.b_grid.empty()) throw Error(ErrorKind::input, "b grid is empty");
    Eigen::VectorXd B;
    if (request.channel) {
        B = *request.channel;
    } else if (A.size() == 5) {
        B = paper_channel();
    } else {
        throw Error(ErrorKind::input, "no default control channel for a " + std::to_string(A.size()) +
                                          "-strategy game; pass one explicitly");
    }
    DesignOutcome out;
    Json rows = Json::array();
    for (double b : request.b_grid) {
        out.designs.push_back(build_controller(A, refs.primary, B, b, request.options));
        rows.push_back(to_json(out.designs.back()));
    }
    out.report = Json{{"anchor", std::vector<double>(refs.primary.point.values().begin(), refs.primary.point.values().end())},
                      {"channel", std::vector<double>(B.begin(), B.end())},
                      {"tax_mode", std::string(to_string(request.options.tax_mode))},
                      {"selector", std::string(to_string(request.options.selector))},
                      {"rows", std::move(rows)}};
    return out;
}

Trajectory simulate_ode(const PayoffMatrix& A, const Controller& c, const OdeConfig& cfg) {
    const SimplexState x0 = cfg.x0 ? SimplexState(*cfg.x0) : SimplexState::uniform(A.size());
    auto traj = integrate([&](const Eigen::VectorXd& x) { return controlled_field(A, x, c); }, x0, cfg.step,
                          cfg.horizon);
    traj.meta.field_kind = "controlled";
    traj.meta.b = c.b;
    return traj;
}

void SweepConfig::validate() const {
    if (b_grid.empty()) throw Error(ErrorKind::input, "b_grid is empty");
    for (double b : b_grid) {
        if (!(b >= -1.0 && b <= 1.0)) throw Error(ErrorKind::input, "b_grid value " + format_number(b) + " outside [-1, 1]");
    }
    if (engines.empty()) throw Error(ErrorKind::input, "no engine selected");
    for (const auto& e : engines) {
        if (e != "ode" && e != "abm") throw Error(ErrorKind::input, "unknown engine '" + e + "' (expected ode or abm)");
    }
    if (seeds.empty()) throw Error(ErrorKind::input, "no seeds given");
    if (!(ode.step > 0.0) || !(ode.horizon > 0.0)) throw Error(ErrorKind::input, "ODE step and horizon must be positive");
}

namespace {

std::string run_name(const std::string& engine, double b, std::uint64_t seed) {
    return engine + "_b" + format_number(b) + "_s" + std::to_string(seed);
}

struct Job {
    std::size_t design_index;
    std::string engine;
    std::uint64_t seed;
};

}  // namespace

SweepOutcome sweep(const PayoffMatrix& A, const SweepConfig& cfg) {
    cfg.validate();
    const References refs = resolve_references(A);
    DesignRequest request{cfg.b_grid, std::nullopt, DesignOptions{cfg.tax_mode, cfg.selector}};

    SweepOutcome out;
    out.design = design(A, refs, request);

    const fs::path root(cfg.output_dir);
    fs::create_directories(root / "runs");
    {
        std::ostringstream gains;
        write_gains_csv(gains, out.design.designs);
        write_file((root / "gains.csv").string(), gains.str());
        write_file((root / "design_report.json").string(), out.design.report.dump(2) + "\n");
    }

    std::vector<Job> jobs;
    for (std::size_t i = 0; i < out.design.designs.size(); ++i) {
        for (const auto& engine : cfg.engines) {
            for (auto seed : cfg.seeds) jobs.push_back(Job{i, engine, seed});
        }
    }
    out.rows.resize(jobs.size());

    const Eigen::VectorXd n1 = refs.primary.point.values();
    const Eigen::VectorXd n2 = refs.secondary.point.values();
    auto metric_opts = [&](const MetricsOptions& base) {
        MetricsOptions o = base;
        o.nash1_threshold = refs.primary_threshold;
        o.nash2_threshold = refs.secondary_threshold;
        return o;
    };

    // The ODE does not depend on the seed, so each b is integrated once and
    // shared by its seed rows.
    std::vector<std::optional<MetricsReport>> ode_reports(out.design.designs.size());
    std::vector<std::string> ode_errors(out.design.designs.size());
    std::vector<std::once_flag> ode_once(out.design.designs.size());

    auto run_job = [&](std::size_t k) {
        const Job& job = jobs[k];
        const Controller& c = out.design.designs[job.design_index].controller;
        const std::string name = run_name(job.engine, c.b, job.seed);
        SummaryRow row;
        try {
            if (job.engine == "ode") {
                std::call_once(ode_once[job.design_index], [&] {
                    try {
                        const Trajectory traj = simulate_ode(A, c, cfg.ode);
                        MetricsReport r = evaluate_trajectory(traj, n1, n2, metric_opts(cfg.ode_metrics));
                        std::ostringstream csv;
                        write_trajectory_csv(csv, traj, &r.d_nash1, &r.d_nash2);
                        write_file((root / "runs" / ("ode_b" + format_number(c.b) + ".csv")).string(), csv.str());
                        ode_reports[job.design_index] = std::move(r);
                    } catch (const std::exception& e) {
                        ode_errors[job.design_index] = e.what();
                    }
                });
                if (!ode_reports[job.design_index]) throw std::runtime_error(ode_errors[job.design_index]);
                const auto& r = *ode_reports[job.design_index];
                write_file((root / "runs" / (name + ".json")).string(), to_json(r).dump(2) + "\n");
                row = SummaryRow::from_report(c.b, job.engine, job.seed, r);
            } else {
                ABMConfig abm = cfg.abm;
                abm.seed = job.seed;
                abm.controller = c;
                const auto t0 = std::chrono::steady_clock::now();
                const Trajectory traj = run_abm(A, abm);
                const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                MetricsReport r = evaluate_trajectory(traj, n1, n2, metric_opts(cfg.abm_metrics));
                std::ostringstream csv;
                write_trajectory_csv(csv, traj, &r.d_nash1, &r.d_nash2);
                write_file((root / "runs" / (name + ".csv")).string(), csv.str());
                write_file((root / "runs" / (name + ".json")).string(), to_json(r).dump(2) + "\n");
                write_file((root / "runs" / (name + "_manifest.json")).string(), abm_manifest(abm, secs).dump(2) + "\n");
                row = SummaryRow::from_report(c.b, job.engine, job.seed, r);
            }
        } catch (const std::exception& e) {
            row = SummaryRow{};
            row.b = c.b;
            row.engine = job.engine;
            row.seed = job.seed;
            row.error = e.what();
        }
        out.rows[k] = std::move(row);
    };

    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t n_threads = std::min(jobs.size(), cfg.threads ? cfg.threads : hw);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < jobs.size(); k = next++) run_job(k);
        });
    }
    for (auto& th : pool) th.join();

    for (const auto& r : out.rows) {
        if (!r.error.empty()) out.failures.push_back(run_name(r.engine, r.b, r.seed) + ": " + r.error);
    }
    std::ostringstream summary;
    write_summary_csv(summary, out.rows, A.size());
    write_file((root / "summary.csv").string(), summary.str());
    // Evaluate what was written, so `evaluate` on the file reproduces this.
    std::istringstream written(summary.str());
    out.evaluation = evaluate(read_summary_csv(written), A, cfg.abm);
    write_file((root / "evaluation.json").string(), out.evaluation.dump(2) + "\n");
    return out;
}

namespace {

struct EngineRows {
    // b -> rows (one per seed), in seed order of appearance
    std::map<double, std::vector<const SummaryRow*>> by_b;
};

std::map<std::string, EngineRows> group(const std::vector<SummaryRow>& rows) {
    std::map<std::string, EngineRows> g;
    for (const auto& r : rows) g[r.engine].by_b[r.b].push_back(&r);
    return g;
}

std::vector<double> mean_L(const std::vector<const SummaryRow*>& rows) {
    std::vector<double> sum;
    std::size_t count = 0;
    for (const auto* r : rows) {
        if (!r->error.empty() || r->L.empty()) continue;
        if (sum.empty()) sum.assign(r->L.size(), 0.0);
        for (std::size_t k = 0; k < r->L.size(); ++k) sum[k] += r->L[k];
        ++count;
    }
    for (auto& v : sum) v /= static_cast<double>(std::max<std::size_t>(count, 1));
    return sum;
}

PairValues pairs_of(std::size_t n, std::vector<double> values) {
    PairValues p;
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t k = m + 1; k < n; ++k) p.pairs.emplace_back(m, k);
    }
    p.values = std::move(values);
    if (p.values.size() != p.pairs.size()) p.values.assign(p.pairs.size(), 0.0);
    return p;
}

// Sequence of tau values for one seed across a b range; absent if any run is
// missing or never crossed.
std::optional<std::vector<double>> tau_sequence(const EngineRows& e, std::size_t seed_slot, double lo, double hi,
                                                bool primary) {
    std::vector<double> seq;
    for (const auto& [b, rows] : e.by_b) {
        if (b < lo - 1e-12 || b > hi + 1e-12) continue;
        if (seed_slot >= rows.size()) return std::nullopt;
        const auto& t = primary ? rows[seed_slot]->tau_nash1 : rows[seed_slot]->tau_nash2;
        if (!t) return std::nullopt;
        seq.push_back(*t);
    }
    return seq;
}

bool strictly(const std::vector<double>& v, bool increasing) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (increasing ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1])) return false;
    }
    return v.size() >= 2;
}

}  // namespace

Json evaluate(const std::vector<SummaryRow>& rows, const PayoffMatrix& A, const ABMConfig& abm,
              const EvaluationOptions& options) {
    if (rows.empty()) throw Error(ErrorKind::input, "summary has no rows");
    const auto groups = group(rows);
    const References refs = resolve_references(A);
    const std::size_t n = A.size();

    // Theory side.
    const Eigen::MatrixXd J = jacobian_replicator(A, refs.primary.point.values());
    const EigenSystem es = eig(J);
    const auto ci = first_complex_index(es);
    std::optional<EigencycleSet> theory;
    if (ci) theory = rotation_eigencycles(es, *ci);
    const auto& support = refs.primary.support;

    Json selection{{"prediction", "b <= -" + format_number(options.decided_b) + " selects Nash_1, b >= " +
                                      format_number(options.decided_b) + " selects Nash_2 (seed majority)"}};
    Json speed{{"prediction", "tau_184 strictly increasing on [-0.8, 0]; tau_273 strictly decreasing on (0, 0.8] "
                              "(seed majority)"}};
    Json cycles{{"prediction", "measured L signs on the rotating support match the eigencycles for b <= -" +
                                   format_number(options.decided_b) + "; cycle strength at the largest b <= 0.8 "
                                   "is below " + format_number(options.cycle_vanish_ratio) +
                                   " of that at the smallest b >= -0.8"}};
    bool selection_ok = true, speed_ok = true, cycles_ok = true, any_cycle_measured = false;
    Json sel_engines = Json::object(), speed_engines = Json::object(), cyc_engines = Json::object();

    for (const auto& [engine, e] : groups) {
        // Selection direction.
        Json sel = Json::array();
        bool eng_sel = true;
        for (const auto& [b, rs] : e.by_b) {
            std::size_t c1 = 0, c2 = 0;
            for (const auto* r : rs) {
                if (r->selected == Selection::nash1) ++c1;
                if (r->selected == Selection::nash2) ++c2;
            }
            const std::size_t half = rs.size() / 2 + 1;
            bool ok = true;
            if (b <= -options.decided_b) ok = c1 >= half;
            else if (b >= options.decided_b) ok = c2 >= half;
            else if (b < 0) ok = c2 < half;
            else if (b > 0) ok = c1 < half;
            eng_sel = eng_sel && ok;
            sel.push_back(Json{{"b", b}, {"nash1", c1}, {"nash2", c2}, {"runs", rs.size()}, {"ok", ok}});
        }
        selection_ok = selection_ok && eng_sel;
        sel_engines[engine] = Json{{"pass", eng_sel}, {"by_b", std::move(sel)}};

        // Speed ordering, per seed slot.
        const std::size_t slots = e.by_b.empty() ? 0 : e.by_b.begin()->second.size();
        std::size_t inc_ok = 0, dec_ok = 0;
        Json per_seed = Json::array();
        for (std::size_t s = 0; s < slots; ++s) {
            const auto up = tau_sequence(e, s, -0.8, 0.0, true);
            const auto down = tau_sequence(e, s, 1e-9, 0.8, false);
            const bool u = up && strictly(*up, true);
            const bool d = down && strictly(*down, false);
            inc_ok += u;
            dec_ok += d;
            per_seed.push_back(Json{{"tau_184", up ? Json(*up) : Json(nullptr)},
                                    {"tau_273", down ? Json(*down) : Json(nullptr)},
                                    {"increasing", u},
                                    {"decreasing", d}});
        }
        const bool eng_speed = slots > 0 && inc_ok * 2 > slots && dec_ok * 2 > slots;
        speed_ok = speed_ok && eng_speed;
        speed_engines[engine] = Json{{"pass", eng_speed}, {"seeds", std::move(per_seed)}};

        // Cycle signature on the seed-averaged tail L.
        Json cyc{{"signs", Json::array()}};
        bool eng_signs = true, measured = false;
        for (const auto& [b, rs] : e.by_b) {
            if (b > -options.decided_b || !theory) continue;
            const PairValues L = pairs_of(n, mean_L(rs));
            Json entry{{"b", b}};
            bool all_small = true, match = true;
            for (std::size_t i = 0; i < support.size(); ++i) {
                for (std::size_t j = i + 1; j < support.size(); ++j) {
                    const double l = L.value(support[i], support[j]);
                    const double t = theory->value(support[i], support[j]);
                    if (std::abs(l) > options.sign_floor) all_small = false;
                    match = match && (std::signbit(l) == std::signbit(t));
                    entry[std::to_string(support[i] + 1) + "," + std::to_string(support[j] + 1)] = {l, t};
                }
            }
            entry["measurable"] = !all_small;
            entry["match"] = match;
            if (!all_small) {
                measured = true;
                eng_signs = eng_signs && match;
            }
            cyc["signs"].push_back(std::move(entry));
        }
        std::optional<double> lo_b, hi_b;
        for (const auto& [b, rs] : e.by_b) {
            if (b >= -0.8 - 1e-12 && !lo_b) lo_b = b;
            if (b > 0 && b <= 0.8 + 1e-12) hi_b = b;
        }
        bool eng_vanish = true;
        if (lo_b && hi_b) {
            const auto Llo = mean_L(e.by_b.at(*lo_b));
            const auto Lhi = mean_L(e.by_b.at(*hi_b));
            const double s_lo = cycle_strength(Llo), s_hi = cycle_strength(Lhi);
            const double conc = squared_mass_fraction(pairs_of(n, Llo), support);
            const bool vanish_measurable = s_lo > options.sign_floor;
            if (vanish_measurable) eng_vanish = s_hi < options.cycle_vanish_ratio * s_lo;
            cyc["strength"] = Json{{"b_low", *lo_b}, {"b_high", *hi_b}, {"L_low", s_lo}, {"L_high", s_hi},
                                   {"ratio", vanish_measurable ? Json(s_hi / s_lo) : Json(nullptr)},
                                   {"support_concentration_low", conc}, {"measurable", vanish_measurable}};
            measured = measured || vanish_measurable;
            if (!vanish_measurable) eng_vanish = true;
        }
        const bool eng_cyc = eng_signs && eng_vanish;
        any_cycle_measured = any_cycle_measured || measured;
        if (measured) cycles_ok = cycles_ok && eng_cyc;
        cyc["measured"] = measured;
        cyc["pass"] = measured ? Json(eng_cyc) : Json(nullptr);
        cyc_engines[engine] = std::move(cyc);
    }
    cycles_ok = cycles_ok && any_cycle_measured && theory.has_value();

    selection["engines"] = std::move(sel_engines);
    selection["pass"] = selection_ok;
    speed["engines"] = std::move(speed_engines);
    speed["pass"] = speed_ok;
    cycles["theory"] = theory ? to_json(*theory) : Json(nullptr);
    cycles["engines"] = std::move(cyc_engines);
    cycles["pass"] = cycles_ok;

    // ODE time per ABM round under the mean-field limit of the revision rule.
    const double scale = abm.adoption_scale.value_or(default_adoption_scale(A));
    const double factor = abm.prob_revision * (1.0 - abm.prob_mutation) / scale;
    Json side = Json::array();
    if (groups.count("ode") && groups.count("abm")) {
        for (const auto& [b, rs] : groups.at("abm").by_b) {
            if (!groups.at("ode").by_b.count(b)) continue;
            const auto* o = groups.at("ode").by_b.at(b).front();
            double sum = 0.0;
            std::size_t cnt = 0;
            for (const auto* r : rs) {
                if (r->tau_half) {
                    sum += *r->tau_half;
                    ++cnt;
                }
            }
            side.push_back(Json{{"b", b},
                                {"ode_tau_half", o->tau_half ? Json(*o->tau_half) : Json(nullptr)},
                                {"abm_tau_half_rounds", cnt ? Json(sum / static_cast<double>(cnt)) : Json(nullptr)},
                                {"abm_tau_half_ode_units", cnt ? Json(factor * sum / static_cast<double>(cnt)) : Json(nullptr)}});
        }
    }

    return Json{{"predictions", Json{{"selection", std::move(selection)}, {"speed", std::move(speed)},
                                     {"cycles", std::move(cycles)}}},
                {"calibration", Json{{"ode_time_per_round", factor},
                                     {"formula", "prob_revision * (1 - prob_mutation) / adoption_scale"},
                                     {"adoption_scale", scale}}},
                {"tau_side_by_side", std::move(side)},
                {"passed", selection_ok && speed_ok && cycles_ok}};
}

bool evaluation_passed(const Json& evaluation) { return evaluation.value("passed", false); }

}  // namespace gamectl
