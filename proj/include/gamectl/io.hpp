#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gamectl/abm.hpp"
#include "gamectl/control.hpp"
#include "gamectl/dynamics.hpp"
#include "gamectl/eigensystem.hpp"
#include "gamectl/metrics.hpp"

namespace gamectl {

using Json = nlohmann::ordered_json;

/// Fixed "%.12g" rendering so reruns produce byte-identical files.
std::string format_number(double v);

/// Header `t,x1..xn` and, when both series are given, `d1,d2`.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::vector<double>* d1 = nullptr,
                          const std::vector<double>* d2 = nullptr);
/// Reads the `t,x1..xn` columns back; extra columns are ignored.
Trajectory read_trajectory_csv(std::istream& in);

/// Header `b,k1..kn`, one row per design.
void write_gains_csv(std::ostream& out, const std::vector<ControllerDesign>& designs);

Json complex_to_json(const Complex& z);
Json to_json(const EigenSystem& es);
Json to_json(const PairValues& values);  // object keyed "m,n", 1-based
Json to_json(const MetricsReport& report);
Json to_json(const ControllerDesign& design);
Json abm_manifest(const ABMConfig& cfg, double wall_seconds);

/// One line of summary.csv. Beyond the required columns it carries the
/// per-plane angular momenta, both threshold crossing times and the
/// terminal distances, so every evaluation verdict can be recomputed from
/// the file alone.
struct SummaryRow {
    double b = 0.0;
    std::string engine;
    std::uint64_t seed = 0;
    Selection selected = Selection::undecided;
    std::optional<double> tau_half;
    double L_strength = 0.0;
    Eigen::VectorXd rho;
    std::vector<double> L;  // C(n, 2) planes in lexicographic order
    std::optional<double> tau_nash1;
    std::optional<double> tau_nash2;
    double d1_end = 0.0;
    double d2_end = 0.0;
    std::string error;  // non-empty when the run failed

    static SummaryRow from_report(double b, std::string engine, std::uint64_t seed, const MetricsReport& r);
};

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows, std::size_t n_strategies);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace gamectl
