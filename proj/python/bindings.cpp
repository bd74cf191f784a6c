#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gamectl/abm.hpp"
#include "gamectl/control.hpp"
#include "gamectl/dynamics.hpp"
#include "gamectl/eigensystem.hpp"
#include "gamectl/error.hpp"
#include "gamectl/io.hpp"
#include "gamectl/metrics.hpp"
#include "gamectl/workflow.hpp"

namespace py = pybind11;
using namespace gamectl;

namespace {

Eigen::MatrixXd stack(const Trajectory& t) {
    Eigen::MatrixXd S(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(t.dimension()));
    for (std::size_t i = 0; i < t.size(); ++i) S.row(static_cast<Eigen::Index>(i)) = t.states[i].transpose();
    return S;
}

Controller controller_for(const PayoffMatrix& A, double b, const std::string& tax_mode) {
    DesignOptions opts;
    opts.tax_mode = parse_tax_mode(tax_mode);
    return design(A, resolve_references(A), DesignRequest{{b}, std::nullopt, opts}).designs.front().controller;
}

py::tuple as_tuple(const Trajectory& t) { return py::make_tuple(t.times, stack(t)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Pole-placement control of population games";

    py::register_exception<Error>(m, "GamectlError", PyExc_ValueError);

    py::class_<PayoffMatrix>(m, "PayoffMatrix")
        .def_property_readonly("size", &PayoffMatrix::size)
        .def_property_readonly("matrix", &PayoffMatrix::real)
        .def("__repr__", [](const PayoffMatrix& A) { return "<PayoffMatrix " + std::to_string(A.size()) + "x" + std::to_string(A.size()) + ">"; });

    m.def("paper_game", &paper_game);
    m.def("load_game", &resolve_game, py::arg("spec"), "CSV path or builtin:paper");
    m.def("parse_game", [](const std::string& text) { return parse_game_csv(text); }, py::arg("text"));

    m.def("equilibria", [](const PayoffMatrix& A) {
        std::vector<Eigen::VectorXd> out;
        for (const auto& e : find_equilibria(A)) out.push_back(e.point.values());
        return out;
    });
    m.def("payoffs", &payoffs, py::arg("game"), py::arg("x"));
    m.def("jacobian", &jacobian_replicator, py::arg("game"), py::arg("x"));
    m.def("spectrum", &spectrum, py::arg("matrix"));
    m.def("eig", [](const Eigen::MatrixXd& J) {
        const auto es = eig(J);
        return py::make_tuple(es.eigenvalues, es.right_vectors);
    }, py::arg("matrix"));

    m.def("design_gains", [](const PayoffMatrix& A, const std::vector<double>& b_grid, const std::string& tax_mode) {
        DesignOptions opts;
        opts.tax_mode = parse_tax_mode(tax_mode);
        std::vector<Eigen::RowVectorXd> out;
        for (const auto& d : design(A, resolve_references(A), DesignRequest{b_grid, std::nullopt, opts}).designs) {
            out.push_back(d.controller.K);
        }
        return out;
    }, py::arg("game"), py::arg("b_grid"), py::arg("tax_mode") = "channel_sum");

    m.def("simulate_ode", [](const PayoffMatrix& A, double b, double horizon, double step, const std::string& tax_mode) {
        return as_tuple(simulate_ode(A, controller_for(A, b, tax_mode), OdeConfig{step, horizon, std::nullopt}));
    }, py::arg("game"), py::arg("b"), py::arg("horizon") = 200.0, py::arg("step") = 0.01,
       py::arg("tax_mode") = "channel_sum");

    m.def("simulate_abm", [](const PayoffMatrix& A, double b, std::uint64_t seed, std::size_t rounds) {
        ABMConfig cfg;
        cfg.seed = seed;
        cfg.rounds = rounds;
        if (A.size() != cfg.initial_counts.size()) {
            cfg.initial_counts.assign(A.size(), cfg.n_agents / A.size());
            for (std::size_t i = 0; i < cfg.n_agents % A.size(); ++i) ++cfg.initial_counts[i];
        }
        cfg.controller = controller_for(A, b, "channel_sum");
        py::gil_scoped_release release;
        auto t = run_abm(A, cfg);
        py::gil_scoped_acquire acquire;
        return as_tuple(t);
    }, py::arg("game"), py::arg("b"), py::arg("seed") = 1, py::arg("rounds") = 6000);

    m.def("angular_momenta", [](const Eigen::MatrixXd& states) {
        std::vector<Eigen::VectorXd> s;
        for (Eigen::Index i = 0; i < states.rows(); ++i) s.push_back(states.row(i).transpose());
        const auto L = angular_momenta(s);
        py::dict out;
        for (std::size_t k = 0; k < L.pairs.size(); ++k) {
            out[py::make_tuple(L.pairs[k].first + 1, L.pairs[k].second + 1)] = L.values[k];
        }
        return out;
    }, py::arg("states"), "Pairwise angular momenta keyed by 1-based (m, n)");

    m.def("_analyze_json", [](const PayoffMatrix& A) { return to_json(analyze(A)).dump(); });
    m.def("_evaluate_json", [](const std::string& summary_csv, const PayoffMatrix& A) {
        std::istringstream in(summary_csv);
        return evaluate(read_summary_csv(in), A).dump();
    });
}
