#include "adequacy/composite.hpp"
#include "adequacy/copt.hpp"
#include "adequacy/estimator.hpp"
#include "adequacy/experiment.hpp"
#include "adequacy/format.hpp"
#include "adequacy/network.hpp"
#include "adequacy/rng.hpp"
#include "adequacy/solvers/lp.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace adequacy;

namespace {

nlohmann::json to_json(const py::object& obj) {
  const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return nlohmann::json::parse(text);
}

py::object from_json(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

ExperimentConfig config_from(const py::object& config, const std::optional<std::filesystem::path>& data_dir) {
  const auto dir = resolve_data_dir(data_dir);
  if (py::isinstance<py::dict>(config)) return parse_config(to_json(config), dir);
  return load_config(py::str(config).cast<std::string>(), dir);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multilevel Monte Carlo adequacy assessment";
  m.attr("__version__") = ADEQUACY_PY_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<EstimateError>(m, "EstimateError", PyExc_ArithmeticError);

  m.def("default_data_dir", [] { return resolve_data_dir(); });

  m.def(
      "run_experiment",
      [](const py::object& config, std::optional<std::filesystem::path> data_dir, std::optional<std::uint64_t> seed,
         std::optional<std::size_t> workers) {
        ExperimentConfig cfg = config_from(config, data_dir);
        if (seed) cfg.seed = *seed;
        if (workers) cfg.workers = *workers;
        ResultsRecord rec;
        {
          py::gil_scoped_release release;
          rec = run_experiment(cfg);
        }
        return from_json(rec.json);
      },
      py::arg("config"), py::arg("data_dir") = py::none(), py::arg("seed") = py::none(),
      py::arg("workers") = py::none(),
      "Runs a configuration (a dict or a path to a JSON file) and returns the results record.");

  m.def(
      "validate_config",
      [](const py::object& config, std::optional<std::filesystem::path> data_dir) {
        config_from(config, data_dir);
      },
      py::arg("config"), py::arg("data_dir") = py::none());

  m.def("check_results", [](const py::object& results) { return check_results(to_json(results)); });

  m.def(
      "copt_convolve",
      [](std::filesystem::path network, double step_mw, std::optional<std::filesystem::path> data_dir) {
        if (network.is_relative() && !std::filesystem::exists(network)) network = resolve_data_dir(data_dir) / network;
        const SnapshotRisk r = copt_convolve(load_network(network), step_mw);
        return py::dict(py::arg("PLC") = r.plc, py::arg("EPNS") = r.epns);
      },
      py::arg("network"), py::arg("step_mw") = 1.0, py::arg("data_dir") = py::none());

  py::class_<Copt>(m, "Copt")
      .def(py::init([](const std::vector<double>& cap, const std::vector<double>& avail, double step) {
             return Copt(cap, avail, step);
           }),
           py::arg("capacities"), py::arg("availabilities"), py::arg("step") = 1.0)
      .def_property_readonly("pmf", [](const Copt& c) { return std::vector<double>(c.pmf().begin(), c.pmf().end()); })
      .def_property_readonly("mean", &Copt::mean)
      .def("prob_below", &Copt::prob_below)
      .def("expected_shortfall", &Copt::expected_shortfall);

  m.def(
      "solve_lp",
      [](std::vector<double> cost, std::vector<std::vector<double>> rows, std::vector<double> row_lower,
         std::vector<double> row_upper, std::optional<std::vector<double>> lower,
         std::optional<std::vector<double>> upper) {
        solvers::BoundedLP lp(cost.size());
        lp.cost = std::move(cost);
        if (lower) lp.lower = *lower;
        if (upper) lp.upper = *upper;
        if (rows.size() != row_lower.size() || rows.size() != row_upper.size()) {
          throw std::invalid_argument("solve_lp: rows and row bounds differ in length");
        }
        for (std::size_t i = 0; i < rows.size(); ++i) lp.add_row(rows[i], row_lower[i], row_upper[i]);
        const auto r = solvers::solve_lp(lp);
        return py::dict(py::arg("status") = std::string(solvers::to_string(r.status)),
                        py::arg("objective") = r.objective, py::arg("x") = r.x, py::arg("duals") = r.row_duals);
      },
      py::arg("cost"), py::arg("rows"), py::arg("row_lower"), py::arg("row_upper"), py::arg("lower") = py::none(),
      py::arg("upper") = py::none(),
      "min cost'x subject to row_lower <= rows x <= row_upper and lower <= x <= upper "
      "(default bounds 0 and +inf).");

  m.def(
      "optimal_allocation",
      [](const std::vector<double>& var, const std::vector<double>& tau, double budget) {
        const auto plan = optimal_allocation(var, tau, budget);
        return py::dict(py::arg("counts") = plan.counts, py::arg("over_budget") = plan.over_budget);
      },
      py::arg("var_y"), py::arg("tau"), py::arg("budget"));

  m.def("speed_metric", py::overload_cast<double, double, double>(&speed_metric), py::arg("q_hat"),
        py::arg("var_q_hat"), py::arg("elapsed"));
  m.def("estimate_format", &estimate_format, py::arg("value"), py::arg("std_error"));

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint32_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id"),
           py::arg("sample_index"))
      .def("next_u32", &RngStream::next_u32)
      .def("uniform", &RngStream::uniform);
}
