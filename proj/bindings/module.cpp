#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "fin/baselines.hpp"
#include "fin/errors.hpp"
#include "fin/evaluation.hpp"
#include "fin/extended_graph.hpp"
#include "fin/feasible_graph.hpp"
#include "fin/harness.hpp"
#include "fin/report_io.hpp"
#include "fin/scenario.hpp"
#include "fin/solver.hpp"

namespace py = pybind11;

namespace {

py::object json_to_py(const nlohmann::ordered_json& j) {
  py::module_ json_mod = py::module_::import("json");
  return json_mod.attr("loads")(j.dump());
}

py::dict row_to_dict(const fin::ResultRow& row) {
  py::module_ json_mod = py::module_::import("json");
  return json_mod.attr("loads")(fin::solve_result_to_json(row));
}

fin::Configuration configuration_from_dict(const py::dict& d) {
  fin::Configuration cfg;
  cfg.application = d["application"].cast<std::string>();
  if (d.contains("exit_index")) cfg.exit_index = d["exit_index"].cast<int>();
  for (py::handle item : d["placements"]) {
    py::dict p = item.cast<py::dict>();
    cfg.placements.emplace_back(p["block"].cast<int>(),
                                p["node"].cast<std::string>());
  }
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Minimum-energy placement of early-exit DNN blocks on "
            "multi-tiered networks";

  py::register_exception<fin::ParseError>(m, "ParseError");
  py::register_exception<fin::ValidationError>(m, "ValidationError");
  py::register_exception<fin::UnitError>(m, "UnitError");
  py::register_exception<fin::SearchGuardError>(m, "SearchGuardError");

  py::class_<fin::Scenario>(m, "Scenario")
      .def_property_readonly("node_count",
                             [](const fin::Scenario& s) { return s.nodes.size(); })
      .def_property_readonly(
          "link_count", [](const fin::Scenario& s) { return s.links.size(); })
      .def_property_readonly(
          "applications",
          [](const fin::Scenario& s) {
            std::vector<std::string> ids;
            for (const auto& a : s.applications) ids.push_back(a.id);
            return ids;
          })
      .def("to_json", [](const fin::Scenario& s) {
        return fin::scenario_to_json_text(s);
      })
      .def("__repr__", [](const fin::Scenario& s) {
        return "<Scenario nodes=" + std::to_string(s.nodes.size()) +
               " applications=" + std::to_string(s.applications.size()) + ">";
      });

  m.def("load_scenario", [](const std::string& path) {
    return fin::load_scenario(path);
  });
  m.def("scenario_from_json", &fin::scenario_from_json_text);
  m.def("effective_bandwidth", &fin::effective_bandwidth);
  m.def("effective_compute", &fin::effective_compute);
  m.def("survival_fraction",
        [](const fin::Scenario& s, const std::string& app, int block) {
          return fin::survival_fraction(s.application(app), block);
        });

  m.def(
      "solve",
      [](const fin::Scenario& s, const std::string& app,
         const std::string& algorithm, int gamma, int lambda,
         const std::string& mode, long long opt_guard) {
        fin::SolverParams params;
        params.gamma = gamma;
        params.lambda = lambda;
        params.mode = fin::traversal_mode_from_name(mode);
        params.opt_guard = opt_guard;
        return row_to_dict(
            fin::solve_one(s, app, fin::algorithm_from_name(algorithm), params));
      },
      py::arg("scenario"), py::arg("app"), py::arg("algorithm") = "fin-exact",
      py::arg("gamma") = 10, py::arg("lambda") = 0,
      py::arg("mode") = "survival", py::arg("opt_guard") = fin::kDefaultOptGuard);

  m.def(
      "evaluate",
      [](const fin::Scenario& s, const std::string& app, const py::dict& cfg,
         const std::string& mode) {
        fin::Configuration configuration = configuration_from_dict(cfg);
        fin::EvaluationReport report = fin::evaluate(
            s, app, configuration, fin::traversal_mode_from_name(mode));
        py::module_ json_mod = py::module_::import("json");
        return json_mod.attr("loads")(fin::report_to_json(report));
      },
      py::arg("scenario"), py::arg("app"), py::arg("configuration"),
      py::arg("mode") = "survival");

  m.def(
      "sweep",
      [](const fin::Scenario& s, const std::string& app,
         const std::vector<std::string>& algorithms, const std::string& axis,
         const std::vector<double>& values, int gamma, int lambda,
         const std::string& mode) {
        std::vector<fin::Algorithm> algos;
        for (const auto& name : algorithms) {
          algos.push_back(fin::algorithm_from_name(name));
        }
        fin::SolverParams params;
        params.gamma = gamma;
        params.lambda = lambda;
        params.mode = fin::traversal_mode_from_name(mode);
        auto rows = fin::sweep(s, app, algos, fin::sweep_axis_from_name(axis),
                               values, params);
        py::list result;
        for (const auto& row : rows) result.append(row_to_dict(row));
        return result;
      },
      py::arg("scenario"), py::arg("app"), py::arg("algorithms"),
      py::arg("axis"), py::arg("values"), py::arg("gamma") = 10,
      py::arg("lambda") = 0, py::arg("mode") = "survival");

  m.def(
      "run_multi_app",
      [](const fin::Scenario& s, int users,
         const std::vector<std::string>& algorithms, int gamma,
         const std::string& mode, std::uint64_t seed) {
        fin::MultiAppOptions options;
        options.users = users;
        options.params.gamma = gamma;
        options.params.mode = fin::traversal_mode_from_name(mode);
        options.seed = seed;
        options.algorithms.clear();
        for (const auto& name : algorithms) {
          options.algorithms.push_back(fin::algorithm_from_name(name));
        }
        fin::MultiAppResult result = fin::run_multi_app(s, options);
        py::dict out;
        py::list rows;
        for (const auto& row : result.rows) rows.append(row_to_dict(row));
        out["rows"] = rows;
        out["csv"] = fin::multi_app_to_csv(result);
        py::dict failure;
        for (const auto& [algo, p] : result.aggregate.failure_probability) {
          failure[py::str(algo)] = p;
        }
        out["failure_probability"] = failure;
        py::dict ratio;
        for (const auto& [algo, r] : result.aggregate.energy_ratio_vs_mcp) {
          ratio[py::str(algo)] = r;
        }
        out["energy_ratio_vs_mcp"] = ratio;
        return out;
      },
      py::arg("scenario"), py::arg("users"),
      py::arg("algorithms") = std::vector<std::string>{"fin-exact", "mcp"},
      py::arg("gamma") = 10, py::arg("mode") = "survival", py::arg("seed") = 0);

  m.attr("__version__") = "0.1.0";
}
