#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "acno/dirichlet_model.hpp"
#include "acno/environments.hpp"
#include "acno/harness.hpp"
#include "acno/planner.hpp"

namespace py = pybind11;
using namespace acno;

namespace {

// Configs cross the boundary as JSON text; the Python side wraps them in dicts.
py::dict summary_dict(const Summary& s) {
  py::dict d;
  d["mean_sr"] = s.mean_sr;
  d["mean_measures"] = s.mean_measures;
  d["mean_raw"] = s.mean_raw;
  d["truncated_fraction"] = s.truncated_fraction;
  d["rep_sr"] = s.rep_sr;
  d["rep_measures"] = s.rep_measures;
  return d;
}

py::dict run_json(const std::string& config_text) {
  const auto config = config_from_json(nlohmann::json::parse(config_text));
  RunResult result;
  {
    py::gil_scoped_release release;
    result = run(config);
  }
  py::list records;
  for (const auto& r : result.records) {
    py::dict d;
    d["repetition"] = r.repetition;
    d["episode"] = r.episode;
    d["scalarized_return"] = r.scalarized_return;
    d["raw_return"] = r.raw_return;
    d["measurements"] = r.measurements;
    d["steps"] = r.steps;
    d["truncated"] = r.truncated;
    d["seed"] = r.seed;
    records.append(std::move(d));
  }
  py::dict out;
  out["config"] = config_to_json(result.config).dump();
  out["summary"] = summary_dict(result.summary);
  out["records"] = records;
  return out;
}

py::dict verify_suite(const std::string& suite, std::uint64_t seed, std::size_t instances,
                      std::size_t horizon, std::size_t psi_tables) {
  VerifyReport report;
  {
    py::gil_scoped_release release;
    report = verify(parse_suite(suite), seed, instances, horizon, psi_tables);
  }
  py::list rows;
  for (const auto& r : report.rows) {
    py::dict d;
    d["instance"] = r.instance;
    d["seed"] = r.seed;
    d["states"] = r.states;
    d["actions"] = r.actions;
    d["cost"] = r.cost;
    d["discount"] = r.discount;
    d["lhs"] = r.lhs;
    d["rhs"] = r.rhs;
    d["note"] = r.note;
    d["pass"] = r.pass;
    rows.append(std::move(d));
  }
  py::dict out;
  out["suite"] = report.suite;
  out["failures"] = report.failures;
  out["budget_overflows"] = report.budget_overflows;
  out["rows"] = rows;
  return out;
}

PolicySpec policy_from_name(const std::string& name) {
  if (name == "measuring-value") return PolicySpec::measuring_value();
  if (name == "approx-mv") return PolicySpec::approx_mv();
  if (name == "always") return PolicySpec::always();
  if (name == "never") return PolicySpec::never();
  throw std::invalid_argument("unknown policy '" + name + "' (measuring-value, approx-mv, always, never)");
}

}  // namespace

PYBIND11_MODULE(_acno, m) {
  m.doc() = "Tabular ACNO-MDP agents, environments and exact planner";

  py::class_<TabularAcnoMdp>(m, "AcnoMdp")
      .def_property_readonly("state_count", &TabularAcnoMdp::state_count)
      .def_property_readonly("action_count", &TabularAcnoMdp::action_count)
      .def_property_readonly("measure_cost", &TabularAcnoMdp::measure_cost)
      .def_property_readonly("discount", &TabularAcnoMdp::discount)
      .def_property_readonly("r_max", &TabularAcnoMdp::r_max)
      .def("transition", &TabularAcnoMdp::transition, py::arg("s"), py::arg("a"), py::arg("next"))
      .def("reward", py::overload_cast<StateId, ActionId>(&TabularAcnoMdp::reward, py::const_),
           py::arg("s"), py::arg("a"))
      .def("is_terminal", &TabularAcnoMdp::is_terminal, py::arg("s"))
      .def("with_cost", &TabularAcnoMdp::with_cost, py::arg("cost"));

  m.def("measuring_value_env",
        [](double p, double cost, double discount) { return build_measuring_value({p, cost, discount}); },
        py::arg("p") = 0.8, py::arg("cost") = 0.05, py::arg("discount") = 1.0);
  m.def("frozen_lake",
        [](const std::vector<std::string>& grid, const std::string& variant, double cost, double discount) {
          return build_frozen_lake({grid, parse_variant(variant), cost, discount});
        },
        py::arg("grid"), py::arg("variant") = "semi-slippery", py::arg("cost") = 0.05,
        py::arg("discount") = 0.95);
  m.def("heuristic_failure_env", &build_fig4_example, py::arg("cost"), py::arg("eps") = 1e-9,
        py::arg("discount") = 0.95);
  m.def("standard_map", &standard_map, py::arg("name"));
  m.def("generate_random_map", &generate_random_map, py::arg("n"), py::arg("seed"),
        py::arg("frozen_prob") = 0.8, py::arg("max_attempts") = 10000);
  m.def("analytic_measuring_return", &analytic_measuring_return, py::arg("p"), py::arg("cost"),
        py::arg("discount"), py::arg("n_max"));

  py::class_<ExactPlanner>(m, "ExactPlanner")
      .def(py::init<const TabularAcnoMdp&, std::size_t, std::size_t>(), py::arg("mdp"),
           py::arg("horizon"), py::arg("node_budget") = 2'000'000)
      .def("evaluate",
           [](const ExactPlanner& p, const std::string& policy) {
             return p.evaluate(policy_from_name(policy)).value;
           },
           py::arg("policy") = "measuring-value")
      .def("optimal", [](const ExactPlanner& p) { return p.optimal().value; });

  py::class_<DirichletModel>(m, "DirichletModel")
      .def(py::init<std::size_t, std::size_t>(), py::arg("state_count"), py::arg("action_count"))
      .def("record", &DirichletModel::record_measured_transition, py::arg("s"), py::arg("a"),
           py::arg("next"), py::arg("reward"))
      .def("estimated_p", &DirichletModel::estimated_p, py::arg("s"), py::arg("a"))
      .def("measured_visits", &DirichletModel::measured_visits, py::arg("s"), py::arg("a"))
      .def("serialize", &DirichletModel::serialize)
      .def_static("deserialize", &DirichletModel::deserialize, py::arg("text"));

  m.def("_run", &run_json, py::arg("config_json"));
  m.def("verify", &verify_suite, py::arg("suite"), py::arg("seed") = 1, py::arg("instances") = 200,
        py::arg("horizon") = 6, py::arg("psi_tables") = 64);
}
