#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "splitsim/corrupt.hpp"
#include "splitsim/explain.hpp"
#include "splitsim/fuzz.hpp"
#include "splitsim/omega_ce.hpp"
#include "splitsim/scenario.hpp"
#include "splitsim/verifier.hpp"

namespace py = pybind11;
using namespace splitsim;

namespace {

ConstructionKind construction_from(const std::string& name) {
  if (name == "sacks") return ConstructionKind::Sacks;
  if (name == "robinson") return ConstructionKind::Robinson;
  throw std::invalid_argument("construction must be sacks or robinson");
}

py::dict run_scenario(const std::string& scenario_json) {
  const Scenario sc = load_scenario_text(scenario_json);
  const RunResult result = run(sc);
  const VerificationReport report = verify(sc, result.trace, &result.final);
  py::dict out;
  out["trace"] = format_trace(result.trace);
  out["report"] = report.to_json().dump();
  out["passed"] = report.passed();
  out["settled"] = report.settled();
  out["aborted"] = result.final.failure.has_value();
  return out;
}

py::dict verify_trace(const std::string& scenario_json, const std::string& trace_text) {
  const Scenario sc = load_scenario_text(scenario_json);
  const VerificationReport report = verify(sc, parse_trace(trace_text));
  py::dict out;
  out["report"] = report.to_json().dump();
  out["passed"] = report.passed();
  out["settled"] = report.settled();
  return out;
}

ApproxTable table_from(int last_stage, const std::vector<std::vector<Stage>>& flips, const std::vector<int>& bounds) {
  return ApproxTable::from_flips(last_stage, flips, bounds);
}

}  // namespace

PYBIND11_MODULE(_splitsim, m) {
  m.doc() = "Bindings for the splitsim core library";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<TraceParseError>(m, "TraceParseError", PyExc_ValueError);
  py::register_exception<ApproxError>(m, "ApproxError", PyExc_ValueError);
  py::register_exception<CorruptionInapplicable>(m, "CorruptionInapplicable", PyExc_ValueError);

  m.def("pair", &pair, py::arg("a"), py::arg("b"));
  m.def("unpair", &unpair, py::arg("n"));

  m.def("normalize_scenario", [](const std::string& text) { return scenario_to_json(load_scenario_text(text)).dump(); },
        py::arg("scenario_json"));
  m.def("run", &run_scenario, py::arg("scenario_json"));
  m.def("verify", &verify_trace, py::arg("scenario_json"), py::arg("trace"));
  m.def(
      "corrupt",
      [](const std::string& scenario_json, const std::string& trace_text, const std::string& check) {
        const Scenario sc = load_scenario_text(scenario_json);
        return format_trace(corrupt_trace(sc, parse_trace(trace_text), check));
      },
      py::arg("scenario_json"), py::arg("trace"), py::arg("check"));

  m.def(
      "generate_scenario",
      [](std::uint64_t seed, std::uint64_t index, const std::string& construction, int max_horizon) {
        FuzzParams params;
        params.construction = construction_from(construction);
        params.max_horizon = max_horizon;
        return scenario_to_json(generate_scenario(seed, index, params)).dump();
      },
      py::arg("seed"), py::arg("index"), py::arg("construction"), py::arg("max_horizon") = 256);
  m.def(
      "fuzz",
      [](std::uint64_t seed, std::uint64_t count, const std::string& construction, int max_horizon) {
        FuzzParams params;
        params.construction = construction_from(construction);
        params.max_horizon = max_horizon;
        const FuzzSummary summary = run_fuzz(seed, count, params);
        py::dict out;
        out["passed"] = summary.passed;
        out["failed"] = summary.failed;
        out["unsettled"] = summary.unsettled;
        out["first_failure"] = summary.first_failure ? py::cast(*summary.first_failure) : py::none();
        return out;
      },
      py::arg("seed"), py::arg("count"), py::arg("construction"), py::arg("max_horizon") = 256);

  m.def(
      "explain",
      [](const std::string& trace_text, std::optional<std::string> block, std::optional<std::string> requirement,
         std::optional<int> input) {
        ExplainFilter filter;
        if (block) {
          auto f = parse_block_filter(*block);
          if (!f) throw std::invalid_argument("malformed block id");
          filter = *f;
        }
        if (requirement) {
          filter.requirement = parse_requirement_label(*requirement);
          if (!filter.requirement) throw std::invalid_argument("malformed requirement id");
        }
        filter.input = input;
        return explain(parse_trace(trace_text), filter);
      },
      py::arg("trace"), py::arg("block") = py::none(), py::arg("requirement") = py::none(),
      py::arg("input") = py::none());

  m.def(
      "limit_eval",
      [](int last_stage, const std::vector<std::vector<Stage>>& flips, const std::vector<int>& bounds, Natural x) {
        return limit_eval(table_from(last_stage, flips, bounds), x);
      },
      py::arg("last_stage"), py::arg("flips"), py::arg("bounds"), py::arg("x"));
  m.def(
      "restrict_to",
      [](int last_stage, const std::vector<std::vector<Stage>>& flips, const std::vector<int>& bounds, Natural n) {
        return restrict_to(table_from(last_stage, flips, bounds), n);
      },
      py::arg("last_stage"), py::arg("flips"), py::arg("bounds"), py::arg("n"));
  m.def(
      "change_set",
      [](int last_stage, const std::vector<std::vector<Stage>>& flips, const std::vector<int>& bounds) {
        const ChangeSet cs = build_change_set(table_from(last_stage, flips, bounds));
        std::vector<std::pair<Stage, Natural>> out;
        for (const auto& e : cs.schedule.entries()) out.emplace_back(e.stage, e.element);
        return out;
      },
      py::arg("last_stage"), py::arg("flips"), py::arg("bounds"));
}
