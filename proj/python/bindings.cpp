#include "mobmech/cli/commands.hpp"
#include "mobmech/cli/generator.hpp"
#include "mobmech/cli/scenario_io.hpp"
#include "mobmech/lp.hpp"
#include "mobmech/mechanism.hpp"
#include "mobmech/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <variant>

namespace py = pybind11;
using namespace mobmech;

namespace {

template <typename T>
py::object maybe(const std::optional<T>& v) {
  return v ? py::cast(*v) : py::none();
}

py::dict tables_dict(const MechanismTables& t) {
  py::dict d;
  d["objective"] = t.objective;
  d["v_worst"] = t.v_worst.values;
  d["v_worst_scenario"] = maybe(t.v_worst.scenario_index);
  d["worst_scenario_by_traveler"] = t.worst_scenario;
  d["nominal_assignment"] = t.nominal;
  d["worst_case_revenue"] = t.worst_case_revenue;
  d["reservation_payments"] = t.reservations;
  d["gamma"] = t.gamma;
  d["gamma_scenario_by_traveler"] = t.gamma_scenario;
  return d;
}

py::dict outcome_dict(const PricingOutcome& o) {
  py::dict d;
  d["realized_scenario"] = maybe(o.realized.scenario_index);
  d["adapted_assignment"] = o.adapted;
  d["exclusion_assignments"] = o.exclusions;
  d["final_assignment"] = o.final_assignment;
  d["payments"] = o.payments;
  d["utilities"] = o.utilities;
  return d;
}

py::dict property_dict(const verify::PropertyReport& r) {
  py::dict d;
  d["property"] = std::string(verify::to_string(r.property));
  d["passed"] = r.passed;
  d["worst_violation"] = r.worst_violation;
  d["tolerance"] = r.tolerance;
  py::dict w;
  w["traveler"] = maybe(r.witness.traveler);
  w["scenario"] = maybe(r.witness.scenario);
  w["misreport"] = maybe(r.witness.misreport);
  d["witness"] = w;
  return d;
}

lp::Relation relation_from(const std::string& s) {
  if (s == "<=") return lp::Relation::kLessEqual;
  if (s == ">=") return lp::Relation::kGreaterEqual;
  if (s == "=" || s == "==") return lp::Relation::kEqual;
  throw PreconditionError("relation must be one of <=, >=, =; got " + s);
}

cli::CommandOptions command_options(const std::string& format, std::optional<double> tolerance,
                                    std::size_t jobs, double payment_scale) {
  cli::CommandOptions o;
  if (format == "json") {
    o.format = cli::Format::kJson;
  } else if (format == "table") {
    o.format = cli::Format::kTable;
  } else {
    throw PreconditionError("format must be json or table");
  }
  o.tolerance = tolerance;
  o.jobs = jobs;
  o.payment_scale = payment_scale;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Worst-case mobility mechanism core";
  m.attr("__version__") = MOBMECH_VERSION;

  static py::exception<Error> base(m, "MobmechError", PyExc_RuntimeError);
  static py::exception<cli::ParseError> parse_error(m, "ParseError", PyExc_ValueError);
  static py::exception<cli::ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const cli::ParseError& e) {
      py::set_error(parse_error, e.what());
    } catch (const cli::ValidationError& e) {
      py::set_error(validation_error, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<MarketInstance>(m, "Instance")
      .def(py::init([](const Vector& budgets, std::vector<int> service_limits,
                       std::vector<int> capacities, std::vector<Matrix> scenarios,
                       std::string name) {
             MarketInstance in;
             in.budgets = budgets;
             in.service_limits = std::move(service_limits);
             in.capacities = std::move(capacities);
             in.scenarios = std::move(scenarios);
             in.name = std::move(name);
             return in;
           }),
           py::arg("budgets"), py::arg("service_limits"), py::arg("capacities"),
           py::arg("scenarios"), py::arg("name") = "")
      .def_readwrite("name", &MarketInstance::name)
      .def_readwrite("budgets", &MarketInstance::budgets)
      .def_readwrite("service_limits", &MarketInstance::service_limits)
      .def_readwrite("capacities", &MarketInstance::capacities)
      .def_readwrite("scenarios", &MarketInstance::scenarios)
      .def_property_readonly("travelers", &MarketInstance::travelers)
      .def_property_readonly("services", &MarketInstance::services)
      .def("scale", &MarketInstance::scale)
      .def("__repr__", [](const MarketInstance& in) {
        return "Instance(name='" + in.name + "', travelers=" + std::to_string(in.travelers()) +
               ", services=" + std::to_string(in.services()) +
               ", scenarios=" + std::to_string(in.scenario_count()) + ")";
      });

  m.def(
      "validate",
      [](const MarketInstance& in) {
        py::list out;
        for (const auto& issue : validate(in)) {
          out.append(py::make_tuple(issue.severity == Severity::kError ? "error" : "warning",
                                    issue.path, issue.message));
        }
        return out;
      },
      py::arg("instance"), "List of (severity, path, message) tuples.");

  py::class_<Mechanism>(m, "Mechanism")
      .def(py::init([](const MarketInstance& in, double tolerance) {
             MechanismOptions o;
             o.tolerance = tolerance;
             return Mechanism(in, o);
           }),
           py::arg("instance"), py::arg("tolerance") = 1e-7)
      .def_property_readonly("instance", &Mechanism::instance)
      .def_property_readonly("tables", [](const Mechanism& self) { return tables_dict(self.tables()); })
      .def(
          "price",
          [](const Mechanism& self, std::variant<std::size_t, Matrix> realized) {
            if (const auto* index = std::get_if<std::size_t>(&realized)) {
              return outcome_dict(self.price_scenario(*index));
            }
            return outcome_dict(self.price(ValuationProfile{std::get<Matrix>(realized), std::nullopt}));
          },
          py::arg("realized"), "Price a scenario index or an explicit valuation matrix.")
      .def(
          "verify",
          [](const Mechanism& self, std::optional<double> tolerance, double payment_scale,
             std::size_t jobs) {
            const auto suite = verify::run_suite(
                self, tolerance.value_or(self.options().tolerance), payment_scale, jobs);
            py::dict d;
            py::list props;
            for (const auto& r : suite.reports) props.append(property_dict(r));
            d["passed"] = suite.passed();
            d["properties"] = props;
            py::list outcomes;
            for (const auto& o : suite.outcomes) outcomes.append(outcome_dict(o));
            d["outcomes"] = outcomes;
            return d;
          },
          py::arg("tolerance") = py::none(), py::arg("payment_scale") = 1.0, py::arg("jobs") = 1);

  m.def(
      "run_pipeline",
      [](const MarketInstance& in, const Matrix& realized) {
        return outcome_dict(run_pipeline(in, ValuationProfile{realized, std::nullopt}));
      },
      py::arg("instance"), py::arg("realized"));

  m.def(
      "lp_solve",
      [](const Vector& c, const Matrix& a, const Vector& rhs, const std::vector<std::string>& relations,
         std::optional<Vector> lower, std::optional<Vector> upper, double tolerance) {
        lp::Problem p;
        p.objective = c;
        p.constraints = a;
        p.rhs = rhs;
        for (const auto& r : relations) p.relations.push_back(relation_from(r));
        p.lower = lower.value_or(Vector::Zero(c.size()));
        p.upper = upper.value_or(Vector::Constant(c.size(), lp::kInfinity));
        lp::Options o;
        o.tolerance = tolerance;
        const auto s = lp::solve(p, o);
        py::dict d;
        d["status"] = std::string(lp::to_string(s.status));
        d["primal"] = s.primal;
        d["dual"] = s.dual;
        d["objective"] = s.objective;
        d["iterations"] = s.iterations;
        return d;
      },
      py::arg("c"), py::arg("A"), py::arg("rhs"), py::arg("relations"),
      py::arg("lower") = py::none(), py::arg("upper") = py::none(), py::arg("tolerance") = 1e-9,
      "Maximize c'x subject to A x (relations) rhs and lower <= x <= upper.");

  m.def("parse_scenario", [](const std::string& path) { return cli::parse_scenario(path).instance; },
        py::arg("path"));
  m.def(
      "parse_scenario_text",
      [](const std::string& text) { return cli::parse_scenario_text(text).instance; },
      py::arg("text"));
  m.def("emit_scenario", [](const MarketInstance& in) { return cli::emit_scenario(in); },
        py::arg("instance"));
  m.def(
      "generate_instance",
      [](std::size_t travelers, std::size_t services, std::size_t scenarios, std::uint64_t seed) {
        return cli::generate_instance(travelers, services, scenarios, seed,
                                      cli::default_generator_config());
      },
      py::arg("travelers"), py::arg("services"), py::arg("scenarios") = 1, py::arg("seed") = 0);

  py::class_<cli::CommandResult>(m, "CommandResult")
      .def_readonly("exit_code", &cli::CommandResult::exit_code)
      .def_readonly("output", &cli::CommandResult::output)
      .def_readonly("diagnostics", &cli::CommandResult::diagnostics);

  m.def(
      "cmd_solve",
      [](const std::string& path, const std::string& format, std::optional<double> tolerance) {
        return cli::cmd_solve(path, command_options(format, tolerance, 1, 1.0));
      },
      py::arg("path"), py::arg("format") = "json", py::arg("tolerance") = py::none());
  m.def(
      "cmd_price",
      [](const std::string& path, std::size_t realized, const std::string& format,
         std::optional<double> tolerance) {
        return cli::cmd_price(path, realized, command_options(format, tolerance, 1, 1.0));
      },
      py::arg("path"), py::arg("realized"), py::arg("format") = "json",
      py::arg("tolerance") = py::none());
  m.def(
      "cmd_verify",
      [](const std::string& path, const std::string& format, std::optional<double> tolerance,
         std::size_t jobs, double payment_scale) {
        return cli::cmd_verify(path, command_options(format, tolerance, jobs, payment_scale));
      },
      py::arg("path"), py::arg("format") = "json", py::arg("tolerance") = py::none(),
      py::arg("jobs") = 1, py::arg("payment_scale") = 1.0);
}
