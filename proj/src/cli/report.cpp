#include "mobmech/cli/report.hpp"

#include "json.hpp"

#include <iomanip>
#include <sstream>

namespace mobmech::cli {

namespace {

using nlohmann::ordered_json;

double tidy(double x) { return x == 0.0 ? 0.0 : x; }  // drops the sign of -0

ordered_json vector_json(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(tidy(v(k)));
  return out;
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(tidy(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

template <typename T>
ordered_json optional_json(const std::optional<T>& value) {
  return value ? ordered_json(*value) : ordered_json(nullptr);
}

ordered_json tables_json(const MechanismTables& t) {
  ordered_json out;
  out["objective"] = tidy(t.objective);
  out["v_worst_scenario"] = optional_json(t.v_worst.scenario_index);
  out["worst_scenario_by_traveler"] = t.worst_scenario;
  out["v_worst"] = matrix_json(t.v_worst.values);
  out["nominal_assignment"] = matrix_json(t.nominal);
  out["worst_case_revenue"] = vector_json(t.worst_case_revenue);
  out["reservation_payments"] = matrix_json(t.reservations);
  out["gamma"] = matrix_json(t.gamma);
  out["gamma_scenario_by_traveler"] = t.gamma_scenario;
  return out;
}

ordered_json outcome_json(const PricingOutcome& o, bool detailed) {
  ordered_json out;
  out["realized_scenario"] = optional_json(o.realized.scenario_index);
  if (detailed) out["adapted_assignment"] = matrix_json(o.adapted);
  out["final_assignment"] = matrix_json(o.final_assignment);
  out["payments"] = vector_json(o.payments);
  out["utilities"] = vector_json(o.utilities);
  out["revenue"] = tidy(o.payments.sum());
  if (detailed) {
    ordered_json exclusions = ordered_json::array();
    for (const auto& a : o.exclusions) exclusions.push_back(matrix_json(a));
    out["exclusion_assignments"] = std::move(exclusions);
  }
  return out;
}

ordered_json property_json(const verify::PropertyReport& r) {
  ordered_json out;
  out["property"] = std::string(verify::to_string(r.property));
  out["passed"] = r.passed;
  out["worst_violation"] = tidy(r.worst_violation);
  out["tolerance"] = r.tolerance;
  ordered_json witness;
  witness["traveler"] = optional_json(r.witness.traveler);
  witness["scenario"] = optional_json(r.witness.scenario);
  witness["misreport"] = optional_json(r.witness.misreport);
  out["witness"] = std::move(witness);
  return out;
}

std::string severity_name(Severity s) { return s == Severity::kError ? "error" : "warning"; }

std::string cell(double x) {
  std::ostringstream out;
  out << std::setprecision(6) << tidy(x);
  return out.str();
}

void write_matrix(std::ostream& out, const std::string& title, const Matrix& m) {
  out << title << "\n";
  out << std::setw(10) << "";
  for (Eigen::Index j = 0; j < m.cols(); ++j) out << std::setw(12) << ("s" + std::to_string(j));
  out << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << std::setw(10) << ("t" + std::to_string(i));
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << std::setw(12) << cell(m(i, j));
    out << "\n";
  }
}

void write_vector(std::ostream& out, const std::string& title, const Vector& v) {
  out << std::left << std::setw(22) << title << std::right;
  for (Eigen::Index k = 0; k < v.size(); ++k) out << std::setw(12) << cell(v(k));
  out << "\n";
}

std::string witness_text(const verify::Witness& w) {
  std::string out;
  const auto add = [&](const char* label, const std::optional<std::size_t>& v) {
    if (!v) return;
    if (!out.empty()) out += " ";
    out += std::string(label) + "=" + std::to_string(*v);
  };
  add("traveler", w.traveler);
  add("scenario", w.scenario);
  add("misreport", w.misreport);
  return out.empty() ? "-" : out;
}

}  // namespace

std::string render_json(const ReportHeader& header, const ReportBody& body) {
  ordered_json root;
  root["version"] = MOBMECH_VERSION;
  root["command"] = header.command;
  ordered_json input;
  input["name"] = header.name;
  input["digest"] = header.digest;
  input["travelers"] = header.travelers;
  input["services"] = header.services;
  input["scenarios"] = header.scenarios;
  root["input"] = std::move(input);
  root["tolerance"] = header.tolerance;
  ordered_json warnings = ordered_json::array();
  for (const auto& w : header.warnings) {
    warnings.push_back({{"severity", severity_name(w.severity)}, {"path", w.path},
                        {"message", w.message}});
  }
  root["warnings"] = std::move(warnings);

  if (body.tables) root["tables"] = tables_json(*body.tables);
  if (body.outcome) root["outcome"] = outcome_json(*body.outcome, true);
  if (body.scenario_outcomes) {
    ordered_json outcomes = ordered_json::array();
    for (const auto& o : *body.scenario_outcomes) outcomes.push_back(outcome_json(o, false));
    root["outcomes"] = std::move(outcomes);
  }
  if (body.properties) {
    ordered_json props = ordered_json::array();
    bool all = true;
    for (const auto& r : *body.properties) {
      props.push_back(property_json(r));
      all = all && r.passed;
    }
    root["properties"] = std::move(props);
    root["passed"] = all;
  }
  if (header.timing) {
    ordered_json timing;
    for (const auto& [stage, ms] : *header.timing) timing[stage + "_ms"] = ms;
    root["timing"] = std::move(timing);
  }
  return root.dump(2) + "\n";
}

std::string render_table(const ReportHeader& header, const ReportBody& body) {
  std::ostringstream out;
  out << header.command << "  " << (header.name.empty() ? "(unnamed)" : header.name) << "  "
      << header.travelers << " travelers, " << header.services << " services, "
      << header.scenarios << " scenarios  tol=" << header.tolerance << "\n";
  for (const auto& w : header.warnings) {
    out << severity_name(w.severity) << ": " << w.path << ": " << w.message << "\n";
  }

  if (body.tables) {
    const auto& t = *body.tables;
    out << "\nworst-case objective  " << cell(t.objective) << "\n";
    out << "v_worst scenario      "
        << (t.v_worst.scenario_index ? std::to_string(*t.v_worst.scenario_index)
                                     : std::string("mixed"))
        << "\n\n";
    write_matrix(out, "nominal assignment", t.nominal);
    out << "\n";
    write_matrix(out, "reservation payments", t.reservations);
    out << "\n";
    write_matrix(out, "gamma", t.gamma);
  }
  if (body.outcome) {
    const auto& o = *body.outcome;
    out << "\nrealized scenario " << (o.realized.scenario_index ? std::to_string(*o.realized.scenario_index) : "-") << "\n";
    write_matrix(out, "final assignment", o.final_assignment);
    write_vector(out, "payments", o.payments);
    write_vector(out, "utilities", o.utilities);
  }
  if (body.scenario_outcomes) {
    out << "\n" << std::left << std::setw(10) << "scenario" << std::right << std::setw(14)
        << "revenue" << std::setw(14) << "min utility" << "\n";
    for (std::size_t s = 0; s < body.scenario_outcomes->size(); ++s) {
      const auto& o = (*body.scenario_outcomes)[s];
      out << std::left << std::setw(10) << s << std::right << std::setw(14)
          << cell(o.payments.sum()) << std::setw(14)
          << cell(o.utilities.size() ? o.utilities.minCoeff() : 0.0) << "\n";
    }
  }
  if (body.properties) {
    out << "\n" << std::left << std::setw(26) << "property" << std::setw(8) << "result"
        << std::right << std::setw(16) << "worst" << "  witness\n";
    for (const auto& r : *body.properties) {
      out << std::left << std::setw(26) << verify::to_string(r.property) << std::setw(8)
          << (r.passed ? "pass" : "FAIL") << std::right << std::setw(16)
          << cell(r.worst_violation) << "  " << (r.passed ? "-" : witness_text(r.witness))
          << "\n";
    }
  }
  if (header.timing) {
    out << "\n";
    for (const auto& [stage, ms] : *header.timing) out << stage << " " << cell(ms) << " ms\n";
  }
  return out.str();
}

}  // namespace mobmech::cli
