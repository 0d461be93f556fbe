#include "mobmech/model.hpp"

#include "mobmech/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mobmech {

double MarketInstance::scale() const {
  double s = 1.0;
  if (budgets.size() > 0) s = std::max(s, budgets.cwiseAbs().maxCoeff());
  for (const auto& v : scenarios) {
    if (v.size() > 0) s = std::max(s, v.cwiseAbs().maxCoeff());
  }
  return s;
}

namespace {

void error(std::vector<Issue>& out, std::string path, std::string message) {
  out.push_back({Severity::kError, std::move(path), std::move(message)});
}

}  // namespace

std::vector<Issue> validate(const MarketInstance& instance) {
  std::vector<Issue> issues;
  const std::size_t travelers = instance.travelers();
  const std::size_t services = instance.services();

  if (travelers < 2) error(issues, "/travelers", "traveler_count below 2");
  if (services < 1) error(issues, "/services", "service_count below 1");
  if (instance.service_limits.size() != travelers) {
    error(issues, "/travelers",
          "service_limits has " + std::to_string(instance.service_limits.size()) +
              " entries, expected " + std::to_string(travelers));
  }

  for (std::size_t i = 0; i < travelers; ++i) {
    const double b = instance.budgets(static_cast<Eigen::Index>(i));
    const std::string at = "/travelers/" + std::to_string(i);
    if (!std::isfinite(b)) {
      error(issues, at + "/budget", "budget not finite");
    } else if (b < 0.0) {
      error(issues, at + "/budget", "budget negative");
    }
    if (i < instance.service_limits.size() && instance.service_limits[i] < 1) {
      error(issues, at + "/service_limit", "service_limit below 1");
    }
  }
  for (std::size_t j = 0; j < services; ++j) {
    if (instance.capacities[j] < 1) {
      error(issues, "/services/" + std::to_string(j) + "/capacity", "capacity below 1");
    }
  }

  if (instance.scenarios.empty()) {
    error(issues, "/valuation_scenarios", "scenario set is empty");
  }
  for (std::size_t s = 0; s < instance.scenarios.size(); ++s) {
    const Matrix& v = instance.scenarios[s];
    const std::string at = "/valuation_scenarios/" + std::to_string(s);
    if (static_cast<std::size_t>(v.rows()) != travelers ||
        static_cast<std::size_t>(v.cols()) != services) {
      error(issues, at,
            "scenario shape " + std::to_string(v.rows()) + "x" + std::to_string(v.cols()) +
                " does not match " + std::to_string(travelers) + "x" +
                std::to_string(services));
    } else if (!v.allFinite()) {
      error(issues, at, "valuation not finite");
    }
  }

  if (travelers >= 2 && services >= 1 && travelers >= services) {
    issues.push_back({Severity::kWarning, "/travelers", "I >= J: expected fewer travelers than services"});
  }
  return issues;
}

bool is_valid(const std::vector<Issue>& issues) {
  return std::none_of(issues.begin(), issues.end(),
                      [](const Issue& issue) { return issue.severity == Severity::kError; });
}

bool is_feasible(const Assignment& a, const MarketInstance& instance, double tol) {
  const auto travelers = static_cast<Eigen::Index>(instance.travelers());
  const auto services = static_cast<Eigen::Index>(instance.services());
  if (a.rows() != travelers || a.cols() != services) {
    throw DimensionError("assignment is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", instance is " +
                         std::to_string(travelers) + "x" + std::to_string(services));
  }
  if ((a.array() < -tol).any()) return false;
  for (Eigen::Index i = 0; i < travelers; ++i) {
    if (a.row(i).sum() > instance.service_limits[static_cast<std::size_t>(i)] + tol) return false;
  }
  for (Eigen::Index j = 0; j < services; ++j) {
    if (a.col(j).sum() > instance.capacities[static_cast<std::size_t>(j)] + tol) return false;
  }
  return true;
}

double utility(const Eigen::Ref<const Vector>& valuation_row,
               const Eigen::Ref<const Vector>& assignment_row, double payment) {
  if (valuation_row.size() != assignment_row.size()) {
    throw DimensionError("valuation row has " + std::to_string(valuation_row.size()) +
                         " entries, assignment row has " +
                         std::to_string(assignment_row.size()));
  }
  return valuation_row.dot(assignment_row) - payment;
}

double revenue(const PaymentVector& payments) { return payments.sum(); }

}  // namespace mobmech
