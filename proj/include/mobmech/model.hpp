#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace mobmech {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Fractional traveler x service assignment; entry (i, j) > 0 means traveler i
/// holds (a share of) service j.
using Assignment = Matrix;

/// One payment per traveler, in currency units.
using PaymentVector = Vector;

/// A full valuation profile: row i is traveler i's valuation of every service.
struct ValuationProfile {
  Matrix values;
  /// Position in the instance's scenario set when the profile was drawn from it.
  std::optional<std::size_t> scenario_index;
};

/// Travelers, capacitated services and the finite set of valuation scenarios
/// the planner considers possible.
///
/// The traveler count is the length of `budgets`; the service count is the
/// length of `capacities`. Instances are treated as immutable values once
/// built; every operation takes them by const reference.
struct MarketInstance {
  std::string name;
  Vector budgets;                 // b_i >= 0
  std::vector<int> service_limits;  // max services per traveler, >= 1
  std::vector<int> capacities;      // max travelers per service, >= 1
  std::vector<Matrix> scenarios;    // each travelers x services

  std::size_t travelers() const { return static_cast<std::size_t>(budgets.size()); }
  std::size_t services() const { return capacities.size(); }
  std::size_t scenario_count() const { return scenarios.size(); }

  /// Largest magnitude among valuations and budgets, floored at 1. All
  /// mechanism-level tolerances are relative to this scale.
  double scale() const;
};

enum class Severity { kError, kWarning };

struct Issue {
  Severity severity = Severity::kError;
  std::string path;  // JSON-pointer-like location, e.g. "/travelers/1/budget"
  std::string message;

  bool operator==(const Issue&) const = default;
};

/// Checks every structural invariant of an instance. Returns an empty list iff
/// the instance is valid and raises no warnings. Having at least as many
/// travelers as services is reported as a warning only.
std::vector<Issue> validate(const MarketInstance& instance);

/// True iff no entry of `issues` is an error.
bool is_valid(const std::vector<Issue>& issues);

/// Checks nonnegativity, the per-traveler service limits and the service
/// capacities, each within additive tolerance `tol`.
bool is_feasible(const Assignment& a, const MarketInstance& instance, double tol = 0.0);

/// Traveler utility: sum_j v_ij a_ij - p_i.
double utility(const Eigen::Ref<const Vector>& valuation_row,
               const Eigen::Ref<const Vector>& assignment_row, double payment);

/// Total revenue collected from a payment vector.
double revenue(const PaymentVector& payments);

}  // namespace mobmech
