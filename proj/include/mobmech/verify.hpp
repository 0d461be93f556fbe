#pragma once

#include "mobmech/mechanism.hpp"
#include "mobmech/model.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Brute-force property checks. Nothing here calls into the LP solver or the
// mechanism's optimization code: every check is direct arithmetic on the
// fields of a PricingOutcome.
namespace mobmech::verify {

enum class Property {
  kFeasibility,
  kTruthfulness,
  kVoluntaryParticipation,
  kBudgetFairness,
  kSustainability,
};

std::string_view to_string(Property property);

struct Witness {
  std::optional<std::size_t> traveler;
  std::optional<std::size_t> scenario;
  std::optional<std::size_t> misreport;
};

struct PropertyReport {
  Property property = Property::kFeasibility;
  bool passed = true;
  /// Largest violation found; negative values are slack (margin to the bound).
  double worst_violation = 0.0;
  double tolerance = 0.0;
  Witness witness;
};

/// Maps a reported profile to the mechanism's outcome for that report.
using OutcomeFn = std::function<PricingOutcome(const ValuationProfile&)>;

/// For every traveler i, true scenario v and misreport row taken from any
/// scenario, computes the utility gain from reporting the misreport instead
/// of v_i. Gains are divided by `scale` before comparison with `tol`.
PropertyReport check_truthfulness(const MarketInstance& instance, const OutcomeFn& outcome_fn,
                                  double tol, double scale = 1.0);

/// p_i <= sum_j v_ij a_ij for every traveler.
PropertyReport check_voluntary_participation(const PricingOutcome& outcome, double tol,
                                             double scale = 1.0);

/// p_i <= b_i for every traveler.
PropertyReport check_budget_fairness(const PricingOutcome& outcome, const Vector& budgets,
                                     double tol, double scale = 1.0);

/// min over outcomes of total payments >= worst_case_objective.
PropertyReport check_sustainability(const std::vector<PricingOutcome>& outcomes,
                                    double worst_case_objective, double tol, double scale = 1.0);

/// Final assignment is nonnegative and within service limits and capacities.
PropertyReport check_feasibility(const PricingOutcome& outcome, const MarketInstance& instance,
                                 double tol, double scale = 1.0);

/// Grid search over [0, upper]^k for the best objective among feasible points.
/// Points with coordinates in {0, upper} are always included. Throws
/// CapacityError when the grid would exceed `max_points`.
struct GridResult {
  double value = 0.0;
  Vector point;
  bool found = false;
};
GridResult grid_search(const Vector& upper, double step,
                       const std::function<bool(const Vector&)>& feasible,
                       const std::function<double(const Vector&)>& objective,
                       std::size_t max_points = 10'000'000);

struct BruteForceResult {
  double value = 0.0;
  Assignment assignment;
};

/// Exhaustive welfare maximization for one scenario: maximize sum v_ij a_ij
/// subject to service limits, capacities, sum_j v_ij a_ij <= b_i, a >= 0,
/// searched on a grid of spacing `step` plus all 0/1 corners. Requires
/// travelers * services <= 9.
BruteForceResult brute_force_assignment(const MarketInstance& instance, const Matrix& scenario,
                                        double step);

/// Every property over every scenario of the instance.
struct SuiteResult {
  std::vector<PropertyReport> reports;
  std::vector<PricingOutcome> outcomes;  // one per scenario, in order
  bool passed() const;
};

/// `payment_scale` multiplies every payment after pricing; 1.0 leaves the
/// mechanism untouched, anything else is a deliberate mutation used to show
/// the checks are not vacuous.
SuiteResult run_suite(const Mechanism& mechanism, double tol, double payment_scale = 1.0,
                      std::size_t jobs = 1);

}  // namespace mobmech::verify
