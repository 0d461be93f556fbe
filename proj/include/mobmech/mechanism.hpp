#pragma once

#include "mobmech/lp.hpp"
#include "mobmech/model.hpp"

#include <cstddef>
#include <memory>
#include <vector>

namespace mobmech {

struct MechanismOptions {
  /// Comparison tolerance, relative to MarketInstance::scale().
  double tolerance = 1e-7;
  lp::Options lp;
};

/// Constraint family of a row in the worst-case nominal program.
enum class RowFamily {
  kServiceLimit,   // sum_j a_ij <= delta_i
  kCapacity,       // sum_i a_ij <= capacity_j
  kWorstCase,      // t_i <= sum_j v_ij a_ij, one row per (traveler, scenario)
  kIncentive,      // truthfulness rows; absent for a report-independent nominal
  kParticipation,  // participation rows; absent, folded into kWorstCase
  kBudget,         // sum_j v_ij a_ij <= b_i, one row per (traveler, scenario)
};

struct RowTag {
  RowFamily family = RowFamily::kServiceLimit;
  std::size_t traveler = 0;
  std::size_t service = 0;
  std::size_t scenario = 0;
  std::size_t misreport = 0;
};

/// The nominal program: one assignment a (fixed before any report arrives)
/// and one worst-case revenue variable t_i per traveler.
///
///   maximize   sum_i t_i
///   subject to sum_j a_ij <= delta_i                      (service limit)
///              sum_i a_ij <= capacity_j                   (capacity)
///              t_i - sum_j v_ij a_ij <= 0   for all v     (worst case)
///              sum_j v_ij a_ij <= b_i       for all v     (budget)
///              a >= 0, t free
///
/// The dual multiplier of traveler i's worst-case rows sums to one, which is
/// the normalization of the max-min epigraph.
struct WorstCaseProgram {
  lp::Problem problem;
  std::vector<RowTag> rows;
  std::size_t travelers = 0;
  std::size_t services = 0;

  std::size_t assignment_variable(std::size_t traveler, std::size_t service) const {
    return traveler * services + service;
  }
  std::size_t revenue_variable(std::size_t traveler) const {
    return travelers * services + traveler;
  }
};

WorstCaseProgram build_worst_case_program(const MarketInstance& instance);

/// Multipliers of the nominal program grouped by constraint family.
struct DualCertificate {
  Vector xi1;  // per traveler: service-limit rows
  Vector xi2;  // per service: capacity rows
  Matrix xi3;  // traveler x scenario: worst-case rows; every row sums to 1
  std::vector<Matrix> xi4;  // per traveler, scenario x misreport: truthfulness rows
  Matrix xi5;  // traveler x scenario: participation rows
  Matrix xi6;  // traveler x scenario: budget rows
};

struct WorstCaseSolution {
  /// Row i is traveler i's worst-case valuation: the xi3-weighted combination
  /// of that traveler's scenario rows. Carries a scenario index when every
  /// traveler's weight sits on the same scenario.
  ValuationProfile v_worst;
  Assignment nominal;
  Vector worst_case_revenue;  // t_i
  double objective = 0.0;
  /// Per traveler, the scenario carrying the largest xi3 weight (lowest index on ties).
  std::vector<std::size_t> worst_scenario;
  lp::Solution lp_solution;
};

/// Solves the nominal program. Throws MechanismError when it is infeasible or
/// unbounded (neither can happen for a valid instance).
WorstCaseSolution solve_worst_case(const MarketInstance& instance,
                                   const MechanismOptions& options = {});

/// Splits the nominal program's dual vector into the six families.
DualCertificate extract_duals(const lp::Solution& lp_solution, const MarketInstance& instance);

/// r_ij = xi1_i + xi2_j + xi5_i * vw_ij + sum_v xi6_i(v) * v_ij, with xi5_i read
/// at the worst case. Values in [-tol, 0) are clamped to zero; anything lower
/// throws ConsistencyError.
Matrix reservation_payments(const DualCertificate& duals, const ValuationProfile& v_worst,
                            const std::vector<Matrix>& scenarios, double tol = 1e-7);

/// Row i is traveler i's row of the scenario minimizing sum_j nominal_ij v_ij.
/// `chosen`, when given, receives the selected scenario per traveler.
Matrix compute_gamma(const Assignment& nominal, const std::vector<Matrix>& scenarios,
                     std::vector<std::size_t>* chosen = nullptr);

/// Everything computed before a report arrives.
struct MechanismTables {
  ValuationProfile v_worst;
  Assignment nominal;
  Matrix reservations;
  Matrix gamma;
  std::vector<std::size_t> gamma_scenario;
  DualCertificate duals;
  Vector xi5_at_worst;  // per traveler scalar used by pricing
  Vector worst_case_revenue;
  double objective = 0.0;
  std::vector<std::size_t> worst_scenario;
};

MechanismTables compute_tables(const MarketInstance& instance, const MechanismOptions& options = {});

/// Capacity left by the nominal assignment, per service.
Vector residual_capacity(const MarketInstance& instance, const MechanismTables& tables);
/// Service-limit headroom left by the nominal assignment, per traveler.
Vector residual_limit(const MarketInstance& instance, const MechanismTables& tables);
/// Budget left for adapted assignments: b_i - sum_j nominal_ij r_ij, plus
/// sum_j nominal_ij xi5_i gamma_ij when `with_participation_credit`.
Vector residual_budget(const MarketInstance& instance, const MechanismTables& tables,
                       bool with_participation_credit);

/// Report-dependent assignment added on top of the nominal one. Maximizes
/// sum_ij a_ij (v_ij - r_ij) over a set that does not depend on the report.
Assignment adapted_assignment(const MarketInstance& instance, const MechanismTables& tables,
                              const ValuationProfile& realized,
                              const MechanismOptions& options = {});

/// The same welfare program with traveler `excluded` removed; that row of the
/// result is identically zero.
Assignment exclusion_assignment(const MarketInstance& instance, const MechanismTables& tables,
                                const ValuationProfile& realized, std::size_t excluded,
                                const MechanismOptions& options = {});

/// Payments for every traveler given the adapted and exclusion assignments
/// computed for the same report.
PaymentVector price(const MarketInstance& instance, const MechanismTables& tables,
                    const ValuationProfile& realized, const Assignment& adapted,
                    const std::vector<Assignment>& exclusions);

/// nominal + adapted; throws ConsistencyError when the sum is infeasible.
Assignment final_assignment(const MarketInstance& instance, const MechanismTables& tables,
                            const Assignment& adapted, double tol = 1e-7);

struct PricingOutcome {
  ValuationProfile realized;
  Assignment adapted;
  std::vector<Assignment> exclusions;
  Assignment final_assignment;
  PaymentVector payments;
  Vector utilities;
};

/// Offline tables computed once; pricing is then a pure function of the report.
class Mechanism {
 public:
  explicit Mechanism(MarketInstance instance, MechanismOptions options = {});

  const MarketInstance& instance() const { return *instance_; }
  const MechanismTables& tables() const { return tables_; }
  const MechanismOptions& options() const { return options_; }

  PricingOutcome price(const ValuationProfile& realized) const;
  /// Prices scenario `index` of the instance.
  PricingOutcome price_scenario(std::size_t index) const;

 private:
  std::shared_ptr<const MarketInstance> instance_;
  MechanismOptions options_;
  MechanismTables tables_;
};

/// Runs the offline and online stages for one report.
PricingOutcome run_pipeline(const MarketInstance& instance, const ValuationProfile& realized,
                            const MechanismOptions& options = {});

}  // namespace mobmech
