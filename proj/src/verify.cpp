#include "mobmech/verify.hpp"

#include "mobmech/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

namespace mobmech::verify {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

PropertyReport make_report(Property property, double worst, double tol, Witness witness) {
  PropertyReport report;
  report.property = property;
  report.worst_violation = worst;
  report.tolerance = tol;
  report.passed = worst <= tol;
  report.witness = witness;
  return report;
}

double value_of(const Matrix& valuations, const Assignment& a, Index traveler) {
  return valuations.row(traveler).dot(a.row(traveler));
}

// Largest normalized utility gain over travelers and misreport rows for one
// true scenario. `honest` is the outcome of the truthful report.
PropertyReport truthfulness_at(const MarketInstance& instance, const OutcomeFn& outcome_fn,
                               const PricingOutcome& honest, std::size_t s, double tol,
                               double scale) {
  const Matrix& truth = instance.scenarios[s];
  double worst = -std::numeric_limits<double>::infinity();
  Witness witness;
  for (std::size_t i = 0; i < instance.travelers(); ++i) {
    const Index row = idx(i);
    const double honest_utility =
        value_of(truth, honest.final_assignment, row) - honest.payments(row);
    for (std::size_t m = 0; m < instance.scenario_count(); ++m) {
      double gain = 0.0;
      if (instance.scenarios[m].row(row) != truth.row(row)) {
        Matrix reported = truth;
        reported.row(row) = instance.scenarios[m].row(row);
        const PricingOutcome lie = outcome_fn(ValuationProfile{reported, std::nullopt});
        // Utility is always measured with the true valuation row.
        gain = value_of(truth, lie.final_assignment, row) - lie.payments(row) - honest_utility;
      }
      gain /= scale;
      if (gain > worst) {
        worst = gain;
        witness = Witness{i, s, m};
      }
    }
  }
  if (instance.travelers() == 0) worst = 0.0;
  return make_report(Property::kTruthfulness, worst, tol, witness);
}

PropertyReport worst_of(Property property, const std::vector<PropertyReport>& parts, double tol) {
  PropertyReport merged = make_report(property, 0.0, tol, Witness{});
  bool any = false;
  for (const auto& part : parts) {
    if (!any || part.worst_violation > merged.worst_violation) {
      merged = part;
      any = true;
    }
  }
  return merged;
}

// Runs fn(0..count-1) on up to `jobs` threads; results are stored by index so
// the caller's aggregation order never depends on scheduling.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, std::size_t jobs, Fn fn) {
  std::vector<T> out(count);
  if (jobs <= 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) out[k] = fn(k);
    return out;
  }
  jobs = std::min(jobs, count);
  std::vector<std::future<void>> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t k = w; k < count; k += jobs) out[k] = fn(k);
    }));
  }
  for (auto& worker : workers) worker.get();
  return out;
}

}  // namespace

std::string_view to_string(Property property) {
  switch (property) {
    case Property::kFeasibility: return "feasibility";
    case Property::kTruthfulness: return "truthfulness";
    case Property::kVoluntaryParticipation: return "voluntary_participation";
    case Property::kBudgetFairness: return "budget_fairness";
    case Property::kSustainability: return "sustainability";
  }
  return "unknown";
}

PropertyReport check_truthfulness(const MarketInstance& instance, const OutcomeFn& outcome_fn,
                                  double tol, double scale) {
  std::vector<PropertyReport> parts;
  for (std::size_t s = 0; s < instance.scenario_count(); ++s) {
    const PricingOutcome honest = outcome_fn(ValuationProfile{instance.scenarios[s], s});
    parts.push_back(truthfulness_at(instance, outcome_fn, honest, s, tol, scale));
  }
  return worst_of(Property::kTruthfulness, parts, tol);
}

PropertyReport check_voluntary_participation(const PricingOutcome& outcome, double tol,
                                             double scale) {
  double worst = -std::numeric_limits<double>::infinity();
  Witness witness;
  witness.scenario = outcome.realized.scenario_index;
  for (Index i = 0; i < outcome.payments.size(); ++i) {
    const double violation =
        (outcome.payments(i) - value_of(outcome.realized.values, outcome.final_assignment, i)) /
        scale;
    if (violation > worst) {
      worst = violation;
      witness.traveler = static_cast<std::size_t>(i);
    }
  }
  if (outcome.payments.size() == 0) worst = 0.0;
  return make_report(Property::kVoluntaryParticipation, worst, tol, witness);
}

PropertyReport check_budget_fairness(const PricingOutcome& outcome, const Vector& budgets,
                                     double tol, double scale) {
  if (budgets.size() != outcome.payments.size()) {
    throw DimensionError("budget and payment vectors differ in length");
  }
  double worst = -std::numeric_limits<double>::infinity();
  Witness witness;
  witness.scenario = outcome.realized.scenario_index;
  for (Index i = 0; i < budgets.size(); ++i) {
    const double violation = (outcome.payments(i) - budgets(i)) / scale;
    if (violation > worst) {
      worst = violation;
      witness.traveler = static_cast<std::size_t>(i);
    }
  }
  if (budgets.size() == 0) worst = 0.0;
  return make_report(Property::kBudgetFairness, worst, tol, witness);
}

PropertyReport check_sustainability(const std::vector<PricingOutcome>& outcomes,
                                    double worst_case_objective, double tol, double scale) {
  double worst = -std::numeric_limits<double>::infinity();
  Witness witness;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const double violation = (worst_case_objective - outcomes[k].payments.sum()) / scale;
    if (violation > worst) {
      worst = violation;
      witness.scenario = outcomes[k].realized.scenario_index.value_or(k);
    }
  }
  if (outcomes.empty()) worst = 0.0;
  return make_report(Property::kSustainability, worst, tol, witness);
}

PropertyReport check_feasibility(const PricingOutcome& outcome, const MarketInstance& instance,
                                 double tol, double scale) {
  const Assignment& a = outcome.final_assignment;
  if (a.rows() != idx(instance.travelers()) || a.cols() != idx(instance.services())) {
    throw DimensionError("final assignment does not match the instance");
  }
  double worst = -std::numeric_limits<double>::infinity();
  Witness witness;
  witness.scenario = outcome.realized.scenario_index;
  const auto consider = [&](double violation, std::optional<std::size_t> traveler) {
    if (violation > worst) {
      worst = violation;
      witness.traveler = traveler;
    }
  };
  for (Index i = 0; i < a.rows(); ++i) {
    consider(-a.row(i).minCoeff(), static_cast<std::size_t>(i));
    consider(a.row(i).sum() - instance.service_limits[static_cast<std::size_t>(i)],
             static_cast<std::size_t>(i));
  }
  for (Index j = 0; j < a.cols(); ++j) {
    consider(a.col(j).sum() - instance.capacities[static_cast<std::size_t>(j)], std::nullopt);
  }
  return make_report(Property::kFeasibility, worst / scale, tol, witness);
}

GridResult grid_search(const Vector& upper, double step,
                       const std::function<bool(const Vector&)>& feasible,
                       const std::function<double(const Vector&)>& objective,
                       std::size_t max_points) {
  if (!(step > 0.0)) throw PreconditionError("grid step must be positive");
  const Index dims = upper.size();

  // Candidate values per coordinate: multiples of step below the bound, plus
  // the bound itself and 1 when it lies inside, so 0/1 corners are covered.
  std::vector<std::vector<double>> axis(static_cast<std::size_t>(dims));
  double total = 1.0;
  for (Index d = 0; d < dims; ++d) {
    auto& values = axis[static_cast<std::size_t>(d)];
    const double hi = std::max(upper(d), 0.0);
    const auto count = static_cast<std::size_t>(std::floor(hi / step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) values.push_back(static_cast<double>(k) * step);
    values.push_back(hi);
    if (hi >= 1.0) values.push_back(1.0);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end(),
                             [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                 values.end());
    total *= static_cast<double>(values.size());
    if (total > static_cast<double>(max_points)) {
      throw CapacityError("grid search would visit more than " + std::to_string(max_points) +
                          " points");
    }
  }

  GridResult best;
  Vector point = Vector::Zero(dims);
  std::vector<std::size_t> counter(static_cast<std::size_t>(dims), 0);
  while (true) {
    for (Index d = 0; d < dims; ++d) {
      point(d) = axis[static_cast<std::size_t>(d)][counter[static_cast<std::size_t>(d)]];
    }
    if (feasible(point)) {
      const double value = objective(point);
      if (!best.found || value > best.value) {
        best.found = true;
        best.value = value;
        best.point = point;
      }
    }
    Index d = 0;
    for (; d < dims; ++d) {
      auto& c = counter[static_cast<std::size_t>(d)];
      if (++c < axis[static_cast<std::size_t>(d)].size()) break;
      c = 0;
    }
    if (d == dims) break;
  }
  return best;
}

BruteForceResult brute_force_assignment(const MarketInstance& instance, const Matrix& scenario,
                                        double step) {
  const Index travelers = idx(instance.travelers());
  const Index services = idx(instance.services());
  if (travelers * services > 9) {
    throw CapacityError("brute force supports at most 9 assignment cells");
  }
  if (scenario.rows() != travelers || scenario.cols() != services) {
    throw DimensionError("scenario does not match the instance");
  }
  const auto cell = [services](Index i, Index j) { return i * services + j; };
  Vector upper(travelers * services);
  for (Index i = 0; i < travelers; ++i) {
    for (Index j = 0; j < services; ++j) {
      upper(cell(i, j)) = std::min(instance.service_limits[static_cast<std::size_t>(i)],
                                   instance.capacities[static_cast<std::size_t>(j)]);
    }
  }
  const double eps = 1e-9;
  const auto feasible = [&](const Vector& x) {
    for (Index i = 0; i < travelers; ++i) {
      double count = 0.0;
      double spend = 0.0;
      for (Index j = 0; j < services; ++j) {
        count += x(cell(i, j));
        spend += scenario(i, j) * x(cell(i, j));
      }
      if (count > instance.service_limits[static_cast<std::size_t>(i)] + eps) return false;
      if (spend > instance.budgets(i) + eps) return false;
    }
    for (Index j = 0; j < services; ++j) {
      double load = 0.0;
      for (Index i = 0; i < travelers; ++i) load += x(cell(i, j));
      if (load > instance.capacities[static_cast<std::size_t>(j)] + eps) return false;
    }
    return true;
  };
  const auto welfare = [&](const Vector& x) {
    double total = 0.0;
    for (Index i = 0; i < travelers; ++i) {
      for (Index j = 0; j < services; ++j) total += scenario(i, j) * x(cell(i, j));
    }
    return total;
  };
  const GridResult grid = grid_search(upper, step, feasible, welfare);

  BruteForceResult out;
  out.assignment = Assignment::Zero(travelers, services);
  if (grid.found) {
    out.value = grid.value;
    for (Index i = 0; i < travelers; ++i) {
      for (Index j = 0; j < services; ++j) out.assignment(i, j) = grid.point(cell(i, j));
    }
  }
  return out;
}

bool SuiteResult::passed() const {
  return std::all_of(reports.begin(), reports.end(),
                     [](const PropertyReport& r) { return r.passed; });
}

SuiteResult run_suite(const Mechanism& mechanism, double tol, double payment_scale,
                      std::size_t jobs) {
  const MarketInstance& instance = mechanism.instance();
  const double scale = instance.scale();
  const OutcomeFn outcome_fn = [&mechanism, payment_scale](const ValuationProfile& report) {
    PricingOutcome outcome = mechanism.price(report);
    if (payment_scale != 1.0) {
      outcome.payments *= payment_scale;
      for (Index i = 0; i < outcome.utilities.size(); ++i) {
        outcome.utilities(i) = outcome.realized.values.row(i).dot(outcome.final_assignment.row(i)) -
                               outcome.payments(i);
      }
    }
    return outcome;
  };

  SuiteResult result;
  result.outcomes = parallel_map<PricingOutcome>(
      instance.scenario_count(), jobs, [&](std::size_t s) {
        return outcome_fn(ValuationProfile{instance.scenarios[s], s});
      });

  const auto truthfulness = worst_of(
      Property::kTruthfulness,
      parallel_map<PropertyReport>(instance.scenario_count(), jobs,
                                   [&](std::size_t s) {
                                     return truthfulness_at(instance, outcome_fn,
                                                            result.outcomes[s], s, tol, scale);
                                   }),
      tol);

  const auto merge = [&](Property property, auto check) {
    std::vector<PropertyReport> parts;
    for (const auto& outcome : result.outcomes) parts.push_back(check(outcome));
    return worst_of(property, parts, tol);
  };

  result.reports.push_back(merge(Property::kFeasibility, [&](const PricingOutcome& o) {
    return check_feasibility(o, instance, tol, scale);
  }));
  result.reports.push_back(truthfulness);
  result.reports.push_back(merge(Property::kVoluntaryParticipation, [&](const PricingOutcome& o) {
    return check_voluntary_participation(o, tol, scale);
  }));
  result.reports.push_back(merge(Property::kBudgetFairness, [&](const PricingOutcome& o) {
    return check_budget_fairness(o, instance.budgets, tol, scale);
  }));
  result.reports.push_back(check_sustainability(result.outcomes, mechanism.tables().objective,
                                                tol, scale));
  return result;
}

}  // namespace mobmech::verify
