#include "mobmech/mechanism.hpp"

#include "mobmech/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mobmech {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

void require_valid(const MarketInstance& instance) {
  const auto issues = validate(instance);
  if (!is_valid(issues)) {
    std::string message = "invalid instance:";
    for (const auto& issue : issues) {
      if (issue.severity == Severity::kError) message += " " + issue.path + ": " + issue.message + ";";
    }
    throw PreconditionError(message);
  }
}

void require_shape(const Matrix& m, const MarketInstance& instance, const char* what) {
  if (m.rows() != idx(instance.travelers()) || m.cols() != idx(instance.services())) {
    throw DimensionError(std::string(what) + " is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected " +
                         std::to_string(instance.travelers()) + "x" +
                         std::to_string(instance.services()));
  }
}

// Zeroes LP round-off so that "a_ij > 0" keeps its meaning.
Matrix clean(Matrix m, double eps) {
  for (Index k = 0; k < m.size(); ++k) {
    if (std::abs(m.data()[k]) <= eps) m.data()[k] = 0.0;
  }
  return m;
}

double nonnegative_or_throw(double value, double tol, const std::string& what) {
  if (value < -tol) {
    throw MechanismError(what + " is negative (" + std::to_string(value) + ")");
  }
  return std::max(value, 0.0);
}

// Shared by the adapted and exclusion programs: maximize
// sum over included travelers of a_ij (v_ij - r_ij) subject to residual
// capacity, residual service limits and residual budgets under every scenario.
Assignment residual_welfare_program(const MarketInstance& instance, const MechanismTables& tables,
                                    const ValuationProfile& realized,
                                    const std::vector<bool>& included, bool participation_credit,
                                    const MechanismOptions& options) {
  require_shape(realized.values, instance, "realized profile");
  const std::size_t travelers = instance.travelers();
  const std::size_t services = instance.services();
  const double tol = options.tolerance * instance.scale();

  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < travelers; ++i) {
    if (included[i]) members.push_back(i);
  }
  Assignment result = Assignment::Zero(idx(travelers), idx(services));
  if (members.empty()) return result;

  const auto var = [services](std::size_t member, std::size_t j) {
    return static_cast<Index>(member * services + j);
  };
  lp::Problem problem = lp::Problem::with_variables(members.size() * services);
  for (std::size_t m = 0; m < members.size(); ++m) {
    for (std::size_t j = 0; j < services; ++j) {
      problem.objective(var(m, j)) =
          realized.values(idx(members[m]), idx(j)) - tables.reservations(idx(members[m]), idx(j));
    }
  }

  const Vector capacity = residual_capacity(instance, tables);
  for (std::size_t j = 0; j < services; ++j) {
    Vector row = Vector::Zero(problem.objective.size());
    for (std::size_t m = 0; m < members.size(); ++m) row(var(m, j)) = 1.0;
    problem.add_row(row, lp::Relation::kLessEqual,
                    nonnegative_or_throw(capacity(idx(j)), tol, "residual capacity"));
  }
  const Vector limit = residual_limit(instance, tables);
  const Vector budget = residual_budget(instance, tables, participation_credit);
  for (std::size_t m = 0; m < members.size(); ++m) {
    const std::size_t i = members[m];
    Vector row = Vector::Zero(problem.objective.size());
    for (std::size_t j = 0; j < services; ++j) row(var(m, j)) = 1.0;
    problem.add_row(row, lp::Relation::kLessEqual,
                    nonnegative_or_throw(limit(idx(i)), tol, "residual service limit"));

    const double budget_rhs = nonnegative_or_throw(budget(idx(i)), tol, "residual budget");
    for (const Matrix& scenario : instance.scenarios) {
      Vector budget_row = Vector::Zero(problem.objective.size());
      for (std::size_t j = 0; j < services; ++j) budget_row(var(m, j)) = scenario(idx(i), idx(j));
      problem.add_row(budget_row, lp::Relation::kLessEqual, budget_rhs);
    }
  }

  const lp::Solution solution = lp::solve(problem, options.lp);
  if (solution.status != lp::Status::kOptimal) {
    throw MechanismError(std::string("residual welfare program is ") +
                         std::string(lp::to_string(solution.status)));
  }
  for (std::size_t m = 0; m < members.size(); ++m) {
    for (std::size_t j = 0; j < services; ++j) {
      result(idx(members[m]), idx(j)) = solution.primal(var(m, j));
    }
  }
  return clean(std::move(result), 1e-12);
}

}  // namespace

WorstCaseProgram build_worst_case_program(const MarketInstance& instance) {
  const std::size_t travelers = instance.travelers();
  const std::size_t services = instance.services();
  const std::size_t scenarios = instance.scenario_count();

  WorstCaseProgram program;
  program.travelers = travelers;
  program.services = services;
  program.problem = lp::Problem::with_variables(travelers * services + travelers);
  lp::Problem& p = program.problem;
  const Index n = p.objective.size();

  for (std::size_t i = 0; i < travelers; ++i) {
    const auto t = idx(program.revenue_variable(i));
    p.objective(t) = 1.0;
    p.lower(t) = -lp::kInfinity;
  }

  for (std::size_t i = 0; i < travelers; ++i) {
    Vector row = Vector::Zero(n);
    for (std::size_t j = 0; j < services; ++j) row(idx(program.assignment_variable(i, j))) = 1.0;
    p.add_row(row, lp::Relation::kLessEqual, instance.service_limits[i]);
    program.rows.push_back({RowFamily::kServiceLimit, i, 0, 0, 0});
  }
  for (std::size_t j = 0; j < services; ++j) {
    Vector row = Vector::Zero(n);
    for (std::size_t i = 0; i < travelers; ++i) row(idx(program.assignment_variable(i, j))) = 1.0;
    p.add_row(row, lp::Relation::kLessEqual, instance.capacities[j]);
    program.rows.push_back({RowFamily::kCapacity, 0, j, 0, 0});
  }
  for (std::size_t i = 0; i < travelers; ++i) {
    for (std::size_t s = 0; s < scenarios; ++s) {
      Vector row = Vector::Zero(n);
      row(idx(program.revenue_variable(i))) = 1.0;
      for (std::size_t j = 0; j < services; ++j) {
        row(idx(program.assignment_variable(i, j))) = -instance.scenarios[s](idx(i), idx(j));
      }
      p.add_row(row, lp::Relation::kLessEqual, 0.0);
      program.rows.push_back({RowFamily::kWorstCase, i, 0, s, 0});
    }
  }
  for (std::size_t i = 0; i < travelers; ++i) {
    for (std::size_t s = 0; s < scenarios; ++s) {
      Vector row = Vector::Zero(n);
      for (std::size_t j = 0; j < services; ++j) {
        row(idx(program.assignment_variable(i, j))) = instance.scenarios[s](idx(i), idx(j));
      }
      p.add_row(row, lp::Relation::kLessEqual, instance.budgets(idx(i)));
      program.rows.push_back({RowFamily::kBudget, i, 0, s, 0});
    }
  }
  return program;
}

DualCertificate extract_duals(const lp::Solution& lp_solution, const MarketInstance& instance) {
  if (lp_solution.status != lp::Status::kOptimal) {
    throw PreconditionError("dual extraction needs an optimal solution, got " +
                            std::string(lp::to_string(lp_solution.status)));
  }
  const std::size_t travelers = instance.travelers();
  const std::size_t services = instance.services();
  const std::size_t scenarios = instance.scenario_count();
  const WorstCaseProgram program = build_worst_case_program(instance);
  if (lp_solution.dual.size() != idx(program.rows.size())) {
    throw DimensionError("dual vector has " + std::to_string(lp_solution.dual.size()) +
                         " entries, the nominal program has " +
                         std::to_string(program.rows.size()) + " rows");
  }

  DualCertificate duals;
  duals.xi1 = Vector::Zero(idx(travelers));
  duals.xi2 = Vector::Zero(idx(services));
  duals.xi3 = Matrix::Zero(idx(travelers), idx(scenarios));
  duals.xi4.assign(travelers, Matrix::Zero(idx(scenarios), idx(scenarios)));
  duals.xi5 = Matrix::Zero(idx(travelers), idx(scenarios));
  duals.xi6 = Matrix::Zero(idx(travelers), idx(scenarios));

  // Every row of the nominal program is a <= row, so all multipliers are
  // nonnegative; tiny negative round-off is clamped.
  for (std::size_t r = 0; r < program.rows.size(); ++r) {
    const double y = std::max(lp_solution.dual(idx(r)), 0.0);
    const RowTag& tag = program.rows[r];
    switch (tag.family) {
      case RowFamily::kServiceLimit: duals.xi1(idx(tag.traveler)) = y; break;
      case RowFamily::kCapacity: duals.xi2(idx(tag.service)) = y; break;
      case RowFamily::kWorstCase: duals.xi3(idx(tag.traveler), idx(tag.scenario)) = y; break;
      case RowFamily::kIncentive:
        duals.xi4[tag.traveler](idx(tag.scenario), idx(tag.misreport)) = y;
        break;
      case RowFamily::kParticipation: duals.xi5(idx(tag.traveler), idx(tag.scenario)) = y; break;
      case RowFamily::kBudget: duals.xi6(idx(tag.traveler), idx(tag.scenario)) = y; break;
    }
  }
  return duals;
}

WorstCaseSolution solve_worst_case(const MarketInstance& instance, const MechanismOptions& options) {
  require_valid(instance);
  const std::size_t travelers = instance.travelers();
  const std::size_t services = instance.services();
  const std::size_t scenarios = instance.scenario_count();

  const WorstCaseProgram program = build_worst_case_program(instance);
  WorstCaseSolution out;
  out.lp_solution = lp::solve(program.problem, options.lp);
  if (out.lp_solution.status == lp::Status::kInfeasible) {
    throw MechanismError("no feasible nominal assignment");
  }
  if (out.lp_solution.status != lp::Status::kOptimal) {
    throw MechanismError("nominal program is " +
                         std::string(lp::to_string(out.lp_solution.status)));
  }

  out.nominal = Assignment::Zero(idx(travelers), idx(services));
  out.worst_case_revenue = Vector::Zero(idx(travelers));
  for (std::size_t i = 0; i < travelers; ++i) {
    for (std::size_t j = 0; j < services; ++j) {
      out.nominal(idx(i), idx(j)) = out.lp_solution.primal(idx(program.assignment_variable(i, j)));
    }
    out.worst_case_revenue(idx(i)) = out.lp_solution.primal(idx(program.revenue_variable(i)));
  }
  out.nominal = clean(std::move(out.nominal), 1e-12);
  out.objective = out.lp_solution.objective;

  const DualCertificate duals = extract_duals(out.lp_solution, instance);
  out.v_worst.values = Matrix::Zero(idx(travelers), idx(services));
  out.worst_scenario.assign(travelers, 0);
  bool single_scenario = true;
  for (std::size_t i = 0; i < travelers; ++i) {
    const double total = duals.xi3.row(idx(i)).sum();
    std::size_t heaviest = 0;
    for (std::size_t s = 0; s < scenarios; ++s) {
      const double w = duals.xi3(idx(i), idx(s));
      if (w > duals.xi3(idx(i), idx(heaviest))) heaviest = s;
      if (total > 0.0) {
        out.v_worst.values.row(idx(i)) += (w / total) * instance.scenarios[s].row(idx(i));
      }
    }
    if (total <= 0.0) {
      out.v_worst.values.row(idx(i)) = instance.scenarios[0].row(idx(i));
    }
    out.worst_scenario[i] = heaviest;
    const double weight = total > 0.0 ? duals.xi3(idx(i), idx(heaviest)) / total : 0.0;
    if (weight < 1.0 - 1e-9 || heaviest != out.worst_scenario[0]) single_scenario = false;
  }
  if (single_scenario) {
    out.v_worst.scenario_index = out.worst_scenario[0];
    out.v_worst.values = instance.scenarios[out.worst_scenario[0]];
  }
  return out;
}

Matrix reservation_payments(const DualCertificate& duals, const ValuationProfile& v_worst,
                            const std::vector<Matrix>& scenarios, double tol) {
  const Index travelers = duals.xi1.size();
  const Index services = duals.xi2.size();
  const Index scenario_count = static_cast<Index>(scenarios.size());
  if (v_worst.values.rows() != travelers || v_worst.values.cols() != services ||
      duals.xi6.rows() != travelers || duals.xi6.cols() != scenario_count ||
      duals.xi5.rows() != travelers || duals.xi5.cols() != scenario_count ||
      duals.xi3.rows() != travelers || duals.xi3.cols() != scenario_count) {
    throw DimensionError("dual certificate does not match the worst-case profile");
  }

  Matrix r(travelers, services);
  for (Index i = 0; i < travelers; ++i) {
    const double weight = duals.xi3.row(i).sum();
    const double xi5 = weight > 0.0 ? duals.xi3.row(i).dot(duals.xi5.row(i)) / weight : 0.0;
    for (Index j = 0; j < services; ++j) {
      double value = duals.xi1(i) + duals.xi2(j) + xi5 * v_worst.values(i, j);
      for (Index s = 0; s < scenario_count; ++s) {
        value += duals.xi6(i, s) * scenarios[static_cast<std::size_t>(s)](i, j);
      }
      if (value < -tol) {
        throw ConsistencyError("reservation payment r[" + std::to_string(i) + "][" +
                               std::to_string(j) + "] = " + std::to_string(value) +
                               " is negative");
      }
      r(i, j) = std::max(value, 0.0);
    }
  }
  return r;
}

Matrix compute_gamma(const Assignment& nominal, const std::vector<Matrix>& scenarios,
                     std::vector<std::size_t>* chosen) {
  if (scenarios.empty()) throw PreconditionError("scenario set is empty");
  Matrix gamma(nominal.rows(), nominal.cols());
  if (chosen != nullptr) chosen->assign(static_cast<std::size_t>(nominal.rows()), 0);
  for (Index i = 0; i < nominal.rows(); ++i) {
    std::size_t best = 0;
    double best_value = 0.0;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
      if (scenarios[s].rows() != nominal.rows() || scenarios[s].cols() != nominal.cols()) {
        throw DimensionError("scenario " + std::to_string(s) + " does not match the assignment");
      }
      const double value = nominal.row(i).dot(scenarios[s].row(i));
      if (s == 0 || value < best_value) {
        best = s;
        best_value = value;
      }
    }
    gamma.row(i) = scenarios[best].row(i);
    if (chosen != nullptr) (*chosen)[static_cast<std::size_t>(i)] = best;
  }
  return gamma;
}

MechanismTables compute_tables(const MarketInstance& instance, const MechanismOptions& options) {
  const WorstCaseSolution worst = solve_worst_case(instance, options);
  const double tol = options.tolerance * instance.scale();

  MechanismTables tables;
  tables.v_worst = worst.v_worst;
  tables.nominal = worst.nominal;
  tables.duals = extract_duals(worst.lp_solution, instance);
  tables.reservations =
      reservation_payments(tables.duals, tables.v_worst, instance.scenarios, tol);
  tables.gamma = compute_gamma(tables.nominal, instance.scenarios, &tables.gamma_scenario);
  tables.worst_case_revenue = worst.worst_case_revenue;
  tables.objective = worst.objective;
  tables.worst_scenario = worst.worst_scenario;

  const auto travelers = idx(instance.travelers());
  tables.xi5_at_worst = Vector::Zero(travelers);
  for (Index i = 0; i < travelers; ++i) {
    const double weight = tables.duals.xi3.row(i).sum();
    if (weight > 0.0) {
      tables.xi5_at_worst(i) = tables.duals.xi3.row(i).dot(tables.duals.xi5.row(i)) / weight;
    }
  }
  return tables;
}

Vector residual_capacity(const MarketInstance& instance, const MechanismTables& tables) {
  Vector out(idx(instance.services()));
  for (std::size_t j = 0; j < instance.services(); ++j) {
    out(idx(j)) = instance.capacities[j] - tables.nominal.col(idx(j)).sum();
  }
  return out;
}

Vector residual_limit(const MarketInstance& instance, const MechanismTables& tables) {
  Vector out(idx(instance.travelers()));
  for (std::size_t i = 0; i < instance.travelers(); ++i) {
    out(idx(i)) = instance.service_limits[i] - tables.nominal.row(idx(i)).sum();
  }
  return out;
}

Vector residual_budget(const MarketInstance& instance, const MechanismTables& tables,
                       bool with_participation_credit) {
  const auto travelers = idx(instance.travelers());
  Vector out(travelers);
  for (Index i = 0; i < travelers; ++i) {
    double value = instance.budgets(i) - tables.nominal.row(i).dot(tables.reservations.row(i));
    if (with_participation_credit) {
      value += tables.xi5_at_worst(i) * tables.nominal.row(i).dot(tables.gamma.row(i));
    }
    out(i) = value;
  }
  return out;
}

Assignment adapted_assignment(const MarketInstance& instance, const MechanismTables& tables,
                              const ValuationProfile& realized, const MechanismOptions& options) {
  const std::vector<bool> everyone(instance.travelers(), true);
  return residual_welfare_program(instance, tables, realized, everyone, true, options);
}

Assignment exclusion_assignment(const MarketInstance& instance, const MechanismTables& tables,
                                const ValuationProfile& realized, std::size_t excluded,
                                const MechanismOptions& options) {
  if (excluded >= instance.travelers()) {
    throw PreconditionError("excluded traveler " + std::to_string(excluded) + " out of range");
  }
  std::vector<bool> others(instance.travelers(), true);
  others[excluded] = false;
  return residual_welfare_program(instance, tables, realized, others, false, options);
}

PaymentVector price(const MarketInstance& instance, const MechanismTables& tables,
                    const ValuationProfile& realized, const Assignment& adapted,
                    const std::vector<Assignment>& exclusions) {
  require_shape(realized.values, instance, "realized profile");
  require_shape(adapted, instance, "adapted assignment");
  const auto travelers = idx(instance.travelers());
  if (static_cast<Index>(exclusions.size()) != travelers) {
    throw DimensionError("expected one exclusion assignment per traveler");
  }
  const Matrix surplus = realized.values - tables.reservations;
  const Vector adapted_welfare = (adapted.array() * surplus.array()).rowwise().sum();

  PaymentVector p(travelers);
  for (Index k = 0; k < travelers; ++k) {
    const Assignment& without_k = exclusions[static_cast<std::size_t>(k)];
    require_shape(without_k, instance, "exclusion assignment");
    const double own_adapted = adapted.row(k).dot(tables.reservations.row(k));
    const double own_nominal = tables.nominal.row(k).dot(tables.reservations.row(k));
    const double credit = tables.xi5_at_worst(k) * tables.nominal.row(k).dot(tables.gamma.row(k));
    double others_without_k = 0.0;
    for (Index i = 0; i < travelers; ++i) {
      if (i != k) others_without_k += without_k.row(i).dot(surplus.row(i));
    }
    const double others_with_k = adapted_welfare.sum() - adapted_welfare(k);
    p(k) = own_adapted + own_nominal - credit + others_without_k - others_with_k;
  }
  return p;
}

Assignment final_assignment(const MarketInstance& instance, const MechanismTables& tables,
                            const Assignment& adapted, double tol) {
  require_shape(adapted, instance, "adapted assignment");
  Assignment out = tables.nominal + adapted;
  if (!is_feasible(out, instance, tol)) {
    throw ConsistencyError("final assignment violates a service limit or capacity");
  }
  return out;
}

Mechanism::Mechanism(MarketInstance instance, MechanismOptions options)
    : instance_(std::make_shared<const MarketInstance>(std::move(instance))),
      options_(options),
      tables_(compute_tables(*instance_, options_)) {}

PricingOutcome Mechanism::price(const ValuationProfile& realized) const {
  const MarketInstance& inst = *instance_;
  require_shape(realized.values, inst, "realized profile");
  const double tol = options_.tolerance * inst.scale();

  PricingOutcome out;
  out.realized = realized;
  out.adapted = adapted_assignment(inst, tables_, realized, options_);
  out.exclusions.reserve(inst.travelers());
  for (std::size_t k = 0; k < inst.travelers(); ++k) {
    out.exclusions.push_back(exclusion_assignment(inst, tables_, realized, k, options_));
  }
  out.payments = mobmech::price(inst, tables_, realized, out.adapted, out.exclusions);
  out.final_assignment = final_assignment(inst, tables_, out.adapted, tol);
  out.utilities = Vector(idx(inst.travelers()));
  for (Index i = 0; i < out.utilities.size(); ++i) {
    out.utilities(i) = utility(realized.values.row(i).transpose(),
                               out.final_assignment.row(i).transpose(), out.payments(i));
  }
  return out;
}

PricingOutcome Mechanism::price_scenario(std::size_t index) const {
  if (index >= instance_->scenario_count()) {
    throw PreconditionError("scenario index " + std::to_string(index) + " out of range");
  }
  return price(ValuationProfile{instance_->scenarios[index], index});
}

PricingOutcome run_pipeline(const MarketInstance& instance, const ValuationProfile& realized,
                            const MechanismOptions& options) {
  return Mechanism(instance, options).price(realized);
}

}  // namespace mobmech
