#include "mobmech/lp.hpp"

#include "mobmech/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mobmech::lp {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

Problem Problem::with_variables(std::size_t variables) {
  const auto n = static_cast<Eigen::Index>(variables);
  Problem p;
  p.objective = Vector::Zero(n);
  p.constraints = Matrix::Zero(0, n);
  p.rhs = Vector::Zero(0);
  p.lower = Vector::Zero(n);
  p.upper = Vector::Constant(n, kInfinity);
  return p;
}

std::size_t Problem::add_row(const Vector& coefficients, Relation relation, double rhs_value) {
  if (coefficients.size() != objective.size()) {
    throw DimensionError("row has " + std::to_string(coefficients.size()) +
                         " coefficients, problem has " + std::to_string(objective.size()) +
                         " variables");
  }
  const Eigen::Index m = constraints.rows();
  constraints.conservativeResize(m + 1, objective.size());
  constraints.row(m) = coefficients.transpose();
  rhs.conservativeResize(m + 1);
  rhs(m) = rhs_value;
  relations.push_back(relation);
  return static_cast<std::size_t>(m);
}

void Problem::check_dimensions() const {
  const Eigen::Index n = objective.size();
  const Eigen::Index m = rhs.size();
  if (constraints.rows() != m || constraints.cols() != n) {
    throw DimensionError("constraint matrix is " + std::to_string(constraints.rows()) + "x" +
                         std::to_string(constraints.cols()) + ", expected " +
                         std::to_string(m) + "x" + std::to_string(n));
  }
  if (static_cast<Eigen::Index>(relations.size()) != m) {
    throw DimensionError("relations has " + std::to_string(relations.size()) +
                         " entries, expected " + std::to_string(m));
  }
  if (lower.size() != n || upper.size() != n) {
    throw DimensionError("bound vectors do not match the variable count");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) == kInfinity ||
        upper(j) == -kInfinity || upper(j) < lower(j)) {
      throw DimensionError("invalid bounds for variable " + std::to_string(j));
    }
  }
  if (!constraints.allFinite() || !rhs.allFinite() || !objective.allFinite()) {
    throw DimensionError("problem data must be finite");
  }
}

namespace {

// How an original variable is expressed through nonnegative internal columns.
enum class ColumnMap { kShifted, kReflected, kFree };

struct VariableMap {
  ColumnMap kind = ColumnMap::kShifted;
  Eigen::Index column = 0;  // the (first) internal column
  double offset = 0.0;      // lower bound (shifted) or upper bound (reflected)
};

// Standard form: maximize cost'z  s.t.  rows, z >= 0, with every row
// normalized to a nonnegative right-hand side.
class StandardForm {
 public:
  StandardForm(const Problem& problem, double tolerance) : problem_(problem), tol_(tolerance) {
    build();
  }

  Solution run(const Options& options);

 private:
  void build();
  bool iterate(const Vector& cost, std::vector<bool>& allowed, const Options& options,
               bool phase_one, Status& status);
  void refactor();
  void pivot(Eigen::Index row, Eigen::Index column, const Vector& direction);
  Solution extract(Status status) const;

  const Problem& problem_;
  double tol_;

  std::vector<VariableMap> vars_;
  Eigen::Index structural_ = 0;  // internal structural columns
  Eigen::Index rows_ = 0;        // user rows + bound rows
  Eigen::Index user_rows_ = 0;
  Matrix a_;                     // rows_ x columns, full tableau incl. slacks/artificials
  Vector b_;
  Vector cost_;                  // phase-two cost (scaled)
  double objective_scale_ = 1.0;
  Vector row_factor_;            // original dual = objective_scale * y * row_factor
  std::vector<bool> artificial_;

  std::vector<Eigen::Index> basis_;
  std::vector<bool> in_basis_;
  Matrix basis_inverse_;
  Vector x_basic_;
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
};

void StandardForm::build() {
  const Eigen::Index n = problem_.objective.size();
  const Eigen::Index m = problem_.rhs.size();

  vars_.resize(static_cast<std::size_t>(n));
  Eigen::Index bound_rows = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    auto& v = vars_[static_cast<std::size_t>(j)];
    const double lo = problem_.lower(j);
    const double hi = problem_.upper(j);
    v.column = structural_;
    if (std::isfinite(lo)) {
      v.kind = ColumnMap::kShifted;
      v.offset = lo;
      structural_ += 1;
      if (std::isfinite(hi)) ++bound_rows;
    } else if (std::isfinite(hi)) {
      v.kind = ColumnMap::kReflected;
      v.offset = hi;
      structural_ += 1;
    } else {
      v.kind = ColumnMap::kFree;
      structural_ += 2;
    }
  }

  user_rows_ = m;
  rows_ = m + bound_rows;
  Matrix rows = Matrix::Zero(rows_, structural_);
  Vector rhs = Vector::Zero(rows_);
  std::vector<Relation> relation(static_cast<std::size_t>(rows_), Relation::kLessEqual);

  for (Eigen::Index r = 0; r < m; ++r) {
    double shifted_rhs = problem_.rhs(r);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double coef = problem_.constraints(r, j);
      const auto& v = vars_[static_cast<std::size_t>(j)];
      switch (v.kind) {
        case ColumnMap::kShifted:
          rows(r, v.column) = coef;
          shifted_rhs -= coef * v.offset;
          break;
        case ColumnMap::kReflected:
          rows(r, v.column) = -coef;
          shifted_rhs -= coef * v.offset;
          break;
        case ColumnMap::kFree:
          rows(r, v.column) = coef;
          rows(r, v.column + 1) = -coef;
          break;
      }
    }
    rhs(r) = shifted_rhs;
    relation[static_cast<std::size_t>(r)] = problem_.relations[static_cast<std::size_t>(r)];
  }
  Eigen::Index next_bound = m;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& v = vars_[static_cast<std::size_t>(j)];
    if (v.kind == ColumnMap::kShifted && std::isfinite(problem_.upper(j))) {
      rows(next_bound, v.column) = 1.0;
      rhs(next_bound) = problem_.upper(j) - problem_.lower(j);
      ++next_bound;
    }
  }

  // Row equilibration (largest coefficient 1) and sign normalization.
  row_factor_ = Vector::Ones(rows_);
  for (Eigen::Index r = 0; r < rows_; ++r) {
    double s = rows.row(r).cwiseAbs().maxCoeff();
    if (s == 0.0) s = 1.0;
    double factor = 1.0 / s;
    if (rhs(r) < 0.0) {
      factor = -factor;
      auto& rel = relation[static_cast<std::size_t>(r)];
      if (rel == Relation::kLessEqual) {
        rel = Relation::kGreaterEqual;
      } else if (rel == Relation::kGreaterEqual) {
        rel = Relation::kLessEqual;
      }
    }
    rows.row(r) *= factor;
    rhs(r) *= factor;
    row_factor_(r) = factor;
  }

  Eigen::Index slack_count = 0;
  Eigen::Index artificial_count = 0;
  for (const auto rel : relation) {
    if (rel != Relation::kEqual) ++slack_count;
    if (rel != Relation::kLessEqual) ++artificial_count;
  }
  const Eigen::Index columns = structural_ + slack_count + artificial_count;
  a_ = Matrix::Zero(rows_, columns);
  a_.leftCols(structural_) = rows;
  b_ = rhs;
  artificial_.assign(static_cast<std::size_t>(columns), false);
  basis_.assign(static_cast<std::size_t>(rows_), 0);

  Eigen::Index slack = structural_;
  Eigen::Index art = structural_ + slack_count;
  for (Eigen::Index r = 0; r < rows_; ++r) {
    const auto rel = relation[static_cast<std::size_t>(r)];
    if (rel == Relation::kLessEqual) {
      a_(r, slack) = 1.0;
      basis_[static_cast<std::size_t>(r)] = slack++;
    } else {
      if (rel == Relation::kGreaterEqual) a_(r, slack++) = -1.0;
      a_(r, art) = 1.0;
      artificial_[static_cast<std::size_t>(art)] = true;
      basis_[static_cast<std::size_t>(r)] = art++;
    }
  }

  Vector c = Vector::Zero(structural_);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& v = vars_[static_cast<std::size_t>(j)];
    const double cj = problem_.objective(j);
    switch (v.kind) {
      case ColumnMap::kShifted: c(v.column) = cj; break;
      case ColumnMap::kReflected: c(v.column) = -cj; break;
      case ColumnMap::kFree:
        c(v.column) = cj;
        c(v.column + 1) = -cj;
        break;
    }
  }
  objective_scale_ = c.size() > 0 ? c.cwiseAbs().maxCoeff() : 0.0;
  if (objective_scale_ == 0.0) objective_scale_ = 1.0;
  cost_ = Vector::Zero(columns);
  cost_.head(structural_) = c / objective_scale_;

  in_basis_.assign(static_cast<std::size_t>(columns), false);
  for (const auto col : basis_) in_basis_[static_cast<std::size_t>(col)] = true;
  refactor();
}

void StandardForm::refactor() {
  if (rows_ == 0) {
    basis_inverse_ = Matrix::Zero(0, 0);
    x_basic_ = Vector::Zero(0);
    return;
  }
  Matrix basis(rows_, rows_);
  for (Eigen::Index i = 0; i < rows_; ++i) basis.col(i) = a_.col(basis_[static_cast<std::size_t>(i)]);
  basis_inverse_ = basis.partialPivLu().inverse();
  x_basic_ = basis_inverse_ * b_;
  since_refactor_ = 0;
}

void StandardForm::pivot(Eigen::Index row, Eigen::Index column, const Vector& direction) {
  const double pivot_value = direction(row);
  const double step = x_basic_(row) / pivot_value;
  for (Eigen::Index i = 0; i < rows_; ++i) {
    if (i == row) continue;
    x_basic_(i) -= step * direction(i);
  }
  x_basic_(row) = step;

  basis_inverse_.row(row) /= pivot_value;
  for (Eigen::Index i = 0; i < rows_; ++i) {
    if (i == row || direction(i) == 0.0) continue;
    basis_inverse_.row(i) -= direction(i) * basis_inverse_.row(row);
  }
  in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(row)])] = false;
  basis_[static_cast<std::size_t>(row)] = column;
  in_basis_[static_cast<std::size_t>(column)] = true;
  if (++since_refactor_ >= 50) refactor();
}

bool StandardForm::iterate(const Vector& cost, std::vector<bool>& allowed, const Options& options,
                           bool phase_one, Status& status) {
  const Eigen::Index columns = a_.cols();
  const double pivot_tol = tol_ * 1e-2;
  bool bland = false;
  std::size_t degenerate_streak = 0;
  std::size_t dantzig_iterations = 0;

  while (true) {
    if (iterations_ >= options.max_iterations) {
      status = Status::kIterationLimit;
      return false;
    }
    Vector cost_basic(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) cost_basic(i) = cost(basis_[static_cast<std::size_t>(i)]);
    const Vector y = basis_inverse_.transpose() * cost_basic;

    Eigen::Index entering = -1;
    double best = tol_;
    for (Eigen::Index j = 0; j < columns; ++j) {
      if (in_basis_[static_cast<std::size_t>(j)] || !allowed[static_cast<std::size_t>(j)]) continue;
      const double d = cost(j) - y.dot(a_.col(j));
      if (d <= tol_) continue;
      if (bland) {
        entering = j;
        break;
      }
      if (d > best) {
        best = d;
        entering = j;
      }
    }
    if (entering < 0) return true;

    const Vector direction = basis_inverse_ * a_.col(entering);
    Eigen::Index leaving = -1;
    double min_ratio = 0.0;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (direction(i) <= pivot_tol) continue;
      const double ratio = std::max(x_basic_(i), 0.0) / direction(i);
      if (leaving < 0 || ratio < min_ratio - tol_) {
        leaving = i;
        min_ratio = ratio;
      } else if (ratio <= min_ratio + tol_ &&
                 basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)]) {
        leaving = i;
        min_ratio = std::min(min_ratio, ratio);
      }
    }
    if (leaving < 0) {
      // Phase one is bounded by construction, so this only happens in phase two.
      status = phase_one ? Status::kInfeasible : Status::kUnbounded;
      return false;
    }

    const std::size_t leaving_var = static_cast<std::size_t>(basis_[static_cast<std::size_t>(leaving)]);
    pivot(leaving, entering, direction);
    ++iterations_;
    if (artificial_[leaving_var]) allowed[leaving_var] = false;

    if (!bland) {
      ++dantzig_iterations;
      degenerate_streak = (min_ratio <= tol_) ? degenerate_streak + 1 : 0;
      if (options.anti_cycling && (degenerate_streak > options.degenerate_pivot_limit ||
                                   dantzig_iterations > options.dantzig_iteration_limit)) {
        bland = true;
      }
    }
  }
}

Solution StandardForm::run(const Options& options) {
  const Eigen::Index columns = a_.cols();
  Status status = Status::kOptimal;

  const bool need_phase_one =
      std::any_of(artificial_.begin(), artificial_.end(), [](bool a) { return a; });
  std::vector<bool> allowed(static_cast<std::size_t>(columns), true);
  if (need_phase_one) {
    Vector phase_cost = Vector::Zero(columns);
    for (Eigen::Index j = 0; j < columns; ++j) {
      if (artificial_[static_cast<std::size_t>(j)]) phase_cost(j) = -1.0;
    }
    if (!iterate(phase_cost, allowed, options, true, status)) return extract(status);
    refactor();
    double infeasibility = 0.0;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (artificial_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])]) {
        infeasibility += std::max(x_basic_(i), 0.0);
      }
    }
    const double scale = std::max(1.0, b_.size() > 0 ? b_.cwiseAbs().maxCoeff() : 0.0);
    if (infeasibility > tol_ * scale) return extract(Status::kInfeasible);

    // Drive zero-valued artificials out of the basis where possible; rows
    // where that fails are redundant and keep their artificial at zero.
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (!artificial_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])]) continue;
      for (Eigen::Index j = 0; j < columns; ++j) {
        if (in_basis_[static_cast<std::size_t>(j)] || artificial_[static_cast<std::size_t>(j)]) continue;
        const double entry = basis_inverse_.row(i).dot(a_.col(j));
        if (std::abs(entry) > 1e-7) {
          const Vector direction = basis_inverse_ * a_.col(j);
          pivot(i, j, direction);
          break;
        }
      }
    }
    refactor();
  }
  for (Eigen::Index j = 0; j < columns; ++j) {
    if (artificial_[static_cast<std::size_t>(j)]) allowed[static_cast<std::size_t>(j)] = false;
  }
  if (!iterate(cost_, allowed, options, false, status)) return extract(status);
  refactor();
  return extract(Status::kOptimal);
}

Solution StandardForm::extract(Status status) const {
  const Eigen::Index n = problem_.objective.size();
  Solution out;
  out.status = status;
  out.iterations = iterations_;
  out.primal = Vector::Zero(n);
  out.dual = Vector::Zero(user_rows_);

  Vector z = Vector::Zero(a_.cols());
  for (Eigen::Index i = 0; i < rows_; ++i) {
    z(basis_[static_cast<std::size_t>(i)]) = std::max(x_basic_(i), 0.0);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& v = vars_[static_cast<std::size_t>(j)];
    switch (v.kind) {
      case ColumnMap::kShifted: out.primal(j) = v.offset + z(v.column); break;
      case ColumnMap::kReflected: out.primal(j) = v.offset - z(v.column); break;
      case ColumnMap::kFree: out.primal(j) = z(v.column) - z(v.column + 1); break;
    }
    // Snap onto finite bounds that are within rounding distance.
    if (std::isfinite(problem_.upper(j)) && out.primal(j) > problem_.upper(j)) {
      out.primal(j) = problem_.upper(j);
    }
  }
  out.objective = problem_.objective.dot(out.primal);

  if (status == Status::kOptimal && rows_ > 0) {
    Vector cost_basic(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) cost_basic(i) = cost_(basis_[static_cast<std::size_t>(i)]);
    const Vector y = basis_inverse_.transpose() * cost_basic;
    for (Eigen::Index r = 0; r < user_rows_; ++r) {
      double value = objective_scale_ * y(r) * row_factor_(r);
      if (std::abs(value) < 1e-13 * objective_scale_) value = 0.0;
      out.dual(r) = value;
    }
  }
  return out;
}

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  problem.check_dimensions();
  StandardForm form(problem, options.tolerance);
  return form.run(options);
}

Vector reduced_costs(const Problem& problem, const Vector& dual) {
  if (dual.size() != problem.rhs.size()) {
    throw DimensionError("dual vector has " + std::to_string(dual.size()) + " entries, expected " +
                         std::to_string(problem.rhs.size()));
  }
  return problem.objective - problem.constraints.transpose() * dual;
}

double dual_objective(const Problem& problem, const Vector& dual) {
  const Vector d = reduced_costs(problem, dual);
  double value = problem.rhs.dot(dual);
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    if (d(j) > 0.0 && std::isfinite(problem.upper(j))) {
      value += problem.upper(j) * d(j);
    } else if (d(j) < 0.0 && std::isfinite(problem.lower(j))) {
      value += problem.lower(j) * d(j);
    }
  }
  return value;
}

bool check_certificate(const Problem& problem, const Solution& solution, double tol) {
  problem.check_dimensions();
  if (solution.status != Status::kOptimal) return false;
  const Eigen::Index n = problem.objective.size();
  const Eigen::Index m = problem.rhs.size();
  if (solution.primal.size() != n || solution.dual.size() != m) return false;
  const Vector& x = solution.primal;
  const Vector& y = solution.dual;

  const double x_scale = std::max(1.0, n > 0 ? x.cwiseAbs().maxCoeff() : 0.0);
  const double y_scale = std::max(1.0, m > 0 ? y.cwiseAbs().maxCoeff() : 0.0);
  const double a_scale = std::max(1.0, problem.constraints.size() > 0
                                           ? problem.constraints.cwiseAbs().maxCoeff()
                                           : 0.0);
  const double c_scale = std::max(1.0, n > 0 ? problem.objective.cwiseAbs().maxCoeff() : 0.0);
  const double d_scale = std::max(c_scale, y_scale * a_scale);
  const double z_scale = 1.0 + std::abs(solution.objective);

  // Primal feasibility.
  const Vector activity = problem.constraints * x;
  for (Eigen::Index r = 0; r < m; ++r) {
    const double row_scale =
        std::max({1.0, std::abs(problem.rhs(r)), a_scale * x_scale});
    const double slack = problem.rhs(r) - activity(r);
    switch (problem.relations[static_cast<std::size_t>(r)]) {
      case Relation::kLessEqual:
        if (slack < -tol * row_scale) return false;
        if (y(r) < -tol * y_scale) return false;
        break;
      case Relation::kGreaterEqual:
        if (slack > tol * row_scale) return false;
        if (y(r) > tol * y_scale) return false;
        break;
      case Relation::kEqual:
        if (std::abs(slack) > tol * row_scale) return false;
        break;
    }
    // Complementary slackness on rows.
    if (std::abs(y(r) * slack) > tol * z_scale * std::max(1.0, a_scale * x_scale)) return false;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (x(j) < problem.lower(j) - tol * x_scale) return false;
    if (x(j) > problem.upper(j) + tol * x_scale) return false;
  }

  // Dual feasibility and complementary slackness on variable bounds.
  const Vector d = reduced_costs(problem, y);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double below = std::isfinite(problem.lower(j)) ? x(j) - problem.lower(j) : kInfinity;
    const double above = std::isfinite(problem.upper(j)) ? problem.upper(j) - x(j) : kInfinity;
    // A positive reduced cost is only admissible at a finite upper bound, a
    // negative one only at a finite lower bound.
    if (d(j) > tol * d_scale) {
      if (!std::isfinite(above)) return false;
      if (std::abs(d(j)) * above > tol * z_scale * x_scale) return false;
    }
    if (d(j) < -tol * d_scale) {
      if (!std::isfinite(below)) return false;
      if (std::abs(d(j)) * below > tol * z_scale * x_scale) return false;
    }
  }

  if (std::abs(problem.objective.dot(x) - solution.objective) > tol * z_scale) return false;
  const double gap = std::abs(solution.objective - dual_objective(problem, y));
  return gap <= tol * z_scale * std::max(1.0, a_scale * x_scale);
}

}  // namespace mobmech::lp
