#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

namespace mobmech::lp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string_view to_string(Status status);

/// maximize c'x  subject to  A x (rel) rhs,  lower <= x <= upper.
///
/// Lower bounds may be any finite value or -infinity; upper bounds may be any
/// value >= lower or +infinity.
struct Problem {
  Vector objective;
  Matrix constraints;
  Vector rhs;
  std::vector<Relation> relations;
  Vector lower;
  Vector upper;

  /// A problem with `variables` columns, no rows, x >= 0 and c = 0.
  static Problem with_variables(std::size_t variables);

  std::size_t variable_count() const { return static_cast<std::size_t>(objective.size()); }
  std::size_t row_count() const { return static_cast<std::size_t>(rhs.size()); }

  /// Appends one row and returns its index.
  std::size_t add_row(const Vector& coefficients, Relation relation, double rhs_value);

  /// Throws DimensionError when the member sizes disagree or a bound is invalid.
  void check_dimensions() const;
};

struct Solution {
  Status status = Status::kInfeasible;
  Vector primal;  // length n
  /// One multiplier per row: >= 0 for <= rows, <= 0 for >= rows, free for = rows.
  Vector dual;
  double objective = 0.0;
  std::size_t iterations = 0;
};

struct Options {
  /// Optimality / feasibility tolerance on the internally scaled data.
  double tolerance = 1e-9;
  /// Consecutive degenerate pivots tolerated under Dantzig pricing before the
  /// solver switches to Bland's rule for the rest of the phase.
  std::size_t degenerate_pivot_limit = 16;
  /// Total Dantzig iterations per phase before switching to Bland's rule.
  std::size_t dantzig_iteration_limit = 5000;
  /// When false the solver never switches to Bland's rule; only useful for
  /// demonstrating cycling on degenerate fixtures.
  bool anti_cycling = true;
  std::size_t max_iterations = 100000;
};

/// Two-phase revised simplex. Deterministic: ties between candidate entering
/// or leaving variables go to the lowest index.
Solution solve(const Problem& problem, const Options& options = {});

/// Reduced costs c - A'y for a candidate dual vector.
Vector reduced_costs(const Problem& problem, const Vector& dual);

/// Dual objective b'y plus the contribution of finite variable bounds.
double dual_objective(const Problem& problem, const Vector& dual);

/// Verifies primal feasibility, dual feasibility (row signs and reduced-cost
/// signs against the variable bounds), complementary slackness and the
/// duality gap, each within `tol` relative to the magnitude of the data.
bool check_certificate(const Problem& problem, const Solution& solution, double tol);

}  // namespace mobmech::lp
