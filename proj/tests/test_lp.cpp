#include "mobmech/errors.hpp"
#include "mobmech/lp.hpp"
#include "support/lp_oracle.hpp"

#include <gtest/gtest.h>

using namespace mobmech::lp;

namespace {

Vector row(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v(k++) = x;
  return v;
}

Problem beale() {
  auto p = Problem::with_variables(4);
  p.objective = row({0.75, -20, 0.5, -6});
  p.add_row(row({0.25, -8, -1, 9}), Relation::kLessEqual, 0);
  p.add_row(row({0.5, -12, -0.5, 3}), Relation::kLessEqual, 0);
  p.add_row(row({0, 0, 1, 0}), Relation::kLessEqual, 1);
  return p;
}

Problem marshall_suurballe() {
  auto p = Problem::with_variables(4);
  p.objective = row({2, 3, -1, -12});
  p.add_row(row({-2, -9, 1, 9}), Relation::kLessEqual, 0);
  p.add_row(row({1.0 / 3, 1, -1.0 / 3, -2}), Relation::kLessEqual, 0);
  p.add_row(row({2, 3, -1, -12}), Relation::kLessEqual, 2);
  return p;
}

Problem chvatal() {
  auto p = Problem::with_variables(4);
  p.objective = row({10, -57, -9, -24});
  p.add_row(row({0.5, -5.5, -2.5, 9}), Relation::kLessEqual, 0);
  p.add_row(row({0.5, -1.5, -0.5, 1}), Relation::kLessEqual, 0);
  p.add_row(row({1, 0, 0, 0}), Relation::kLessEqual, 1);
  return p;
}

Options bland_only() {
  Options o;
  o.degenerate_pivot_limit = 0;
  o.dantzig_iteration_limit = 0;
  return o;
}

}  // namespace

TEST(LpSolve, SingleConstraint) {
  auto p = Problem::with_variables(1);
  p.objective = row({1});
  p.add_row(row({1}), Relation::kLessEqual, 5);
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.primal(0), 5.0, 1e-12);
  EXPECT_NEAR(s.objective, 5.0, 1e-12);
  EXPECT_NEAR(s.dual(0), 1.0, 1e-12);
}

TEST(LpSolve, DegenerateOptimumTakesLowestIndex) {
  auto p = Problem::with_variables(2);
  p.objective = row({1, 1});
  p.add_row(row({1, 1}), Relation::kLessEqual, 1);
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
  EXPECT_NEAR(s.dual(0), 1.0, 1e-12);
  EXPECT_NEAR(s.primal(0), 1.0, 1e-12);
  EXPECT_NEAR(s.primal(1), 0.0, 1e-12);
}

TEST(LpSolve, Deterministic) {
  const auto p = oracle::random_problem(77);
  const auto a = solve(p);
  const auto b = solve(p);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_TRUE(a.primal == b.primal);
  EXPECT_TRUE(a.dual == b.dual);
}

TEST(LpSolve, InfeasibleAndUnboundedReportedByStatus) {
  auto infeasible = Problem::with_variables(1);
  infeasible.objective = row({1});
  infeasible.add_row(row({1}), Relation::kLessEqual, -1);
  EXPECT_EQ(solve(infeasible).status, Status::kInfeasible);

  auto unbounded = Problem::with_variables(2);
  unbounded.objective = row({1, 0});
  unbounded.add_row(row({-1, 1}), Relation::kLessEqual, 1);
  EXPECT_EQ(solve(unbounded).status, Status::kUnbounded);
}

TEST(LpSolve, DimensionMismatchThrows) {
  auto p = Problem::with_variables(2);
  p.objective = row({1, 1});
  p.constraints = Matrix::Ones(1, 3);
  p.rhs = row({1});
  p.relations = {Relation::kLessEqual};
  EXPECT_THROW(solve(p), mobmech::DimensionError);
}

TEST(LpSolve, EqualityAndGreaterRowsGiveSignedDuals) {
  // max x + 2y  s.t.  x + y = 4,  y >= 1,  y <= 3
  auto p = Problem::with_variables(2);
  p.objective = row({1, 2});
  p.add_row(row({1, 1}), Relation::kEqual, 4);
  p.add_row(row({0, 1}), Relation::kGreaterEqual, 1);
  p.add_row(row({0, 1}), Relation::kLessEqual, 3);
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.objective, 7.0, 1e-12);
  EXPECT_LE(s.dual(1), 1e-12);
  EXPECT_GE(s.dual(2), -1e-12);
  EXPECT_TRUE(check_certificate(p, s, 1e-9));
}

TEST(LpSolve, FreeAndBoundedVariables) {
  // max -|x - 2| style: max t  s.t.  t <= x - 2, t <= 2 - x, x free in [-10, 10]
  auto p = Problem::with_variables(2);
  p.objective = row({0, 1});
  p.lower = row({-10, -kInfinity});
  p.upper = row({10, kInfinity});
  p.add_row(row({-1, 1}), Relation::kLessEqual, -2);
  p.add_row(row({1, 1}), Relation::kLessEqual, 2);
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.objective, 0.0, 1e-12);
  EXPECT_NEAR(s.primal(0), 2.0, 1e-12);
  EXPECT_TRUE(check_certificate(p, s, 1e-9));
}

TEST(LpOracle, ThreeByThreeMatchesVertexEnumeration) {
  int compared = 0;
  for (std::uint64_t seed = 0; compared < 20 && seed < 10000; ++seed) {
    const auto p = oracle::random_problem(seed);
    if (p.variable_count() != 3 || p.row_count() != 3) continue;
    const auto expected = oracle::enumerate(p);
    const auto s = solve(p);
    ASSERT_EQ(s.status, expected.status) << "seed " << seed;
    if (s.status != Status::kOptimal) continue;
    EXPECT_NEAR(s.objective, expected.objective.convert_to<double>(), 1e-9) << "seed " << seed;
    ++compared;
  }
  EXPECT_EQ(compared, 20);
}

TEST(LpOracle, BlandOnlyPricingAgreesWithOracle) {
  for (std::uint64_t seed = 500; seed < 700; ++seed) {
    const auto p = oracle::random_problem(seed);
    const auto expected = oracle::enumerate(p);
    const auto s = solve(p, bland_only());
    ASSERT_EQ(s.status, expected.status) << "seed " << seed;
    if (s.status == Status::kOptimal) {
      EXPECT_NEAR(s.objective, expected.objective.convert_to<double>(), 1e-9) << "seed " << seed;
      EXPECT_TRUE(check_certificate(p, s, 1e-9)) << "seed " << seed;
    }
  }
}

TEST(LpCycling, ClassicFixturesTerminateAtTheirOptima) {
  const struct {
    const char* name;
    Problem problem;
    double optimum;
  } cases[] = {{"beale", beale(), 1.25},
               {"marshall-suurballe", marshall_suurballe(), 2.0},
               {"chvatal", chvatal(), 1.0}};
  for (const auto& c : cases) {
    for (const Options& o : {Options{}, bland_only()}) {
      const auto s = solve(c.problem, o);
      ASSERT_EQ(s.status, Status::kOptimal) << c.name;
      EXPECT_NEAR(s.objective, c.optimum, 1e-9) << c.name;
      EXPECT_LT(s.iterations, 100u) << c.name;
      EXPECT_TRUE(check_certificate(c.problem, s, 1e-9)) << c.name;
    }
  }
}

TEST(LpCertificate, AcceptsSolverOutput) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto p = oracle::random_problem(seed);
    const auto s = solve(p);
    if (s.status != Status::kOptimal) continue;
    EXPECT_TRUE(check_certificate(p, s, 1e-9)) << "seed " << seed;
    EXPECT_NEAR(dual_objective(p, s.dual), s.objective, 1e-9 * (1 + std::abs(s.objective)));
  }
}

TEST(LpCertificate, RejectsCorruptedDualOnSlackRow) {
  auto p = Problem::with_variables(2);
  p.objective = row({1, 1});
  p.add_row(row({1, 0}), Relation::kLessEqual, 1);
  p.add_row(row({0, 1}), Relation::kLessEqual, 1);
  p.add_row(row({1, 1}), Relation::kLessEqual, 5);  // slack at the optimum
  auto s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  ASSERT_TRUE(check_certificate(p, s, 1e-9));
  s.dual(2) += 1.0;
  EXPECT_FALSE(check_certificate(p, s, 1e-9));
}

TEST(LpCertificate, ZeroProblem) {
  const auto p = Problem::with_variables(0);
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_EQ(s.objective, 0.0);
  EXPECT_TRUE(check_certificate(p, s, 1e-9));
}

TEST(LpCertificate, ReducedCostsMatchDefinition) {
  const auto p = chvatal();
  const auto s = solve(p);
  const Vector d = reduced_costs(p, s.dual);
  const Vector expected = p.objective - p.constraints.transpose() * s.dual;
  EXPECT_TRUE(d.isApprox(expected));
}
