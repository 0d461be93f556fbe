#include "mobmech/errors.hpp"
#include "mobmech/model.hpp"
#include "support/instances.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace mobmech;
using fixtures::make;
using fixtures::matrix;

TEST(Validate, ValidInstanceHasNoIssues) {
  const auto in = make({5, 5}, {1, 1}, {1, 1, 1}, {Matrix::Constant(2, 3, 2.0)});
  EXPECT_TRUE(validate(in).empty());
}

TEST(Validate, SingleTraveler) {
  const auto issues = validate(make({5}, {1}, {1, 1}, {Matrix::Constant(1, 2, 1.0)}));
  ASSERT_FALSE(is_valid(issues));
  bool found = false;
  for (const auto& issue : issues) found = found || issue.message == "traveler_count below 2";
  EXPECT_TRUE(found);
}

TEST(Validate, MoreTravelersThanServicesIsOnlyAWarning) {
  const auto issues = validate(make({1, 1, 1}, {1, 1, 1}, {1, 1}, {Matrix::Ones(3, 2)}));
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].severity, Severity::kWarning);
  EXPECT_TRUE(is_valid(issues));
}

TEST(Validate, ReportsEveryBreach) {
  auto in = make({-1, std::numeric_limits<double>::quiet_NaN()}, {0, 1}, {1, 0},
                 {matrix({{1, 2}, {3, 4}}), Matrix::Ones(3, 2)});
  const auto issues = validate(in);
  std::vector<std::string> messages;
  for (const auto& issue : issues) {
    if (issue.severity == Severity::kError) messages.push_back(issue.path + " " + issue.message);
  }
  EXPECT_NE(std::find(messages.begin(), messages.end(), "/travelers/0/budget budget negative"),
            messages.end());
  EXPECT_GE(messages.size(), 5u);
}

TEST(Validate, EmptyScenarioSet) {
  const auto issues = validate(make({1, 1}, {1, 1}, {1, 1, 1}, {}));
  EXPECT_FALSE(is_valid(issues));
}

TEST(Feasibility, ZeroAssignment) {
  const auto in = fixtures::reference_2x2();
  EXPECT_TRUE(is_feasible(Matrix::Zero(2, 2), in));
}

TEST(Feasibility, CapacityBreach) {
  const auto in = make({1, 1}, {1, 1}, {1}, {Matrix::Ones(2, 1)});
  EXPECT_FALSE(is_feasible(matrix({{1}, {1}}), in));
}

TEST(Feasibility, ServiceLimitBreach) {
  const auto in = make({1, 1}, {1, 1}, {2, 2}, {Matrix::Ones(2, 2)});
  EXPECT_FALSE(is_feasible(matrix({{0.6, 0.6}, {0, 0}}), in));
  EXPECT_TRUE(is_feasible(matrix({{0.6, 0.4}, {0, 0}}), in));
}

TEST(Feasibility, NegativeEntryAndShape) {
  const auto in = fixtures::reference_2x2();
  EXPECT_FALSE(is_feasible(matrix({{-0.1, 0}, {0, 0}}), in));
  EXPECT_TRUE(is_feasible(matrix({{-0.1, 0}, {0, 0}}), in, 0.2));
  EXPECT_THROW(is_feasible(Matrix::Zero(3, 2), in), DimensionError);
}

TEST(Utility, Arithmetic) {
  Vector v(2), a(2);
  v << 3, 1;
  a << 1, 0;
  EXPECT_DOUBLE_EQ(utility(v, a, 2), 1.0);
  EXPECT_DOUBLE_EQ(utility(v, Vector::Zero(2), 0), 0.0);
  Vector v1(1), a1(1);
  v1 << 4;
  a1 << 0.5;
  EXPECT_DOUBLE_EQ(utility(v1, a1, 1), 1.0);
  EXPECT_THROW(utility(v, a1, 0), DimensionError);
}

TEST(Revenue, Sums) {
  Vector p(3);
  p << 1, 2, 3;
  EXPECT_DOUBLE_EQ(revenue(p), 6.0);
  EXPECT_DOUBLE_EQ(revenue(Vector::Zero(2)), 0.0);
  Vector q(2);
  q << -1, 4;
  EXPECT_DOUBLE_EQ(revenue(q), 3.0);
}

TEST(Scale, FlooredAtOne) {
  EXPECT_DOUBLE_EQ(fixtures::zero_budget().scale(), 5.0);
  EXPECT_DOUBLE_EQ(make({0, 0}, {1, 1}, {1, 1}, {Matrix::Zero(2, 2)}).scale(), 1.0);
}
