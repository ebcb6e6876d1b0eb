#include <gtest/gtest.h>

#include "lmpflp/error.hpp"
#include "lmpflp/lp.hpp"
#include "lmpflp/rng.hpp"

#include <array>
#include <cmath>

using namespace lmpflp;

namespace {

// Random bounded, feasible LP: 0 <= x <= u via rows, plus random <= rows with
// nonnegative rhs and a few equalities satisfied by a known interior point.
LpModel random_model(std::uint64_t seed, int n, int m) {
  Rng rng(seed);
  LpModel lp;
  for (int j = 0; j < n; ++j) lp.add_variable(rng.uniform(-1.0, 2.0));
  Eigen::VectorXd x0(n);
  for (int j = 0; j < n; ++j) x0[j] = rng.uniform(0.1, 1.0);
  for (int j = 0; j < n; ++j) lp.add_row({{j, 1.0}}, Relation::LessEq, 3.0);
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> row;
    double act = 0.0;
    for (int j = 0; j < n; ++j)
      if (rng.uniform() < 0.5) {
        const double c = rng.uniform(-2.0, 2.0);
        row.emplace_back(j, c);
        act += c * x0[j];
      }
    if (i % 4 == 3) {
      lp.add_row(row, Relation::Equal, act);
    } else {
      lp.add_row(row, Relation::LessEq, act + rng.uniform(0.0, 1.0));
    }
  }
  return lp;
}

// Vertex enumeration oracle for two-variable problems max c'x, Ax <= b, x >= 0.
double brute_2d(const std::vector<std::array<double, 3>>& rows, double c0, double c1) {
  std::vector<std::array<double, 3>> all = rows;
  all.push_back({-1, 0, 0});
  all.push_back({0, -1, 0});
  double best = -1e300;
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j) {
      const double det = all[i][0] * all[j][1] - all[i][1] * all[j][0];
      if (std::abs(det) < 1e-12) continue;
      const double x = (all[i][2] * all[j][1] - all[i][1] * all[j][2]) / det;
      const double y = (all[i][0] * all[j][2] - all[i][2] * all[j][0]) / det;
      bool ok = true;
      for (auto& r : all) ok = ok && r[0] * x + r[1] * y <= r[2] + 1e-9;
      if (ok) best = std::max(best, c0 * x + c1 * y);
    }
  return best;
}

}  // namespace

TEST(LpSolve, SingleBound) {
  LpModel lp;
  int x = lp.add_variable(1.0);
  lp.add_row({{x, 1.0}}, Relation::LessEq, 3.0);
  LpResult r = lp_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.value, 3.0, 1e-12);
  EXPECT_NEAR(r.dual[0], 1.0, 1e-12);
}

TEST(LpSolve, Infeasible) {
  LpModel lp;
  int x = lp.add_variable(1.0);
  lp.add_row({{x, -1.0}}, Relation::LessEq, -1.0);
  lp.add_row({{x, 1.0}}, Relation::LessEq, 0.0);
  EXPECT_EQ(lp_solve(lp).status, LpStatus::Infeasible);
}

TEST(LpSolve, DegenerateFace) {
  LpModel lp;
  int x = lp.add_variable(1.0), y = lp.add_variable(1.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, Relation::LessEq, 1.0);
  LpResult r = lp_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
}

TEST(LpSolve, Unbounded) {
  LpModel lp;
  int x = lp.add_variable(1.0), y = lp.add_variable(0.0);
  lp.add_row({{x, 1.0}, {y, -1.0}}, Relation::LessEq, 1.0);
  EXPECT_EQ(lp_solve(lp).status, LpStatus::Unbounded);
}

TEST(LpSolve, EqualityAndRedundantRows) {
  LpModel lp;
  int x = lp.add_variable(1.0), y = lp.add_variable(2.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, Relation::Equal, 2.0);
  lp.add_row({{x, 2.0}, {y, 2.0}}, Relation::Equal, 4.0);  // redundant copy
  lp.add_row({{y, 1.0}}, Relation::LessEq, 1.5);
  lp.add_row({}, Relation::LessEq, 0.0);
  LpResult r = lp_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.value, 0.5 + 3.0, 1e-10);
  EXPECT_NEAR(r.primal[x], 0.5, 1e-10);
}

TEST(LpSolve, InconsistentEmptyRow) {
  LpModel lp;
  lp.add_variable(1.0);
  lp.add_row({}, Relation::Equal, 1.0);
  EXPECT_EQ(lp_solve(lp).status, LpStatus::Infeasible);
}

TEST(LpSolve, MatchesVertexEnumerationIn2D) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::array<double, 3>> rows;
    LpModel lp;
    const double c0 = rng.uniform(-1, 2), c1 = rng.uniform(-1, 2);
    lp.add_variable(c0);
    lp.add_variable(c1);
    rows.push_back({1, 0, 4});
    rows.push_back({0, 1, 4});
    for (int i = 0; i < 4; ++i) rows.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1, 3)});
    for (auto& r : rows) lp.add_row({{0, r[0]}, {1, r[1]}}, Relation::LessEq, r[2]);
    const double oracle = brute_2d(rows, c0, c1);
    LpResult res = lp_solve(lp);
    if (oracle < -1e299) {
      EXPECT_EQ(res.status, LpStatus::Infeasible);
    } else {
      ASSERT_EQ(res.status, LpStatus::Optimal);
      EXPECT_NEAR(res.value, oracle, 1e-8);
    }
  }
}

TEST(LpSolve, DualityAndComplementarySlackness) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    LpModel lp = random_model(seed, 12, 15);
    LpResult r = lp_solve(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    // Dual feasibility: A'y >= c, y >= 0 on <= rows; strong duality b'y = value.
    Eigen::VectorXd aty = Eigen::VectorXd::Zero(lp.num_vars());
    double by = 0.0;
    for (int i = 0; i < lp.num_rows(); ++i) {
      const LpRow& row = lp.rows()[i];
      if (row.rel == Relation::LessEq) EXPECT_GE(r.dual[i], -1e-9);
      for (auto [v, c] : row.coefs) aty[v] += c * r.dual[i];
      by += row.rhs * r.dual[i];
      const double slack = row.rhs - lp.row_activity(i, r.primal);
      EXPECT_LE(std::abs(slack * r.dual[i]), 1e-6);
    }
    for (int j = 0; j < lp.num_vars(); ++j) {
      EXPECT_GE(aty[j], lp.objective()[j] - 1e-8);
      EXPECT_LE(std::abs((aty[j] - lp.objective()[j]) * r.primal[j]), 1e-6);
    }
    EXPECT_LE(r.value, by + 1e-6);
    EXPECT_NEAR(r.value, by, 1e-6);
  }
}

TEST(LpCheckDual, AcceptsSolverDualsAndFlagsBadOnes) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    LpModel lp = random_model(seed, 10, 12);
    LpResult r = lp_solve(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    DualReport ok = lp_check_dual(lp, r.dual, 1e-8);
    EXPECT_TRUE(ok.feasible);
    EXPECT_NEAR(ok.objective, r.value, 1e-6);
  }
  // max x + y, x <= 1, y <= 2: y = (1, 1) is optimal, (1, 0.5) leaves y short.
  LpModel lp;
  lp.add_variable(1.0);
  lp.add_variable(1.0);
  lp.add_row({{0, 1.0}}, Relation::LessEq, 1.0);
  lp.add_row({{1, 1.0}}, Relation::LessEq, 2.0);
  DualReport good = lp_check_dual(lp, Eigen::Vector2d(1.0, 1.0), 1e-12);
  EXPECT_TRUE(good.feasible);
  EXPECT_DOUBLE_EQ(good.objective, 3.0);
  DualReport bad = lp_check_dual(lp, Eigen::Vector2d(1.0, 0.5), 1e-12);
  EXPECT_FALSE(bad.feasible);
  ASSERT_EQ(bad.violations.size(), 1u);
  EXPECT_EQ(bad.violations[0].first, 1);
  EXPECT_DOUBLE_EQ(bad.violations[0].second, 0.5);
  DualReport negative = lp_check_dual(lp, Eigen::Vector2d(-1.0, 1.0), 1e-12);
  EXPECT_FALSE(negative.feasible);
  EXPECT_EQ(negative.violations[0].first, -1);
}

TEST(LpSolve, DeterministicAndScaleCovariant) {
  LpModel lp = random_model(99, 15, 20);
  LpResult a = lp_solve(lp), b = lp_solve(lp);
  ASSERT_EQ(a.status, LpStatus::Optimal);
  EXPECT_EQ(a.status, b.status);
  EXPECT_NEAR(a.value, b.value, 1e-10);
  for (double c : {0.5, 2.0, 10.0}) {
    LpModel scaled;
    for (int j = 0; j < lp.num_vars(); ++j) scaled.add_variable(c * lp.objective()[j]);
    for (const LpRow& row : lp.rows()) scaled.add_row(row.coefs, row.rel, c * row.rhs);
    LpResult s = lp_solve(scaled);
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_NEAR(s.value, c * c * a.value, 1e-7 * std::max(1.0, std::abs(c * c * a.value)));
    // Either scaling alone scales the value by c.
    LpModel rhs_only;
    for (int j = 0; j < lp.num_vars(); ++j) rhs_only.add_variable(lp.objective()[j]);
    for (const LpRow& row : lp.rows()) rhs_only.add_row(row.coefs, row.rel, c * row.rhs);
    EXPECT_NEAR(lp_solve(rhs_only).value, c * a.value, 1e-7 * std::max(1.0, std::abs(c * a.value)));
  }
}

TEST(LpSolve, CyclingExampleTerminates) {
  // Beale's classic cycling LP for Dantzig with naive ratio ties.
  LpModel lp;
  for (double c : {0.75, -150.0, 0.02, -6.0}) lp.add_variable(c);
  lp.add_row({{0, 0.25}, {1, -60}, {2, -0.04}, {3, 9}}, Relation::LessEq, 0);
  lp.add_row({{0, 0.5}, {1, -90}, {2, -0.02}, {3, 3}}, Relation::LessEq, 0);
  lp.add_row({{2, 1}}, Relation::LessEq, 1);
  LpResult r = lp_solve(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.value, 0.05, 1e-10);
}

TEST(LpCheck, ReportsViolation) {
  LpModel lp;
  int x = lp.add_variable(1.0), y = lp.add_variable(1.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, Relation::LessEq, 1.0);
  lp.add_row({{x, 1.0}}, Relation::Equal, 0.5);
  Eigen::VectorXd p(2);
  p << 0.5, 0.5;
  EXPECT_TRUE(lp_check_point(lp, p, 1e-9).feasible);
  p << 0.5, 1.0;
  FeasibilityReport rep = lp_check_point(lp, p, 1e-9);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].first, 0);
  EXPECT_NEAR(rep.violations[0].second, 0.5, 1e-15);
  p << 0.5, -0.1;
  rep = lp_check_point(lp, p, 1e-9);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].first, -2);
}

TEST(LpDump, ListsRows) {
  LpModel lp;
  int x = lp.add_variable(1.0);
  lp.add_row({{x, 2.0}}, Relation::Equal, 4.0);
  EXPECT_EQ(lp_dump(lp), "max 0:1\n= 4 0:2\n");
}
