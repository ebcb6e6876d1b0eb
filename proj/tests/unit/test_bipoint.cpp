#include <gtest/gtest.h>

#include "lmpflp/bipoint.hpp"
#include "lmpflp/error.hpp"
#include "lmpflp/jms.hpp"
#include "lmpflp/rng.hpp"
#include "random_instances.hpp"

#include <algorithm>
#include <cmath>

using namespace lmpflp;
using lmpflp::testing::random_small_instance;

namespace {

Instance random_kmedian_instance(std::uint64_t seed) {
  Rng rng(seed);
  return gen_euclidean(seed, rng.range(4, 9), rng.range(4, 14), 2, CostLaw::uniform(1.0));
}

}  // namespace

TEST(Lagrangian, EndpointsAreForced) {
  const Instance inst = random_kmedian_instance(3);
  const Solution zero = lagrangian_solution(inst, 0.0, {});
  EXPECT_EQ(zero.size(), inst.num_facilities());
  const double top = 3.0 * inst.total_client_facility_distance();
  const Solution one = lagrangian_solution(inst, top, {});
  ASSERT_EQ(one.size(), 1);
  // Best single facility by direct scan.
  double best = 1e300;
  for (int f = 0; f < inst.num_facilities(); ++f) best = std::min(best, evaluate(inst, {f}).connection_cost);
  EXPECT_DOUBLE_EQ(one.connection_cost, best);
}

TEST(Lagrangian, ProbesAreLmpTwo) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Instance inst = random_kmedian_instance(seed);
    for (double lambda : {0.05, 0.3, 1.0}) {
      const Solution s = lagrangian_solution(inst, lambda, {});
      const Instance priced = inst.with_opening_costs(Eigen::VectorXd::Constant(inst.num_facilities(), lambda));
      EXPECT_TRUE(verify_lmp(priced, s, 2.0).passed) << "seed " << seed << " lambda " << lambda;
    }
  }
}

TEST(Bipoint, ConvexIdentities) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = random_kmedian_instance(seed);
    const int k = 1 + static_cast<int>(seed % 3);
    if (k >= inst.num_facilities()) continue;
    const Bipoint b = bipoint_search(inst, k, 0.05);
    EXPECT_GE(b.a, 0.0);
    EXPECT_LE(b.a, 1.0);
    EXPECT_DOUBLE_EQ(b.a + b.b, 1.0);
    if (b.degenerate) {
      EXPECT_EQ(b.k1, k);
    } else {
      EXPECT_LE(b.k1, k);
      EXPECT_GT(b.k2, k);
      EXPECT_NEAR(b.a * b.k1 + b.b * b.k2, k, 1e-12);
      EXPECT_LE(b.lambda_lo, b.lambda);
    }
    EXPECT_NEAR(b.combined_connection(), b.a * b.S1.connection_cost + b.b * b.S2.connection_cost, 1e-12);
  }
}

TEST(Bipoint, WithinTwoPlusEpsOfTheOptimum) {
  const double eps = 0.05;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Instance inst = random_kmedian_instance(seed + 100);
    const int k = 1 + static_cast<int>(seed % 3);
    if (k >= inst.num_facilities()) continue;
    const Bipoint b = bipoint_search(inst, k, eps);
    const double opt = brute_force_kmedian(inst, k).connection_cost;
    EXPECT_LE(b.lower_bound, opt * (1 + 1e-12));
    EXPECT_LE(b.combined_connection(), (2.0 + eps) * opt + 1e-9) << format_report(b);
  }
}

TEST(Bipoint, RejectsBadK) {
  const Instance inst = random_kmedian_instance(1);
  EXPECT_THROW(bipoint_search(inst, 0, 0.05), InvalidArgument);
  EXPECT_THROW(bipoint_search(inst, inst.num_facilities(), 0.05), InvalidArgument);
  EXPECT_THROW(bipoint_search(inst, 1, 0.0), InvalidArgument);
}

TEST(Trim, KeepsASubsetOfSizeK) {
  const Instance inst = random_kmedian_instance(5);
  const Solution all = evaluate(inst, [&] {
    std::vector<int> v(inst.num_facilities());
    for (int f = 0; f < inst.num_facilities(); ++f) v[f] = f;
    return v;
  }());
  const Solution t = trim_to_k(inst, all, 2);
  EXPECT_EQ(t.size(), 2);
  // One greedy step from {f, g, h} can only worsen the best pair by the last removal.
  const Solution t1 = trim_to_k(inst, all, 1);
  double best = 1e300;
  for (int f = 0; f < inst.num_facilities(); ++f) best = std::min(best, evaluate(inst, {f}).connection_cost);
  EXPECT_GE(t1.connection_cost, best - 1e-12);
  EXPECT_EQ(trim_to_k(inst, t, 2).open, t.open);
}

TEST(KMedian, AllFacilitiesWhenKIsM) {
  const Instance inst = random_kmedian_instance(2);
  const KMedianResult r = kmedian_solve(inst, inst.num_facilities(), 0.05);
  EXPECT_EQ(r.solution.size(), inst.num_facilities());
  EXPECT_NEAR(r.solution.connection_cost, brute_force_kmedian(inst, inst.num_facilities()).connection_cost, 1e-12);
}

TEST(KMedian, FeasibleAndWithinSanityBand) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    Rng rng(seed);
    const Instance inst = gen_euclidean(seed, rng.range(4, 10), rng.range(4, 16), 2, CostLaw::uniform(1.0));
    const int k = rng.range(1, 4);
    if (k >= inst.num_facilities()) continue;
    const KMedianResult r = kmedian_solve(inst, k, 0.05);
    EXPECT_LE(r.solution.size(), k);
    EXPECT_LE(r.solution.connection_cost, r.s1_cost + 1e-12);
    const double opt = brute_force_kmedian(inst, k).connection_cost;
    EXPECT_LE(r.solution.connection_cost, 5.0 * opt + 1e-9);
    EXPECT_GE(r.solution.connection_cost, opt - 1e-9);
  }
}

TEST(CostScaling, TopEndOpensOneCheapestFacility) {
  Eigen::MatrixXd coords(5, 1);
  coords << 0.0, 1.0, 2.0, 0.5, 1.5;
  const Instance inst = Instance::from_points((Eigen::VectorXd(3) << 2.0, 1.0, 1.0).finished(), 2, coords);
  const Solution s = scaled_solution(inst, cost_scaling_lambda_max(inst), {});
  // Facilities 1 and 2 tie on cost; 1 is closer to the clients.
  EXPECT_EQ(s.open, (std::vector<int>{1}));
  // gamma = min(1, gap 1) = 1, M = sum of the six client-facility distances.
  EXPECT_DOUBLE_EQ(cost_scaling_lambda_max(inst), 3.0 * (0.5 + 0.5 + 1.5 + 1.5 + 0.5 + 0.5));
}

TEST(CostScaling, BoundaryBranches) {
  const Instance inst = random_small_instance(4, 6, 8);
  const Solution nearest = scaled_solution(inst, 0.0, {});
  const CostScalingResult big = cost_scaling_lmp(inst, nearest.facility_cost + 1.0);
  EXPECT_EQ(big.status, ScalingStatus::NearestIsCheap);
  EXPECT_LE(big.S1.connection_cost, evaluate(inst, {0}).connection_cost);

  const double cheapest = inst.opening_costs().minCoeff();
  if (cheapest > 0.0) {
    const CostScalingResult tiny = cost_scaling_lmp(inst, 0.5 * cheapest);
    EXPECT_EQ(tiny.status, ScalingStatus::GuessTooSmall);
    EXPECT_EQ(tiny.S1.size(), 1);
  }
  EXPECT_THROW(cost_scaling_lmp(inst, 0.0), InvalidArgument);
}

TEST(CostScaling, ConvexAccountingAgainstTheOptimum) {
  int bracketed = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = random_small_instance(seed, 6, 8);
    const Solution opt = brute_force_ufl(inst).best;
    if (!(opt.facility_cost > 0.0)) continue;
    const CostScalingResult r = cost_scaling_lmp(inst, opt.facility_cost);
    if (r.status != ScalingStatus::Bracketed) {
      // S(0) opens no more than the optimum while serving everyone at distance d_min.
      EXPECT_EQ(r.status, ScalingStatus::NearestIsCheap);
      EXPECT_LE(r.S1.cost(), opt.cost() + 1e-9);
      continue;
    }
    ++bracketed;
    EXPECT_NEAR(r.a * r.S1.facility_cost + (1 - r.a) * r.S2.facility_cost, opt.facility_cost, 1e-9);
    EXPECT_LE(r.S1.facility_cost, opt.facility_cost + 1e-12);
    EXPECT_GT(r.S2.facility_cost, opt.facility_cost);
    const double rhs = r.lambda * opt.facility_cost + 2.0 * opt.connection_cost;
    EXPECT_LE(r.combined_scaled_cost(), rhs + 1e-9 * std::max(1.0, rhs)) << "seed " << seed;
  }
  EXPECT_GT(bracketed, 0);
}

TEST(CostScaling, GuessGridIsGeometric) {
  const Instance inst = random_small_instance(2, 6, 8);
  const auto g = open_guesses(inst, 0.5);
  ASSERT_FALSE(g.empty());
  EXPECT_DOUBLE_EQ(g.back(), inst.opening_costs().sum());
  for (std::size_t i = 1; i + 1 < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], 1.5, 1e-12);
}

TEST(Bipoint, ReportFormat) {
  Bipoint b;
  b.k = 2;
  b.k1 = 1;
  b.k2 = 3;
  b.a = 0.5;
  b.b = 0.5;
  const std::string r = format_report(b);
  EXPECT_NE(r.find("bipoint.k1=1\n"), std::string::npos);
  EXPECT_NE(r.find("bipoint.a=0.5\n"), std::string::npos);
  EXPECT_NE(r.find("bipoint.degenerate=0\n"), std::string::npos);
}
