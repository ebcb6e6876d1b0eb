#include <gtest/gtest.h>

#include "lmpflp/error.hpp"
#include "lmpflp/jms.hpp"
#include "lmpflp/local_search.hpp"
#include "random_instances.hpp"

#include <algorithm>
#include <cmath>

using namespace lmpflp;
using lmpflp::testing::random_small_instance;

namespace {

// Every (A, B) pair with |A|, |B| <= delta, checked without the library scanner.
bool naive_swap_local_opt(const Instance& inst, const std::vector<int>& open, int delta, const SearchConfig& cfg) {
  const int m = inst.num_facilities();
  const double cur = weighted_cost(evaluate(inst, open), cfg);
  std::uint64_t cur_mask = 0;
  for (int f : open) cur_mask |= 1ull << f;
  for (std::uint64_t mask = 1; mask < (1ull << m); ++mask) {
    const int removed = __builtin_popcountll(cur_mask & ~mask);
    const int added = __builtin_popcountll(mask & ~cur_mask);
    if (removed > delta || added > delta || mask == cur_mask) continue;
    const double c = weighted_cost(evaluate(inst, mask_to_set(mask)), cfg);
    if (c < cur - 1e-12 * std::max(1.0, std::abs(cur))) return false;
  }
  return true;
}

Instance two_clusters() {
  Eigen::MatrixXd coords(8, 1);
  coords << 0.0, 1.0, 100.0, 101.0, 0.4, 0.42, 100.5, 100.7;
  return Instance::from_points(Eigen::VectorXd::Constant(4, 0.3), 4, coords);
}

}  // namespace

TEST(LocalSearch, OptimumStartMakesNoMoves) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = random_small_instance(seed, 7, 8);
    const Solution opt = brute_force_ufl(inst).best;
    const SearchResult r = swap_local_search(inst, opt, {});
    EXPECT_TRUE(r.log.empty()) << "seed " << seed;
    EXPECT_NEAR(r.solution.cost(), opt.cost(), 1e-12);
  }
}

TEST(LocalSearch, EndsInANaiveLocalOptimum) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = random_small_instance(seed, 7, 8);
    SearchConfig cfg;
    cfg.delta = 1 + static_cast<int>(seed % 2);
    const Solution start = evaluate(inst, {0});
    const SearchResult r = swap_local_search(inst, start, cfg);
    EXPECT_FALSE(r.budget_exhausted);
    EXPECT_TRUE(naive_swap_local_opt(inst, r.solution.open, cfg.delta, cfg)) << "seed " << seed;
    EXPECT_TRUE(is_local_opt(inst, r.solution, cfg, MoveFamily::Swap).local_opt);
    for (std::size_t i = 1; i < r.log.size(); ++i) EXPECT_LT(r.log[i].cost, r.log[i - 1].cost);
  }
}

TEST(LocalSearch, JmsSeedOnlyImproves) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Instance inst = random_small_instance(seed, 8, 10);
    const Solution jms = jms_run(inst).solution;
    const SearchResult r = swap_local_search(inst, jms, {});
    EXPECT_LE(r.solution.cost(), jms.cost() + 1e-12);
    const SearchResult again = swap_local_search(inst, r.solution, {});
    EXPECT_TRUE(again.log.empty()) << "seed " << seed;
  }
}

TEST(LocalSearch, ShuffledOrderStillReachesALocalOptimum) {
  const Instance inst = random_small_instance(4, 8, 10);
  SearchConfig cfg;
  cfg.seed = 99;
  const SearchResult r = swap_local_search(inst, evaluate(inst, {1}), cfg);
  EXPECT_TRUE(naive_swap_local_opt(inst, r.solution.open, cfg.delta, cfg));
}

TEST(LocalSearch, RelativeThresholdDemandsAFactorGain) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = random_small_instance(seed, 7, 8);
    SearchConfig cfg;
    cfg.threshold_mode = ThresholdMode::Relative;
    cfg.eps = 0.9;
    const double factor = 1.0 + std::pow(cfg.eps, 3) / std::pow(inst.num_points(), 5);
    const SearchResult r = swap_local_search(inst, evaluate(inst, {0}), cfg);
    double prev = weighted_cost(evaluate(inst, {0}), cfg);
    for (const Move& m : r.log) {
      EXPECT_LT(m.cost * factor, prev * (1 + 1e-15));
      prev = m.cost;
    }
    EXPECT_TRUE(is_local_opt(inst, r.solution, cfg, MoveFamily::Swap).local_opt);
  }
}

TEST(LocalSearch, BudgetIsReported) {
  const Instance inst = random_small_instance(2, 8, 10);
  SearchConfig cfg;
  const Solution start = evaluate(inst, {0});
  const SearchResult full = swap_local_search(inst, start, cfg);
  ASSERT_GE(full.log.size(), 1u);
  cfg.move_budget = 0;
  const SearchResult none = swap_local_search(inst, start, cfg);
  EXPECT_TRUE(none.budget_exhausted);
  EXPECT_TRUE(none.log.empty());
  cfg.move_budget = static_cast<long>(full.log.size());
  EXPECT_FALSE(swap_local_search(inst, start, cfg).budget_exhausted);
}

TEST(LocalSearch, RejectsBadConfig) {
  const Instance inst = random_small_instance(1, 4, 4);
  SearchConfig cfg;
  cfg.delta = 0;
  EXPECT_THROW(swap_local_search(inst, evaluate(inst, {0}), cfg), InvalidArgument);
  cfg = {};
  cfg.eps = 1.5;
  EXPECT_THROW(swap_local_search(inst, evaluate(inst, {0}), cfg), InvalidArgument);
  cfg = {};
  cfg.alpha = 0.0;
  EXPECT_THROW(swap_local_search(inst, evaluate(inst, {0}), cfg), InvalidArgument);
  EXPECT_THROW(swap_local_search(inst, Solution{}, {}), InvalidArgument);
  EXPECT_EQ(SearchConfig{}.width(), 3);
}

TEST(LocalSearch, MoveLogFormat) {
  Move a{Move::Kind::Swap, {0}, {2, 3}, 1.5};
  Move b{Move::Kind::Extend, {2}, {}, 1.25};
  EXPECT_EQ(format_move_log({a, b}),
            "step=1 kind=swap removed=[0] added=[2,3] cost=1.5\n"
            "step=2 kind=extend removed=[2] added=[] cost=1.25\n");
}

TEST(LsTrapSearch, IsASwapLocalOptimumAboveTheOptimum) {
  for (int delta : {1, 2}) {
    const LsTrap t = gen_ls_counterexample(delta, 1.0, 1.0);
    SearchConfig cfg;
    cfg.delta = delta;
    const Solution trap = evaluate(t.instance, t.trap);
    const Solution opt = evaluate(t.instance, t.optimum);
    EXPECT_TRUE(is_local_opt(t.instance, trap, cfg, MoveFamily::Swap).local_opt);
    EXPECT_TRUE(naive_swap_local_opt(t.instance, t.trap, delta, cfg));
    EXPECT_LT(opt.cost(), trap.cost());
    EXPECT_EQ(opt.connection_cost, 0.0);
    EXPECT_TRUE(swap_local_search(t.instance, trap, cfg).log.empty());
  }
}

TEST(LsTrapSearch, JmsMovesEscapeWhenFacilitiesAreCheap) {
  SearchConfig cfg;
  cfg.delta = 3;
  cfg.beta = 0.5;
  const LsTrap t = gen_ls_counterexample(cfg.delta, cfg.alpha, cfg.beta);
  ASSERT_LT(t.y, 1.0);
  const Solution trap = evaluate(t.instance, t.trap);
  ASSERT_TRUE(is_local_opt(t.instance, trap, cfg, MoveFamily::Swap).local_opt);
  ASSERT_FALSE(is_local_opt(t.instance, trap, cfg, MoveFamily::JmsExtended).local_opt);

  // By hand: with f0 closed, each client pays y < 1 to its co-located
  // facility before it reaches f0, so JMS opens every f_i.
  const Solution hand = extend_jms(t.instance, {}).solution;
  EXPECT_EQ(hand.open, t.optimum);
  EXPECT_DOUBLE_EQ(hand.connection_cost, 0.0);

  const SearchResult r = localsearch_jms(t.instance, trap, cfg);
  EXPECT_NEAR(r.solution.cost(), evaluate(t.instance, t.optimum).cost(), 1e-9);
}

TEST(LocalSearchJms, NoWorseThanItsSeedAndLocallyOptimal) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Instance inst = random_small_instance(seed, 6, 7);
    const Solution jms = jms_run(inst).solution;
    const SearchResult r = localsearch_jms(inst, jms, {});
    EXPECT_LE(r.solution.cost(), jms.cost() + 1e-12);
    EXPECT_TRUE(is_local_opt(inst, r.solution, {}, MoveFamily::JmsExtended).local_opt);
  }
}

TEST(Preprocess, SplitsFarClusters) {
  const Instance inst = two_clusters();
  const Components c = preprocess_components(inst, 1.0, 0.5);
  ASSERT_EQ(c.parts.size(), 2u);
  EXPECT_TRUE(c.stranded_clients.empty());
  EXPECT_EQ(c.parts[0].facilities, (std::vector<int>{0, 1}));
  EXPECT_EQ(c.parts[0].clients, (std::vector<int>{0, 1}));
  EXPECT_EQ(c.parts[1].facilities, (std::vector<int>{2, 3}));
  EXPECT_EQ(c.parts[1].clients, (std::vector<int>{2, 3}));
}

TEST(Preprocess, SnapsVeryClosePoints) {
  const Instance inst = two_clusters();
  // Radius 0.5 * 1 / 16 = 0.03125 merges client 1 (x = 0.42) into client 0 (x = 0.4)
  // and nothing else.
  const Components c = preprocess_components(inst, 1.0, 0.5);
  const Instance& part = c.parts[0].instance;
  EXPECT_DOUBLE_EQ(part.dist(1, 0), part.dist(0, 0));
  EXPECT_DOUBLE_EQ(part.dist(0, 0), 0.4);
  EXPECT_NEAR(c.parts[1].instance.dist(1, 0), 0.7, 1e-12);
}

TEST(Preprocess, StrandedClientsAreListed) {
  Eigen::MatrixXd coords(3, 1);
  coords << 0.0, 0.5, 50.0;
  const Instance inst = Instance::from_points(Eigen::VectorXd::Constant(1, 1.0), 2, coords);
  const Components c = preprocess_components(inst, 1.0, 0.5);
  EXPECT_EQ(c.stranded_clients, (std::vector<int>{1}));
}

TEST(Preprocess, EtaEstimatesAreGeometric) {
  const Instance inst = two_clusters();
  const auto etas = eta_estimates(inst, 0.5);
  ASSERT_GE(etas.size(), 2u);
  EXPECT_NEAR(etas.front(), 0.02, 1e-12);
  for (std::size_t i = 1; i + 1 < etas.size(); ++i) EXPECT_NEAR(etas[i] / etas[i - 1], 1.5, 1e-12);
  EXPECT_NEAR(etas.back(), 4 * 101.0, 1e-9);
}

TEST(Preprocess, FullPipelineIsNearOptimal) {
  const double eps = 0.5;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Instance inst = random_small_instance(seed, 6, 7);
    SearchConfig cfg;
    cfg.eps = eps;
    const SearchResult r = preprocessed_local_search(inst, cfg);
    const double opt = brute_force_ufl(inst).best.cost();
    // Width-2 swaps on a metric are within a factor 3 of the optimum, and the
    // contraction costs at most another (1 + eps).
    EXPECT_LE(r.solution.cost(), 3.0 * (1.0 + eps) * opt + 1e-9) << "seed " << seed;
  }
}
