#include "lmpflp/error.hpp"
#include "lmpflp/instance.hpp"

#include <cmath>
#include <limits>

namespace lmpflp {

std::vector<int> mask_to_set(std::uint64_t mask) {
  std::vector<int> out;
  for (int f = 0; mask; ++f, mask >>= 1)
    if (mask & 1) out.push_back(f);
  return out;
}

namespace {

// Depth-first walk over include/exclude decisions. Each level keeps the
// per-client distance to the nearest chosen facility so a leaf costs O(1).
class SubsetWalker {
 public:
  SubsetWalker(const Instance& inst, int min_size, int max_size)
      : inst_(inst), min_size_(min_size), max_size_(max_size) {
    const int m = inst.num_facilities();
    const int n = inst.num_clients();
    nearest_.assign(m + 1, std::vector<double>(n, std::numeric_limits<double>::infinity()));
  }

  template <class Leaf>
  void run(Leaf&& leaf) {
    walk(0, 0, 0, 0.0, leaf);
  }

 private:
  template <class Leaf>
  void walk(int f, std::uint64_t mask, int size, double open, Leaf& leaf) {
    const int m = inst_.num_facilities();
    if (size + (m - f) < min_size_) return;
    if (f == m) {
      if (size == 0) return;
      double conn = 0.0;
      for (double d : nearest_[f]) conn += d;
      leaf(mask, size, open, conn);
      return;
    }
    // Exclude f.
    nearest_[f + 1] = nearest_[f];
    walk(f + 1, mask, size, open, leaf);
    // Include f.
    if (size < max_size_) {
      auto& next = nearest_[f + 1];
      const auto& cur = nearest_[f];
      for (int c = 0; c < inst_.num_clients(); ++c) next[c] = std::min(cur[c], inst_.dist(c, f));
      walk(f + 1, mask | (std::uint64_t{1} << f), size + 1, open + inst_.opening_cost(f), leaf);
    }
  }

  const Instance& inst_;
  int min_size_;
  int max_size_;
  std::vector<std::vector<double>> nearest_;
};

}  // namespace

UflEnumeration brute_force_ufl(const Instance& inst, bool keep_table) {
  const int m = inst.num_facilities();
  if (m > kMaxBruteForceFacilities)
    throw BudgetExceeded("brute_force_ufl: m = " + std::to_string(m) + " exceeds " +
                         std::to_string(kMaxBruteForceFacilities));
  UflEnumeration out;
  if (keep_table) {
    out.facility_cost.assign(std::size_t{1} << m, 0.0);
    out.connection_cost.assign(std::size_t{1} << m, 0.0);
  }
  std::uint64_t best_mask = 0;
  double best = std::numeric_limits<double>::infinity();
  SubsetWalker walker(inst, 1, m);
  walker.run([&](std::uint64_t mask, int, double open, double conn) {
    if (keep_table) {
      out.facility_cost[mask] = open;
      out.connection_cost[mask] = conn;
    }
    const double v = open + conn;
    if (v < best || (v == best && mask < best_mask)) {
      best = v;
      best_mask = mask;
    }
  });
  out.best = evaluate(inst, mask_to_set(best_mask));
  return out;
}

Solution brute_force_kmedian(const Instance& inst, int k) {
  const int m = inst.num_facilities();
  if (k < 1 || k > m) throw InvalidArgument("k must be in [1, m]");
  if (m > 63) throw BudgetExceeded("brute_force_kmedian supports at most 63 facilities");
  double subsets = 1.0;
  for (int i = 0; i < k; ++i) subsets = subsets * (m - i) / (i + 1);
  if (subsets > kMaxKMedianSubsets)
    throw BudgetExceeded("brute_force_kmedian: C(m,k) = " + std::to_string(std::llround(subsets)) +
                         " exceeds the enumeration budget");

  std::uint64_t best_mask = 0;
  double best = std::numeric_limits<double>::infinity();
  SubsetWalker walker(inst, k, k);
  walker.run([&](std::uint64_t mask, int size, double, double conn) {
    if (size != k) return;
    if (conn < best || (conn == best && mask < best_mask)) {
      best = conn;
      best_mask = mask;
    }
  });
  return evaluate(inst, mask_to_set(best_mask));
}

}  // namespace lmpflp
