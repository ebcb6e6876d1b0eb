#include "lmpflp/bipoint.hpp"

#include "lmpflp/error.hpp"
#include "lmpflp/jms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

namespace lmpflp {

namespace {

std::vector<int> all_facilities(const Instance& inst) {
  std::vector<int> all(inst.num_facilities());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

// The single facility minimizing `key`, ties to the lowest id.
template <class Key>
int argmin_facility(const Instance& inst, Key key) {
  int best = 0;
  auto best_key = key(0);
  for (int f = 1; f < inst.num_facilities(); ++f) {
    auto k = key(f);
    if (k < best_key) {
      best = f;
      best_key = k;
    }
  }
  return best;
}

double single_connection(const Instance& inst, int f) {
  double d = 0.0;
  for (int c = 0; c < inst.num_clients(); ++c) d += inst.dist(c, f);
  return d;
}

}  // namespace

Solution lagrangian_solution(const Instance& inst, double lambda, const SearchConfig& inner) {
  const int m = inst.num_facilities();
  const Instance priced = inst.with_opening_costs(Eigen::VectorXd::Constant(m, std::max(lambda, 0.0)));
  if (lambda <= 0.0) return evaluate(priced, all_facilities(inst));
  if (lambda >= 3.0 * inst.total_client_facility_distance()) {
    const int f = argmin_facility(inst, [&](int g) { return single_connection(inst, g); });
    return evaluate(priced, {f});
  }
  return swap_local_search(priced, jms_run(priced).solution, inner).solution;
}

Bipoint bipoint_search(const Instance& inst, int k, double eps, const BipointOptions& opts) {
  const int m = inst.num_facilities();
  if (k < 1 || k >= m) throw InvalidArgument("bipoint search needs 1 <= k < m");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");

  std::vector<std::pair<double, int>> history;
  Bipoint out;
  out.k = k;
  auto probe = [&](double lambda) {
    Solution s = lagrangian_solution(inst, lambda, opts.inner);
    history.emplace_back(lambda, s.size());
    // LMP-2 at this multiplier: lambda |S| + d(S) <= lambda k + 2 opt_k.
    out.lower_bound = std::max(out.lower_bound, 0.5 * (lambda * (s.size() - k) + s.connection_cost));
    ++out.probes;
    return s;
  };

  double lo = 0.0, hi = 3.0 * inst.total_client_facility_distance();
  Solution s_lo = probe(lo);
  Solution s_hi = probe(hi);
  while (out.probes < opts.max_probes && (hi - lo) * k > eps * out.lower_bound) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    Solution s = probe(mid);
    if (s.size() == k) {
      out.degenerate = true;
      out.lambda = out.lambda_lo = mid;
      out.S1 = s;
      out.S2 = std::move(s);
      break;
    }
    if (s.size() > k) {
      lo = mid;
      s_lo = std::move(s);
    } else {
      hi = mid;
      s_hi = std::move(s);
    }
  }

  if (!out.degenerate) {
    out.lambda = hi;
    out.lambda_lo = lo;
    out.S1 = std::move(s_hi);
    out.S2 = std::move(s_lo);
  }
  out.k1 = out.S1.size();
  out.k2 = out.S2.size();
  out.a = out.degenerate ? 1.0 : static_cast<double>(out.k2 - k) / (out.k2 - out.k1);
  out.b = 1.0 - out.a;
  for (const auto& [l1, n1] : history)
    for (const auto& [l2, n2] : history)
      if (l1 < l2 && n1 < n2) out.non_monotone = true;
  return out;
}

Solution trim_to_k(const Instance& inst, const Solution& sol, int k) {
  if (k < 1) throw InvalidArgument("k must be at least 1");
  std::vector<int> open = sol.open;
  while (static_cast<int>(open.size()) > k) {
    std::size_t best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < open.size(); ++i) {
      std::vector<int> rest = open;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      const double c = evaluate(inst, rest).connection_cost;
      if (c < best_cost) {
        best_cost = c;
        best = i;
      }
    }
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return evaluate(inst, open);
}

KMedianResult kmedian_solve(const Instance& inst, int k, double eps, const BipointOptions& opts) {
  KMedianResult r;
  if (k >= inst.num_facilities()) {
    r.solution = evaluate(inst, all_facilities(inst));
    r.s1_cost = r.trim_cost = r.solution.connection_cost;
    return r;
  }
  r.bipoint = bipoint_search(inst, k, eps, opts);
  const Solution s1 = evaluate(inst, r.bipoint.S1.open);
  const Solution trimmed = trim_to_k(inst, r.bipoint.S2, k);
  r.s1_cost = s1.connection_cost;
  r.trim_cost = trimmed.connection_cost;
  r.from_trim = r.trim_cost < r.s1_cost;
  r.solution = r.from_trim ? trimmed : s1;
  return r;
}

const char* to_string(ScalingStatus s) {
  switch (s) {
    case ScalingStatus::Bracketed: return "bracketed";
    case ScalingStatus::NearestIsCheap: return "nearest-is-cheap";
    case ScalingStatus::GuessTooSmall: return "guess-too-small";
  }
  return "?";
}

double CostScalingResult::combined_scaled_cost() const {
  return a * (lambda * S1.facility_cost + S1.connection_cost) +
         (1.0 - a) * (lambda * S2.facility_cost + S2.connection_cost);
}

double cost_scaling_lambda_max(const Instance& inst) {
  std::vector<double> costs(inst.opening_costs().data(), inst.opening_costs().data() + inst.num_facilities());
  std::sort(costs.begin(), costs.end());
  double gamma = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (costs[i] > 0.0) gamma = std::min(gamma, costs[i]);
    if (i > 0 && costs[i] > costs[i - 1]) gamma = std::min(gamma, costs[i] - costs[i - 1]);
  }
  if (!std::isfinite(gamma)) gamma = 1.0;  // all costs zero
  return 3.0 * inst.total_client_facility_distance() / gamma;
}

Solution scaled_solution(const Instance& inst, double lambda, const SearchConfig& inner) {
  if (lambda <= 0.0) {
    const Solution all = evaluate(inst, all_facilities(inst));
    std::vector<int> used(all.assignment.begin(), all.assignment.end());
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    return evaluate(inst, used);
  }
  if (lambda >= cost_scaling_lambda_max(inst)) {
    const int f = argmin_facility(inst, [&](int g) { return std::pair{inst.opening_cost(g), single_connection(inst, g)}; });
    return evaluate(inst, {f});
  }
  const Instance scaled = inst.with_opening_costs(inst.opening_costs() * lambda);
  const Solution s = localsearch_jms(scaled, jms_run(scaled).solution, inner).solution;
  return evaluate(inst, s.open);
}

CostScalingResult cost_scaling_lmp(const Instance& inst, double open_guess, const SearchConfig& inner) {
  if (!(open_guess > 0.0)) throw InvalidArgument("open_guess must be positive");
  CostScalingResult r;
  double lo = 0.0, hi = cost_scaling_lambda_max(inst);
  Solution s_lo = scaled_solution(inst, lo, inner);
  r.probes = 1;
  if (s_lo.facility_cost <= open_guess) {
    r.status = ScalingStatus::NearestIsCheap;
    r.S1 = r.S2 = std::move(s_lo);
    return r;
  }
  Solution s_hi = scaled_solution(inst, hi, inner);
  ++r.probes;
  if (s_hi.facility_cost > open_guess) {
    r.status = ScalingStatus::GuessTooSmall;
    r.lambda = r.lambda_lo = hi;
    r.S1 = r.S2 = std::move(s_hi);
    return r;
  }
  while (r.probes < 400 && hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    Solution s = scaled_solution(inst, mid, inner);
    ++r.probes;
    if (s.facility_cost <= open_guess) {
      hi = mid;
      s_hi = std::move(s);
    } else {
      lo = mid;
      s_lo = std::move(s);
    }
  }
  r.lambda = hi;
  r.lambda_lo = lo;
  r.a = (s_lo.facility_cost - open_guess) / (s_lo.facility_cost - s_hi.facility_cost);
  r.S1 = std::move(s_hi);
  r.S2 = std::move(s_lo);
  return r;
}

std::vector<double> open_guesses(const Instance& inst, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  const Eigen::VectorXd& c = inst.opening_costs();
  double lo = std::numeric_limits<double>::infinity();
  for (int f = 0; f < inst.num_facilities(); ++f)
    if (c[f] > 0.0) lo = std::min(lo, c[f]);
  if (!std::isfinite(lo)) return {};
  const double top = c.sum();
  std::vector<double> out;
  for (double g = lo; g < top * (1.0 + eps); g *= 1.0 + eps) out.push_back(std::min(g, top));
  return out;
}

std::string format_report(const Bipoint& b) {
  std::ostringstream os;
  os.precision(17);
  os << "bipoint.lambda=" << b.lambda << '\n'
     << "bipoint.lambda_lo=" << b.lambda_lo << '\n'
     << "bipoint.k=" << b.k << '\n'
     << "bipoint.k1=" << b.k1 << '\n'
     << "bipoint.k2=" << b.k2 << '\n'
     << "bipoint.a=" << b.a << '\n'
     << "bipoint.b=" << b.b << '\n'
     << "bipoint.d1=" << b.S1.connection_cost << '\n'
     << "bipoint.d2=" << b.S2.connection_cost << '\n'
     << "bipoint.combined_connection=" << b.combined_connection() << '\n'
     << "bipoint.lower_bound=" << b.lower_bound << '\n'
     << "bipoint.probes=" << b.probes << '\n'
     << "bipoint.degenerate=" << (b.degenerate ? 1 : 0) << '\n'
     << "bipoint.non_monotone=" << (b.non_monotone ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace lmpflp
