#pragma once

#include "lmpflp/instance.hpp"
#include "lmpflp/local_search.hpp"

#include <string>
#include <vector>

namespace lmpflp {

// Two Lagrangian solutions bracketing k facilities and their convex weights.
struct Bipoint {
  double lambda = 0.0;     // multiplier of S1 (the upper end of the final bracket)
  double lambda_lo = 0.0;  // multiplier of S2
  Solution S1;             // |S1| = k1 <= k
  Solution S2;             // |S2| = k2 > k, or S2 = S1 when degenerate
  int k = 0, k1 = 0, k2 = 0;
  double a = 1.0;  // (k2 - k) / (k2 - k1)
  double b = 0.0;
  bool degenerate = false;  // some probe returned exactly k facilities
  double lower_bound = 0.0;  // certified lower bound on opt_k from the probes
  int probes = 0;
  bool non_monotone = false;  // |S(lambda)| increased with lambda somewhere

  double combined_connection() const { return a * S1.connection_cost + b * S2.connection_cost; }
};

struct BipointOptions {
  SearchConfig inner = [] {
    SearchConfig c;
    c.delta = 1;
    return c;
  }();
  int max_probes = 200;
};

// Every facility costs lambda; lambda = 0 opens F and lambda >= 3 * (sum of all
// distances) opens the best single facility. Otherwise JMS then swap local search.
Solution lagrangian_solution(const Instance& inst, double lambda, const SearchConfig& inner);

// Binary search on lambda until the bracket satisfies (lambda_hi - lambda_lo) k <= eps * lower_bound.
// Opening costs of inst are ignored. Throws InvalidArgument unless 1 <= k < m.
Bipoint bipoint_search(const Instance& inst, int k, double eps, const BipointOptions& opts = {});

// Greedily closes the facility whose removal raises the connection cost least until k remain.
Solution trim_to_k(const Instance& inst, const Solution& sol, int k);

struct KMedianResult {
  Solution solution;  // |solution| <= k
  Bipoint bipoint;
  double s1_cost = 0.0;
  double trim_cost = 0.0;  // heuristic rounding of S2, no approximation guarantee
  bool from_trim = false;
};

// Best of S1 and trim_to_k(S2). k >= m opens every facility.
KMedianResult kmedian_solve(const Instance& inst, int k, double eps, const BipointOptions& opts = {});

enum class ScalingStatus {
  Bracketed,      // S1 and S2 straddle the guess
  NearestIsCheap, // the lambda = 0 solution already opens at most the guess
  GuessTooSmall,  // even one cheapest facility costs more than the guess
};
const char* to_string(ScalingStatus s);

struct CostScalingResult {
  ScalingStatus status = ScalingStatus::Bracketed;
  double lambda = 0.0;     // S1's multiplier
  double lambda_lo = 0.0;  // S2's multiplier
  Solution S1;             // open(S1) <= open_guess, original costs
  Solution S2;             // open(S2) > open_guess
  double a = 1.0;          // a open(S1) + (1 - a) open(S2) = open_guess
  int probes = 0;

  // a (lambda open(S1) + d(S1)) + (1 - a)(lambda open(S2) + d(S2)).
  double combined_scaled_cost() const;
};

// Opening costs scaled by lambda, S(lambda) = LocalSearch-JMS from the JMS
// seed. The lambda = 0 end keeps the facilities nearest to some client; the
// top end 3M / gamma opens one cheapest facility.
Solution scaled_solution(const Instance& inst, double lambda, const SearchConfig& inner);
double cost_scaling_lambda_max(const Instance& inst);

CostScalingResult cost_scaling_lmp(const Instance& inst, double open_guess, const SearchConfig& inner = {});

// Guesses for open(OPT): powers of (1 + eps) from the cheapest facility to the total opening cost.
std::vector<double> open_guesses(const Instance& inst, double eps);

std::string format_report(const Bipoint& b);

}  // namespace lmpflp
