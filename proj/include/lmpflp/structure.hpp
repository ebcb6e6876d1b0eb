#pragma once

#include "lmpflp/instance.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lmpflp {

struct ClassificationParams {
  double delta = 0.25;  // uniform-cost classification
  // General-cost classification; delta1_prime <= delta1 and delta2_prime < delta2.
  double delta1 = 0.25;
  double delta2 = 0.5;
  double delta1_prime = 0.25;
  double delta2_prime = 0.25;

  void validate_uniform() const;
  void validate_general() const;
  // delta1 = delta1' = delta, delta2 = 1/2, delta2' = 1/4.
  static ClassificationParams general_defaults(double delta);
};

// Fraction of the clients of f (in Sref) that g serves in S: |C_S(g) & C_Sref(f)| / |C_Sref(f)|.
// A facility with no clients gives 0.
double capture_fraction(const Solution& S, const Solution& Sref, int f, int g);
// Same with the union of the clients of every g in G.
double capture_fraction(const Solution& S, const Solution& Sref, int f, const std::vector<int>& G);
// The capture predicate is strict.
inline bool captures(double fraction, double alpha) { return fraction > alpha; }

// One matched group: `key` on the side named by key_in_opt, partners on the other.
struct MatchGroup {
  int key = -1;
  bool key_in_opt = true;
  std::vector<int> partners;
};

// Masses split by (class of the S' server, class of the OPT server), L = lonely, M = matched.
struct CostDecomposition {
  double opt = 0.0;
  double d_prime = 0.0;
  double opt_LL = 0.0, opt_LM = 0.0, opt_ML = 0.0, opt_MM = 0.0;
  double d_LL = 0.0, d_LM = 0.0, d_ML = 0.0, d_MM = 0.0;
  double opt_L = 0.0, opt_M = 0.0;  // by the OPT server's class
  double d_L = 0.0, d_M = 0.0;      // by the S' server's class
  double alpha_L = 0.0, alpha_M = 1.0, alpha_MM = 0.0;
  double beta = 0.0, beta_MM = 0.0, beta_L = 0.0;
  int k_L = 0, k_M = 0;            // OPT facilities
  int kprime_L = 0, kprime_M = 0;  // S' facilities
  std::vector<MatchGroup> matched_pairs;
};

struct Classification {
  std::vector<int> opt_matched, opt_lonely;
  std::vector<int> s_matched, s_lonely;
  CostDecomposition decomposition;
};

// |S'| <= k: groups keyed by OPT facilities. |S'| > k: groups keyed by S' facilities.
Classification classify_uniform(const Solution& Sprime, const Solution& OPT, int k, const ClassificationParams& params);
// Pairs f', f* with f' (1 - delta1)-capturing f* and f* (1 - delta2)-capturing f'.
Classification classify_general(const Solution& Sprime, const Solution& OPT, const ClassificationParams& params);

// Splits the lonely OPT facilities so that every lonely facility has a nearest
// OPT neighbour outside its own part. Nearest-neighbour ties go to the lowest id.
std::pair<std::vector<int>, std::vector<int>> partition_lonely_bipartite(const Instance& inst, const Solution& OPT,
                                                                         const std::vector<int>& lonely);

struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;  // includes any slack term
  double slack = 0.0;
  bool violated = false;
  std::vector<std::pair<std::string, double>> terms;  // named pieces of the right-hand side

  double margin() const { return rhs - lhs; }
};

// key=value lines: <name>.lhs, <name>.rhs, <name>.margin, <name>.slack, the terms, then violated=0|1.
std::string format_report(const InequalityReport& r);

// lambda k' + d' <= lambda k + 3 opt_L + opt_M + delta/(1-delta) (d_MM + opt_MM) + coef eps (d' + opt).
InequalityReport check_theorem_3_1(const Solution& Sprime, const Solution& OPT, int k, double lambda,
                                   const ClassificationParams& params, double eps, double slack_coef);

// Bound on the opening cost of the lonely facilities of S2. Throws InvalidArgument unless |S2| > k.
InequalityReport check_lemma_4_2(const Solution& S2, const Solution& OPT, int k, double lambda, double delta);

// Classification with delta1 = delta, delta2 = 1/2.
InequalityReport check_theorem_6_4(const Solution& Sprime, const Solution& OPT, double delta, double eps,
                                   double slack_coef);

double lemma_6_2_t(double delta1, double delta2_prime);
double lemma_6_3_t_prime(double delta2, double delta1_prime);
double lemma_6_3_zeta(const ClassificationParams& params);

InequalityReport check_lemma_6_2(const Instance& inst, const Solution& Sprime, const Solution& OPT,
                                 const ClassificationParams& params);

// Monte Carlo check of the expected facility and connection cost of the
// randomized deletion of half of the lonely OPT facilities.
struct Lemma63Report {
  bool applicable = true;  // false when |OPT| < 2
  int samples = 0;
  double open_mean = 0.0, open_stderr = 0.0, open_bound = 0.0;
  double conn_mean = 0.0, conn_stderr = 0.0, conn_bound = 0.0;
  bool open_ok = true;  // mean <= bound + 3 stderr
  bool conn_ok = true;

  bool ok() const { return open_ok && conn_ok; }
};

Lemma63Report check_lemma_6_3(const Instance& inst, const Solution& Sprime, const Solution& OPT,
                              const ClassificationParams& params, int samples, std::uint64_t seed);

std::string format_report(const Lemma63Report& r);

}  // namespace lmpflp
