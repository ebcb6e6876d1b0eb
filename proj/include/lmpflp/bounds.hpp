#pragma once

#include "lmpflp/factor_lp.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace lmpflp {

// Closed forms of the continuous dual solution, defined for z in [0, 1/3].
double jms_dual_v(double z);
double jms_dual_m_minus_one(double z);

struct AnalyticBound {
  double value = 2.0;
  double z = 0.0;
};

// min over z in [0, 1/3] of V(z) + T (M(z) - 1). T = infinity gives 2 at z = 0.
AnalyticBound analytic_bound(double T);
// 2 - 1 / (4 (7 + 3T)).
double corollary_bound(double T);

// Upper bound on a concave, non-decreasing function of T >= 0 from samples.
// Between samples it takes the least of the next sample and the two nearest
// secant lines extended into the gap; past the last sample it is capped by
// the limit at infinity.
class ConcaveEnvelope {
 public:
  ConcaveEnvelope() = default;
  ConcaveEnvelope(std::vector<double> Ts, std::vector<double> values, double limit);

  double operator()(double T) const;
  const std::vector<double>& grid() const { return Ts_; }
  const std::vector<double>& values() const { return f_; }
  double limit() const { return limit_; }

  // T = 0, then geometric steps, densest where the searches land.
  static std::vector<double> default_grid();
  // opt_plus(q, .) sampled on default_grid(), solved on `jobs` threads.
  static ConcaveEnvelope plus_lp(int q, int jobs = 1);
  static ConcaveEnvelope analytic();

 private:
  std::vector<double> Ts_, f_;
  double limit_ = 2.0;
};

enum class BoundMode { Lp, Analytic };
const char* to_string(BoundMode m);

struct SearchOptions {
  double delta_step = 1e-3;  // outer grid on (0, 1/2]
  int alpha_points = 400;    // inner grid on [0, 1]
  int bisect_iters = 60;
  int jobs = 1;              // threads for the LP samples
};

// Terms of the k-median bound at one adversarial point.
struct Eta2Terms {
  double rho_A = 0.0;
  double T_L = 0.0;
};
Eta2Terms eta2_terms(double delta, double alpha_L, double alpha_MM, double beta_MM, double beta2);

struct Eta2Result {
  double eta2 = 0.0;
  double delta = 0.0;
  double alpha_L = 0.0;
  double alpha_MM = 0.0;
  double beta_MM = 0.0;
  double T_L = 0.0;
};

using BoundFn = std::function<double(double)>;

// 2 minus the min over delta of the max over the adversary of min(rho_A, rho_B),
// with rho_B built from `bound` (a concave, non-decreasing bound in T).
Eta2Result eta2_search(const BoundFn& bound, double beta2 = 2.0, const SearchOptions& opts = {});
Eta2Result eta2_search(int q, double beta2 = 2.0, BoundMode mode = BoundMode::Lp, const SearchOptions& opts = {});
// The adversary's best response at a fixed delta; eta2 is 2 minus its value.
Eta2Result eta2_at_delta(const BoundFn& bound, double beta2, double delta, const SearchOptions& opts = {});

struct Eta1Result {
  double eta1 = 0.0;
  double delta = 0.0;
  double alpha_L = 0.0;
  double beta_L1 = 0.0;
  double eta = 0.0;
  double T1 = 0.0;
};

// beta1 <= 0 selects the default 2 / a. Throws InvalidArgument unless 0 < a <= 1.
Eta1Result eta1_search(const BoundFn& bound, double a, double beta1 = 0.0, const SearchOptions& opts = {});
Eta1Result eta1_search(int q, double a, double beta1 = 0.0, BoundMode mode = BoundMode::Lp,
                       const SearchOptions& opts = {});
Eta1Result eta1_at_delta(const BoundFn& bound, double a, double beta1, double delta, const SearchOptions& opts = {});

// Improvement for general facility costs at parameter delta. Throws
// InvalidArgument outside the range where the leading factor is positive.
double eta_general_fl(double delta);
// Supremum of that range, 0.9 / 5.9.
double eta_general_fl_delta_max();

struct GeneralFl {
  double eta_half = 0.0;  // half of the best eta_general_fl
  double delta_star = 0.0;
};
GeneralFl best_general_fl();

constexpr double kRhoBr = 1.3371;

struct RhoKmed {
  double rho_kmed = 0.0;
  double worst_a = 0.0;
};

// max over a in [0, 1] of min(2(1+2a)/(1+2a^2), rho_br (2 - (1-a) eta2)).
RhoKmed rho_kmed_eval(double eta2, double rho_br = kRhoBr);

using EtaFn = std::function<double(double a, double beta1)>;

struct RefinedOptions {
  int a_points = 60;
  int beta_points = 24;
  double eps = 0.0;
};

// max over a in (0, 1), beta1 in [2, 2/a] of
// min(beta1, 2(1+2a)/(1+2a^2) + eps, rho_br (2 - a eta1 - (1-a) eta2)).
RhoKmed rho_kmed_refined(const EtaFn& eta1, const EtaFn& eta2, double rho_br = kRhoBr,
                         const RefinedOptions& opts = {});

struct BoundsReport {
  double eta2 = 0.0;
  std::vector<std::pair<double, double>> eta1_by_a;  // (a, eta1(a))
  double rho_br = kRhoBr;
  double rho_kmed = 0.0;
  double worst_a = 0.0;
  GeneralFl general_fl;
};

BoundsReport make_bounds_report(double eta2, double rho_br = kRhoBr);

}  // namespace lmpflp
