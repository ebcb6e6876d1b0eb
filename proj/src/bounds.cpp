#include "lmpflp/bounds.hpp"

#include "lmpflp/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace lmpflp {

namespace {

constexpr double kGolden = 0.6180339887498949;
const double kZMax = 1.0 / 3.0 - 1e-9;

// Minimizes f on [lo, hi]; returns the argmin.
template <class F>
double golden_min(F&& f, double lo, double hi, double tol) {
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

template <class F>
double golden_max(F&& f, double lo, double hi, double tol) {
  return golden_min([&](double x) { return -f(x); }, lo, hi, tol);
}

// Largest x in [lo, hi] with up(x) <= down(x), for up non-decreasing and down
// non-increasing; the max over x of min(up, down) sits there or one step right.
template <class Up, class Down>
std::pair<double, double> max_of_min(Up&& up, Down&& down, double lo, double hi, int iters) {
  const double u_lo = up(lo), d_lo = down(lo);
  if (u_lo >= d_lo) return {lo, d_lo};
  const double u_hi = up(hi), d_hi = down(hi);
  if (u_hi <= d_hi) return {hi, u_hi};
  double a = lo, b = hi;
  for (int it = 0; it < iters; ++it) {
    const double m = 0.5 * (a + b);
    if (up(m) <= down(m))
      a = m;
    else
      b = m;
  }
  const double va = std::min(up(a), down(a)), vb = std::min(up(b), down(b));
  return va >= vb ? std::pair{a, va} : std::pair{b, vb};
}

// Same crossing search for min over x of max(down, up).
template <class Down, class Up>
std::pair<double, double> min_of_max(Down&& down, Up&& up, double lo, double hi, int iters) {
  const double d_lo = down(lo), u_lo = up(lo);
  if (u_lo >= d_lo) return {lo, u_lo};
  const double d_hi = down(hi), u_hi = up(hi);
  if (u_hi <= d_hi) return {hi, d_hi};
  double a = lo, b = hi;
  for (int it = 0; it < iters; ++it) {
    const double m = 0.5 * (a + b);
    if (up(m) <= down(m))
      a = m;
    else
      b = m;
  }
  const double va = std::max(up(a), down(a)), vb = std::max(up(b), down(b));
  return va <= vb ? std::pair{a, va} : std::pair{b, vb};
}

// Outer grid over delta, then golden refinement of the best cell. `inner`
// returns the adversary's value at one delta.
template <class Inner>
double minimize_delta(Inner&& inner, double step) {
  double best_delta = 0.5, best = kInfinity;
  const int cells = static_cast<int>(std::round(0.5 / step));
  for (int i = 1; i <= cells; ++i) {
    const double delta = std::min(0.5, i * step);
    const double v = inner(delta);
    if (v < best) {
      best = v;
      best_delta = delta;
    }
  }
  const double lo = std::max(step * 1e-3, best_delta - step), hi = std::min(0.5, best_delta + step);
  const double refined = golden_min(inner, lo, hi, 1e-7);
  return inner(refined) < best ? refined : best_delta;
}

// Grid over alpha_L in [0, 1] plus golden refinement; returns the argmax.
template <class Inner>
double maximize_alpha(Inner&& inner, int points) {
  double best_a = 0.0, best = -kInfinity;
  for (int i = 0; i <= points; ++i) {
    const double a = static_cast<double>(i) / points;
    const double v = inner(a);
    if (v > best) {
      best = v;
      best_a = a;
    }
  }
  const double h = 1.0 / points;
  const double refined = golden_max(inner, std::max(0.0, best_a - h), std::min(1.0, best_a + h), 1e-9);
  return inner(refined) > best ? refined : best_a;
}

}  // namespace

double jms_dual_v(double z) {
  const double a = 2.0 - z / (1.0 - z);
  const double b = 2.0 - 2.0 * z / (1.0 - z) + std::log1p(z / (1.0 - 2.0 * z)) +
                   4.0 * z * z / ((1.0 - z) * (1.0 - 2.0 * z));
  return std::max(a, b);
}

double jms_dual_m_minus_one(double z) {
  return std::log1p(z / (1.0 - 2.0 * z)) - z / (1.0 - z) + 2.0 * z * z / ((1.0 - z) * (1.0 - 2.0 * z));
}

AnalyticBound analytic_bound(double T) {
  if (!(T >= 0.0)) throw InvalidArgument("analytic_bound needs T >= 0");
  if (std::isinf(T)) return {2.0, 0.0};
  auto f = [T](double z) { return jms_dual_v(z) + T * jms_dual_m_minus_one(z); };
  constexpr int kScan = 300;
  double best_z = 0.0, best = f(0.0);
  for (int i = 1; i <= kScan; ++i) {
    const double z = kZMax * i / kScan;
    const double v = f(z);
    if (v < best) {
      best = v;
      best_z = z;
    }
  }
  const double h = kZMax / kScan;
  const double z = golden_min(f, std::max(0.0, best_z - h), std::min(kZMax, best_z + h), 1e-10);
  if (f(z) < best) {
    best = f(z);
    best_z = z;
  }
  return {best, best_z};
}

double corollary_bound(double T) { return 2.0 - 1.0 / (4.0 * (7.0 + 3.0 * T)); }

ConcaveEnvelope::ConcaveEnvelope(std::vector<double> Ts, std::vector<double> values, double limit)
    : Ts_(std::move(Ts)), f_(std::move(values)), limit_(limit) {
  if (Ts_.size() != f_.size() || Ts_.empty()) throw InvalidArgument("ConcaveEnvelope needs matching samples");
  if (Ts_.front() != 0.0) throw InvalidArgument("ConcaveEnvelope needs a sample at T = 0");
  for (std::size_t k = 1; k < Ts_.size(); ++k)
    if (!(Ts_[k] > Ts_[k - 1])) throw InvalidArgument("ConcaveEnvelope needs increasing sample points");
}

double ConcaveEnvelope::operator()(double T) const {
  const std::size_t n = Ts_.size();
  if (T <= 0.0) return f_[0];
  auto slope = [&](std::size_t k) { return (f_[k + 1] - f_[k]) / (Ts_[k + 1] - Ts_[k]); };
  if (T >= Ts_[n - 1]) {
    double v = limit_;
    if (n >= 2) v = std::min(v, f_[n - 1] + (T - Ts_[n - 1]) * slope(n - 2));
    return std::max(v, f_[n - 1]);
  }
  const std::size_t k = static_cast<std::size_t>(std::upper_bound(Ts_.begin(), Ts_.end(), T) - Ts_.begin()) - 1;
  double v = f_[k + 1];
  if (k >= 1) v = std::min(v, f_[k] + (T - Ts_[k]) * slope(k - 1));
  if (k + 2 < n) v = std::min(v, f_[k + 1] - (Ts_[k + 1] - T) * slope(k + 1));
  return v;
}

std::vector<double> ConcaveEnvelope::default_grid() {
  std::vector<double> g{0.0, 0.1, 0.25, 0.5};
  for (int i = 0; i <= 28; ++i) g.push_back(std::pow(2.0, i / 4.0));  // 1 .. 128
  for (double t : {256.0, 512.0, 1024.0, 4096.0, 16384.0}) g.push_back(t);
  return g;
}

ConcaveEnvelope ConcaveEnvelope::plus_lp(int q, int jobs) {
  const std::vector<double> grid = default_grid();
  std::vector<double> values(grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      try {
        values[k] = opt_plus(q, grid[k]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(grid.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  // Plain LP values never exceed 2 and the plus optimum tends to it.
  return ConcaveEnvelope(grid, values, 2.0);
}

ConcaveEnvelope ConcaveEnvelope::analytic() {
  static const ConcaveEnvelope env = [] {
    std::vector<double> grid{0.0};
    for (double t = 1e-3; t < 2e5; t *= 1.02) grid.push_back(t);
    std::vector<double> values;
    values.reserve(grid.size());
    for (double t : grid) values.push_back(analytic_bound(t).value);
    return ConcaveEnvelope(grid, values, 2.0);
  }();
  return env;
}

const char* to_string(BoundMode m) { return m == BoundMode::Lp ? "lp" : "analytic"; }

namespace {

ConcaveEnvelope envelope_for(int q, BoundMode mode, int jobs) {
  if (mode == BoundMode::Analytic) return ConcaveEnvelope::analytic();
  if (q < 2) throw InvalidArgument("lp mode needs q >= 2");
  return ConcaveEnvelope::plus_lp(q, jobs);
}

// Adversary with total matched mass s = alpha_MM + beta_MM; filling beta_MM
// first keeps T_L largest because its coefficient is the smaller one.
struct Eta2Point {
  double alpha_MM, beta_MM, rho_A, T_L;
};

Eta2Point eta2_split(double delta, double alpha_L, double s, double beta2) {
  const double beta_MM = std::min(s, beta2);
  const double alpha_MM = s - beta_MM;
  const Eta2Terms t = eta2_terms(delta, alpha_L, alpha_MM, beta_MM, beta2);
  return {alpha_MM, beta_MM, t.rho_A, t.T_L};
}

double rho_B(const BoundFn& bound, double alpha_L, double T) {
  if (alpha_L <= 0.0) return 2.0;
  return 2.0 * (1.0 - alpha_L) + bound(T) * alpha_L;
}

// max over s of min(rho_A, rho_B) at fixed (delta, alpha_L); returns (s, value).
std::pair<double, double> eta2_inner(const BoundFn& bound, double beta2, double delta, double alpha_L, int iters) {
  auto up = [&](double s) { return eta2_split(delta, alpha_L, s, beta2).rho_A; };
  auto down = [&](double s) { return rho_B(bound, alpha_L, eta2_split(delta, alpha_L, s, beta2).T_L); };
  return max_of_min(up, down, 0.0, 1.0 - alpha_L + beta2, iters);
}

}  // namespace

Eta2Terms eta2_terms(double delta, double alpha_L, double alpha_MM, double beta_MM, double beta2) {
  const double k = delta / (1.0 - delta);
  Eta2Terms t;
  t.rho_A = 1.0 + 2.0 * alpha_L + k * (beta_MM + alpha_MM);
  if (alpha_L <= 0.0 || delta <= 0.0) {
    t.T_L = kInfinity;
  } else {
    t.T_L = 2.0 / (delta * alpha_L) *
            (1.0 + (1.0 - delta) * beta2 - (1.0 - delta * k) * alpha_MM - (1.0 - k) * beta_MM);
  }
  return t;
}

Eta2Result eta2_at_delta(const BoundFn& bound, double beta2, double delta, const SearchOptions& opts) {
  if (beta2 < 0.0) throw InvalidArgument("eta2_search needs beta2 >= 0");
  if (!(delta > 0.0 && delta <= 0.5)) throw InvalidArgument("eta2_search needs delta in (0, 1/2]");
  Eta2Result r;
  r.delta = delta;
  r.alpha_L = maximize_alpha([&](double a) { return eta2_inner(bound, beta2, delta, a, opts.bisect_iters).second; },
                             opts.alpha_points);
  const auto [s, value] = eta2_inner(bound, beta2, delta, r.alpha_L, opts.bisect_iters);
  const Eta2Point p = eta2_split(delta, r.alpha_L, s, beta2);
  r.eta2 = 2.0 - value;
  r.alpha_MM = p.alpha_MM;
  r.beta_MM = p.beta_MM;
  r.T_L = p.T_L;
  return r;
}

Eta2Result eta2_search(const BoundFn& bound, double beta2, const SearchOptions& opts) {
  // The outer minimum over delta is a maximum of eta2.
  auto value = [&](double delta) { return 2.0 - eta2_at_delta(bound, beta2, delta, opts).eta2; };
  return eta2_at_delta(bound, beta2, minimize_delta(value, opts.delta_step), opts);
}

Eta2Result eta2_search(int q, double beta2, BoundMode mode, const SearchOptions& opts) {
  const ConcaveEnvelope env = envelope_for(q, mode, opts.jobs);
  return eta2_search(BoundFn(std::cref(env)), beta2, opts);
}

namespace {

struct Eta1Inner {
  double beta_L1, eta, value;
};

double eta1_T(double delta, double alpha_L, double beta1, double beta_L1, double eta) {
  if (alpha_L <= 0.0) return kInfinity;
  return 2.0 * ((1.0 + beta1 + beta_L1) / (alpha_L * delta) + 1.0 / delta + eta);
}

// min over eta in [0, 1] of max(2 - eta, rho_B1); returns (eta, value).
std::pair<double, double> eta1_g(const BoundFn& bound, double delta, double alpha_L, double beta1, double beta_L1,
                                 int iters) {
  auto down = [](double eta) { return 2.0 - eta; };
  auto up = [&](double eta) { return rho_B(bound, alpha_L, eta1_T(delta, alpha_L, beta1, beta_L1, eta)); };
  return min_of_max(down, up, 0.0, 1.0, iters);
}

Eta1Inner eta1_inner(const BoundFn& bound, double beta1, double delta, double alpha_L, int iters) {
  const double k = delta / (1.0 - delta);
  auto up = [&](double b) { return eta1_g(bound, delta, alpha_L, beta1, b, iters).second; };
  auto down = [&](double b) { return 1.0 + 2.0 * alpha_L + k * (beta1 - b + 1.0 - alpha_L); };
  const auto [b, value] = max_of_min(up, down, 0.0, beta1, iters);
  return {b, eta1_g(bound, delta, alpha_L, beta1, b, iters).first, value};
}

}  // namespace

Eta1Result eta1_at_delta(const BoundFn& bound, double a, double beta1, double delta, const SearchOptions& opts) {
  if (!(a > 0.0 && a <= 1.0)) throw InvalidArgument("eta1_search needs 0 < a <= 1");
  if (!(delta > 0.0 && delta <= 0.5)) throw InvalidArgument("eta1_search needs delta in (0, 1/2]");
  if (beta1 <= 0.0) beta1 = 2.0 / a;
  Eta1Result r;
  r.delta = delta;
  r.alpha_L = maximize_alpha([&](double al) { return eta1_inner(bound, beta1, delta, al, opts.bisect_iters).value; },
                             opts.alpha_points);
  const Eta1Inner in = eta1_inner(bound, beta1, delta, r.alpha_L, opts.bisect_iters);
  r.eta1 = 2.0 - in.value;
  r.beta_L1 = in.beta_L1;
  r.eta = in.eta;
  r.T1 = eta1_T(delta, r.alpha_L, beta1, in.beta_L1, in.eta);
  return r;
}

Eta1Result eta1_search(const BoundFn& bound, double a, double beta1, const SearchOptions& opts) {
  if (!(a > 0.0 && a <= 1.0)) throw InvalidArgument("eta1_search needs 0 < a <= 1");
  auto value = [&](double delta) { return 2.0 - eta1_at_delta(bound, a, beta1, delta, opts).eta1; };
  return eta1_at_delta(bound, a, beta1, minimize_delta(value, opts.delta_step), opts);
}

Eta1Result eta1_search(int q, double a, double beta1, BoundMode mode, const SearchOptions& opts) {
  if (!(a > 0.0 && a <= 1.0)) throw InvalidArgument("eta1_search needs 0 < a <= 1");
  const ConcaveEnvelope env = envelope_for(q, mode, opts.jobs);
  return eta1_search(BoundFn(std::cref(env)), a, beta1, opts);
}

double eta_general_fl_delta_max() { return 0.9 / 5.9; }

double eta_general_fl(double delta) {
  if (!(delta > 0.0 && delta < eta_general_fl_delta_max()))
    throw InvalidArgument("eta_general_fl needs 0 < delta < 0.9/5.9");
  const double c = (1.9 - (1.0 + 4.0 * delta) / (1.0 - delta)) / 4.0;
  const double T = (234.0 / delta) / c;
  return c / (4.0 * (7.0 + 3.0 * T));
}

GeneralFl best_general_fl() {
  const double hi = eta_general_fl_delta_max();
  constexpr int kCells = 2000;
  double best_d = hi / 2, best = 0.0;
  for (int i = 1; i < kCells; ++i) {
    const double d = hi * i / kCells;
    const double v = eta_general_fl(d);
    if (v > best) {
      best = v;
      best_d = d;
    }
  }
  const double h = hi / kCells;
  const double d = golden_max(eta_general_fl, std::max(h * 1e-3, best_d - h), std::min(hi - h * 1e-3, best_d + h), 1e-12);
  if (eta_general_fl(d) > best) {
    best = eta_general_fl(d);
    best_d = d;
  }
  return {best / 2.0, best_d};
}

namespace {

double kmed_first(double a) { return 2.0 * (1.0 + 2.0 * a) / (1.0 + 2.0 * a * a); }

}  // namespace

RhoKmed rho_kmed_eval(double eta2, double rho_br) {
  if (!(eta2 >= 0.0 && eta2 <= 2.0)) throw InvalidArgument("rho_kmed_eval needs eta2 in [0, 2]");
  if (!(rho_br > 1.0)) throw InvalidArgument("rho_kmed_eval needs rho_br > 1");
  // The first curve rises to its peak and then falls; the second is non-decreasing.
  const double peak = (std::sqrt(3.0) - 1.0) / 2.0;
  auto second = [&](double a) { return rho_br * (2.0 - (1.0 - a) * eta2); };
  if (kmed_first(peak) <= second(peak)) return {kmed_first(peak), peak};
  const auto [a, value] = max_of_min(second, kmed_first, peak, 1.0, 200);
  return {value, a};
}

RhoKmed rho_kmed_refined(const EtaFn& eta1, const EtaFn& eta2, double rho_br, const RefinedOptions& opts) {
  if (!(rho_br > 1.0)) throw InvalidArgument("rho_kmed_refined needs rho_br > 1");
  if (opts.a_points < 2 || opts.beta_points < 2) throw InvalidArgument("rho_kmed_refined needs a grid");
  auto value = [&](double a, double beta1) {
    const double third = rho_br * (2.0 - a * eta1(a, beta1) - (1.0 - a) * eta2(a, beta1));
    return std::min({beta1, kmed_first(a) + opts.eps, third});
  };
  auto beta_hi = [](double a) { return std::max(2.0, 2.0 / a); };

  double best = -kInfinity, best_a = 0.5, best_b = 2.0;
  for (int i = 0; i < opts.a_points; ++i) {
    const double a = (i + 0.5) / opts.a_points;
    for (int j = 0; j < opts.beta_points; ++j) {
      const double b = 2.0 + (beta_hi(a) - 2.0) * j / (opts.beta_points - 1);
      const double v = value(a, b);
      if (v > best) {
        best = v;
        best_a = a;
        best_b = b;
      }
    }
  }
  const double ha = 1.0 / opts.a_points;
  for (int round = 0; round < 2; ++round) {
    const double lo = std::max(1e-6, best_a - ha), hi = std::min(1.0 - 1e-6, best_a + ha);
    auto along_a = [&](double a) { return value(a, std::min(best_b, beta_hi(a))); };
    const double a = golden_max(along_a, lo, hi, 1e-10);
    if (along_a(a) > best) {
      best_b = std::min(best_b, beta_hi(a));
      best_a = a;
      best = along_a(a);
    }
    const double hb = (beta_hi(best_a) - 2.0) / (opts.beta_points - 1);
    auto along_b = [&](double b) { return value(best_a, b); };
    const double b = golden_max(along_b, std::max(2.0, best_b - hb), std::min(beta_hi(best_a), best_b + hb), 1e-10);
    if (along_b(b) > best) {
      best_b = b;
      best = along_b(b);
    }
  }
  return {best, best_a};
}

BoundsReport make_bounds_report(double eta2, double rho_br) {
  BoundsReport r;
  r.eta2 = eta2;
  r.rho_br = rho_br;
  const RhoKmed k = rho_kmed_eval(eta2, rho_br);
  r.rho_kmed = k.rho_kmed;
  r.worst_a = k.worst_a;
  r.general_fl = best_general_fl();
  return r;
}

}  // namespace lmpflp
