#include "lmpflp/jms.hpp"

#include "lmpflp/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace lmpflp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Event simulation of the primal-dual algorithm with opening costs given
// separately from the instance, so Extend-JMS can reuse it unchanged.
class JmsSimulation {
 public:
  JmsSimulation(const Instance& inst, const Eigen::VectorXd& costs)
      : inst_(inst), costs_(costs), m_(inst.num_facilities()), n_(inst.num_clients()) {
    double scale = std::max(inst.scale(), costs.size() ? costs.maxCoeff() : 0.0);
    tol_ = 1e-12 * (scale > 0.0 ? scale : 1.0);
    by_fac_.resize(m_);
    for (int f = 0; f < m_; ++f) {
      by_fac_[f].resize(n_);
      std::iota(by_fac_[f].begin(), by_fac_[f].end(), 0);
      std::stable_sort(by_fac_[f].begin(), by_fac_[f].end(),
                       [&](int a, int b) { return inst.dist(a, f) < inst.dist(b, f); });
    }
    open_.assign(m_, false);
    active_.assign(n_, true);
    current_.assign(n_, -1);
    near_d_.assign(n_, kInf);
    near_f_.assign(n_, -1);
    trace_.alpha.assign(n_, 0.0);
    trace_.witness_r.assign(n_, {});
  }

  void run() {
    int remaining = n_;
    while (remaining > 0) {
      std::vector<double> t_open(m_, kInf);
      double best_open = kInf;
      for (int f = 0; f < m_; ++f) {
        if (open_[f]) continue;
        t_open[f] = opening_time(f);
        best_open = std::min(best_open, t_open[f]);
      }
      double best_conn = kInf;
      for (int c = 0; c < n_; ++c)
        if (active_[c]) best_conn = std::min(best_conn, near_d_[c]);
      const double next = std::min(best_open, best_conn);
      if (!std::isfinite(next)) throw NumericalError("JMS stalled with active clients and no pending event");

      if (best_open <= next + tol_) {
        int f = 0;
        while (open_[f] || t_open[f] > next + tol_) ++f;
        t_ = std::max(t_, t_open[f]);
        remaining -= open_facility(f);
      } else {
        t_ = std::max(t_, next);
        for (int c = 0; c < n_; ++c) {
          if (!active_[c] || near_d_[c] > next + tol_) continue;
          connect(c, near_f_[c]);
          --remaining;
        }
      }
    }
  }

  std::vector<int> open_set() const {
    std::vector<int> out;
    for (int f = 0; f < m_; ++f)
      if (open_[f]) out.push_back(f);
    return out;
  }

  DualTrace& trace() { return trace_; }

 private:
  double current_dist(int c) const { return inst_.dist(c, current_[c]); }

  // Earliest time >= t_ at which the offers to f reach its opening cost.
  double opening_time(int f) const {
    double paid = 0.0;
    bool positive_inactive = false;
    for (int c = 0; c < n_; ++c) {
      if (active_[c]) continue;
      double offer = current_dist(c) - inst_.dist(c, f);
      if (offer > tol_) {
        paid += offer;
        positive_inactive = true;
      }
    }
    const double w = costs_[f];
    if (w == 0.0) {
      // A free facility opens as soon as some offer can become positive.
      if (positive_inactive) return t_;
      for (int c : by_fac_[f])
        if (active_[c]) return std::max(t_, inst_.dist(c, f));
      return kInf;
    }
    const double need = w - paid;
    if (need <= tol_) return t_;
    int k = 0;
    double sum = 0.0;
    for (int c : by_fac_[f]) {
      if (!active_[c]) continue;
      const double a = inst_.dist(c, f);
      if (k > 0) {
        const double when = (need + sum) / k;
        if (when <= a) return std::max(t_, when);
      }
      ++k;
      sum += a;
    }
    return k > 0 ? std::max(t_, (need + sum) / k) : kInf;
  }

  // Opens f and moves every client with a strictly positive offer to it.
  int open_facility(int f) {
    open_[f] = true;
    JmsEvent ev{JmsEvent::Kind::Open, t_, f, -1, {}};
    std::vector<int> newly;
    for (int c = 0; c < n_; ++c) {
      const double d = inst_.dist(c, f);
      const double offer = active_[c] ? t_ - d : current_dist(c) - d;
      if (offer > tol_) {
        ev.contributors.push_back(c);
        if (active_[c]) {
          newly.push_back(c);
        } else {
          current_[c] = f;
          trace_.witness_r[c].emplace_back(t_, d);
        }
      }
      if (d < near_d_[c]) {
        near_d_[c] = d;
        near_f_[c] = f;
      }
    }
    trace_.events.push_back(std::move(ev));
    for (int c : newly) connect(c, f);
    return static_cast<int>(newly.size());
  }

  void connect(int c, int f) {
    active_[c] = false;
    current_[c] = f;
    trace_.alpha[c] = t_;
    trace_.witness_r[c].emplace_back(t_, inst_.dist(c, f));
    trace_.events.push_back(JmsEvent{JmsEvent::Kind::Connect, t_, f, c, {}});
  }

  const Instance& inst_;
  const Eigen::VectorXd& costs_;
  int m_, n_;
  double tol_ = 0.0;
  double t_ = 0.0;
  std::vector<std::vector<int>> by_fac_;
  std::vector<bool> open_;
  std::vector<bool> active_;
  std::vector<int> current_;
  std::vector<double> near_d_;
  std::vector<int> near_f_;
  DualTrace trace_;
};

}  // namespace

JmsResult jms_run(const Instance& inst) {
  JmsSimulation sim(inst, inst.opening_costs());
  sim.run();
  return {evaluate(inst, sim.open_set()), std::move(sim.trace())};
}

ExtendJmsResult extend_jms(const Instance& inst, const std::vector<int>& free_set) {
  Eigen::VectorXd costs = inst.opening_costs();
  std::vector<bool> is_free(inst.num_facilities(), false);
  for (int f : free_set) {
    if (f < 0 || f >= inst.num_facilities()) throw InvalidArgument("extend_jms: facility id out of range");
    costs[f] = 0.0;
    is_free[f] = true;
  }
  JmsSimulation sim(inst, costs);
  sim.run();
  ExtendJmsResult out;
  out.solution = evaluate(inst, sim.open_set());
  for (int f : out.solution.open)
    if (!is_free[f]) out.zero_view_facility_cost += inst.opening_cost(f);
  out.trace = std::move(sim.trace());
  return out;
}

LmpReport verify_lmp(const Instance& inst, const Solution& sol, double ratio) {
  const UflEnumeration table = brute_force_ufl(inst, true);
  const double total = sol.cost();
  const double tol = 1e-9 * std::max(1.0, std::abs(total));
  LmpReport rep;
  rep.worst_ratio = -kInf;
  rep.min_margin = kInf;
  const std::uint64_t count = std::uint64_t{1} << inst.num_facilities();
  std::uint64_t worst_mask = 0;
  for (std::uint64_t mask = 1; mask < count; ++mask) {
    const double open = table.facility_cost[mask];
    const double d = table.connection_cost[mask];
    const double margin = open + ratio * d - total;
    rep.min_margin = std::min(rep.min_margin, margin);
    if (margin < -tol) rep.passed = false;
    double r;
    if (d > 0.0)
      r = (total - open) / d;
    else
      r = total - open > tol ? kInf : -kInf;
    if (r > rep.worst_ratio || worst_mask == 0) {
      rep.worst_ratio = r;
      worst_mask = mask;
    }
  }
  rep.witness = mask_to_set(worst_mask);
  return rep;
}

std::string write_trace(const Instance& inst, const DualTrace& trace) {
  std::string out;
  char buf[96];
  for (const JmsEvent& ev : trace.events) {
    if (ev.kind == JmsEvent::Kind::Open)
      std::snprintf(buf, sizeof buf, "t=%.17g open f=%d\n", ev.time, ev.facility);
    else
      std::snprintf(buf, sizeof buf, "t=%.17g connect c=%d f=%d\n", ev.time, inst.num_facilities() + ev.client,
                    ev.facility);
    out += buf;
  }
  return out;
}

}  // namespace lmpflp
