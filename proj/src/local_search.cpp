#include "lmpflp/local_search.hpp"

#include "lmpflp/error.hpp"
#include "lmpflp/jms.hpp"
#include "lmpflp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace lmpflp {

int SearchConfig::width() const { return static_cast<int>(std::floor(1.0 / width_eps)) + 1; }

void SearchConfig::validate() const {
  if (delta < 1) throw InvalidArgument("swap width delta must be at least 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0, 1)");
  if (!(width_eps > 0.0 && width_eps <= 1.0)) throw InvalidArgument("width_eps must lie in (0, 1]");
  if (move_budget < 0) throw InvalidArgument("move_budget must be non-negative");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("objective weights must be positive");
}

double weighted_cost(const Solution& sol, const SearchConfig& cfg) {
  return cfg.alpha * sol.facility_cost + cfg.beta * sol.connection_cost;
}

namespace {

// Visits the k-subsets of items in lexicographic position order until fn returns true.
template <class F>
bool for_each_subset(const std::vector<int>& items, int k, F&& fn) {
  const int n = static_cast<int>(items.size());
  if (k > n) return false;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> subset(k);
  while (true) {
    for (int i = 0; i < k; ++i) subset[i] = items[idx[i]];
    if (fn(subset)) return true;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

class Scanner {
 public:
  Scanner(const Instance& inst, const SearchConfig& cfg) : inst_(inst), cfg_(cfg), order_(inst.num_facilities()) {
    cfg.validate();
    std::iota(order_.begin(), order_.end(), 0);
    if (cfg.seed != 0) {
      Rng rng(cfg.seed);
      for (int i = static_cast<int>(order_.size()) - 1; i > 0; --i)
        std::swap(order_[i], order_[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    }
    const double np = inst.num_points();
    relative_factor_ = 1.0 + std::pow(cfg.eps, 3) / std::pow(np, 5);
  }

  bool improves(double candidate, double current) const {
    if (cfg_.threshold_mode == ThresholdMode::Relative) return candidate < current / relative_factor_;
    return candidate < current - 1e-12 * std::max(1.0, std::abs(current));
  }

  double cost_of(const Solution& s) const { return weighted_cost(s, cfg_); }

  // Moves (A, B) with |A| <= max_a, |B| <= max_b and |A| + |B| <= max_total,
  // scanned by total size, then |A|.
  std::optional<std::pair<Move, Solution>> first_swap(const Solution& cur, int max_a, int max_b, int max_total) const {
    std::vector<int> open, closed;
    for (int f : order_) (cur.is_open(f) ? open : closed).push_back(f);
    const double current = cost_of(cur);
    std::optional<std::pair<Move, Solution>> found;
    for (int total = 1; total <= max_total && !found; ++total) {
      for (int a = std::max(0, total - max_b); a <= std::min(max_a, total) && !found; ++a) {
        const int b = total - a;
        for_each_subset(open, a, [&](const std::vector<int>& A) {
          if (static_cast<int>(cur.open.size()) - a + b == 0) return false;
          return for_each_subset(closed, b, [&](const std::vector<int>& B) {
            std::vector<int> next;
            for (int f : cur.open)
              if (std::find(A.begin(), A.end(), f) == A.end()) next.push_back(f);
            next.insert(next.end(), B.begin(), B.end());
            Solution s = evaluate(inst_, next);
            const double c = cost_of(s);
            if (!improves(c, current)) return false;
            Move m{Move::Kind::Swap, sorted(A), sorted(B), c};
            found.emplace(std::move(m), std::move(s));
            return true;
          });
        });
      }
    }
    return found;
  }

  std::optional<std::pair<Move, Solution>> first_extend(const Solution& cur) const {
    std::vector<int> open, closed;
    for (int f : order_) (cur.is_open(f) ? open : closed).push_back(f);
    const double current = cost_of(cur);
    for (int f : open) {
      std::vector<int> base;
      for (int g : cur.open)
        if (g != f) base.push_back(g);
      // -1 stands for the pure deletion S - {f}.
      std::vector<int> partners{-1};
      partners.insert(partners.end(), closed.begin(), closed.end());
      for (int fp : partners) {
        std::vector<int> free_set = base;
        if (fp >= 0) free_set.push_back(fp);
        std::sort(free_set.begin(), free_set.end());
        Solution s = extend_jms(inst_, free_set).solution;
        const double c = cost_of(s);
        if (!improves(c, current)) continue;
        Move m;
        m.kind = Move::Kind::Extend;
        m.cost = c;
        for (int g : cur.open)
          if (!s.is_open(g)) m.removed.push_back(g);
        for (int g : s.open)
          if (!cur.is_open(g)) m.added.push_back(g);
        return std::pair{std::move(m), std::move(s)};
      }
    }
    return std::nullopt;
  }

  std::optional<std::pair<Move, Solution>> first_move(const Solution& cur, MoveFamily family) const {
    if (family == MoveFamily::Swap) return first_swap(cur, cfg_.delta, cfg_.delta, 2 * cfg_.delta);
    const int w = cfg_.width();
    if (auto m = first_swap(cur, w, w, w)) return m;
    return first_extend(cur);
  }

 private:
  static std::vector<int> sorted(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
  }

  const Instance& inst_;
  const SearchConfig& cfg_;
  std::vector<int> order_;
  double relative_factor_ = 1.0;
};

// The JMS-extended family always works on the true cost open + d.
SearchConfig effective(SearchConfig cfg, MoveFamily family) {
  if (family == MoveFamily::JmsExtended) cfg.alpha = cfg.beta = 1.0;
  return cfg;
}

SearchResult run_search(const Instance& inst, const Solution& init, const SearchConfig& user_cfg, MoveFamily family) {
  const SearchConfig cfg = effective(user_cfg, family);
  if (init.open.empty()) throw InvalidArgument("local search needs a nonempty initial solution");
  const Scanner scanner(inst, cfg);
  SearchResult r;
  r.solution = evaluate(inst, init.open);
  while (true) {
    if (static_cast<long>(r.log.size()) >= cfg.move_budget) {
      r.budget_exhausted = scanner.first_move(r.solution, family).has_value();
      break;
    }
    auto next = scanner.first_move(r.solution, family);
    if (!next) break;
    r.log.push_back(std::move(next->first));
    r.solution = std::move(next->second);
  }
  return r;
}

std::string format_ids(const std::vector<int>& ids) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < ids.size(); ++i) os << (i ? "," : "") << ids[i];
  os << ']';
  return os.str();
}

}  // namespace

SearchResult swap_local_search(const Instance& inst, const Solution& init, const SearchConfig& cfg) {
  return run_search(inst, init, cfg, MoveFamily::Swap);
}

SearchResult localsearch_jms(const Instance& inst, const Solution& init, const SearchConfig& cfg) {
  return run_search(inst, init, cfg, MoveFamily::JmsExtended);
}

LocalOptReport is_local_opt(const Instance& inst, const Solution& sol, const SearchConfig& user_cfg, MoveFamily family) {
  const SearchConfig cfg = effective(user_cfg, family);
  const Scanner scanner(inst, cfg);
  LocalOptReport rep;
  if (auto m = scanner.first_move(evaluate(inst, sol.open), family)) {
    rep.local_opt = false;
    rep.witness = std::move(m->first);
  }
  return rep;
}

std::string format_move_log(const std::vector<Move>& log) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < log.size(); ++i) {
    const Move& m = log[i];
    os << "step=" << i + 1 << " kind=" << (m.kind == Move::Kind::Swap ? "swap" : "extend")
       << " removed=" << format_ids(m.removed) << " added=" << format_ids(m.added) << " cost=" << m.cost << '\n';
  }
  return os.str();
}

Components preprocess_components(const Instance& inst, double eta, double eps) {
  if (!(eta > 0.0)) throw InvalidArgument("eta estimate must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0, 1)");
  const int N = inst.num_points(), m = inst.num_facilities();
  const Eigen::MatrixXd& D = inst.point_matrix();

  std::vector<int> comp(N, -1);
  int count = 0;
  for (int s = 0; s < N; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = count;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      for (int q = 0; q < N; ++q)
        if (comp[q] < 0 && D(p, q) <= eta) {
          comp[q] = count;
          stack.push_back(q);
        }
    }
    ++count;
  }

  Components out;
  for (int c = 0; c < count; ++c) {
    std::vector<int> points;
    for (int p = 0; p < N; ++p)
      if (comp[p] == c) points.push_back(p);
    std::vector<int> facilities, clients;
    for (int p : points) (p < m ? facilities : clients).push_back(p < m ? p : p - m);
    if (clients.empty()) continue;
    if (facilities.empty()) {
      out.stranded_clients.insert(out.stranded_clients.end(), clients.begin(), clients.end());
      continue;
    }
    // Union points closer than the contraction radius; each keeps the distances
    // of its group's lowest-id point.
    const double n_prime = static_cast<double>(points.size());
    const double radius = eps * eta / (n_prime * n_prime);
    std::vector<int> rep(points.size());
    std::iota(rep.begin(), rep.end(), 0);
    auto find = [&](int i) {
      while (rep[i] != i) i = rep[i] = rep[rep[i]];
      return i;
    };
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        if (D(points[i], points[j]) < radius) {
          const int a = find(static_cast<int>(i)), b = find(static_cast<int>(j));
          if (a != b) rep[std::max(a, b)] = std::min(a, b);
        }
    const int k = static_cast<int>(points.size());
    Eigen::MatrixXd sub(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sub(i, j) = i == j ? 0.0 : D(points[find(i)], points[find(j)]);
    Eigen::VectorXd costs(static_cast<Eigen::Index>(facilities.size()));
    for (std::size_t i = 0; i < facilities.size(); ++i) costs[static_cast<Eigen::Index>(i)] = inst.opening_cost(facilities[i]);
    Instance sub_inst = Instance::from_matrix(costs, static_cast<int>(clients.size()), sub, false);
    out.parts.push_back(SubInstance{std::move(sub_inst), std::move(facilities), std::move(clients)});
  }
  return out;
}

std::vector<double> eta_estimates(const Instance& inst, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0, 1)");
  const Eigen::MatrixXd& D = inst.point_matrix();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int p = 0; p < D.rows(); ++p)
    for (int q = p + 1; q < D.cols(); ++q) {
      if (D(p, q) > 0.0) lo = std::min(lo, D(p, q));
      hi = std::max(hi, D(p, q));
    }
  if (hi == 0.0) return {1.0};
  const double top = hi * std::max(1, inst.num_clients());
  std::vector<double> out;
  for (double eta = lo; ; eta *= 1.0 + eps) {
    out.push_back(std::min(eta, top));
    if (eta >= top) break;
  }
  return out;
}

SearchResult preprocessed_local_search(const Instance& inst, const SearchConfig& cfg) {
  cfg.validate();
  std::optional<SearchResult> best;
  for (double eta : eta_estimates(inst, cfg.eps)) {
    const Components comps = preprocess_components(inst, eta, cfg.eps);
    if (!comps.stranded_clients.empty()) continue;
    SearchResult combined;
    std::vector<int> open;
    for (const SubInstance& part : comps.parts) {
      const Solution seed = jms_run(part.instance).solution;
      SearchResult local = swap_local_search(part.instance, seed, cfg);
      combined.budget_exhausted = combined.budget_exhausted || local.budget_exhausted;
      for (int f : local.solution.open) open.push_back(part.facilities[f]);
      for (Move& mv : local.log) {
        for (int& f : mv.removed) f = part.facilities[f];
        for (int& f : mv.added) f = part.facilities[f];
        combined.log.push_back(std::move(mv));
      }
    }
    std::sort(open.begin(), open.end());
    combined.solution = evaluate(inst, open);
    if (!best || weighted_cost(combined.solution, cfg) < weighted_cost(best->solution, cfg)) best = std::move(combined);
  }
  if (!best) throw Error("no eta estimate covers every client");
  return *best;
}

}  // namespace lmpflp
