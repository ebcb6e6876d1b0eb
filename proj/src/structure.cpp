#include "lmpflp/structure.hpp"

#include "lmpflp/error.hpp"
#include "lmpflp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace lmpflp {

void ClassificationParams::validate_uniform() const {
  if (!(delta > 0.0 && delta <= 0.5)) throw InvalidArgument("delta must lie in (0, 1/2]");
}

void ClassificationParams::validate_general() const {
  if (!(delta1 > 0.0 && delta1 <= 0.5 && delta2 > 0.0 && delta2 <= 0.5))
    throw InvalidArgument("delta1 and delta2 must lie in (0, 1/2]");
  if (!(delta1_prime > 0.0 && delta1_prime <= delta1)) throw InvalidArgument("need 0 < delta1' <= delta1");
  if (!(delta2_prime > 0.0 && delta2_prime < delta2)) throw InvalidArgument("need 0 < delta2' < delta2");
}

ClassificationParams ClassificationParams::general_defaults(double delta) {
  ClassificationParams p;
  p.delta = delta;
  p.delta1 = p.delta1_prime = delta;
  p.delta2 = 0.5;
  p.delta2_prime = 0.25;
  return p;
}

namespace {

void require_same_clients(const Solution& a, const Solution& b) {
  if (a.assignment.size() != b.assignment.size()) throw InvalidArgument("solutions cover different client sets");
}

// Client counts per S' facility, per OPT facility and per (S', OPT) pair.
struct Overlap {
  std::map<std::pair<int, int>, int> both;
  std::map<int, int> s_size, o_size;

  Overlap(const Solution& S, const Solution& O) {
    require_same_clients(S, O);
    for (std::size_t c = 0; c < S.assignment.size(); ++c) {
      ++both[{S.assignment[c], O.assignment[c]}];
      ++s_size[S.assignment[c]];
      ++o_size[O.assignment[c]];
    }
  }

  int count(int s, int o) const {
    auto it = both.find({s, o});
    return it == both.end() ? 0 : it->second;
  }
  int s_count(int s) const {
    auto it = s_size.find(s);
    return it == s_size.end() ? 0 : it->second;
  }
  int o_count(int o) const {
    auto it = o_size.find(o);
    return it == o_size.end() ? 0 : it->second;
  }
  // Share of the clients of S' facility s served in OPT by the set G.
  double s_share(int s, const std::vector<int>& G) const {
    const int total = s_count(s);
    if (total == 0) return 0.0;
    int hit = 0;
    for (int o : G) hit += count(s, o);
    return static_cast<double>(hit) / total;
  }
  // Share of the clients of OPT facility o served in S' by the set G.
  double o_share(int o, const std::vector<int>& G) const {
    const int total = o_count(o);
    if (total == 0) return 0.0;
    int hit = 0;
    for (int s : G) hit += count(s, o);
    return static_cast<double>(hit) / total;
  }
};

Classification finish(const Solution& S, const Solution& O, const std::set<int>& s_matched,
                      const std::set<int>& o_matched, std::vector<MatchGroup> groups) {
  Classification out;
  for (int f : S.open) (s_matched.count(f) ? out.s_matched : out.s_lonely).push_back(f);
  for (int f : O.open) (o_matched.count(f) ? out.opt_matched : out.opt_lonely).push_back(f);

  CostDecomposition& D = out.decomposition;
  for (std::size_t c = 0; c < S.assignment.size(); ++c) {
    const bool sm = s_matched.count(S.assignment[c]) > 0;
    const bool om = o_matched.count(O.assignment[c]) > 0;
    const double dc = S.per_client[c], oc = O.per_client[c];
    double* opt_cell = sm ? (om ? &D.opt_MM : &D.opt_ML) : (om ? &D.opt_LM : &D.opt_LL);
    double* d_cell = sm ? (om ? &D.d_MM : &D.d_ML) : (om ? &D.d_LM : &D.d_LL);
    *opt_cell += oc;
    *d_cell += dc;
  }
  D.opt = O.connection_cost;
  D.d_prime = S.connection_cost;
  D.opt_L = D.opt_LL + D.opt_ML;
  D.opt_M = D.opt_LM + D.opt_MM;
  D.d_L = D.d_LL + D.d_LM;
  D.d_M = D.d_ML + D.d_MM;
  auto ratio = [&](double x) { return D.opt > 0.0 ? x / D.opt : 0.0; };
  D.alpha_L = ratio(D.opt_L);
  D.alpha_M = 1.0 - D.alpha_L;
  D.alpha_MM = ratio(D.opt_MM);
  D.beta = ratio(D.d_prime);
  D.beta_MM = ratio(D.d_MM);
  D.beta_L = ratio(D.d_L);
  D.k_L = static_cast<int>(out.opt_lonely.size());
  D.k_M = static_cast<int>(out.opt_matched.size());
  D.kprime_L = static_cast<int>(out.s_lonely.size());
  D.kprime_M = static_cast<int>(out.s_matched.size());
  D.matched_pairs = std::move(groups);
  return out;
}

double open_cost(const Instance& inst, const std::vector<int>& facilities) {
  double total = 0.0;
  for (int f : facilities) total += inst.opening_cost(f);
  return total;
}

}  // namespace

double capture_fraction(const Solution& S, const Solution& Sref, int f, int g) {
  return capture_fraction(S, Sref, f, std::vector<int>{g});
}

double capture_fraction(const Solution& S, const Solution& Sref, int f, const std::vector<int>& G) {
  require_same_clients(S, Sref);
  int total = 0, hit = 0;
  for (std::size_t c = 0; c < Sref.assignment.size(); ++c) {
    if (Sref.assignment[c] != f) continue;
    ++total;
    if (std::find(G.begin(), G.end(), S.assignment[c]) != G.end()) ++hit;
  }
  return total == 0 ? 0.0 : static_cast<double>(hit) / total;
}

Classification classify_uniform(const Solution& Sprime, const Solution& OPT, int k,
                                const ClassificationParams& params) {
  params.validate_uniform();
  const Overlap ov(Sprime, OPT);
  const double delta = params.delta;
  std::set<int> s_matched, o_matched;
  std::vector<MatchGroup> groups;

  if (Sprime.size() <= k) {
    for (int o : OPT.open) {
      MatchGroup g{o, true, {}};
      for (int s : Sprime.open)
        if (captures(ov.s_share(s, {o}), 0.5)) g.partners.push_back(s);
      if (g.partners.empty() || !captures(ov.o_share(o, g.partners), 1.0 - delta)) continue;
      o_matched.insert(o);
      s_matched.insert(g.partners.begin(), g.partners.end());
      groups.push_back(std::move(g));
    }
  } else {
    for (int s : Sprime.open) {
      MatchGroup g{s, false, {}};
      for (int o : OPT.open)
        if (captures(ov.o_share(o, {s}), 1.0 - delta)) g.partners.push_back(o);
      if (g.partners.empty() || !captures(ov.s_share(s, g.partners), 0.5)) continue;
      s_matched.insert(s);
      o_matched.insert(g.partners.begin(), g.partners.end());
      groups.push_back(std::move(g));
    }
  }
  return finish(Sprime, OPT, s_matched, o_matched, std::move(groups));
}

Classification classify_general(const Solution& Sprime, const Solution& OPT, const ClassificationParams& params) {
  params.validate_general();
  const Overlap ov(Sprime, OPT);
  std::set<int> s_matched, o_matched;
  std::vector<MatchGroup> groups;
  for (int s : Sprime.open)
    for (int o : OPT.open) {
      if (!captures(ov.o_share(o, {s}), 1.0 - params.delta1)) continue;
      if (!captures(ov.s_share(s, {o}), 1.0 - params.delta2)) continue;
      // Both thresholds exceed 1/2, so neither side can appear in two pairs.
      if (s_matched.count(s) || o_matched.count(o)) throw Error("general matching is not one-to-one");
      s_matched.insert(s);
      o_matched.insert(o);
      groups.push_back({s, false, {o}});
    }
  return finish(Sprime, OPT, s_matched, o_matched, std::move(groups));
}

std::pair<std::vector<int>, std::vector<int>> partition_lonely_bipartite(const Instance& inst, const Solution& OPT,
                                                                         const std::vector<int>& lonely) {
  const std::set<int> is_lonely(lonely.begin(), lonely.end());
  for (int f : lonely)
    if (!OPT.is_open(f)) throw InvalidArgument("lonely facility is not open in OPT");

  std::map<int, int> next;  // edge f -> cl(f) when cl(f) is lonely
  for (int f : lonely) {
    int best = -1;
    for (int g : OPT.open) {
      if (g == f) continue;
      if (best < 0 || inst.facility_dist(f, g) < inst.facility_dist(f, best)) best = g;
    }
    if (best >= 0 && is_lonely.count(best)) next[f] = best;
  }

  // Each walk follows the out-edges until it meets a coloured node, a sink or a
  // two-cycle, then colours the walked path by alternating parity.
  std::map<int, int> colour;
  for (int f : lonely) {
    std::vector<int> path;
    int cur = f;
    while (!colour.count(cur)) {
      if (auto pos = std::find(path.begin(), path.end(), cur); pos != path.end()) {
        if (path.end() - pos != 2) throw Error("nearest-neighbour graph has a cycle longer than 2");
        colour[std::min(*pos, *(pos + 1))] = 0;
        colour[std::max(*pos, *(pos + 1))] = 1;
        path.erase(pos, path.end());
        break;
      }
      auto it = next.find(cur);
      if (it == next.end()) {
        colour[cur] = 0;
        break;
      }
      path.push_back(cur);
      cur = it->second;
    }
    int c = colour.at(cur);
    for (auto it = path.rbegin(); it != path.rend(); ++it) colour[*it] = c ^= 1;
  }

  std::pair<std::vector<int>, std::vector<int>> out;
  for (int f : lonely) (colour.at(f) == 0 ? out.first : out.second).push_back(f);
  std::sort(out.first.begin(), out.first.end());
  std::sort(out.second.begin(), out.second.end());
  return out;
}

std::string format_report(const InequalityReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.name << ".lhs=" << r.lhs << '\n'
     << r.name << ".rhs=" << r.rhs << '\n'
     << r.name << ".margin=" << r.margin() << '\n'
     << r.name << ".slack=" << r.slack << '\n';
  for (const auto& [key, value] : r.terms) os << r.name << '.' << key << '=' << value << '\n';
  os << "violated=" << (r.violated ? 1 : 0) << '\n';
  return os.str();
}

namespace {

InequalityReport make_report(std::string name, double lhs, double rhs_without_slack, double slack,
                             std::vector<std::pair<std::string, double>> terms) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.slack = slack;
  r.rhs = rhs_without_slack + slack;
  r.terms = std::move(terms);
  r.violated = r.lhs > r.rhs + 1e-9 * std::max(1.0, std::abs(r.rhs));
  return r;
}

}  // namespace

InequalityReport check_theorem_3_1(const Solution& Sprime, const Solution& OPT, int k, double lambda,
                                   const ClassificationParams& params, double eps, double slack_coef) {
  const CostDecomposition D = classify_uniform(Sprime, OPT, k, params).decomposition;
  const double delta = params.delta;
  const double lhs = lambda * Sprime.size() + D.d_prime;
  const double mm = delta / (1.0 - delta) * (D.d_MM + D.opt_MM);
  const double rhs = lambda * k + 3.0 * D.opt_L + D.opt_M + mm;
  const double slack = slack_coef * eps * (D.d_prime + D.opt);
  return make_report("thm31", lhs, rhs, slack,
                     {{"opt_L", D.opt_L}, {"opt_M", D.opt_M}, {"d_MM", D.d_MM}, {"opt_MM", D.opt_MM}});
}

InequalityReport check_lemma_4_2(const Solution& S2, const Solution& OPT, int k, double lambda, double delta) {
  if (S2.size() <= k) throw InvalidArgument("lemma 4.2 needs |S2| > k");
  ClassificationParams p;
  p.delta = delta;
  const CostDecomposition D = classify_uniform(S2, OPT, k, p).decomposition;
  const double lhs = lambda * D.kprime_L;
  const double coef = 2.0 / delta * (1.0 - D.alpha_MM) + 2.0 * (1.0 - delta) / delta * (D.beta - D.beta_MM) +
                      2.0 * delta / (1.0 - delta) * (D.beta_MM + D.alpha_MM);
  return make_report("lem42", lhs, coef * D.opt, 0.0,
                     {{"kprime_L", D.kprime_L}, {"coef", coef}, {"alpha_MM", D.alpha_MM}, {"beta", D.beta},
                      {"beta_MM", D.beta_MM}});
}

InequalityReport check_theorem_6_4(const Solution& Sprime, const Solution& OPT, double delta, double eps,
                                   double slack_coef) {
  const ClassificationParams p = ClassificationParams::general_defaults(delta);
  const CostDecomposition D = classify_general(Sprime, OPT, p).decomposition;
  const double lhs = Sprime.cost();
  const double rhs = OPT.facility_cost + delta / (1.0 - delta) * D.d_prime + D.opt_M / (1.0 - delta) + 4.0 * D.opt_L;
  const double slack = slack_coef * eps * (D.d_prime + D.opt);
  return make_report("thm64", lhs, rhs, slack,
                     {{"open_opt", OPT.facility_cost}, {"opt_L", D.opt_L}, {"opt_M", D.opt_M}, {"d_prime", D.d_prime}});
}

double lemma_6_2_t(double delta1, double delta2_prime) {
  return 1.0 + 1.0 / (delta1 * delta2_prime) + std::max((1.0 - delta2_prime) / delta2_prime, 1.0 / (1.0 - delta2_prime));
}

double lemma_6_3_t_prime(double delta2, double delta1_prime) {
  return 0.5 *
         (1.0 + 1.0 / (delta2 * delta1_prime) + std::max((1.0 - delta1_prime) / delta1_prime, 1.0 / (1.0 - delta1_prime)));
}

double lemma_6_3_zeta(const ClassificationParams& p) {
  return 0.5 - (1.0 - p.delta1) * (1.0 - p.delta2) / (2.0 * (1.0 - p.delta1_prime) * (1.0 - p.delta2_prime));
}

InequalityReport check_lemma_6_2(const Instance& inst, const Solution& Sprime, const Solution& OPT,
                                 const ClassificationParams& params) {
  const Classification cls = classify_general(Sprime, OPT, params);
  const CostDecomposition& D = cls.decomposition;
  const double t = lemma_6_2_t(params.delta1, params.delta2_prime);
  const double open_opt_L = open_cost(inst, cls.opt_lonely);
  const double ratio = (1.0 - params.delta2) / (1.0 - params.delta2_prime);
  return make_report("lem62", open_cost(inst, cls.s_lonely), ratio * open_opt_L + t * (D.opt + D.d_prime), 0.0,
                     {{"t", t}, {"open_opt_L", open_opt_L}});
}

Lemma63Report check_lemma_6_3(const Instance& inst, const Solution& Sprime, const Solution& OPT,
                              const ClassificationParams& params, int samples, std::uint64_t seed) {
  if (samples < 2) throw InvalidArgument("need at least two samples");
  Lemma63Report rep;
  if (OPT.size() < 2) {
    rep.applicable = false;
    return rep;
  }
  const Classification cls = classify_general(Sprime, OPT, params);
  const CostDecomposition& D = cls.decomposition;
  const Overlap ov(Sprime, OPT);
  const auto parts = partition_lonely_bipartite(inst, OPT, cls.opt_lonely);

  // Per deleted facility: candidates to reopen with their integer weights.
  struct Reopen {
    std::vector<int> facilities;
    std::vector<int> weights;
    int total = 0;
  };
  auto plan = [&](const std::vector<int>& deleted) {
    std::vector<Reopen> out;
    for (int o : deleted) {
      Reopen r;
      for (int s : Sprime.open)
        if (captures(ov.s_share(s, {o}), 1.0 - params.delta2)) r.facilities.push_back(s);
      if (r.facilities.empty() || !captures(ov.o_share(o, r.facilities), 1.0 - params.delta1_prime)) continue;
      for (int s : r.facilities) {
        r.weights.push_back(ov.count(s, o));
        r.total += r.weights.back();
      }
      out.push_back(std::move(r));
    }
    return out;
  };
  const std::vector<int>* sides[2] = {&parts.first, &parts.second};
  const std::vector<Reopen> plans[2] = {plan(parts.first), plan(parts.second)};

  Rng rng(seed);
  double open_sum = 0.0, open_sq = 0.0, conn_sum = 0.0, conn_sq = 0.0;
  for (int i = 0; i < samples; ++i) {
    const int x = rng.coin() ? 1 : 0;
    std::vector<int> open;
    for (int f : OPT.open)
      if (!std::binary_search(sides[x]->begin(), sides[x]->end(), f)) open.push_back(f);
    for (const Reopen& r : plans[x]) {
      std::uint64_t pick = rng.below(static_cast<std::uint64_t>(r.total));
      std::size_t j = 0;
      while (pick >= static_cast<std::uint64_t>(r.weights[j])) pick -= r.weights[j++];
      open.push_back(r.facilities[j]);
    }
    std::sort(open.begin(), open.end());
    open.erase(std::unique(open.begin(), open.end()), open.end());
    const Solution s = evaluate(inst, open);
    open_sum += s.facility_cost;
    open_sq += s.facility_cost * s.facility_cost;
    conn_sum += s.connection_cost;
    conn_sq += s.connection_cost * s.connection_cost;
  }
  const double n = samples;
  auto stderr_of = [n](double sum, double sq) {
    const double mean = sum / n;
    return std::sqrt(std::max(0.0, (sq / n - mean * mean) * n / (n - 1.0)) / n);
  };
  rep.samples = samples;
  rep.open_mean = open_sum / n;
  rep.open_stderr = stderr_of(open_sum, open_sq);
  rep.conn_mean = conn_sum / n;
  rep.conn_stderr = stderr_of(conn_sum, conn_sq);
  const double t = lemma_6_2_t(params.delta1, params.delta2_prime);
  const double tp = lemma_6_3_t_prime(params.delta2, params.delta1_prime);
  rep.open_bound = OPT.facility_cost - lemma_6_3_zeta(params) * open_cost(inst, cls.opt_lonely) +
                   t * (D.opt + D.d_prime);
  rep.conn_bound = tp * (D.opt + D.d_prime);
  rep.open_ok = rep.open_mean <= rep.open_bound + 3.0 * rep.open_stderr;
  rep.conn_ok = rep.conn_mean <= rep.conn_bound + 3.0 * rep.conn_stderr;
  return rep;
}

std::string format_report(const Lemma63Report& r) {
  std::ostringstream os;
  os.precision(17);
  os << "lem63.applicable=" << (r.applicable ? 1 : 0) << '\n';
  if (r.applicable) {
    os << "lem63.samples=" << r.samples << '\n'
       << "lem63.open_mean=" << r.open_mean << '\n'
       << "lem63.open_stderr=" << r.open_stderr << '\n'
       << "lem63.open_bound=" << r.open_bound << '\n'
       << "lem63.conn_mean=" << r.conn_mean << '\n'
       << "lem63.conn_stderr=" << r.conn_stderr << '\n'
       << "lem63.conn_bound=" << r.conn_bound << '\n';
  }
  os << "violated=" << (r.ok() ? 0 : 1) << '\n';
  return os.str();
}

}  // namespace lmpflp
