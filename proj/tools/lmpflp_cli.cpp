// Command-line front end: instance generation, solvers, factor-revealing LPs,
// bound evaluation and structural diagnostics. Every command writes CSV.

#include "lmpflp/bipoint.hpp"
#include "lmpflp/bounds.hpp"
#include "lmpflp/dual_witness.hpp"
#include "lmpflp/error.hpp"
#include "lmpflp/factor_lp.hpp"
#include "lmpflp/instance.hpp"
#include "lmpflp/jms.hpp"
#include "lmpflp/local_search.hpp"
#include "lmpflp/structure.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace lmpflp;
using Clock = std::chrono::steady_clock;

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 1;
// verify_lmp enumerates every subset; above this many facilities solve skips it.
constexpr int kLmpCheckMaxFacilities = 16;

enum Exit { kOk = 0, kUsage = 1, kViolated = 2 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) { return fmt::format("{}", v); }

std::string join(const std::vector<int>& ids, const char* sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? sep : "") + std::to_string(ids[i]);
  return s;
}

double parse_real(const std::string& text) {
  if (text == "inf" || text == "infinity") return kInfinity;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: " + text);
  }
  if (used != text.size()) throw UsageError("not a number: " + text);
  return v;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Options shared by every subcommand.
struct Common {
  std::string output;  // empty: stdout
  std::uint64_t seed = kDefaultSeed;
  double budget_seconds = 600.0;
  int jobs = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-o,--output", c.output, "Write CSV here instead of stdout; also writes <output>.manifest.txt");
  cmd->add_option("--seed", c.seed, "Random seed")->envname("LMPFLP_SEED");
  cmd->add_option("--budget-seconds", c.budget_seconds, "Refuse jobs estimated to run longer than this")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", c.jobs, "Worker threads across grid points")->check(CLI::Range(1, 256));
}

struct Run {
  std::string command;
  std::vector<std::string> argv;
  Clock::time_point start = Clock::now();
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed: " + path);
}

// Writes the CSV and, for file output, the manifest next to it.
void emit(const Common& c, const Run& run, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text << std::flush;
    return;
  }
  write_file(c.output, text);
  const double ms = std::chrono::duration<double, std::milli>(Clock::now() - run.start).count();
  std::ostringstream m;
  m << "command=" << run.command << '\n';
  m << "argv=";
  for (std::size_t i = 0; i < run.argv.size(); ++i) m << (i ? " " : "") << run.argv[i];
  m << '\n'
    << "seed=" << c.seed << '\n'
    << "jobs=" << c.jobs << '\n'
    << "budget_seconds=" << num(c.budget_seconds) << '\n'
    << "lmpflp_version=" << kVersion << '\n'
    << "eigen_version=" << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << '\n'
    << "compiler=" << __VERSION__ << '\n'
    << "wall_clock_ms=" << fmt::format("{:.1f}", ms) << '\n'
    << "output=" << c.output << '\n'
    << "output_fnv1a64=" << fmt::format("{:016x}", fnv1a(text)) << '\n';
  write_file(c.output + ".manifest.txt", m.str());
}

// Rough single-solve time of the factor LP, from timings of this build
// (about 0.2 s at q = 20, growing like q^5).
double estimated_lp_seconds(int q) { return 0.2 * std::pow(std::max(q, 1) / 20.0, 5.0); }

void check_budget(const Common& c, double estimate, const std::string& what) {
  if (estimate > c.budget_seconds)
    throw UsageError(fmt::format("{} is estimated at {:.0f} s, above --budget-seconds {}; raise the budget to run it",
                                 what, estimate, num(c.budget_seconds)));
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string kind = "euclidean";
  int m = 6, n = 15, dim = 2;
  double lambda = 1.0;
  double cost_lo = 0.0, cost_hi = 1.0;
  int delta = 1;
  double alpha = 1.0, beta = 1.0;
  CLI::Option* lambda_opt = nullptr;
};

int cmd_gen(const GenArgs& a, const Common& c, const Run& run) {
  if (a.kind == "euclidean") {
    const CostLaw law = a.lambda_opt->count() ? CostLaw::uniform(a.lambda) : CostLaw::range(a.cost_lo, a.cost_hi);
    if (law.kind == CostLaw::Kind::Range && a.cost_lo > a.cost_hi) throw UsageError("--cost-lo exceeds --cost-hi");
    emit(c, run, serialize_instance(gen_euclidean(c.seed, a.m, a.n, a.dim, law)));
    return kOk;
  }
  if (c.output.empty()) throw UsageError("gen --kind ls-trap needs --output for the witness sidecar");
  const LsTrap t = gen_ls_counterexample(a.delta, a.alpha, a.beta);
  emit(c, run, serialize_instance(t.instance));
  std::ostringstream w;
  w << "key,value\n"
    << "delta," << a.delta << '\n'
    << "alpha," << num(a.alpha) << '\n'
    << "beta," << num(a.beta) << '\n'
    << "n," << t.n << '\n'
    << "x," << num(t.x) << '\n'
    << "y," << num(t.y) << '\n'
    << "trap," << join(t.trap) << '\n'
    << "optimum," << join(t.optimum) << '\n';
  write_file(c.output + ".witness.csv", w.str());
  return kOk;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string instance;
  std::string alg = "jms";
  int k = 0;
  double lambda = 0.0;
  double eps = 0.0;
  int delta = 2;
  bool oracle = false;
  std::string solution_out, trace_out;
  CLI::Option *lambda_opt = nullptr, *eps_opt = nullptr, *k_opt = nullptr;
};

class Rows {
 public:
  Rows() { os_ << "metric,value\n"; }
  template <class T>
  void add(const std::string& key, const T& v) {
    if constexpr (std::is_floating_point_v<T>)
      os_ << key << ',' << num(v) << '\n';
    else
      os_ << key << ',' << v << '\n';
  }
  void add_solution(const std::string& prefix, const Solution& s) {
    add(prefix + "open", join(s.open));
    add(prefix + "facility_cost", s.facility_cost);
    add(prefix + "connection_cost", s.connection_cost);
    add(prefix + "cost", s.cost());
  }
  // "name.key=value" report lines become "name.key,value" rows; a bare
  // "key=value" line takes the name of the line before it.
  void add_report(const std::string& report) {
    std::istringstream in(report);
    std::string name;
    for (std::string line; std::getline(in, line);) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const auto dot = line.find('.');
      if (dot != std::string::npos && dot < eq)
        name = line.substr(0, dot);
      else if (!name.empty())
        line = name + "." + line;
      line[line.find('=')] = ',';
      os_ << line << '\n';
    }
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

int cmd_solve(const SolveArgs& a, const Common& c, const Run& run) {
  Instance inst = read_instance_file(a.instance);
  if (a.lambda_opt->count()) {
    if (a.lambda < 0.0) throw UsageError("--lambda must be non-negative");
    inst = inst.with_opening_costs(Eigen::VectorXd::Constant(inst.num_facilities(), a.lambda));
  }
  const bool kmedian = a.k_opt->count() > 0;
  if (kmedian && (a.k < 1 || a.k > inst.num_facilities()))
    throw UsageError(fmt::format("--k must be in [1, {}]", inst.num_facilities()));
  if (kmedian && a.alg == "lsjms") throw UsageError("--k is not supported with --alg lsjms");

  Rows rows;
  rows.add("alg", a.alg);
  rows.add("facilities", inst.num_facilities());
  rows.add("clients", inst.num_clients());
  int status = kOk;
  Solution sol;
  std::optional<DualTrace> trace;

  if (a.alg == "oracle") {
    sol = kmedian ? brute_force_kmedian(inst, a.k) : brute_force_ufl(inst).best;
  } else if (kmedian) {
    BipointOptions opts;
    if (a.alg == "jms+ls") opts.inner.delta = a.delta;
    const double eps = a.eps_opt->count() ? a.eps : 0.05;
    const KMedianResult r = kmedian_solve(inst, a.k, eps, opts);
    sol = r.solution;
    rows.add("k", a.k);
    rows.add("eps", eps);
    if (a.k < inst.num_facilities()) {
      rows.add_report(format_report(r.bipoint));
      rows.add("from_trim", r.from_trim ? 1 : 0);
    }
  } else {
    JmsResult j = jms_run(inst);
    rows.add_solution("jms_", j.solution);
    sol = j.solution;
    trace = std::move(j.trace);
    if (a.alg == "jms+ls") {
      SearchConfig cfg;
      cfg.delta = a.delta;
      if (a.eps_opt->count()) cfg.eps = a.eps;
      cfg.validate();
      const SearchResult r = swap_local_search(inst, sol, cfg);
      sol = r.solution;
      rows.add("moves", r.log.size());
    } else if (a.alg == "lsjms") {
      SearchConfig cfg;
      if (a.eps_opt->count()) cfg.width_eps = a.eps;
      cfg.validate();
      const SearchResult r = localsearch_jms(inst, sol, cfg);
      sol = r.solution;
      rows.add("moves", r.log.size());
    }
  }
  rows.add_solution("", sol);

  if (!kmedian && a.alg != "oracle" && inst.num_facilities() <= kLmpCheckMaxFacilities) {
    const LmpReport lmp = verify_lmp(inst, sol, 2.0);
    rows.add("lmp_ratio", 2.0);
    rows.add("lmp_worst_ratio", lmp.worst_ratio);
    rows.add("lmp_min_margin", lmp.min_margin);
    rows.add("lmp_passed", lmp.passed ? 1 : 0);
    if (!lmp.passed) status = kViolated;
  }
  if (a.oracle && a.alg != "oracle") {
    const Solution opt = kmedian ? brute_force_kmedian(inst, a.k) : brute_force_ufl(inst).best;
    const double mine = kmedian ? sol.connection_cost : sol.cost();
    const double best = kmedian ? opt.connection_cost : opt.cost();
    rows.add_solution("oracle_", opt);
    rows.add("ratio", best > 0.0 ? mine / best : (mine > 0.0 ? kInfinity : 1.0));
  }

  if (!a.solution_out.empty()) write_file(a.solution_out, serialize_solution(sol));
  if (!a.trace_out.empty()) {
    if (!trace) throw UsageError("--trace needs a JMS-based algorithm without --k");
    write_file(a.trace_out, write_trace(inst, *trace));
  }
  emit(c, run, rows.str());
  return status;
}

// ---------------------------------------------------------------- factor

struct FactorArgs {
  std::vector<int> q;
  std::vector<std::string> T{"inf"};
  std::string variant = "plain";
  double dual_z = 0.0;
  int resume = 0;
  bool no_timing = false;
  CLI::Option* dual_opt = nullptr;
};

struct FactorRow {
  bool done = false;
  double value = 0.0;
  double ms = 0.0;
  double dual_value = 0.0;
  bool dual_ok = true;
};

int cmd_factor(const FactorArgs& a, const Common& c, const Run& run) {
  const FactorVariant variant = a.variant == "plus" ? FactorVariant::Plus : FactorVariant::Plain;
  const bool dual = a.dual_opt->count() > 0;
  if (dual && variant != FactorVariant::Plain) throw UsageError("--dual-z needs --variant plain");
  std::vector<double> Ts;
  for (const auto& t : a.T) Ts.push_back(parse_real(t));

  struct Point {
    int q;
    double T;
  };
  std::vector<Point> grid;
  for (int q : a.q)
    for (double T : Ts) grid.push_back({q, T});
  if (a.resume < 0 || a.resume > static_cast<int>(grid.size())) throw UsageError("--resume is past the grid");

  double estimate = 0.0;
  for (std::size_t i = a.resume; i < grid.size(); ++i) estimate += estimated_lp_seconds(grid[i].q);
  check_budget(c, estimate / c.jobs, "this factor grid");

  const auto deadline = run.start + std::chrono::duration<double>(c.budget_seconds);
  std::vector<FactorRow> rows(grid.size());
  std::atomic<std::size_t> next{static_cast<std::size_t>(a.resume)};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      if (Clock::now() > deadline) return;
      try {
        const auto t0 = Clock::now();
        const FactorSolve s = solve_factor_lp(grid[i].q, grid[i].T, variant);
        rows[i].ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        rows[i].value = s.value;
        if (dual) {
          try {
            const DualWitness w = discrete_dual(grid[i].q, a.dual_z, grid[i].T);
            rows[i].dual_value = w.value;
            rows[i].dual_ok = w.value >= s.value - 1e-6;
          } catch (const NumericalError&) {
            rows[i].dual_value = kInfinity;
            rows[i].dual_ok = false;
          }
        }
        rows[i].done = true;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < c.jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::ostringstream os;
  os << "q,T,variant,value,solve_ms";
  if (dual) os << ",dual_z,dual_value,dual_ok";
  os << '\n';
  int status = kOk;
  std::size_t i = a.resume;
  for (; i < grid.size() && rows[i].done; ++i) {
    const FactorRow& r = rows[i];
    os << grid[i].q << ',' << num(grid[i].T) << ',' << to_string(variant) << ',' << num(r.value) << ','
       << (a.no_timing ? std::string("0") : fmt::format("{:.1f}", r.ms));
    if (dual) os << ',' << num(a.dual_z) << ',' << num(r.dual_value) << ',' << (r.dual_ok ? 1 : 0);
    os << '\n';
    if (!r.dual_ok) status = kViolated;
  }
  if (i < grid.size()) {
    os << "# budget exhausted; resume with --resume " << i << '\n';
    emit(c, run, os.str());
    return kUsage;
  }
  emit(c, run, os.str());
  return status;
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
  int eta2_q = 0;
  std::string mode = "lp";
  double eta2 = 0.0;
  double rho_br = kRhoBr;
  bool rho_kmed = false;
  double general_delta = 0.0;
  bool refined = false;
  int refined_a_points = 8;
  int refined_beta_points = 4;
  CLI::Option *eta2_q_opt = nullptr, *eta2_opt = nullptr, *general_opt = nullptr, *mode_opt = nullptr;
};

BoundFn make_bound(const BoundsArgs& a, const Common& c) {
  if (a.mode == "analytic") {
    const auto env = std::make_shared<ConcaveEnvelope>(ConcaveEnvelope::analytic());
    return [env](double T) { return (*env)(T); };
  }
  if (!a.eta2_q_opt->count()) throw UsageError("lp mode needs --eta2-q");
  const auto env = std::make_shared<ConcaveEnvelope>(ConcaveEnvelope::plus_lp(a.eta2_q, c.jobs));
  return [env](double T) { return (*env)(T); };
}

int cmd_bounds(const BoundsArgs& a, const Common& c, const Run& run) {
  // The analytic bound has no q, so an explicit --mode analytic also asks for the search.
  const bool want_eta2 = a.eta2_q_opt->count() > 0 || (a.mode == "analytic" && a.mode_opt->count() > 0);
  if (!want_eta2 && !a.rho_kmed && !a.general_opt->count() && !a.refined)
    throw UsageError("bounds needs at least one of --eta2-q, --mode analytic, --rho-kmed, --eta-general-delta, --refined");
  if (a.mode == "lp" && (want_eta2 || a.refined)) {
    if (!a.eta2_q_opt->count()) throw UsageError("lp mode needs --eta2-q");
    const double samples = static_cast<double>(ConcaveEnvelope::default_grid().size());
    check_budget(c, samples * estimated_lp_seconds(a.eta2_q) / c.jobs, fmt::format("the q = {} envelope", a.eta2_q));
  }

  std::ostringstream os;
  std::optional<double> eta2;
  if (a.eta2_opt->count()) eta2 = a.eta2;
  std::optional<BoundFn> bound;
  if (want_eta2 || a.refined) bound = make_bound(a, c);

  if (want_eta2) {
    SearchOptions opts;
    opts.jobs = c.jobs;
    const Eta2Result r = eta2_search(*bound, 2.0, opts);
    os << "q,mode,eta2,delta,alpha_L,alpha_MM,beta_MM,T_L\n"
       << (a.mode == "lp" ? std::to_string(a.eta2_q) : std::string("-")) << ',' << a.mode << ',' << num(r.eta2) << ',' << num(r.delta) << ',' << num(r.alpha_L) << ','
       << num(r.alpha_MM) << ',' << num(r.beta_MM) << ',' << num(r.T_L) << '\n';
    // LP values a few ulps above 2 leave eta2 at -1e-16 or so.
    if (!eta2) eta2 = r.eta2 > -1e-12 ? std::max(r.eta2, 0.0) : r.eta2;
  }
  if (a.rho_kmed) {
    if (!eta2) throw UsageError("--rho-kmed needs --eta2 or --eta2-q");
    const RhoKmed r = rho_kmed_eval(*eta2, a.rho_br);
    if (os.tellp() > 0) os << '\n';
    os << "eta2,rho_br,rho_kmed,worst_a\n"
       << num(*eta2) << ',' << num(a.rho_br) << ',' << num(r.rho_kmed) << ',' << num(r.worst_a) << '\n';
  }
  if (a.refined) {
    // Each grid point runs two full searches, so they use a coarser grid.
    SearchOptions coarse;
    coarse.delta_step = 0.01;
    coarse.alpha_points = 60;
    coarse.bisect_iters = 40;
    const BoundFn& f = *bound;
    const EtaFn eta1 = [&](double x, double beta1) { return eta1_search(f, x, beta1, coarse).eta1; };
    const EtaFn eta2_fn = [&](double x, double beta1) {
      const double beta2 = x < 1.0 ? std::max(0.0, (2.0 - x * beta1) / (1.0 - x)) : 2.0;
      return eta2_search(f, beta2, coarse).eta2;
    };
    RefinedOptions ro;
    ro.a_points = a.refined_a_points;
    ro.beta_points = a.refined_beta_points;
    const RhoKmed r = rho_kmed_refined(eta1, eta2_fn, a.rho_br, ro);
    if (os.tellp() > 0) os << '\n';
    os << "mode,rho_br,refined_rho_kmed,worst_a\n"
       << a.mode << ',' << num(a.rho_br) << ',' << num(r.rho_kmed) << ',' << num(r.worst_a) << '\n';
  }
  if (a.general_opt->count()) {
    const double v = eta_general_fl(a.general_delta);
    const GeneralFl best = best_general_fl();
    if (os.tellp() > 0) os << '\n';
    os << "delta,eta_general_fl,best_eta_half,best_delta\n"
       << num(a.general_delta) << ',' << num(v) << ',' << num(best.eta_half) << ',' << num(best.delta_star) << '\n';
  }
  emit(c, run, os.str());
  return kOk;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string instance, sol, ref;
  double delta = 0.0;
  std::vector<std::string> checks;
  int samples = 10000;
  int k = 0;
  double eps = -1.0;
  double slack_coef = -1.0;
  CLI::Option *delta_opt = nullptr, *k_opt = nullptr;
};

std::vector<int> read_solution(const std::string& path, const Instance& inst) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::vector<int> open = parse_solution(ss.str());
  for (int f : open)
    if (f < 0 || f >= inst.num_facilities())
      throw InvalidArgument(fmt::format("{} opens facility {} but the instance has {}", path, f, inst.num_facilities()));
  if (open.empty()) throw InvalidArgument(path + " opens no facility");
  return open;
}

void add_decomposition(Rows& rows, const Classification& cl) {
  const CostDecomposition& D = cl.decomposition;
  rows.add("opt_matched", join(cl.opt_matched));
  rows.add("opt_lonely", join(cl.opt_lonely));
  rows.add("s_matched", join(cl.s_matched));
  rows.add("s_lonely", join(cl.s_lonely));
  rows.add("matched_groups", D.matched_pairs.size());
  for (const auto& [key, v] : std::initializer_list<std::pair<const char*, double>>{
           {"opt", D.opt},       {"d_prime", D.d_prime}, {"opt_LL", D.opt_LL}, {"opt_LM", D.opt_LM},
           {"opt_ML", D.opt_ML}, {"opt_MM", D.opt_MM},   {"d_LL", D.d_LL},     {"d_LM", D.d_LM},
           {"d_ML", D.d_ML},     {"d_MM", D.d_MM},       {"alpha_L", D.alpha_L}, {"alpha_M", D.alpha_M},
           {"alpha_MM", D.alpha_MM}, {"beta", D.beta},   {"beta_MM", D.beta_MM}, {"beta_L", D.beta_L}})
    rows.add(key, v);
}

int cmd_analyze(const AnalyzeArgs& a, const Common& c, const Run& run) {
  const Instance inst = read_instance_file(a.instance);
  const Solution S = evaluate(inst, read_solution(a.sol, inst));
  const Solution O = evaluate(inst, read_solution(a.ref, inst));
  const bool uniform = inst.uniform_cost();
  const int k = a.k_opt->count() ? a.k : O.size();
  const double lambda = inst.opening_cost(0);

  Rows rows;
  rows.add("uniform_cost", uniform ? 1 : 0);
  rows.add_solution("sol_", S);
  rows.add_solution("ref_", O);
  ClassificationParams params;
  if (uniform) {
    if (a.delta_opt->count()) params.delta = a.delta;
    params.validate_uniform();
    rows.add("k", k);
    rows.add("delta", params.delta);
    add_decomposition(rows, classify_uniform(S, O, k, params));
  } else {
    params = ClassificationParams::general_defaults(a.delta_opt->count() ? a.delta : 0.1);
    params.validate_general();
    rows.add("delta", params.delta1);
    add_decomposition(rows, classify_general(S, O, params));
  }

  int status = kOk;
  auto need_uniform = [&](const std::string& check) {
    if (!uniform) throw UsageError(check + " needs uniform opening costs");
  };
  for (const auto& check : a.checks) {
    if (check == "thm31") {
      need_uniform(check);
      const double eps = a.eps >= 0.0 ? a.eps : 0.125;
      const double coef = a.slack_coef >= 0.0 ? a.slack_coef : 12.0;
      const InequalityReport r = check_theorem_3_1(S, O, k, lambda, params, eps, coef);
      rows.add_report(format_report(r));
      if (r.violated) status = kViolated;
    } else if (check == "lem42") {
      need_uniform(check);
      if (S.size() <= k) {
        rows.add("lem42.applicable", 0);
        continue;
      }
      const InequalityReport r = check_lemma_4_2(S, O, k, lambda, params.delta);
      rows.add_report(format_report(r));
      if (r.violated) status = kViolated;
    } else if (check == "thm64") {
      const double eps = a.eps >= 0.0 ? a.eps : 0.5;
      const double coef = a.slack_coef >= 0.0 ? a.slack_coef : 4.0;
      const InequalityReport r = check_theorem_6_4(S, O, uniform ? params.delta : params.delta1, eps, coef);
      rows.add_report(format_report(r));
      if (r.violated) status = kViolated;
    } else if (check == "lem62") {
      const ClassificationParams g = uniform ? ClassificationParams::general_defaults(params.delta) : params;
      const InequalityReport r = check_lemma_6_2(inst, S, O, g);
      rows.add_report(format_report(r));
      if (r.violated) status = kViolated;
    } else if (check == "lem63") {
      const ClassificationParams g = uniform ? ClassificationParams::general_defaults(params.delta) : params;
      const Lemma63Report r = check_lemma_6_3(inst, S, O, g, a.samples, c.seed);
      rows.add_report(format_report(r));
      if (r.applicable && !r.ok()) status = kViolated;
    }
  }
  emit(c, run, rows.str());
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Facility location and k-median experiment harness"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  Run run;
  for (int i = 0; i < argc; ++i) run.argv.emplace_back(argv[i]);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate an FLP instance");
  add_common(g, common);
  g->add_option("--kind", gen.kind)->check(CLI::IsMember({"euclidean", "ls-trap"}));
  g->add_option("--m", gen.m, "Facilities")->check(CLI::PositiveNumber);
  g->add_option("--n", gen.n, "Clients")->check(CLI::PositiveNumber);
  g->add_option("--dim", gen.dim, "Dimension of the unit cube")->check(CLI::PositiveNumber);
  gen.lambda_opt = g->add_option("--lambda", gen.lambda, "Uniform opening cost")->check(CLI::NonNegativeNumber);
  g->add_option("--cost-lo", gen.cost_lo, "Opening costs uniform in [lo, hi]")->check(CLI::NonNegativeNumber);
  g->add_option("--cost-hi", gen.cost_hi)->check(CLI::NonNegativeNumber);
  g->add_option("--delta", gen.delta, "ls-trap swap width")->check(CLI::PositiveNumber);
  g->add_option("--alpha", gen.alpha, "ls-trap weight of the opening cost")->check(CLI::PositiveNumber);
  g->add_option("--beta", gen.beta, "ls-trap weight of the connection cost")->check(CLI::PositiveNumber);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Run a solver on an FLP file");
  add_common(s, common);
  s->add_option("instance", solve.instance)->required();
  s->add_option("--alg", solve.alg)->check(CLI::IsMember({"jms", "jms+ls", "lsjms", "oracle"}));
  solve.k_opt = s->add_option("--k", solve.k, "Solve k-median with this k");
  solve.lambda_opt = s->add_option("--lambda", solve.lambda, "Replace every opening cost by lambda");
  solve.eps_opt = s->add_option("--eps", solve.eps, "Bipoint precision, or the local-search epsilon")
                      ->check(CLI::PositiveNumber);
  s->add_option("--delta", solve.delta, "Swap width for jms+ls")->check(CLI::PositiveNumber);
  s->add_flag("--oracle", solve.oracle, "Also run the exhaustive oracle and report the ratio");
  s->add_option("--write-solution", solve.solution_out, "Write the solution file here");
  s->add_option("--trace", solve.trace_out, "Write the JMS event trace here");

  FactorArgs factor;
  auto* f = app.add_subcommand("factor", "Solve factor-revealing LPs on a (q, T) grid");
  add_common(f, common);
  f->add_option("--q", factor.q, "Cluster sizes")->required()->check(CLI::PositiveNumber);
  f->add_option("--T", factor.T, "Caps on lambda; 'inf' for none");
  f->add_option("--variant", factor.variant)->check(CLI::IsMember({"plain", "plus"}));
  factor.dual_opt = f->add_option("--dual-z", factor.dual_z, "Also build the dual witness at this z");
  f->add_option("--resume", factor.resume, "Skip the first grid points of an interrupted run");
  f->add_flag("--no-timing", factor.no_timing, "Write 0 for solve_ms so reruns are byte identical");

  BoundsArgs bounds;
  auto* b = app.add_subcommand("bounds", "Evaluate the k-median and general-cost constants");
  add_common(b, common);
  bounds.eta2_q_opt = b->add_option("--eta2-q", bounds.eta2_q, "Run the eta2 search on the q-client LP envelope")
                          ->check(CLI::Range(2, 100000));
  bounds.mode_opt = b->add_option("--mode", bounds.mode)->check(CLI::IsMember({"lp", "analytic"}));
  bounds.eta2_opt = b->add_option("--eta2", bounds.eta2, "Use this eta2 for --rho-kmed");
  b->add_option("--rho-br", bounds.rho_br, "Bipoint rounding ratio")->check(CLI::PositiveNumber);
  b->add_flag("--rho-kmed", bounds.rho_kmed, "Evaluate the k-median ratio");
  bounds.general_opt = b->add_option("--eta-general-delta", bounds.general_delta, "Evaluate the general-cost gain");
  b->add_flag("--refined", bounds.refined, "Evaluate the refined k-median ratio with eta1 and eta2 searches");
  b->add_option("--refined-a-points", bounds.refined_a_points)->check(CLI::Range(2, 1000));
  b->add_option("--refined-beta-points", bounds.refined_beta_points)->check(CLI::Range(2, 1000));

  AnalyzeArgs analyze;
  auto* an = app.add_subcommand("analyze", "Classify a solution against a reference and check inequalities");
  add_common(an, common);
  an->add_option("instance", analyze.instance)->required();
  an->add_option("--sol", analyze.sol, "Solution under study")->required();
  an->add_option("--ref", analyze.ref, "Reference (optimal) solution")->required();
  analyze.delta_opt = an->add_option("--delta", analyze.delta, "Classification parameter")->check(CLI::Range(0.0, 0.5));
  an->add_option("--check", analyze.checks)->check(CLI::IsMember({"thm31", "lem42", "thm64", "lem62", "lem63"}));
  an->add_option("--samples", analyze.samples, "Monte Carlo samples for lem63")->check(CLI::PositiveNumber);
  analyze.k_opt = an->add_option("--k", analyze.k, "k for the uniform-cost checks; default |ref|");
  an->add_option("--eps", analyze.eps, "Slack epsilon");
  an->add_option("--slack-coef", analyze.slack_coef, "Slack coefficient");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*g) {
      run.command = "gen";
      return cmd_gen(gen, common, run);
    }
    if (*s) {
      run.command = "solve";
      return cmd_solve(solve, common, run);
    }
    if (*f) {
      run.command = "factor";
      return cmd_factor(factor, common, run);
    }
    if (*b) {
      run.command = "bounds";
      return cmd_bounds(bounds, common, run);
    }
    run.command = "analyze";
    return cmd_analyze(analyze, common, run);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kUsage;
}
