#include "lmpflp/instance.hpp"

#include "lmpflp/error.hpp"
#include "lmpflp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace lmpflp {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kMetricTol = 1e-9;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_sizes(const Eigen::VectorXd& costs, int n) {
  if (costs.size() < 1) throw InvalidInstance("instance needs at least one facility");
  if (n < 1) throw InvalidInstance("instance needs at least one client");
  for (Eigen::Index f = 0; f < costs.size(); ++f) {
    if (!std::isfinite(costs[f]) || costs[f] < 0.0)
      throw InvalidInstance("facility " + std::to_string(f) + " has negative or non-finite opening cost");
  }
}

}  // namespace

Instance Instance::from_matrix(Eigen::VectorXd opening_costs, int num_clients, const Eigen::MatrixXd& dist,
                               bool validate_metric) {
  check_sizes(opening_costs, num_clients);
  const Eigen::Index N = opening_costs.size() + num_clients;
  if (dist.rows() != N || dist.cols() != N)
    throw InvalidInstance("distance matrix must be " + std::to_string(N) + "x" + std::to_string(N));
  if (!dist.allFinite()) throw InvalidInstance("distance matrix has non-finite entries");
  if ((dist.array() < 0.0).any()) throw InvalidInstance("negative distance");

  const double maxdist = dist.maxCoeff();
  const double asym = (dist - dist.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * std::max(maxdist, 1.0)) throw InvalidInstance("distance matrix is not symmetric");

  Instance inst;
  inst.m_ = static_cast<int>(opening_costs.size());
  inst.n_ = num_clients;
  inst.kind_ = MetricKind::Explicit;
  inst.costs_ = std::move(opening_costs);
  inst.points_ = 0.5 * (dist + dist.transpose());
  inst.points_.diagonal().setZero();
  inst.finalize();
  if (validate_metric && inst.max_triangle_violation() > kMetricTol * inst.scale_)
    throw InvalidInstance("non-metric distance matrix (triangle inequality violated)");
  return inst;
}

Instance Instance::from_points(Eigen::VectorXd opening_costs, int num_clients, Eigen::MatrixXd coords) {
  check_sizes(opening_costs, num_clients);
  const Eigen::Index N = opening_costs.size() + num_clients;
  if (coords.rows() != N) throw InvalidInstance("coordinate count does not match m+n");
  if (coords.cols() < 1) throw InvalidInstance("dimension must be at least 1");
  if (!coords.allFinite()) throw InvalidInstance("non-finite coordinate");

  Instance inst;
  inst.m_ = static_cast<int>(opening_costs.size());
  inst.n_ = num_clients;
  inst.kind_ = MetricKind::Euclidean;
  inst.costs_ = std::move(opening_costs);
  inst.points_.resize(N, N);
  for (Eigen::Index p = 0; p < N; ++p) {
    inst.points_(p, p) = 0.0;
    for (Eigen::Index q = p + 1; q < N; ++q) {
      const double d = (coords.row(p) - coords.row(q)).norm();
      inst.points_(p, q) = d;
      inst.points_(q, p) = d;
    }
  }
  inst.coords_ = std::move(coords);
  inst.finalize();
  return inst;
}

void Instance::finalize() {
  client_fac_ = points_.block(m_, 0, n_, m_).transpose();
  scale_ = points_.size() > 0 ? points_.maxCoeff() : 0.0;
  by_dist_.assign(n_, {});
  for (int c = 0; c < n_; ++c) {
    auto& order = by_dist_[c];
    order.resize(m_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return client_fac_(a, c) < client_fac_(b, c); });
  }
}

bool Instance::uniform_cost() const { return (costs_.array() == costs_[0]).all(); }

Instance Instance::with_opening_costs(Eigen::VectorXd costs) const {
  if (costs.size() != m_) throw InvalidArgument("opening cost vector has wrong length");
  check_sizes(costs, n_);
  Instance copy = *this;
  copy.costs_ = std::move(costs);
  return copy;
}

double Instance::max_triangle_violation() const {
  const Eigen::Index N = points_.rows();
  double worst = 0.0;
  for (Eigen::Index q = 0; q < N; ++q) {
    // d(p,r) - d(p,q) - d(q,r) for all (p,r) through the midpoint q.
    for (Eigen::Index r = 0; r < N; ++r) {
      const double dqr = points_(q, r);
      const double v = (points_.col(r).array() - points_.col(q).array() - dqr).maxCoeff();
      worst = std::max(worst, v);
    }
  }
  return worst;
}

bool Solution::is_open(int f) const { return std::binary_search(open.begin(), open.end(), f); }

std::vector<int> Solution::clients_of(int f) const {
  std::vector<int> out;
  for (int c = 0; c < static_cast<int>(assignment.size()); ++c)
    if (assignment[c] == f) out.push_back(c);
  return out;
}

Solution evaluate(const Instance& inst, std::vector<int> open_set) {
  if (open_set.empty()) throw InvalidArgument("open set must be nonempty");
  std::sort(open_set.begin(), open_set.end());
  open_set.erase(std::unique(open_set.begin(), open_set.end()), open_set.end());
  for (int f : open_set)
    if (f < 0 || f >= inst.num_facilities()) throw InvalidArgument("facility id out of range: " + std::to_string(f));

  Solution sol;
  sol.open = std::move(open_set);
  for (int f : sol.open) sol.facility_cost += inst.opening_cost(f);

  const int n = inst.num_clients();
  sol.assignment.resize(n);
  sol.per_client.resize(n);
  for (int c = 0; c < n; ++c) {
    int best = sol.open.front();
    double bd = inst.dist(c, best);
    for (int f : sol.open) {
      const double d = inst.dist(c, f);
      if (d < bd) {
        bd = d;
        best = f;
      }
    }
    sol.assignment[c] = best;
    sol.per_client[c] = bd;
    sol.connection_cost += bd;
  }
  return sol;
}

// ---------------------------------------------------------------------------
// FLP v1 text format

namespace {

struct Token {
  std::string text;
  int line;
};

class TokenStream {
 public:
  explicit TokenStream(std::string_view text) {
    int line = 1;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view ln = text.substr(pos, end - pos);
      if (auto hash = ln.find('#'); hash != std::string_view::npos) ln = ln.substr(0, hash);
      std::istringstream is{std::string(ln)};
      std::string tok;
      while (is >> tok) tokens_.push_back({tok, line});
      ++line;
      pos = end + 1;
    }
    last_line_ = line - 1;
  }

  bool done() const { return i_ >= tokens_.size(); }

  const Token& next(const char* what) {
    if (done()) throw ParseError(last_line_, std::string("unexpected end of input, expected ") + what);
    return tokens_[i_++];
  }

  void expect(const char* word) {
    const Token& t = next(word);
    if (t.text != word) throw ParseError(t.line, std::string("expected '") + word + "', got '" + t.text + "'");
  }

  long integer(const char* what) {
    const Token& t = next(what);
    try {
      std::size_t used = 0;
      long v = std::stol(t.text, &used);
      if (used != t.text.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ParseError(t.line, std::string("expected integer ") + what + ", got '" + t.text + "'");
    }
  }

  double real(const char* what, int* line_out = nullptr) {
    const Token& t = next(what);
    if (line_out) *line_out = t.line;
    try {
      std::size_t used = 0;
      double v = std::stod(t.text, &used);
      if (used != t.text.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ParseError(t.line, std::string("expected real ") + what + ", got '" + t.text + "'");
    }
  }

  int line() const { return done() ? last_line_ : tokens_[i_].line; }

 private:
  std::vector<Token> tokens_;
  std::size_t i_ = 0;
  int last_line_ = 1;
};

}  // namespace

Instance parse_instance(std::string_view text, const ParseOptions& opts) {
  TokenStream ts(text);
  ts.expect("flp");
  {
    const int line = ts.line();
    if (ts.integer("format version") != 1) throw ParseError(line, "unsupported format version");
  }
  ts.expect("facilities");
  int line = ts.line();
  const long m = ts.integer("facility count");
  if (m < 1) throw ParseError(line, "facility count must be at least 1");

  Eigen::VectorXd costs(m);
  for (long i = 0; i < m; ++i) {
    line = ts.line();
    const long id = ts.integer("facility id");
    if (id != i) throw ParseError(line, "facility ids must be 0..m-1 in order");
    int cl = 0;
    const double c = ts.real("opening cost", &cl);
    if (!(c >= 0.0) || !std::isfinite(c)) throw ParseError(cl, "negative opening cost");
    costs[i] = c;
  }

  ts.expect("clients");
  line = ts.line();
  const long n = ts.integer("client count");
  if (n < 1) throw ParseError(line, "client count must be at least 1");

  ts.expect("metric");
  line = ts.line();
  const std::string kind = ts.next("metric kind").text;
  const long N = m + n;
  if (kind == "explicit") {
    Eigen::MatrixXd dist(N, N);
    for (long p = 0; p < N; ++p)
      for (long q = 0; q < N; ++q) {
        int dl = 0;
        const double d = ts.real("distance", &dl);
        if (!(d >= 0.0) || !std::isfinite(d)) throw ParseError(dl, "negative or non-finite distance");
        dist(p, q) = d;
      }
    if (!ts.done()) throw ParseError(ts.line(), "dimension mismatch: trailing data after distance matrix");
    return Instance::from_matrix(std::move(costs), static_cast<int>(n), dist, opts.validate_metric);
  }
  if (kind == "euclidean") {
    line = ts.line();
    const long dim = ts.integer("dimension");
    if (dim < 1) throw ParseError(line, "dimension must be at least 1");
    Eigen::MatrixXd coords(N, dim);
    for (long p = 0; p < N; ++p)
      for (long k = 0; k < dim; ++k) coords(p, k) = ts.real("coordinate");
    if (!ts.done()) throw ParseError(ts.line(), "dimension mismatch: trailing data after coordinates");
    return Instance::from_points(std::move(costs), static_cast<int>(n), std::move(coords));
  }
  throw ParseError(line, "unknown metric kind '" + kind + "'");
}

Instance read_instance_file(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str(), opts);
}

std::string serialize_instance(const Instance& inst) {
  std::ostringstream os;
  os << "flp 1\n";
  os << "facilities " << inst.num_facilities() << "\n";
  for (int f = 0; f < inst.num_facilities(); ++f) os << f << " " << fmt17(inst.opening_cost(f)) << "\n";
  os << "clients " << inst.num_clients() << "\n";
  if (inst.metric_kind() == Instance::MetricKind::Euclidean) {
    const auto& X = inst.coordinates();
    os << "metric euclidean " << X.cols() << "\n";
    for (Eigen::Index p = 0; p < X.rows(); ++p) {
      for (Eigen::Index k = 0; k < X.cols(); ++k) os << (k ? " " : "") << fmt17(X(p, k));
      os << "\n";
    }
  } else {
    os << "metric explicit\n";
    const auto& D = inst.point_matrix();
    for (Eigen::Index p = 0; p < D.rows(); ++p) {
      for (Eigen::Index q = 0; q < D.cols(); ++q) os << (q ? " " : "") << fmt17(D(p, q));
      os << "\n";
    }
  }
  return os.str();
}

void write_instance_file(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << serialize_instance(inst);
}

std::string serialize_solution(const Solution& sol) {
  std::ostringstream os;
  os << "sol 1\nopen " << sol.open.size() << "\n";
  for (std::size_t i = 0; i < sol.open.size(); ++i) os << (i ? " " : "") << sol.open[i];
  os << "\n";
  return os.str();
}

std::vector<int> parse_solution(std::string_view text) {
  TokenStream ts(text);
  ts.expect("sol");
  {
    const int line = ts.line();
    if (ts.integer("format version") != 1) throw ParseError(line, "unsupported solution format version");
  }
  ts.expect("open");
  const int line = ts.line();
  const long k = ts.integer("open count");
  if (k < 1) throw ParseError(line, "open count must be at least 1");
  std::vector<int> ids;
  for (long i = 0; i < k; ++i) ids.push_back(static_cast<int>(ts.integer("facility id")));
  if (!ts.done()) throw ParseError(ts.line(), "trailing data after facility list");
  return ids;
}

// ---------------------------------------------------------------------------
// Generators

Instance gen_euclidean(std::uint64_t seed, int m, int n, int dim, const CostLaw& law) {
  if (m < 1 || n < 1 || dim < 1) throw InvalidArgument("gen_euclidean needs m, n, dim >= 1");
  Rng rng(seed);
  Eigen::VectorXd costs(m);
  for (int f = 0; f < m; ++f)
    costs[f] = law.kind == CostLaw::Kind::Uniform ? law.lambda : rng.uniform(law.lo, law.hi);
  Eigen::MatrixXd coords(m + n, dim);
  for (int p = 0; p < m + n; ++p)
    for (int k = 0; k < dim; ++k) coords(p, k) = rng.uniform();
  return Instance::from_points(std::move(costs), n, std::move(coords));
}

LsTrap gen_ls_counterexample(int delta, double alpha, double beta) {
  if (delta < 1) throw InvalidArgument("swap width must be at least 1");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("alpha and beta must be positive");

  const double b = beta / alpha;
  const double theta = std::min(0.5, 1.0 / (2.0 * b));
  const double y = b * (1.0 + theta);

  // Conditions on x for a given n:
  //   x > n(y - 1)                         (OPT strictly cheaper)
  //   x < r*y + b(n - 2r) for r = 1..delta  (no swap of width r helps)
  for (int n = delta; n <= 1'000'000; ++n) {
    const double lo = std::max(0.0, n * (y - 1.0));
    double hi = std::numeric_limits<double>::infinity();
    for (int r = 1; r <= delta; ++r) hi = std::min(hi, r * y + b * (n - 2.0 * r));
    if (!(hi > lo)) continue;
    const double x = 0.5 * (lo + hi);
    bool ok = y > b && n * y < x + n;
    for (int r = 1; r <= delta && ok; ++r) ok = alpha * (x - r * y) < beta * (n - 2.0 * r);
    if (!ok) continue;

    // Points: f0, f1..fn, then clients c1..cn. Shortest-path completion through f0.
    const int N = 2 * n + 1;
    Eigen::MatrixXd D = Eigen::MatrixXd::Constant(N, N, 2.0);
    D.diagonal().setZero();
    for (int i = 1; i <= n; ++i) {
      const int fi = i, ci = n + i;
      D(0, fi) = D(fi, 0) = 1.0;
      D(0, ci) = D(ci, 0) = 1.0;
      D(fi, ci) = D(ci, fi) = 0.0;
    }
    Eigen::VectorXd costs = Eigen::VectorXd::Constant(n + 1, y);
    costs[0] = x;

    LsTrap out{Instance::from_matrix(std::move(costs), n, D), {0}, {}, x, y, n};
    for (int i = 1; i <= n; ++i) out.optimum.push_back(i);
    return out;
  }
  throw Error("gen_ls_counterexample: no admissible n up to 1e6");
}

}  // namespace lmpflp
