#include "lmpflp/lp.hpp"

#include "lmpflp/error.hpp"
#include "lmpflp/rng.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace lmpflp {

int LpModel::add_variable(double objective) {
  objective_.push_back(objective);
  return num_vars() - 1;
}

int LpModel::add_variables(int count) {
  const int first = num_vars();
  objective_.resize(objective_.size() + count, 0.0);
  return first;
}

int LpModel::add_row(std::vector<std::pair<int, double>> coefs, Relation rel, double rhs) {
  std::map<int, double> merged;
  for (auto [v, c] : coefs) {
    if (v < 0 || v >= num_vars()) throw InvalidArgument("row references variable " + std::to_string(v));
    merged[v] += c;
  }
  LpRow row;
  row.rel = rel;
  row.rhs = rhs;
  for (auto [v, c] : merged)
    if (c != 0.0) row.coefs.emplace_back(v, c);
  rows_.push_back(std::move(row));
  return num_rows() - 1;
}

void LpModel::set_objective(int var, double coef) {
  if (var < 0 || var >= num_vars()) throw InvalidArgument("objective references variable " + std::to_string(var));
  objective_[var] = coef;
}

double LpModel::row_activity(int row, const Eigen::VectorXd& x) const {
  double a = 0.0;
  for (auto [v, c] : rows_[row].coefs) a += c * x[v];
  return a;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kReducedCostTol = 1e-9;
constexpr double kHarrisTol = 1e-9;
constexpr double kDriveOutTol = 1e-7;
constexpr double kDegenerateStep = 1e-12;
constexpr double kPerturbation = 1e-6;

using SpMat = Eigen::SparseMatrix<double>;

// Product-form update of B^-1: column r replaced by w = B^-1 a_q.
struct Eta {
  int r;
  double wr;
  std::vector<std::pair<int, double>> nz;  // off-pivot entries of w
};

class Simplex {
 public:
  Simplex(const LpModel& model, const LpOptions& opts) : model_(model), opts_(opts) { build_standard_form(); }

  LpResult solve();

 private:
  enum class Step { Optimal, Unbounded, Pivoted };
  enum class Phase { Optimal, Unbounded, Infeasible };

  void build_standard_form();
  void refactor();
  Eigen::VectorXd ftran(Eigen::VectorXd v) const;
  Eigen::VectorXd btran(Eigen::VectorXd v) const;
  Eigen::VectorXd column(int j) const;
  Step iterate(bool allow_artificial);
  void pivot(int q, int r, const Eigen::VectorXd& w, double theta);
  bool drive_out_artificials();
  Phase run_phases();
  Phase primal_phase2();
  bool dual_cleanup();
  void reset_basis();
  Eigen::VectorXd basic_costs() const;

  const LpModel& model_;
  LpOptions opts_;

  int m_ = 0;        // rows in standard form
  int n_model_ = 0;  // structural variables
  int n_total_ = 0;  // structural + slack/surplus + artificial
  SpMat A_;
  Eigen::VectorXd b_;
  Eigen::VectorXd cost_;
  std::vector<int> row_of_;       // standard row -> model row
  std::vector<char> negated_;     // per standard row
  std::vector<char> artificial_;  // per column

  std::vector<int> initial_basis_;
  std::vector<int> basis_;  // position -> column
  std::vector<int> pos_;    // column -> position or -1
  Eigen::VectorXd xB_;
  mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;

  long iterations_ = 0;
  int degenerate_run_ = 0;
  bool bland_ = false;
};

void Simplex::build_standard_form() {
  n_model_ = model_.num_vars();
  const auto& rows = model_.rows();

  // Empty rows are checked for consistency and dropped.
  for (int i = 0; i < model_.num_rows(); ++i) {
    const LpRow& row = rows[i];
    if (row.coefs.empty()) {
      const bool ok = row.rel == Relation::LessEq ? row.rhs >= -opts_.tol : std::abs(row.rhs) <= opts_.tol;
      if (!ok) {
        // Keep the row so phase 1 reports infeasibility consistently.
        row_of_.push_back(i);
      }
      continue;
    }
    row_of_.push_back(i);
  }
  m_ = static_cast<int>(row_of_.size());
  negated_.assign(m_, 0);
  b_.resize(m_);

  // Column layout: structural, then one slack/surplus per inequality row, then artificials.
  std::vector<Eigen::Triplet<double>> trip;
  int next = n_model_;
  std::vector<int> slack_of(m_, -1), art_of(m_, -1);
  for (int s = 0; s < m_; ++s) {
    const LpRow& row = rows[row_of_[s]];
    negated_[s] = row.rhs < 0.0;
    b_[s] = negated_[s] ? -row.rhs : row.rhs;
    if (row.rel == Relation::LessEq) slack_of[s] = next++;
  }
  for (int s = 0; s < m_; ++s) {
    const LpRow& row = rows[row_of_[s]];
    if (row.rel == Relation::Equal || negated_[s]) art_of[s] = next++;
  }
  n_total_ = next;
  artificial_.assign(n_total_, 0);

  for (int s = 0; s < m_; ++s) {
    const LpRow& row = rows[row_of_[s]];
    const double sign = negated_[s] ? -1.0 : 1.0;
    for (auto [v, c] : row.coefs) trip.emplace_back(s, v, sign * c);
    if (slack_of[s] >= 0) trip.emplace_back(s, slack_of[s], sign);
    if (art_of[s] >= 0) {
      trip.emplace_back(s, art_of[s], 1.0);
      artificial_[art_of[s]] = 1;
    }
  }
  A_.resize(m_, n_total_);
  A_.setFromTriplets(trip.begin(), trip.end());
  A_.makeCompressed();

  basis_.resize(m_);
  pos_.assign(n_total_, -1);
  for (int s = 0; s < m_; ++s) {
    basis_[s] = art_of[s] >= 0 ? art_of[s] : slack_of[s];
    pos_[basis_[s]] = s;
  }
  initial_basis_ = basis_;
  cost_ = Eigen::VectorXd::Zero(n_total_);
}

void Simplex::refactor() {
  std::vector<Eigen::Triplet<double>> trip;
  for (int s = 0; s < m_; ++s)
    for (SpMat::InnerIterator it(A_, basis_[s]); it; ++it) trip.emplace_back(it.row(), s, it.value());
  SpMat B(m_, m_);
  B.setFromTriplets(trip.begin(), trip.end());
  B.makeCompressed();
  lu_.analyzePattern(B);
  lu_.factorize(B);
  if (lu_.info() != Eigen::Success) throw NumericalError("simplex: basis factorization failed");
  etas_.clear();
  xB_ = lu_.solve(b_);
}

Eigen::VectorXd Simplex::column(int j) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m_);
  for (SpMat::InnerIterator it(A_, j); it; ++it) v[it.row()] = it.value();
  return v;
}

Eigen::VectorXd Simplex::ftran(Eigen::VectorXd v) const {
  Eigen::VectorXd x = lu_.solve(v);
  for (const Eta& e : etas_) {
    const double xr = x[e.r] / e.wr;
    if (xr != 0.0)
      for (auto [i, wi] : e.nz) x[i] -= wi * xr;
    x[e.r] = xr;
  }
  return x;
}

Eigen::VectorXd Simplex::btran(Eigen::VectorXd v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[it->r];
    for (auto [i, wi] : it->nz) s -= v[i] * wi;
    v[it->r] = s / it->wr;
  }
  return lu_.transpose().solve(v);
}

Eigen::VectorXd Simplex::basic_costs() const {
  Eigen::VectorXd cB(m_);
  for (int s = 0; s < m_; ++s) cB[s] = cost_[basis_[s]];
  return cB;
}

void Simplex::pivot(int q, int r, const Eigen::VectorXd& w, double theta) {
  if (theta != 0.0) xB_ -= theta * w;
  xB_[r] = theta;
  Eta e{r, w[r], {}};
  for (int i = 0; i < m_; ++i)
    if (i != r && std::abs(w[i]) > 1e-14) e.nz.emplace_back(i, w[i]);
  etas_.push_back(std::move(e));
  pos_[basis_[r]] = -1;
  basis_[r] = q;
  pos_[q] = r;
  ++iterations_;
  if (static_cast<int>(etas_.size()) >= opts_.refactor_period) refactor();
}

Simplex::Step Simplex::iterate(bool allow_artificial) {
  if (iterations_ >= opts_.max_iterations) throw NumericalError("simplex: iteration limit reached");
  const Eigen::VectorXd y = btran(basic_costs());
  const Eigen::VectorXd d = cost_ - A_.transpose() * y;

  int q = -1;
  double best = kReducedCostTol;
  for (int j = 0; j < n_total_; ++j) {
    if (pos_[j] >= 0 || (artificial_[j] && !allow_artificial)) continue;
    if (d[j] > best) {
      q = j;
      if (bland_) break;
      best = d[j];
    }
  }
  if (q < 0) return Step::Optimal;

  const Eigen::VectorXd w = ftran(column(q));
  int r = -1;
  if (bland_) {
    double min_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i) {
      if (w[i] <= kPivotTol) continue;
      const double ratio = std::max(xB_[i], 0.0) / w[i];
      const double slack = 1e-12 * std::max(1.0, ratio);
      if (r < 0 || ratio < min_ratio - slack) {
        min_ratio = ratio;
        r = i;
      } else if (ratio <= min_ratio + slack && basis_[i] < basis_[r]) {
        min_ratio = std::min(min_ratio, ratio);
        r = i;
      }
    }
  } else {
    // Harris two-pass: bound the step with relaxed feasibility, then take the
    // largest pivot among rows that block within that bound.
    double theta_max = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i)
      if (w[i] > kPivotTol) theta_max = std::min(theta_max, (std::max(xB_[i], 0.0) + kHarrisTol) / w[i]);
    double best_w = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (w[i] <= kPivotTol) continue;
      if (std::max(xB_[i], 0.0) / w[i] <= theta_max && w[i] > best_w) {
        best_w = w[i];
        r = i;
      }
    }
  }
  if (r < 0) return Step::Unbounded;

  const double theta = std::max(xB_[r], 0.0) / w[r];
  if (theta <= kDegenerateStep) {
    if (++degenerate_run_ >= opts_.bland_after) bland_ = true;
  } else {
    degenerate_run_ = 0;
    bland_ = false;
  }
  pivot(q, r, w, theta);
  return Step::Pivoted;
}

// Pivots basic artificials out on any usable structural/slack column. Rows
// where none exists are redundant; their artificial stays basic at zero.
bool Simplex::drive_out_artificials() {
  bool any = false;
  for (int r = 0; r < m_; ++r) {
    if (!artificial_[basis_[r]]) continue;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
    e[r] = 1.0;
    const Eigen::VectorXd rho = btran(e);
    const Eigen::VectorXd alpha = A_.transpose() * rho;
    int q = -1;
    double best = kDriveOutTol;
    for (int j = 0; j < n_total_; ++j) {
      if (pos_[j] >= 0 || artificial_[j]) continue;
      if (std::abs(alpha[j]) > best) {
        best = std::abs(alpha[j]);
        q = j;
      }
    }
    if (q < 0) continue;
    const Eigen::VectorXd w = ftran(column(q));
    pivot(q, r, w, xB_[r] / w[r]);
    any = true;
  }
  return any;
}

Simplex::Phase Simplex::run_phases() {
  refactor();
  bool has_artificial = false;
  for (int s = 0; s < m_; ++s) has_artificial |= artificial_[basis_[s]] != 0;

  if (has_artificial) {
    for (int j = 0; j < n_total_; ++j) cost_[j] = artificial_[j] ? -1.0 : 0.0;
    degenerate_run_ = 0;
    bland_ = false;
    while (iterate(true) == Step::Pivoted) {
    }
    refactor();
    double infeas = 0.0;
    for (int s = 0; s < m_; ++s)
      if (artificial_[basis_[s]]) infeas += std::max(xB_[s], 0.0);
    const double bscale = std::max(1.0, b_.size() ? b_.cwiseAbs().maxCoeff() : 0.0);
    if (infeas > opts_.tol * bscale) return Phase::Infeasible;
    drive_out_artificials();
    refactor();
  }

  cost_.setZero();
  for (int j = 0; j < n_model_; ++j) cost_[j] = model_.objective()[j];
  return primal_phase2();
}

Simplex::Phase Simplex::primal_phase2() {
  degenerate_run_ = 0;
  bland_ = false;
  Step st;
  while ((st = iterate(false)) == Step::Pivoted) {
  }
  return st == Step::Unbounded ? Phase::Unbounded : Phase::Optimal;
}

// Dual simplex pivots that restore primal feasibility of a dual-feasible basis.
// Returns false when some row proves the exact problem infeasible.
bool Simplex::dual_cleanup() {
  for (;;) {
    if (iterations_ >= opts_.max_iterations) throw NumericalError("simplex: iteration limit reached");
    int r = -1;
    double worst = -kHarrisTol;
    for (int i = 0; i < m_; ++i)
      if (xB_[i] < worst) {
        worst = xB_[i];
        r = i;
      }
    if (r < 0) return true;

    const Eigen::VectorXd y = btran(basic_costs());
    const Eigen::VectorXd d = cost_ - A_.transpose() * y;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
    e[r] = 1.0;
    const Eigen::VectorXd alpha = A_.transpose() * btran(e);

    int q = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    double best_mag = 0.0;
    for (int j = 0; j < n_total_; ++j) {
      if (pos_[j] >= 0 || artificial_[j] || alpha[j] >= -kPivotTol) continue;
      const double ratio = std::max(-d[j], 0.0) / -alpha[j];
      if (ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && -alpha[j] > best_mag)) {
        best_ratio = std::min(best_ratio, ratio);
        best_mag = -alpha[j];
        q = j;
      }
    }
    if (q < 0) return false;
    const Eigen::VectorXd w = ftran(column(q));
    pivot(q, r, w, xB_[r] / w[r]);
  }
}

void Simplex::reset_basis() {
  basis_ = initial_basis_;
  std::fill(pos_.begin(), pos_.end(), -1);
  for (int s = 0; s < m_; ++s) pos_[basis_[s]] = s;
}

LpResult Simplex::solve() {
  LpResult res;
  const Eigen::VectorXd b_exact = b_;

  // Degenerate vertices are split by relaxing <= rows with a tiny random rhs
  // shift; the exact rhs is restored afterwards and repaired by dual pivots.
  bool perturbed = false;
  if (opts_.perturb) {
    Rng rng(0x5eed);
    for (int s = 0; s < m_; ++s) {
      if (artificial_[initial_basis_[s]]) continue;
      b_[s] += kPerturbation * (1.0 + rng.uniform()) * std::max(1.0, std::abs(b_[s]));
      perturbed = true;
    }
  }

  Phase ph = run_phases();
  if (perturbed) {
    b_ = b_exact;
    if (ph == Phase::Unbounded) {
      // The relaxed problem may be unbounded only because it is feasible; redo exactly.
      reset_basis();
      ph = run_phases();
    } else if (ph == Phase::Optimal) {
      refactor();
      if (!dual_cleanup()) ph = Phase::Infeasible;
      else ph = primal_phase2();
    }
  }
  res.iterations = iterations_;
  if (ph == Phase::Infeasible) {
    res.status = LpStatus::Infeasible;
    return res;
  }
  if (ph == Phase::Unbounded) {
    res.status = LpStatus::Unbounded;
    return res;
  }

  refactor();
  res.status = LpStatus::Optimal;
  res.primal = Eigen::VectorXd::Zero(n_model_);
  for (int s = 0; s < m_; ++s)
    if (basis_[s] < n_model_) res.primal[basis_[s]] = std::max(xB_[s], 0.0);

  const Eigen::VectorXd y = btran(basic_costs());
  res.dual = Eigen::VectorXd::Zero(model_.num_rows());
  for (int s = 0; s < m_; ++s) res.dual[row_of_[s]] = negated_[s] ? -y[s] : y[s];

  res.value = 0.0;
  for (int j = 0; j < n_model_; ++j) res.value += model_.objective()[j] * res.primal[j];

  const FeasibilityReport rep = lp_check_point(model_, res.primal, opts_.tol);
  res.max_residual = rep.max_residual;
  if (!rep.feasible) {
    std::ostringstream os;
    os << "simplex: claimed optimum violates constraints by " << rep.max_residual;
    throw NumericalError(os.str());
  }
  return res;
}

}  // namespace

LpResult lp_solve(const LpModel& model, const LpOptions& opts) {
  Simplex s(model, opts);
  return s.solve();
}

FeasibilityReport lp_check_point(const LpModel& model, const Eigen::VectorXd& point, double tol) {
  if (point.size() != model.num_vars()) throw InvalidArgument("point length does not match the model");
  FeasibilityReport rep;
  for (int i = 0; i < model.num_rows(); ++i) {
    const LpRow& row = model.rows()[i];
    const double act = model.row_activity(i, point);
    const double resid = row.rel == Relation::LessEq ? act - row.rhs : std::abs(act - row.rhs);
    if (resid > 0.0) rep.max_residual = std::max(rep.max_residual, resid);
    if (resid > tol) rep.violations.emplace_back(i, resid);
  }
  for (int v = 0; v < model.num_vars(); ++v) {
    if (point[v] < 0.0) rep.max_residual = std::max(rep.max_residual, -point[v]);
    if (point[v] < -tol) rep.violations.emplace_back(-1 - v, -point[v]);
  }
  rep.feasible = rep.violations.empty();
  return rep;
}

DualReport lp_check_dual(const LpModel& model, const Eigen::VectorXd& y, double tol) {
  if (y.size() != model.num_rows()) throw InvalidArgument("dual vector length does not match the model");
  DualReport rep;
  Eigen::VectorXd reduced = -Eigen::Map<const Eigen::VectorXd>(model.objective().data(), model.num_vars());
  for (int i = 0; i < model.num_rows(); ++i) {
    const LpRow& row = model.rows()[i];
    rep.objective += row.rhs * y[i];
    if (row.rel == Relation::LessEq && y[i] < 0.0) {
      rep.max_violation = std::max(rep.max_violation, -y[i]);
      if (y[i] < -tol) rep.violations.emplace_back(-1 - i, -y[i]);
    }
    for (auto [v, c] : row.coefs) reduced[v] += c * y[i];
  }
  for (int v = 0; v < model.num_vars(); ++v) {
    if (reduced[v] < 0.0) rep.max_violation = std::max(rep.max_violation, -reduced[v]);
    if (reduced[v] < -tol) rep.violations.emplace_back(v, -reduced[v]);
  }
  rep.feasible = rep.violations.empty();
  return rep;
}

std::string lp_dump(const LpModel& model) {
  std::ostringstream os;
  os.precision(17);
  os << "max";
  for (int j = 0; j < model.num_vars(); ++j)
    if (model.objective()[j] != 0.0) os << " " << j << ":" << model.objective()[j];
  os << "\n";
  for (const LpRow& row : model.rows()) {
    os << (row.rel == Relation::LessEq ? "<=" : "=") << " " << row.rhs;
    for (auto [v, c] : row.coefs) os << " " << v << ":" << c;
    os << "\n";
  }
  return os.str();
}

}  // namespace lmpflp
