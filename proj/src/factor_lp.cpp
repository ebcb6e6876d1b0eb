#include "lmpflp/factor_lp.hpp"

#include "lmpflp/error.hpp"

#include <algorithm>
#include <cmath>

namespace lmpflp {

const char* to_string(FactorVariant v) { return v == FactorVariant::Plain ? "plain" : "plus"; }

namespace {

// Column j of row i's lambda-sum uses g (r - d) when this returns true, h (alpha - d) otherwise.
bool uses_g(FactorVariant v, int j, int i) { return v == FactorVariant::Plain ? j < i : j <= i; }

void check_args(int q, double T, FactorVariant variant, const FactorLpOptions& opts) {
  if (q < 1) throw InvalidArgument("factor LP needs q >= 1");
  if (variant == FactorVariant::Plus && q == 1)
    throw InvalidArgument("plus variant with q = 1 is unbounded by construction");
  if (!(T >= 0.0)) throw InvalidArgument("T must be nonnegative (or infinite)");
  if (opts.alternative_form && variant != FactorVariant::Plain)
    throw InvalidArgument("the alternative formulation exists only for the plain variant");
}

}  // namespace

void FactorLpPoint::complete_aux() {
  g = Eigen::MatrixXd::Zero(q, q);
  h = Eigen::MatrixXd::Zero(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      if (uses_g(variant, j, i))
        g(i, j) = std::max(r(j, i) - d[j], 0.0);
      else
        h(i, j) = std::max(alpha[i] - d[j], 0.0);
    }
}

FactorLpIndex::FactorLpIndex(int q, FactorVariant variant, const FactorLpOptions& opts) : q_(q) {
  r_ = Eigen::MatrixXi::Constant(q, q, -1);
  g_ = Eigen::MatrixXi::Constant(q, q, -1);
  h_ = Eigen::MatrixXi::Constant(q, q, -1);
  alpha0_ = count_;
  count_ += q;
  d0_ = count_;
  count_ += q;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j <= i; ++j)
      if (j < i || !opts.alternative_form) r_(j, i) = count_++;
  lambda_ = count_++;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      if (uses_g(variant, j, i))
        g_(i, j) = count_++;
      else
        h_(i, j) = count_++;
    }
}

Eigen::VectorXd FactorLpIndex::to_vector(const FactorLpPoint& p) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(count_);
  for (int i = 0; i < q_; ++i) {
    x[alpha(i)] = p.alpha[i];
    x[d(i)] = p.d[i];
  }
  x[lambda_] = p.lambda;
  for (int i = 0; i < q_; ++i)
    for (int j = 0; j < q_; ++j) {
      if (r_(j, i) >= 0) x[r_(j, i)] = p.r(j, i);
      if (g_(i, j) >= 0) x[g_(i, j)] = p.g(i, j);
      if (h_(i, j) >= 0) x[h_(i, j)] = p.h(i, j);
    }
  return x;
}

FactorLpPoint FactorLpIndex::from_vector(const Eigen::VectorXd& x, double T, FactorVariant variant) const {
  FactorLpPoint p;
  p.q = q_;
  p.T = T;
  p.variant = variant;
  p.alpha.resize(q_);
  p.d.resize(q_);
  p.r = Eigen::MatrixXd::Zero(q_, q_);
  p.g = Eigen::MatrixXd::Zero(q_, q_);
  p.h = Eigen::MatrixXd::Zero(q_, q_);
  for (int i = 0; i < q_; ++i) {
    p.alpha[i] = x[alpha(i)];
    p.d[i] = x[d(i)];
  }
  p.lambda = x[lambda_];
  for (int i = 0; i < q_; ++i)
    for (int j = 0; j < q_; ++j) {
      if (r_(j, i) >= 0) p.r(j, i) = x[r_(j, i)];
      if (g_(i, j) >= 0) p.g(i, j) = x[g_(i, j)];
      if (h_(i, j) >= 0) p.h(i, j) = x[h_(i, j)];
    }
  return p;
}

FactorLp build_lp(int q, double T, FactorVariant variant, const FactorLpOptions& opts) {
  check_args(q, T, variant, opts);
  FactorLp out{LpModel{}, FactorLpIndex(q, variant, opts), T, variant, {}};
  LpModel& lp = out.model;
  const FactorLpIndex& ix = out.index;
  FactorLpRows& rows = out.rows;
  rows.monotone = Eigen::MatrixXi::Constant(q, q, -1);
  rows.triangle = Eigen::MatrixXi::Constant(q, q, -1);
  rows.linear = Eigen::MatrixXi::Constant(q, q, -1);
  lp.add_variables(ix.num_vars());
  for (int i = 0; i < q; ++i) lp.set_objective(ix.alpha(i), 1.0);
  lp.set_objective(ix.lambda(), -1.0);

  // Normalization.
  {
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < q; ++i) row.emplace_back(ix.d(i), 1.0);
    rows.normalization = lp.add_row(row, Relation::Equal, 1.0);
  }
  // Clients ordered by alpha.
  for (int i = 0; i + 1 < q; ++i)
    rows.order.push_back(lp.add_row({{ix.alpha(i), 1.0}, {ix.alpha(i + 1), -1.0}}, Relation::LessEq, 0.0));
  // Reconnection distances only shrink.
  for (int j = 0; j < q; ++j)
    for (int i = j; i + 1 < q; ++i) {
      if (ix.r(j, i) < 0) continue;
      rows.monotone(j, i) = lp.add_row({{ix.r(j, i + 1), 1.0}, {ix.r(j, i), -1.0}}, Relation::LessEq, 0.0);
    }
  // Triangle inequality through client j's facility.
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < i; ++j)
      rows.triangle(i, j) = lp.add_row({{ix.alpha(i), 1.0}, {ix.r(j, i), -1.0}, {ix.d(i), -1.0}, {ix.d(j), -1.0}},
                                       Relation::LessEq, 0.0);
  // First connection is no farther than alpha.
  if (opts.alternative_form) {
    for (int j = 0; j + 1 < q; ++j)
      rows.first.push_back(lp.add_row({{ix.r(j, j + 1), 1.0}, {ix.alpha(j), -1.0}}, Relation::LessEq, 0.0));
  } else {
    for (int j = 0; j < q; ++j)
      rows.first.push_back(lp.add_row({{ix.r(j, j), 1.0}, {ix.alpha(j), -1.0}}, Relation::LessEq, 0.0));
  }
  // Linearized positive parts.
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      if (uses_g(variant, j, i))
        rows.linear(i, j) =
            lp.add_row({{ix.r(j, i), 1.0}, {ix.d(j), -1.0}, {ix.g(i, j), -1.0}}, Relation::LessEq, 0.0);
      else
        rows.linear(i, j) =
            lp.add_row({{ix.alpha(i), 1.0}, {ix.d(j), -1.0}, {ix.h(i, j), -1.0}}, Relation::LessEq, 0.0);
    }
  // No facility is overpaid.
  for (int i = 0; i < q; ++i) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < q; ++j) row.emplace_back(uses_g(variant, j, i) ? ix.g(i, j) : ix.h(i, j), 1.0);
    row.emplace_back(ix.lambda(), -1.0);
    rows.budget.push_back(lp.add_row(row, Relation::LessEq, 0.0));
  }
  if (std::isfinite(T)) rows.cap = lp.add_row({{ix.lambda(), 1.0}}, Relation::LessEq, T);
  return out;
}

FactorSolve solve_factor_lp(int q, double T, FactorVariant variant, const FactorLpOptions& opts) {
  FactorLp flp = build_lp(q, T, variant, opts);
  LpResult res = lp_solve(flp.model);
  if (res.status != LpStatus::Optimal)
    throw NumericalError(std::string("factor LP solve ended ") + to_string(res.status));
  FactorSolve out;
  out.value = res.value;
  out.point = flp.index.from_vector(res.primal, T, variant);
  out.iterations = res.iterations;
  return out;
}

FeasibilityReport check_factor_point(const FactorLpPoint& p, double tol, const FactorLpOptions& opts) {
  FactorLp flp = build_lp(p.q, p.T, p.variant, opts);
  return lp_check_point(flp.model, flp.index.to_vector(p), tol);
}

FactorLpPoint lift_solution(const FactorLpPoint& p, int c) {
  if (c < 1) throw InvalidArgument("lift factor must be >= 1");
  if (p.variant != FactorVariant::Plain) throw InvalidArgument("lift_solution expects a plain-variant point");
  const FeasibilityReport rep = check_factor_point(p, 1e-7);
  if (!rep.feasible) throw InvalidArgument("lift_solution: input point is infeasible");

  const int Q = c * p.q;
  FactorLpPoint out;
  out.q = Q;
  out.T = p.T;
  out.variant = FactorVariant::Plain;
  out.alpha.resize(Q);
  out.d.resize(Q);
  out.r = Eigen::MatrixXd::Zero(Q, Q);
  out.lambda = p.lambda;
  for (int i = 0; i < Q; ++i) {
    out.alpha[i] = p.alpha[i / c] / c;
    out.d[i] = p.d[i / c] / c;
  }
  for (int i = 0; i < Q; ++i)
    for (int j = 0; j <= i; ++j) out.r(j, i) = (j / c < i / c ? p.r(j / c, i / c) : p.alpha[j / c]) / c;
  out.complete_aux();
  return out;
}

FactorLpPoint aggregate_solution(const FactorLpPoint& p, int c) {
  if (c < 1) throw InvalidArgument("aggregation factor must be >= 1");
  if (p.variant != FactorVariant::Plain) throw InvalidArgument("aggregate_solution expects a plain-variant point");
  if (p.q % c != 0) throw InvalidArgument("aggregate_solution: q must be divisible by c");
  const FeasibilityReport rep = check_factor_point(p, 1e-7);
  if (!rep.feasible) throw InvalidArgument("aggregate_solution: input point is infeasible");

  const int q = p.q / c;
  if (q < 2) throw InvalidArgument("aggregate_solution: the plus variant needs q >= 2");
  FactorLpPoint out;
  out.q = q;
  out.T = p.T;
  out.variant = FactorVariant::Plus;
  out.alpha = Eigen::VectorXd::Zero(q);
  out.d = Eigen::VectorXd::Zero(q);
  out.r = Eigen::MatrixXd::Zero(q, q);
  out.lambda = p.lambda;
  for (int l = 0; l < p.q; ++l) {
    out.alpha[l / c] += p.alpha[l];
    out.d[l / c] += p.d[l];
  }
  for (int i = 0; i < q; ++i) {
    const int col = (i + 1) * c - 1;  // last client of block i
    for (int j = 0; j <= i; ++j)
      for (int l = j * c; l < (j + 1) * c; ++l) out.r(j, i) += p.r(l, col);
  }
  out.complete_aux();
  return out;
}

}  // namespace lmpflp
