#pragma once

#include "lmpflp/lp.hpp"

#include <Eigen/Dense>

#include <limits>

namespace lmpflp {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class FactorVariant { Plain, Plus };

const char* to_string(FactorVariant v);

// Formulation switches for build_lp. The alternative form drops r_{j,j} and
// bounds r_{j,j+1} by alpha_j instead; it only exists for the plain variant.
struct FactorLpOptions {
  bool alternative_form = false;
};

// A point of the factor-revealing LP. Indices are 0-based: r(j, i) for j <= i,
// g(i, j) and h(i, j) follow the row/column naming of the constraints.
struct FactorLpPoint {
  int q = 0;
  double T = kInfinity;
  FactorVariant variant = FactorVariant::Plain;
  Eigen::VectorXd alpha;
  Eigen::VectorXd d;
  Eigen::MatrixXd r;
  double lambda = 0.0;
  Eigen::MatrixXd g;
  Eigen::MatrixXd h;

  double objective() const { return alpha.sum() - lambda; }
  // Sets g and h to the smallest values the linearization admits.
  void complete_aux();
};

// Maps LP columns to point coordinates; -1 marks an absent variable.
class FactorLpIndex {
 public:
  FactorLpIndex(int q, FactorVariant variant, const FactorLpOptions& opts);

  int q() const { return q_; }
  int num_vars() const { return count_; }
  int alpha(int i) const { return alpha0_ + i; }
  int d(int i) const { return d0_ + i; }
  int r(int j, int i) const { return r_(j, i); }
  int lambda() const { return lambda_; }
  int g(int i, int j) const { return g_(i, j); }
  int h(int i, int j) const { return h_(i, j); }

  Eigen::VectorXd to_vector(const FactorLpPoint& p) const;
  FactorLpPoint from_vector(const Eigen::VectorXd& x, double T, FactorVariant variant) const;

 private:
  int q_;
  int count_ = 0;
  int alpha0_ = 0, d0_ = 0, lambda_ = 0;
  Eigen::MatrixXi r_, g_, h_;
};

// Row ids of each constraint family; -1 where a row does not exist.
struct FactorLpRows {
  int normalization = -1;
  std::vector<int> order;    // alpha_i <= alpha_{i+1}
  Eigen::MatrixXi monotone;  // (j, i): r_{j,i+1} <= r_{j,i}
  Eigen::MatrixXi triangle;  // (i, j), j < i
  std::vector<int> first;    // r_{j,j} <= alpha_j, or r_{j,j+1} <= alpha_j in the alternative form
  Eigen::MatrixXi linear;    // (i, j): the g or h linearization
  std::vector<int> budget;   // lambda sum of client i
  int cap = -1;              // lambda <= T
};

struct FactorLp {
  LpModel model;
  FactorLpIndex index;
  double T;
  FactorVariant variant;
  FactorLpRows rows;
};

FactorLp build_lp(int q, double T, FactorVariant variant, const FactorLpOptions& opts = {});

struct FactorSolve {
  double value = 0.0;
  FactorLpPoint point;
  long iterations = 0;
};

FactorSolve solve_factor_lp(int q, double T, FactorVariant variant, const FactorLpOptions& opts = {});
inline double opt_jms(int q, double T) { return solve_factor_lp(q, T, FactorVariant::Plain).value; }
inline double opt_plus(int q, double T) { return solve_factor_lp(q, T, FactorVariant::Plus).value; }

// Feasibility of a point in the model it claims to belong to.
FeasibilityReport check_factor_point(const FactorLpPoint& p, double tol, const FactorLpOptions& opts = {});

// Block replication of a plain point at q into a plain point at c*q.
FactorLpPoint lift_solution(const FactorLpPoint& p, int c);
// Block sums of a plain point at c*q into a plus point at q.
FactorLpPoint aggregate_solution(const FactorLpPoint& p, int c);

}  // namespace lmpflp
