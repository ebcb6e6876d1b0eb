#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace lmpflp {

enum class Relation { LessEq, Equal };

struct LpRow {
  std::vector<std::pair<int, double>> coefs;  // (variable, coefficient)
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
};

// max c'x subject to rows, x >= 0.
class LpModel {
 public:
  int add_variable(double objective = 0.0);
  int add_variables(int count);
  // Duplicate variable indices within one row are merged.
  int add_row(std::vector<std::pair<int, double>> coefs, Relation rel, double rhs);
  void set_objective(int var, double coef);

  int num_vars() const { return static_cast<int>(objective_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<LpRow>& rows() const { return rows_; }
  const std::vector<double>& objective() const { return objective_; }

  double row_activity(int row, const Eigen::VectorXd& x) const;

 private:
  std::vector<double> objective_;
  std::vector<LpRow> rows_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  Eigen::VectorXd primal;
  Eigen::VectorXd dual;  // one multiplier per row; >= 0 for <= rows
  long iterations = 0;
  double max_residual = 0.0;
};

struct LpOptions {
  double tol = 1e-7;          // acceptance bound on the final primal residual
  int refactor_period = 100;  // pivots between fresh LU factorizations
  int bland_after = 50;       // consecutive degenerate pivots before Bland's rule
  long max_iterations = 5'000'000;
  bool perturb = true;        // shift <= right-hand sides while pivoting, then repair
};

LpResult lp_solve(const LpModel& model, const LpOptions& opts = {});
inline LpResult lp_solve(const LpModel& model, double tol) {
  LpOptions o;
  o.tol = tol;
  return lp_solve(model, o);
}

struct FeasibilityReport {
  bool feasible = true;
  double max_residual = 0.0;  // max over row violations and negative entries
  std::vector<std::pair<int, double>> violations;  // (row, residual); negative variables use row -1 - var
};

FeasibilityReport lp_check_point(const LpModel& model, const Eigen::VectorXd& point, double tol);

// Dual feasibility of y for max c'x, Ax <= b, x >= 0: y_i >= 0 on <= rows and
// A'y >= c column by column. objective is b'y, an upper bound on the primal
// optimum whenever the check passes.
struct DualReport {
  bool feasible = true;
  double max_violation = 0.0;
  double objective = 0.0;
  std::vector<std::pair<int, double>> violations;  // (column, shortfall); negative multipliers use -1 - row
};

DualReport lp_check_dual(const LpModel& model, const Eigen::VectorXd& y, double tol);

// One constraint per line: "<=|= rhs idx:coef ...", preceded by "max idx:coef ...".
std::string lp_dump(const LpModel& model);

}  // namespace lmpflp
