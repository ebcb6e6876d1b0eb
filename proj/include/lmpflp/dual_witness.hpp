#pragma once

#include "lmpflp/factor_lp.hpp"

#include <Eigen/Dense>

namespace lmpflp {

// Explicit dual solution of the plain factor-revealing LP at q clients, built
// by integrating a piecewise solution of the continuous dual over 1/q squares.
// Indices are 0-based; A and B live strictly below the diagonal (j < i), C on
// and above it (i <= j).
struct DualWitness {
  int q = 0;
  int steps = 0;  // z = steps / q
  double z = 0.0;
  double T = kInfinity;
  Eigen::MatrixXd A, B, C;
  Eigen::VectorXd N;
  double M = 0.0;
  double V = 0.0;  // largest column sum, the tight value for these A, B, C
  double value = 0.0;

  // Worst violation of each constraint family (0 when satisfied).
  double alpha_residual = 0.0;  // |row sum - 1|
  double d_residual = 0.0;      // V above the continuous V(z)
  double r_residual = 0.0;      // prefix sums of A above those of B
};

// Throws InvalidArgument unless 0 <= steps <= q/3, and NumericalError when the
// constructed witness violates a dual constraint by more than 1e-8.
DualWitness discrete_dual(int q, int steps, double T);
// Same, with z = steps / q given as a real; z*q must be integral to 1e-9.
DualWitness discrete_dual(int q, double z, double T);

// M of the continuous solution, from its three N_y pieces.
double continuous_dual_m(double z);

// Multipliers for every row of flp.model (plain variant, either form).
Eigen::VectorXd to_lp_dual(const DualWitness& w, const FactorLp& flp);

}  // namespace lmpflp
