#include "lmpflp/dual_witness.hpp"

#include "lmpflp/bounds.hpp"
#include "lmpflp/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace lmpflp {

namespace {

constexpr double kCheckTol = 1e-8;

// Which side of the diagonal x = y a region is clipped to (y is the row coordinate).
enum class Side { Any, Below, Above };

// Constant density on [y0, y1] x [x0, x1], clipped to one side of the diagonal.
struct Piece {
  double y0, y1, x0, x1;
  Side side;
  double value;
};

// Integral over t <= y of clamp(t - x0, 0, w).
double ramp(double y, double x0, double w) {
  if (y <= x0) return 0.0;
  if (y <= x0 + w) return 0.5 * (y - x0) * (y - x0);
  return 0.5 * w * w + w * (y - x0 - w);
}

double clipped_area(double ya, double yb, double xa, double xb, Side side) {
  if (yb <= ya || xb <= xa) return 0.0;
  const double w = xb - xa;
  const double below = ramp(yb, xa, w) - ramp(ya, xa, w);
  switch (side) {
    case Side::Any:
      return (yb - ya) * w;
    case Side::Below:
      return below;
    case Side::Above:
      return (yb - ya) * w - below;
  }
  return 0.0;
}

double cell_integral(const std::vector<Piece>& pieces, double ya, double yb, double xa, double xb) {
  double total = 0.0;
  for (const Piece& p : pieces) {
    if (p.y1 <= p.y0 || p.x1 <= p.x0) continue;
    const double area =
        clipped_area(std::max(ya, p.y0), std::min(yb, p.y1), std::max(xa, p.x0), std::min(xb, p.x1), p.side);
    if (area > 0.0) total += p.value * area;
  }
  return total;
}

// Integral over the cell of 1/(K - y) on {y in [0, z], y <= x <= K}, with K = 1 - z.
double log_band_integral(double z, double ya, double yb, double xa, double xb) {
  const double K = 1.0 - z;
  const double Y0 = std::max(ya, 0.0), Y1 = std::min(yb, z);
  const double P = xa, Q = std::min(xb, K);
  if (Y1 <= Y0 || Q <= P) return 0.0;
  auto log_ratio = [&](double a, double b) { return std::log1p((b - a) / (K - b)); };
  double total = 0.0;
  // Rows entirely left of the cell: full width Q - P.
  const double a1 = Y0, b1 = std::min(Y1, P);
  if (b1 > a1) total += (Q - P) * log_ratio(a1, b1);
  // Rows crossing the cell: width Q - y.
  const double a2 = std::max(Y0, P), b2 = std::min(Y1, Q);
  if (b2 > a2) total += (b2 - a2) + (Q - K) * log_ratio(a2, b2);
  return total;
}

}  // namespace

double continuous_dual_m(double z) {
  const double yp = z * z / (1.0 - z);
  return (std::log(1.0 - z) - std::log(1.0 - 2.0 * z)) + (1.0 - 2.0 * z - yp) / (1.0 - z) +
         yp * (1.0 / (1.0 - z) + 1.0 / (0.5 - z));
}

DualWitness discrete_dual(int q, int steps, double T) {
  if (q < 1) throw InvalidArgument("discrete_dual needs q >= 1");
  if (steps < 0 || 3 * steps > q) throw InvalidArgument("discrete_dual needs z = steps/q in [0, 1/3]");
  if (!(T >= 0.0)) throw InvalidArgument("discrete_dual needs T >= 0");

  DualWitness w;
  w.q = q;
  w.steps = steps;
  w.z = static_cast<double>(steps) / q;
  w.T = T;
  const double z = w.z;
  const double lo = z, hi = static_cast<double>(q - steps) / q;  // z and 1 - z on the grid
  const double yp = z * z / (1.0 - z);

  std::vector<Piece> a_pieces, b_pieces, c_pieces;
  a_pieces.push_back({lo, hi, lo, 1.0, Side::Below, 1.0 / (1.0 - z)});
  if (steps > 0) {
    a_pieces.push_back({hi, 1.0 - yp, 0.0, lo, Side::Any, 1.0 / z});
    a_pieces.push_back({1.0 - yp, 1.0, lo, 0.5, Side::Any, 1.0 / (0.5 - z)});
    b_pieces.push_back({hi - yp, hi, lo, 0.5, Side::Any, 1.0 / (0.5 - z)});
  }
  b_pieces.push_back({lo, hi, 0.0, 1.0, Side::Below, 1.0 / (1.0 - z)});
  c_pieces.push_back({lo, hi, 0.0, 1.0, Side::Above, 1.0 / (1.0 - z)});

  w.A = Eigen::MatrixXd::Zero(q, q);
  w.B = Eigen::MatrixXd::Zero(q, q);
  w.C = Eigen::MatrixXd::Zero(q, q);
  const double h = 1.0 / q;
  for (int i = 0; i < q; ++i) {
    const double ya = i * h, yb = (i + 1) * h;
    for (int j = 0; j < q; ++j) {
      const double xa = j * h, xb = (j + 1) * h;
      if (j < i) {
        w.A(i, j) = q * cell_integral(a_pieces, ya, yb, xa, xb);
        w.B(i, j) = q * cell_integral(b_pieces, ya, yb, xa, xb);
      } else {
        w.C(i, j) = q * (cell_integral(c_pieces, ya, yb, xa, xb) + log_band_integral(z, ya, yb, xa, xb));
        if (i == j) w.C(i, i) += q * cell_integral(a_pieces, ya, yb, xa, xb);
      }
    }
  }

  w.N = Eigen::VectorXd::Zero(q);
  for (int i = 0; i < q; ++i) {
    double n = 0.0;
    for (int j = 0; j < i; ++j) n = std::max(n, w.B(i, j));
    for (int j = i; j < q; ++j) n = std::max(n, w.C(i, j));
    w.N[i] = n;
  }
  w.M = w.N.sum();

  for (int i = 0; i < q; ++i) {
    double row = 0.0;
    for (int j = 0; j < i; ++j) row += w.A(i, j);
    for (int j = i; j < q; ++j) row += w.C(i, j);
    w.alpha_residual = std::max(w.alpha_residual, std::abs(row - 1.0));
  }
  for (int j = 0; j < q; ++j) {
    double col = 0.0;
    for (int i = j + 1; i < q; ++i) col += w.A(i, j) + w.B(i, j);
    for (int i = 0; i < j; ++i) col += w.A(j, i);
    for (int i = 0; i <= j; ++i) col += w.C(i, j);
    w.V = std::max(w.V, col);
  }
  for (int j = 0; j < q; ++j) {
    double prefix = 0.0;
    for (int i = j + 1; i < q; ++i) {
      prefix += w.B(i, j) - w.A(i, j);
      w.r_residual = std::max(w.r_residual, -prefix);
    }
  }
  w.d_residual = std::max(0.0, w.V - jms_dual_v(z));
  w.value = w.V + (std::isfinite(T) ? T * std::max(w.M - 1.0, 0.0) : (w.M > 1.0 + kCheckTol ? kInfinity : 0.0));

  if (w.alpha_residual > kCheckTol || w.d_residual > kCheckTol || w.r_residual > kCheckTol)
    throw NumericalError("discrete_dual: witness violates a dual constraint");
  return w;
}

DualWitness discrete_dual(int q, double z, double T) {
  const double s = z * q;
  const double r = std::round(s);
  if (std::abs(s - r) > 1e-9) throw InvalidArgument("discrete_dual needs z*q to be an integer");
  return discrete_dual(q, static_cast<int>(r), T);
}

Eigen::VectorXd to_lp_dual(const DualWitness& w, const FactorLp& flp) {
  if (flp.variant != FactorVariant::Plain) throw InvalidArgument("to_lp_dual: witness is for the plain variant");
  if (flp.index.q() != w.q) throw InvalidArgument("to_lp_dual: client counts differ");
  const int q = w.q;
  const FactorLpRows& rows = flp.rows;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(flp.model.num_rows());
  y[rows.normalization] = w.V;
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < i; ++j) y[rows.triangle(i, j)] = w.A(i, j);
    for (int j = 0; j < q; ++j) y[rows.linear(i, j)] = j < i ? w.B(i, j) : w.C(i, j);
    y[rows.budget[i]] = w.N[i];
  }
  if (rows.cap >= 0) y[rows.cap] = std::max(w.M - 1.0, 0.0);
  for (int j = 0; j < q; ++j) {
    double prefix = 0.0;
    for (int i = j + 1; i < q; ++i) {
      prefix += w.B(i, j) - w.A(i, j);
      if (i + 1 < q && rows.monotone(j, i) >= 0) y[rows.monotone(j, i)] = prefix;
    }
  }
  return y;
}

}  // namespace lmpflp
