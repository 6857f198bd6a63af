#pragma once

#include <Eigen/Dense>

#include "pfsaddle/errors.hpp"

namespace pfsaddle {

/// Row-major so that node m's local vector is the contiguous row m.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// The M stacked local iterates (X, Y); row m of x is x_m, row m of y is y_m.
struct StackedPoint {
  Matrix x;
  Matrix y;

  StackedPoint() = default;
  StackedPoint(Matrix x_block, Matrix y_block);

  static StackedPoint zeros(Eigen::Index nodes, Eigen::Index dim_x, Eigen::Index dim_y);
  /// Every node starts from the same (x0, y0).
  static StackedPoint replicated(Eigen::Index nodes, const Vector& x0, const Vector& y0);

  Eigen::Index num_nodes() const { return x.rows(); }
  Eigen::Index dim_x() const { return x.cols(); }
  Eigen::Index dim_y() const { return y.cols(); }

  bool same_shape(const StackedPoint& other) const;
  bool all_finite() const;

  /// Bitwise equality of every entry.
  bool operator==(const StackedPoint& other) const;

  StackedPoint& operator+=(const StackedPoint& other);
  StackedPoint& operator-=(const StackedPoint& other);
  StackedPoint& operator*=(double s);
};

StackedPoint operator+(StackedPoint a, const StackedPoint& b);
StackedPoint operator-(StackedPoint a, const StackedPoint& b);
StackedPoint operator*(double s, StackedPoint a);

void require_same_shape(const Matrix& a, const Matrix& b, const char* what);
void require_same_shape(const StackedPoint& a, const StackedPoint& b, const char* what);
void require_finite(const Matrix& a, const char* what);

/// Sum of squared row norms; throws invalid_value on NaN/Inf.
double frobenius_sq(const Matrix& a);
/// frobenius_sq(x) + frobenius_sq(y).
double frobenius_sq(const StackedPoint& p);

/// Sum over rows of <a_m, b_m>.
double trace_inner(const Matrix& a, const Matrix& b);
double trace_inner(const StackedPoint& a, const StackedPoint& b);

/// Per-node Euclidean balls for x_m and y_m. `unbounded` turns projection into
/// the identity; only the reference solver uses that.
struct BallDomain {
  Vector center_x;
  Vector center_y;
  double radius_x = 1.0;
  double radius_y = 1.0;
  bool unbounded = false;

  static BallDomain centered(Eigen::Index dim_x, Eigen::Index dim_y, double radius_x, double radius_y);
  static BallDomain whole_space(Eigen::Index dim_x, Eigen::Index dim_y);

  Eigen::Index dim_x() const { return center_x.size(); }
  Eigen::Index dim_y() const { return center_y.size(); }

  /// Omega = 2 sqrt(rx^2 + ry^2); +inf when unbounded.
  double diameter() const;
  /// Largest ||x|| over the x-ball.
  double max_norm_x() const;
  double max_norm_y() const;

  bool contains(const StackedPoint& p, double slack = 1e-12) const;
  void validate() const;
};

/// Row-wise Euclidean projection. Idempotent bit-for-bit.
StackedPoint project(const BallDomain& domain, const StackedPoint& p);
void project_in_place(const BallDomain& domain, StackedPoint& p);

}  // namespace pfsaddle
