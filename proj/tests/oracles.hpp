#pragma once

// Independent reference computations for the unit tests. Deliberately plain:
// scalar loops, dense solvers, no library kernels.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "pfsaddle/gossip.hpp"
#include "pfsaddle/problems.hpp"
#include "pfsaddle/rng.hpp"
#include "pfsaddle/stacked.hpp"

namespace oracle {

using pfsaddle::Matrix;
using pfsaddle::StackedPoint;
using pfsaddle::Vector;

inline double sum_sq(const Matrix& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return s;
}

inline double sum_prod(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) s += a(i, j) * b(i, j);
  return s;
}

/// center + radius (row - center) / ||row - center|| for rows outside, scalar arithmetic.
inline Matrix ball_projection(const Matrix& x, const Vector& center, double radius) {
  Matrix out = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double d2 = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) d2 += (x(i, j) - center[j]) * (x(i, j) - center[j]);
    const double d = std::sqrt(d2);
    if (d <= radius) continue;
    for (Eigen::Index j = 0; j < x.cols(); ++j) out(i, j) = center[j] + radius * (x(i, j) - center[j]) / d;
  }
  return out;
}

inline Eigen::VectorXd dense_eigenvalues(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

inline double dense_lambda_max(const Eigen::MatrixXd& w) { return dense_eigenvalues(w).maxCoeff(); }

/// sum_m ||a_m - mean||^2 by explicit mean then sum.
inline double spread(const Matrix& a) {
  std::vector<double> mean(static_cast<std::size_t>(a.cols()), 0.0);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) mean[static_cast<std::size_t>(j)] += a(i, j);
  for (auto& v : mean) v /= static_cast<double>(a.rows());
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double d = a(i, j) - mean[static_cast<std::size_t>(j)];
      s += d * d;
    }
  return s;
}

/// Centralized mixing regularizer (lambda / 2M) sum_m ||x_m - xbar||^2.
inline double centralized_regularizer(const Matrix& x, double lambda) {
  return lambda / (2.0 * static_cast<double>(x.rows())) * spread(x);
}

/// Central finite differences of F = value_f + penalty_value, entry by entry.
inline StackedPoint finite_difference_gradient(const pfsaddle::SaddleProblem& problem,
                                               const pfsaddle::GossipMatrix& gossip, double lambda,
                                               const StackedPoint& p, double h = 1e-5) {
  StackedPoint g = StackedPoint::zeros(p.num_nodes(), p.dim_x(), p.dim_y());
  auto F = [&](const StackedPoint& q) { return pfsaddle::value_full(problem, gossip, lambda, q); };
  for (Eigen::Index i = 0; i < p.num_nodes(); ++i) {
    for (Eigen::Index j = 0; j < p.dim_x(); ++j) {
      StackedPoint a = p, b = p;
      a.x(i, j) += h;
      b.x(i, j) -= h;
      g.x(i, j) = (F(a) - F(b)) / (2.0 * h);
    }
    for (Eigen::Index j = 0; j < p.dim_y(); ++j) {
      StackedPoint a = p, b = p;
      a.y(i, j) += h;
      b.y(i, j) -= h;
      g.y(i, j) = (F(a) - F(b)) / (2.0 * h);
    }
  }
  return g;
}

inline Matrix random_matrix(pfsaddle::Xoshiro256& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  return m;
}

inline StackedPoint random_point(pfsaddle::Xoshiro256& rng, Eigen::Index M, Eigen::Index nx, Eigen::Index ny,
                                 double scale = 1.0) {
  return StackedPoint(random_matrix(rng, M, nx, scale), random_matrix(rng, M, ny, scale));
}

/// Uniform-direction point of each row inside the balls (radius fraction in [0, frac]).
inline StackedPoint random_feasible(pfsaddle::Xoshiro256& rng, const pfsaddle::BallDomain& d, Eigen::Index M,
                                    double frac = 0.9) {
  StackedPoint p = random_point(rng, M, d.dim_x(), d.dim_y());
  for (Eigen::Index m = 0; m < M; ++m) {
    p.x.row(m) *= frac * d.radius_x * rng.uniform() / p.x.row(m).norm();
    p.y.row(m) *= frac * d.radius_y * rng.uniform() / p.y.row(m).norm();
    p.x.row(m) += d.center_x.transpose();
    p.y.row(m) += d.center_y.transpose();
  }
  return p;
}

/// Spectral norm of the block [[P, A], [A', -Q]] by SVD.
inline double block_spectral_norm(const pfsaddle::QuadraticNode& n) {
  const Eigen::Index nx = n.P.rows(), ny = n.Q.rows();
  Eigen::MatrixXd j(nx + ny, nx + ny);
  j << n.P, n.A, n.A.transpose(), -n.Q;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  return svd.singularValues()(0);
}

/// Saddle of one quadratic node alone on the whole space: solve
/// [[P, A], [A', -Q]] [x; y] = [-a; b].
inline std::pair<Vector, Vector> node_saddle(const pfsaddle::QuadraticNode& n) {
  const Eigen::Index nx = n.P.rows(), ny = n.Q.rows();
  Eigen::MatrixXd k(nx + ny, nx + ny);
  k << n.P, n.A, n.A.transpose(), -n.Q;
  Vector rhs(nx + ny);
  rhs << -n.a, n.b;
  const Vector z = k.fullPivLu().solve(rhs);
  return {z.head(nx), z.tail(ny)};
}

/// Exact solution of the node prox problem on the whole space:
///   gamma (P x + A y + a) + x - vx = 0,  gamma (A'x - Q y - b) - (y - vy) = 0.
inline std::pair<Vector, Vector> prox_solution(const pfsaddle::QuadraticNode& n, const Vector& vx, const Vector& vy,
                                               double gamma) {
  const Eigen::Index nx = n.P.rows(), ny = n.Q.rows();
  Eigen::MatrixXd k(nx + ny, nx + ny);
  k << gamma * n.P + Eigen::MatrixXd::Identity(nx, nx), gamma * n.A, gamma * n.A.transpose(),
      -(gamma * n.Q + Eigen::MatrixXd::Identity(ny, ny));
  Vector rhs(nx + ny);
  rhs << vx - gamma * n.a, gamma * n.b - vy;
  const Vector z = k.fullPivLu().solve(rhs);
  return {z.head(nx), z.tail(ny)};
}

/// Median of a copy, by full sort.
inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline bool rel_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

/// Max relative entry error between two stacked points, scaled by the larger norm.
inline double rel_error(const StackedPoint& a, const StackedPoint& b) {
  const double diff = std::sqrt(sum_sq(a.x - b.x) + sum_sq(a.y - b.y));
  const double scale = std::max(std::sqrt(sum_sq(a.x) + sum_sq(a.y)), std::sqrt(sum_sq(b.x) + sum_sq(b.y)));
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace oracle
