#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfsaddle/gossip.hpp"
#include "pfsaddle/stacked.hpp"

namespace pfsaddle {

using VectorRef = Eigen::Ref<const Vector>;
using VectorOut = Eigen::Ref<Vector>;

struct SaddleConstants {
  double smoothness = 0.0;         // L
  double strong_convexity = 0.0;   // mu
};

/// A separable convex-concave objective f(X, Y) = sum_m f_m(x_m, y_m) on a
/// ball domain, with per-node oracles. Immutable after construction; the
/// oracles are pure and may be called concurrently.
///
/// Constants follow the operator reading of smoothness:
///   ||grad f_m(z1) - grad f_m(z2)||^2 <= L^2 ||z1 - z2||^2
///   <g(z1) - g(z2), z1 - z2> >= mu ||z1 - z2||^2   for g = (grad_x f, -grad_y f)
class SaddleProblem {
 public:
  virtual ~SaddleProblem() = default;

  virtual std::string_view family() const = 0;

  /// (grad_x f_m, grad_y f_m) at (x, y).
  virtual void node_gradient(Eigen::Index node, VectorRef x, VectorRef y, VectorOut gx, VectorOut gy) const = 0;
  virtual double node_value(Eigen::Index node, VectorRef x, VectorRef y) const = 0;

  Eigen::Index num_nodes() const { return num_nodes_; }
  Eigen::Index dim_x() const { return dim_x_; }
  Eigen::Index dim_y() const { return dim_y_; }
  const BallDomain& domain() const { return domain_; }
  double smoothness() const { return constants_.smoothness; }
  double strong_convexity() const { return constants_.strong_convexity; }
  const SaddleConstants& constants() const { return constants_; }

  /// Row m = (grad_x f_m, grad_y f_m); one local gradient batch.
  StackedPoint grad_f(const StackedPoint& p) const;
  void grad_f(const StackedPoint& p, StackedPoint& out) const;
  /// sum_m f_m(x_m, y_m).
  double value_f(const StackedPoint& p) const;

  void check_point(const StackedPoint& p, const char* what) const;

 protected:
  SaddleProblem(Eigen::Index num_nodes, Eigen::Index dim_x, Eigen::Index dim_y, BallDomain domain);
  void set_constants(SaddleConstants c) { constants_ = c; }

 private:
  Eigen::Index num_nodes_;
  Eigen::Index dim_x_;
  Eigen::Index dim_y_;
  BallDomain domain_;
  SaddleConstants constants_;
};

using ProblemPtr = std::shared_ptr<const SaddleProblem>;

/// f_m(x, y) = 1/2 x'P x + x'A y - 1/2 y'Q y + a'x - b'y.
struct QuadraticNode {
  Eigen::MatrixXd P;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd A;
  Vector a;
  Vector b;
};

class QuadraticSaddle final : public SaddleProblem {
 public:
  /// `family` is "quadratic" or "bilinear" (P = Q = 0); only used for labels.
  QuadraticSaddle(std::vector<QuadraticNode> nodes, BallDomain domain, std::string family = "quadratic");

  std::string_view family() const override { return family_; }
  void node_gradient(Eigen::Index node, VectorRef x, VectorRef y, VectorOut gx, VectorOut gy) const override;
  double node_value(Eigen::Index node, VectorRef x, VectorRef y) const override;

  const std::vector<QuadraticNode>& nodes() const { return nodes_; }

 private:
  std::vector<QuadraticNode> nodes_;
  std::string family_;
};

/// f_m(x, y) = (1/N) sum_n (<x, a_n + y> - b_n)^2 + beta_x/2 ||x||^2 - beta_y/2 ||y||^2.
struct RobustNode {
  Eigen::MatrixXd features;  // N x n, row n is a_n
  Vector targets;            // N
};

class RobustRegressionSaddle final : public SaddleProblem {
 public:
  /// Concavity margin: beta_y must be at least 2 (max ||x||)^2 + 0.1.
  static constexpr double kConcavityMargin = 0.1;

  RobustRegressionSaddle(std::vector<RobustNode> nodes, double beta_x, double beta_y, BallDomain domain);

  std::string_view family() const override { return "robust_regression"; }
  void node_gradient(Eigen::Index node, VectorRef x, VectorRef y, VectorOut gx, VectorOut gy) const override;
  double node_value(Eigen::Index node, VectorRef x, VectorRef y) const override;

  const std::vector<RobustNode>& nodes() const { return nodes_; }
  double beta_x() const { return beta_x_; }
  double beta_y() const { return beta_y_; }
  /// beta_y - 2 (max ||x||)^2
  double concavity_margin() const;

 private:
  std::vector<RobustNode> nodes_;
  double beta_x_;
  double beta_y_;
};

/// L = max_m ||[[P, A], [A', -Q]]||_2 (the Jacobian of the gradient map),
/// mu = min_m min(lambda_min(P_m), lambda_min(Q_m)).
SaddleConstants estimate_constants(const std::vector<QuadraticNode>& nodes);
/// mu = min(beta_x, beta_y - 2 Rx^2); L bounds the Hessian norm over the domain
/// from the averaged data moments.
SaddleConstants estimate_constants(const std::vector<RobustNode>& nodes, double beta_x, double beta_y,
                                   const BallDomain& domain);
SaddleConstants estimate_constants(const SaddleProblem& problem);

// ---------------------------------------------------------------------------
// Generators. Node data are shared-base + heterogeneity * node-noise.

struct QuadraticGenParams {
  int num_nodes = 4;
  int dim_x = 4;
  int dim_y = 4;
  double mu = 1.0;
  double L = 10.0;
  double heterogeneity = 0.5;
  /// Fraction of (L - mu) given to the P/Q spectra; coupling fills the rest.
  double curvature_share = 0.5;
  double radius_x = 10.0;
  double radius_y = 10.0;
  std::uint64_t seed = 1;
};

/// Strongly-convex-strongly-concave quadratic with exactly the requested mu
/// (rank-deficient curvature on top of mu I) and L (bisection on the coupling
/// scale, relative accuracy ~1e-14).
std::shared_ptr<const QuadraticSaddle> make_quadratic(const QuadraticGenParams& params);

/// P = Q = 0; couplings scaled so max_m ||A_m|| = L; mu = 0.
std::shared_ptr<const QuadraticSaddle> make_bilinear(const QuadraticGenParams& params);

struct RobustGenParams {
  int num_nodes = 4;
  int dim = 3;
  int samples_per_node = 20;
  double beta_x = 0.5;
  double beta_y = 3.0;
  double heterogeneity = 0.5;
  double noise = 0.1;
  double radius_x = 1.0;
  double radius_y = 1.0;
  std::uint64_t seed = 1;
};

std::shared_ptr<const RobustRegressionSaddle> make_robust_regression(const RobustGenParams& params);

// ---------------------------------------------------------------------------

/// Gradient of F = f + phi: x-block grad_X f + lambda W X, y-block grad_Y f - lambda W Y.
StackedPoint grad_full(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda,
                       const StackedPoint& p);

/// F(X, Y) = f(X, Y) + phi(X, Y).
double value_full(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda, const StackedPoint& p);

/// Solution of the first-order conditions of a quadratic instance on the whole
/// space (block linear solve). Empty when the problem is not quadratic or the
/// linear system is singular.
std::optional<StackedPoint> linear_system_solution(const SaddleProblem& problem, const GossipMatrix& gossip,
                                                   double lambda);

struct ReferenceReport {
  StackedPoint solution;
  long iterations = 0;
  double residual_sq = 0.0;
  /// distance^2 to the linear-system solution when that was checked.
  std::optional<double> linear_check_dist_sq;
};

inline constexpr double kReferenceTolerance = 1e-12;

/// High-accuracy saddle point of F by extragradient with step
/// 1/(2 (L + lambda lambda_max)), stopped when the fixed-point residual
/// ||p - proj(p - gamma g(p))||^2 <= tol^2. For quadratics whose linear-system
/// solution lies inside the domain, the result is cross-checked against it
/// (non_convergence error if they disagree beyond 1e-8 in squared distance).
ReferenceReport reference_solution_report(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda,
                                          double tol = kReferenceTolerance);
StackedPoint reference_solution(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda,
                                double tol = kReferenceTolerance);

}  // namespace pfsaddle
