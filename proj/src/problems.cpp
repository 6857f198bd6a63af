#include "pfsaddle/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pfsaddle/kernels.hpp"
#include "pfsaddle/rng.hpp"

namespace pfsaddle {

namespace {

using RowMap = Eigen::Map<Vector>;
using ConstRowMap = Eigen::Map<const Vector>;

Eigen::MatrixXd gaussian(Xoshiro256& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Vector gaussian_vector(Xoshiro256& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

double sym_max_abs_eig(const Eigen::MatrixXd& s) {
  if (s.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  return std::max(std::abs(eig.eigenvalues()[0]), std::abs(eig.eigenvalues()[s.rows() - 1]));
}

double sym_min_eig(const Eigen::MatrixXd& s) {
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[0];
}

Eigen::MatrixXd jacobian_block(const QuadraticNode& n) {
  const Eigen::Index nx = n.P.rows();
  const Eigen::Index ny = n.Q.rows();
  Eigen::MatrixXd j(nx + ny, nx + ny);
  j.topLeftCorner(nx, nx) = n.P;
  j.topRightCorner(nx, ny) = n.A;
  j.bottomLeftCorner(ny, nx) = n.A.transpose();
  j.bottomRightCorner(ny, ny) = -n.Q;
  return j;
}

/// Symmetric PSD with lambda_min = mu exactly (rank-deficient part on top of mu I).
Eigen::MatrixXd curvature(const Eigen::MatrixXd& factor, double mu) {
  Eigen::MatrixXd c = factor * factor.transpose();
  c = 0.5 * (c + c.transpose());
  c.diagonal().array() += mu;
  return c;
}

}  // namespace

SaddleProblem::SaddleProblem(Eigen::Index num_nodes, Eigen::Index dim_x, Eigen::Index dim_y, BallDomain domain)
    : num_nodes_(num_nodes), dim_x_(dim_x), dim_y_(dim_y), domain_(std::move(domain)) {
  if (num_nodes < 1) fail(ErrorKind::invalid_argument, "problem needs at least one node");
  if (dim_x < 1 || dim_y < 1) fail(ErrorKind::invalid_argument, "problem dimensions must be positive");
  if (domain_.dim_x() != dim_x || domain_.dim_y() != dim_y)
    fail(ErrorKind::shape, "domain dimensions do not match the problem");
  domain_.validate();
}

void SaddleProblem::check_point(const StackedPoint& p, const char* what) const {
  if (p.num_nodes() != num_nodes_ || p.dim_x() != dim_x_ || p.dim_y() != dim_y_)
    fail(ErrorKind::shape, std::string(what) + ": point shape does not match the problem");
}

StackedPoint SaddleProblem::grad_f(const StackedPoint& p) const {
  StackedPoint out;
  grad_f(p, out);
  return out;
}

void SaddleProblem::grad_f(const StackedPoint& p, StackedPoint& out) const {
  check_point(p, "grad_f");
  if (!out.same_shape(p)) out = StackedPoint::zeros(num_nodes_, dim_x_, dim_y_);
  kernels::for_each_row(num_nodes_, 8 * (dim_x_ + dim_y_) * (dim_x_ + dim_y_), [&](Eigen::Index m) {
    ConstRowMap x(p.x.row(m).data(), dim_x_);
    ConstRowMap y(p.y.row(m).data(), dim_y_);
    RowMap gx(out.x.row(m).data(), dim_x_);
    RowMap gy(out.y.row(m).data(), dim_y_);
    node_gradient(m, x, y, gx, gy);
  });
}

double SaddleProblem::value_f(const StackedPoint& p) const {
  check_point(p, "value_f");
  double total = 0.0;
  for (Eigen::Index m = 0; m < num_nodes_; ++m) {
    ConstRowMap x(p.x.row(m).data(), dim_x_);
    ConstRowMap y(p.y.row(m).data(), dim_y_);
    total += node_value(m, x, y);
  }
  return total;
}

// --- quadratic ---------------------------------------------------------------

QuadraticSaddle::QuadraticSaddle(std::vector<QuadraticNode> nodes, BallDomain domain, std::string family)
    : SaddleProblem(static_cast<Eigen::Index>(nodes.size()), nodes.empty() ? 0 : nodes.front().P.rows(),
                    nodes.empty() ? 0 : nodes.front().Q.rows(), std::move(domain)),
      nodes_(std::move(nodes)),
      family_(std::move(family)) {
  const Eigen::Index nx = dim_x();
  const Eigen::Index ny = dim_y();
  for (const auto& n : nodes_) {
    if (n.P.rows() != nx || n.P.cols() != nx || n.Q.rows() != ny || n.Q.cols() != ny || n.A.rows() != nx ||
        n.A.cols() != ny || n.a.size() != nx || n.b.size() != ny)
      fail(ErrorKind::shape, "quadratic node blocks have inconsistent shapes");
    if ((n.P - n.P.transpose()).cwiseAbs().maxCoeff() > 0.0)
      fail(ErrorKind::validation, "P_m must be symmetric");
    if ((n.Q - n.Q.transpose()).cwiseAbs().maxCoeff() > 0.0) fail(ErrorKind::validation, "Q_m must be symmetric");
    if (sym_min_eig(n.P) < -1e-12 || sym_min_eig(n.Q) < -1e-12)
      fail(ErrorKind::validation, "P_m and Q_m must be positive semidefinite");
  }
  set_constants(estimate_constants(nodes_));
}

void QuadraticSaddle::node_gradient(Eigen::Index node, VectorRef x, VectorRef y, VectorOut gx, VectorOut gy) const {
  const auto& n = nodes_[static_cast<std::size_t>(node)];
  gx.noalias() = n.P * x;
  gx.noalias() += n.A * y;
  gx += n.a;
  gy.noalias() = n.A.transpose() * x;
  gy.noalias() -= n.Q * y;
  gy -= n.b;
}

double QuadraticSaddle::node_value(Eigen::Index node, VectorRef x, VectorRef y) const {
  const auto& n = nodes_[static_cast<std::size_t>(node)];
  return 0.5 * x.dot(n.P * x) + x.dot(n.A * y) - 0.5 * y.dot(n.Q * y) + n.a.dot(x) - n.b.dot(y);
}

SaddleConstants estimate_constants(const std::vector<QuadraticNode>& nodes) {
  SaddleConstants c;
  c.strong_convexity = std::numeric_limits<double>::infinity();
  for (const auto& n : nodes) {
    c.smoothness = std::max(c.smoothness, sym_max_abs_eig(jacobian_block(n)));
    c.strong_convexity = std::min({c.strong_convexity, sym_min_eig(n.P), sym_min_eig(n.Q)});
  }
  if (nodes.empty()) c.strong_convexity = 0.0;
  c.strong_convexity = std::max(0.0, c.strong_convexity);
  return c;
}

// --- robust regression ---------------------------------------------------------

RobustRegressionSaddle::RobustRegressionSaddle(std::vector<RobustNode> nodes, double beta_x, double beta_y,
                                               BallDomain domain)
    : SaddleProblem(static_cast<Eigen::Index>(nodes.size()), nodes.empty() ? 0 : nodes.front().features.cols(),
                    nodes.empty() ? 0 : nodes.front().features.cols(), std::move(domain)),
      nodes_(std::move(nodes)),
      beta_x_(beta_x),
      beta_y_(beta_y) {
  for (const auto& n : nodes_) {
    if (n.features.rows() < 1 || n.features.cols() != dim_x() || n.targets.size() != n.features.rows())
      fail(ErrorKind::shape, "robust regression node data have inconsistent shapes");
    require_finite(Matrix(n.features), "robust regression features");
  }
  if (!(beta_x >= 0.0) || !(beta_y >= 0.0)) fail(ErrorKind::invalid_argument, "beta_x and beta_y must be >= 0");
  if (this->domain().unbounded) fail(ErrorKind::invalid_argument, "robust regression needs a bounded domain");
  const double rx = this->domain().max_norm_x();
  if (beta_y < 2.0 * rx * rx + kConcavityMargin)
    fail(ErrorKind::invalid_argument, "robust regression is not concave in y on the domain: beta_y = " +
                                          std::to_string(beta_y) + " < 2 Rx^2 + " +
                                          std::to_string(kConcavityMargin) + " = " +
                                          std::to_string(2.0 * rx * rx + kConcavityMargin));
  set_constants(estimate_constants(nodes_, beta_x_, beta_y_, this->domain()));
}

double RobustRegressionSaddle::concavity_margin() const {
  const double rx = domain().max_norm_x();
  return beta_y_ - 2.0 * rx * rx;
}

void RobustRegressionSaddle::node_gradient(Eigen::Index node, VectorRef x, VectorRef y, VectorOut gx,
                                           VectorOut gy) const {
  const auto& n = nodes_[static_cast<std::size_t>(node)];
  const double scale = 2.0 / static_cast<double>(n.features.rows());
  Vector r = n.features * x;
  r.array() += x.dot(y);
  r -= n.targets;
  const double rsum = r.sum();
  gx.noalias() = n.features.transpose() * r;
  gx += rsum * y;
  gx *= scale;
  gx += beta_x_ * x;
  gy = (scale * rsum) * x - beta_y_ * y;
}

double RobustRegressionSaddle::node_value(Eigen::Index node, VectorRef x, VectorRef y) const {
  const auto& n = nodes_[static_cast<std::size_t>(node)];
  Vector r = n.features * x;
  r.array() += x.dot(y);
  r -= n.targets;
  return r.squaredNorm() / static_cast<double>(n.features.rows()) + 0.5 * beta_x_ * x.squaredNorm() -
         0.5 * beta_y_ * y.squaredNorm();
}

SaddleConstants estimate_constants(const std::vector<RobustNode>& nodes, double beta_x, double beta_y,
                                   const BallDomain& domain) {
  const double rx = domain.max_norm_x();
  const double ry = domain.max_norm_y();
  SaddleConstants c;
  c.strong_convexity = std::max(0.0, std::min(beta_x, beta_y - 2.0 * rx * rx));
  for (const auto& n : nodes) {
    const double count = static_cast<double>(n.features.rows());
    const Eigen::MatrixXd second = n.features.transpose() * n.features / count;
    const double s_norm = sym_max_abs_eig(second);
    const double mean_a = (n.features.colwise().sum() / count).norm();
    const double mean_b = std::abs(n.targets.mean());
    // Hessian blocks over the domain:
    //   ||H_xx|| <= 2 (||S|| + 2 |a_bar| Ry + Ry^2) + beta_x
    //   ||H_yy|| <= beta_y                 (2 x x' - beta_y I with beta_y > 2 Rx^2)
    //   ||H_xy|| <= 4 Rx (|a_bar| + Ry) + 2 |b_bar|
    const double hxx = 2.0 * (s_norm + 2.0 * mean_a * ry + ry * ry) + beta_x;
    const double hxy = 4.0 * rx * (mean_a + ry) + 2.0 * mean_b;
    c.smoothness = std::max(c.smoothness, std::max(hxx, beta_y) + hxy);
  }
  return c;
}

SaddleConstants estimate_constants(const SaddleProblem& problem) {
  if (const auto* q = dynamic_cast<const QuadraticSaddle*>(&problem)) return estimate_constants(q->nodes());
  if (const auto* r = dynamic_cast<const RobustRegressionSaddle*>(&problem))
    return estimate_constants(r->nodes(), r->beta_x(), r->beta_y(), r->domain());
  return problem.constants();
}

// --- generators ----------------------------------------------------------------

namespace {

void check_gen(const QuadraticGenParams& p) {
  if (p.num_nodes < 1 || p.dim_x < 1 || p.dim_y < 1) fail(ErrorKind::config, "problem sizes must be positive");
  if (!(p.heterogeneity >= 0.0)) fail(ErrorKind::config, "heterogeneity must be >= 0");
  if (!(p.L > 0.0)) fail(ErrorKind::config, "L must be positive");
  if (!(p.radius_x > 0.0) || !(p.radius_y > 0.0)) fail(ErrorKind::config, "radii must be positive");
}

double max_block_norm(const std::vector<QuadraticNode>& nodes, const std::vector<Eigen::MatrixXd>& couplings,
                      double s) {
  double best = 0.0;
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    QuadraticNode n = nodes[m];
    n.A = s * couplings[m];
    best = std::max(best, sym_max_abs_eig(jacobian_block(n)));
  }
  return best;
}

}  // namespace

std::shared_ptr<const QuadraticSaddle> make_quadratic(const QuadraticGenParams& p) {
  check_gen(p);
  if (!(p.mu > 0.0)) fail(ErrorKind::config, "quadratic family needs mu > 0 (use bilinear for mu = 0)");
  if (p.L < p.mu) fail(ErrorKind::config, "L must be >= mu");
  if (!(p.curvature_share >= 0.0 && p.curvature_share < 1.0))
    fail(ErrorKind::config, "curvature_share must lie in [0, 1)");

  Xoshiro256 rng(p.seed);
  const Eigen::Index nx = p.dim_x;
  const Eigen::Index ny = p.dim_y;
  const double h = p.heterogeneity;

  const Eigen::MatrixXd bx0 = gaussian(rng, nx, nx - 1);
  const Eigen::MatrixXd by0 = gaussian(rng, ny, ny - 1);
  const Eigen::MatrixXd a0 = gaussian(rng, nx, ny);
  const Vector lin_x0 = gaussian_vector(rng, nx);
  const Vector lin_y0 = gaussian_vector(rng, ny);

  std::vector<Eigen::MatrixXd> fx, fy, couplings;
  std::vector<Vector> lin_x, lin_y;
  for (int m = 0; m < p.num_nodes; ++m) {
    fx.push_back(bx0 + h * gaussian(rng, nx, nx - 1));
    fy.push_back(by0 + h * gaussian(rng, ny, ny - 1));
    couplings.push_back(a0 + h * gaussian(rng, nx, ny));
    lin_x.push_back(lin_x0 + h * gaussian_vector(rng, nx));
    lin_y.push_back(lin_y0 + h * gaussian_vector(rng, ny));
  }

  // scale the curvature factors so the largest P/Q eigenvalue is mu + share (L - mu)
  double top = 0.0;
  for (int m = 0; m < p.num_nodes; ++m) {
    top = std::max(top, sym_max_abs_eig(fx[m] * fx[m].transpose()));
    top = std::max(top, sym_max_abs_eig(fy[m] * fy[m].transpose()));
  }
  const double target_top = p.curvature_share * (p.L - p.mu);
  const double fscale = top > 0.0 ? std::sqrt(target_top / top) : 0.0;

  std::vector<QuadraticNode> nodes(static_cast<std::size_t>(p.num_nodes));
  for (int m = 0; m < p.num_nodes; ++m) {
    auto& n = nodes[static_cast<std::size_t>(m)];
    n.P = curvature(fscale * fx[m], p.mu);
    n.Q = curvature(fscale * fy[m], p.mu);
    n.A = Eigen::MatrixXd::Zero(nx, ny);
    n.a = p.mu * lin_x[m];
    n.b = p.mu * lin_y[m];
  }

  // bisection on the coupling scale: the block norm is convex and even in s
  double lo = 0.0;
  double hi = 1.0;
  if (max_block_norm(nodes, couplings, 0.0) < p.L) {
    while (max_block_norm(nodes, couplings, hi) < p.L) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (max_block_norm(nodes, couplings, mid) < p.L ? lo : hi) = mid;
    }
  } else {
    hi = 0.0;
  }
  for (int m = 0; m < p.num_nodes; ++m) nodes[static_cast<std::size_t>(m)].A = hi * couplings[m];

  return std::make_shared<const QuadraticSaddle>(std::move(nodes), BallDomain::centered(nx, ny, p.radius_x, p.radius_y),
                                                 "quadratic");
}

std::shared_ptr<const QuadraticSaddle> make_bilinear(const QuadraticGenParams& p) {
  check_gen(p);
  Xoshiro256 rng(p.seed);
  const Eigen::Index nx = p.dim_x;
  const Eigen::Index ny = p.dim_y;
  const double h = p.heterogeneity;
  const Eigen::MatrixXd a0 = gaussian(rng, nx, ny);
  const Vector lin_x0 = gaussian_vector(rng, nx);
  const Vector lin_y0 = gaussian_vector(rng, ny);

  std::vector<QuadraticNode> nodes(static_cast<std::size_t>(p.num_nodes));
  double top = 0.0;
  for (auto& n : nodes) {
    n.P = Eigen::MatrixXd::Zero(nx, nx);
    n.Q = Eigen::MatrixXd::Zero(ny, ny);
    n.A = a0 + h * gaussian(rng, nx, ny);
    n.a = lin_x0 + h * gaussian_vector(rng, nx);
    n.b = lin_y0 + h * gaussian_vector(rng, ny);
    top = std::max(top, sym_max_abs_eig(jacobian_block(n)));
  }
  const double s = top > 0.0 ? p.L / top : 0.0;
  for (auto& n : nodes) {
    n.A *= s;
    n.a *= 0.5 * p.L;
    n.b *= 0.5 * p.L;
  }
  return std::make_shared<const QuadraticSaddle>(std::move(nodes), BallDomain::centered(nx, ny, p.radius_x, p.radius_y),
                                                 "bilinear");
}

std::shared_ptr<const RobustRegressionSaddle> make_robust_regression(const RobustGenParams& p) {
  if (p.num_nodes < 1 || p.dim < 1 || p.samples_per_node < 1) fail(ErrorKind::config, "problem sizes must be positive");
  if (!(p.heterogeneity >= 0.0) || !(p.noise >= 0.0)) fail(ErrorKind::config, "heterogeneity and noise must be >= 0");
  Xoshiro256 rng(p.seed);
  const Eigen::Index n = p.dim;
  const Vector w0 = gaussian_vector(rng, n);
  std::vector<RobustNode> nodes(static_cast<std::size_t>(p.num_nodes));
  for (auto& node : nodes) {
    const Vector w_node = w0 + p.heterogeneity * gaussian_vector(rng, n);
    const Vector shift = p.heterogeneity * gaussian_vector(rng, n);
    node.features.resize(p.samples_per_node, n);
    node.targets.resize(p.samples_per_node);
    for (int s = 0; s < p.samples_per_node; ++s) {
      const Vector a = shift + gaussian_vector(rng, n) / std::sqrt(static_cast<double>(n));
      node.features.row(s) = a.transpose();
      node.targets[s] = a.dot(w_node) + p.noise * rng.normal();
    }
  }
  return std::make_shared<const RobustRegressionSaddle>(std::move(nodes), p.beta_x, p.beta_y,
                                                        BallDomain::centered(n, n, p.radius_x, p.radius_y));
}

// --- full operator ----------------------------------------------------------------

StackedPoint grad_full(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda,
                       const StackedPoint& p) {
  StackedPoint g = problem.grad_f(p);
  if (lambda != 0.0) {
    const StackedPoint pen = penalty_grad(gossip, lambda, p);
    g += pen;
  } else if (p.num_nodes() != gossip.size()) {
    fail(ErrorKind::shape, "grad_full: point rows do not match W");
  }
  return g;
}

double value_full(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda, const StackedPoint& p) {
  return problem.value_f(p) + penalty_value(gossip, lambda, p);
}

std::optional<StackedPoint> linear_system_solution(const SaddleProblem& problem, const GossipMatrix& gossip,
                                                   double lambda) {
  const auto* quad = dynamic_cast<const QuadraticSaddle*>(&problem);
  if (quad == nullptr) return std::nullopt;
  const Eigen::Index M = problem.num_nodes();
  const Eigen::Index nx = problem.dim_x();
  const Eigen::Index ny = problem.dim_y();
  if (gossip.size() != M) fail(ErrorKind::shape, "linear_system_solution: W does not match the node count");
  const Eigen::Index stride = nx + ny;
  const Eigen::Index total = M * stride;

  // unknowns [x_1 y_1 x_2 y_2 ...]; rows: grad_x F = 0 then grad_y F = 0 per node
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(total, total);
  Vector rhs(total);
  const Matrix& w = gossip.dense();
  for (Eigen::Index m = 0; m < M; ++m) {
    const auto& n = quad->nodes()[static_cast<std::size_t>(m)];
    const Eigen::Index r = m * stride;
    K.block(r, r, nx, nx) += n.P;
    K.block(r, r + nx, nx, ny) += n.A;
    K.block(r + nx, r, ny, nx) += n.A.transpose();
    K.block(r + nx, r + nx, ny, ny) -= n.Q;
    for (Eigen::Index i = 0; i < M; ++i) {
      if (w(m, i) == 0.0) continue;
      const Eigen::Index c = i * stride;
      K.block(r, c, nx, nx).diagonal().array() += lambda * w(m, i);
      K.block(r + nx, c + nx, ny, ny).diagonal().array() -= lambda * w(m, i);
    }
    rhs.segment(r, nx) = -n.a;
    rhs.segment(r + nx, ny) = n.b;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  if (!lu.isInvertible()) return std::nullopt;
  const Vector z = lu.solve(rhs);

  StackedPoint out = StackedPoint::zeros(M, nx, ny);
  for (Eigen::Index m = 0; m < M; ++m) {
    out.x.row(m) = z.segment(m * stride, nx).transpose();
    out.y.row(m) = z.segment(m * stride + nx, ny).transpose();
  }
  return out;
}

}  // namespace pfsaddle
