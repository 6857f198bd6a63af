#include "pfsaddle/gossip.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pfsaddle/rng.hpp"

namespace pfsaddle {

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::complete: return "complete";
    case TopologyKind::ring: return "ring";
    case TopologyKind::star: return "star";
    case TopologyKind::path: return "path";
    case TopologyKind::grid2d: return "grid2d";
    case TopologyKind::erdos_renyi: return "erdos_renyi";
  }
  return "unknown";
}

TopologyKind parse_topology_kind(std::string_view name) {
  for (auto kind : {TopologyKind::complete, TopologyKind::ring, TopologyKind::star, TopologyKind::path,
                    TopologyKind::grid2d, TopologyKind::erdos_renyi}) {
    if (to_string(kind) == name) return kind;
  }
  fail(ErrorKind::config, "unknown topology kind '" + std::string(name) + "'");
}

namespace {

constexpr int kErdosRenyiRetries = 100;

void add_edge(std::set<Edge>& edges, int a, int b) {
  if (a == b) return;
  edges.emplace(std::min(a, b), std::max(a, b));
}

std::vector<Edge> deterministic_edges(const Topology& t) {
  const int n = t.num_nodes;
  std::set<Edge> edges;
  switch (t.kind) {
    case TopologyKind::complete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) add_edge(edges, i, j);
      break;
    case TopologyKind::ring:
      for (int i = 0; i < n; ++i) add_edge(edges, i, (i + 1) % n);
      break;
    case TopologyKind::star:
      for (int i = 1; i < n; ++i) add_edge(edges, 0, i);
      break;
    case TopologyKind::path:
      for (int i = 0; i + 1 < n; ++i) add_edge(edges, i, i + 1);
      break;
    case TopologyKind::grid2d: {
      // rows = largest divisor of n not above sqrt(n); primes become a 1 x n path
      int rows = 1;
      for (int r = 1; r * r <= n; ++r)
        if (n % r == 0) rows = r;
      const int cols = n / rows;
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
          const int id = r * cols + c;
          if (c + 1 < cols) add_edge(edges, id, id + 1);
          if (r + 1 < rows) add_edge(edges, id, id + cols);
        }
      }
      break;
    }
    case TopologyKind::erdos_renyi:
      break;
  }
  return {edges.begin(), edges.end()};
}

}  // namespace

bool is_connected(int num_nodes, const std::vector<Edge>& edges) {
  if (num_nodes <= 1) return true;
  std::vector<int> parent(static_cast<std::size_t>(num_nodes));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    return v;
  };
  int components = num_nodes;
  for (const auto& [a, b] : edges) {
    const int ra = find(a);
    const int rb = find(b);
    if (ra != rb) {
      parent[static_cast<std::size_t>(ra)] = rb;
      --components;
    }
  }
  return components == 1;
}

std::vector<Edge> build_edges(const Topology& t) {
  if (t.num_nodes < 2) fail(ErrorKind::topology, "a topology needs at least 2 nodes");
  if (t.kind != TopologyKind::erdos_renyi) return deterministic_edges(t);

  if (!(t.edge_prob > 0.0 && t.edge_prob <= 1.0))
    fail(ErrorKind::topology, "erdos_renyi edge_prob must lie in (0, 1]");
  Xoshiro256 rng(t.seed);
  for (int attempt = 0; attempt < kErdosRenyiRetries; ++attempt) {
    std::vector<Edge> edges;
    for (int i = 0; i < t.num_nodes; ++i)
      for (int j = i + 1; j < t.num_nodes; ++j)
        if (rng.uniform() < t.edge_prob) edges.emplace_back(i, j);
    if (is_connected(t.num_nodes, edges)) return edges;
  }
  fail(ErrorKind::topology, "erdos_renyi graph with M=" + std::to_string(t.num_nodes) + ", p=" +
                                std::to_string(t.edge_prob) + " still disconnected after " +
                                std::to_string(kErdosRenyiRetries) + " samples");
}

GossipMatrix::GossipMatrix(Matrix w, std::vector<Edge> edges, double lambda_max)
    : dense_(std::move(w)), sparse_(kernels::CsrMatrix::from_dense(dense_)), edges_(std::move(edges)),
      lambda_max_(lambda_max) {}

GossipMatrix GossipMatrix::from_dense(Matrix w, std::vector<Edge> edges) {
  if (w.rows() != w.cols() || w.rows() < 1) fail(ErrorKind::validation, "gossip matrix must be square");
  require_finite(w, "gossip matrix");
  const Eigen::Index n = w.rows();
  std::set<Edge> allowed(edges.begin(), edges.end());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (w(i, j) != w(j, i)) fail(ErrorKind::validation, "gossip matrix is not symmetric");
      if (i != j && w(i, j) != 0.0 &&
          !allowed.count({static_cast<int>(std::min(i, j)), static_cast<int>(std::max(i, j))}))
        fail(ErrorKind::validation, "gossip matrix has a nonzero off the edge set");
    }
  }
  const double lmax = power_lambda_max(w);
  return GossipMatrix(std::move(w), std::move(edges), lmax);
}

Matrix GossipMatrix::apply(const Matrix& x, double scale) const {
  Matrix out;
  apply(x, scale, out);
  return out;
}

void GossipMatrix::apply(const Matrix& x, double scale, Matrix& out) const {
  kernels::gossip_product(sparse_, x, scale, out);
}

GossipMatrix laplacian(const Topology& topology) {
  auto edges = build_edges(topology);
  const int n = topology.num_nodes;
  Matrix w = Matrix::Zero(n, n);
  for (const auto& [a, b] : edges) {
    w(a, b) = -1.0;
    w(b, a) = -1.0;
    w(a, a) += 1.0;
    w(b, b) += 1.0;
  }
  return GossipMatrix::from_dense(std::move(w), std::move(edges));
}

GossipMatrix scale(const GossipMatrix& g, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) fail(ErrorKind::invalid_argument, "gossip scale factor must be positive");
  if (c == 1.0) return g;
  return GossipMatrix::from_dense(c * g.dense(), g.edges());
}

double power_lambda_max(const Matrix& w) {
  if (w.rows() != w.cols()) fail(ErrorKind::validation, "power iteration needs a square matrix");
  require_finite(w, "power iteration");
  const Eigen::Index n = w.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (w(i, j) != w(j, i)) fail(ErrorKind::validation, "power iteration needs a symmetric matrix");
  if (n == 0) return 0.0;

  const double log_n = n > 1 ? std::log(static_cast<double>(n)) : 0.0;
  const long cap = static_cast<long>(std::ceil(10.0 * static_cast<double>(n) * log_n)) + 100;

  // fixed pseudo-random start: never orthogonal to the top eigenvector in practice
  Xoshiro256 rng(0x5eed'1a3b'dULL);
  Matrix v(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) v(i, 0) = rng.uniform() + 0.5;
  v.normalize();

  // gossip matrices are sparse; the product dominates the cost on large graphs
  const kernels::CsrMatrix csr = kernels::CsrMatrix::from_dense(w);
  Matrix wv;
  kernels::gossip_product(csr, v, 1.0, wv);
  double rho = v.col(0).dot(wv.col(0));
  for (long it = 0; it < cap; ++it) {
    const double residual = (wv - rho * v).norm();
    if (residual <= 1e-12 * std::abs(rho)) break;
    const double norm = wv.norm();
    if (norm == 0.0) return 0.0;
    v = wv / norm;
    kernels::gossip_product(csr, v, 1.0, wv);
    rho = v.col(0).dot(wv.col(0));
  }
  return rho;
}

GossipReport validate(const GossipMatrix& g) {
  GossipReport report;
  const Matrix& w = g.dense();
  const Eigen::Index n = w.rows();

  report.symmetric = true;
  for (Eigen::Index i = 0; i < n && report.symmetric; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (w(i, j) != w(j, i)) {
        report.symmetric = false;
        break;
      }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(w), Eigen::EigenvaluesOnly);
  const Vector& values = eig.eigenvalues();  // ascending
  report.min_eigenvalue = values[0];
  report.second_eigenvalue = n > 1 ? values[1] : 0.0;
  report.positive_semidefinite = report.min_eigenvalue >= -1e-10;

  report.max_abs_row_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) report.max_abs_row_sum = std::max(report.max_abs_row_sum, std::abs(w.row(i).sum()));
  report.constant_kernel = report.max_abs_row_sum <= 1e-12 && report.second_eigenvalue > 0.0;

  std::set<Edge> allowed(g.edges().begin(), g.edges().end());
  report.sparsity_matches = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const bool edge = allowed.count({static_cast<int>(i), static_cast<int>(j)}) > 0;
      // an edge with weight 0 is allowed by the condition; a weight off the edges is not
      if (w(i, j) != 0.0 && !edge) report.sparsity_matches = false;
    }
  }
  return report;
}

double penalty_value(const GossipMatrix& g, double lambda, const StackedPoint& p) {
  if (p.num_nodes() != g.size()) fail(ErrorKind::shape, "penalty: point rows do not match W");
  if (lambda == 0.0) return 0.0;
  const Matrix wx = g.apply(p.x);
  const Matrix wy = g.apply(p.y);
  return 0.5 * lambda * (trace_inner(p.x, wx) - trace_inner(p.y, wy));
}

StackedPoint penalty_grad(const GossipMatrix& g, double lambda, const StackedPoint& p) {
  if (p.num_nodes() != g.size()) fail(ErrorKind::shape, "penalty gradient: point rows do not match W");
  StackedPoint out;
  g.apply(p.x, lambda, out.x);
  g.apply(p.y, -lambda, out.y);
  return out;
}

}  // namespace pfsaddle
