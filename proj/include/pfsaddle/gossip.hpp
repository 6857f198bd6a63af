#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pfsaddle/kernels.hpp"
#include "pfsaddle/stacked.hpp"

namespace pfsaddle {

enum class TopologyKind { complete, ring, star, path, grid2d, erdos_renyi };

std::string_view to_string(TopologyKind kind);
TopologyKind parse_topology_kind(std::string_view name);

struct Topology {
  TopologyKind kind = TopologyKind::ring;
  int num_nodes = 2;
  std::uint64_t seed = 0;   // erdos_renyi only
  double edge_prob = 0.5;   // erdos_renyi only

  bool operator==(const Topology&) const = default;
};

/// Undirected edge with first < second.
using Edge = std::pair<int, int>;

/// Edge list of a connected graph. erdos_renyi resamples up to 100 times.
std::vector<Edge> build_edges(const Topology& topology);

bool is_connected(int num_nodes, const std::vector<Edge>& edges);

/// Symmetric PSD matrix whose kernel is the constant vectors and whose
/// off-diagonal support is the edge set. Immutable once built.
class GossipMatrix {
 public:
  /// Checks symmetry and sparsity against `edges` (validation error otherwise)
  /// and caches lambda_max by power iteration.
  static GossipMatrix from_dense(Matrix w, std::vector<Edge> edges);

  Eigen::Index size() const { return dense_.rows(); }
  const Matrix& dense() const { return dense_; }
  const kernels::CsrMatrix& sparse() const { return sparse_; }
  const std::vector<Edge>& edges() const { return edges_; }
  double lambda_max() const { return lambda_max_; }

  /// scale * W x.
  Matrix apply(const Matrix& x, double scale = 1.0) const;
  void apply(const Matrix& x, double scale, Matrix& out) const;

 private:
  GossipMatrix(Matrix w, std::vector<Edge> edges, double lambda_max);

  Matrix dense_;
  kernels::CsrMatrix sparse_;
  std::vector<Edge> edges_;
  double lambda_max_ = 0.0;
};

/// Combinatorial Laplacian D - A of the topology's graph.
GossipMatrix laplacian(const Topology& topology);

/// c * W; c must be positive.
GossipMatrix scale(const GossipMatrix& g, double c);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration with a
/// residual stop at 1e-12 relative and a cap of 10 M log M + 100 iterations.
double power_lambda_max(const Matrix& w);

struct GossipReport {
  bool symmetric = false;
  bool positive_semidefinite = false;
  bool constant_kernel = false;
  bool sparsity_matches = false;
  double min_eigenvalue = 0.0;
  double second_eigenvalue = 0.0;
  double max_abs_row_sum = 0.0;

  bool ok() const { return symmetric && positive_semidefinite && constant_kernel && sparsity_matches; }
};

/// The four gossip-matrix conditions, checked with a dense eigensolver:
/// exact symmetry, min eigenvalue >= -1e-10, |W 1| <= 1e-12 with the second
/// smallest eigenvalue > 0, and nonzeros only on the diagonal or edges.
GossipReport validate(const GossipMatrix& g);

/// phi(X, Y) = (lambda/2) tr(X^T W X) - (lambda/2) tr(Y^T W Y).
double penalty_value(const GossipMatrix& g, double lambda, const StackedPoint& p);

/// Gradient of phi: (lambda W X, -lambda W Y).
StackedPoint penalty_grad(const GossipMatrix& g, double lambda, const StackedPoint& p);

}  // namespace pfsaddle
