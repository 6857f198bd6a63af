#include "pfsaddle/kernels.hpp"

#include <cmath>

namespace pfsaddle::kernels {

CsrMatrix CsrMatrix::from_dense(const Matrix& dense) {
  CsrMatrix csr;
  csr.rows = dense.rows();
  csr.offsets.reserve(static_cast<std::size_t>(dense.rows()) + 1);
  csr.offsets.push_back(0);
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      if (dense(i, j) != 0.0) {
        csr.cols.push_back(j);
        csr.values.push_back(dense(i, j));
      }
    }
    csr.offsets.push_back(static_cast<Eigen::Index>(csr.values.size()));
  }
  return csr;
}

double row_distance(const double* row, const Vector& center) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < center.size(); ++j) {
    const double d = row[j] - center[j];
    s += d * d;
  }
  return std::sqrt(s);
}

namespace {

void gossip_row(const CsrMatrix& w, const Matrix& x, double scale, Matrix& out, Eigen::Index m) {
  const Eigen::Index n = x.cols();
  double* dst = out.row(m).data();
  for (Eigen::Index j = 0; j < n; ++j) dst[j] = 0.0;
  for (Eigen::Index k = w.offsets[m]; k < w.offsets[m + 1]; ++k) {
    const double wk = w.values[static_cast<std::size_t>(k)];
    const double* src = x.row(w.cols[static_cast<std::size_t>(k)]).data();
    for (Eigen::Index j = 0; j < n; ++j) dst[j] += wk * src[j];
  }
  for (Eigen::Index j = 0; j < n; ++j) dst[j] *= scale;
}

}  // namespace

void project_row(const Vector& center, double radius, double* row) {
  const double dist = row_distance(row, center);
  // non-finite rows are left for the caller's finiteness check
  if (dist <= radius || !std::isfinite(dist)) return;
  const Eigen::Index n = center.size();
  Vector diff(n);
  for (Eigen::Index j = 0; j < n; ++j) diff[j] = row[j] - center[j];
  double s = radius / dist;
  // Rounding can leave the scaled row a hair outside; shrink until a second
  // projection would be a no-op.
  for (;;) {
    for (Eigen::Index j = 0; j < n; ++j) row[j] = center[j] + s * diff[j];
    if (row_distance(row, center) <= radius) break;
    s = std::nextafter(s, 0.0);
  }
}

namespace {

void check_gossip_shapes(const CsrMatrix& w, const Matrix& x, Matrix& out) {
  if (w.rows != x.rows()) fail(ErrorKind::shape, "gossip product: W has " + std::to_string(w.rows) +
                                                     " rows but X has " + std::to_string(x.rows()));
  if (out.rows() != x.rows() || out.cols() != x.cols()) out.resize(x.rows(), x.cols());
}

}  // namespace

void gossip_product(const CsrMatrix& w, const Matrix& x, double scale, Matrix& out) {
  check_gossip_shapes(w, x, out);
  const auto avg_nnz = w.rows > 0 ? w.nonzeros() / w.rows + 1 : 1;
  kernels::for_each_row(x.rows(), avg_nnz * x.cols(),
                        [&](Eigen::Index m) { gossip_row(w, x, scale, out, m); });
}

void project_rows(const Vector& center, double radius, Matrix& x) {
  kernels::for_each_row(x.rows(), x.cols(), [&](Eigen::Index m) { project_row(center, radius, x.row(m).data()); });
}

namespace serial {

void gossip_product(const CsrMatrix& w, const Matrix& x, double scale, Matrix& out) {
  check_gossip_shapes(w, x, out);
  for (Eigen::Index m = 0; m < x.rows(); ++m) gossip_row(w, x, scale, out, m);
}

void project_rows(const Vector& center, double radius, Matrix& x) {
  for (Eigen::Index m = 0; m < x.rows(); ++m) project_row(center, radius, x.row(m).data());
}

}  // namespace serial

}  // namespace pfsaddle::kernels
