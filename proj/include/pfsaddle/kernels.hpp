#pragma once

// Data-parallel building blocks. Every kernel has a serial twin in
// kernels::serial that performs the same per-row arithmetic in the same order,
// so the two are bitwise identical; the serial versions exist for tests and
// for the benchmark.

#include <cstddef>
#include <vector>

#include "pfsaddle/stacked.hpp"

namespace pfsaddle::kernels {

/// Rows below this amount of work (rows * cols) run on the calling thread.
inline constexpr std::ptrdiff_t kParallelWork = 1 << 14;

/// Compressed sparse rows; a gossip matrix stored this way makes the
/// neighbour-only data flow explicit.
struct CsrMatrix {
  Eigen::Index rows = 0;
  std::vector<Eigen::Index> offsets;  // size rows + 1
  std::vector<Eigen::Index> cols;
  std::vector<double> values;

  static CsrMatrix from_dense(const Matrix& dense);
  std::ptrdiff_t nonzeros() const { return static_cast<std::ptrdiff_t>(values.size()); }
};

template <typename Fn>
void for_each_row(Eigen::Index rows, std::ptrdiff_t work_per_row, Fn&& fn) {
  const bool big = static_cast<std::ptrdiff_t>(rows) * work_per_row >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (Eigen::Index m = 0; m < rows; ++m) fn(m);
}

/// out = scale * (W x), computed row by row from neighbour rows only.
void gossip_product(const CsrMatrix& w, const Matrix& x, double scale, Matrix& out);

/// Project one contiguous vector onto the ball (center, radius) in place.
void project_row(const Vector& center, double radius, double* row);

/// Project every row of x onto the ball (center, radius).
void project_rows(const Vector& center, double radius, Matrix& x);

/// Euclidean distance of a row to the center, summed in column order.
double row_distance(const double* row, const Vector& center);

namespace serial {

template <typename Fn>
void for_each_row(Eigen::Index rows, std::ptrdiff_t /*work_per_row*/, Fn&& fn) {
  for (Eigen::Index m = 0; m < rows; ++m) fn(m);
}

void gossip_product(const CsrMatrix& w, const Matrix& x, double scale, Matrix& out);
void project_rows(const Vector& center, double radius, Matrix& x);

}  // namespace serial

}  // namespace pfsaddle::kernels
