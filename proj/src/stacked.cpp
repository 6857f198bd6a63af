#include "pfsaddle/stacked.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "pfsaddle/kernels.hpp"

namespace pfsaddle {

namespace {

std::string shape_of(const Matrix& a) { return std::to_string(a.rows()) + "x" + std::to_string(a.cols()); }

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return a.size() == 0 || std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

StackedPoint::StackedPoint(Matrix x_block, Matrix y_block) : x(std::move(x_block)), y(std::move(y_block)) {
  if (x.rows() < 1) fail(ErrorKind::shape, "stacked point needs at least one node");
  if (x.rows() != y.rows())
    fail(ErrorKind::shape, "x block is " + shape_of(x) + " but y block is " + shape_of(y));
}

StackedPoint StackedPoint::zeros(Eigen::Index nodes, Eigen::Index dim_x, Eigen::Index dim_y) {
  return StackedPoint(Matrix::Zero(nodes, dim_x), Matrix::Zero(nodes, dim_y));
}

StackedPoint StackedPoint::replicated(Eigen::Index nodes, const Vector& x0, const Vector& y0) {
  Matrix x(nodes, x0.size());
  Matrix y(nodes, y0.size());
  for (Eigen::Index m = 0; m < nodes; ++m) {
    x.row(m) = x0.transpose();
    y.row(m) = y0.transpose();
  }
  return StackedPoint(std::move(x), std::move(y));
}

bool StackedPoint::same_shape(const StackedPoint& other) const {
  return x.rows() == other.x.rows() && x.cols() == other.x.cols() && y.rows() == other.y.rows() &&
         y.cols() == other.y.cols();
}

bool StackedPoint::all_finite() const { return x.allFinite() && y.allFinite(); }

bool StackedPoint::operator==(const StackedPoint& other) const {
  return bitwise_equal(x, other.x) && bitwise_equal(y, other.y);
}

StackedPoint& StackedPoint::operator+=(const StackedPoint& other) {
  require_same_shape(*this, other, "addition");
  x += other.x;
  y += other.y;
  return *this;
}

StackedPoint& StackedPoint::operator-=(const StackedPoint& other) {
  require_same_shape(*this, other, "subtraction");
  x -= other.x;
  y -= other.y;
  return *this;
}

StackedPoint& StackedPoint::operator*=(double s) {
  x *= s;
  y *= s;
  return *this;
}

StackedPoint operator+(StackedPoint a, const StackedPoint& b) { return a += b; }
StackedPoint operator-(StackedPoint a, const StackedPoint& b) { return a -= b; }
StackedPoint operator*(double s, StackedPoint a) { return a *= s; }

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::shape, std::string(what) + ": " + shape_of(a) + " vs " + shape_of(b));
}

void require_same_shape(const StackedPoint& a, const StackedPoint& b, const char* what) {
  require_same_shape(a.x, b.x, what);
  require_same_shape(a.y, b.y, what);
}

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) fail(ErrorKind::invalid_value, std::string(what) + ": non-finite entry");
}

double frobenius_sq(const Matrix& a) {
  require_finite(a, "frobenius_sq");
  double total = 0.0;
  for (Eigen::Index m = 0; m < a.rows(); ++m) total += a.row(m).squaredNorm();
  return total;
}

double frobenius_sq(const StackedPoint& p) { return frobenius_sq(p.x) + frobenius_sq(p.y); }

double trace_inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "trace_inner");
  double total = 0.0;
  for (Eigen::Index m = 0; m < a.rows(); ++m) total += a.row(m).dot(b.row(m));
  return total;
}

double trace_inner(const StackedPoint& a, const StackedPoint& b) {
  return trace_inner(a.x, b.x) + trace_inner(a.y, b.y);
}

BallDomain BallDomain::centered(Eigen::Index dim_x, Eigen::Index dim_y, double radius_x, double radius_y) {
  BallDomain d;
  d.center_x = Vector::Zero(dim_x);
  d.center_y = Vector::Zero(dim_y);
  d.radius_x = radius_x;
  d.radius_y = radius_y;
  d.validate();
  return d;
}

BallDomain BallDomain::whole_space(Eigen::Index dim_x, Eigen::Index dim_y) {
  BallDomain d;
  d.center_x = Vector::Zero(dim_x);
  d.center_y = Vector::Zero(dim_y);
  d.radius_x = std::numeric_limits<double>::infinity();
  d.radius_y = std::numeric_limits<double>::infinity();
  d.unbounded = true;
  return d;
}

double BallDomain::diameter() const {
  if (unbounded) return std::numeric_limits<double>::infinity();
  return 2.0 * std::sqrt(radius_x * radius_x + radius_y * radius_y);
}

double BallDomain::max_norm_x() const { return center_x.norm() + radius_x; }
double BallDomain::max_norm_y() const { return center_y.norm() + radius_y; }

bool BallDomain::contains(const StackedPoint& p, double slack) const {
  if (unbounded) return true;
  for (Eigen::Index m = 0; m < p.num_nodes(); ++m) {
    if (kernels::row_distance(p.x.row(m).data(), center_x) > radius_x + slack) return false;
    if (kernels::row_distance(p.y.row(m).data(), center_y) > radius_y + slack) return false;
  }
  return true;
}

void BallDomain::validate() const {
  if (!center_x.allFinite() || !center_y.allFinite()) fail(ErrorKind::invalid_value, "domain center not finite");
  if (unbounded) return;
  if (!(radius_x >= 0.0) || !(radius_y >= 0.0) || !std::isfinite(radius_x) || !std::isfinite(radius_y))
    fail(ErrorKind::invalid_argument, "ball radii must be finite and nonnegative");
}

StackedPoint project(const BallDomain& domain, const StackedPoint& p) {
  StackedPoint out = p;
  project_in_place(domain, out);
  return out;
}

void project_in_place(const BallDomain& domain, StackedPoint& p) {
  if (!p.all_finite()) fail(ErrorKind::invalid_value, "project: non-finite point");
  if (p.dim_x() != domain.dim_x() || p.dim_y() != domain.dim_y())
    fail(ErrorKind::shape, "project: point dimensions do not match the domain");
  if (domain.unbounded) return;
  kernels::project_rows(domain.center_x, domain.radius_x, p.x);
  kernels::project_rows(domain.center_y, domain.radius_y, p.y);
}

}  // namespace pfsaddle
