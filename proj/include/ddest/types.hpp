#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ddest {

using Scalar = double;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using SparseMatrix = Eigen::SparseMatrix<Scalar>;
using Point = Eigen::Matrix<Scalar, 2, 1>;

/// Absolute tolerance for geometric predicates on unit-square coordinates.
inline constexpr Scalar kGeomTol = 1e-10;

/// Closed axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  Scalar x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  Scalar width() const { return x1 - x0; }
  Scalar height() const { return y1 - y0; }
  Scalar area() const { return width() * height(); }
  bool degenerate() const { return !(width() > kGeomTol && height() > kGeomTol); }

  bool contains(const Point& p, Scalar tol = kGeomTol) const {
    return p.x() >= x0 - tol && p.x() <= x1 + tol && p.y() >= y0 - tol && p.y() <= y1 + tol;
  }
  bool strictly_contains(const Point& p, Scalar tol = kGeomTol) const {
    return p.x() > x0 + tol && p.x() < x1 - tol && p.y() > y0 + tol && p.y() < y1 - tol;
  }
  bool on_boundary(const Point& p, Scalar tol = kGeomTol) const {
    return contains(p, tol) && !strictly_contains(p, tol);
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Raised when user-facing configuration violates a documented constraint.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ddest
