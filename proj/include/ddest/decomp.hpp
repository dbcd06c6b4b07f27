#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ddest/fem.hpp"
#include "ddest/mesh.hpp"

namespace ddest {

struct Segment {
  Point a, b;
  Scalar distance(const Point& p) const;
};

/// Index sets of one subdomain within a particular space.
struct SubdomainDofs {
  std::vector<int> closure;   ///< dofs of elements inside the subdomain
  std::vector<int> interior;  ///< closure dofs not on the subdomain boundary
  std::vector<int> boundary;  ///< closure dofs on the subdomain boundary
  std::vector<char> outside_interior;  ///< per global dof: 1 unless in `interior`
};

/// Overlapping rectangular subdomains over a mesh.
///
/// Subdomain i owns the triangles whose centroid lies in its rectangle; the
/// mesh must be consistent with every rectangle. Immutable after
/// construction.
class Decomposition {
 public:
  Decomposition(std::shared_ptr<const Mesh> mesh, std::vector<Rect> rects, std::vector<int> sweep_order = {});

  int size() const { return static_cast<int>(rects_.size()); }
  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const Rect& rect(int i) const { return rects_[i]; }
  const std::vector<Rect>& rects() const { return rects_; }
  const std::vector<int>& elements(int i) const { return elements_[i]; }
  /// Elements of the overlap of subdomains i and j; elements(i) when i == j.
  const std::vector<int>& overlap_elements(int i, int j) const { return overlaps_[i * size() + j]; }
  bool overlaps(int i, int j) const { return !overlap_elements(i, j).empty(); }
  /// Subdomain indices in sweep order.
  const std::vector<int>& sweep_order() const { return sweep_order_; }
  /// B^(i): the parts of the subdomain boundary interior to the domain.
  const std::vector<Segment>& interior_boundary(int i) const { return interior_boundary_[i]; }

  /// dist(x, B^(i)) for x in the closed subdomain, else 0. Infinite when
  /// B^(i) is empty (single subdomain).
  Scalar distance_weight(int i, const Point& x) const;
  /// Partition of unity chi_i(x) = d_i(x) / sum_j d_j(x).
  Vector chi(const Point& x) const;

  SubdomainDofs dofs(const FeSpace& space, int i) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<Rect> rects_;
  std::vector<int> sweep_order_;
  std::vector<std::vector<int>> elements_;
  std::vector<std::vector<int>> overlaps_;
  std::vector<std::vector<Segment>> interior_boundary_;
};

/// px x py grid of base cells; each subdomain is its base cell extended by
/// `beta` across every internal partition line. Subdomains are numbered
/// row-major (x fastest), which is also the default sweep order.
Decomposition build_grid(int px, int py, Scalar beta, std::shared_ptr<const Mesh> mesh);

/// Rectangles produced by build_grid, without touching a mesh.
std::vector<Rect> grid_rects(int px, int py, Scalar beta, const Rect& domain = Rect{});

/// Quantity-of-interest density psi for Q(u) = (psi, u).
struct Qoi {
  ScalarField density = [](const Point&) { return 0.0; };
  std::optional<Rect> indicator;  ///< set when psi is the indicator of a rectangle

  static Qoi indicator_of(const Rect& r);
  static Qoi zero() { return Qoi{}; }
  Scalar operator()(const Point& x) const { return density(x); }
};

/// psi_i = chi_i psi.
ScalarField localized_qoi(const Decomposition& decomp, const Qoi& qoi, int i);

}  // namespace ddest
