#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <vector>

#include "ddest/types.hpp"

namespace ddest {

/// Conforming triangulation of an axis-aligned rectangle.
///
/// Triangles are stored counterclockwise. Local edge l of a triangle joins
/// local vertices l and (l+1) % 3. The edge table is derived on
/// construction and never mutated; a Mesh is immutable once built.
class Mesh {
 public:
  using Triangle = std::array<int, 3>;
  using Edge = std::array<int, 2>;  // vertex indices, ascending

  Mesh(Rect domain, std::vector<Point> vertices, std::vector<Triangle> triangles);

  const Rect& domain() const { return domain_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Point& vertex(int v) const { return vertices_[v]; }
  const std::vector<Point>& vertices() const { return vertices_; }
  const Triangle& triangle(int t) const { return triangles_[t]; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Edge& edge(int e) const { return edges_[e]; }
  /// Global edge index of local edge l of triangle t.
  int triangle_edge(int t, int l) const { return triangle_edges_[t][l]; }
  /// The (at most two) triangles sharing edge e; -1 marks a boundary side.
  const std::array<int, 2>& edge_triangles(int e) const { return edge_triangles_[e]; }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }

  Scalar signed_area(int t) const;
  Point centroid(int t) const;
  Scalar total_area() const;

  /// Triangle containing p (closed), or -1. Uses a bucket grid built lazily.
  int locate(const Point& p) const;
  /// Barycentric coordinates of p with respect to triangle t.
  std::array<Scalar, 3> barycentric(int t, const Point& p) const;

  /// Vertices lying strictly inside some edge of the edge table. Empty for a
  /// conforming mesh.
  std::vector<int> hanging_vertices() const;

 private:
  void build_buckets() const;

  Rect domain_;
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::array<int, 2>> edge_triangles_;
  std::vector<char> boundary_vertex_;

  mutable std::shared_ptr<const std::vector<std::vector<int>>> buckets_;
  mutable int bucket_nx_ = 0, bucket_ny_ = 0;
};

/// Uniform nx x ny grid of cells, each split along its bottom-left to
/// top-right diagonal.
Mesh build_uniform(int nx, int ny, const Rect& rect = Rect{});

enum class Closure {
  green,         ///< bisect across the split edge; two split edges promote to red
  longest_edge,  ///< any split edge also splits the longest edge (Rivara)
};

/// Red-refines every triangle inside `region` and restores conformity in the
/// neighbours with the given closure.
/// Throws ConfigError when a triangle straddles the region boundary.
Mesh refine_region(const Mesh& mesh, const Rect& region, Closure closure = Closure::green);

/// Uniform red refinement of every triangle, applied `levels` times.
Mesh refine_uniform(const Mesh& mesh, int levels = 1);

/// Area of the intersection of triangle t with a rectangle.
Scalar triangle_rect_overlap_area(const Mesh& mesh, int t, const Rect& r);

/// True iff every triangle either lies inside or has no interior overlap
/// with each rectangle.
bool element_region_consistency(const Mesh& mesh, const std::vector<Rect>& rects);

/// Triangles whose centroid lies inside `region`.
std::vector<int> elements_in(const Mesh& mesh, const Rect& region);

/// Plain-text dump: `vertices N triangles M`, then coordinates, then triples.
void write_mesh(std::ostream& os, const Mesh& mesh);

}  // namespace ddest
