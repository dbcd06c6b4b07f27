#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "ddest/mesh.hpp"

using namespace ddest;

namespace {

std::vector<std::pair<double, double>> sorted_points(const Mesh& m) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : m.vertices()) pts.emplace_back(std::round(p.x() * 1e9) / 1e9, std::round(p.y() * 1e9) / 1e9);
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace

TEST(Mesh, UniformCounts) {
  for (auto [n, v, t] : {std::tuple{1, 4, 2}, {10, 121, 200}, {20, 441, 800}}) {
    const Mesh m = build_uniform(n, n);
    EXPECT_EQ(m.num_vertices(), v);
    EXPECT_EQ(m.num_triangles(), t);
  }
  const Mesh m = build_uniform(3, 2);
  EXPECT_EQ(m.num_vertices(), 12);
  EXPECT_EQ(m.num_triangles(), 12);
}

TEST(Mesh, DiagonalRunsBottomLeftToTopRight) {
  const Mesh m = build_uniform(1, 1);
  EXPECT_EQ(m.triangle(0), (Mesh::Triangle{0, 1, 3}));
  EXPECT_EQ(m.triangle(1), (Mesh::Triangle{0, 3, 2}));
  for (int t = 0; t < m.num_triangles(); ++t) EXPECT_GT(m.signed_area(t), 0);
}

TEST(Mesh, RejectsBadCounts) {
  EXPECT_THROW(build_uniform(0, 3), ConfigError);
  EXPECT_THROW(build_uniform(3, -1), ConfigError);
}

TEST(Mesh, EdgeTableAndBoundary) {
  const Mesh m = build_uniform(2, 2);
  // Euler: E = V + T - 1 for a disc.
  EXPECT_EQ(m.num_edges(), m.num_vertices() + m.num_triangles() - 1);
  int boundary = 0;
  for (int v = 0; v < m.num_vertices(); ++v) boundary += m.is_boundary_vertex(v);
  EXPECT_EQ(boundary, 8);
  EXPECT_TRUE(m.hanging_vertices().empty());
}

TEST(Mesh, LocateAndBarycentric) {
  const Mesh m = build_uniform(4, 4);
  const Point p(0.3, 0.7);
  const int t = m.locate(p);
  ASSERT_GE(t, 0);
  const auto lam = m.barycentric(t, p);
  Point back = Point::Zero();
  for (int l = 0; l < 3; ++l) {
    EXPECT_GE(lam[l], -1e-12);
    back += lam[l] * m.vertex(m.triangle(t)[l]);
  }
  EXPECT_NEAR((back - p).norm(), 0, 1e-14);
  EXPECT_EQ(m.locate(Point(1.5, 0.5)), -1);
}

TEST(Refine, WholeDomainMatchesUniform) {
  const Mesh coarse = build_uniform(10, 10);
  const Mesh red = refine_region(coarse, Rect{});
  const Mesh fine = build_uniform(20, 20);
  EXPECT_EQ(red.num_vertices(), 441);
  EXPECT_EQ(red.num_triangles(), 800);
  EXPECT_EQ(sorted_points(red), sorted_points(fine));
  EXPECT_EQ(sorted_points(refine_uniform(coarse, 1)), sorted_points(fine));
}

TEST(Refine, LocalRegionIsConformingAndConservesArea) {
  const Mesh coarse = build_uniform(10, 10);
  for (Closure c : {Closure::green, Closure::longest_edge})
    for (const Rect& r : {Rect{0.3, 1, 0.3, 1}, Rect{0.4, 1, 0.4, 1}, Rect{0.2, 0.5, 0.1, 0.9}}) {
      const Mesh m = refine_region(coarse, r, c);
      EXPECT_TRUE(m.hanging_vertices().empty());
      EXPECT_NEAR(m.total_area(), 1.0, 1e-12);
      for (int t = 0; t < m.num_triangles(); ++t) EXPECT_GT(m.signed_area(t), 0);
      EXPECT_TRUE(element_region_consistency(m, {r}));
      // Inside the region the mesh is the uniformly refined one.
      EXPECT_NEAR(elements_in(m, r).size() * 0.5 / 400.0, r.area(), 1e-12);
    }
}

TEST(Refine, LongestEdgeClosureVertexCount) {
  // 6x6 red cells add 120 midpoints; the twelve neighbours whose split edge
  // is not their hypotenuse add one hypotenuse midpoint each.
  const Mesh m = refine_region(build_uniform(10, 10), Rect{0.4, 1, 0.4, 1}, Closure::longest_edge);
  EXPECT_EQ(m.num_vertices(), 121 + 120 + 12);
  const Mesh g = refine_region(build_uniform(10, 10), Rect{0.4, 1, 0.4, 1}, Closure::green);
  EXPECT_EQ(g.num_vertices(), 121 + 120);
}

TEST(Refine, EmptyRegionLeavesMeshUnchanged) {
  const Mesh coarse = build_uniform(10, 10);
  const Mesh m = refine_region(coarse, Rect{0.3, 0.3, 0.2, 0.2});
  EXPECT_EQ(m.num_vertices(), coarse.num_vertices());
  EXPECT_EQ(m.num_triangles(), coarse.num_triangles());
}

TEST(Refine, MisalignedRegionRejected) {
  EXPECT_THROW(refine_region(build_uniform(10, 10), Rect{0.35, 1, 0, 1}), ConfigError);
}

TEST(Consistency, Examples) {
  EXPECT_TRUE(element_region_consistency(build_uniform(20, 20), {Rect{0, 0.6, 0, 1}, Rect{0.4, 1, 0, 1}}));
  EXPECT_FALSE(element_region_consistency(build_uniform(10, 10), {Rect{0, 0.55, 0, 1}}));
  EXPECT_TRUE(element_region_consistency(build_uniform(7, 3), {Rect{}}));
}

TEST(Consistency, OverlapAreaOfClippedTriangle) {
  const Mesh m = build_uniform(1, 1);
  // Lower-right triangle (0,0),(1,0),(1,1) clipped to x <= 0.5: area 1/8.
  EXPECT_NEAR(triangle_rect_overlap_area(m, 0, Rect{0, 0.5, 0, 1}), 0.125, 1e-15);
  EXPECT_NEAR(triangle_rect_overlap_area(m, 0, Rect{}), 0.5, 1e-15);
}

TEST(Mesh, DumpFormat) {
  std::ostringstream os;
  write_mesh(os, build_uniform(1, 1));
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "vertices 4 triangles 2");
  std::getline(in, line);
  EXPECT_EQ(line, "0 0");
  for (int i = 0; i < 3; ++i) std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line, "0 1 3");
}
