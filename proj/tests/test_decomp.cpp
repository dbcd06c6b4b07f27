#include <gtest/gtest.h>

#include "ddest/decomp.hpp"

using namespace ddest;

namespace {

std::shared_ptr<const Mesh> unit_mesh(int n) { return std::make_shared<const Mesh>(build_uniform(n, n)); }

void expect_rect(const Rect& r, double x0, double x1, double y0, double y1) {
  EXPECT_NEAR(r.x0, x0, 1e-14);
  EXPECT_NEAR(r.x1, x1, 1e-14);
  EXPECT_NEAR(r.y0, y0, 1e-14);
  EXPECT_NEAR(r.y1, y1, 1e-14);
}

}  // namespace

TEST(Grid, TwoByOne) {
  const auto r = grid_rects(2, 1, 0.1);
  ASSERT_EQ(r.size(), 2u);
  expect_rect(r[0], 0, 0.6, 0, 1);
  expect_rect(r[1], 0.4, 1, 0, 1);
}

TEST(Grid, FourByOne) {
  const auto r = grid_rects(4, 1, 0.1);
  expect_rect(r[0], 0, 0.35, 0, 1);
  expect_rect(r[1], 0.15, 0.6, 0, 1);
  expect_rect(r[2], 0.4, 0.85, 0, 1);
  expect_rect(r[3], 0.65, 1, 0, 1);
}

TEST(Grid, RowMajorNumbering) {
  const auto r = grid_rects(2, 2, 0.1);
  expect_rect(r[1], 0.4, 1, 0, 0.6);
  expect_rect(r[2], 0, 0.6, 0.4, 1);
}

TEST(Grid, Rejections) {
  EXPECT_THROW(grid_rects(2, 1, -0.1), ConfigError);
  EXPECT_THROW(grid_rects(2, 1, 0.6), ConfigError);
  EXPECT_THROW(build_grid(2, 1, 0.05, unit_mesh(10)), ConfigError);  // 0.45 is off the mesh lines
  EXPECT_THROW(Decomposition(unit_mesh(10), grid_rects(2, 1, 0.1), {0, 0}), ConfigError);
  EXPECT_THROW(Decomposition(unit_mesh(10), {Rect{0, 0.5, 0, 1}}), ConfigError);  // no coverage
  EXPECT_THROW(Decomposition(unit_mesh(10), {Rect{0, 0.5, 0, 1}, Rect{0.5, 1, 0, 1}}), ConfigError);  // no overlap
}

TEST(Decomposition, ElementsAndOverlaps) {
  const Decomposition d = build_grid(2, 1, 0.1, unit_mesh(20));
  EXPECT_EQ(d.elements(0).size(), 2u * 12 * 20);
  EXPECT_EQ(d.elements(1).size(), 2u * 12 * 20);
  EXPECT_EQ(d.overlap_elements(0, 1), d.overlap_elements(1, 0));
  EXPECT_EQ(d.overlap_elements(0, 1).size(), 2u * 4 * 20);
  EXPECT_EQ(d.overlap_elements(0, 0), d.elements(0));
}

TEST(Decomposition, SingleSubdomain) {
  const Decomposition d = build_grid(1, 1, 0.3, unit_mesh(4));
  EXPECT_TRUE(d.interior_boundary(0).empty());
  EXPECT_TRUE(std::isinf(d.distance_weight(0, Point(0.5, 0.5))));
  EXPECT_NEAR(d.chi(Point(0.1, 0.9))[0], 1.0, 0);
}

TEST(PartitionOfUnity, Examples) {
  const Decomposition d = build_grid(2, 1, 0.1, unit_mesh(20));
  const Vector c = d.chi(Point(0.5, 0.5));
  EXPECT_NEAR(c[0], 0.5, 1e-15);
  EXPECT_NEAR(c[1], 0.5, 1e-15);
  // Distance to x = 0.4 is 0.05 for subdomain 2; to x = 0.6 is 0.15 for subdomain 1.
  const Vector c2 = d.chi(Point(0.45, 0.3));
  EXPECT_NEAR(c2[0], 0.75, 1e-14);
  EXPECT_NEAR(c2[1], 0.25, 1e-14);
  EXPECT_EQ(d.chi(Point(0.2, 0.5))[1], 0.0);
}

TEST(PartitionOfUnity, SumsToOneAtEveryQuadraturePoint) {
  const auto mesh = unit_mesh(20);
  for (auto [px, py] : {std::pair{2, 1}, {4, 1}, {4, 4}, {2, 2}}) {
    const Decomposition d = build_grid(px, py, 0.1, mesh);
    double worst = 0;
    for (int t = 0; t < mesh->num_triangles(); ++t) {
      const ElementGeometry g(*mesh, t);
      for (const auto& xi : triangle_rule().points) worst = std::max(worst, std::abs(d.chi(g.map(xi)).sum() - 1));
    }
    EXPECT_LE(worst, 1e-13) << px << "x" << py;
  }
}

TEST(LocalizedQoi, VanishesOutsideSubdomain) {
  const Decomposition d = build_grid(2, 1, 0.1, unit_mesh(20));
  const Qoi q = Qoi::indicator_of(Rect{0.3, 0.8, 0.2, 0.4});
  const auto psi0 = localized_qoi(d, q, 0);
  const auto psi1 = localized_qoi(d, q, 1);
  EXPECT_EQ(psi0(Point(0.7, 0.3)), 0.0);
  EXPECT_EQ(psi1(Point(0.35, 0.3)), 0.0);
  EXPECT_NEAR(psi0(Point(0.45, 0.3)) + psi1(Point(0.45, 0.3)), 1.0, 1e-15);
}

TEST(SubdomainDofs, InteriorAndBoundaryPartitionClosure) {
  const auto mesh = unit_mesh(10);
  const Decomposition d = build_grid(2, 2, 0.2, mesh);
  const FeSpace space(mesh, 2);
  for (int i = 0; i < d.size(); ++i) {
    const auto s = d.dofs(space, i);
    EXPECT_EQ(s.interior.size() + s.boundary.size(), s.closure.size());
    for (int dof : s.interior) {
      EXPECT_TRUE(d.rect(i).strictly_contains(space.dof_point(dof)));
      EXPECT_FALSE(s.outside_interior[dof]);
    }
    for (int dof : s.boundary) EXPECT_TRUE(d.rect(i).on_boundary(space.dof_point(dof)));
  }
}
