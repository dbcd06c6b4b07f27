#include "ddest/fem.hpp"

#include <numbers>

#include <Eigen/LU>

namespace ddest {

const TriangleQuadrature& triangle_rule() {
  static const TriangleQuadrature rule = [] {
    TriangleQuadrature q;
    q.exact_degree = 6;
    auto add = [&q](Scalar l0, Scalar l1, Scalar w) {
      q.points.emplace_back(l1, 1 - l0 - l1);
      q.weights.push_back(0.5 * w);
    };
    auto orbit3 = [&](Scalar a, Scalar b, Scalar w) {
      add(a, b, w);
      add(b, a, w);
      add(b, b, w);
    };
    auto orbit6 = [&](Scalar a, Scalar b, Scalar c, Scalar w) {
      add(a, b, w);
      add(a, c, w);
      add(b, a, w);
      add(b, c, w);
      add(c, a, w);
      add(c, b, w);
    };
    orbit3(0.501426509658179, 0.249286745170910, 0.116786275726379);
    orbit3(0.873821971016996, 0.063089014491502, 0.050844906370207);
    orbit6(0.053145049844817, 0.310352451033784, 0.636502499121399, 0.082851075618374);
    return q;
  }();
  return rule;
}

LagrangeElement::LagrangeElement(int degree) : degree_(degree) {
  if (degree < 1 || degree > 3) throw ConfigError("polynomial degree must be 1, 2 or 3 (got " + std::to_string(degree) + ")");
  const std::array<Point, 3> v{Point(0, 0), Point(1, 0), Point(0, 1)};
  for (const auto& p : v) nodes_.push_back(p);
  for (int l = 0; l < 3; ++l)
    for (int t = 1; t < degree; ++t)
      nodes_.push_back(v[l] + (static_cast<Scalar>(t) / degree) * (v[(l + 1) % 3] - v[l]));
  if (degree == 3) nodes_.emplace_back(1.0 / 3.0, 1.0 / 3.0);

  for (int total = 0; total <= degree; ++total)
    for (int a = total; a >= 0; --a) exponents_.push_back({a, total - a});

  const int n = num_nodes();
  Matrix vandermonde(n, n);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m)
      vandermonde(i, m) = std::pow(nodes_[i].x(), exponents_[m][0]) * std::pow(nodes_[i].y(), exponents_[m][1]);
  coefficients_ = vandermonde.fullPivLu().inverse();
}

Vector LagrangeElement::values(const Point& xi) const {
  const int n = num_nodes();
  Vector mono(n);
  for (int m = 0; m < n; ++m) mono[m] = std::pow(xi.x(), exponents_[m][0]) * std::pow(xi.y(), exponents_[m][1]);
  return coefficients_.transpose() * mono;
}

Eigen::Matrix<Scalar, Eigen::Dynamic, 2> LagrangeElement::gradients(const Point& xi) const {
  const int n = num_nodes();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> mono(n, 2);
  for (int m = 0; m < n; ++m) {
    const auto [a, b] = exponents_[m];
    mono(m, 0) = a == 0 ? 0.0 : a * std::pow(xi.x(), a - 1) * std::pow(xi.y(), b);
    mono(m, 1) = b == 0 ? 0.0 : b * std::pow(xi.x(), a) * std::pow(xi.y(), b - 1);
  }
  return coefficients_.transpose() * mono;
}

ElementGeometry::ElementGeometry(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangle(t);
  origin = mesh.vertex(tri[0]);
  jacobian.col(0) = mesh.vertex(tri[1]) - origin;
  jacobian.col(1) = mesh.vertex(tri[2]) - origin;
  det = jacobian.determinant();
  inverse_transpose = jacobian.inverse().transpose();
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, int degree) : mesh_(std::move(mesh)), element_(degree) {
  const Mesh& m = *mesh_;
  const int per_edge = degree - 1;
  const int per_cell = degree == 3 ? 1 : 0;
  num_dofs_ = m.num_vertices() + m.num_edges() * per_edge + m.num_triangles() * per_cell;
  const int nloc = element_.num_nodes();
  dofs_.resize(static_cast<std::size_t>(m.num_triangles()) * nloc);
  dof_points_.resize(num_dofs_);
  on_boundary_.assign(num_dofs_, 0);

  const Rect& dom = m.domain();
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangle(t);
    const ElementGeometry geo(m, t);
    int* d = dofs_.data() + static_cast<std::size_t>(t) * nloc;
    for (int l = 0; l < 3; ++l) d[l] = tri[l];
    for (int l = 0; l < 3; ++l) {
      const int e = m.triangle_edge(t, l);
      const bool aligned = tri[l] < tri[(l + 1) % 3];
      for (int s = 0; s < per_edge; ++s) {
        const int along = aligned ? s : per_edge - 1 - s;
        d[3 + l * per_edge + s] = m.num_vertices() + e * per_edge + along;
      }
    }
    if (per_cell) d[3 + 3 * per_edge] = m.num_vertices() + m.num_edges() * per_edge + t;
    for (int k = 0; k < nloc; ++k) {
      const Point x = geo.map(element_.nodes()[k]);
      dof_points_[d[k]] = x;
      on_boundary_[d[k]] = dom.on_boundary(x) ? 1 : 0;
    }
  }

  const auto& rule = triangle_rule();
  const int nq = static_cast<int>(rule.points.size());
  quad_values_.resize(nloc, nq);
  quad_grad_x_.resize(nloc, nq);
  quad_grad_y_.resize(nloc, nq);
  for (int q = 0; q < nq; ++q) {
    quad_values_.col(q) = element_.values(rule.points[q]);
    const auto g = element_.gradients(rule.points[q]);
    quad_grad_x_.col(q) = g.col(0);
    quad_grad_y_.col(q) = g.col(1);
  }
}

FeFunction::FeFunction(std::shared_ptr<const FeSpace> s, Vector c) : space(std::move(s)), coeffs(std::move(c)) {
  if (coeffs.size() != space->num_dofs()) throw std::invalid_argument("coefficient vector does not match space");
}

FeFunction FeFunction::zero(std::shared_ptr<const FeSpace> s) {
  const int n = s->num_dofs();
  return FeFunction(std::move(s), Vector::Zero(n));
}

Scalar FeFunction::value_in(int t, const Point& xi) const {
  const Vector phi = space->element().values(xi);
  const auto dofs = space->element_dofs(t);
  Scalar v = 0;
  for (std::size_t k = 0; k < dofs.size(); ++k) v += coeffs[dofs[k]] * phi[static_cast<int>(k)];
  return v;
}

Scalar FeFunction::operator()(const Point& x) const {
  const int t = space->mesh().locate(x);
  if (t < 0) throw std::out_of_range("point outside the mesh");
  const ElementGeometry geo(space->mesh(), t);
  return value_in(t, geo.pull_back(x));
}

Problem poisson_problem() {
  using std::numbers::pi;
  Problem p;
  p.name = "poisson";
  p.source = [](const Point& x) { return 8 * pi * pi * std::sin(2 * pi * x.x()) * std::sin(2 * pi * x.y()); };
  p.exact_solution = [](const Point& x) { return std::sin(2 * pi * x.x()) * std::sin(2 * pi * x.y()); };
  p.exact_rect_integral = [](const Rect& r) {
    const Scalar ix = (std::cos(2 * pi * r.x0) - std::cos(2 * pi * r.x1)) / (2 * pi);
    const Scalar iy = (std::cos(2 * pi * r.y0) - std::cos(2 * pi * r.y1)) / (2 * pi);
    return ix * iy;
  };
  return p;
}

Problem convection_diffusion_problem() {
  Problem p;
  p.name = "convdiff";
  p.convection = Point(-60.0, 0.0);
  p.source = [](const Point&) { return 1.0; };
  return p;
}

std::vector<int> all_elements(const Mesh& mesh) {
  std::vector<int> out(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) out[t] = t;
  return out;
}

namespace {

void require_same_mesh(const FeSpace& a, const FeSpace& b) {
  if (&a.mesh() != &b.mesh()) throw std::invalid_argument("spaces are defined on different meshes");
}

// Physical gradients at all quadrature points: rows = shape, cols = qpoints.
void physical_gradients(const FeSpace& s, const ElementGeometry& geo, Matrix& gx, Matrix& gy) {
  const Eigen::Matrix2d& it = geo.inverse_transpose;
  gx = it(0, 0) * s.quad_grad_x() + it(0, 1) * s.quad_grad_y();
  gy = it(1, 0) * s.quad_grad_x() + it(1, 1) * s.quad_grad_y();
}

}  // namespace

SparseMatrix assemble_operator(const FeSpace& trial, const FeSpace& test, const Problem& problem,
                               std::span<const int> elements, FormOrientation orientation) {
  require_same_mesh(trial, test);
  const auto& rule = triangle_rule();
  const int nq = static_cast<int>(rule.weights.size());
  const int nu = trial.dofs_per_element(), nv = test.dofs_per_element();
  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(elements.size() * static_cast<std::size_t>(nu * nv));
  Matrix ux, uy, vx, vy, local(nv, nu);
  const bool convective = problem.convection.squaredNorm() > 0;
  const Scalar bx = problem.convection.x(), by = problem.convection.y();
  for (int t : elements) {
    const ElementGeometry geo(trial.mesh(), t);
    physical_gradients(trial, geo, ux, uy);
    physical_gradients(test, geo, vx, vy);
    const Scalar jac = std::abs(geo.det);
    Eigen::RowVectorXd w(nq);
    for (int q = 0; q < nq; ++q) w[q] = rule.weights[q] * jac;
    // local(r, c) = a(trial_c, test_r) in the forward orientation
    if (orientation == FormOrientation::forward) {
      local = problem.diffusion * (vx * w.asDiagonal() * ux.transpose() + vy * w.asDiagonal() * uy.transpose());
      if (convective) local += test.quad_values() * w.asDiagonal() * (bx * ux + by * uy).transpose();
    } else {
      // a(test_r, trial_c): convection acts on the test function
      local = problem.diffusion * (vx * w.asDiagonal() * ux.transpose() + vy * w.asDiagonal() * uy.transpose());
      if (convective) local += (bx * vx + by * vy) * w.asDiagonal() * trial.quad_values().transpose();
    }
    const auto rd = test.element_dofs(t);
    const auto cd = trial.element_dofs(t);
    for (int r = 0; r < nv; ++r)
      for (int c = 0; c < nu; ++c) triplets.emplace_back(rd[r], cd[c], local(r, c));
  }
  SparseMatrix a(test.num_dofs(), trial.num_dofs());
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

Vector assemble_load(const FeSpace& test, const ScalarField& g, std::span<const int> elements) {
  const auto& rule = triangle_rule();
  const int nq = static_cast<int>(rule.weights.size());
  Vector out = Vector::Zero(test.num_dofs());
  for (int t : elements) {
    const ElementGeometry geo(test.mesh(), t);
    const Scalar jac = std::abs(geo.det);
    const auto dofs = test.element_dofs(t);
    for (int q = 0; q < nq; ++q) {
      const Scalar gw = g(geo.map(rule.points[q])) * rule.weights[q] * jac;
      if (gw == 0) continue;
      for (std::size_t k = 0; k < dofs.size(); ++k) out[dofs[k]] += gw * test.quad_values()(static_cast<int>(k), q);
    }
  }
  return out;
}

Scalar inner_product(const FeFunction& u, const ScalarField& w, std::span<const int> elements) {
  const FeSpace& s = *u.space;
  const auto& rule = triangle_rule();
  const int nq = static_cast<int>(rule.weights.size());
  Scalar sum = 0;
  Vector local(s.dofs_per_element());
  for (int t : elements) {
    const ElementGeometry geo(s.mesh(), t);
    const auto dofs = s.element_dofs(t);
    for (std::size_t k = 0; k < dofs.size(); ++k) local[static_cast<int>(k)] = u.coeffs[dofs[k]];
    const Eigen::RowVectorXd uq = local.transpose() * s.quad_values();
    for (int q = 0; q < nq; ++q) {
      const Scalar wq = w(geo.map(rule.points[q]));
      if (wq != 0) sum += uq[q] * wq * rule.weights[q] * std::abs(geo.det);
    }
  }
  return sum;
}

Scalar inner_product(const Mesh& mesh, const ScalarField& u, const ScalarField& w, std::span<const int> elements) {
  const auto& rule = triangle_rule();
  Scalar sum = 0;
  for (int t : elements) {
    const ElementGeometry geo(mesh, t);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Point x = geo.map(rule.points[q]);
      sum += u(x) * w(x) * rule.weights[q] * std::abs(geo.det);
    }
  }
  return sum;
}

FeFunction interpolate(const FeFunction& source, std::shared_ptr<const FeSpace> target, const std::vector<char>* zero_mask) {
  const FeSpace& src = *source.space;
  FeFunction out = FeFunction::zero(target);
  const FeSpace& tgt = *target;
  if (&src.mesh() == &tgt.mesh()) {
    // Tabulate source shapes at the target's reference nodes once.
    const auto& nodes = tgt.element().nodes();
    Matrix table(src.dofs_per_element(), static_cast<int>(nodes.size()));
    for (std::size_t k = 0; k < nodes.size(); ++k) table.col(static_cast<int>(k)) = src.element().values(nodes[k]);
    Vector local(src.dofs_per_element());
    for (int t = 0; t < src.mesh().num_triangles(); ++t) {
      const auto sd = src.element_dofs(t);
      for (std::size_t k = 0; k < sd.size(); ++k) local[static_cast<int>(k)] = source.coeffs[sd[k]];
      const Vector vals = table.transpose() * local;
      const auto td = tgt.element_dofs(t);
      for (std::size_t k = 0; k < td.size(); ++k) out.coeffs[td[k]] = vals[static_cast<int>(k)];
    }
  } else {
    for (int d = 0; d < tgt.num_dofs(); ++d) {
      const Point& x = tgt.dof_point(d);
      const int t = src.mesh().locate(x);
      if (t < 0) throw std::out_of_range("target node outside the source mesh");
      out.coeffs[d] = source.value_in(t, ElementGeometry(src.mesh(), t).pull_back(x));
    }
  }
  if (zero_mask)
    for (int d = 0; d < tgt.num_dofs(); ++d)
      if ((*zero_mask)[d]) out.coeffs[d] = 0;
  return out;
}

Scalar apply_form(const FeFunction& u, const FeFunction& v, const Problem& problem, std::span<const int> elements) {
  const FeSpace& su = *u.space;
  const FeSpace& sv = *v.space;
  require_same_mesh(su, sv);
  const auto& rule = triangle_rule();
  const int nq = static_cast<int>(rule.weights.size());
  Vector lu(su.dofs_per_element()), lv(sv.dofs_per_element());
  Scalar sum = 0;
  Matrix ux, uy, vx, vy;
  for (int t : elements) {
    const ElementGeometry geo(su.mesh(), t);
    const auto du = su.element_dofs(t);
    const auto dv = sv.element_dofs(t);
    for (std::size_t k = 0; k < du.size(); ++k) lu[static_cast<int>(k)] = u.coeffs[du[k]];
    for (std::size_t k = 0; k < dv.size(); ++k) lv[static_cast<int>(k)] = v.coeffs[dv[k]];
    physical_gradients(su, geo, ux, uy);
    physical_gradients(sv, geo, vx, vy);
    const Eigen::RowVectorXd gux = lu.transpose() * ux, guy = lu.transpose() * uy;
    const Eigen::RowVectorXd gvx = lv.transpose() * vx, gvy = lv.transpose() * vy;
    const Eigen::RowVectorXd vq = lv.transpose() * sv.quad_values();
    Scalar local = 0;
    for (int q = 0; q < nq; ++q) {
      const Scalar integrand = problem.diffusion * (gux[q] * gvx[q] + guy[q] * gvy[q]) +
                               (problem.convection.x() * gux[q] + problem.convection.y() * guy[q]) * vq[q];
      local += rule.weights[q] * integrand;
    }
    sum += local * std::abs(geo.det);
  }
  return sum;
}

Scalar apply_load(const FeFunction& v, const Problem& problem, std::span<const int> elements) {
  return inner_product(v, problem.source, elements);
}

}  // namespace ddest
