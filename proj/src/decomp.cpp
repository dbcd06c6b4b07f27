#include "ddest/decomp.hpp"

#include <limits>

namespace ddest {

Scalar Segment::distance(const Point& p) const {
  const Point d = b - a;
  const Scalar len2 = d.squaredNorm();
  const Scalar s = len2 > 0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + s * d)).norm();
}

Decomposition::Decomposition(std::shared_ptr<const Mesh> mesh, std::vector<Rect> rects, std::vector<int> sweep_order)
    : mesh_(std::move(mesh)), rects_(std::move(rects)), sweep_order_(std::move(sweep_order)) {
  const int p = size();
  if (p == 0) throw ConfigError("decomposition needs at least one subdomain");
  const Rect& dom = mesh_->domain();
  for (int i = 0; i < p; ++i) {
    const Rect& r = rects_[i];
    if (r.degenerate()) throw ConfigError("subdomain " + std::to_string(i + 1) + " is degenerate");
    if (r.x0 < dom.x0 - kGeomTol || r.x1 > dom.x1 + kGeomTol || r.y0 < dom.y0 - kGeomTol || r.y1 > dom.y1 + kGeomTol)
      throw ConfigError("subdomain " + std::to_string(i + 1) + " extends outside the domain");
    if (!element_region_consistency(*mesh_, {r}))
      throw ConfigError("subdomain " + std::to_string(i + 1) + " is not aligned with the mesh");
  }

  if (sweep_order_.empty()) {
    for (int i = 0; i < p; ++i) sweep_order_.push_back(i);
  } else {
    std::vector<int> sorted = sweep_order_;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < p; ++i)
      if (static_cast<int>(sorted.size()) != p || sorted[i] != i) throw ConfigError("sweep order is not a permutation of the subdomains");
  }

  elements_.resize(p);
  for (int i = 0; i < p; ++i) elements_[i] = elements_in(*mesh_, rects_[i]);
  std::vector<char> covered(mesh_->num_triangles(), 0);
  for (const auto& el : elements_)
    for (int t : el) covered[t] = 1;
  if (std::find(covered.begin(), covered.end(), 0) != covered.end())
    throw ConfigError("subdomains do not cover the domain");

  overlaps_.resize(static_cast<std::size_t>(p) * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      auto& out = overlaps_[i * p + j];
      std::set_intersection(elements_[i].begin(), elements_[i].end(), elements_[j].begin(), elements_[j].end(),
                            std::back_inserter(out));
    }
  if (p > 1)
    for (int i = 0; i < p; ++i) {
      bool any = false;
      for (int j = 0; j < p; ++j) any = any || (j != i && overlaps(i, j));
      if (!any) throw ConfigError("subdomain " + std::to_string(i + 1) + " overlaps no other subdomain");
    }

  interior_boundary_.resize(p);
  for (int i = 0; i < p; ++i) {
    const Rect& r = rects_[i];
    auto& segs = interior_boundary_[i];
    if (r.x0 > dom.x0 + kGeomTol) segs.push_back({Point(r.x0, r.y0), Point(r.x0, r.y1)});
    if (r.x1 < dom.x1 - kGeomTol) segs.push_back({Point(r.x1, r.y0), Point(r.x1, r.y1)});
    if (r.y0 > dom.y0 + kGeomTol) segs.push_back({Point(r.x0, r.y0), Point(r.x1, r.y0)});
    if (r.y1 < dom.y1 - kGeomTol) segs.push_back({Point(r.x0, r.y1), Point(r.x1, r.y1)});
  }
}

Scalar Decomposition::distance_weight(int i, const Point& x) const {
  if (!rects_[i].contains(x, 0.0)) return 0.0;
  const auto& segs = interior_boundary_[i];
  if (segs.empty()) return std::numeric_limits<Scalar>::infinity();
  Scalar d = std::numeric_limits<Scalar>::infinity();
  for (const auto& s : segs) d = std::min(d, s.distance(x));
  return d;
}

Vector Decomposition::chi(const Point& x) const {
  const int p = size();
  Vector d(p);
  for (int i = 0; i < p; ++i) d[i] = distance_weight(i, x);
  Vector chi = Vector::Zero(p);
  const int n_inf = static_cast<int>((d.array() == std::numeric_limits<Scalar>::infinity()).count());
  if (n_inf > 0) {
    for (int i = 0; i < p; ++i)
      if (std::isinf(d[i])) chi[i] = 1.0 / n_inf;
    return chi;
  }
  const Scalar sum = d.sum();
  if (sum > 0) return d / sum;
  // x lies on every covering interior boundary: split equally
  int covering = 0;
  for (int i = 0; i < p; ++i) covering += rects_[i].contains(x, 0.0) ? 1 : 0;
  for (int i = 0; i < p; ++i)
    if (rects_[i].contains(x, 0.0)) chi[i] = 1.0 / covering;
  return chi;
}

SubdomainDofs Decomposition::dofs(const FeSpace& space, int i) const {
  if (&space.mesh() != mesh_.get()) throw std::invalid_argument("space is not defined on the decomposition mesh");
  SubdomainDofs out;
  std::vector<char> seen(space.num_dofs(), 0);
  for (int t : elements_[i])
    for (int d : space.element_dofs(t)) seen[d] = 1;
  for (int d = 0; d < space.num_dofs(); ++d) {
    if (!seen[d]) continue;
    out.closure.push_back(d);
    (rects_[i].on_boundary(space.dof_point(d)) ? out.boundary : out.interior).push_back(d);
  }
  out.outside_interior.assign(space.num_dofs(), 1);
  for (int d : out.interior) out.outside_interior[d] = 0;
  return out;
}

std::vector<Rect> grid_rects(int px, int py, Scalar beta, const Rect& domain) {
  if (px < 1 || py < 1) throw ConfigError("subdomain counts must be positive");
  if (!(beta >= 0)) throw ConfigError("overlap beta must be non-negative");
  const Scalar wx = domain.width() / px, wy = domain.height() / py;
  if ((px > 1 && beta > wx + kGeomTol) || (py > 1 && beta > wy + kGeomTol))
    throw ConfigError("overlap beta exceeds a base cell width");
  std::vector<Rect> rects;
  for (int j = 0; j < py; ++j)
    for (int i = 0; i < px; ++i) {
      Rect r{domain.x0 + wx * i, domain.x0 + wx * (i + 1), domain.y0 + wy * j, domain.y0 + wy * (j + 1)};
      if (i > 0) r.x0 -= beta;
      if (i < px - 1) r.x1 += beta;
      if (j > 0) r.y0 -= beta;
      if (j < py - 1) r.y1 += beta;
      r.x0 = std::max(r.x0, domain.x0);
      r.x1 = std::min(r.x1, domain.x1);
      r.y0 = std::max(r.y0, domain.y0);
      r.y1 = std::min(r.y1, domain.y1);
      rects.push_back(r);
    }
  return rects;
}

Decomposition build_grid(int px, int py, Scalar beta, std::shared_ptr<const Mesh> mesh) {
  const Rect domain = mesh->domain();
  return Decomposition(std::move(mesh), grid_rects(px, py, beta, domain));
}

Qoi Qoi::indicator_of(const Rect& r) {
  Qoi q;
  q.indicator = r;
  q.density = [r](const Point& x) { return r.contains(x, 0.0) ? 1.0 : 0.0; };
  return q;
}

ScalarField localized_qoi(const Decomposition& decomp, const Qoi& qoi, int i) {
  return [&decomp, qoi, i](const Point& x) {
    const Scalar psi = qoi(x);
    return psi == 0 ? 0.0 : decomp.chi(x)[i] * psi;
  };
}

}  // namespace ddest
