#include "ddest/mesh.hpp"

#include <map>
#include <ostream>
#include <unordered_map>

namespace ddest {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

Mesh::Mesh(Rect domain, std::vector<Point> vertices, std::vector<Triangle> triangles)
    : domain_(domain), vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (domain_.degenerate()) throw ConfigError("mesh domain is degenerate");
  for (int t = 0; t < num_triangles(); ++t) {
    for (int v : triangles_[t])
      if (v < 0 || v >= num_vertices()) throw std::invalid_argument("triangle references missing vertex");
    if (!(signed_area(t) > 0)) throw std::invalid_argument("triangle " + std::to_string(t) + " is not counterclockwise");
  }

  std::unordered_map<std::uint64_t, int> index;
  index.reserve(triangles_.size() * 2);
  triangle_edges_.resize(triangles_.size());
  for (int t = 0; t < num_triangles(); ++t) {
    for (int l = 0; l < 3; ++l) {
      const int a = triangles_[t][l], b = triangles_[t][(l + 1) % 3];
      auto [it, inserted] = index.try_emplace(edge_key(a, b), num_edges());
      if (inserted) {
        edges_.push_back({std::min(a, b), std::max(a, b)});
        edge_triangles_.push_back({t, -1});
      } else {
        auto& adj = edge_triangles_[it->second];
        if (adj[1] != -1) throw std::invalid_argument("edge shared by more than two triangles");
        adj[1] = t;
      }
      triangle_edges_[t][l] = it->second;
    }
  }

  boundary_vertex_.assign(vertices_.size(), 0);
  for (int e = 0; e < num_edges(); ++e)
    if (edge_triangles_[e][1] == -1) boundary_vertex_[edges_[e][0]] = boundary_vertex_[edges_[e][1]] = 1;
}

Scalar Mesh::signed_area(int t) const {
  const auto& tri = triangles_[t];
  const Point a = vertices_[tri[1]] - vertices_[tri[0]];
  const Point b = vertices_[tri[2]] - vertices_[tri[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

Point Mesh::centroid(int t) const {
  const auto& tri = triangles_[t];
  return (vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]]) / 3.0;
}

Scalar Mesh::total_area() const {
  Scalar sum = 0;
  for (int t = 0; t < num_triangles(); ++t) sum += signed_area(t);
  return sum;
}

std::array<Scalar, 3> Mesh::barycentric(int t, const Point& p) const {
  const auto& tri = triangles_[t];
  const Point& a = vertices_[tri[0]];
  const Point& b = vertices_[tri[1]];
  const Point& c = vertices_[tri[2]];
  const Scalar det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
  const Scalar l1 = ((p.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (p.y() - a.y())) / det;
  const Scalar l2 = ((b.x() - a.x()) * (p.y() - a.y()) - (p.x() - a.x()) * (b.y() - a.y())) / det;
  return {1 - l1 - l2, l1, l2};
}

void Mesh::build_buckets() const {
  const int n = std::max(1, static_cast<int>(std::sqrt(num_triangles() / 2.0)));
  bucket_nx_ = bucket_ny_ = n;
  auto grid = std::make_shared<std::vector<std::vector<int>>>(static_cast<std::size_t>(n) * n);
  const Scalar dx = domain_.width() / n, dy = domain_.height() / n;
  auto clampi = [n](int i) { return std::clamp(i, 0, n - 1); };
  for (int t = 0; t < num_triangles(); ++t) {
    Scalar xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int v : triangles_[t]) {
      xmin = std::min(xmin, vertices_[v].x());
      xmax = std::max(xmax, vertices_[v].x());
      ymin = std::min(ymin, vertices_[v].y());
      ymax = std::max(ymax, vertices_[v].y());
    }
    const int i0 = clampi(static_cast<int>(std::floor((xmin - domain_.x0) / dx - 1e-9)));
    const int i1 = clampi(static_cast<int>(std::floor((xmax - domain_.x0) / dx + 1e-9)));
    const int j0 = clampi(static_cast<int>(std::floor((ymin - domain_.y0) / dy - 1e-9)));
    const int j1 = clampi(static_cast<int>(std::floor((ymax - domain_.y0) / dy + 1e-9)));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) (*grid)[static_cast<std::size_t>(j) * n + i].push_back(t);
  }
  buckets_ = std::move(grid);
}

int Mesh::locate(const Point& p) const {
  if (!domain_.contains(p)) return -1;
  if (!buckets_) build_buckets();
  const int i = std::clamp(static_cast<int>((p.x() - domain_.x0) / domain_.width() * bucket_nx_), 0, bucket_nx_ - 1);
  const int j = std::clamp(static_cast<int>((p.y() - domain_.y0) / domain_.height() * bucket_ny_), 0, bucket_ny_ - 1);
  int best = -1;
  Scalar best_min = -1e300;
  for (int t : (*buckets_)[static_cast<std::size_t>(j) * bucket_nx_ + i]) {
    const auto l = barycentric(t, p);
    const Scalar m = std::min({l[0], l[1], l[2]});
    if (m > best_min) {
      best_min = m;
      best = t;
    }
  }
  return best_min >= -1e-9 ? best : -1;
}

std::vector<int> Mesh::hanging_vertices() const {
  // Bucket vertices on a grid and test each edge against nearby vertices.
  const int n = std::max(1, static_cast<int>(std::sqrt(num_vertices() / 4.0)));
  std::vector<std::vector<int>> grid(static_cast<std::size_t>(n) * n);
  auto cell = [&](Scalar v, Scalar lo, Scalar len) {
    return std::clamp(static_cast<int>((v - lo) / len * n), 0, n - 1);
  };
  for (int v = 0; v < num_vertices(); ++v)
    grid[static_cast<std::size_t>(cell(vertices_[v].y(), domain_.y0, domain_.height())) * n +
         cell(vertices_[v].x(), domain_.x0, domain_.width())]
        .push_back(v);

  std::vector<int> hanging;
  for (const auto& e : edges_) {
    const Point& a = vertices_[e[0]];
    const Point& b = vertices_[e[1]];
    const int i0 = cell(std::min(a.x(), b.x()), domain_.x0, domain_.width());
    const int i1 = cell(std::max(a.x(), b.x()), domain_.x0, domain_.width());
    const int j0 = cell(std::min(a.y(), b.y()), domain_.y0, domain_.height());
    const int j1 = cell(std::max(a.y(), b.y()), domain_.y0, domain_.height());
    const Point d = b - a;
    const Scalar len2 = d.squaredNorm();
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        for (int v : grid[static_cast<std::size_t>(j) * n + i]) {
          if (v == e[0] || v == e[1]) continue;
          const Point w = vertices_[v] - a;
          const Scalar s = w.dot(d) / len2;
          if (s <= 1e-12 || s >= 1 - 1e-12) continue;
          const Scalar cross = d.x() * w.y() - d.y() * w.x();
          if (std::abs(cross) <= kGeomTol * std::sqrt(len2)) hanging.push_back(v);
        }
  }
  std::sort(hanging.begin(), hanging.end());
  hanging.erase(std::unique(hanging.begin(), hanging.end()), hanging.end());
  return hanging;
}

Mesh build_uniform(int nx, int ny, const Rect& rect) {
  if (nx < 1 || ny < 1) throw ConfigError("cell counts must be positive (nx=" + std::to_string(nx) + ", ny=" + std::to_string(ny) + ")");
  if (rect.degenerate()) throw ConfigError("mesh rectangle is degenerate");
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      vertices.emplace_back(rect.x0 + rect.width() * i / nx, rect.y0 + rect.height() * j / ny);
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<Mesh::Triangle> triangles;
  triangles.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return Mesh(rect, std::move(vertices), std::move(triangles));
}

namespace {

int longest_local_edge(const Mesh& mesh, int t) {
  const auto& v = mesh.triangle(t);
  int best = 0;
  Scalar best_len = -1;
  for (int l = 0; l < 3; ++l) {
    const Scalar len = (mesh.vertex(v[(l + 1) % 3]) - mesh.vertex(v[l])).squaredNorm();
    if (len > best_len * (1 + 1e-12)) {
      best = l;
      best_len = len;
    }
  }
  return best;
}

Mesh refine_marked(const Mesh& mesh, std::vector<char> red, Closure closure = Closure::green) {
  const int nt = mesh.num_triangles();
  std::vector<char> split(mesh.num_edges(), 0);
  for (int t = 0; t < nt; ++t)
    if (red[t])
      for (int l = 0; l < 3; ++l) split[mesh.triangle_edge(t, l)] = 1;

  // Closure: two or more split edges promote a triangle to red. Under
  // longest-edge closure a triangle with any split edge also splits its
  // longest edge, and only three split edges promote it.
  const int promote = closure == Closure::green ? 2 : 3;
  for (bool changed = true; changed;) {
    changed = false;
    for (int t = 0; t < nt; ++t) {
      if (red[t]) continue;
      if (closure == Closure::longest_edge) {
        const int e = mesh.triangle_edge(t, longest_local_edge(mesh, t));
        if (!split[e] && (split[mesh.triangle_edge(t, 0)] || split[mesh.triangle_edge(t, 1)] ||
                          split[mesh.triangle_edge(t, 2)])) {
          split[e] = 1;
          changed = true;
        }
      }
      int count = 0;
      for (int l = 0; l < 3; ++l) count += split[mesh.triangle_edge(t, l)];
      if (count >= promote) {
        red[t] = 1;
        for (int l = 0; l < 3; ++l) split[mesh.triangle_edge(t, l)] = 1;
        changed = true;
      }
    }
  }

  std::vector<Point> vertices = mesh.vertices();
  std::vector<int> midpoint(mesh.num_edges(), -1);
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (split[e]) {
      midpoint[e] = static_cast<int>(vertices.size());
      vertices.push_back(0.5 * (mesh.vertex(mesh.edge(e)[0]) + mesh.vertex(mesh.edge(e)[1])));
    }

  std::vector<Mesh::Triangle> triangles;
  triangles.reserve(static_cast<std::size_t>(nt) * 2);
  for (int t = 0; t < nt; ++t) {
    const auto& v = mesh.triangle(t);
    std::array<int, 3> m{};
    int nsplit = 0, which = -1;
    for (int l = 0; l < 3; ++l) {
      m[l] = midpoint[mesh.triangle_edge(t, l)];
      if (m[l] >= 0) {
        ++nsplit;
        which = l;
      }
    }
    if (red[t]) {
      // m[0] on (v0,v1), m[1] on (v1,v2), m[2] on (v2,v0)
      triangles.push_back({v[0], m[0], m[2]});
      triangles.push_back({m[0], v[1], m[1]});
      triangles.push_back({m[2], m[1], v[2]});
      triangles.push_back({m[0], m[1], m[2]});
    } else if (nsplit == 1) {
      const int a = v[which], b = v[(which + 1) % 3], c = v[(which + 2) % 3];
      triangles.push_back({a, m[which], c});
      triangles.push_back({m[which], b, c});
    } else if (nsplit == 2) {
      // Bisect the longest edge, then the child holding the other split edge.
      const int L = longest_local_edge(mesh, t);
      const int a = v[L], b = v[(L + 1) % 3], c = v[(L + 2) % 3];
      const int mid = m[L];
      if (m[(L + 1) % 3] >= 0) {  // edge (b, c)
        triangles.push_back({a, mid, c});
        triangles.push_back({mid, b, m[(L + 1) % 3]});
        triangles.push_back({mid, m[(L + 1) % 3], c});
      } else {  // edge (c, a)
        triangles.push_back({mid, b, c});
        triangles.push_back({a, mid, m[(L + 2) % 3]});
        triangles.push_back({m[(L + 2) % 3], mid, c});
      }
    } else {
      triangles.push_back(v);
    }
  }
  return Mesh(mesh.domain(), std::move(vertices), std::move(triangles));
}

}  // namespace

Mesh refine_region(const Mesh& mesh, const Rect& region, Closure closure) {
  std::vector<char> red(mesh.num_triangles(), 0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Scalar overlap = triangle_rect_overlap_area(mesh, t, region);
    const Scalar area = mesh.signed_area(t);
    if (overlap > 1e-12 * area && overlap < (1 - 1e-9) * area)
      throw ConfigError("refinement region is not aligned with the mesh (triangle " + std::to_string(t) + " straddles it)");
    red[t] = overlap >= (1 - 1e-9) * area;
  }
  return refine_marked(mesh, std::move(red), closure);
}

Mesh refine_uniform(const Mesh& mesh, int levels) {
  Mesh out = mesh;
  for (int l = 0; l < levels; ++l) out = refine_marked(out, std::vector<char>(out.num_triangles(), 1));
  return out;
}

Scalar triangle_rect_overlap_area(const Mesh& mesh, int t, const Rect& r) {
  std::vector<Point> poly;
  for (int v : mesh.triangle(t)) poly.push_back(mesh.vertex(v));
  // Sutherland-Hodgman against the four half-planes of r.
  auto clip = [&](auto inside, auto intersect) {
    std::vector<Point> out;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Point& cur = poly[k];
      const Point& prev = poly[(k + poly.size() - 1) % poly.size()];
      const bool cin = inside(cur), pin = inside(prev);
      if (cin) {
        if (!pin) out.push_back(intersect(prev, cur));
        out.push_back(cur);
      } else if (pin) {
        out.push_back(intersect(prev, cur));
      }
    }
    poly = std::move(out);
  };
  auto at_x = [](Scalar x) {
    return [x](const Point& a, const Point& b) {
      const Scalar s = (x - a.x()) / (b.x() - a.x());
      return Point(x, a.y() + s * (b.y() - a.y()));
    };
  };
  auto at_y = [](Scalar y) {
    return [y](const Point& a, const Point& b) {
      const Scalar s = (y - a.y()) / (b.y() - a.y());
      return Point(a.x() + s * (b.x() - a.x()), y);
    };
  };
  clip([&](const Point& p) { return p.x() >= r.x0; }, at_x(r.x0));
  if (poly.empty()) return 0;
  clip([&](const Point& p) { return p.x() <= r.x1; }, at_x(r.x1));
  if (poly.empty()) return 0;
  clip([&](const Point& p) { return p.y() >= r.y0; }, at_y(r.y0));
  if (poly.empty()) return 0;
  clip([&](const Point& p) { return p.y() <= r.y1; }, at_y(r.y1));
  if (poly.size() < 3) return 0;
  Scalar area = 0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point& a = poly[k];
    const Point& b = poly[(k + 1) % poly.size()];
    area += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(area);
}

bool element_region_consistency(const Mesh& mesh, const std::vector<Rect>& rects) {
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Scalar area = mesh.signed_area(t);
    for (const auto& r : rects) {
      const Scalar overlap = triangle_rect_overlap_area(mesh, t, r);
      if (overlap > 1e-12 * area && overlap < (1 - 1e-9) * area) return false;
    }
  }
  return true;
}

std::vector<int> elements_in(const Mesh& mesh, const Rect& region) {
  std::vector<int> out;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (region.strictly_contains(mesh.centroid(t), 0.0)) out.push_back(t);
  return out;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "vertices " << mesh.num_vertices() << " triangles " << mesh.num_triangles() << '\n';
  const auto old = os.precision(17);
  for (const auto& p : mesh.vertices()) os << p.x() << ' ' << p.y() << '\n';
  os.precision(old);
  for (const auto& t : mesh.triangles()) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace ddest
