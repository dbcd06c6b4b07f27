#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ddest/mesh.hpp"
#include "ddest/types.hpp"

namespace ddest {

using ScalarField = std::function<Scalar(const Point&)>;

/// Symmetric quadrature rule on the reference triangle (0,0), (1,0), (0,1).
/// Weights sum to the reference area 1/2.
struct TriangleQuadrature {
  std::vector<Point> points;
  std::vector<Scalar> weights;
  int exact_degree = 0;
};

/// The 12-point rule exact for polynomials of total degree 6.
const TriangleQuadrature& triangle_rule();

/// Lagrange shape functions of degree 1..3 on the reference triangle.
///
/// Local node order: the three vertices, then degree-1 nodes on each edge
/// (edge l runs from vertex l to vertex (l+1) % 3), then interior nodes.
class LagrangeElement {
 public:
  explicit LagrangeElement(int degree);

  int degree() const { return degree_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Point>& nodes() const { return nodes_; }

  /// Shape function values at a reference point.
  Vector values(const Point& xi) const;
  /// Reference gradients, one row per shape function.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> gradients(const Point& xi) const;

 private:
  int degree_;
  std::vector<Point> nodes_;
  std::vector<std::array<int, 2>> exponents_;
  Matrix coefficients_;  // column j holds the monomial coefficients of shape j
};

/// Affine map of a mesh triangle from the reference triangle.
struct ElementGeometry {
  Point origin;
  Eigen::Matrix2d jacobian;
  Eigen::Matrix2d inverse_transpose;
  Scalar det = 0;

  ElementGeometry(const Mesh& mesh, int t);
  Point map(const Point& xi) const { return origin + jacobian * xi; }
  Point pull_back(const Point& x) const { return inverse_transpose.transpose() * (x - origin); }
};

/// Continuous Lagrange space of degree 1..3 on a mesh. Immutable.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int degree() const { return element_.degree(); }
  const LagrangeElement& element() const { return element_; }
  int num_dofs() const { return num_dofs_; }
  int dofs_per_element() const { return element_.num_nodes(); }

  std::span<const int> element_dofs(int t) const {
    return {dofs_.data() + static_cast<std::size_t>(t) * dofs_per_element(), static_cast<std::size_t>(dofs_per_element())};
  }
  const Point& dof_point(int d) const { return dof_points_[d]; }
  /// True when the dof's node lies on the boundary of the mesh domain.
  bool on_domain_boundary(int d) const { return on_boundary_[d] != 0; }

  /// Shape values and reference gradients at the points of triangle_rule().
  const Matrix& quad_values() const { return quad_values_; }   // nodes x qpoints
  const Matrix& quad_grad_x() const { return quad_grad_x_; }   // reference d/dxi
  const Matrix& quad_grad_y() const { return quad_grad_y_; }   // reference d/deta

 private:
  std::shared_ptr<const Mesh> mesh_;
  LagrangeElement element_;
  int num_dofs_ = 0;
  std::vector<int> dofs_;
  std::vector<Point> dof_points_;
  std::vector<char> on_boundary_;
  Matrix quad_values_, quad_grad_x_, quad_grad_y_;
};

/// Coefficient vector bound to a space.
struct FeFunction {
  std::shared_ptr<const FeSpace> space;
  Vector coeffs;

  FeFunction() = default;
  FeFunction(std::shared_ptr<const FeSpace> s, Vector c);
  static FeFunction zero(std::shared_ptr<const FeSpace> s);

  /// Value inside element t at reference point xi.
  Scalar value_in(int t, const Point& xi) const;
  /// Point evaluation; throws std::out_of_range outside the mesh.
  Scalar operator()(const Point& x) const;
};

/// Second-order elliptic problem: -div(diffusion grad u) + b . grad u = f,
/// u = 0 on the boundary of the domain.
struct Problem {
  std::string name = "poisson";
  Scalar diffusion = 1.0;
  Point convection = Point::Zero();
  ScalarField source = [](const Point&) { return 0.0; };
  /// Closed-form solution when known.
  std::optional<ScalarField> exact_solution;
  /// Closed-form integral of the exact solution over a rectangle, when known.
  std::optional<std::function<Scalar(const Rect&)>> exact_rect_integral;
};

/// Poisson problem with f = 8 pi^2 sin(2 pi x) sin(2 pi y) on the unit square.
Problem poisson_problem();
/// Convection-diffusion with b = (-60, 0) and f = 1.
Problem convection_diffusion_problem();

enum class FormOrientation {
  forward,  ///< entry (r, c) = a(basis_c, basis_r)
  adjoint,  ///< entry (r, c) = a(basis_r, basis_c)
};

/// All mesh triangles, ascending.
std::vector<int> all_elements(const Mesh& mesh);

/// Assembles a restricted to `elements` as a test.num_dofs() x trial.num_dofs()
/// matrix. Both spaces must live on the same mesh.
SparseMatrix assemble_operator(const FeSpace& trial, const FeSpace& test, const Problem& problem,
                               std::span<const int> elements,
                               FormOrientation orientation = FormOrientation::forward);

/// Entry r = integral of g * basis_r over `elements`.
Vector assemble_load(const FeSpace& test, const ScalarField& g, std::span<const int> elements);

/// Integral of u * w over `elements`.
Scalar inner_product(const FeFunction& u, const ScalarField& w, std::span<const int> elements);
Scalar inner_product(const Mesh& mesh, const ScalarField& u, const ScalarField& w, std::span<const int> elements);

/// Nodal interpolation into `target`. Dofs flagged in `zero_mask` are set to 0.
FeFunction interpolate(const FeFunction& source, std::shared_ptr<const FeSpace> target,
                       const std::vector<char>* zero_mask = nullptr);

/// a(u, v) restricted to `elements`, by quadrature; u and v may use
/// different degrees on the same mesh.
Scalar apply_form(const FeFunction& u, const FeFunction& v, const Problem& problem, std::span<const int> elements);

/// l(v) restricted to `elements`.
Scalar apply_load(const FeFunction& v, const Problem& problem, std::span<const int> elements);

}  // namespace ddest
