#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ddest/decomp.hpp"
#include "ddest/fem.hpp"
#include "ddest/solver.hpp"

namespace ddest {

enum class Method { multiplicative, additive };

std::string to_string(Method m);
Method parse_method(const std::string& s);

struct SchwarzConfig {
  Method method = Method::multiplicative;
  int iterations = 1;  ///< K
  Scalar tau = 1.0;    ///< Richardson relaxation, additive only
  int degree = 1;
  std::optional<Vector> initial;  ///< U^0; zero when unset
  bool record_locals = true;      ///< keep every local solve and sub-step

  void validate() const;
};

/// History of a Schwarz run. All vectors are coefficient vectors in `space`.
struct SchwarzTrace {
  Method method = Method::multiplicative;
  std::shared_ptr<const FeSpace> space;
  int iterations = 0;
  Scalar tau = 1.0;
  std::vector<int> sweep_order;

  /// U^k after each full iteration, k = 0..K.
  std::vector<Vector> iterates;
  /// Multiplicative only: U^{k+s/p} after sweep position s (1-based), stored
  /// at index k*p + s - 1.
  std::vector<Vector> substeps;
  /// locals[k][i]: the local solve of subdomain i during iteration k
  /// (U~^{k+s/p} for multiplicative, U~_i^{k+1} for additive). Values are
  /// meaningful on the closure of subdomain i.
  std::vector<std::vector<Vector>> locals;

  FeFunction final_iterate() const { return FeFunction(space, iterates.back()); }
  FeFunction local(int k, int i) const { return FeFunction(space, locals[k][i]); }
};

/// Dirichlet solver for one subdomain: the restricted form is factorized
/// once and reused across iterations.
class LocalDirichletSolver {
 public:
  LocalDirichletSolver(const FeSpace& space, const Decomposition& decomp, int i, const Problem& problem,
                       FormOrientation orientation);

  const SubdomainDofs& dofs() const { return dofs_; }
  /// The subdomain-restricted operator over all dofs of the space.
  const SparseMatrix& matrix() const { return matrix_; }
  /// Solves the homogeneous-boundary problem with a full-length right-hand
  /// side; returns a full-length vector supported on the interior dofs.
  Vector solve(const Vector& rhs) const;

 private:
  SubdomainDofs dofs_;
  SparseMatrix matrix_;
  SparseLuSolver lu_;
};

SchwarzTrace run_multiplicative(const Problem& problem, const Decomposition& decomp, const SchwarzConfig& config);
SchwarzTrace run_additive(const Problem& problem, const Decomposition& decomp, const SchwarzConfig& config);
SchwarzTrace run_schwarz(const Problem& problem, const Decomposition& decomp, const SchwarzConfig& config);

/// Monolithic Galerkin solution on the whole space with homogeneous
/// Dirichlet conditions on the domain boundary.
FeFunction solve_global(const Problem& problem, std::shared_ptr<const FeSpace> space);

/// Indices of dofs not on the domain boundary.
std::vector<int> free_dofs(const FeSpace& space);

}  // namespace ddest
