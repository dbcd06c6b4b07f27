#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ddest/types.hpp"

namespace ddest {

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int pivot = -1) : std::runtime_error(what), pivot_(pivot) {}
  /// Offending pivot (column) index when the factorization detected one.
  int pivot() const { return pivot_; }

 private:
  int pivot_;
};

/// Square sparse system on the free dofs of a larger index space.
struct LinearSystem {
  SparseMatrix matrix;
  Vector rhs;
  std::vector<int> free_dofs;  // reduced index -> full index
};

/// Sparse LU with partial pivoting, factorized once and reused for any
/// number of right-hand sides. One step of iterative refinement is applied
/// whenever the relative residual exceeds 1e-12.
class SparseLuSolver {
 public:
  SparseLuSolver();
  explicit SparseLuSolver(const SparseMatrix& a);
  ~SparseLuSolver();
  SparseLuSolver(SparseLuSolver&&) noexcept;
  SparseLuSolver& operator=(SparseLuSolver&&) noexcept;

  void factorize(const SparseMatrix& a);
  Vector solve(const Vector& b) const;
  int rows() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Vector solve(const LinearSystem& system);

/// Rows and columns of `a` restricted to `dofs` (in the given order).
SparseMatrix restrict_matrix(const SparseMatrix& a, std::span<const int> rows, std::span<const int> cols);
Vector restrict_vector(const Vector& v, std::span<const int> dofs);

}  // namespace ddest
