#include "ddest/solver.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

namespace ddest {

struct SparseLuSolver::Impl {
  SparseMatrix matrix;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
};

SparseLuSolver::SparseLuSolver() = default;
SparseLuSolver::SparseLuSolver(const SparseMatrix& a) { factorize(a); }
SparseLuSolver::~SparseLuSolver() = default;
SparseLuSolver::SparseLuSolver(SparseLuSolver&&) noexcept = default;
SparseLuSolver& SparseLuSolver::operator=(SparseLuSolver&&) noexcept = default;

int SparseLuSolver::rows() const { return impl_ ? static_cast<int>(impl_->matrix.rows()) : 0; }

void SparseLuSolver::factorize(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw SolverError("matrix is not square");
  impl_ = std::make_unique<Impl>();
  impl_->matrix = a;
  impl_->matrix.makeCompressed();
  if (a.rows() == 0) return;
  impl_->lu.analyzePattern(impl_->matrix);
  impl_->lu.factorize(impl_->matrix);
  if (impl_->lu.info() != Eigen::Success) {
    const std::string msg = impl_->lu.lastErrorMessage();
    int pivot = -1;
    if (const auto at = msg.rfind("AT "); at != std::string::npos) pivot = std::stoi(msg.substr(at + 3));
    throw SolverError("singular matrix: " + msg, pivot);
  }
}

Vector SparseLuSolver::solve(const Vector& b) const {
  if (!impl_) throw SolverError("solve called before factorize");
  if (b.size() != impl_->matrix.rows()) throw SolverError("right-hand side has wrong size");
  if (b.size() == 0) return b;
  Vector x = impl_->lu.solve(b);
  const Scalar bnorm = b.norm();
  Vector r = b - impl_->matrix * x;
  if (r.norm() > 1e-12 * bnorm) {
    x += impl_->lu.solve(r);
    r = b - impl_->matrix * x;
  }
  if (!x.allFinite()) throw SolverError("solution is not finite");
  return x;
}

Vector solve(const LinearSystem& system) {
  return SparseLuSolver(system.matrix).solve(system.rhs);
}

SparseMatrix restrict_matrix(const SparseMatrix& a, std::span<const int> rows, std::span<const int> cols) {
  std::vector<int> row_map(a.rows(), -1), col_map(a.cols(), -1);
  for (std::size_t k = 0; k < rows.size(); ++k) row_map[rows[k]] = static_cast<int>(k);
  for (std::size_t k = 0; k < cols.size(); ++k) col_map[cols[k]] = static_cast<int>(k);
  std::vector<Eigen::Triplet<Scalar>> trip;
  for (int c = 0; c < a.outerSize(); ++c) {
    if (col_map[c] < 0) continue;
    for (SparseMatrix::InnerIterator it(a, c); it; ++it)
      if (row_map[it.row()] >= 0) trip.emplace_back(row_map[it.row()], col_map[c], it.value());
  }
  SparseMatrix out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Vector restrict_vector(const Vector& v, std::span<const int> dofs) {
  Vector out(static_cast<int>(dofs.size()));
  for (std::size_t k = 0; k < dofs.size(); ++k) out[static_cast<int>(k)] = v[dofs[k]];
  return out;
}

}  // namespace ddest
