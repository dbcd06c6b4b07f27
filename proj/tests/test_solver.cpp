#include <gtest/gtest.h>

#include <random>

#include <Eigen/Dense>

#include "ddest/solver.hpp"

using namespace ddest;

namespace {

SparseMatrix sparse(const Matrix& m) { return m.sparseView(); }

}  // namespace

TEST(Solver, Identity) {
  LinearSystem s{sparse(Matrix::Identity(5, 5)), Vector::LinSpaced(5, 1, 5), {0, 1, 2, 3, 4}};
  EXPECT_EQ((solve(s) - s.rhs).norm(), 0.0);
}

TEST(Solver, TwoByTwo) {
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const Vector x = SparseLuSolver(sparse(a)).solve(Vector::Constant(2, 3.0));
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
}

TEST(Solver, RandomDiagonallyDominantResidual) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix a(50, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) a(i, j) = (std::abs(i - j) < 4) ? u(rng) : 0.0;
  a.diagonal().array() += 10.0;
  Vector b(50);
  for (auto& v : b) v = u(rng);
  SparseLuSolver lu(sparse(a));
  const Vector x = lu.solve(b);
  EXPECT_LE((b - a * x).norm() / b.norm(), 1e-12);
  EXPECT_LE((x - a.partialPivLu().solve(b)).norm(), 1e-12);
  // Reuse with a second right-hand side.
  const Vector x2 = lu.solve(2 * b);
  EXPECT_LE((x2 - 2 * x).norm(), 1e-12);
}

TEST(Solver, SingularMatrixReportsPivot) {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1;
  a(2, 2) = 1;
  try {
    SparseLuSolver lu(sparse(a));
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_GE(e.pivot(), 0);
  }
}

TEST(Solver, ShapeMismatchRejected) {
  SparseLuSolver lu(sparse(Matrix::Identity(3, 3)));
  EXPECT_ANY_THROW(lu.solve(Vector::Ones(4)));
}

TEST(Solver, Restriction) {
  Matrix a(3, 3);
  a << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const std::vector<int> idx{2, 0};
  Matrix r = Matrix(restrict_matrix(sparse(a), idx, idx));
  Matrix expected(2, 2);
  expected << 9, 7, 3, 1;
  EXPECT_EQ(r, expected);
  EXPECT_EQ(restrict_vector(Vector::LinSpaced(3, 1, 3), idx), Eigen::Vector2d(3, 1));
}
