#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ddest/types.hpp"

namespace ddest::gs {

/// Block system M x = b with p dense blocks per side.
template <typename T>
struct BlockSystem {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  std::vector<int> block_sizes;
  Mat M;
  Vec b;

  int blocks() const { return static_cast<int>(block_sizes.size()); }
  int offset(int i) const {
    int o = 0;
    for (int k = 0; k < i; ++k) o += block_sizes[k];
    return o;
  }
  int size() const { return static_cast<int>(M.rows()); }
  auto block(int i, int j) const { return M.block(offset(i), offset(j), block_sizes[i], block_sizes[j]); }
  auto segment(const Vec& v, int i) const { return v.segment(offset(i), block_sizes[i]); }

  /// A = L + D: block lower triangle including the diagonal blocks.
  Mat lower() const {
    Mat a = Mat::Zero(size(), size());
    for (int i = 0; i < blocks(); ++i)
      for (int j = 0; j <= i; ++j) a.block(offset(i), offset(j), block_sizes[i], block_sizes[j]) = block(i, j);
    return a;
  }
  /// B = U: strictly upper block triangle.
  Mat upper() const { return M - lower(); }
};

/// K forward block Gauss-Seidel sweeps (L + D) x^{k+1} = b - U x^k.
/// Returns x^1..x^K.
template <typename T>
std::vector<typename BlockSystem<T>::Vec> gs_iterate(const BlockSystem<T>& sys, const typename BlockSystem<T>::Vec& x0,
                                                     int iterations) {
  using Vec = typename BlockSystem<T>::Vec;
  if (iterations < 1) throw ConfigError("iteration count K must be at least 1");
  const int p = sys.blocks();
  std::vector<Eigen::PartialPivLU<typename BlockSystem<T>::Mat>> diag;
  for (int i = 0; i < p; ++i) diag.emplace_back(sys.block(i, i));
  std::vector<Vec> out;
  Vec x = x0;
  for (int k = 0; k < iterations; ++k) {
    for (int i = 0; i < p; ++i) {
      Vec rhs = sys.segment(sys.b, i);
      for (int j = 0; j < p; ++j)
        if (j != i) rhs -= sys.block(i, j) * sys.segment(x, j);
      x.segment(sys.offset(i), sys.block_sizes[i]) = diag[i].solve(rhs);
    }
    out.push_back(x);
  }
  return out;
}

/// Backward adjoint recursion: phi[k][i] is the block i adjoint at level
/// k + 1, k = 0..K-1.
///   A_ii^T phi_i^K = psi_i - sum_{j>i} A_ji^T phi_j^K
///   A_ii^T phi_i^k = -sum_{j<i} A_ji^T phi_j^{k+1} - sum_{j>i} A_ji^T phi_j^k
template <typename T>
std::vector<std::vector<typename BlockSystem<T>::Vec>> gs_adjoint(const BlockSystem<T>& sys,
                                                                  const typename BlockSystem<T>::Vec& psi,
                                                                  int iterations) {
  using Vec = typename BlockSystem<T>::Vec;
  using Mat = typename BlockSystem<T>::Mat;
  if (iterations < 1) throw ConfigError("iteration count K must be at least 1");
  const int p = sys.blocks();
  std::vector<Eigen::PartialPivLU<Mat>> diag_t;
  for (int i = 0; i < p; ++i) diag_t.emplace_back(Mat(sys.block(i, i).transpose()));
  std::vector<std::vector<Vec>> phi(iterations, std::vector<Vec>(p));
  for (int k = iterations - 1; k >= 0; --k) {
    for (int i = p - 1; i >= 0; --i) {
      Vec rhs = k == iterations - 1 ? Vec(sys.segment(psi, i)) : Vec(Vec::Zero(sys.block_sizes[i]));
      if (k < iterations - 1)
        for (int j = 0; j < i; ++j) rhs -= sys.block(j, i).transpose() * phi[k + 1][j];
      for (int j = i + 1; j < p; ++j) rhs -= sys.block(j, i).transpose() * phi[k][j];
      phi[k][i] = diag_t[i].solve(rhs);
    }
  }
  return phi;
}

/// The K p-block lower bidiagonal operator C_gs (diagonal A, subdiagonal B).
template <typename T>
typename BlockSystem<T>::Mat gs_stack_operator(const BlockSystem<T>& sys, int iterations) {
  using Mat = typename BlockSystem<T>::Mat;
  const int n = sys.size();
  const Mat a = sys.lower(), b = sys.upper();
  Mat c = Mat::Zero(n * iterations, n * iterations);
  for (int k = 0; k < iterations; ++k) {
    c.block(k * n, k * n, n, n) = a;
    if (k > 0) c.block(k * n, (k - 1) * n, n, n) = b;
  }
  return c;
}

/// Stacked right-hand side (b - B x0, b, ..., b).
template <typename T>
typename BlockSystem<T>::Vec gs_stack_rhs(const BlockSystem<T>& sys, const typename BlockSystem<T>::Vec& x0, int iterations) {
  using Vec = typename BlockSystem<T>::Vec;
  const int n = sys.size();
  Vec out(n * iterations);
  for (int k = 0; k < iterations; ++k) out.segment(k * n, n) = sys.b;
  out.head(n) -= sys.upper() * x0;
  return out;
}

template <typename T>
typename BlockSystem<T>::Vec stack(const std::vector<typename BlockSystem<T>::Vec>& levels) {
  using Vec = typename BlockSystem<T>::Vec;
  int n = 0;
  for (const auto& v : levels) n += static_cast<int>(v.size());
  Vec out(n);
  int o = 0;
  for (const auto& v : levels) {
    out.segment(o, v.size()) = v;
    o += static_cast<int>(v.size());
  }
  return out;
}

/// Returns ((x - x_hat), psi_stack) and (b_stack - C_gs x_hat, phi_stack),
/// where x solves C_gs x = b_stack directly and psi_stack carries psi only
/// in the final level.
template <typename T>
std::pair<T, T> gs_error_identity(const BlockSystem<T>& sys, const typename BlockSystem<T>::Vec& psi,
                                  const typename BlockSystem<T>::Vec& x_hat, int iterations,
                                  const typename BlockSystem<T>::Vec& x0) {
  using Vec = typename BlockSystem<T>::Vec;
  const int n = sys.size();
  if (x_hat.size() != n * iterations) throw std::invalid_argument("approximate stack has wrong length");
  const auto c = gs_stack_operator(sys, iterations);
  const Vec b = gs_stack_rhs(sys, x0, iterations);
  const Vec x = c.partialPivLu().solve(b);
  Vec psi_stack = Vec::Zero(n * iterations);
  psi_stack.tail(n) = psi;
  const auto phi = gs_adjoint(sys, psi, iterations);
  std::vector<Vec> levels;
  for (const auto& level : phi) levels.push_back(stack<T>(level));
  const Vec phi_stack = stack<T>(levels);
  return {(x - x_hat).dot(psi_stack), (b - c * x_hat).dot(phi_stack)};
}

/// Random strictly block-diagonally-dominant system with p blocks of size m.
BlockSystem<double> random_block_system(int p, int m, std::uint64_t seed);

struct SweepResult {
  int systems = 0;
  double max_violation = 0;  ///< max |lhs - rhs| / max(1, |lhs|)
};

/// Seeded sweep over p in {1,2,4} and K in {1,3,5} with randomly perturbed
/// approximate iterate stacks.
SweepResult gs_check_sweep(int systems = 50, std::uint64_t seed = 20240611);

}  // namespace ddest::gs
