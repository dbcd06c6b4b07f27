#pragma once

#include <memory>
#include <vector>

#include "ddest/decomp.hpp"
#include "ddest/fem.hpp"
#include "ddest/schwarz.hpp"

namespace ddest {

/// Adjoint solutions weighting the local residuals of a Schwarz run.
///
/// Members are full-length coefficient vectors in `space`, supported on the
/// interior dofs of their subdomain (homogeneous Dirichlet on its boundary).
struct AdjointFamily {
  Method variant = Method::multiplicative;
  std::shared_ptr<const FeSpace> space;
  int iterations = 0;
  Scalar tau = 1.0;
  std::vector<int> sweep_order;

  /// members[k][i]: multiplicative Phi^[k + s/p] for subdomain i at sweep
  /// position s, k = 0..K-1; additive Phi_i^[k+1].
  std::vector<std::vector<Vector>> members;
  /// Additive only: tails[k][j] = sum_{l=k+1..K} Phi_j^[l], k = 0..K.
  std::vector<std::vector<Vector>> tails;

  FeFunction member(int k, int i) const { return FeFunction(space, members[k][i]); }
};

/// Solves a(v, phi) = (psi, v) on the whole domain in the degree-q space.
FeFunction solve_global_adjoint(const Problem& problem, const Qoi& qoi, std::shared_ptr<const Mesh> mesh, int degree);

/// Backward cascade for multiplicative Schwarz: for Q = K-1..0 and sweep
/// positions from last to first,
///   a_i(v, Phi^[Q+i/p]) = tau_i^Q(v) - sum_{j after i} a_ij(v, Phi^[Q+j/p]),
/// where tau_i^{K-1}(v) = sum_j (v, psi_j)_ij and otherwise
/// tau_i^Q(v) = -sum_{j before i} a_ij(v, Phi^[Q+1+j/p]).
AdjointFamily solve_multiplicative_adjoints(const Problem& problem, const Decomposition& decomp, int iterations,
                                            const Qoi& qoi, int degree);

/// Additive cascade: for k = K..1 and each i independently,
///   a_i(v, Phi_i^[k]) = tau * sum_j { (psi_j, v)_ij - a_ij(v, tail_j(k)) }.
AdjointFamily solve_additive_adjoints(const Problem& problem, const Decomposition& decomp, int iterations, Scalar tau,
                                      const Qoi& qoi, int degree);

}  // namespace ddest
