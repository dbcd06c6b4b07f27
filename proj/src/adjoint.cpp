#include "ddest/adjoint.hpp"

namespace ddest {

FeFunction solve_global_adjoint(const Problem& problem, const Qoi& qoi, std::shared_ptr<const Mesh> mesh, int degree) {
  auto space = std::make_shared<const FeSpace>(std::move(mesh), degree);
  const auto elements = all_elements(space->mesh());
  const std::vector<int> dofs = free_dofs(*space);
  LinearSystem sys;
  sys.matrix = restrict_matrix(assemble_operator(*space, *space, problem, elements, FormOrientation::adjoint), dofs, dofs);
  sys.rhs = restrict_vector(assemble_load(*space, qoi.density, elements), dofs);
  sys.free_dofs = dofs;
  FeFunction phi = FeFunction::zero(space);
  if (sys.rhs.squaredNorm() == 0) return phi;
  const Vector x = solve(sys);
  for (std::size_t k = 0; k < dofs.size(); ++k) phi.coeffs[dofs[k]] = x[static_cast<int>(k)];
  return phi;
}

namespace {

struct AdjointSetup {
  std::shared_ptr<const FeSpace> space;
  std::vector<LocalDirichletSolver> solvers;
  std::vector<SparseMatrix> coupling;  // p*p, adjoint orientation over overlaps; empty when no overlap
  std::vector<Vector> qoi_load;        // sum_j (psi_j, v)_ij
  int p = 0;

  const SparseMatrix& couple(int i, int j) const { return coupling[i * p + j]; }
};

AdjointSetup setup(const Problem& problem, const Decomposition& decomp, const Qoi& qoi, int degree) {
  AdjointSetup s;
  s.p = decomp.size();
  s.space = std::make_shared<const FeSpace>(decomp.mesh_ptr(), degree);
  const FeSpace& space = *s.space;
  for (int i = 0; i < s.p; ++i) s.solvers.emplace_back(space, decomp, i, problem, FormOrientation::adjoint);
  s.coupling.resize(static_cast<std::size_t>(s.p) * s.p);
  for (int i = 0; i < s.p; ++i)
    for (int j = 0; j < s.p; ++j) {
      if (i == j) {
        s.coupling[i * s.p + j] = s.solvers[i].matrix();
      } else if (decomp.overlaps(i, j)) {
        s.coupling[i * s.p + j] =
            assemble_operator(space, space, problem, decomp.overlap_elements(i, j), FormOrientation::adjoint);
      }
    }
  for (int i = 0; i < s.p; ++i) {
    Vector load = Vector::Zero(space.num_dofs());
    for (int j = 0; j < s.p; ++j)
      if (decomp.overlaps(i, j)) load += assemble_load(space, localized_qoi(decomp, qoi, j), decomp.overlap_elements(i, j));
    s.qoi_load.push_back(std::move(load));
  }
  return s;
}

Vector solve_member(const AdjointSetup& s, int i, const Vector& rhs, int k) {
  try {
    return s.solvers[i].solve(rhs);
  } catch (const SolverError& e) {
    throw SolverError("adjoint level " + std::to_string(k) + ", subdomain " + std::to_string(i + 1) + ": " + e.what(), e.pivot());
  }
}

}  // namespace

AdjointFamily solve_multiplicative_adjoints(const Problem& problem, const Decomposition& decomp, int iterations,
                                            const Qoi& qoi, int degree) {
  if (iterations < 1) throw ConfigError("iteration count K must be at least 1");
  const AdjointSetup s = setup(problem, decomp, qoi, degree);
  const int p = s.p;
  const int n = s.space->num_dofs();
  const auto& order = decomp.sweep_order();

  AdjointFamily fam;
  fam.variant = Method::multiplicative;
  fam.space = s.space;
  fam.iterations = iterations;
  fam.sweep_order = order;
  fam.members.assign(iterations, std::vector<Vector>(p, Vector::Zero(n)));

  for (int q = iterations - 1; q >= 0; --q) {
    for (int pos = p - 1; pos >= 0; --pos) {
      const int i = order[pos];
      Vector rhs = Vector::Zero(n);
      if (q == iterations - 1) {
        rhs = s.qoi_load[i];
      } else {
        // between-iteration transfer from the next level
        for (int before = 0; before < pos; ++before) {
          const int j = order[before];
          if (decomp.overlaps(i, j)) rhs -= s.couple(i, j) * fam.members[q + 1][j];
        }
      }
      // within-iteration transfer
      for (int after = pos + 1; after < p; ++after) {
        const int j = order[after];
        if (decomp.overlaps(i, j)) rhs -= s.couple(i, j) * fam.members[q][j];
      }
      fam.members[q][i] = solve_member(s, i, rhs, q);
    }
  }
  return fam;
}

AdjointFamily solve_additive_adjoints(const Problem& problem, const Decomposition& decomp, int iterations, Scalar tau,
                                      const Qoi& qoi, int degree) {
  if (iterations < 1) throw ConfigError("iteration count K must be at least 1");
  if (!(tau > 0)) throw ConfigError("additive Schwarz needs tau > 0");
  const AdjointSetup s = setup(problem, decomp, qoi, degree);
  const int p = s.p;
  const int n = s.space->num_dofs();

  AdjointFamily fam;
  fam.variant = Method::additive;
  fam.space = s.space;
  fam.iterations = iterations;
  fam.tau = tau;
  fam.sweep_order = decomp.sweep_order();
  fam.members.assign(iterations, std::vector<Vector>(p, Vector::Zero(n)));
  fam.tails.assign(iterations + 1, std::vector<Vector>(p, Vector::Zero(n)));

  for (int k = iterations; k >= 1; --k) {
    const auto& tail = fam.tails[k];
    for (int i = 0; i < p; ++i) {
      Vector rhs = s.qoi_load[i];
      for (int j = 0; j < p; ++j)
        if (decomp.overlaps(i, j)) rhs -= s.couple(i, j) * tail[j];
      fam.members[k - 1][i] = solve_member(s, i, tau * rhs, k);
    }
    for (int j = 0; j < p; ++j) fam.tails[k - 1][j] = tail[j] + fam.members[k - 1][j];
  }
  return fam;
}

}  // namespace ddest
