#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddest/adjoint.hpp"
#include "ddest/decomp.hpp"
#include "ddest/schwarz.hpp"

namespace ddest {

/// Estimated and reference QoI errors of one Schwarz run.
struct ErrorReport {
  Scalar eta_total = 0;  ///< R(U^K, Phi)
  Scalar eta_disc = 0;   ///< sum of adjoint-weighted local residuals
  Scalar eta_iter = 0;   ///< eta_total - eta_disc
  Vector S;              ///< per-subdomain discretization contributions

  bool has_reference = false;
  Scalar ref_total = 0;
  Scalar ref_disc = 0;
  Scalar ref_iter = 0;
  Scalar gamma = 0;    ///< eta_total / ref_total
  Scalar gamma_D = 0;  ///< eta_disc / ref_disc
};

/// Q(U) = (psi, U).
Scalar qoi_value(const FeFunction& u, const Qoi& qoi);

/// l(Phi) - a(U^K, Phi) over the whole domain.
Scalar total_estimate(const SchwarzTrace& trace, const FeFunction& global_adjoint, const Problem& problem);

struct DiscretizationEstimate {
  Scalar total = 0;
  Vector per_subdomain;
};

/// Sum over (k, i) of R_i(U~, Phi - pi_i Phi), accumulated per subdomain
/// with k outer and i inner. `total` is the sum of `per_subdomain`.
DiscretizationEstimate discretization_estimate(const SchwarzTrace& trace, const AdjointFamily& family,
                                               const Problem& problem, const Decomposition& decomp);

Scalar iteration_estimate(Scalar eta_total, Scalar eta_disc);

/// Fills gamma and gamma_D from the estimates and reference fields.
void apply_reference(ErrorReport& report, Scalar ref_total, Scalar ref_disc);

struct ReferenceOptions {
  int refine_levels = 2;  ///< uniform red refinements (4x per direction)
  int reference_degree = 3;
  /// Measure the surrogate iterates against their own converged limit, so
  /// the surrogate's discretization error does not leak into ref_iter.
  bool bias_correct = true;
};

struct ReferenceErrors {
  Scalar total = 0, disc = 0, iter = 0;
};

/// Q(u) for the true solution: closed form when the problem supplies it,
/// otherwise a monolithic degree-3 solve on the refined mesh.
Scalar reference_qoi(const Problem& problem, const Qoi& qoi, const Mesh& mesh, const ReferenceOptions& options = {});

/// Q(u^k), k = 0..K, of the continuum Schwarz iterates, approximated by the
/// same method, decomposition and K one degree higher on the refined mesh.
std::vector<Scalar> surrogate_iterate_qoi(const Problem& problem, const Qoi& qoi, const Decomposition& decomp,
                                          const SchwarzConfig& config, const ReferenceOptions& options = {});

/// Q of the monolithic solution at the surrogate discretization: the limit of
/// surrogate_iterate_qoi as K grows.
Scalar surrogate_limit_qoi(const Problem& problem, const Qoi& qoi, const Mesh& mesh, int degree,
                           const ReferenceOptions& options = {});

/// Combines the pieces: total = truth - Q(U^K); the continuum iterate is the
/// surrogate iterate, shifted by (truth - limit) when a limit is given.
ReferenceErrors combine_reference(Scalar truth, Scalar q_discrete, Scalar surrogate_k, std::optional<Scalar> limit);

/// Reference (true) total/discretization/iteration errors of a trace.
ReferenceErrors reference_errors(const SchwarzTrace& trace, const Problem& problem, const Qoi& qoi,
                                 const Decomposition& decomp, const SchwarzConfig& config,
                                 const ReferenceOptions& options = {});

enum class Action { none, refine_subdomain, increase_overlap };
std::string to_string(Action a);

struct AdvisePolicy {
  /// Expected reduction of the refined subdomain's contribution; 4 for a
  /// degree-one space under one uniform refinement.
  Scalar refinement_factor = 4.0;
  /// Both components at or below this magnitude means nothing to do.
  Scalar zero_tolerance = 0.0;
};

struct Recommendation {
  Action action = Action::none;
  int target = -1;  ///< 0-based subdomain index when refining
  Scalar predicted_contribution = 0;
};

/// Chooses the dominant error component: increase overlap when the
/// iteration part dominates, otherwise refine the subdomain with the largest
/// |S_i| (lowest index on ties).
Recommendation two_stage_advise(const ErrorReport& report, const AdvisePolicy& policy = {});

}  // namespace ddest
