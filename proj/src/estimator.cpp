#include "ddest/estimator.hpp"

namespace ddest {

Scalar qoi_value(const FeFunction& u, const Qoi& qoi) {
  const Mesh& mesh = u.space->mesh();
  if (qoi.indicator) return inner_product(u, qoi.density, elements_in(mesh, *qoi.indicator));
  return inner_product(u, qoi.density, all_elements(mesh));
}

Scalar total_estimate(const SchwarzTrace& trace, const FeFunction& global_adjoint, const Problem& problem) {
  const auto elements = all_elements(trace.space->mesh());
  return apply_load(global_adjoint, problem, elements) - apply_form(trace.final_iterate(), global_adjoint, problem, elements);
}

DiscretizationEstimate discretization_estimate(const SchwarzTrace& trace, const AdjointFamily& family,
                                               const Problem& problem, const Decomposition& decomp) {
  if (trace.method != family.variant) throw std::invalid_argument("adjoint family variant does not match the trace");
  if (trace.locals.size() != static_cast<std::size_t>(trace.iterations))
    throw std::invalid_argument("trace does not contain the local solves");
  if (family.members.size() != static_cast<std::size_t>(trace.iterations))
    throw std::invalid_argument("adjoint family does not cover every iteration");
  const int p = decomp.size();
  std::vector<SubdomainDofs> forward_dofs;
  for (int i = 0; i < p; ++i) forward_dofs.push_back(decomp.dofs(*trace.space, i));

  DiscretizationEstimate out;
  out.per_subdomain = Vector::Zero(p);
  for (int k = 0; k < trace.iterations; ++k) {
    for (int i = 0; i < p; ++i) {
      const FeFunction phi = family.member(k, i);
      // pi_i Phi in the forward space with homogeneous values off the
      // subdomain interior, then lifted back into the adjoint space exactly.
      const FeFunction pi_phi = interpolate(phi, trace.space, &forward_dofs[i].outside_interior);
      FeFunction weight = interpolate(pi_phi, family.space);
      weight.coeffs = phi.coeffs - weight.coeffs;
      const auto& elements = decomp.elements(i);
      out.per_subdomain[i] += apply_load(weight, problem, elements) - apply_form(trace.local(k, i), weight, problem, elements);
    }
  }
  out.total = out.per_subdomain.sum();
  return out;
}

Scalar iteration_estimate(Scalar eta_total, Scalar eta_disc) { return eta_total - eta_disc; }

void apply_reference(ErrorReport& report, Scalar ref_total, Scalar ref_disc) {
  report.has_reference = true;
  report.ref_total = ref_total;
  report.ref_disc = ref_disc;
  report.ref_iter = ref_total - ref_disc;
  report.gamma = ref_total != 0 ? report.eta_total / ref_total : 0.0;
  report.gamma_D = ref_disc != 0 ? report.eta_disc / ref_disc : 0.0;
}

Scalar reference_qoi(const Problem& problem, const Qoi& qoi, const Mesh& mesh, const ReferenceOptions& options) {
  if (problem.exact_rect_integral && qoi.indicator) return (*problem.exact_rect_integral)(*qoi.indicator);
  auto fine = std::make_shared<const Mesh>(refine_uniform(mesh, options.refine_levels));
  if (problem.exact_solution) return inner_product(*fine, *problem.exact_solution, qoi.density, all_elements(*fine));
  const FeFunction u = solve_global(problem, std::make_shared<const FeSpace>(fine, options.reference_degree));
  return qoi_value(u, qoi);
}

std::vector<Scalar> surrogate_iterate_qoi(const Problem& problem, const Qoi& qoi, const Decomposition& decomp,
                                          const SchwarzConfig& config, const ReferenceOptions& options) {
  auto fine = std::make_shared<const Mesh>(refine_uniform(decomp.mesh(), options.refine_levels));
  const Decomposition fine_decomp(fine, decomp.rects(), decomp.sweep_order());
  SchwarzConfig fine_config = config;
  fine_config.degree = std::min(config.degree + 1, 3);
  fine_config.record_locals = false;
  if (config.initial) {
    const FeFunction coarse(std::make_shared<const FeSpace>(decomp.mesh_ptr(), config.degree), *config.initial);
    fine_config.initial = interpolate(coarse, std::make_shared<const FeSpace>(fine, fine_config.degree)).coeffs;
  }
  const SchwarzTrace trace = run_schwarz(problem, fine_decomp, fine_config);
  std::vector<Scalar> out;
  for (const auto& u : trace.iterates) out.push_back(qoi_value(FeFunction(trace.space, u), qoi));
  return out;
}

Scalar surrogate_limit_qoi(const Problem& problem, const Qoi& qoi, const Mesh& mesh, int degree,
                           const ReferenceOptions& options) {
  auto fine = std::make_shared<const Mesh>(refine_uniform(mesh, options.refine_levels));
  return qoi_value(solve_global(problem, std::make_shared<const FeSpace>(fine, std::min(degree + 1, 3))), qoi);
}

ReferenceErrors combine_reference(Scalar truth, Scalar q_discrete, Scalar surrogate_k, std::optional<Scalar> limit) {
  ReferenceErrors r;
  r.total = truth - q_discrete;
  if (limit) {
    r.iter = *limit - surrogate_k;
    r.disc = r.total - r.iter;
  } else {
    r.disc = surrogate_k - q_discrete;
    r.iter = r.total - r.disc;
  }
  return r;
}

ReferenceErrors reference_errors(const SchwarzTrace& trace, const Problem& problem, const Qoi& qoi,
                                 const Decomposition& decomp, const SchwarzConfig& config,
                                 const ReferenceOptions& options) {
  const Scalar q_discrete = qoi_value(trace.final_iterate(), qoi);
  const Scalar truth = reference_qoi(problem, qoi, decomp.mesh(), options);
  const Scalar surrogate = surrogate_iterate_qoi(problem, qoi, decomp, config, options).back();
  std::optional<Scalar> limit;
  if (options.bias_correct) limit = surrogate_limit_qoi(problem, qoi, decomp.mesh(), config.degree, options);
  return combine_reference(truth, q_discrete, surrogate, limit);
}

std::string to_string(Action a) {
  switch (a) {
    case Action::none: return "none";
    case Action::refine_subdomain: return "refine_subdomain";
    case Action::increase_overlap: return "increase_overlap";
  }
  return "unknown";
}

Recommendation two_stage_advise(const ErrorReport& report, const AdvisePolicy& policy) {
  Recommendation rec;
  const Scalar iter = std::abs(report.eta_iter), disc = std::abs(report.eta_disc);
  if (iter <= policy.zero_tolerance && disc <= policy.zero_tolerance) return rec;
  if (iter > disc) {
    rec.action = Action::increase_overlap;
    return rec;
  }
  rec.action = Action::refine_subdomain;
  rec.target = 0;
  for (int i = 1; i < report.S.size(); ++i)
    if (std::abs(report.S[i]) > std::abs(report.S[rec.target])) rec.target = i;
  if (report.S.size() > 0) rec.predicted_contribution = report.S[rec.target] / policy.refinement_factor;
  return rec;
}

}  // namespace ddest
