#include "ddest/schwarz.hpp"

namespace ddest {

std::string to_string(Method m) { return m == Method::multiplicative ? "multiplicative" : "additive"; }

Method parse_method(const std::string& s) {
  if (s == "multiplicative" || s == "mult") return Method::multiplicative;
  if (s == "additive" || s == "add") return Method::additive;
  throw ConfigError("unknown method '" + s + "'");
}

void SchwarzConfig::validate() const {
  if (iterations < 1) throw ConfigError("iteration count K must be at least 1");
  if (method == Method::additive && !(tau > 0)) throw ConfigError("additive Schwarz needs tau > 0");
  if (degree < 1 || degree > 3) throw ConfigError("forward degree must be 1, 2 or 3");
}

LocalDirichletSolver::LocalDirichletSolver(const FeSpace& space, const Decomposition& decomp, int i,
                                           const Problem& problem, FormOrientation orientation)
    : dofs_(decomp.dofs(space, i)),
      matrix_(assemble_operator(space, space, problem, decomp.elements(i), orientation)) {
  lu_.factorize(restrict_matrix(matrix_, dofs_.interior, dofs_.interior));
}

Vector LocalDirichletSolver::solve(const Vector& rhs) const {
  const Vector x = lu_.solve(restrict_vector(rhs, dofs_.interior));
  Vector out = Vector::Zero(rhs.size());
  for (std::size_t k = 0; k < dofs_.interior.size(); ++k) out[dofs_.interior[k]] = x[static_cast<int>(k)];
  return out;
}

namespace {

struct ForwardSetup {
  std::shared_ptr<const FeSpace> space;
  std::vector<LocalDirichletSolver> solvers;
  std::vector<Vector> loads;
};

ForwardSetup setup(const Problem& problem, const Decomposition& decomp, const SchwarzConfig& config) {
  config.validate();
  ForwardSetup s;
  s.space = std::make_shared<const FeSpace>(decomp.mesh_ptr(), config.degree);
  for (int i = 0; i < decomp.size(); ++i) {
    try {
      s.solvers.emplace_back(*s.space, decomp, i, problem, FormOrientation::forward);
    } catch (const SolverError& e) {
      throw SolverError("subdomain " + std::to_string(i + 1) + ": " + e.what(), e.pivot());
    }
    s.loads.push_back(assemble_load(*s.space, problem.source, decomp.elements(i)));
  }
  return s;
}

SchwarzTrace start_trace(const ForwardSetup& s, const Decomposition& decomp, const SchwarzConfig& config) {
  SchwarzTrace trace;
  trace.method = config.method;
  trace.space = s.space;
  trace.iterations = config.iterations;
  trace.tau = config.tau;
  trace.sweep_order = decomp.sweep_order();
  Vector u0 = config.initial ? *config.initial : Vector::Zero(s.space->num_dofs());
  if (u0.size() != s.space->num_dofs()) throw ConfigError("initial iterate has wrong size");
  trace.iterates.push_back(std::move(u0));
  return trace;
}

// Lifted local correction: a_i(w, v) = l_i(v) - a_i(U, v), w = 0 on the
// subdomain boundary.
Vector local_correction(const ForwardSetup& s, int i, const Vector& u, int k) {
  try {
    return s.solvers[i].solve(s.loads[i] - s.solvers[i].matrix() * u);
  } catch (const SolverError& e) {
    throw SolverError("iteration " + std::to_string(k) + ", subdomain " + std::to_string(i + 1) + ": " + e.what(), e.pivot());
  }
}

}  // namespace

SchwarzTrace run_multiplicative(const Problem& problem, const Decomposition& decomp, const SchwarzConfig& config) {
  if (config.method != Method::multiplicative) throw ConfigError("run_multiplicative needs method = multiplicative");
  const ForwardSetup s = setup(problem, decomp, config);
  SchwarzTrace trace = start_trace(s, decomp, config);
  const int p = decomp.size();
  Vector u = trace.iterates.front();
  if (config.record_locals) trace.locals.assign(config.iterations, std::vector<Vector>(p));
  for (int k = 0; k < config.iterations; ++k) {
    for (int i : decomp.sweep_order()) {
      u += local_correction(s, i, u, k);
      if (config.record_locals) {
        trace.locals[k][i] = u;
        trace.substeps.push_back(u);
      }
    }
    trace.iterates.push_back(u);
  }
  return trace;
}

SchwarzTrace run_additive(const Problem& problem, const Decomposition& decomp, const SchwarzConfig& config) {
  if (config.method != Method::additive) throw ConfigError("run_additive needs method = additive");
  const ForwardSetup s = setup(problem, decomp, config);
  SchwarzTrace trace = start_trace(s, decomp, config);
  const int p = decomp.size();
  Vector u = trace.iterates.front();
  if (config.record_locals) trace.locals.assign(config.iterations, std::vector<Vector>(p));
  std::vector<Vector> w(p);
  for (int k = 0; k < config.iterations; ++k) {
    for (int i = 0; i < p; ++i) w[i] = local_correction(s, i, u, k);
    Vector increment = Vector::Zero(u.size());
    for (int i = 0; i < p; ++i) {
      increment += w[i];
      if (config.record_locals) trace.locals[k][i] = u + w[i];
    }
    u += config.tau * increment;
    trace.iterates.push_back(u);
  }
  return trace;
}

SchwarzTrace run_schwarz(const Problem& problem, const Decomposition& decomp, const SchwarzConfig& config) {
  return config.method == Method::multiplicative ? run_multiplicative(problem, decomp, config)
                                                 : run_additive(problem, decomp, config);
}

std::vector<int> free_dofs(const FeSpace& space) {
  std::vector<int> out;
  for (int d = 0; d < space.num_dofs(); ++d)
    if (!space.on_domain_boundary(d)) out.push_back(d);
  return out;
}

FeFunction solve_global(const Problem& problem, std::shared_ptr<const FeSpace> space) {
  const auto elements = all_elements(space->mesh());
  const std::vector<int> dofs = free_dofs(*space);
  LinearSystem sys;
  sys.matrix = restrict_matrix(assemble_operator(*space, *space, problem, elements), dofs, dofs);
  sys.rhs = restrict_vector(assemble_load(*space, problem.source, elements), dofs);
  sys.free_dofs = dofs;
  const Vector x = solve(sys);
  FeFunction u = FeFunction::zero(space);
  for (std::size_t k = 0; k < dofs.size(); ++k) u.coeffs[dofs[k]] = x[static_cast<int>(k)];
  return u;
}

}  // namespace ddest
