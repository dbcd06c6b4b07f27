#include <gtest/gtest.h>

#include <numbers>

#include "ddest/estimator.hpp"

using namespace ddest;

namespace {

constexpr double pi = std::numbers::pi;

std::shared_ptr<const Mesh> unit_mesh(int n) { return std::make_shared<const Mesh>(build_uniform(n, n)); }

const Qoi kQoi = Qoi::indicator_of(Rect{0.6, 0.8, 0.6, 0.8});

struct Estimates {
  double total, disc, iter;
  Vector S;
};

Estimates estimate(const Problem& p, const Decomposition& d, Method m, int K, int fdeg, int adeg,
                   const Qoi& q = kQoi, double tau = 0.4) {
  SchwarzConfig c;
  c.method = m;
  c.iterations = K;
  c.tau = m == Method::additive ? tau : 1.0;
  c.degree = fdeg;
  const SchwarzTrace t = run_schwarz(p, d, c);
  const AdjointFamily f = m == Method::multiplicative ? solve_multiplicative_adjoints(p, d, K, q, adeg)
                                                      : solve_additive_adjoints(p, d, K, c.tau, q, adeg);
  const auto disc = discretization_estimate(t, f, p, d);
  const double total = total_estimate(t, solve_global_adjoint(p, q, d.mesh_ptr(), adeg), p);
  return {total, disc.total, iteration_estimate(total, disc.total), disc.per_subdomain};
}

}  // namespace

TEST(Estimator, ExactPoissonQoiClosedForm) {
  const Problem p = poisson_problem();
  const double side = (std::cos(1.2 * pi) - std::cos(1.6 * pi)) / (2 * pi);
  EXPECT_NEAR((*p.exact_rect_integral)(*kQoi.indicator), side * side, 1e-16);
  EXPECT_NEAR(reference_qoi(p, kQoi, build_uniform(4, 4)), side * side, 1e-16);
}

TEST(Estimator, DecompositionIdentitiesHold) {
  auto mesh = unit_mesh(10);
  for (Method m : {Method::multiplicative, Method::additive})
    for (const Problem& p : {poisson_problem(), convection_diffusion_problem()}) {
      const Decomposition d = build_grid(2, 2, 0.1, mesh);
      const Estimates e = estimate(p, d, m, 3, 1, 2);
      EXPECT_LE(std::abs(e.total - (e.disc + e.iter)), 1e-15 * std::abs(e.total));
      EXPECT_LE(std::abs(e.S.sum() - e.disc), 1e-15 * std::max(std::abs(e.disc), 1e-300) + 1e-30);
    }
}

TEST(Estimator, SingleSubdomainOneIterationHasNoIterationError) {
  auto mesh = unit_mesh(10);
  const Decomposition d(mesh, {Rect{}});
  for (int fdeg : {1, 2})
    for (Method m : {Method::multiplicative, Method::additive}) {
      const Estimates e = estimate(poisson_problem(), d, m, 1, fdeg, 3, kQoi, 1.0);
      EXPECT_LE(std::abs(e.iter), 1e-10 * std::max(1.0, std::abs(e.total)));
      EXPECT_GT(std::abs(e.total), 0.0);
    }
}

TEST(Estimator, MatchingDegreesGiveZero) {
  auto mesh = unit_mesh(8);
  const Decomposition d(mesh, {Rect{}});
  const Estimates e = estimate(poisson_problem(), d, Method::multiplicative, 1, 2, 2);
  EXPECT_LE(std::abs(e.total), 1e-12);
  EXPECT_LE(std::abs(e.disc), 1e-12);
  EXPECT_LE(std::abs(e.iter), 1e-12);
}

TEST(Estimator, ZeroQoiGivesZeroEverywhere) {
  auto mesh = unit_mesh(10);
  const Decomposition d = build_grid(2, 1, 0.2, mesh);
  const Estimates e = estimate(poisson_problem(), d, Method::multiplicative, 2, 1, 2, Qoi::zero());
  EXPECT_EQ(e.total, 0.0);
  EXPECT_EQ(e.disc, 0.0);
  EXPECT_EQ(e.iter, 0.0);
  SchwarzConfig c;
  c.iterations = 2;
  const SchwarzTrace t = run_schwarz(poisson_problem(), d, c);
  const ReferenceErrors r = reference_errors(t, poisson_problem(), Qoi::zero(), d, c);
  EXPECT_EQ(r.total, 0.0);
  EXPECT_EQ(r.disc, 0.0);
  EXPECT_EQ(r.iter, 0.0);
}

TEST(Estimator, TotalEstimateTracksTrueError) {
  // The P3 adjoint makes the estimate nearly exact for the Galerkin solution.
  auto mesh = unit_mesh(10);
  const Decomposition d(mesh, {Rect{}});
  const Estimates e = estimate(poisson_problem(), d, Method::multiplicative, 1, 1, 3);
  SchwarzConfig c;
  const SchwarzTrace t = run_schwarz(poisson_problem(), d, c);
  const double truth = reference_qoi(poisson_problem(), kQoi, *mesh) - qoi_value(t.final_iterate(), kQoi);
  EXPECT_NEAR(e.total / truth, 1.0, 0.03);
}

TEST(Reference, CombineWithAndWithoutLimit) {
  const ReferenceErrors plain = combine_reference(1.0, 0.25, 0.5, std::nullopt);
  EXPECT_DOUBLE_EQ(plain.total, 0.75);
  EXPECT_DOUBLE_EQ(plain.disc, 0.25);
  EXPECT_DOUBLE_EQ(plain.iter, 0.5);
  const ReferenceErrors corrected = combine_reference(1.0, 0.25, 0.5, 0.875);
  EXPECT_DOUBLE_EQ(corrected.iter, 0.375);
  EXPECT_DOUBLE_EQ(corrected.disc, 0.375);
}

TEST(Reference, EffectivityRatios) {
  ErrorReport r;
  r.eta_total = 2.0;
  r.eta_disc = 0.5;
  apply_reference(r, 4.0, 1.0);
  EXPECT_TRUE(r.has_reference);
  EXPECT_DOUBLE_EQ(r.gamma, 0.5);
  EXPECT_DOUBLE_EQ(r.gamma_D, 0.5);
}

TEST(Advise, Rules) {
  ErrorReport zero;
  zero.S = Vector::Zero(4);
  EXPECT_EQ(two_stage_advise(zero).action, Action::none);

  ErrorReport iter;
  iter.eta_iter = 1.05e-3;
  iter.eta_disc = 1.79e-4;
  EXPECT_EQ(two_stage_advise(iter).action, Action::increase_overlap);

  ErrorReport disc;
  disc.eta_disc = 2.36e-3;
  disc.eta_iter = 6.98e-6;
  disc.S = Vector(4);
  disc.S << 3.07e-4, -7.94e-4, -7.82e-4, 3.62e-3;
  const Recommendation rec = two_stage_advise(disc);
  EXPECT_EQ(rec.action, Action::refine_subdomain);
  EXPECT_EQ(rec.target, 3);
  EXPECT_NEAR(rec.predicted_contribution, 9.05e-4, 1e-18);

  ErrorReport tie = disc;
  tie.S << 1e-3, -1e-3, 5e-4, 1e-3;
  EXPECT_EQ(two_stage_advise(tie).target, 0);
  EXPECT_EQ(to_string(Action::increase_overlap), "increase_overlap");
}
