#include "ddest/gsanalog.hpp"

namespace ddest::gs {

BlockSystem<double> random_block_system(int p, int m, std::uint64_t seed) {
  if (p < 1 || m < 1) throw ConfigError("block counts and sizes must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  BlockSystem<double> sys;
  sys.block_sizes.assign(p, m);
  const int n = p * m;
  sys.M.resize(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) sys.M(r, c) = noise(rng);
  // Diagonal scale s beats every row's off-diagonal mass.
  const double s = 2.0 * n;
  for (int r = 0; r < n; ++r) sys.M(r, r) += s;
  sys.b.resize(n);
  for (int r = 0; r < n; ++r) sys.b[r] = noise(rng);
  return sys;
}

SweepResult gs_check_sweep(int systems, std::uint64_t seed) {
  static constexpr int kBlocks[] = {1, 2, 4};
  static constexpr int kIters[] = {1, 3, 5};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  std::uniform_int_distribution<int> size_dist(1, 6);
  SweepResult out;
  for (int s = 0; s < systems; ++s) {
    const int p = kBlocks[s % 3];
    const int iterations = kIters[(s / 3) % 3];
    const auto sys = random_block_system(p, size_dist(rng), rng());
    const int n = sys.size();
    Eigen::VectorXd psi(n), x0(n);
    for (int r = 0; r < n; ++r) psi[r] = noise(rng);
    for (int r = 0; r < n; ++r) x0[r] = noise(rng);
    const auto iterates = gs_iterate(sys, x0, iterations);
    Eigen::VectorXd x_hat = stack<double>(iterates);
    const double scale = s % 2 == 0 ? 1e-3 : 1.0;
    for (int r = 0; r < x_hat.size(); ++r) x_hat[r] += scale * noise(rng);
    const auto [lhs, rhs] = gs_error_identity(sys, psi, x_hat, iterations, x0);
    out.max_violation = std::max(out.max_violation, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    ++out.systems;
  }
  return out;
}

}  // namespace ddest::gs
