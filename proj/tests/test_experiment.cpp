#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "ddest/experiment.hpp"

using namespace ddest;

namespace {

int cli(const std::string& args, std::string* out = nullptr) {
  const std::string path = ::testing::TempDir() + "ddest_cli_out.txt";
  const int status = std::system((std::string(DDEST_CLI) + " " + args + " > " + path + " 2>/dev/null").c_str());
  if (out) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesKeyValueWithComments) {
  std::istringstream in("# base row\nnx = 40\nny=40\nbeta=0.05  # overlap\nmethod=additive\nqoi_rect=0.4,0.8,0.4,0.8\n\n");
  const ExperimentConfig c = parse_config(in);
  EXPECT_EQ(c.nx, 40);
  EXPECT_EQ(c.ny, 40);
  EXPECT_DOUBLE_EQ(c.beta, 0.05);
  EXPECT_EQ(c.method, Method::additive);
  ASSERT_TRUE(c.qoi_rect);
  EXPECT_EQ(*c.qoi_rect, (Rect{0.4, 0.8, 0.4, 0.8}));
}

TEST(Config, RejectsBadInput) {
  ExperimentConfig c;
  EXPECT_THROW(apply_setting(c, "colour", "red"), ConfigError);
  EXPECT_THROW(apply_setting(c, "nx", "ten"), ConfigError);
  EXPECT_THROW(apply_setting(c, "method", "jacobi"), ConfigError);
  EXPECT_THROW(apply_setting(c, "qoi_rect", "0,1"), ConfigError);
  std::istringstream in("nx 20\n");
  EXPECT_THROW(parse_config(in), ConfigError);
}

TEST(Config, ValidatedBeforeSolving) {
  ExperimentConfig c;
  c.nx = c.ny = 10;  // overlap strip [0.45, 0.55] is off the mesh lines
  EXPECT_THROW(build_setup(c), ConfigError);
  c = {};
  c.qoi_rect = Rect{0.61, 0.8, 0.6, 0.8};
  EXPECT_THROW(build_setup(c), ConfigError);
  c = {};
  c.K = 0;
  EXPECT_THROW(build_setup(c), ConfigError);
  c = {};
  c.adjoint_degree = 1;
  EXPECT_THROW(build_setup(c), ConfigError);
}

TEST(Config, OverlapWidthIsBeta) {
  ExperimentConfig c;
  const ddest::Setup s = build_setup(c);
  EXPECT_NEAR(s.decomp->rect(0).x1, 0.55, 1e-14);
  EXPECT_NEAR(s.decomp->rect(1).x0, 0.45, 1e-14);
}

TEST(Csv, HeaderAndFormat) {
  EXPECT_EQ(csv_header(false, 4), "nx,ny,beta,K,method,tau,eta_total,gamma,eta_disc,gamma_D,eta_iter");
  EXPECT_EQ(csv_header(true, 2), "nx,ny,beta,K,method,tau,eta_total,gamma,eta_disc,gamma_D,eta_iter,S_1,S_2");
  RunResult r;
  r.config.method = Method::additive;
  r.report.eta_total = 1.0158712345e-3;
  r.report.eta_disc = -6.5e-4;
  r.report.eta_iter = 1.6658712345e-3;
  r.report.S = Vector::Constant(2, 0.5);
  EXPECT_EQ(csv_row(r, false), "20,20,0.1,2,additive,0.4,1.01587e-03,,-6.50000e-04,,1.66587e-03");
  EXPECT_EQ(csv_row(r, true), "20,20,0.1,2,additive,0.4,1.01587e-03,,-6.50000e-04,,1.66587e-03,5.00000e-01,5.00000e-01");
}

TEST(Run, SingleSubdomainHasNoIterationError) {
  ExperimentConfig c;
  c.px = 1;
  c.K = 1;
  c.reference = ReferenceMode::none;
  const RunResult r = run(c);
  EXPECT_LE(std::abs(r.report.eta_iter), 1e-10 * std::max(1.0, std::abs(r.report.eta_total)));
  EXPECT_FALSE(r.report.has_reference);
}

TEST(Run, DeterministicRows) {
  ExperimentConfig c;
  c.nx = c.ny = 10;
  c.beta = 0.2;
  c.px = c.py = 2;
  c.K = 3;
  c.method = Method::additive;
  EXPECT_EQ(csv_row(run(c), true), csv_row(run(c), true));
}

TEST(Run, ReferenceCacheDoesNotChangeResults) {
  ExperimentConfig c;
  c.nx = c.ny = 10;
  c.beta = 0.2;
  ReferenceCache cache;
  c.K = 4;
  const std::string a = csv_row(run(c, &cache), false);
  c.K = 2;
  const std::string cached = csv_row(run(c, &cache), false);
  EXPECT_EQ(cached, csv_row(run(c), false));
  EXPECT_NE(a, cached);
}

TEST(Tables, Layout) {
  EXPECT_EQ(table_ids().size(), 13u);
  EXPECT_EQ(table_configs("t1").size(), 6u);
  EXPECT_EQ(table_configs("t4").size(), 10u);
  EXPECT_EQ(table_configs("t11").size(), 6u);
  EXPECT_EQ(table_configs("t8").front().method, Method::additive);
  EXPECT_THROW(table_configs("t14"), ConfigError);
}

TEST(TwoStage, ZeroErrorRunsNoSecondStage) {
  ExperimentConfig c;
  c.nx = c.ny = 10;
  c.beta = 0.2;
  c.qoi_rect = Rect{0.6, 0.8, 0.6, 0.8};
  c.source_scale = 0;
  c.reference = ReferenceMode::none;
  const TwoStageResult r = two_stage(c);
  EXPECT_EQ(r.recommendation.action, Action::none);
  EXPECT_FALSE(r.stage2);
}

TEST(Cli, ExitCodes) {
  std::string out;
  EXPECT_EQ(cli("run --nx 10 --ny 10 --beta 0.2 --K 1", &out), 0);
  EXPECT_EQ(out.substr(0, out.find('\n')), "nx,ny,beta,K,method,tau,eta_total,gamma,eta_disc,gamma_D,eta_iter");
  EXPECT_EQ(cli("run --nx 10 --ny 10 --beta 0.1"), 2);
  EXPECT_EQ(cli("run --method jacobi"), 2);
  EXPECT_EQ(cli("run --config /nonexistent/ddest.cfg"), 2);
  EXPECT_EQ(cli("table t99"), 2);
  EXPECT_EQ(cli("run --no-such-flag 1"), 2);
  EXPECT_EQ(cli("run --help"), 0);
}

TEST(Cli, ConfigFileWithOverride) {
  const std::string cfg = ::testing::TempDir() + "ddest_test.cfg";
  {
    std::ofstream f(cfg);
    f << "nx=10\nny=10\nbeta=0.2\nK=1\nreference=none\n";
  }
  std::string out;
  ASSERT_EQ(cli("run --config " + cfg + " --K 3", &out), 0);
  EXPECT_NE(out.find("\n10,10,0.2,3,multiplicative,"), std::string::npos);
}

TEST(Cli, MeshDumpAndGsCheck) {
  std::string out;
  ASSERT_EQ(cli("mesh-dump --nx 10 --ny 10 --px 2 --py 2 --beta 0.2", &out), 0);
  EXPECT_EQ(out.substr(0, out.find('\n')), "vertices 121 triangles 200");
  ASSERT_EQ(cli("gs-check --systems 9", &out), 0);
  EXPECT_EQ(out.rfind("systems 9 max_violation", 0), 0u);
}
