#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "ddest/experiment.hpp"
#include "ddest/gsanalog.hpp"
#include "ddest/solver.hpp"

using namespace ddest;

namespace {

struct ConfigOptions {
  std::string file;
  std::map<std::string, std::string> overrides;
};

void add_config_options(CLI::App* app, ConfigOptions& opts) {
  app->add_option("--config", opts.file, "key=value configuration file");
  for (const auto& key : config_keys())
    app->add_option_function<std::string>("--" + key, [&opts, key](const std::string& v) { opts.overrides[key] = v; },
                                          "override '" + key + "'");
}

ExperimentConfig load_config(const ConfigOptions& opts) {
  ExperimentConfig config;
  if (!opts.file.empty()) {
    std::ifstream in(opts.file);
    if (!in) throw ConfigError("cannot open config file '" + opts.file + "'");
    config = parse_config(in);
  }
  for (const auto& [k, v] : opts.overrides) apply_setting(config, k, v);
  return config;
}

/// Writes CSV to the configured path, or to stdout when none is set.
void emit_csv(const std::string& path, const std::vector<RunResult>& rows, bool extended) {
  const int p = rows.empty() ? 0 : static_cast<int>(rows.front().report.S.size());
  std::ofstream file;
  if (!path.empty()) {
    file.open(path);
    if (!file) throw ConfigError("cannot write '" + path + "'");
  }
  std::ostream& os = path.empty() ? std::cout : file;
  os << csv_header(extended, p) << "\n";
  for (const auto& r : rows) os << csv_row(r, extended) << "\n";
}

std::string table_output;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overlapping Schwarz solvers with adjoint-based error estimates"};
  app.require_subcommand(1);

  ConfigOptions run_opts, ts_opts, mesh_opts;
  auto* run_cmd = app.add_subcommand("run", "single run: estimates and reference errors");
  add_config_options(run_cmd, run_opts);

  std::string table_id;
  auto* table_cmd = app.add_subcommand("table", "reproduce one results table (t1..t13)");
  table_cmd->add_option("id", table_id)->required();
  table_cmd->add_option("--output", table_output, "CSV path (default stdout)");

  Scalar stage2_beta = 0.2;
  auto* ts_cmd = app.add_subcommand("two-stage", "stage-1 run, recommendation, stage-2 run");
  add_config_options(ts_cmd, ts_opts);
  ts_cmd->add_option("--stage2-beta", stage2_beta, "overlap used when the iteration error dominates");

  int systems = 50;
  std::uint64_t seed = 20240611;
  auto* gs_cmd = app.add_subcommand("gs-check", "block Gauss-Seidel adjoint identity sweep");
  gs_cmd->add_option("--systems", systems);
  gs_cmd->add_option("--seed", seed);

  auto* mesh_cmd = app.add_subcommand("mesh-dump", "print the configured mesh");
  add_config_options(mesh_cmd, mesh_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help requests exit 0; malformed command lines are config errors.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      const ExperimentConfig config = load_config(run_opts);
      const RunResult r = run(config);
      print_report(std::cerr, r);
      emit_csv(config.output, {r}, config.extended);
    } else if (*table_cmd) {
      const auto rows = run_table(table_id);
      for (const auto& r : rows) print_report(std::cerr, r);
      emit_csv(table_output, rows, rows.front().config.extended);
    } else if (*ts_cmd) {
      const ExperimentConfig config = load_config(ts_opts);
      TwoStagePolicy policy;
      policy.stage2_beta = stage2_beta;
      const TwoStageResult ts = two_stage(config, policy);
      std::cerr << "stage 1:\n";
      print_report(std::cerr, ts.stage1);
      std::cerr << "recommendation: " << to_string(ts.recommendation.action);
      if (ts.recommendation.action == Action::refine_subdomain)
        std::cerr << " " << ts.recommendation.target + 1 << " (predicted S "
                  << ts.recommendation.predicted_contribution << ")";
      std::cerr << "\n";
      std::vector<RunResult> rows{ts.stage1};
      if (ts.stage2) {
        std::cerr << "stage 2:\n";
        print_report(std::cerr, *ts.stage2);
        rows.push_back(*ts.stage2);
      }
      if (ts.uniform) {
        std::cerr << "uniform refinement:\n";
        print_report(std::cerr, *ts.uniform);
      }
      emit_csv(config.output, rows, true);
    } else if (*gs_cmd) {
      const gs::SweepResult res = gs::gs_check_sweep(systems, seed);
      std::cout << "systems " << res.systems << " max_violation " << res.max_violation << "\n";
      if (!(res.max_violation <= 1e-12)) return 1;
    } else if (*mesh_cmd) {
      const Setup setup = build_setup(load_config(mesh_opts));
      write_mesh(std::cout, *setup.mesh);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
