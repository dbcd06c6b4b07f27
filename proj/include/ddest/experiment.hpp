#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddest/estimator.hpp"
#include "ddest/schwarz.hpp"

namespace ddest {

enum class ReferenceMode { exact, surrogate, none };

/// One experiment: problem, mesh, decomposition, Schwarz and estimator
/// settings. Every field can be set from a `key=value` line.
struct ExperimentConfig {
  std::string problem = "poisson";  ///< poisson | convdiff
  Scalar source_scale = 1.0;         ///< multiplies the right-hand side f
  int nx = 20, ny = 20;
  int px = 2, py = 1;
  Scalar beta = 0.1;  ///< overlap width between neighbouring subdomains
  int K = 2;
  Method method = Method::multiplicative;
  Scalar tau = 0.4;
  int forward_degree = 1;
  int adjoint_degree = 0;  ///< 0 picks the problem default
  std::optional<Rect> qoi_rect;
  std::optional<Rect> refine_rect;  ///< locally refined mesh when set
  Closure closure = Closure::longest_edge;
  std::vector<int> sweep_order;     ///< 1-based; empty means row-major
  ReferenceMode reference = ReferenceMode::exact;
  std::string output;  ///< CSV path, empty for none
  bool extended = false;

  Problem make_problem() const;
  Qoi make_qoi() const;
  Rect effective_qoi_rect() const;
  int effective_adjoint_degree() const;
  SchwarzConfig schwarz_config() const;
};

/// Applies one setting; throws ConfigError for unknown keys or bad values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);
/// Parses `key=value` lines; `#` starts a comment.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
std::vector<std::string> config_keys();

/// Mesh and decomposition validated against the configuration.
struct Setup {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const Decomposition> decomp;
};
Setup build_setup(const ExperimentConfig& config);

/// Caches surrogate iterate QoI histories and reference QoI values across
/// runs sharing everything but K.
class ReferenceCache {
 public:
  std::optional<std::vector<Scalar>> history(const std::string& key, int K) const;
  void store(const std::string& key, std::vector<Scalar> history);
  std::optional<Scalar> truth(const std::string& key) const;
  void store_truth(const std::string& key, Scalar value);

 private:
  std::map<std::string, std::vector<Scalar>> histories_;
  std::map<std::string, Scalar> truths_;
};

struct RunResult {
  ExperimentConfig config;
  ErrorReport report;
  int vertices = 0;
};

/// Forward trace, adjoint family, global adjoint and report, in that order.
RunResult run(const ExperimentConfig& config, ReferenceCache* cache = nullptr);

std::string csv_header(bool extended, int subdomains);
std::string csv_row(const RunResult& r, bool extended);

/// Table ids t1..t13 in order of appearance.
std::vector<std::string> table_ids();
std::vector<ExperimentConfig> table_configs(const std::string& id);
std::vector<RunResult> run_table(const std::string& id);

struct TwoStagePolicy {
  AdvisePolicy advise;
  Scalar stage2_beta = 0.2;
  bool compare_uniform = true;  ///< also run the uniformly refined mesh
};

struct TwoStageResult {
  RunResult stage1;
  Recommendation recommendation;
  std::optional<RunResult> stage2;
  std::optional<RunResult> uniform;
};

TwoStageResult two_stage(const ExperimentConfig& config, const TwoStagePolicy& policy = {});

/// Human-readable report block.
void print_report(std::ostream& os, const RunResult& r);

}  // namespace ddest
