#include "ddest/experiment.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

namespace ddest {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int out = std::stoi(v, &used);
    if (used == v.size()) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

Scalar parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const Scalar out = std::stod(v, &used);
    if (used == v.size()) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

/// "x0,x1,y0,y1"
Rect parse_rect(const std::string& key, const std::string& v) {
  const auto parts = split(v, ',');
  if (parts.size() != 4) throw ConfigError(key + ": expected x0,x1,y0,y1");
  return Rect{parse_real(key, parts[0]), parse_real(key, parts[1]), parse_real(key, parts[2]),
              parse_real(key, parts[3])};
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError(key + ": expected true or false");
}

std::string sci(Scalar x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", x);
  return buf;
}

std::string plain(Scalar x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string rect_key(const std::optional<Rect>& r) {
  if (!r) return "-";
  return plain(r->x0) + "," + plain(r->x1) + "," + plain(r->y0) + "," + plain(r->y1);
}

std::string mesh_key(const ExperimentConfig& c) {
  return std::to_string(c.nx) + "x" + std::to_string(c.ny) + "|" + rect_key(c.refine_rect) +
         (c.closure == Closure::green ? "g" : "l");
}

std::string truth_key(const ExperimentConfig& c) {
  return c.problem + "|" + plain(c.source_scale) + "|" + mesh_key(c) + "|" + rect_key(c.effective_qoi_rect()) + "|" +
         (c.reference == ReferenceMode::exact ? "exact" : "surrogate");
}

std::string history_key(const ExperimentConfig& c) {
  std::string order;
  for (int s : c.sweep_order) order += std::to_string(s) + ",";
  return c.problem + "|" + plain(c.source_scale) + "|" + mesh_key(c) + "|" + rect_key(c.effective_qoi_rect()) +
         "|" + std::to_string(c.px) + "x" +
         std::to_string(c.py) + "|" + plain(c.beta) + "|" + to_string(c.method) + "|" +
         (c.method == Method::additive ? plain(c.tau) : "-") + "|" + std::to_string(c.forward_degree) + "|" + order;
}

bool is_two_stage_table(const std::string& id) { return id == "t6" || id == "t7" || id == "t12" || id == "t13"; }

}  // namespace

Problem ExperimentConfig::make_problem() const {
  Problem p;
  if (problem == "poisson") p = poisson_problem();
  else if (problem == "convdiff") p = convection_diffusion_problem();
  else throw ConfigError("problem: expected poisson or convdiff, got '" + problem + "'");
  if (source_scale != 1.0) {
    // The solution is linear in f, so closed forms scale alongside.
    const Scalar s = source_scale;
    p.source = [s, f = p.source](const Point& x) { return s * f(x); };
    if (p.exact_solution) p.exact_solution = [s, u = *p.exact_solution](const Point& x) { return s * u(x); };
    if (p.exact_rect_integral)
      p.exact_rect_integral = [s, q = *p.exact_rect_integral](const Rect& r) { return s * q(r); };
  }
  return p;
}

Rect ExperimentConfig::effective_qoi_rect() const {
  if (qoi_rect) return *qoi_rect;
  if (problem == "convdiff") return Rect{0.05, 0.2, 0.05, 0.2};
  return Rect{0.6, 0.8, 0.6, 0.8};
}

Qoi ExperimentConfig::make_qoi() const { return Qoi::indicator_of(effective_qoi_rect()); }

int ExperimentConfig::effective_adjoint_degree() const {
  if (adjoint_degree > 0) return adjoint_degree;
  if (problem == "convdiff") return 3;
  return std::min(forward_degree + 1, 3);
}

SchwarzConfig ExperimentConfig::schwarz_config() const {
  SchwarzConfig c;
  c.method = method;
  c.iterations = K;
  c.tau = method == Method::additive ? tau : 1.0;
  c.degree = forward_degree;
  return c;
}

std::vector<std::string> config_keys() {
  return {"problem", "source_scale", "nx",         "ny",       "px",           "py",          "beta",      "K",
          "method",  "tau",        "forward_degree", "adjoint_degree", "qoi_rect", "refine_rect", "closure", "sweep_order",
          "reference", "output",   "extended"};
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "problem") c.problem = v;
  else if (key == "source_scale") c.source_scale = parse_real(key, v);
  else if (key == "nx") c.nx = parse_int(key, v);
  else if (key == "ny") c.ny = parse_int(key, v);
  else if (key == "px") c.px = parse_int(key, v);
  else if (key == "py") c.py = parse_int(key, v);
  else if (key == "beta") c.beta = parse_real(key, v);
  else if (key == "K") c.K = parse_int(key, v);
  else if (key == "method") {
    try {
      c.method = parse_method(v);
    } catch (const std::exception&) {
      throw ConfigError("method: expected multiplicative or additive, got '" + v + "'");
    }
  } else if (key == "tau") c.tau = parse_real(key, v);
  else if (key == "forward_degree") c.forward_degree = parse_int(key, v);
  else if (key == "adjoint_degree") c.adjoint_degree = parse_int(key, v);
  else if (key == "qoi_rect") c.qoi_rect = parse_rect(key, v);
  else if (key == "refine_rect") {
    if (v.empty() || v == "none") c.refine_rect.reset();
    else c.refine_rect = parse_rect(key, v);
  } else if (key == "closure") {
    if (v == "green") c.closure = Closure::green;
    else if (v == "longest_edge") c.closure = Closure::longest_edge;
    else throw ConfigError("closure: expected green or longest_edge, got '" + v + "'");
  } else if (key == "sweep_order") {
    c.sweep_order.clear();
    for (const auto& s : split(v, ',')) c.sweep_order.push_back(parse_int(key, s));
  } else if (key == "reference") {
    if (v == "exact") c.reference = ReferenceMode::exact;
    else if (v == "surrogate") c.reference = ReferenceMode::surrogate;
    else if (v == "none") c.reference = ReferenceMode::none;
    else throw ConfigError("reference: expected exact, surrogate or none, got '" + v + "'");
  } else if (key == "output") c.output = v;
  else if (key == "extended") c.extended = parse_bool(key, v);
  else throw ConfigError("unknown key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

Setup build_setup(const ExperimentConfig& c) {
  const Problem problem = c.make_problem();
  (void)problem;
  if (c.nx < 1 || c.ny < 1) throw ConfigError("nx, ny must be positive");
  if (c.px < 1 || c.py < 1) throw ConfigError("px, py must be positive");
  if (c.K < 1) throw ConfigError("K must be at least 1");
  if (c.forward_degree < 1 || c.forward_degree > 3) throw ConfigError("forward_degree must be 1, 2 or 3");
  if (c.adjoint_degree != 0 && (c.adjoint_degree < 1 || c.adjoint_degree > 3))
    throw ConfigError("adjoint_degree must be 1, 2 or 3");
  if (c.effective_adjoint_degree() <= c.forward_degree)
    throw ConfigError("adjoint_degree must exceed forward_degree");
  if (c.method == Method::additive && !(c.tau > 0)) throw ConfigError("tau must be positive");
  if (!std::isfinite(c.source_scale)) throw ConfigError("source_scale must be finite");
  if (!(c.beta >= 0)) throw ConfigError("beta must be non-negative");

  Mesh base = build_uniform(c.nx, c.ny);
  if (c.refine_rect) base = refine_region(base, *c.refine_rect, c.closure);
  auto mesh = std::make_shared<const Mesh>(std::move(base));

  const Rect qr = c.effective_qoi_rect();
  if (qr.degenerate() || !Rect{}.contains(Point(qr.x0, qr.y0)) || !Rect{}.contains(Point(qr.x1, qr.y1)))
    throw ConfigError("qoi_rect must be a non-degenerate rectangle inside the unit square");
  if (!element_region_consistency(*mesh, {qr})) throw ConfigError("qoi_rect is not aligned with the mesh");

  std::vector<int> order;
  for (int s : c.sweep_order) order.push_back(s - 1);
  // beta is the width of each overlap strip: cells extend beta/2 per side.
  const auto rects = grid_rects(c.px, c.py, c.beta / 2);
  if (!order.empty() && static_cast<int>(order.size()) != c.px * c.py)
    throw ConfigError("sweep_order must list every subdomain once");
  auto decomp = std::make_shared<const Decomposition>(mesh, rects, order);
  return {mesh, decomp};
}

std::optional<std::vector<Scalar>> ReferenceCache::history(const std::string& key, int K) const {
  const auto it = histories_.find(key);
  if (it == histories_.end() || static_cast<int>(it->second.size()) <= K) return std::nullopt;
  return std::vector<Scalar>(it->second.begin(), it->second.begin() + K + 1);
}

void ReferenceCache::store(const std::string& key, std::vector<Scalar> history) {
  auto& slot = histories_[key];
  if (history.size() > slot.size()) slot = std::move(history);
}

std::optional<Scalar> ReferenceCache::truth(const std::string& key) const {
  const auto it = truths_.find(key);
  if (it == truths_.end()) return std::nullopt;
  return it->second;
}

void ReferenceCache::store_truth(const std::string& key, Scalar value) { truths_[key] = value; }

RunResult run(const ExperimentConfig& config, ReferenceCache* cache) {
  const Setup setup = build_setup(config);
  const Problem problem = config.make_problem();
  const Qoi qoi = config.make_qoi();
  const SchwarzConfig sc = config.schwarz_config();
  const int q = config.effective_adjoint_degree();

  const SchwarzTrace trace = run_schwarz(problem, *setup.decomp, sc);
  const AdjointFamily family =
      config.method == Method::multiplicative
          ? solve_multiplicative_adjoints(problem, *setup.decomp, config.K, qoi, q)
          : solve_additive_adjoints(problem, *setup.decomp, config.K, sc.tau, qoi, q);
  const DiscretizationEstimate disc = discretization_estimate(trace, family, problem, *setup.decomp);
  const FeFunction phi = solve_global_adjoint(problem, qoi, setup.mesh, q);

  RunResult out;
  out.config = config;
  out.vertices = setup.mesh->num_vertices();
  ErrorReport& r = out.report;
  r.eta_total = total_estimate(trace, phi, problem);
  r.eta_disc = disc.total;
  r.S = disc.per_subdomain;
  r.eta_iter = iteration_estimate(r.eta_total, r.eta_disc);

  if (config.reference != ReferenceMode::none) {
    const Scalar q_discrete = qoi_value(trace.final_iterate(), qoi);

    std::optional<Scalar> truth = cache ? cache->truth(truth_key(config)) : std::nullopt;
    if (!truth) {
      Problem ref_problem = problem;
      if (config.reference == ReferenceMode::surrogate) {
        ref_problem.exact_solution.reset();
        ref_problem.exact_rect_integral.reset();
      }
      truth = reference_qoi(ref_problem, qoi, *setup.mesh);
      if (cache) cache->store_truth(truth_key(config), *truth);
    }

    std::optional<std::vector<Scalar>> hist = cache ? cache->history(history_key(config), config.K) : std::nullopt;
    if (!hist) {
      hist = surrogate_iterate_qoi(problem, qoi, *setup.decomp, sc);
      if (cache) cache->store(history_key(config), *hist);
    }

    const std::string limit_key = truth_key(config) + "|limit" + std::to_string(config.forward_degree);
    std::optional<Scalar> limit = cache ? cache->truth(limit_key) : std::nullopt;
    if (!limit) {
      limit = surrogate_limit_qoi(problem, qoi, *setup.mesh, config.forward_degree);
      if (cache) cache->store_truth(limit_key, *limit);
    }

    const ReferenceErrors ref = combine_reference(*truth, q_discrete, hist->at(config.K), limit);
    r.has_reference = true;
    r.ref_total = ref.total;
    r.ref_disc = ref.disc;
    r.ref_iter = ref.iter;
    apply_reference(r, r.ref_total, r.ref_disc);
  }
  return out;
}

std::string csv_header(bool extended, int subdomains) {
  std::string h = "nx,ny,beta,K,method,tau,eta_total,gamma,eta_disc,gamma_D,eta_iter";
  if (extended)
    for (int i = 1; i <= subdomains; ++i) h += ",S_" + std::to_string(i);
  return h;
}

std::string csv_row(const RunResult& res, bool extended) {
  const auto& c = res.config;
  const auto& r = res.report;
  std::string row = std::to_string(c.nx) + "," + std::to_string(c.ny) + "," + plain(c.beta) + "," +
                    std::to_string(c.K) + "," + to_string(c.method) + "," +
                    (c.method == Method::additive ? plain(c.tau) : std::string()) + "," + sci(r.eta_total) + "," +
                    (r.has_reference ? sci(r.gamma) : std::string()) + "," + sci(r.eta_disc) + "," +
                    (r.has_reference ? sci(r.gamma_D) : std::string()) + "," + sci(r.eta_iter);
  if (extended)
    for (int i = 0; i < r.S.size(); ++i) row += "," + sci(r.S[i]);
  return row;
}

std::vector<std::string> table_ids() {
  std::vector<std::string> ids;
  for (int i = 1; i <= 13; ++i) ids.push_back("t" + std::to_string(i));
  return ids;
}

std::vector<ExperimentConfig> table_configs(const std::string& id) {
  auto sweep = [](Method m, int px, int py) {
    ExperimentConfig base;
    base.method = m;
    base.px = px;
    base.py = py;
    std::vector<ExperimentConfig> rows;
    for (auto [n, beta, K] : {std::tuple{20, 0.1, 2}, {20, 0.2, 2}, {20, 0.1, 2}, {20, 0.1, 4}, {20, 0.1, 2},
                              {40, 0.1, 2}}) {
      ExperimentConfig c = base;
      c.nx = c.ny = n;
      c.beta = beta;
      c.K = K;
      rows.push_back(c);
    }
    return rows;
  };
  auto convdiff = [](Method m) {
    std::vector<ExperimentConfig> rows;
    for (auto [px, py] : {std::pair{4, 1}, {1, 4}})
      for (int K : {2, 4, 6}) {
        ExperimentConfig c;
        c.problem = "convdiff";
        c.source_scale = 100;  // the tabulated values correspond to f = 100
        c.method = m;
        c.px = px;
        c.py = py;
        c.K = K;
        rows.push_back(c);
      }
    return rows;
  };
  auto disc_stage1 = [](Method m) {
    ExperimentConfig c;
    c.method = m;
    c.nx = c.ny = 10;
    c.px = c.py = 2;
    c.beta = 0.2;
    c.K = 6;
    c.extended = true;
    return std::vector<ExperimentConfig>{c};
  };
  auto iter_stage1 = [](Method m) {
    ExperimentConfig c;
    c.method = m;
    c.nx = c.ny = 40;
    c.px = c.py = 2;
    c.beta = 0.05;
    c.K = 2;
    return std::vector<ExperimentConfig>{c};
  };

  if (id == "t1") return sweep(Method::multiplicative, 2, 1);
  if (id == "t2") return sweep(Method::multiplicative, 4, 1);
  if (id == "t3") return sweep(Method::multiplicative, 4, 4);
  if (id == "t4") {
    std::vector<ExperimentConfig> rows;
    for (int K = 1; K <= 10; ++K) {
      ExperimentConfig c;
      c.nx = c.ny = 40;
      c.beta = 0.05;
      c.K = K;
      c.qoi_rect = Rect{0.4, 0.8, 0.4, 0.8};
      rows.push_back(c);
    }
    return rows;
  }
  if (id == "t5") return convdiff(Method::multiplicative);
  if (id == "t6") return disc_stage1(Method::multiplicative);
  if (id == "t7") return iter_stage1(Method::multiplicative);
  if (id == "t8") return sweep(Method::additive, 2, 1);
  if (id == "t9") return sweep(Method::additive, 4, 1);
  if (id == "t10") return sweep(Method::additive, 4, 4);
  if (id == "t11") return convdiff(Method::additive);
  if (id == "t12") return disc_stage1(Method::additive);
  if (id == "t13") return iter_stage1(Method::additive);
  throw ConfigError("unknown table id '" + id + "' (expected t1..t13)");
}

std::vector<RunResult> run_table(const std::string& id) {
  const auto configs = table_configs(id);
  if (is_two_stage_table(id)) {
    TwoStagePolicy policy;
    policy.compare_uniform = false;
    TwoStageResult ts = two_stage(configs.front(), policy);
    std::vector<RunResult> rows{ts.stage1};
    if (ts.stage2) rows.push_back(*ts.stage2);
    return rows;
  }
  // Repeated rows and rows differing only in K share one reference run.
  ReferenceCache cache;
  std::map<std::string, int> max_k;
  for (const auto& c : configs) max_k[history_key(c)] = std::max(max_k[history_key(c)], c.K);
  for (const auto& c : configs) {
    const std::string key = history_key(c);
    if (cache.history(key, max_k[key])) continue;
    const Setup setup = build_setup(c);
    SchwarzConfig sc = c.schwarz_config();
    sc.iterations = max_k[key];
    cache.store(key, surrogate_iterate_qoi(c.make_problem(), c.make_qoi(), *setup.decomp, sc));
  }
  std::vector<RunResult> rows;
  for (const auto& c : configs) rows.push_back(run(c, &cache));
  return rows;
}

TwoStageResult two_stage(const ExperimentConfig& config, const TwoStagePolicy& policy) {
  TwoStageResult out;
  ExperimentConfig stage1 = config;
  stage1.extended = true;
  out.stage1 = run(stage1);
  out.recommendation = two_stage_advise(out.stage1.report, policy.advise);

  ExperimentConfig stage2 = stage1;
  switch (out.recommendation.action) {
    case Action::none: return out;
    case Action::refine_subdomain: {
      const Setup setup = build_setup(stage1);
      stage2.refine_rect = setup.decomp->rect(out.recommendation.target);
      if (policy.compare_uniform) {
        ExperimentConfig uniform = stage1;
        uniform.nx *= 2;
        uniform.ny *= 2;
        out.uniform = run(uniform);
      }
      break;
    }
    case Action::increase_overlap:
      if (policy.stage2_beta <= stage1.beta)
        throw ConfigError("stage-2 beta must exceed the stage-1 beta");
      stage2.beta = policy.stage2_beta;
      break;
  }
  out.stage2 = run(stage2);
  return out;
}

void print_report(std::ostream& os, const RunResult& res) {
  const auto& c = res.config;
  const auto& r = res.report;
  os << "problem " << c.problem << ", " << c.nx << "x" << c.ny;
  if (c.refine_rect) os << " refined in " << rect_key(c.refine_rect);
  os << " (" << res.vertices << " vertices), " << c.px << "x" << c.py << " subdomains, beta " << plain(c.beta)
     << ", " << to_string(c.method);
  if (c.method == Method::additive) os << " tau " << plain(c.tau);
  os << ", K " << c.K << ", degrees " << c.forward_degree << "/" << c.effective_adjoint_degree() << "\n";
  os << "  eta_total " << sci(r.eta_total) << "  eta_disc " << sci(r.eta_disc) << "  eta_iter " << sci(r.eta_iter)
     << "\n";
  if (r.has_reference)
    os << "  ref_total " << sci(r.ref_total) << "  ref_disc " << sci(r.ref_disc) << "  ref_iter " << sci(r.ref_iter)
       << "  gamma " << sci(r.gamma) << "  gamma_D " << sci(r.gamma_D) << "\n";
  os << "  S";
  for (int i = 0; i < r.S.size(); ++i) os << " " << sci(r.S[i]);
  os << "\n";
}

}  // namespace ddest
