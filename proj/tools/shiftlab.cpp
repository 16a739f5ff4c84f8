// shiftlab: spectral shift functions for contraction and dissipative pairs
// through finite periodic unitary dilations, with trace-formula verification.
//
// Exit codes: 0 all checks pass; 1 a verification criterion failed;
// 2 configuration error; 3 input error; 4 pipeline error.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "shiftlab/circle_ssf.hpp"
#include "shiftlab/contraction_ssf.hpp"
#include "shiftlab/dilation.hpp"
#include "shiftlab/dissipative_ssf.hpp"
#include "shiftlab/io.hpp"
#include "shiftlab/parallel.hpp"
#include "shiftlab/rng.hpp"

namespace fs = std::filesystem;
using namespace shiftlab;
using nlohmann::json;

namespace {

constexpr int kExitAcceptanceFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitInputError = 3;
constexpr int kExitPipelineError = 4;

struct ConfigError : Error {
  using Error::Error;
};
struct InputError : Error {
  using Error::Error;
};

struct RunContext {
  json config;
  fs::path out_dir;
  std::uint64_t master_seed = 1;
  int trials = 1;
  bool quiet = false;
  bool emit_svg = false;

  std::mutex emit_mutex;
  std::vector<std::string> emitted;  // file names relative to out_dir

  void emit(const std::string& name, const std::string& contents) {
    atomic_write(out_dir / name, contents);
    std::lock_guard<std::mutex> lock(emit_mutex);
    emitted.push_back(name);
  }
};

json get_section(const json& cfg, const char* key) {
  return cfg.contains(key) ? cfg.at(key) : json::object();
}

PipelineConfig pipeline_from_json(const json& p) {
  PipelineConfig cfg;
  cfg.period = p.value("N", 64);
  cfg.alpha = p.value("alpha", 1.0);
  cfg.kernel_tol = p.value("kernel_tol", kDefaultKernelTol);
  cfg.tol_role = p.value("tol_role", kDefaultRoleTol);
  cfg.normalization = normalization_from_string(p.value("normalization", std::string("minimal-l1")));
  cfg.max_degree = p.value("max_degree", 16);
  cfg.random_polynomials = p.value("random_polynomials", 4);
  cfg.poly_tolerance = p.value("poly_tolerance", 1e-8);
  if (cfg.period < 3 || cfg.max_degree < 1 || cfg.alpha <= 0.5 || cfg.alpha > 1.0 ||
      cfg.kernel_tol <= 0.0 || cfg.poly_tolerance <= 0.0)
    throw ConfigError("pipeline section has out-of-range values");
  return cfg;
}

std::vector<RationalFn> rational_set_from_json(const json& p) {
  if (!p.contains("rational_poles")) return default_rational_set();
  std::vector<RationalFn> fs;
  for (const json& entry : p.at("rational_poles")) {
    if (!entry.is_array() || entry.size() != 3)
      throw ConfigError("rational_poles entries must be [re, im, order]");
    RationalFn f;
    const Complex pole(entry[0].get<double>(), entry[1].get<double>());
    const int order = entry[2].get<int>();
    if (order != 1 && order != 2) throw ConfigError("rational pole order must be 1 or 2");
    f.terms.push_back({pole, order, Complex(1.0, 0.0)});
    f.label = "(t-(" + format_double(pole.real()) + "," + format_double(pole.imag()) + "i))^-" +
              std::to_string(order);
    fs.push_back(std::move(f));
  }
  if (fs.empty()) throw ConfigError("rational_poles must not be empty");
  return fs;
}

EnsembleConfig ensemble_from_json(const json& e, const std::string& default_kind,
                                  std::uint64_t seed) {
  EnsembleConfig cfg;
  cfg.dim = e.value("dim", 3);
  cfg.kind = e.value("kind", default_kind);
  cfg.margin = e.value("margin", 0.1);
  cfg.perturbation_rank = e.value("perturbation_rank", 1);
  cfg.perturbation_size = e.value("perturbation_size", 0.05);
  cfg.seed = seed;
  return cfg;
}

Operator ingest_with_role(const fs::path& path, const std::string& role, double tol_role) {
  Operator op = read_operator(path);  // throws SchemaError with diagnostics
  RoleReport r = classify(op.mat, tol_role);
  if (role == "contraction" && !r.contraction)
    throw InputError(path.string() + ": expected a contraction, sigma_max = " +
                     format_double(r.sigma_max));
  if (role == "unitary" && !r.unitary)
    throw InputError(path.string() + ": expected a unitary, ||U*U - I||_F = " +
                     format_double(r.unitary_defect));
  if (role == "dissipative" && !r.dissipative)
    throw InputError(path.string() + ": expected a dissipative operator, lambda_min(Im) = " +
                     format_double(r.min_imag_eig));
  return op;
}

std::string trial_tag(int trial) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "trial-%03d", trial);
  return buf;
}

json ssf_summary(const SSFResult& res) {
  JumpCheck jc = check_integer_jumps(res.ssf);
  double worst = 0.0;
  for (const auto& row : res.residuals) worst = std::max(worst, row.abs_residual);
  return json{{"period_requested", res.period_requested},
              {"period_used", res.period_used},
              {"breakpoints", res.ssf.breakpoints.size()},
              {"hypothesis", hypothesis_to_json(res.hypothesis)},
              {"max_residual", worst},
              {"all_pass", res.all_pass},
              {"integer_jumps", jc.integer_jumps},
              {"jump_deviation", jc.max_deviation},
              {"an_functional_of_difference", res.an_functional_of_difference},
              {"s1_dilation_difference", res.s1_difference},
              {"residuals", residuals_to_json(res.residuals)},
              {"caveat", res.caveat}};
}

// ----------------------------- commands ------------------------------------

bool cmd_ssf_contraction(RunContext& ctx, json& results) {
  const json pipeline_json = get_section(ctx.config, "pipeline");
  PipelineConfig pipeline = pipeline_from_json(pipeline_json);
  const json inputs = get_section(ctx.config, "inputs");

  std::optional<std::pair<Operator, Operator>> fixed;
  if (inputs.contains("t0") || inputs.contains("t1")) {
    if (!inputs.contains("t0") || !inputs.contains("t1"))
      throw ConfigError("inputs must provide both t0 and t1");
    fixed = std::make_pair(
        ingest_with_role(inputs.at("t0").get<std::string>(), "contraction", pipeline.tol_role),
        ingest_with_role(inputs.at("t1").get<std::string>(), "contraction", pipeline.tol_role));
    if (fixed->first.dim() != fixed->second.dim())
      throw InputError("t0 and t1 have different dimensions");
  }

  std::vector<json> per_trial(static_cast<size_t>(ctx.trials));
  std::vector<char> pass(static_cast<size_t>(ctx.trials), 0);
  parallel_for_index(static_cast<size_t>(ctx.trials), [&](size_t trial) {
    std::pair<Operator, Operator> pair =
        fixed ? *fixed
              : random_pair(ensemble_from_json(get_section(ctx.config, "ensemble"),
                                               "strict-contraction", ctx.master_seed + trial));
    SSFResult res = real_ssf(pair.first.mat, pair.second.mat, pipeline);
    const std::string tag = trial_tag(static_cast<int>(trial));
    ctx.emit(tag + ".ssf.csv", step_circle_csv(res.ssf));
    ctx.emit(tag + ".ssf.json", step_circle_sidecar(res.ssf).dump(2) + "\n");
    ctx.emit(tag + ".residuals.csv", residual_table_csv(res.residuals));
    if (ctx.emit_svg) ctx.emit(tag + ".ssf.svg", step_circle_svg(res.ssf));
    json j = ssf_summary(res);
    j["trial"] = trial;
    j["labels"] = {pair.first.label, pair.second.label};
    per_trial[trial] = std::move(j);
    pass[trial] = res.all_pass ? 1 : 0;
  });
  bool all = true;
  for (size_t t = 0; t < per_trial.size(); ++t) {
    results.push_back(std::move(per_trial[t]));
    all = all && pass[t];
  }
  return all;
}

bool cmd_ssf_unitary(RunContext& ctx, json& results) {
  const json pipeline_json = get_section(ctx.config, "pipeline");
  const double tol_role = pipeline_json.value("tol_role", kDefaultRoleTol);
  const int max_degree = pipeline_json.value("max_degree", 16);
  const double tolerance = pipeline_json.value("poly_tolerance", 1e-10);
  const Normalization mode =
      normalization_from_string(pipeline_json.value("normalization", std::string("minimal-l1")));
  const json inputs = get_section(ctx.config, "inputs");

  std::optional<std::pair<Operator, Operator>> fixed;
  if (inputs.contains("u0") || inputs.contains("u1")) {
    if (!inputs.contains("u0") || !inputs.contains("u1"))
      throw ConfigError("inputs must provide both u0 and u1");
    fixed = std::make_pair(
        ingest_with_role(inputs.at("u0").get<std::string>(), "unitary", tol_role),
        ingest_with_role(inputs.at("u1").get<std::string>(), "unitary", tol_role));
    if (fixed->first.dim() != fixed->second.dim())
      throw InputError("u0 and u1 have different dimensions");
  }

  std::vector<json> per_trial(static_cast<size_t>(ctx.trials));
  std::vector<char> pass(static_cast<size_t>(ctx.trials), 0);
  parallel_for_index(static_cast<size_t>(ctx.trials), [&](size_t trial) {
    std::pair<Operator, Operator> pair =
        fixed ? *fixed
              : random_pair(ensemble_from_json(get_section(ctx.config, "ensemble"), "unitary",
                                               ctx.master_seed + trial));
    StepFunctionCircle eta = unitary_ssf(pair.first.mat, pair.second.mat, mode, tol_role);
    std::vector<TraceFormulaReport> rows;
    for (int k = -max_degree; k <= max_degree; ++k) {
      if (k == 0) continue;
      TraceFormulaReport r;
      r.function_label = "z^" + std::to_string(k);
      LaurentPoly p = LaurentPoly::monomial(k);
      r.lhs = (poly_eval(pair.second.mat, p, tol_role) - poly_eval(pair.first.mat, p, tol_role))
                  .trace();
      r.rhs = integrate_step(eta, p);
      r.abs_residual = std::abs(r.lhs - r.rhs);
      r.tolerance = tolerance;
      r.pass = r.abs_residual <= tolerance;
      rows.push_back(std::move(r));
    }
    const bool ok = std::all_of(rows.begin(), rows.end(),
                                [](const TraceFormulaReport& r) { return r.pass; });
    const std::string tag = trial_tag(static_cast<int>(trial));
    ctx.emit(tag + ".ssf.csv", step_circle_csv(eta));
    ctx.emit(tag + ".ssf.json", step_circle_sidecar(eta).dump(2) + "\n");
    ctx.emit(tag + ".residuals.csv", residual_table_csv(rows));
    if (ctx.emit_svg) ctx.emit(tag + ".ssf.svg", step_circle_svg(eta));
    JumpCheck jc = check_integer_jumps(eta);
    per_trial[trial] = json{{"trial", trial},
                            {"labels", {pair.first.label, pair.second.label}},
                            {"breakpoints", eta.breakpoints.size()},
                            {"integer_jumps", jc.integer_jumps},
                            {"all_pass", ok},
                            {"residuals", residuals_to_json(rows)}};
    pass[trial] = ok ? 1 : 0;
  });
  bool all = true;
  for (size_t t = 0; t < per_trial.size(); ++t) {
    results.push_back(std::move(per_trial[t]));
    all = all && pass[t];
  }
  return all;
}

bool cmd_ssf_dissipative(RunContext& ctx, json& results) {
  const json pipeline_json = get_section(ctx.config, "pipeline");
  LinePipelineConfig cfg;
  cfg.circle = pipeline_from_json(pipeline_json);
  cfg.kernel_tol = pipeline_json.value("kernel_tol", kDefaultKernelTol);
  cfg.rational_tolerance = pipeline_json.value("rational_tolerance", 1e-6);
  cfg.test_set = rational_set_from_json(pipeline_json);
  const json inputs = get_section(ctx.config, "inputs");

  std::optional<std::pair<Operator, Operator>> fixed;
  if (inputs.contains("l0") || inputs.contains("l1")) {
    if (!inputs.contains("l0") || !inputs.contains("l1"))
      throw ConfigError("inputs must provide both l0 and l1");
    fixed = std::make_pair(
        ingest_with_role(inputs.at("l0").get<std::string>(), "dissipative", cfg.circle.tol_role),
        ingest_with_role(inputs.at("l1").get<std::string>(), "dissipative", cfg.circle.tol_role));
    if (fixed->first.dim() != fixed->second.dim())
      throw InputError("l0 and l1 have different dimensions");
  }

  std::vector<json> per_trial(static_cast<size_t>(ctx.trials));
  std::vector<char> pass(static_cast<size_t>(ctx.trials), 0);
  parallel_for_index(static_cast<size_t>(ctx.trials), [&](size_t trial) {
    std::pair<Operator, Operator> pair =
        fixed ? *fixed
              : random_pair(ensemble_from_json(get_section(ctx.config, "ensemble"), "dissipative",
                                               ctx.master_seed + trial));
    DissipativeOperator l0 = make_dissipative(pair.first, cfg.circle.tol_role);
    DissipativeOperator l1 = make_dissipative(pair.second, cfg.circle.tol_role);
    LineSSFResult res = real_ssf_line(l0, l1, cfg);
    TailProbeReport probe = nonintegrability_probe(l0, l1, res);
    const std::string tag = trial_tag(static_cast<int>(trial));
    ctx.emit(tag + ".line.csv", step_line_csv(res.ssf));
    ctx.emit(tag + ".line.json", step_line_sidecar(res.ssf).dump(2) + "\n");
    ctx.emit(tag + ".residuals.csv", residual_table_csv(res.residuals));
    if (ctx.emit_svg) ctx.emit(tag + ".line.svg", step_line_svg(res.ssf, 10.0));
    double worst = 0.0;
    for (const auto& row : res.residuals) worst = std::max(worst, row.abs_residual);
    per_trial[trial] = json{{"trial", trial},
                            {"labels", {pair.first.label, pair.second.label}},
                            {"period_used", res.period_used},
                            {"condition31", condition31_to_json(res.condition31)},
                            {"weighted", weighted_report_to_json(res.weighted)},
                            {"probe", tail_probe_to_json(probe)},
                            {"max_residual", worst},
                            {"all_pass", res.all_pass},
                            {"residuals", residuals_to_json(res.residuals)},
                            {"caveat", res.caveat}};
    pass[trial] = res.all_pass ? 1 : 0;
  });
  bool all = true;
  for (size_t t = 0; t < per_trial.size(); ++t) {
    results.push_back(std::move(per_trial[t]));
    all = all && pass[t];
  }
  return all;
}

bool cmd_verify(RunContext& ctx, json& results) {
  const json inputs = get_section(ctx.config, "inputs");
  for (const char* key : {"t0", "t1", "ssf_csv"})
    if (!inputs.contains(key)) throw ConfigError(std::string("verify needs inputs.") + key);
  PipelineConfig pipeline = pipeline_from_json(get_section(ctx.config, "pipeline"));
  Operator t0 =
      ingest_with_role(inputs.at("t0").get<std::string>(), "contraction", pipeline.tol_role);
  Operator t1 =
      ingest_with_role(inputs.at("t1").get<std::string>(), "contraction", pipeline.tol_role);
  std::optional<fs::path> sidecar;
  if (inputs.contains("ssf_sidecar")) sidecar = inputs.at("ssf_sidecar").get<std::string>();
  StepFunctionCircle ssf = read_step_circle_csv(inputs.at("ssf_csv").get<std::string>(), sidecar);
  auto rows = verify_trace_formula(t0.mat, t1.mat, ssf, default_polynomial_set(pipeline),
                                   pipeline.poly_tolerance);
  ctx.emit("verify.residuals.csv", residual_table_csv(rows));
  const bool ok =
      std::all_of(rows.begin(), rows.end(), [](const TraceFormulaReport& r) { return r.pass; });
  results.push_back(json{{"all_pass", ok}, {"residuals", residuals_to_json(rows)}});
  return ok;
}

bool cmd_study_defects(RunContext& ctx, json& results) {
  const json study = get_section(ctx.config, "study");
  std::vector<Eigen::Index> dims;
  for (const json& d : study.value("dims", json::array({2, 4, 8, 16, 32, 64, 128})))
    dims.push_back(d.get<Eigen::Index>());
  const int per_dim = study.value("trials_per_dim", 3);
  const double margin = study.value("margin", 0.2);
  const double eps = study.value("perturbation_size", 0.05);
  const int rank = study.value("perturbation_rank", 1);
  const double p = study.value("p", 1.0);
  const double alpha = study.value("alpha", 1.0);
  const double threshold = study.value("ratio_threshold", 3.0);

  std::ostringstream csv;
  csv << "dim,seed,norm_a,norm_b,defect_diff,defect_diff_star\n";
  double lo = 1e300, hi = 0.0;
  json table = json::array();
  for (Eigen::Index dim : dims) {
    std::vector<EnsembleConfig> family;
    for (int trial = 0; trial < per_dim; ++trial) {
      EnsembleConfig cfg;
      cfg.dim = dim;
      cfg.kind = "strict-contraction";
      cfg.margin = margin;
      cfg.seed = ctx.master_seed + 977 * static_cast<std::uint64_t>(dim) +
                 static_cast<std::uint64_t>(trial);
      cfg.perturbation_rank = rank;
      cfg.perturbation_size = eps;
      family.push_back(cfg);
    }
    auto rows = defect_difference_study(family, p, alpha);
    double mean = 0.0;
    for (const auto& row : rows) {
      csv << row.dim << "," << row.seed << "," << format_double(row.norm_a) << ","
          << format_double(row.norm_b) << "," << format_double(row.defect_diff) << ","
          << format_double(row.defect_diff_star) << "\n";
      table.push_back(json{{"dim", row.dim},
                           {"seed", row.seed},
                           {"norm_a", row.norm_a},
                           {"norm_b", row.norm_b},
                           {"defect_diff", row.defect_diff},
                           {"defect_diff_star", row.defect_diff_star}});
      mean += row.defect_diff;
    }
    mean /= static_cast<double>(rows.size());
    lo = std::min(lo, mean);
    hi = std::max(hi, mean);
  }
  ctx.emit("defect_study.csv", csv.str());
  const double ratio = lo > 0.0 ? hi / lo : 0.0;
  const bool ok = ratio <= threshold;
  results.push_back(json{{"table", std::move(table)},
                         {"max_min_ratio", ratio},
                         {"ratio_threshold", threshold},
                         {"all_pass", ok}});
  return ok;
}

bool cmd_study_sqrt(RunContext& ctx, json& results) {
  const json study = get_section(ctx.config, "study");
  std::vector<Eigen::Index> dims;
  for (const json& d : study.value("dims", json::array({2, 4, 8, 16, 32, 64, 128})))
    dims.push_back(d.get<Eigen::Index>());
  const int per_dim = study.value("trials_per_dim", 3);
  const double margin = study.value("margin", 0.2);
  const double eps = study.value("perturbation_size", 0.05);
  const int rank = study.value("perturbation_rank", 1);
  const double p = study.value("p", 1.0);
  const double alpha = study.value("alpha", 1.0);
  const double threshold = study.value("ratio_threshold", 3.0);

  std::ostringstream csv;
  csv << "dim,seed,ynorm,wnorm,target\n";
  double lo = 1e300, hi = 0.0;
  json table = json::array();
  for (Eigen::Index dim : dims) {
    double mean = 0.0;
    for (int trial = 0; trial < per_dim; ++trial) {
      EnsembleConfig cfg;
      cfg.dim = dim;
      cfg.kind = "positive-contraction";
      cfg.margin = margin;
      cfg.seed = ctx.master_seed + 1291 * static_cast<std::uint64_t>(dim) +
                 static_cast<std::uint64_t>(trial);
      cfg.perturbation_rank = rank;
      cfg.perturbation_size = eps;
      auto [x, y] = random_pair(cfg);
      SqrtStudyResult r = sqrt_lipschitz_study(x.mat, y.mat, alpha, p);
      csv << dim << "," << cfg.seed << "," << format_double(r.ynorm) << ","
          << format_double(r.wnorm) << "," << format_double(r.target) << "\n";
      table.push_back(json{{"dim", dim},
                           {"seed", cfg.seed},
                           {"ynorm", r.ynorm},
                           {"wnorm", r.wnorm},
                           {"target", r.target}});
      mean += r.target;
    }
    mean /= static_cast<double>(per_dim);
    lo = std::min(lo, mean);
    hi = std::max(hi, mean);
  }
  ctx.emit("sqrt_study.csv", csv.str());
  const double ratio = lo > 0.0 ? hi / lo : 0.0;
  const bool ok = ratio <= threshold;
  results.push_back(json{{"table", std::move(table)},
                         {"max_min_ratio", ratio},
                         {"ratio_threshold", threshold},
                         {"all_pass", ok}});
  return ok;
}

bool cmd_probe_tail(RunContext& ctx, json& results) {
  const json pipeline_json = get_section(ctx.config, "pipeline");
  LinePipelineConfig cfg;
  cfg.circle = pipeline_from_json(pipeline_json);
  cfg.rational_tolerance = pipeline_json.value("rational_tolerance", 1e-6);
  cfg.test_set = rational_set_from_json(pipeline_json);
  const json probe_cfg = get_section(ctx.config, "probe");
  const Eigen::Index dim = probe_cfg.value("dim", 3);
  const double floor = probe_cfg.value("im_floor", 0.2);
  const double size = probe_cfg.value("perturbation_size", 0.1);

  std::vector<json> per_trial(static_cast<size_t>(ctx.trials));
  std::vector<char> pass(static_cast<size_t>(ctx.trials), 0);
  parallel_for_index(static_cast<size_t>(ctx.trials), [&](size_t trial) {
    EnsembleConfig base;
    base.dim = dim;
    base.kind = "dissipative";
    base.margin = floor;
    base.seed = ctx.master_seed + trial;
    DissipativeOperator l0 = make_dissipative(random_operator(base));

    StreamRng rng(base.seed, 2);
    Vector u = rng.gaussian_matrix(dim, 1).col(0);
    u /= u.norm();
    Matrix proj = u * u.adjoint();
    DissipativeOperator la = make_dissipative(
        Operator(Matrix(l0.op.mat + Complex(0.0, size) * proj), "projector-family"));
    Matrix h = rng.rank_r_hermitian(dim, dim > 1 ? 2 : 1);
    DissipativeOperator lb =
        make_dissipative(Operator(Matrix(l0.op.mat + size * h), "hermitian-family"));

    LineSSFResult res_a = real_ssf_line(l0, la, cfg);
    LineSSFResult res_b = real_ssf_line(l0, lb, cfg);
    TailProbeReport pa = nonintegrability_probe(l0, la, res_a);
    TailProbeReport pb = nonintegrability_probe(l0, lb, res_b);
    per_trial[trial] = json{{"trial", trial},
                            {"projector_family",
                             {{"probe", tail_probe_to_json(pa)},
                              {"weighted", weighted_report_to_json(res_a.weighted)},
                              {"all_pass", res_a.all_pass}}},
                            {"hermitian_family",
                             {{"probe", tail_probe_to_json(pb)},
                              {"weighted", weighted_report_to_json(res_b.weighted)},
                              {"all_pass", res_b.all_pass}}}};
    pass[trial] = (res_a.all_pass && res_b.all_pass) ? 1 : 0;
  });
  bool all = true;
  for (size_t t = 0; t < per_trial.size(); ++t) {
    results.push_back(std::move(per_trial[t]));
    all = all && pass[t];
  }
  return all;
}

int run(RunContext& ctx) {
  const std::string command = ctx.config.value("command", std::string{});
  const auto start = std::chrono::steady_clock::now();
  json results = json::array();
  bool ok = false;
  if (command == "ssf-contraction")
    ok = cmd_ssf_contraction(ctx, results);
  else if (command == "ssf-unitary")
    ok = cmd_ssf_unitary(ctx, results);
  else if (command == "ssf-dissipative")
    ok = cmd_ssf_dissipative(ctx, results);
  else if (command == "verify")
    ok = cmd_verify(ctx, results);
  else if (command == "study-defects")
    ok = cmd_study_defects(ctx, results);
  else if (command == "study-sqrt")
    ok = cmd_study_sqrt(ctx, results);
  else if (command == "probe-tail")
    ok = cmd_probe_tail(ctx, results);
  else
    throw ConfigError("unknown command: \"" + command + "\"");

  // Manifest: every emitted file with its content hash, in name order.
  std::sort(ctx.emitted.begin(), ctx.emitted.end());
  json files = json::array();
  for (const std::string& name : ctx.emitted)
    files.push_back(json{{"name", name}, {"sha256", sha256_file(ctx.out_dir / name)}});

  json config_echo = ctx.config;
  config_echo["master_seed"] = ctx.master_seed;
  config_echo["trials"] = ctx.trials;
  json hashed{{"config", std::move(config_echo)},
              {"results", std::move(results)},
              {"files", std::move(files)},
              {"all_pass", ok}};
  const std::string hashed_bytes = hashed.dump();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json report{{"hashed", std::move(hashed)},
              {"hashed_sha256", sha256_hex(hashed_bytes)},
              {"timings", {{"total_seconds", seconds}}}};
  atomic_write(ctx.out_dir / "report.json", report.dump(2) + "\n");
  if (!ctx.quiet) {
    std::cout << (ok ? "PASS" : "FAIL") << " " << command << "  report "
              << (ctx.out_dir / "report.json").string() << "  hashed "
              << report["hashed_sha256"].get<std::string>() << "\n";
  }
  return ok ? 0 : kExitAcceptanceFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral shift function laboratory"};
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  bool quiet = false;
  app.add_option("--config", config_path, "run configuration JSON")->required();
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--seed", seed, "master seed (overrides config)");
  app.add_option("--trials", trials, "trial count (overrides config)");
  app.add_flag("--quiet", quiet, "suppress the summary line");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  RunContext ctx;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config " + config_path);
    try {
      in >> ctx.config;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!ctx.config.is_object() || !ctx.config.contains("command"))
      throw ConfigError("config must be a JSON object with a \"command\" field");
    ctx.master_seed = ctx.config.value("master_seed", std::uint64_t{1});
    ctx.trials = ctx.config.value("trials", 1);
    ctx.emit_svg = ctx.config.value("emit_svg", false);
    std::string out = ctx.config.value("out", std::string("out"));
    if (!out_dir.empty()) out = out_dir;
    if (seed) ctx.master_seed = *seed;
    if (trials) ctx.trials = *trials;
    ctx.quiet = quiet;
    if (ctx.trials < 1) throw ConfigError("trials must be >= 1");
    ctx.out_dir = out;
    std::filesystem::create_directories(ctx.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    return run(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const SchemaError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const Error& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
    return kExitPipelineError;
  } catch (const std::exception& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
    return kExitPipelineError;
  }
}
