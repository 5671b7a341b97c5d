#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "nsmoo/nsmoo.hpp"

namespace nsmoo::cli {
namespace {

namespace fs = std::filesystem;
using io::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- config reading ------------------------------------------------------

std::string g_config_name = "config";

std::string where(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  if (m.is_null()) return g_config_name;
  return fmt::format("{}:{}:{}", g_config_name, m.line + 1, m.column + 1);
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
  throw ConfigError(where(node) + ": " + what);
}

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& section) {
  if (!node.IsMap()) fail(node, "'" + section + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in '" + section + "'");
  }
}

double to_double(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(node, what + " must be a number");
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(node, what + " must be a number");
  }
}

long long to_integer(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(node, what + " must be an integer");
  try {
    return node.as<long long>();
  } catch (const YAML::Exception&) {
    fail(node, what + " must be an integer");
  }
}

std::size_t to_count(const YAML::Node& node, const std::string& what) {
  const long long v = to_integer(node, what);
  if (v < 0) fail(node, what + " must be nonnegative");
  return static_cast<std::size_t>(v);
}

std::string to_string(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(node, what + " must be a string");
  return node.as<std::string>();
}

Vector to_vector(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence() || node.size() == 0) fail(node, what + " must be a nonempty list of numbers");
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) v[static_cast<Eigen::Index>(i)] = to_double(node[i], what);
  return v;
}

// scalar -> 1x1, list -> column, list of lists -> matrix (row major)
Matrix to_param(const YAML::Node& node, const std::string& what) {
  if (node.IsScalar()) return Matrix::Constant(1, 1, to_double(node, what));
  if (!node.IsSequence() || node.size() == 0) fail(node, what + " must be a number, list or matrix");
  if (!node[0].IsSequence()) return to_vector(node, what);
  const std::size_t cols = node[0].size();
  Matrix m(static_cast<Eigen::Index>(node.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < node.size(); ++r) {
    const Vector row = to_vector(node[r], what);
    if (static_cast<std::size_t>(row.size()) != cols) fail(node[r], what + " rows differ in length");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

struct SolveSection {
  Vector x0;
  YAML::Node node;
};

struct CoverSection {
  Box domain;
  int depth = 0;
  CoverOptions options;
  YAML::Node node;
};

struct ScalarizeSection {
  std::vector<ScalarizationSpec> specs;
  std::vector<YAML::Node> spec_nodes;
  Vector x0;
  StartStrategy start = StartStrategy::fixed;
  YAML::Node node;
};

struct PathSection {
  PathConfig config;
  YAML::Node node;
};

struct InferSection {
  fs::path data;
  std::string basis = "poly2";
  std::optional<std::size_t> k;
  YAML::Node node;
};

struct RunConfig {
  std::string problem = "paraboloid";
  ParamMap params;
  YAML::Node problem_node;
  DescentConfig solver;
  std::uint64_t seed = 0;
  std::optional<SolveSection> solve;
  std::optional<CoverSection> cover;
  std::optional<ScalarizeSection> scalarize;
  std::optional<PathSection> path;
  std::optional<InferSection> infer;
};

DescentConfig read_solver(const YAML::Node& node) {
  check_keys(node, {"c", "eps0", "theta_eps", "kappa", "beta", "max_outer", "max_enrich", "tol_crit", "tol_eps"},
             "solver");
  DescentConfig cfg;
  if (node["c"]) cfg.c = to_double(node["c"], "solver.c");
  if (node["eps0"]) cfg.eps0 = to_double(node["eps0"], "solver.eps0");
  if (node["theta_eps"]) cfg.theta_eps = to_double(node["theta_eps"], "solver.theta_eps");
  if (node["kappa"]) cfg.kappa = to_double(node["kappa"], "solver.kappa");
  if (node["beta"]) cfg.beta = to_double(node["beta"], "solver.beta");
  if (node["max_outer"]) cfg.max_outer = to_count(node["max_outer"], "solver.max_outer");
  if (node["max_enrich"]) cfg.max_enrich = to_count(node["max_enrich"], "solver.max_enrich");
  if (node["tol_crit"]) cfg.tol_crit = to_double(node["tol_crit"], "solver.tol_crit");
  if (node["tol_eps"]) cfg.tol_eps = to_double(node["tol_eps"], "solver.tol_eps");
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail(node, e.what());
  }
  return cfg;
}

Box read_box(const YAML::Node& node, const std::string& what) {
  check_keys(node, {"lower", "upper"}, what);
  if (!node["lower"] || !node["upper"]) fail(node, what + " needs 'lower' and 'upper'");
  Box b{to_vector(node["lower"], what + ".lower"), to_vector(node["upper"], what + ".upper"), 0};
  if (b.lower.size() != b.upper.size()) fail(node, what + ": lower and upper differ in length");
  if (!(b.lower.array() < b.upper.array()).all()) fail(node, what + ": lower must be below upper");
  return b;
}

RunConfig read_config(const fs::path& file) {
  g_config_name = file.string();
  YAML::Node root;
  try {
    root = YAML::LoadFile(file.string());
  } catch (const YAML::BadFile&) {
    throw ConfigError(g_config_name + ": cannot open config file");
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("{}:{}:{}: {}", g_config_name, e.mark.line + 1, e.mark.column + 1, e.msg));
  }
  if (!root.IsMap()) throw ConfigError(g_config_name + ": top level must be a mapping");
  check_keys(root, {"problem", "solver", "seed", "solve", "cover", "scalarize", "path", "infer"}, "config");
  const fs::path base = file.has_parent_path() ? file.parent_path() : fs::path(".");

  RunConfig cfg;
  if (root["problem"]) {
    const YAML::Node p = root["problem"];
    check_keys(p, {"name", "params"}, "problem");
    cfg.problem_node = p;
    if (p["name"]) cfg.problem = to_string(p["name"], "problem.name");
    if (p["params"]) {
      if (!p["params"].IsMap()) fail(p["params"], "problem.params must be a mapping");
      for (const auto& kv : p["params"]) {
        const auto key = kv.first.as<std::string>();
        cfg.params[key] = to_param(kv.second, "problem.params." + key);
      }
    }
  }
  if (root["solver"]) cfg.solver = read_solver(root["solver"]);
  if (root["seed"]) {
    const long long s = to_integer(root["seed"], "seed");
    if (s < 0) fail(root["seed"], "seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }

  if (root["solve"]) {
    const YAML::Node s = root["solve"];
    check_keys(s, {"x0"}, "solve");
    SolveSection sec;
    sec.node = s;
    if (!s["x0"]) fail(s, "solve.x0 is required");
    sec.x0 = to_vector(s["x0"], "solve.x0");
    cfg.solve = sec;
  }
  if (root["cover"]) {
    const YAML::Node c = root["cover"];
    check_keys(c, {"domain", "depth", "samples_per_box", "steps"}, "cover");
    CoverSection sec;
    sec.node = c;
    if (!c["domain"]) fail(c, "cover.domain is required");
    sec.domain = read_box(c["domain"], "cover.domain");
    if (!c["depth"]) fail(c, "cover.depth is required");
    const long long depth = to_integer(c["depth"], "cover.depth");
    if (depth < 1 || depth > 60) fail(c["depth"], "cover.depth must lie in [1, 60]");
    sec.depth = static_cast<int>(depth);
    if (c["samples_per_box"]) sec.options.samples_per_box = to_count(c["samples_per_box"], "cover.samples_per_box");
    if (sec.options.samples_per_box == 0) fail(c, "cover.samples_per_box must be positive");
    if (c["steps"]) sec.options.steps = to_count(c["steps"], "cover.steps");
    if (sec.options.steps == 0) fail(c, "cover.steps must be positive");
    cfg.cover = sec;
  }
  if (root["scalarize"]) {
    const YAML::Node s = root["scalarize"];
    check_keys(s, {"x0", "start", "weights", "ps"}, "scalarize");
    ScalarizeSection sec;
    sec.node = s;
    if (!s["x0"]) fail(s, "scalarize.x0 is required");
    sec.x0 = to_vector(s["x0"], "scalarize.x0");
    if (s["start"]) {
      const std::string st = to_string(s["start"], "scalarize.start");
      if (st == "fixed")
        sec.start = StartStrategy::fixed;
      else if (st == "warm_start")
        sec.start = StartStrategy::warm_start;
      else
        fail(s["start"], "scalarize.start must be 'fixed' or 'warm_start'");
    }
    if (s["weights"]) {
      if (!s["weights"].IsSequence()) fail(s["weights"], "scalarize.weights must be a list");
      for (const auto& w : s["weights"]) {
        try {
          sec.specs.emplace_back(SimplexWeights::normalized(to_vector(w, "scalarize.weights entry")));
        } catch (const Error& e) {
          fail(w, e.what());
        }
        sec.spec_nodes.push_back(w);
      }
    }
    if (s["ps"]) {
      if (!s["ps"].IsSequence()) fail(s["ps"], "scalarize.ps must be a list");
      for (const auto& p : s["ps"]) {
        check_keys(p, {"z", "r"}, "scalarize.ps entry");
        if (!p["z"] || !p["r"]) fail(p, "scalarize.ps entries need 'z' and 'r'");
        PsSpec ps{to_vector(p["z"], "ps.z"), to_vector(p["r"], "ps.r")};
        if (ps.z.size() != ps.r.size()) fail(p, "ps.z and ps.r differ in length");
        if (!(ps.r.array() > 0.0).all()) fail(p["r"], "ps.r must be strictly positive");
        sec.specs.emplace_back(std::move(ps));
        sec.spec_nodes.push_back(p);
      }
    }
    if (sec.specs.empty()) fail(s, "scalarize needs at least one entry in 'weights' or 'ps'");
    cfg.scalarize = sec;
  }
  if (root["path"]) {
    const YAML::Node p = root["path"];
    check_keys(p, {"lambda_stop", "lambda_grid", "dlambda_init", "dlambda_max", "max_segments"}, "path");
    PathSection sec;
    sec.node = p;
    if (p["lambda_stop"]) sec.config.lambda_stop = to_double(p["lambda_stop"], "path.lambda_stop");
    if (!(sec.config.lambda_stop >= 0.0)) fail(p, "path.lambda_stop must be nonnegative");
    if (p["lambda_grid"]) {
      const Vector g = to_vector(p["lambda_grid"], "path.lambda_grid");
      sec.config.sample_lambdas.assign(g.data(), g.data() + g.size());
    }
    if (p["dlambda_init"]) sec.config.dlambda_init = to_double(p["dlambda_init"], "path.dlambda_init");
    if (p["dlambda_max"]) sec.config.dlambda_max = to_double(p["dlambda_max"], "path.dlambda_max");
    if (p["max_segments"]) sec.config.max_segments = to_count(p["max_segments"], "path.max_segments");
    cfg.path = sec;
  }
  if (root["infer"]) {
    const YAML::Node p = root["infer"];
    check_keys(p, {"data", "basis", "k"}, "infer");
    InferSection sec;
    sec.node = p;
    if (!p["data"]) fail(p, "infer.data is required");
    sec.data = fs::path(to_string(p["data"], "infer.data"));
    if (sec.data.is_relative()) sec.data = base / sec.data;
    if (p["basis"]) sec.basis = to_string(p["basis"], "infer.basis");
    if (sec.basis != "poly2" && sec.basis != "poly3") fail(p["basis"], "infer.basis must be 'poly2' or 'poly3'");
    if (p["k"]) sec.k = to_count(p["k"], "infer.k");
    cfg.infer = sec;
  }
  return cfg;
}

CatalogProblem make_problem(const RunConfig& cfg) {
  try {
    return find_problem(cfg.problem).make(cfg.params);
  } catch (const Error& e) {
    if (cfg.problem_node) fail(cfg.problem_node, e.what());
    throw ConfigError(g_config_name + ": " + e.what());
  }
}

// ---- output --------------------------------------------------------------

void write_file(const fs::path& file, const std::string& content) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << content;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- commands ------------------------------------------------------------

int cmd_solve(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out) {
  if (!cfg.solve) throw ConfigError(g_config_name + ": 'solve' section is required");
  const CatalogProblem prob = make_problem(cfg);
  if (static_cast<std::size_t>(cfg.solve->x0.size()) != prob.problem.n)
    fail(cfg.solve->node["x0"], fmt::format("solve.x0 must have {} entries", prob.problem.n));

  const DescentTrace trace = solve(prob.problem, cfg.solve->x0, cfg.solver);
  std::ostringstream csv;
  io::write_trace_csv(csv, trace);
  write_file(out_dir / "trace.csv", csv.str());
  const json summary = io::summary_json(trace);
  write_file(out_dir / "summary.json", dump(summary));
  out << summary.dump(2) << "\n";

  switch (trace.termination) {
    case Termination::critical: return kSuccess;
    case Termination::max_iterations: return kBudgetExhausted;
    default: return kAlgorithmFailure;
  }
}

int cmd_cover(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  if (!cfg.cover) throw ConfigError(g_config_name + ": 'cover' section is required");
  const CatalogProblem prob = make_problem(cfg);
  if (static_cast<std::size_t>(cfg.cover->domain.lower.size()) != prob.problem.n)
    fail(cfg.cover->node["domain"], fmt::format("cover.domain must have dimension {}", prob.problem.n));
  BoxCovering cov;
  try {
    cov = cover(prob.problem, cfg.cover->domain, cfg.cover->depth, cfg.solver, cfg.seed, cfg.cover->options);
  } catch (const ParetoSetLost& e) {
    err << "error: " << e.what() << "\n";
    return kAlgorithmFailure;
  }
  write_file(out_dir / "covering.json", dump(io::to_json(cov)));
  out << fmt::format("depth {}: {} boxes, covered volume {} of {}\n", cov.depth, cov.boxes.size(),
                     io::num(cov.volume()), io::num(cov.domain.volume()));
  return kSuccess;
}

int cmd_scalarize(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out) {
  if (!cfg.scalarize) throw ConfigError(g_config_name + ": 'scalarize' section is required");
  const CatalogProblem prob = make_problem(cfg);
  const auto& sec = *cfg.scalarize;
  if (static_cast<std::size_t>(sec.x0.size()) != prob.problem.n)
    fail(sec.node["x0"], fmt::format("scalarize.x0 must have {} entries", prob.problem.n));
  for (std::size_t i = 0; i < sec.specs.size(); ++i) {
    const std::size_t len = std::holds_alternative<SimplexWeights>(sec.specs[i])
                                ? std::get<SimplexWeights>(sec.specs[i]).size()
                                : static_cast<std::size_t>(std::get<PsSpec>(sec.specs[i]).z.size());
    if (len != prob.problem.k()) fail(sec.spec_nodes[i], fmt::format("entry must have {} components", prob.problem.k()));
  }
  SweepOptions opt;
  opt.start = sec.start;
  const FrontSweep sweep = front_sweep(prob.problem, sec.specs, sec.x0, cfg.solver, opt);
  std::ostringstream csv;
  io::write_sweep_csv(csv, sweep, prob.problem.n, prob.problem.k());
  write_file(out_dir / "sweep.csv", csv.str());

  std::size_t failures = 0;
  for (const auto& e : sweep.entries) failures += e.solved ? 0 : 1;
  out << fmt::format("entries {}, accepted {}, failed {}, nondominated {}\n", sweep.entries.size(),
                     sweep.accepted_count(), failures, sweep.nondominated ? "true" : "false");
  return failures == sweep.entries.size() ? kAlgorithmFailure : kSuccess;
}

int cmd_path(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out) {
  if (cfg.problem != "l1_quadratic")
    throw ConfigError(g_config_name + ": 'path' requires problem.name = l1_quadratic");
  make_problem(cfg);  // validates the parameters
  const Vector b = detail::param_vector(cfg.params, "b", detail::vec2(3.0, 1.0));
  auto it = cfg.params.find("A");
  const Matrix A = it == cfg.params.end() ? Matrix(Matrix::Identity(b.size(), b.size())) : it->second;
  const L1Quadratic lq = make_l1_quadratic(A, b);
  const PathConfig pc = cfg.path ? cfg.path->config : PathConfig{};
  const RegPath path = trace_path(lq.loss, pc);

  std::ostringstream csv;
  io::write_path_csv(csv, path, lq.loss);
  write_file(out_dir / "path.csv", csv.str());
  write_file(out_dir / "path_segments.json", dump(io::to_json(path)));
  out << fmt::format("lambda_max {}, {} segments\n", io::num(path.lambda_max), path.segments.size());
  for (const auto& e : path.events())
    out << fmt::format("  {} of x_{} at lambda = {}\n", to_string(e.kind), e.index + 1, io::num(e.lambda));
  if (!path.complete) {
    out << "path incomplete: " << path.diagnostic << "\n";
    return kAlgorithmFailure;
  }
  return kSuccess;
}

int cmd_infer(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out) {
  if (!cfg.infer) throw ConfigError(g_config_name + ": 'infer' section is required");
  std::ifstream is(cfg.infer->data);
  if (!is) fail(cfg.infer->node["data"], "cannot open data file " + cfg.infer->data.string());
  io::ParetoData pd;
  try {
    pd = io::read_pareto_data_csv(is);
  } catch (const Error& e) {
    fail(cfg.infer->node["data"], e.what());
  }
  if (cfg.infer->k && *cfg.infer->k != pd.k)
    fail(cfg.infer->node["k"], fmt::format("infer.k = {} but the data has {} alpha columns", *cfg.infer->k, pd.k));
  const BasisSet basis = basis_by_name(cfg.infer->basis, pd.n);
  const InverseResult r = infer(pd.data, basis, pd.k);
  write_file(out_dir / "inverse.json", dump(io::to_json(r, basis)));

  out << "s = " << io::num(r.smallest_singular) << "\n";
  out << "null space dimension = " << r.null_dimension << (r.underdetermined ? " (underdetermined)" : "") << "\n";
  out << "datum  residual\n";
  for (std::size_t m = 0; m < r.residuals.size(); ++m) out << fmt::format("{:5}  {}\n", m + 1, io::num(r.residuals[m]));
  return kSuccess;
}

int cmd_problems_list(std::ostream& out) {
  for (const auto& e : problem_catalog()) {
    out << e.name << "\n    " << e.description << "\n";
    for (const auto& [name, def] : e.parameters) out << "    param " << name << " (default " << def << ")\n";
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-smooth multiobjective optimization toolkit", "nsmoo"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (YAML)")->required();
    sub->add_option("--seed", seed, "Overrides the seed in the config");
    sub->add_option("--out", out_dir, "Output directory");
  };
  CLI::App* solve_cmd = app.add_subcommand("solve", "Descent to a Pareto critical point");
  CLI::App* cover_cmd = app.add_subcommand("cover", "Box covering of the Pareto set");
  CLI::App* scal_cmd = app.add_subcommand("scalarize", "Weighted-sum / Pascoletti-Serafini sweep");
  CLI::App* path_cmd = app.add_subcommand("path", "l1 regularization path");
  CLI::App* infer_cmd = app.add_subcommand("infer", "Infer objectives from Pareto critical data");
  for (CLI::App* sub : {solve_cmd, cover_cmd, scal_cmd, path_cmd, infer_cmd}) add_common(sub);
  CLI::App* problems_cmd = app.add_subcommand("problems", "Built-in test problems");
  problems_cmd->require_subcommand(1);
  CLI::App* list_cmd = problems_cmd->add_subcommand("list", "List built-in problems");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  if (list_cmd->parsed()) return cmd_problems_list(out);

  try {
    RunConfig cfg = read_config(config_path);
    if (seed) cfg.seed = *seed;
    fs::create_directories(out_dir);
    if (solve_cmd->parsed()) return cmd_solve(cfg, out_dir, out);
    if (cover_cmd->parsed()) return cmd_cover(cfg, out_dir, out, err);
    if (scal_cmd->parsed()) return cmd_scalarize(cfg, out_dir, out);
    if (path_cmd->parsed()) return cmd_path(cfg, out_dir, out);
    if (infer_cmd->parsed()) return cmd_infer(cfg, out_dir, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kAlgorithmFailure;
  }
  return kConfigError;
}

}  // namespace nsmoo::cli
