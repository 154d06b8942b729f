#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "diffquad/error.hpp"
#include "diffquad/io.hpp"
#include "diffquad/kernels.hpp"
#include "diffquad/measures.hpp"
#include "diffquad/quadrature.hpp"
#include "diffquad/rules.hpp"
#include "diffquad/spaces.hpp"

namespace diffquad::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;

const std::vector<std::string> kTasks = {"build-weights", "verify",    "wce-sweep",     "kernel-profile",
                                         "mesh-stats",    "covering",  "product-defect"};

const std::vector<std::string> kFlags = {
    "space", "max-index", "max-degree", "eigendata", "nodes", "measure", "rule", "count", "seed", "orders",
    "gamma", "p", "beta", "constraint", "method", "weights", "trials", "probe", "out", "report", "N", "A",
    "radii", "mask", "degree-factor", "floor", "ladder"};

// Malformed configuration or flags: exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A setting and where it came from (line 0: command-line flag).
struct Value {
  std::string text;
  int line = 0;
};

class Settings {
 public:
  void set(const std::string& key, Value v) { values_[key] = std::move(v); }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string origin(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end() || it->second.line == 0) return "flag --" + key;
    return "config line " + std::to_string(it->second.line) + " ('" + key + "')";
  }

  const std::string& text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required parameter --" + key + " for task " + task);
    return it->second.text;
  }

  std::string string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

  double number(const std::string& key) const { return parse_number(key, text(key)); }
  double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::size_t size(const std::string& key) const {
    const double v = number(key);
    if (v < 0.0 || v != std::floor(v)) throw ConfigError(origin(key) + ": expected a nonnegative integer");
    return static_cast<std::size_t>(v);
  }
  std::size_t size_or(const std::string& key, std::size_t fallback) const { return has(key) ? size(key) : fallback; }

  std::uint64_t seed() const {
    const auto& t = text("seed");
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError(origin("seed") + ": expected an unsigned integer");
    return v;
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.push_back(parse_number(key, item));
    }
    if (out.empty()) throw ConfigError(origin(key) + ": expected a comma-separated list of numbers");
    return out;
  }

  std::string task;

 private:
  double parse_number(const std::string& key, const std::string& t) const {
    if (t == "inf" || t == "infinity") return kInfinity;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || std::isnan(v)) {
      throw ConfigError(origin(key) + ": '" + t + "' is not a number");
    }
    return v;
  }

  std::map<std::string, Value> values_;
};

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 1 : line_of_offset(text, pos);
}

// Flattens a config value to the same text a flag would carry.
std::string config_text(const Json& v, const std::string& key, int line) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() && !v[i].is_string()) {
        throw ConfigError("config line " + std::to_string(line) + ": '" + key + "' must be a list of numbers");
      }
      if (i) out += ',';
      out += config_text(v[i], key, line);
    }
    return out;
  }
  throw ConfigError("config line " + std::to_string(line) + ": unsupported value for '" + key + "'");
}

void load_config(const std::string& path, Settings& settings, std::string& task) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config line " + std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) +
                      ": malformed JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) throw ConfigError("config line 1: expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    const int line = line_of_key(text, key);
    if (key == "task") {
      if (!value.is_string()) throw ConfigError("config line " + std::to_string(line) + ": 'task' must be a string");
      task = value.get<std::string>();
      continue;
    }
    if (std::find(kFlags.begin(), kFlags.end(), key) == kFlags.end()) {
      throw ConfigError("config line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
    settings.set(key, {config_text(value, key, line), line});
  }
}

SpacePtr build_space(const Settings& s) {
  const auto kind = s.text("space");
  if (kind == "circle") return circle_space(s.size_or("max-index", 256));
  if (kind == "torus") return torus2_space(s.size_or("max-index", 16));
  if (kind == "sphere") return sphere2_space(s.size_or("max-degree", 16));
  if (kind == "cloud") return pointcloud_space(io::read_eigendata(s.text("eigendata")));
  throw ConfigError(s.origin("space") + ": unknown space '" + kind + "' (circle, torus, sphere, cloud)");
}

std::string default_rule(const Space& space) {
  if (space.kind() == "sphere") return "product";
  if (space.kind() == "cloud") return "reference";
  return "trapezoid";
}

WeightConstraint constraint_of(const Settings& s, WeightConstraint fallback) {
  if (!s.has("constraint")) return fallback;
  try {
    return parse_constraint(s.text("constraint"));
  } catch (const Error&) {
    throw ConfigError(s.origin("constraint") + ": expected free, nonnegative, simplex or equal");
  }
}

void emit(const Settings& s, const std::string& key, const std::string& content, std::ostream& out) {
  if (s.has(key)) {
    io::write_text(s.text(key), content);
  } else {
    out << content;
  }
}

// Sidecar report path: --report, else <out> with extension .report.json.
std::optional<fs::path> sidecar(const Settings& s) {
  if (s.has("report")) return fs::path(s.text("report"));
  if (!s.has("out")) return std::nullopt;
  fs::path p(s.text("out"));
  p.replace_extension(".report.json");
  return p;
}

void emit_json(const std::optional<fs::path>& path, const Json& doc, std::ostream& out) {
  const std::string text = io::stable_dump(doc) + "\n";
  if (path) {
    io::write_text(*path, text);
  } else {
    out << text;
  }
}

double p_of(const Settings& s, double fallback) {
  const double p = s.number_or("p", fallback);
  if (!(p >= 1.0)) throw ConfigError(s.origin("p") + ": p must lie in [1, inf]");
  return p;
}

double positive(const Settings& s, const std::string& key) {
  const double v = s.number(key);
  if (!(v > 0.0)) throw ConfigError(s.origin(key) + ": must be positive");
  return v;
}

QuadratureProblem problem_for(const Settings& s, const SpacePtr& space, std::vector<Point> nodes, double order) {
  QuadratureProblem problem;
  problem.space = space;
  problem.nodes = std::move(nodes);
  problem.order = order;
  problem.beta = s.number_or("beta", 0.0);
  // The optimizer works on the stored spectrum; the tail goes into the report.
  problem.kernel_tail_tolerance = std::numeric_limits<double>::infinity();
  return problem;
}

// Weights for one order of a sequence: the rule's own, an exact solve or a
// discrepancy minimization at the rule's nodes.
PointMeasure sequence_measure(const Settings& s, const SpacePtr& space, double n, std::size_t index) {
  const std::string rule = s.string_or("rule", default_rule(*space));
  const std::uint64_t seed = s.has("seed") || rule == "random" ? split_seed(s.seed(), 1000 + index) : 0;
  PointMeasure nu = rule_measure(*space, rule, n, s.size_or("count", 0), seed);
  const std::string weights = s.string_or("weights", "rule");
  if (weights == "rule") return nu;
  auto problem = problem_for(s, space, nu.support, n);
  if (weights == "exact") {
    problem.constraint = constraint_of(s, WeightConstraint::free);
    return exact_weights(problem).measure;
  }
  if (weights == "minimize") {
    problem.constraint = constraint_of(s, WeightConstraint::simplex);
    return minimize_discrepancy(problem).measure;
  }
  throw ConfigError(s.origin("weights") + ": expected rule, exact or minimize");
}

std::vector<OrderedMeasure> build_sequence(const Settings& s, const SpacePtr& space) {
  std::vector<OrderedMeasure> seq;
  if (s.has("measure")) {
    seq.push_back({positive(s, "N"), io::read_measure(*space, s.text("measure"))});
    return seq;
  }
  const auto orders = s.list("orders");
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (!(orders[i] > 0.0)) throw ConfigError(s.origin("orders") + ": orders must be positive");
    seq.push_back({orders[i], sequence_measure(s, space, orders[i], i)});
  }
  return seq;
}

ClassOptions class_options(const Settings& s) {
  ClassOptions o;
  o.trials = s.size_or("trials", 200);
  o.seed = s.seed();
  o.degree_factor = s.number_or("degree-factor", 1.0);
  o.probe_count = s.size_or("probe", 0);
  return o;
}

std::vector<Point> single_nodes(const Settings& s, const SpacePtr& space, double n) {
  if (s.has("nodes")) return io::nodes_from_json(*space, io::parse_file(s.text("nodes")));
  if (!s.has("rule")) throw ConfigError("task " + s.task + " needs --nodes or --rule");
  const std::string rule = s.text("rule");
  const std::uint64_t seed = s.has("seed") || rule == "random" ? s.seed() : 0;
  return rule_measure(*space, rule, n, s.size_or("count", 0), seed).support;
}

double natural_order(const Space& space) {
  const double bound = space.spectral_bound();
  if (std::isfinite(bound)) return bound;
  return space.eigenvalues().back() + 1.0;
}

int task_build_weights(const Settings& s, std::ostream& out) {
  const auto space = build_space(s);
  const double n = s.has("N") ? positive(s, "N") : natural_order(*space);
  auto problem = problem_for(s, space, single_nodes(s, space, n), n);
  problem.constraint = constraint_of(s, WeightConstraint::free);
  const bool can_minimize =
      problem.constraint == WeightConstraint::simplex || problem.constraint == WeightConstraint::nonnegative;
  const std::string method = s.string_or("method", can_minimize ? "minimize" : "exact");

  PointMeasure nu;
  Json optimizer;
  bool ok = true;
  std::string regime;
  const auto exact = exact_weights(problem);
  if (method == "exact") {
    nu = exact.measure;
    ok = exact.certified;
    regime = exact.certified ? "quadrature" : "least-squares";
    optimizer = {{"method", "exact"}, {"residual", exact.residual}, {"certified", exact.certified},
                 {"infeasible", exact.infeasible}};
  } else if (method == "minimize") {
    if (!can_minimize) throw ConfigError("--method minimize needs --constraint simplex or nonnegative");
    const auto res = minimize_discrepancy(problem);
    nu = res.measure;
    ok = res.converged;
    // Whether K contains an exact measure decides which bound applies.
    regime = exact.certified ? "exact-measure-in-constraint-set" : "discrepancy-transfer";
    optimizer = {{"method", res.method},       {"objective", res.objective}, {"discrepancy", res.discrepancy},
                 {"gap", res.gap},             {"iterations", res.iterations}, {"converged", res.converged},
                 {"condition", res.condition}};
  } else {
    throw ConfigError(s.origin("method") + ": expected exact or minimize");
  }

  ClassOptions opts;
  opts.trials = s.has("seed") ? s.size_or("trials", 200) : 0;
  opts.seed = s.has("seed") ? s.seed() : 0;
  opts.degree_factor = s.number_or("degree-factor", 1.0);
  opts.probe_count = s.size_or("probe", 0);
  const double p = p_of(s, 2.0);
  const double gamma = s.number_or("gamma", std::isinf(p) ? 1.0 : space->q() / p + 1.0);
  const std::vector<OrderedMeasure> seq{{n, nu}};
  auto report = verify_approx_class(*space, seq, gamma, p, opts);
  const double beta = problem.beta > 0.0 ? problem.beta : default_beta(space->q(), 2.0);
  const auto d = discrepancy_detail(*space, nu, beta, 2.0);
  report.discrepancy = d.value;
  report.discrepancy_tail = d.tail;
  report.regime = regime;

  emit(s, "out", io::stable_dump(io::measure_to_json(*space, nu)) + "\n", out);
  auto doc = io::report_to_json(report);
  doc["optimizer"] = optimizer;
  doc["beta"] = beta;
  emit_json(sidecar(s), doc, out);
  return ok ? kOk : kVerdictFailed;
}

int task_verify(const Settings& s, std::ostream& out) {
  const auto space = build_space(s);
  const double gamma = positive(s, "gamma");
  const double p = p_of(s, s.number("p"));
  const auto opts = class_options(s);
  const auto seq = build_sequence(s, space);
  auto report = verify_approx_class(*space, seq, gamma, p, opts);
  if (s.has("beta") || p == 2.0) {
    const auto d = discrepancy_detail(*space, seq.back().measure, s.number_or("beta", default_beta(space->q(), p)), p);
    report.discrepancy = d.value;
    report.discrepancy_tail = d.tail;
  }
  emit_json(s.has("out") ? std::optional<fs::path>(s.text("out")) : std::nullopt, io::report_to_json(report), out);
  return report.verdict.pass ? kOk : kVerdictFailed;
}

int task_wce_sweep(const Settings& s, std::ostream& out) {
  const auto space = build_space(s);
  const double gamma = positive(s, "gamma");
  const double p = p_of(s, s.number("p"));
  const auto opts = class_options(s);
  const auto seq = build_sequence(s, space);
  const auto sweep = wce_sweep(*space, seq, gamma, p, s.number_or("beta", 0.0), opts);
  emit(s, "out", io::sweep_csv(sweep.rows), out);
  auto doc = io::report_to_json(sweep.report);
  doc["slope"] = sweep.slope;
  emit_json(sidecar(s), doc, out);
  return sweep.report.verdict.pass ? kOk : kVerdictFailed;
}

Mask mask_of(const Settings& s) {
  const auto name = s.string_or("mask", "cutoff");
  if (name == "cutoff") return Mask::cutoff();
  if (name == "band_g") return Mask::band_g();
  if (name == "band_gtilde") return Mask::band_gtilde();
  throw ConfigError(s.origin("mask") + ": expected cutoff, band_g or band_gtilde");
}

int task_kernel_profile(const Settings& s, std::ostream& out) {
  const auto space = build_space(s);
  const double N = positive(s, "N");
  std::vector<double> radii;
  if (s.has("radii")) {
    radii = s.list("radii");
  } else {
    radii.push_back(0.0);
    for (double r = 1.0 / N; r <= space->diameter(); r *= 2.0) radii.push_back(r);
  }
  const Point center = space->reference_rule().support.front();
  ProfileOptions opts;
  if (s.has("probe")) opts.shell_points = s.size("probe");
  const auto profile = localization_profile(space, mask_of(s), N, center, radii, opts);
  emit(s, "out", io::profile_csv(profile), out);
  return kOk;
}

int task_mesh_stats(const Settings& s, std::ostream& out) {
  const auto space = build_space(s);
  const double n = s.has("N") ? positive(s, "N") : natural_order(*space);
  const auto nodes = single_nodes(s, space, n);
  const auto mesh = mesh_norm(*space, nodes, s.size_or("probe", 0));
  Json doc = {{"count", nodes.size()},
              {"mesh_norm", mesh.value},
              {"probe_spacing", mesh.probe_spacing},
              {"probe_count", mesh.probe_count},
              {"mesh_norm_upper", mesh.value + mesh.probe_spacing}};
  doc["min_separation"] = nodes.size() >= 2 ? Json(min_separation(*space, nodes)) : Json(nullptr);
  emit_json(s.has("out") ? std::optional<fs::path>(s.text("out")) : std::nullopt, doc, out);
  return kOk;
}

int task_covering(const Settings& s, std::ostream& out) {
  const auto space = build_space(s);
  const double gamma = positive(s, "gamma");
  const double p = p_of(s, s.number("p"));
  const auto seq = build_sequence(s, space);
  CoveringOptions opts;
  opts.floor = s.number_or("floor", opts.floor);
  if (s.has("ladder")) opts.ladder = s.list("ladder");
  opts.probe_count = s.size_or("probe", 0);
  std::vector<CoveringReport> reports;
  for (const auto& [n, nu] : seq) reports.push_back(covering_check(*space, nu, n, gamma, p, opts));
  const auto c1 = covering_constant(reports);
  QuadReport shell;
  shell.gamma = gamma;
  shell.p = p;
  shell.covering = reports;
  Json doc = io::report_to_json(shell)["covering"];
  Json result = {{"gamma", gamma}, {"p", p}, {"p_tilde", covering_exponent(space->q(), gamma, p)},
                 {"orders", doc}, {"c1", c1 ? Json(*c1) : Json(nullptr)}, {"pass", c1.has_value()}};
  emit_json(s.has("out") ? std::optional<fs::path>(s.text("out")) : std::nullopt, result, out);
  return c1 ? kOk : kVerdictFailed;
}

int task_product_defect(const Settings& s, std::ostream& out) {
  const auto space = build_space(s);
  const double A = s.number("A");
  const double N = positive(s, "N");
  if (!(A >= 1.0)) throw ConfigError(s.origin("A") + ": A must be at least 1");
  const double defect = product_defect(*space, A, N);
  const Json doc = {{"A", A}, {"N", N}, {"defect", defect}};
  emit_json(s.has("out") ? std::optional<fs::path>(s.text("out")) : std::nullopt, doc, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quadrature weights and diagnostics on spectral spaces", "diffquad"};
  std::string task;
  std::string config;
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_options;
  app.add_option("task", task, "build-weights | verify | wce-sweep | kernel-profile | mesh-stats | covering | product-defect");
  app.add_option("--config", config, "JSON config whose keys mirror the flags");
  for (const auto& name : kFlags) flag_options[name] = app.add_option("--" + name, flag_values[name]);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "diffquad: " << e.what() << "\n";
    return kBadConfig;
  }

  Settings settings;
  try {
    std::string config_task;
    if (!config.empty()) load_config(config, settings, config_task);
    if (task.empty()) task = config_task;
    for (const auto& name : kFlags) {
      if (flag_options[name]->count() > 0) settings.set(name, {flag_values[name], 0});
    }
    if (task.empty()) throw ConfigError("no task given");
    if (std::find(kTasks.begin(), kTasks.end(), task) == kTasks.end()) throw ConfigError("unknown task '" + task + "'");
    settings.task = task;

    if (task == "build-weights") return task_build_weights(settings, out);
    if (task == "verify") return task_verify(settings, out);
    if (task == "wce-sweep") return task_wce_sweep(settings, out);
    if (task == "kernel-profile") return task_kernel_profile(settings, out);
    if (task == "mesh-stats") return task_mesh_stats(settings, out);
    if (task == "covering") return task_covering(settings, out);
    return task_product_defect(settings, out);
  } catch (const ConfigError& e) {
    err << "diffquad: " << e.what() << "\n";
    return kBadConfig;
  } catch (const Error& e) {
    err << "diffquad: " << e.what() << "\n";
    return e.code() == ErrorCode::invalid_argument ? kBadConfig : kNumericFailure;
  } catch (const std::exception& e) {
    err << "diffquad: " << e.what() << "\n";
    return kNumericFailure;
  }
}

}  // namespace diffquad::cli
