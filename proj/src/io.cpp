#include "diffquad/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "diffquad/error.hpp"

namespace diffquad::io {
namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {  // std::map keeps keys sorted
        if (!first) out += ',';
        first = false;
        out += Json(key).dump();
        out += ':';
        dump(item, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        dump(v[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      out += format_number(v.get<double>());
      break;
    default:
      out += v.dump();
  }
}

std::vector<double> number_array(const Json& a, const char* what) {
  if (!a.is_array()) fail(ErrorCode::invalid_argument, std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& x : a) {
    if (!x.is_number()) fail(ErrorCode::invalid_argument, std::string(what) + " must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_optional(const Json& doc, const char* key) {
  if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
  return number(doc[key]);
}

}  // namespace

std::string stable_dump(const Json& value) {
  std::string out;
  dump(value, out);
  return out;
}

double number(const Json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    if (s == "nan") return std::nan("");
  }
  fail(ErrorCode::invalid_argument, "expected a number");
}

Json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_failure, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::invalid_argument, path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io_failure, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) fail(ErrorCode::io_failure, "write failed for " + path.string());
}

EigenData eigendata_from_json(const Json& doc) {
  require(doc.is_object(), "eigendata: expected a JSON object");
  for (const char* key : {"q", "points", "eigenvalues", "eigenvectors"}) {
    if (!doc.contains(key)) fail(ErrorCode::invalid_argument, std::string("eigendata: missing field '") + key + "'");
  }
  EigenData data;
  data.q = number(doc["q"]);
  if (doc.contains("distances") && !doc["distances"].is_null()) {
    data.distances = number_array(doc["distances"], "distances");
  }
  const auto& pts = doc["points"];
  require(pts.is_array(), "eigendata: points must be an array");
  for (const auto& p : pts) {
    bool numeric = p.is_array();
    if (numeric) for (const auto& x : p) numeric = numeric && x.is_number();
    if (numeric) {
      data.points.push_back(number_array(p, "points"));
    } else if (data.distances) {
      data.points.emplace_back();  // label only; geometry comes from the table
    } else {
      fail(ErrorCode::invalid_argument, "eigendata: non-numeric points need a distance table");
    }
  }
  data.eigenvalues = number_array(doc["eigenvalues"], "eigenvalues");
  require(doc["eigenvectors"].is_array(), "eigendata: eigenvectors must be an array");
  for (const auto& row : doc["eigenvectors"]) data.eigenvectors.push_back(number_array(row, "eigenvectors"));
  return data;
}

Json eigendata_to_json(const EigenData& data) {
  Json doc;
  doc["q"] = data.q;
  doc["points"] = data.points;
  doc["eigenvalues"] = data.eigenvalues;
  doc["eigenvectors"] = data.eigenvectors;
  if (data.distances) doc["distances"] = *data.distances;
  return doc;
}

EigenData read_eigendata(const std::filesystem::path& path) { return eigendata_from_json(parse_file(path)); }

std::vector<Point> nodes_from_json(const Space& space, const Json& doc) {
  const Json* pts = &doc;
  if (doc.is_object()) {
    if (!doc.contains("points")) fail(ErrorCode::invalid_argument, "node file: missing field 'points'");
    pts = &doc["points"];
  }
  require(pts->is_array(), "node file: points must be an array");
  std::vector<Point> out;
  out.reserve(pts->size());
  for (const auto& p : *pts) {
    const auto c = number_array(p, "points");
    out.push_back(space.point_from_coordinates(c));
  }
  return out;
}

PointMeasure measure_from_json(const Space& space, const Json& doc) {
  require(doc.is_object() && doc.contains("weights"), "measure file: expected points and weights");
  PointMeasure nu;
  nu.support = nodes_from_json(space, doc);
  nu.weights = number_array(doc["weights"], "weights");
  require(nu.weights.size() == nu.support.size(), "measure file: points and weights differ in length");
  return nu;
}

Json measure_to_json(const Space& space, const PointMeasure& nu) {
  Json doc;
  doc["points"] = Json::array();
  for (const auto& p : nu.support) doc["points"].push_back(space.coordinates(p));
  doc["weights"] = nu.weights;
  return doc;
}

PointMeasure read_measure(const Space& space, const std::filesystem::path& path) {
  return measure_from_json(space, parse_file(path));
}

void write_measure(const Space& space, const PointMeasure& nu, const std::filesystem::path& path) {
  write_text(path, stable_dump(measure_to_json(space, nu)) + "\n");
}

std::string measure_csv(const Space& space, const PointMeasure& nu) {
  std::string out = "index";
  const std::size_t dim = nu.size() > 0 ? space.coordinates(nu.support[0]).size() : 0;
  for (std::size_t d = 0; d < dim; ++d) out += ",x" + std::to_string(d);
  out += ",weight\n";
  for (std::size_t i = 0; i < nu.size(); ++i) {
    out += std::to_string(i);
    for (double c : space.coordinates(nu.support[i])) out += "," + csv_number(c);
    out += "," + csv_number(nu.weights[i]) + "\n";
  }
  return out;
}

SpectralFunction spectral_from_json(const Json& doc) {
  require(doc.is_object() && doc.contains("coefficients") && doc["coefficients"].is_array(),
          "spectral function: expected a 'coefficients' array");
  SpectralFunction f;
  for (const auto& entry : doc["coefficients"]) {
    require(entry.is_array() && entry.size() == 2 && entry[0].is_number_integer() && entry[1].is_number(),
            "spectral function: entries must be [index, value]");
    const auto k = entry[0].get<std::int64_t>();
    require(k >= 0, "spectral function: negative index");
    const auto idx = static_cast<std::size_t>(k);
    if (idx >= f.coefficients.size()) f.coefficients.resize(idx + 1, 0.0);
    f.coefficients[idx] = entry[1].get<double>();
  }
  return f;
}

Json spectral_to_json(const SpectralFunction& f) {
  Json doc;
  doc["coefficients"] = Json::array();
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f.coefficients[k] != 0.0) doc["coefficients"].push_back(Json::array({k, f.coefficients[k]}));
  }
  return doc;
}

Json report_to_json(const QuadReport& r) {
  Json doc;
  doc["gamma"] = r.gamma;
  doc["p"] = r.p;
  doc["orders"] = Json::array();
  for (const auto& o : r.orders) {
    doc["orders"].push_back({{"n", o.n},
                             {"total_variation", o.total_variation},
                             {"regularity_constant", o.regularity_constant},
                             {"wce", o.wce},
                             {"scaled_wce", o.scaled_wce},
                             {"max_exactness_residual", o.max_exactness_residual}});
  }
  doc["exactness_residuals"] = r.exactness_residuals;
  doc["total_variation"] = r.total_variation;
  doc["regularity_constant"] = r.regularity_constant;
  doc["discrepancy"] = optional_number(r.discrepancy);
  doc["discrepancy_tail"] = r.discrepancy_tail;
  doc["wce_samples"] = Json::array();
  for (const auto& [n, w] : r.wce_samples) doc["wce_samples"].push_back(Json::array({n, w}));
  doc["fitted_gamma"] = optional_number(r.fitted_gamma);
  doc["covering"] = Json::array();
  for (const auto& c : r.covering) {
    Json rows = Json::array();
    for (const auto& row : c.rows) rows.push_back({{"c1", row.c1}, {"min_scaled_mass", row.min_scaled_mass}});
    doc["covering"].push_back({{"n", c.n},
                               {"p_tilde", c.p_tilde},
                               {"floor", c.floor},
                               {"rows", rows},
                               {"c1", optional_number(c.c1)},
                               {"centers", c.centers},
                               {"pass", c.pass}});
  }
  doc["verdict"] = {{"bounded_variation", r.verdict.bounded_variation},
                    {"uniform_regularity", r.verdict.uniform_regularity},
                    {"error_decay", r.verdict.error_decay},
                    {"A", r.verdict.A},
                    {"pass", r.verdict.pass}};
  doc["regime"] = r.regime;
  doc["wce_is_lower_estimate"] = r.wce_is_lower_estimate;
  doc["degree_factor"] = r.degree_factor;
  doc["trials"] = r.trials;
  doc["seed"] = r.seed;
  return doc;
}

QuadReport report_from_json(const Json& doc) {
  require(doc.is_object(), "report: expected a JSON object");
  QuadReport r;
  try {
    r.gamma = number(doc.at("gamma"));
    r.p = number(doc.at("p"));
    for (const auto& o : doc.at("orders")) {
      r.orders.push_back({number(o.at("n")), number(o.at("total_variation")), number(o.at("regularity_constant")),
                          number(o.at("wce")), number(o.at("scaled_wce")), number(o.at("max_exactness_residual"))});
    }
    for (const auto& x : doc.at("exactness_residuals")) r.exactness_residuals.push_back(number(x));
    r.total_variation = number(doc.at("total_variation"));
    r.regularity_constant = number(doc.at("regularity_constant"));
    r.discrepancy = read_optional(doc, "discrepancy");
    r.discrepancy_tail = number(doc.at("discrepancy_tail"));
    for (const auto& s : doc.at("wce_samples")) r.wce_samples.emplace_back(number(s.at(0)), number(s.at(1)));
    r.fitted_gamma = read_optional(doc, "fitted_gamma");
    for (const auto& c : doc.at("covering")) {
      CoveringReport cr;
      cr.n = number(c.at("n"));
      cr.p_tilde = number(c.at("p_tilde"));
      cr.floor = number(c.at("floor"));
      for (const auto& row : c.at("rows")) cr.rows.push_back({number(row.at("c1")), number(row.at("min_scaled_mass"))});
      cr.c1 = read_optional(c, "c1");
      cr.centers = c.at("centers").get<std::size_t>();
      cr.pass = c.at("pass").get<bool>();
      r.covering.push_back(std::move(cr));
    }
    const auto& v = doc.at("verdict");
    r.verdict.bounded_variation = v.at("bounded_variation").get<bool>();
    r.verdict.uniform_regularity = v.at("uniform_regularity").get<bool>();
    r.verdict.error_decay = v.at("error_decay").get<bool>();
    r.verdict.A = number(v.at("A"));
    r.verdict.pass = v.at("pass").get<bool>();
    r.regime = doc.at("regime").get<std::string>();
    r.wce_is_lower_estimate = doc.at("wce_is_lower_estimate").get<bool>();
    r.degree_factor = number(doc.at("degree_factor"));
    r.trials = doc.at("trials").get<std::size_t>();
    r.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("report: ") + e.what());
  }
  return r;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = std::string(kSweepHeader) + "\n";
  for (const auto& r : rows) {
    out += csv_number(r.n) + "," + csv_number(r.wce) + "," + csv_number(r.tv) + "," + csv_number(r.reg_const) + "," +
           csv_number(r.discrepancy) + "\n";
  }
  return out;
}

std::string profile_csv(const LocalizationProfile& profile) {
  std::string out = std::string(kProfileHeader) + "\n";
  for (const auto& r : profile.rows) {
    out += csv_number(r.r) + "," + csv_number(r.sup_abs) + "," + csv_number(r.bound) + "\n";
  }
  return out;
}

}  // namespace diffquad::io
