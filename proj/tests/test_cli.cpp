#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cli.hpp"
#include "diffquad/io.hpp"
#include "diffquad/quadrature.hpp"
#include "diffquad/rules.hpp"
#include "diffquad/spaces.hpp"

using namespace diffquad;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path dir() {
  const auto d = fs::temp_directory_path() / "diffquad_test_cli";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string path(const std::string& name) { return (dir() / name).string(); }

}  // namespace

TEST_CASE("wce sweep end to end") {
  const auto r = run({"wce-sweep", "--space", "circle", "--orders", "8,16,32,64", "--gamma", "2", "--p", "inf",
                      "--rule", "trapezoid", "--seed", "7", "--out", path("sweep.csv")});
  CHECK(r.code == cli::kOk);
  const auto csv = slurp(path("sweep.csv"));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,wce,tv,reg_const,discrepancy");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  const auto side = io::parse_file(path("sweep.report.json"));
  CHECK(side.contains("slope"));
  CHECK(side["verdict"]["pass"].get<bool>());

  // Same composition through the library.
  const auto space = circle_space(256);
  std::vector<OrderedMeasure> seq;
  for (double n : {8.0, 16.0, 32.0, 64.0}) seq.push_back({n, rule_measure(*space, "trapezoid", n)});
  ClassOptions opt;
  opt.seed = 7;
  CHECK(io::sweep_csv(wce_sweep(*space, seq, 2.0, kInfinity, 0.0, opt).rows) == csv);
}

TEST_CASE("build weights on the sphere") {
  const auto space = sphere2_space(8);
  const auto grid = sphere_product_rule(5, 11);
  io::write_text(path("nodes.json"), io::stable_dump(io::measure_to_json(*space, grid)));
  const auto r = run({"build-weights", "--space", "sphere", "--max-degree", "8", "--nodes", path("nodes.json"),
                      "--beta", "2.5", "--constraint", "simplex", "--out", path("w.json")});
  CHECK(r.code == cli::kOk);
  const auto nu = io::read_measure(*space, path("w.json"));
  CHECK(nu.size() == grid.size());
  double sum = 0.0;
  for (double w : nu.weights) {
    CHECK(w >= 0.0);
    sum += w;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  const auto rep = io::parse_file(path("w.report.json"));
  CHECK(rep.contains("regime"));
  CHECK(rep["beta"].get<double>() == 2.5);
  CHECK(rep["optimizer"]["converged"].get<bool>());

  QuadratureProblem pr;
  pr.space = space;
  pr.nodes = grid.support;
  pr.order = 9.0;
  pr.beta = 2.5;
  pr.constraint = WeightConstraint::simplex;
  pr.kernel_tail_tolerance = std::numeric_limits<double>::infinity();
  const auto lib = minimize_discrepancy(pr);
  for (std::size_t i = 0; i < nu.size(); ++i) CHECK(nu.weights[i] == doctest::Approx(lib.measure.weights[i]).epsilon(1e-9));
}

TEST_CASE("exit codes") {
  const auto missing = run({"wce-sweep", "--space", "circle", "--orders", "8,16", "--p", "inf", "--seed", "1"});
  CHECK(missing.code == cli::kBadConfig);
  CHECK(missing.err.find("--gamma") != std::string::npos);

  CHECK(run({"wce-sweep", "--space", "circle", "--orders", "8", "--gamma", "2", "--p", "inf"}).code == cli::kBadConfig);
  CHECK(run({"frobnicate"}).code == cli::kBadConfig);
  CHECK(run({"verify", "--bogus", "1"}).code == cli::kBadConfig);
  CHECK(run({"mesh-stats", "--space", "circle", "--rule", "random", "--count", "8"}).code == cli::kBadConfig);

  io::write_text(path("bad.json"), "{\n  \"task\": \"product-defect\",\n  \"space\": \"circle\",\n  \"A\": 2,,\n}\n");
  const auto malformed = run({"--config", path("bad.json")});
  CHECK(malformed.code == cli::kBadConfig);
  CHECK(malformed.err.find("line 4") != std::string::npos);

  io::write_text(path("unknown.json"), "{\n  \"task\": \"product-defect\",\n  \"colour\": 3\n}\n");
  const auto unknown = run({"--config", path("unknown.json")});
  CHECK(unknown.code == cli::kBadConfig);
  CHECK(unknown.err.find("line 3") != std::string::npos);

  // Spectrum cap exceeded is a numeric failure.
  CHECK(run({"product-defect", "--space", "circle", "--max-index", "8", "--A", "2", "--N", "8"}).code ==
        cli::kNumericFailure);
  // Unwritable output path.
  CHECK(run({"product-defect", "--space", "circle", "--A", "2", "--N", "8", "--out", "/nonexistent/dir/x.json"}).code ==
        cli::kNumericFailure);
  // Failed verdict.
  // Failed verdict: one random point per order.
  CHECK(run({"verify", "--space", "circle", "--orders", "8,16,32,64", "--rule", "random", "--count", "1", "--gamma", "2",
             "--p", "inf", "--seed", "1", "--trials", "20"})
            .code == cli::kVerdictFailed);
}

TEST_CASE("config file with flag override") {
  io::write_text(path("cfg.json"),
                 "{\n  \"task\": \"product-defect\",\n  \"space\": \"circle\",\n  \"max-index\": 32,\n  \"A\": 1,\n  \"N\": 8\n}\n");
  const auto from_config = run({"--config", path("cfg.json")});
  CHECK(from_config.code == cli::kOk);
  const auto doc = io::Json::parse(from_config.out);
  CHECK(io::number(doc["defect"]) == product_defect(*circle_space(32), 1.0, 8.0));
  const auto overridden = run({"--config", path("cfg.json"), "--A", "2"});
  CHECK(io::number(io::Json::parse(overridden.out)["defect"]) <= 1e-12);
}

TEST_CASE("determinism") {
  auto once = [](const std::string& tag) {
    const auto r = run({"verify", "--space", "circle", "--orders", "8,16", "--rule", "random", "--weights", "exact",
                        "--gamma", "2", "--p", "2", "--seed", "11", "--trials", "30", "--out", path("det_" + tag + ".json")});
    return std::make_pair(r.code, slurp(path("det_" + tag + ".json")));
  };
  const auto a = once("a");
  const auto b = once("b");
  CHECK(a.first == b.first);
  CHECK(!a.second.empty());
  CHECK(a.second == b.second);
}

TEST_CASE("installed binary") {
  const std::string out = path("bin_profile.csv");
  const std::string cmd = std::string(DIFFQUAD_BINARY) + " kernel-profile --space circle --max-index 128 --N 32 --out " + out;
  CHECK(std::system(cmd.c_str()) == 0);
  const auto csv = slurp(out);
  CHECK(csv.rfind("r,sup_abs,bound\n", 0) == 0);
  CHECK(std::system((std::string(DIFFQUAD_BINARY) + " --help > /dev/null").c_str()) == 0);
  CHECK(WEXITSTATUS(std::system((std::string(DIFFQUAD_BINARY) + " verify 2> /dev/null").c_str())) == cli::kBadConfig);
}
