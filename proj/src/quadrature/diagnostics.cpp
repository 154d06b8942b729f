#include <algorithm>
#include <cmath>

#include "diffquad/error.hpp"
#include "diffquad/kernels.hpp"
#include "diffquad/measures.hpp"
#include "diffquad/parallel.hpp"
#include "diffquad/quadrature.hpp"
#include "diffquad/rng.hpp"
#include "diffquad/simd.hpp"

namespace diffquad {
namespace {

double q_over_p(double q, double p) { return std::isinf(p) ? 0.0 : q / p; }

// Growth of `values` against `orders` counts as bounded when the log-log
// slope over entries above `floor` stays below `max_slope`.
bool bounded_growth(std::span<const double> orders, std::span<const double> values, double floor, double max_slope) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) return false;
    if (values[i] > floor) {
      x.push_back(orders[i]);
      y.push_back(values[i]);
    }
  }
  if (x.size() < 2) return true;
  return loglog_slope(x, y) <= max_slope;
}

std::vector<Point> scan_centers(const Space& space, const PointMeasure& nu, std::size_t probe_count) {
  std::vector<Point> centers = nu.support;
  const auto grid = space.probe_grid(probe_count);
  centers.insert(centers.end(), grid.points.begin(), grid.points.end());
  return centers;
}

}  // namespace

WorstCaseError worst_case_error(const Space& space, const PointMeasure& nu, double gamma, double p, double n,
                                std::size_t trials, std::uint64_t seed, double degree_factor) {
  require(p >= 1.0, "worst_case_error: p must lie in [1, inf]");
  require(gamma > q_over_p(space.q(), p), "worst_case_error: gamma must exceed q / p");
  require(n > 0.0 && degree_factor >= 1.0, "worst_case_error: n must be positive and degree_factor >= 1");
  WorstCaseError out;
  out.degree = degree_factor * n;
  if (trials == 0) {
    out.empty = true;
    return out;
  }
  if (out.degree > space.spectral_bound()) {
    fail(ErrorCode::spectrum_exhausted, "worst_case_error: polynomial degree exceeds the stored spectrum");
  }
  const std::size_t K = space.count_below(out.degree);
  const auto defect = moment_residuals(space, nu, out.degree);
  const NodalBasis basis(space, K);

  // Trials cycle through the nested classes Pi_degree, Pi_{2^j}, ..., Pi_1:
  // full-degree draws alone are dominated by high frequencies after
  // normalization and never probe low-degree defects.
  std::vector<std::size_t> supports{K};
  for (double b = std::ldexp(1.0, static_cast<int>(std::ceil(std::log2(out.degree))) - 1); b >= 1.0; b /= 2.0) {
    const std::size_t c = space.count_below(b);
    if (c > 0 && c < supports.back()) supports.push_back(c);
  }

  out.samples.assign(trials, 0.0);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(seed, t);
    SpectralFunction P;
    P.coefficients.assign(K, 0.0);
    const std::size_t active = supports[t % supports.size()];
    for (std::size_t k = 0; k < active; ++k) P.coefficients[k] = rng.normal();
    const auto norm = smoothness_norm(basis, P, gamma, p, dyadic_cover(space, P));
    out.samples[t] = std::abs(simd::dot(defect, P.coefficients)) / norm.estimate;
  });
  out.value = *std::max_element(out.samples.begin(), out.samples.end());
  return out;
}

QuadReport verify_approx_class(const Space& space, std::span<const OrderedMeasure> sequence, double gamma, double p,
                               const ClassOptions& options) {
  require(!sequence.empty(), "verify_approx_class: empty measure sequence");
  QuadReport report;
  report.gamma = gamma;
  report.p = p;
  report.degree_factor = options.degree_factor;
  report.trials = options.trials;
  report.seed = options.seed;

  bool all_exact = true;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const auto& [n, nu] = sequence[i];
    OrderRecord rec;
    rec.n = n;
    rec.total_variation = total_variation(nu);
    rec.regularity_constant = regularity_constant(space, nu, 1.0 / n, {}, options.probe_count).constant;
    const auto wce = worst_case_error(space, nu, gamma, p, n, options.trials, split_seed(options.seed, i),
                                      options.degree_factor);
    rec.wce = wce.value;
    rec.scaled_wce = std::pow(n, gamma) * wce.value;
    const auto residuals = moment_residuals(space, nu, n);
    for (double r : residuals) rec.max_exactness_residual = std::max(rec.max_exactness_residual, std::abs(r));
    all_exact = all_exact && rec.max_exactness_residual <= kExactTolerance;
    if (i + 1 == sequence.size()) report.exactness_residuals = residuals;
    report.orders.push_back(rec);
    report.wce_samples.emplace_back(n, wce.value);
    report.total_variation = std::max(report.total_variation, rec.total_variation);
    report.regularity_constant = std::max(report.regularity_constant, rec.regularity_constant);
  }

  std::vector<double> ns, tv, reg, scaled, fit_n, fit_w;
  for (const auto& r : report.orders) {
    ns.push_back(r.n);
    tv.push_back(r.total_variation);
    reg.push_back(r.regularity_constant);
    scaled.push_back(r.scaled_wce);
    if (r.scaled_wce > options.exact_floor) {
      fit_n.push_back(r.n);
      fit_w.push_back(r.wce);
    }
    report.verdict.A = std::max(report.verdict.A, r.scaled_wce);
  }
  if (fit_n.size() >= 2) report.fitted_gamma = -loglog_slope(fit_n, fit_w);

  auto& v = report.verdict;
  v.bounded_variation = bounded_growth(ns, tv, 0.0, options.growth_slope_max);
  v.uniform_regularity = bounded_growth(ns, reg, 0.0, options.growth_slope_max);
  v.error_decay = options.trials > 0 && bounded_growth(ns, scaled, options.exact_floor, options.growth_slope_max);
  v.pass = v.bounded_variation && v.uniform_regularity && v.error_decay;
  report.regime = all_exact ? "quadrature" : "approximate";
  return report;
}

double covering_exponent(double q, double gamma, double p) {
  require(gamma > 0.0 && p >= 1.0, "covering_exponent: gamma > 0 and p >= 1 required");
  if (p == 1.0) return 1.0;  // p' = inf
  const double p_conj = std::isinf(p) ? 1.0 : p / (p - 1.0);
  return 1.0 + q / (gamma * p_conj);
}

CoveringReport covering_check(const Space& space, const PointMeasure& nu, double n, double gamma, double p,
                              const CoveringOptions& options) {
  require(n > 0.0, "covering_check: n must be positive");
  CoveringReport out;
  out.n = n;
  out.p_tilde = covering_exponent(space.q(), gamma, p);
  out.floor = options.floor;
  const std::size_t probes =
      options.probe_count > 0 ? options.probe_count : std::max(default_probe_count(space), 8 * nu.size());
  PointMeasure empty;
  const auto centers = scan_centers(space, empty, probes);
  out.centers = centers.size();
  const double scale = std::pow(n, space.q() / out.p_tilde);
  for (double c1 : options.ladder) {
    const double r = c1 / std::pow(n, 1.0 / out.p_tilde);
    std::vector<double> mass(centers.size());
    parallel_for(centers.size(), [&](std::size_t i) { mass[i] = ball_mass(space, nu, centers[i], r); });
    const double lowest = centers.empty() ? 0.0 : *std::min_element(mass.begin(), mass.end());
    out.rows.push_back({c1, lowest * scale});
    if (!out.c1 && lowest * scale >= options.floor) out.c1 = c1;
  }
  out.pass = out.c1.has_value();
  return out;
}

std::optional<double> covering_constant(std::span<const CoveringReport> reports) {
  if (reports.empty()) return std::nullopt;
  for (std::size_t k = 0; k < reports.front().rows.size(); ++k) {
    bool ok = true;
    for (const auto& r : reports) ok = ok && k < r.rows.size() && r.rows[k].min_scaled_mass >= r.floor;
    if (ok) return reports.front().rows[k].c1;
  }
  return std::nullopt;
}

double product_defect(const Space& space, double A, double N) {
  require(A >= 1.0 && N > 0.0, "product_defect: A >= 1 and N > 0 required");
  if (A * N > space.spectral_bound()) fail(ErrorCode::spectrum_exhausted, "product_defect: A N exceeds the stored spectrum");
  const std::size_t kn = space.count_below(N);
  const std::size_t ka = space.count_below(A * N);
  const NodalBasis basis(space, ka);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t j = 0; j < kn; ++j)
    for (std::size_t k = j; k < kn; ++k) pairs.emplace_back(j, k);
  std::vector<double> defect(pairs.size(), 0.0);
  parallel_for(pairs.size(), [&](std::size_t t) {
    const auto [j, k] = pairs[t];
    std::vector<double> v(basis.nodes());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = basis.at(i, j) * basis.at(i, k);
    const auto proj = basis.synthesize(basis.analyze(v));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj[i];
    defect[t] = simd::max_abs(v);
  });
  return defect.empty() ? 0.0 : *std::max_element(defect.begin(), defect.end());
}

PositivityReport positivity_regularity_check(const Space& space, const PointMeasure& nu, double n, double p,
                                             double bound, std::size_t probe_count) {
  for (double w : nu.weights) {
    if (w < 0.0) fail(ErrorCode::invalid_argument, "positivity_regularity_check: negative weight");
  }
  require(n > 0.0 && p >= 1.0, "positivity_regularity_check: n > 0 and p >= 1 required");
  PositivityReport out;
  out.n = n;
  out.bound = bound;
  out.exponent = q_over_p(space.q(), p);
  const auto centers = scan_centers(space, nu, probe_count == 0 ? default_probe_count(space) : probe_count);
  std::vector<double> mass(centers.size());
  parallel_for(centers.size(), [&](std::size_t i) { mass[i] = ball_mass(space, nu, centers[i], 1.0 / n); });
  out.max_scaled_mass = *std::max_element(mass.begin(), mass.end()) * std::pow(n, out.exponent);
  out.regularity_constant = regularity_constant(space, nu, 1.0 / n, {}, probe_count).constant;
  out.total_variation = total_variation(nu);
  out.within_bound = out.max_scaled_mass <= bound;
  return out;
}

PositivitySequence positivity_regularity_sequence(const Space& space, std::span<const OrderedMeasure> sequence,
                                                  double p, double bound) {
  PositivitySequence out;
  std::vector<double> ns, vals;
  for (const auto& [n, nu] : sequence) {
    out.reports.push_back(positivity_regularity_check(space, nu, n, p, bound));
    ns.push_back(n);
    vals.push_back(out.reports.back().max_scaled_mass);
    out.flagged = out.flagged || !out.reports.back().within_bound;
  }
  if (ns.size() >= 2) out.growth_slope = loglog_slope(ns, vals);
  out.flagged = out.flagged || out.growth_slope > 0.25;
  return out;
}

Sweep wce_sweep(const Space& space, std::span<const OrderedMeasure> sequence, double gamma, double p, double beta,
                const ClassOptions& options) {
  Sweep out;
  out.report = verify_approx_class(space, sequence, gamma, p, options);
  const double b = beta > 0.0 ? beta : default_beta(space.q(), p);
  std::vector<double> ns, ws;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const auto& rec = out.report.orders[i];
    const auto d = discrepancy_detail(space, sequence[i].measure, b, p);
    out.rows.push_back({rec.n, rec.wce, rec.total_variation, rec.regularity_constant, d.value});
    out.report.discrepancy = d.value;
    out.report.discrepancy_tail = d.tail;
    if (rec.wce > 0.0) {
      ns.push_back(rec.n);
      ws.push_back(rec.wce);
    }
  }
  if (ns.size() >= 2) out.slope = loglog_slope(ns, ws);
  return out;
}

}  // namespace diffquad
