#include "diffquad/operators.hpp"

#include <algorithm>
#include <cmath>

#include "diffquad/error.hpp"
#include "diffquad/parallel.hpp"
#include "diffquad/simd.hpp"

namespace diffquad {
namespace {

void check_p(double p) { require(p >= 1.0, "p must lie in [1, inf]"); }

std::size_t coefficient_count(const Space& space, const SpectralFunction& P) {
  require(P.size() <= space.spectrum_size(), "spectral function has more coefficients than the stored spectrum");
  return P.size();
}

std::vector<double> residual_multipliers(const Space& space, double N, std::size_t count) {
  std::vector<double> m(count);
  const auto& lam = space.eigenvalues();
  for (std::size_t k = 0; k < count; ++k) m[k] = 1.0 - cutoff_h(lam[k] / N);
  return m;
}

}  // namespace

NodalBasis::NodalBasis(const Space& space, std::size_t count) : space_(&space), count_(count) {
  require(count <= space.spectrum_size(), "NodalBasis: count exceeds stored spectrum");
  const auto& rule = space.reference_rule();
  weights_ = rule.weights;
  matrix_.resize(rule.size() * count_);
  parallel_for(rule.size(), [&](std::size_t i) {
    space.basis(rule.support[i], std::span<double>(matrix_.data() + i * count_, count_));
  });
}

std::vector<double> NodalBasis::sample(const SampledFunction& f) const {
  const auto& nodes = space_->reference_rule().support;
  std::vector<double> v(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) v[i] = f(nodes[i]);
  return v;
}

std::vector<double> NodalBasis::analyze(std::span<const double> values) const {
  require(values.size() == nodes(), "NodalBasis::analyze: value count mismatch");
  std::vector<double> wv(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) wv[i] = weights_[i] * values[i];
  std::vector<double> coeff(count_, 0.0);
  simd::gemv_t(matrix_, nodes(), count_, wv, coeff);
  return coeff;
}

std::vector<double> NodalBasis::synthesize(std::span<const double> coeff) const {
  require(coeff.size() <= count_, "NodalBasis::synthesize: too many coefficients");
  std::vector<double> padded(count_, 0.0);
  std::copy(coeff.begin(), coeff.end(), padded.begin());
  std::vector<double> out(nodes());
  simd::gemv(matrix_, nodes(), count_, padded, out);
  return out;
}

double NodalBasis::norm(std::span<const double> values, double p) const {
  check_p(p);
  if (std::isinf(p)) return simd::max_abs(values);
  if (p == 1.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += weights_[i] * std::abs(values[i]);
    return s;
  }
  if (p == 2.0) return std::sqrt(simd::weighted_dot(weights_, values, values));
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += weights_[i] * std::pow(std::abs(values[i]), p);
  return std::pow(s, 1.0 / p);
}

double fourier_coefficient(const Space& space, const SampledFunction& f, std::size_t k) {
  if (k >= space.spectrum_size()) fail(ErrorCode::spectrum_exhausted, "fourier_coefficient: index beyond stored spectrum");
  const auto& rule = space.reference_rule();
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * f(rule.support[i]) * space.eigenfunction(k, rule.support[i]);
  return s;
}

SpectralFunction project(const Space& space, const SampledFunction& f, std::size_t count) {
  NodalBasis basis(space, count == 0 ? space.spectrum_size() : count);
  return {basis.analyze(basis.sample(f))};
}

double evaluate(const Space& space, const SpectralFunction& P, const Point& x) {
  const auto b = space.basis(x, coefficient_count(space, P));
  return simd::dot(b, P.coefficients);
}

double lp_norm(const Space& space, const SampledFunction& f, double p) {
  check_p(p);
  const auto& rule = space.reference_rule();
  std::vector<double> v(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) v[i] = f(rule.support[i]);
  NodalBasis basis(space, 0);
  return basis.norm(v, p);
}

double lp_norm(const Space& space, const SpectralFunction& P, double p) {
  NodalBasis basis(space, coefficient_count(space, P));
  return basis.norm(basis.synthesize(P.coefficients), p);
}

double sigma(const SpacePtr& space, const Mask& H, const PointMeasure& nu, const SampledFunction& f, double N,
             const Point& x) {
  const auto kernel = KernelHandle::localized(space, H, N);
  const auto row = kernel.row(x, nu.support);
  double s = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) s += nu.weights[i] * f(nu.support[i]) * row[i];
  return s;
}

double sigma(const SpacePtr& space, const Mask& H, const SampledFunction& f, double N, const Point& x) {
  return sigma(space, H, space->reference_rule(), f, N, x);
}

SpectralFunction sigma_coefficients(const Space& space, const Mask& H, double N, const SpectralFunction& P) {
  require(N > 0.0, "sigma: N must be positive");
  const std::size_t n = coefficient_count(space, P);
  SpectralFunction out{P.coefficients};
  const auto& lam = space.eigenvalues();
  for (std::size_t k = 0; k < n; ++k) out.coefficients[k] *= H(lam[k] / N);
  return out;
}

SpectralFunction tau_coefficients(const Space& space, std::size_t j, const SpectralFunction& P) {
  const double n = std::ldexp(1.0, static_cast<int>(j));
  auto hi = sigma_coefficients(space, Mask::cutoff(), n, P);
  if (j == 0) return hi;
  const auto lo = sigma_coefficients(space, Mask::cutoff(), n / 2.0, P);
  for (std::size_t k = 0; k < hi.size(); ++k) hi.coefficients[k] -= lo.coefficients[k];
  return hi;
}

double tau(const Space& space, const SpectralFunction& P, std::size_t j, const Point& x) {
  return evaluate(space, tau_coefficients(space, j, P), x);
}

SpectralFunction bessel_apply(const Space& space, double r, const SpectralFunction& P) {
  require(r > 0.0, "bessel_apply: r must be positive");
  const std::size_t n = coefficient_count(space, P);
  SpectralFunction out{P.coefficients};
  const auto& lam = space.eigenvalues();
  for (std::size_t k = 0; k < n; ++k) out.coefficients[k] *= std::pow(lam[k] + 1.0, r);
  return out;
}

SpectralFunction dg_apply(const Space& space, double beta, const SpectralFunction& P) {
  const std::size_t n = coefficient_count(space, P);
  SpectralFunction out{P.coefficients};
  const auto& lam = space.eigenvalues();
  for (std::size_t k = 0; k < n; ++k) out.coefficients[k] *= std::pow(1.0 + lam[k], beta);
  return out;
}

namespace {

void check_reach(const Space& space, double N) {
  require(N > 0.0, "N must be positive");
  if (N > space.spectral_bound()) {
    fail(ErrorCode::spectrum_exhausted, "sigma_N of a sampled function needs every eigenvalue below N");
  }
}

double sampled_error(const NodalBasis& basis, std::span<const double> values, std::span<const double> coeff,
                     double N, double p) {
  const std::size_t n = basis.space().count_below(N);
  std::vector<double> c(coeff.begin(), coeff.begin() + static_cast<std::ptrdiff_t>(n));
  const auto& lam = basis.space().eigenvalues();
  for (std::size_t k = 0; k < n; ++k) c[k] *= cutoff_h(lam[k] / N);
  auto approx = basis.synthesize(c);
  for (std::size_t i = 0; i < approx.size(); ++i) approx[i] = values[i] - approx[i];
  return basis.norm(approx, p);
}

double spectral_error(const NodalBasis& basis, const SpectralFunction& P, double N, double p) {
  const std::size_t n = P.size();
  auto m = residual_multipliers(basis.space(), N, n);
  bool zero = true;
  for (std::size_t k = 0; k < n; ++k) {
    m[k] *= P.coefficients[k];
    zero = zero && m[k] == 0.0;
  }
  if (zero) return 0.0;
  return basis.norm(basis.synthesize(m), p);
}

}  // namespace

double degree_approx_error(const Space& space, const SampledFunction& f, double N, double p) {
  check_p(p);
  check_reach(space, N);
  NodalBasis basis(space, space.count_below(N));
  const auto values = basis.sample(f);
  return sampled_error(basis, values, basis.analyze(values), N, p);
}

double degree_approx_error(const Space& space, const SpectralFunction& P, double N, double p) {
  check_p(p);
  require(N > 0.0, "N must be positive");
  NodalBasis basis(space, coefficient_count(space, P));
  return spectral_error(basis, P, N, p);
}

double k_functional_surrogate(const Space& space, const SampledFunction& f, double r, double N, double p) {
  check_p(p);
  check_reach(space, N);
  NodalBasis basis(space, space.count_below(N));
  const auto values = basis.sample(f);
  const auto coeff = basis.analyze(values);
  const double err = sampled_error(basis, values, coeff, N, p);
  SpectralFunction s{coeff};
  s = bessel_apply(space, r, sigma_coefficients(space, Mask::cutoff(), N, s));
  return err + std::pow(N, -r) * basis.norm(basis.synthesize(s.coefficients), p);
}

SmoothnessEstimate smoothness_norm(const Space& space, const SampledFunction& f, double gamma, double p,
                                   std::size_t dyadic_max) {
  require(gamma > 0.0, "smoothness_norm: gamma must be positive");
  check_p(p);
  const double top = std::ldexp(1.0, static_cast<int>(dyadic_max));
  check_reach(space, top);
  NodalBasis basis(space, space.count_below(top));
  const auto values = basis.sample(f);
  const auto coeff = basis.analyze(values);

  SmoothnessEstimate out;
  out.gamma = gamma;
  out.p = p;
  out.norm_p = basis.norm(values, p);
  out.dyadic_levels.resize(dyadic_max + 1);
  parallel_for(dyadic_max + 1, [&](std::size_t i) {
    const double n = std::ldexp(1.0, static_cast<int>(i));
    out.dyadic_levels[i] = {n, std::pow(n, gamma) * sampled_error(basis, values, coeff, n, p)};
  });
  double worst = 0.0;
  for (const auto& [n, v] : out.dyadic_levels) worst = std::max(worst, v);
  out.estimate = out.norm_p + worst;
  return out;
}

SmoothnessEstimate smoothness_norm(const NodalBasis& basis, const SpectralFunction& P, double gamma, double p,
                                   std::size_t dyadic_max) {
  require(gamma > 0.0, "smoothness_norm: gamma must be positive");
  check_p(p);
  require(P.size() <= basis.count(), "smoothness_norm: basis does not cover the function");
  SmoothnessEstimate out;
  out.gamma = gamma;
  out.p = p;
  out.norm_p = basis.norm(basis.synthesize(P.coefficients), p);
  double worst = 0.0;
  for (std::size_t i = 0; i <= dyadic_max; ++i) {
    const double n = std::ldexp(1.0, static_cast<int>(i));
    const double v = std::pow(n, gamma) * spectral_error(basis, P, n, p);
    out.dyadic_levels.emplace_back(n, v);
    worst = std::max(worst, v);
  }
  out.estimate = out.norm_p + worst;
  return out;
}

SmoothnessEstimate smoothness_norm(const Space& space, const SpectralFunction& P, double gamma, double p,
                                   std::size_t dyadic_max) {
  NodalBasis basis(space, coefficient_count(space, P));
  return smoothness_norm(basis, P, gamma, p, dyadic_max);
}

std::size_t dyadic_cover(const Space& space, const SpectralFunction& P) {
  double top = 0.0;
  const auto& lam = space.eigenvalues();
  for (std::size_t k = 0; k < coefficient_count(space, P); ++k) {
    if (P.coefficients[k] != 0.0) top = std::max(top, lam[k]);
  }
  std::size_t j = 0;
  while (std::ldexp(1.0, static_cast<int>(j)) < 2.0 * top) ++j;
  return j;
}

}  // namespace diffquad
