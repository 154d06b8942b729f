#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "diffquad/kernels.hpp"
#include "diffquad/space.hpp"

namespace diffquad {

// Finitely many Fourier coefficients f^(k) = <f, phi_k>, indexed by spectrum entry.
struct SpectralFunction {
  std::vector<double> coefficients;

  double operator[](std::size_t k) const { return k < coefficients.size() ? coefficients[k] : 0.0; }
  std::size_t size() const { return coefficients.size(); }
};

using SampledFunction = std::function<double(const Point&)>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// The first `count` eigenfunctions tabulated at the reference-rule nodes.
// Analysis and synthesis are single matrix-vector products.
class NodalBasis {
 public:
  NodalBasis(const Space& space, std::size_t count);

  const Space& space() const { return *space_; }
  std::size_t count() const { return count_; }
  std::size_t nodes() const { return weights_.size(); }
  std::span<const double> weights() const { return weights_; }
  double at(std::size_t node, std::size_t k) const { return matrix_[node * count_ + k]; }

  std::vector<double> sample(const SampledFunction& f) const;
  // Reference-rule inner products with phi_0 .. phi_{count-1}.
  std::vector<double> analyze(std::span<const double> values) const;
  // Values at the nodes of sum_k coeff[k] phi_k (coeff.size() <= count).
  std::vector<double> synthesize(std::span<const double> coeff) const;
  // Reference-rule L^p norm of nodal values; p = inf takes the max.
  double norm(std::span<const double> values, double p) const;

 private:
  const Space* space_;
  std::size_t count_;
  std::vector<double> weights_;
  std::vector<double> matrix_;  // nodes x count, row-major
};

double fourier_coefficient(const Space& space, const SampledFunction& f, std::size_t k);

// Coefficients of f for every stored entry (or the first `count`).
SpectralFunction project(const Space& space, const SampledFunction& f, std::size_t count = 0);

double evaluate(const Space& space, const SpectralFunction& P, const Point& x);

// p in [1, inf]; reference-rule norm.
double lp_norm(const Space& space, const SampledFunction& f, double p);
double lp_norm(const Space& space, const SpectralFunction& P, double p);

// sigma_N(H; nu; f, x) = sum_i w_i f(y_i) Phi_N(H; x, y_i).
double sigma(const SpacePtr& space, const Mask& H, const PointMeasure& nu, const SampledFunction& f, double N,
             const Point& x);
// Same with nu = mu* (the reference rule).
double sigma(const SpacePtr& space, const Mask& H, const SampledFunction& f, double N, const Point& x);

// Coefficientwise H(lambda_k / N) P^(k).
SpectralFunction sigma_coefficients(const Space& space, const Mask& H, double N, const SpectralFunction& P);

// tau_0 = sigma_1, tau_j = sigma_{2^j} - sigma_{2^{j-1}}.
SpectralFunction tau_coefficients(const Space& space, std::size_t j, const SpectralFunction& P);
double tau(const Space& space, const SpectralFunction& P, std::size_t j, const Point& x);

// (lambda_k + 1)^r P^(k).
SpectralFunction bessel_apply(const Space& space, double r, const SpectralFunction& P);

// P^(k) / b(lambda_k) with b(lambda) = (1 + lambda)^-beta.
SpectralFunction dg_apply(const Space& space, double beta, const SpectralFunction& P);

// ||f - sigma_N(f)||_p, the computed stand-in for dist(p; f, Pi_N).
double degree_approx_error(const Space& space, const SampledFunction& f, double N, double p);
double degree_approx_error(const Space& space, const SpectralFunction& P, double N, double p);

// ||f - sigma_N f||_p + N^-r ||Delta^r sigma_N f||_p, the Jackson-type
// surrogate for the K-functional at delta = 1/N.
double k_functional_surrogate(const Space& space, const SampledFunction& f, double r, double N, double p);

struct SmoothnessEstimate {
  double gamma = 0.0;
  double p = 0.0;
  double norm_p = 0.0;
  std::vector<std::pair<double, double>> dyadic_levels;  // (n, n^gamma * error(n))
  double estimate = 0.0;  // norm_p + max over levels
};

// ||f||_p + max_{n = 1, 2, ..., 2^dyadic_max} n^gamma ||f - sigma_n f||_p.
SmoothnessEstimate smoothness_norm(const Space& space, const SampledFunction& f, double gamma, double p,
                                   std::size_t dyadic_max);
SmoothnessEstimate smoothness_norm(const Space& space, const SpectralFunction& P, double gamma, double p,
                                   std::size_t dyadic_max);
// Variant reusing a tabulated basis; basis.count() must cover P.
SmoothnessEstimate smoothness_norm(const NodalBasis& basis, const SpectralFunction& P, double gamma, double p,
                                   std::size_t dyadic_max);

// Smallest dyadic exponent J with 2^J >= 2 * max lambda in the support of P:
// every level beyond it reproduces P exactly.
std::size_t dyadic_cover(const Space& space, const SpectralFunction& P);

}  // namespace diffquad
