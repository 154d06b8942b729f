#include <cmath>

#include "diffquad/error.hpp"
#include "diffquad/measures.hpp"
#include "diffquad/quadrature.hpp"

namespace diffquad {
namespace {

// c_k = sum_j w_j phi_k(x_j) over the whole stored spectrum.
std::vector<double> node_sums(const Space& space, const PointMeasure& nu) {
  const std::size_t K = space.spectrum_size();
  const auto table = basis_at_nodes(space, nu.support, K);
  std::vector<double> c(K, 0.0);
  for (std::size_t j = 0; j < nu.size(); ++j)
    for (std::size_t k = 0; k < K; ++k) c[k] += nu.weights[j] * table[j * K + k];
  return c;
}

double conjugate(double p) {
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return kInfinity;
  return p / (p - 1.0);
}

void check_args(const Space& space, const PointMeasure& nu, double beta, double p) {
  require(p == 1.0 || p == 2.0 || std::isinf(p), "discrepancy: p must be 1, 2 or inf");
  const double threshold = std::isinf(p) ? 0.0 : space.q() / p;
  require(beta > threshold, "discrepancy: beta must exceed q / p");
  require(nu.weights.size() == nu.support.size(), "discrepancy: measure weights and support differ in length");
}

// Potential difference int G(x, .) dnu - 1 at the reference nodes.
std::vector<double> potential_difference(const NodalBasis& basis, std::span<const double> c, double beta) {
  const auto& lam = basis.space().eigenvalues();
  std::vector<double> d(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) d[k] = std::pow(1.0 + lam[k], -beta) * c[k];
  d[0] -= 1.0;
  return basis.synthesize(d);
}

}  // namespace

DiscrepancyValue discrepancy_detail(const Space& space, const PointMeasure& nu, double beta, double p) {
  check_args(space, nu, beta, p);
  const auto c = node_sums(space, nu);
  const double tv = total_variation(nu);
  DiscrepancyValue out;
  if (p == 2.0) {
    const auto& lam = space.eigenvalues();
    double s = (c[0] - 1.0) * (c[0] - 1.0);
    for (std::size_t k = 1; k < c.size(); ++k) {
      const double b = std::pow(1.0 + lam[k], -beta);
      s += b * b * c[k] * c[k];
    }
    const double t = space.tail_bound([beta](double l) { return std::pow(1.0 + l, -2.0 * beta); });
    if (!std::isfinite(t)) fail(ErrorCode::spectrum_exhausted, "discrepancy: tail of the series cannot be certified");
    out.value = std::sqrt(s);
    out.tail = std::sqrt(s + tv * tv * t) - out.value;
    return out;
  }
  const double t = space.tail_bound([beta](double l) { return std::pow(1.0 + l, -beta); });
  if (!std::isfinite(t)) fail(ErrorCode::spectrum_exhausted, "discrepancy: tail of the series cannot be certified");
  NodalBasis basis(space, space.spectrum_size());
  out.value = basis.norm(potential_difference(basis, c, beta), conjugate(p));
  out.tail = tv * t;
  return out;
}

double discrepancy(const Space& space, const PointMeasure& nu, double beta, double p) {
  return discrepancy_detail(space, nu, beta, p).value;
}

double discrepancy_reference_l2(const Space& space, const PointMeasure& nu, double beta) {
  check_args(space, nu, beta, 2.0);
  NodalBasis basis(space, space.spectrum_size());
  return basis.norm(potential_difference(basis, node_sums(space, nu), beta), 2.0);
}

double poly_quad_error(const Space& space, const PointMeasure& nu, const SpectralFunction& P) {
  double s = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) s += nu.weights[j] * evaluate(space, P, nu.support[j]);
  return std::abs(P[0] - s);
}

}  // namespace diffquad
