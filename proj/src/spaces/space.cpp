#include <algorithm>
#include <cmath>
#include <limits>

#include "diffquad/error.hpp"
#include "diffquad/simd.hpp"
#include "diffquad/space.hpp"

namespace diffquad {

Space::Space(double q, std::vector<SpectrumEntry> entries, double spectral_bound)
    : q_(q), entries_(std::move(entries)), spectral_bound_(spectral_bound) {
  lambdas_.reserve(entries_.size());
  for (const auto& e : entries_) lambdas_.push_back(e.lambda);
}

std::size_t Space::count_below(double bound) const {
  return static_cast<std::size_t>(std::lower_bound(lambdas_.begin(), lambdas_.end(), bound) -
                                  lambdas_.begin());
}

std::vector<double> Space::basis(const Point& x, std::size_t count) const {
  std::vector<double> out(count);
  basis(x, out);
  return out;
}

double Space::eigenfunction(std::size_t k, const Point& x) const {
  require(k < spectrum_size(), "eigenfunction index out of range");
  return basis(x, k + 1)[k];
}

double Space::kernel_sum_by_basis(const Point& x, const Point& y,
                                  std::span<const double> coeff) const {
  const std::size_t n = std::min(coeff.size(), spectrum_size());
  const auto bx = basis(x, n);
  const auto by = basis(y, n);
  return simd::weighted_dot(coeff.first(n), bx, by);
}

double Space::kernel_sum(const Point& x, const Point& y, std::span<const double> coeff) const {
  return kernel_sum_by_basis(x, y, coeff);
}

double Space::tail_bound(const std::function<double(double)>& m) const {
  // Dyadic shells [B 2^j, B 2^{j+1}) beyond the stored spectrum, each bounded
  // by max m on the shell times the Christoffel bound at its right end.
  const double B = spectral_bound();
  if (!std::isfinite(B)) return 0.0;
  double total = 0.0;
  double prev = 0.0;
  double ratio = 1.0;
  constexpr int kShells = 200;
  for (int j = 0; j < kShells; ++j) {
    const double lo = B * std::ldexp(1.0, j);
    const double term = m(lo) * christoffel_bound(2.0 * lo);
    if (!std::isfinite(term)) return std::numeric_limits<double>::infinity();
    total += term;
    if (term == 0.0) return total;
    if (j > 0 && prev > 0.0) ratio = term / prev;
    prev = term;
    if (j > 8 && ratio < 1.0 && term * ratio / (1.0 - ratio) <= 1e-17 * total) return total + prev * ratio / (1.0 - ratio);
  }
  if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
  return total + prev * ratio / (1.0 - ratio);
}

std::vector<Point> ball_points(const Space& space, const Point& center, double r,
                               std::span<const Point> candidates) {
  std::vector<Point> out;
  for (const auto& p : candidates) {
    if (within(space.distance(center, p), r)) out.push_back(p);
  }
  return out;
}

}  // namespace diffquad
