#include <algorithm>
#include <cmath>
#include <string>

#include "diffquad/error.hpp"
#include "diffquad/spaces.hpp"
#include "trig.hpp"

namespace diffquad {
namespace {

using detail::kPi;
using detail::kTwoPi;

std::vector<SpectrumEntry> circle_entries(std::size_t K) {
  std::vector<SpectrumEntry> out;
  out.push_back({0, 0.0, "1"});
  for (std::size_t k = 1; k <= K; ++k) {
    out.push_back({2 * k - 1, static_cast<double>(k), "cos" + std::to_string(k)});
    out.push_back({2 * k, static_cast<double>(k), "sin" + std::to_string(k)});
  }
  return out;
}

class CircleSpace final : public Space {
 public:
  explicit CircleSpace(std::size_t K)
      : Space(1.0, circle_entries(K), static_cast<double>(K) + 1.0) {
    PointMeasure rule;
    rule.support = equispaced_circle(4 * K);
    rule.weights.assign(rule.support.size(), 1.0 / static_cast<double>(rule.support.size()));
    set_reference_rule(std::move(rule));
  }

  std::string_view kind() const override { return "circle"; }

  double distance(const Point& a, const Point& b) const override {
    return detail::circle_distance(a.x[0], b.x[0]);
  }
  double diameter() const override { return kPi; }

  void basis(const Point& x, std::span<double> out) const override {
    require(out.size() <= spectrum_size(), "basis request exceeds stored spectrum");
    if (out.empty()) return;
    const std::size_t K = out.size() / 2;
    const double r2 = std::sqrt(2.0);
    detail::for_each_harmonic(x.x[0], K, [&](std::size_t k, double c, double s) {
      if (k == 0) {
        out[0] = 1.0;
        return;
      }
      out[2 * k - 1] = r2 * c;
      if (2 * k < out.size()) out[2 * k] = r2 * s;
    });
  }

  double kernel_sum(const Point& x, const Point& y, std::span<const double> coeff) const override {
    const std::size_t n = std::min(coeff.size(), spectrum_size());
    for (std::size_t k = 1; 2 * k < n; ++k) {
      if (coeff[2 * k - 1] != coeff[2 * k]) return kernel_sum_by_basis(x, y, coeff);
    }
    if (n == 0) return 0.0;
    // Addition theorem: cos(kx)cos(ky) + sin(kx)sin(ky) = cos(k(x - y)).
    const std::size_t K = (n - 1) / 2;
    double sum = 0.0;
    detail::for_each_harmonic(x.x[0] - y.x[0], K, [&](std::size_t k, double c, double) {
      sum += k == 0 ? coeff[0] : 2.0 * coeff[2 * k - 1] * c;
    });
    if (n % 2 == 0) sum += coeff[n - 1] * eigenfunction(n - 1, x) * eigenfunction(n - 1, y);
    return sum;
  }

  double christoffel_bound(double N) const override {
    if (N <= 0.0) return 0.0;
    return 2.0 * std::ceil(N) - 1.0;
  }

  double ball_measure(const Point&, double r) const override { return std::min(r, kPi) / kPi; }

  ProbeGrid probe_grid(std::size_t count) const override {
    count = std::max<std::size_t>(count, 1);
    return {equispaced_circle(count), kPi / static_cast<double>(count)};
  }

  std::vector<Point> shell(const Point& c, double r, std::size_t) const override {
    if (r <= 0.0) return {c};
    if (r >= kPi) return {angle_point(detail::wrap_angle(c.x[0] + kPi))};
    return {angle_point(detail::wrap_angle(c.x[0] + r)), angle_point(detail::wrap_angle(c.x[0] - r))};
  }

  Point random_point(Rng& rng) const override { return angle_point(rng.uniform(0.0, kTwoPi)); }

  std::vector<double> coordinates(const Point& p) const override { return {p.x[0]}; }

  Point point_from_coordinates(std::span<const double> c) const override {
    require(c.size() == 1, "circle points take one coordinate (angle)");
    return angle_point(detail::wrap_angle(c[0]));
  }
};

}  // namespace

std::vector<Point> equispaced_circle(std::size_t count, double offset) {
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    out.push_back(angle_point(detail::wrap_angle(offset + kTwoPi * static_cast<double>(j) /
                                                              static_cast<double>(count))));
  }
  return out;
}

SpacePtr circle_space(std::size_t max_index) {
  require(max_index >= 1, "circle_space: max_index must be >= 1");
  return std::make_shared<CircleSpace>(max_index);
}

}  // namespace diffquad
