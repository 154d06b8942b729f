#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <tuple>

#include "diffquad/error.hpp"
#include "diffquad/spaces.hpp"
#include "trig.hpp"

namespace diffquad {
namespace {

using detail::kPi;
using detail::kTwoPi;

// Index into a circle basis vector for frequency k and type (0 cos, 1 sin).
std::size_t circle_slot(std::size_t k, int type) { return k == 0 ? 0 : 2 * k - 1 + type; }

struct TorusMode {
  std::size_t a, b;
  int ta, tb;
  std::size_t norm2() const { return a * a + b * b; }
};

std::vector<TorusMode> torus_modes(std::size_t K) {
  std::vector<TorusMode> modes;
  for (std::size_t a = 0; a <= K; ++a) {
    for (std::size_t b = 0; b <= K; ++b) {
      if (a * a + b * b > K * K) continue;
      for (int ta = 0; ta < (a == 0 ? 1 : 2); ++ta) {
        for (int tb = 0; tb < (b == 0 ? 1 : 2); ++tb) modes.push_back({a, b, ta, tb});
      }
    }
  }
  std::sort(modes.begin(), modes.end(), [](const TorusMode& l, const TorusMode& r) {
    return std::make_tuple(l.norm2(), l.a, l.b, l.ta, l.tb) <
           std::make_tuple(r.norm2(), r.a, r.b, r.ta, r.tb);
  });
  return modes;
}

std::string mode_label(const TorusMode& m) {
  auto part = [](std::size_t k, int t) {
    if (k == 0) return std::string("1");
    return std::string(t == 0 ? "cos" : "sin") + std::to_string(k);
  };
  return part(m.a, m.ta) + "x" + part(m.b, m.tb);
}

std::vector<SpectrumEntry> torus_entries(const std::vector<TorusMode>& modes) {
  std::vector<SpectrumEntry> out;
  out.reserve(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    out.push_back({i, std::sqrt(static_cast<double>(modes[i].norm2())), mode_label(modes[i])});
  }
  return out;
}

class TorusSpace final : public Space {
 public:
  TorusSpace(std::size_t K, std::vector<TorusMode> modes)
      : Space(2.0, torus_entries(modes), std::sqrt(static_cast<double>(K * K + 1))),
        K_(K),
        modes_(std::move(modes)) {
    const auto ring = equispaced_circle(4 * K);
    PointMeasure rule;
    const double w = 1.0 / static_cast<double>(ring.size() * ring.size());
    for (const auto& p : ring) {
      for (const auto& r : ring) {
        rule.support.push_back(torus_point(p.x[0], r.x[0]));
        rule.weights.push_back(w);
      }
    }
    set_reference_rule(std::move(rule));
  }

  std::string_view kind() const override { return "torus"; }

  double distance(const Point& a, const Point& b) const override {
    return std::max(detail::circle_distance(a.x[0], b.x[0]), detail::circle_distance(a.x[1], b.x[1]));
  }
  double diameter() const override { return kPi; }

  void basis(const Point& x, std::span<double> out) const override {
    require(out.size() <= spectrum_size(), "basis request exceeds stored spectrum");
    std::vector<double> u(2 * K_ + 1), v(2 * K_ + 1);
    fill_circle(x.x[0], u);
    fill_circle(x.x[1], v);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto& m = modes_[i];
      out[i] = u[circle_slot(m.a, m.ta)] * v[circle_slot(m.b, m.tb)];
    }
  }

  double christoffel_bound(double N) const override {
    // Exact: sum over a mode block of phi^2 is w(a) w(b) with w(0)=1,
    // w(k)=2, i.e. the number of lattice points with a^2 + b^2 < N^2.
    if (N <= 0.0) return 0.0;
    // Unit squares around the counted points lie in the disc of radius N + 1.
    if (N > 4096.0) return kPi * (N + 1.0) * (N + 1.0);
    const double n2 = N * N;
    const auto amax = static_cast<long>(std::ceil(N));
    double count = 0.0;
    for (long a = -amax; a <= amax; ++a) {
      const double rest = n2 - static_cast<double>(a * a);
      if (rest <= 0.0) continue;
      // integers b with b^2 < rest
      long bmax = static_cast<long>(std::floor(std::sqrt(rest)));
      while (static_cast<double>(bmax * bmax) >= rest && bmax >= 0) --bmax;
      if (bmax >= 0) count += static_cast<double>(2 * bmax + 1);
    }
    return count;
  }

  double ball_measure(const Point&, double r) const override {
    const double s = std::min(r, kPi) / kPi;
    return s * s;
  }

  ProbeGrid probe_grid(std::size_t count) const override {
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count)))));
    const auto ring = equispaced_circle(n);
    ProbeGrid grid;
    for (const auto& p : ring) {
      for (const auto& r : ring) grid.points.push_back(torus_point(p.x[0], r.x[0]));
    }
    grid.spacing = kPi / static_cast<double>(n);
    return grid;
  }

  std::vector<Point> shell(const Point& c, double r, std::size_t count) const override {
    if (r <= 0.0) return {c};
    r = std::min(r, kPi);
    // Boundary of the max-metric square of half-width r.
    const std::size_t per_side = std::max<std::size_t>(2, count / 4);
    std::vector<Point> out;
    for (std::size_t i = 0; i < per_side; ++i) {
      const double s = -r + 2.0 * r * static_cast<double>(i) / static_cast<double>(per_side);
      const std::array<std::array<double, 2>, 4> offsets{{{s, -r}, {r, s}, {-s, r}, {-r, -s}}};
      for (const auto& o : offsets) {
        out.push_back(torus_point(detail::wrap_angle(c.x[0] + o[0]), detail::wrap_angle(c.x[1] + o[1])));
      }
    }
    return out;
  }

  Point random_point(Rng& rng) const override {
    const double a = rng.uniform(0.0, kTwoPi);
    return torus_point(a, rng.uniform(0.0, kTwoPi));
  }

  std::vector<double> coordinates(const Point& p) const override { return {p.x[0], p.x[1]}; }

  Point point_from_coordinates(std::span<const double> c) const override {
    require(c.size() == 2, "torus points take two coordinates (angles)");
    return torus_point(detail::wrap_angle(c[0]), detail::wrap_angle(c[1]));
  }

 private:
  void fill_circle(double t, std::vector<double>& out) const {
    const double r2 = std::sqrt(2.0);
    detail::for_each_harmonic(t, K_, [&](std::size_t k, double c, double s) {
      if (k == 0) {
        out[0] = 1.0;
      } else {
        out[2 * k - 1] = r2 * c;
        out[2 * k] = r2 * s;
      }
    });
  }

  std::size_t K_;
  std::vector<TorusMode> modes_;
};

}  // namespace

SpacePtr torus2_space(std::size_t max_index) {
  require(max_index >= 1, "torus2_space: max_index must be >= 1");
  return std::make_shared<TorusSpace>(max_index, torus_modes(max_index));
}

}  // namespace diffquad
