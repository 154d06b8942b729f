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

std::vector<SpectrumEntry> sphere_entries(std::size_t L) {
  std::vector<SpectrumEntry> out;
  for (std::size_t l = 0; l <= L; ++l) {
    const auto lam = static_cast<double>(l);
    const std::string base = "Y(" + std::to_string(l) + ",";
    out.push_back({out.size(), lam, base + "0)"});
    for (std::size_t m = 1; m <= l; ++m) {
      out.push_back({out.size(), lam, base + std::to_string(m) + ")"});
      out.push_back({out.size(), lam, base + "-" + std::to_string(m) + ")"});
    }
  }
  return out;
}

double clamp_unit(double t) { return std::clamp(t, -1.0, 1.0); }

class SphereSpace final : public Space {
 public:
  explicit SphereSpace(std::size_t L)
      : Space(2.0, sphere_entries(L), static_cast<double>(L) + 1.0), L_(L) {
    set_reference_rule(sphere_product_rule(2 * L + 1, 4 * L + 1));
  }

  std::string_view kind() const override { return "sphere"; }

  double distance(const Point& a, const Point& b) const override {
    // atan2 form is accurate for nearly equal and nearly antipodal points.
    const double cx = a.x[1] * b.x[2] - a.x[2] * b.x[1];
    const double cy = a.x[2] * b.x[0] - a.x[0] * b.x[2];
    const double cz = a.x[0] * b.x[1] - a.x[1] * b.x[0];
    const double d = a.x[0] * b.x[0] + a.x[1] * b.x[1] + a.x[2] * b.x[2];
    return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), d);
  }
  double diameter() const override { return kPi; }

  void basis(const Point& p, std::span<double> out) const override {
    require(out.size() <= spectrum_size(), "basis request exceeds stored spectrum");
    if (out.empty()) return;
    const auto degree = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(out.size()))));
    const std::size_t L = std::min(L_, degree);
    const double z = clamp_unit(p.x[2]);
    const double s = std::sqrt(std::max(0.0, p.x[0] * p.x[0] + p.x[1] * p.x[1]));
    const double phi = std::atan2(p.x[1], p.x[0]);

    std::vector<double> cm(L + 1), sm(L + 1);
    detail::for_each_harmonic(phi, L, [&](std::size_t m, double c, double sn) {
      cm[m] = c;
      sm[m] = sn;
    });

    const double r2 = std::sqrt(2.0);
    auto put = [&](std::size_t idx, double v) {
      if (idx < out.size()) out[idx] = v;
    };
    // Fully normalized associated Legendre functions, column by column in m:
    // Pbar_l^m = sqrt((2l+1)(l-m)!/(l+m)!) P_l^m (no Condon-Shortley phase).
    double pmm = 1.0;
    for (std::size_t m = 0; m <= L; ++m) {
      if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
      double p_prev = 0.0;
      double p_cur = pmm;
      for (std::size_t l = m; l <= L; ++l) {
        if (l == m + 1) {
          p_prev = p_cur;
          p_cur = std::sqrt(2.0 * m + 3.0) * z * pmm;
        } else if (l > m + 1) {
          const double ld = static_cast<double>(l);
          const double md = static_cast<double>(m);
          const double a = std::sqrt((4.0 * ld * ld - 1.0) / (ld * ld - md * md));
          const double b = std::sqrt(((ld - 1.0) * (ld - 1.0) - md * md) / (4.0 * (ld - 1.0) * (ld - 1.0) - 1.0));
          const double next = a * (z * p_cur - b * p_prev);
          p_prev = p_cur;
          p_cur = next;
        }
        const std::size_t base = l * l;
        if (m == 0) {
          put(base, p_cur);
        } else {
          put(base + 2 * m - 1, r2 * p_cur * cm[m]);
          put(base + 2 * m, r2 * p_cur * sm[m]);
        }
      }
    }
    if (!out.empty()) out[0] = 1.0;
  }

  double kernel_sum(const Point& x, const Point& y, std::span<const double> coeff) const override {
    const std::size_t n = std::min(coeff.size(), spectrum_size());
    if (n == 0) return 0.0;
    // Addition theorem needs whole degree blocks with one coefficient each.
    const auto blocks = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
    if (blocks * blocks != n) return kernel_sum_by_basis(x, y, coeff);
    for (std::size_t l = 0; l < blocks; ++l) {
      const double c0 = coeff[l * l];
      for (std::size_t i = l * l; i < (l + 1) * (l + 1); ++i) {
        if (coeff[i] != c0) return kernel_sum_by_basis(x, y, coeff);
      }
    }
    const double t = clamp_unit(x.x[0] * y.x[0] + x.x[1] * y.x[1] + x.x[2] * y.x[2]);
    // sum_l c_l (2l+1) P_l(t), upward three-term recurrence.
    double p_prev = 1.0;
    double p_cur = t;
    double sum = coeff[0];
    if (blocks > 1) sum += 3.0 * coeff[1] * t;
    for (std::size_t l = 2; l < blocks; ++l) {
      const double ld = static_cast<double>(l);
      const double next = ((2.0 * ld - 1.0) * t * p_cur - (ld - 1.0) * p_prev) / ld;
      p_prev = p_cur;
      p_cur = next;
      sum += coeff[l * l] * (2.0 * ld + 1.0) * p_cur;
    }
    return sum;
  }

  double christoffel_bound(double N) const override {
    if (N <= 0.0) return 0.0;
    const double c = std::ceil(N);
    return c * c;
  }

  double ball_measure(const Point&, double r) const override {
    return 0.5 * (1.0 - std::cos(std::min(r, kPi)));
  }

  ProbeGrid probe_grid(std::size_t count) const override {
    const auto rings = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count) * kPi / 4.0))));
    const double step = kPi / static_cast<double>(rings);
    ProbeGrid grid;
    for (std::size_t i = 0; i < rings; ++i) {
      const double theta = (static_cast<double>(i) + 0.5) * step;
      const auto n_phi = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(kTwoPi * std::sin(theta) / step)));
      for (std::size_t j = 0; j < n_phi; ++j) {
        const double phi = kTwoPi * (static_cast<double>(j) + 0.5 * static_cast<double>(i % 2)) /
                           static_cast<double>(n_phi);
        grid.points.push_back(sphere_point(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                                           std::cos(theta)));
      }
    }
    grid.spacing = 1.5 * step;
    return grid;
  }

  std::vector<Point> shell(const Point& c, double r, std::size_t count) const override {
    if (r <= 0.0) return {c};
    r = std::min(r, kPi);
    // Orthonormal frame (c, u, v).
    std::array<double, 3> a = std::abs(c.x[2]) < 0.9 ? std::array<double, 3>{0, 0, 1}
                                                      : std::array<double, 3>{1, 0, 0};
    std::array<double, 3> u{a[1] * c.x[2] - a[2] * c.x[1], a[2] * c.x[0] - a[0] * c.x[2],
                            a[0] * c.x[1] - a[1] * c.x[0]};
    const double un = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    for (auto& e : u) e /= un;
    const std::array<double, 3> v{c.x[1] * u[2] - c.x[2] * u[1], c.x[2] * u[0] - c.x[0] * u[2],
                                  c.x[0] * u[1] - c.x[1] * u[0]};
    const std::size_t n = std::max<std::size_t>(count, 4);
    std::vector<Point> out;
    out.reserve(n);
    const double cr = std::cos(r);
    const double sr = std::sin(r);
    for (std::size_t i = 0; i < n; ++i) {
      const double al = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
      const double ca = std::cos(al);
      const double sa = std::sin(al);
      out.push_back(sphere_point(cr * c.x[0] + sr * (ca * u[0] + sa * v[0]),
                                 cr * c.x[1] + sr * (ca * u[1] + sa * v[1]),
                                 cr * c.x[2] + sr * (ca * u[2] + sa * v[2])));
    }
    return out;
  }

  Point random_point(Rng& rng) const override {
    for (;;) {
      const double x = rng.normal();
      const double y = rng.normal();
      const double z = rng.normal();
      const double n = std::sqrt(x * x + y * y + z * z);
      if (n > 1e-12) return sphere_point(x / n, y / n, z / n);
    }
  }

  std::vector<double> coordinates(const Point& p) const override { return {p.x[0], p.x[1], p.x[2]}; }

  Point point_from_coordinates(std::span<const double> c) const override {
    require(c.size() == 3, "sphere points take three coordinates (unit vector)");
    const double n = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    require(n > 0.0, "sphere point must be nonzero");
    return sphere_point(c[0] / n, c[1] / n, c[2] / n);
  }

 private:
  std::size_t L_;
};

}  // namespace

void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
  require(n >= 1, "gauss_legendre: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const auto nd = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // Newton from the Tricomi initial guess.
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = nd * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = nd * (x * p1 - p0) / (x * x - 1.0);
    }
    nodes[i] = x;
    nodes[n - 1 - i] = -x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

PointMeasure sphere_product_rule(std::size_t n_lat, std::size_t n_lon) {
  std::vector<double> z, a;
  gauss_legendre(n_lat, z, a);
  PointMeasure rule;
  for (std::size_t i = 0; i < n_lat; ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
    for (std::size_t j = 0; j < n_lon; ++j) {
      const double phi = kTwoPi * static_cast<double>(j) / static_cast<double>(n_lon);
      rule.support.push_back(sphere_point(s * std::cos(phi), s * std::sin(phi), z[i]));
      rule.weights.push_back(0.5 * a[i] / static_cast<double>(n_lon));
    }
  }
  return rule;
}

SpacePtr sphere2_space(std::size_t max_degree) {
  require(max_degree >= 1, "sphere2_space: max_degree must be >= 1");
  return std::make_shared<SphereSpace>(max_degree);
}

}  // namespace diffquad
