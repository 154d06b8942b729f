#include <doctest.h>

#include <cmath>

#include "diffquad/error.hpp"
#include "diffquad/kernels.hpp"
#include "diffquad/rng.hpp"
#include "diffquad/spaces.hpp"
#include "oracles.hpp"

using namespace diffquad;
using oracle::pi;

namespace {

double reference_integral(const Space& s, const std::function<double(const Point&)>& f) {
  const auto& rule = s.reference_rule();
  double v = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) v += rule.weights[i] * f(rule.support[i]);
  return v;
}

bool throws_code(const std::function<void()>& f, ErrorCode code) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("cutoff h") {
  CHECK(cutoff_h(0.3) == 1.0);
  CHECK(cutoff_h(0.5) == 1.0);
  CHECK(cutoff_h(1.2) == 0.0);
  CHECK(cutoff_h(1.0) == 0.0);
  CHECK(cutoff_h(0.75) > 0.0);
  CHECK(cutoff_h(0.75) < 1.0);
  CHECK(cutoff_h(0.6) > cutoff_h(0.9));
  double prev = 1.0;
  for (double t = 0.51; t < 1.0; t += 0.01) {
    CHECK(cutoff_h(t) == doctest::Approx(cutoff_h(-t)));
    CHECK(cutoff_h(t) <= prev);
    if (t > 0.55 && t < 0.95) CHECK(cutoff_h(t) < prev);
    prev = cutoff_h(t);
  }
  // Transition equals the normalized running integral of the bump, checked
  // against adaptive quadrature.
  const auto bump = [](double u) { return u <= 0.0 || u >= 1.0 ? 0.0 : std::exp(-1.0 / (u * (1.0 - u))); };
  const double total = oracle::integrate(bump, 0.0, 1.0);
  for (double t : {0.55, 0.62, 0.75, 0.81, 0.97}) {
    const double expected = 1.0 - oracle::integrate(bump, 0.0, 2.0 * t - 1.0) / total;
    CHECK(cutoff_h(t) == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("masks") {
  const auto g = Mask::band_g(), gt = Mask::band_gtilde();
  for (double t = 0.0; t <= 4.0; t += 1e-3) CHECK(gt(t) * g(t) == doctest::Approx(g(t)).epsilon(1e-14).scale(1.0));
  const auto b = Mask::type_beta(2.0);
  CHECK(b(1.0) == 0.25);
  CHECK(b(-3.0) == 1.0 / 16.0);
  CHECK_FALSE(b.compact());
  CHECK(Mask::cutoff().support_end() == 1.0);
  CHECK(gt.support_end() == 2.0);
  CHECK_FALSE(Mask::cutoff().smoothness().has_value());
}

TEST_CASE("localized kernel") {
  const auto s = circle_space(64);
  const auto x = angle_point(0.4);
  CHECK(localized_kernel(s, Mask::cutoff(), 2.0, x, x) == doctest::Approx(3.0).epsilon(1e-14));
  for (double N : {4.0, 16.0, 40.0}) {
    const auto K = KernelHandle::localized(s, Mask::cutoff(), N);
    CHECK(reference_integral(*s, [&](const Point& y) { return K(x, y); }) == doctest::Approx(1.0).epsilon(1e-12));
    // Reproduction for lambda_k <= N / 2.
    for (std::size_t k = 0; k < s->count_below(N / 2.0 + 1e-9); ++k) {
      const double v = reference_integral(*s, [&](const Point& y) { return K(x, y) * s->eigenfunction(k, y); });
      CHECK(v == doctest::Approx(s->eigenfunction(k, x)).epsilon(1e-10).scale(1.0));
    }
  }
  CHECK(throws_code([&] { KernelHandle::localized(s, Mask::cutoff(), 100.0); }, ErrorCode::spectrum_exhausted));

  Rng rng(4);
  const auto sp = sphere2_space(12);
  const auto Ks = KernelHandle::localized(sp, Mask::band_g(), 6.0);
  for (int t = 0; t < 50; ++t) {
    const auto a = sp->random_point(rng), b = sp->random_point(rng);
    CHECK(Ks(a, b) == doctest::Approx(Ks(b, a)).epsilon(1e-12).scale(1.0));
    // Addition-theorem path against per-harmonic sums.
    CHECK(sp->kernel_sum(a, b, Ks.coefficients()) ==
          doctest::Approx(sp->kernel_sum_by_basis(a, b, Ks.coefficients())).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("L1 norm of the localized kernel is bounded in N") {
  const auto c = circle_space(64);
  const auto sp = sphere2_space(64);
  for (const auto& s : {c, sp}) {
    CAPTURE(s->kind());
    double lo = 1e300, hi = 0.0;
    const auto x = s->reference_rule().support[3];
    for (double N : {8.0, 16.0, 32.0, 64.0}) {
      const auto K = KernelHandle::localized(s, Mask::cutoff(), N);
      const double l1 = reference_integral(*s, [&](const Point& y) { return std::abs(K(x, y)); });
      lo = std::min(lo, l1);
      hi = std::max(hi, l1);
    }
    CHECK(lo >= 1.0 - 1e-12);
    CHECK(hi / lo < 1.5);
  }
}

TEST_CASE("heat kernel") {
  const auto s = circle_space(64);
  const auto x = angle_point(1.0);
  const double expected = 1.0 + 2.0 * static_cast<double>(oracle::series([](long double k) { return std::exp(-k * k); }, 50));
  CHECK(heat_kernel(s, 1.0, x, x) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(expected == doctest::Approx(1.7726372).epsilon(1e-7));
  const auto K = KernelHandle::heat(s, 0.1, 1e-10);
  CHECK(K.tail_bound() <= 1e-10);
  CHECK(reference_integral(*s, [&](const Point& y) { return K(x, y); }) == doctest::Approx(1.0).epsilon(1e-10));
  const double ratio = heat_kernel(s, 0.01, x, x) / heat_kernel(s, 0.04, x, x);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.15));
  CHECK(throws_code([&] { KernelHandle::heat(circle_space(4), 0.001, 1e-10); }, ErrorCode::spectrum_exhausted));
}

TEST_CASE("type-beta kernels") {
  const auto s = circle_space(4096);
  const auto x = angle_point(2.0);
  // Truncated series against its own partial sum; the closed form only up to the stored tail.
  const double g = beta_kernel(s, 2.0, x, x, 1e-2);
  CHECK(g == doctest::Approx(1.0 + 2.0 * static_cast<double>(oracle::series([](long double k) { return 1.0L / ((1.0L + k) * (1.0L + k)); }, 4096))).epsilon(1e-12));
  CHECK(std::abs(g - (1.0 + 2.0 * (pi * pi / 6.0 - 1.0))) <= 2.0 / 4096.0);
  CHECK(beta_kernel_star(s, 2.0, x, x) == doctest::Approx(2.0 * (std::pow(pi, 4) / 90.0 - 1.0)).epsilon(1e-6));
  CHECK(beta_kernel_star(s, 2.0, x, x) == doctest::Approx(0.1646464).epsilon(1e-6));
  Rng rng(8);
  const auto G = KernelHandle::beta(circle_space(256), 2.0, 0.05);
  for (int t = 0; t < 100; ++t) {
    const auto a = G.space().random_point(rng), b = G.space().random_point(rng);
    CHECK(std::abs(G(a, b) - G(b, a)) <= 1e-12);
  }
  // L^2 column norm is constant in y on homogeneous spaces.
  for (const auto& sp : {circle_space(64), sphere2_space(12)}) {
    // beta > q keeps the kernel bounded.
    const auto Gs = KernelHandle::beta(sp, sp->q() + 1.0, 1.0);
    double first = -1.0;
    for (int t = 0; t < 5; ++t) {
      const auto y = sp->random_point(rng);
      const double n2 = std::sqrt(reference_integral(*sp, [&](const Point& z) { return std::pow(Gs(z, y), 2); }));
      if (first < 0) first = n2;
      CHECK(n2 == doctest::Approx(first).epsilon(1e-8));
    }
  }
}

TEST_CASE("Christoffel function") {
  const auto c = circle_space(64);
  const auto sp = sphere2_space(16);
  CHECK(christoffel(*c, 4.0, angle_point(0.7)) == doctest::Approx(7.0));
  CHECK(christoffel(*c, 4.5, angle_point(0.7)) == doctest::Approx(9.0));
  CHECK(christoffel(*sp, 4.0, sphere_point(0.6, 0.0, 0.8)) == doctest::Approx(16.0).epsilon(1e-12));
  for (int N = 2; N <= 64; ++N) {
    const double r = christoffel(*c, N, angle_point(0.1 * N)) / N;
    CHECK(r == doctest::Approx((2.0 * N - 1.0) / N).epsilon(1e-12));
  }
  CHECK(throws_code([&] { christoffel(*c, 70.0, angle_point(0.0)); }, ErrorCode::spectrum_exhausted));
}

TEST_CASE("localization profile") {
  const auto s = circle_space(256);
  const auto x = angle_point(0.0);
  std::vector<double> radii{0.0};
  for (double r = 1.0 / 64; r <= 1.0 + 1e-12; r *= std::pow(2.0, 0.25)) radii.push_back(r);
  const auto p64 = localization_profile(s, Mask::cutoff(), 64.0, x, radii);
  // Decay is faster than any fixed power only asymptotically: the local
  // slope keeps steepening with N r.
  CHECK(p64.fitted_exponent <= -2.5);
  const auto p128 = localization_profile(s, Mask::cutoff(), 128.0, x, radii);
  auto local = [&](double r0, double r1) {
    double a = 0, b = 0;
    for (const auto& row : p128.rows) {
      if (std::abs(row.r - r0) < 1e-12) a = row.sup_abs;
      if (std::abs(row.r - r1) < 1e-12) b = row.sup_abs;
    }
    return std::log(b / a) / std::log(r1 / r0);
  };
  CHECK(local(0.5, 1.0) < local(1.0 / 32, 1.0 / 16) - 3.0);
  CHECK(local(0.5, 1.0) <= -6.0);
  CHECK(p64.rows[0].sup_abs == doctest::Approx(localized_kernel(s, Mask::cutoff(), 64.0, x, x)));
  CHECK(p64.rows[0].sup_abs <= p64.fitted_constant * 64.0 * (1 + 1e-12));
  const double d32 = localized_kernel(s, Mask::cutoff(), 32.0, x, x);
  const double d64 = localized_kernel(s, Mask::cutoff(), 64.0, x, x);
  CHECK(d64 / d32 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("lower bound on the localized kernel near the diagonal") {
  const auto s = circle_space(64);
  const std::vector<double> betas{0.01, 0.5, 10.0};
  const auto res = phin_lower_bound_check(s, 16.0, betas);
  REQUIRE(res.rows.size() == 3);
  CHECK(res.rows[1].ratio > 0.2);
  CHECK(res.rows[2].ratio < 0.1);
  LowerBoundOptions single;
  single.sweep_levels = 1;
  const auto at_m = phin_lower_bound_check(s, 16.0, betas, single);
  CHECK(at_m.rows[0].ratio >= 1.4);
  CHECK(at_m.rows[0].ratio <= 2.5);
  REQUIRE(res.best_beta.has_value());
  CHECK(*res.best_beta == 0.5);
}
