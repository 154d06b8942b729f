#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "diffquad/error.hpp"
#include "diffquad/rng.hpp"
#include "diffquad/spaces.hpp"
#include "oracles.hpp"

using namespace diffquad;
using oracle::pi;

namespace {

std::size_t entry_with_label(const Space& s, const std::string& label) {
  for (const auto& e : s.spectrum()) {
    if (e.label == label) return e.index;
  }
  FAIL("label not found: " << label);
  return 0;
}

double gram_residual(const Space& s, std::size_t count) {
  const auto& rule = s.reference_rule();
  std::vector<double> g(count * count, 0.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto b = s.basis(rule.support[i], count);
    for (std::size_t j = 0; j < count; ++j)
      for (std::size_t k = 0; k < count; ++k) g[j * count + k] += rule.weights[i] * b[j] * b[k];
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t k = 0; k < count; ++k) worst = std::max(worst, std::abs(g[j * count + k] - (j == k ? 1.0 : 0.0)));
  return worst;
}

// 64 equispaced circle samples with the discrete trigonometric basis.
EigenData discrete_fourier(std::size_t M, std::size_t max_k) {
  EigenData d;
  d.q = 1.0;
  for (std::size_t j = 0; j < M; ++j) d.points.push_back({2.0 * pi * static_cast<double>(j) / static_cast<double>(M)});
  d.eigenvalues.push_back(0.0);
  d.eigenvectors.push_back(std::vector<double>(M, 1.0));
  for (std::size_t k = 1; k <= max_k; ++k) {
    std::vector<double> c(M), s(M);
    for (std::size_t j = 0; j < M; ++j) {
      c[j] = std::sqrt(2.0) * std::cos(static_cast<double>(k) * d.points[j][0]);
      s[j] = std::sqrt(2.0) * std::sin(static_cast<double>(k) * d.points[j][0]);
    }
    d.eigenvalues.push_back(static_cast<double>(k));
    d.eigenvectors.push_back(c);
    d.eigenvalues.push_back(static_cast<double>(k));
    d.eigenvectors.push_back(s);
  }
  // Geodesic distances so the cloud metric matches the circle.
  std::vector<double> dist(M * M);
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j) dist[i * M + j] = oracle::arc(d.points[i][0], d.points[j][0]);
  d.distances = dist;
  return d;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("circle space") {
  const auto s = circle_space(16);
  CHECK(s->q() == 1.0);
  CHECK(s->distance(angle_point(0.0), angle_point(pi)) == doctest::Approx(pi).epsilon(1e-15));
  CHECK(s->eigenfunction(entry_with_label(*s, "cos1"), angle_point(0.0)) == doctest::Approx(std::sqrt(2.0)));
  const auto& rule = s->reference_rule();
  double c2 = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) c2 += rule.weights[i] * std::pow(std::cos(rule.support[i].x[0]), 2);
  CHECK(c2 == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rule.size() >= 4 * 16);
  CHECK(code_of([] { circle_space(0); }) == ErrorCode::invalid_argument);
  CHECK(gram_residual(*s, s->spectrum_size()) <= 1e-8);
  // Basis against closed forms at random angles.
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const double th = rng.uniform(0.0, 2.0 * pi);
    const auto b = s->basis(angle_point(th), s->spectrum_size());
    for (std::size_t k = 1; k <= 16; ++k) {
      CHECK(b[2 * k - 1] == doctest::Approx(std::sqrt(2.0) * std::cos(static_cast<double>(k) * th)).epsilon(1e-12));
      CHECK(b[2 * k] == doctest::Approx(std::sqrt(2.0) * std::sin(static_cast<double>(k) * th)).epsilon(1e-12));
    }
  }
}

TEST_CASE("torus space") {
  const auto s = torus2_space(6);
  CHECK(s->q() == 2.0);
  const auto idx = entry_with_label(*s, "cos3xcos4");
  CHECK(s->eigenvalues()[idx] == doctest::Approx(5.0));
  CHECK(s->eigenfunction(idx, torus_point(0.3, 1.1)) ==
        doctest::Approx(2.0 * std::cos(0.9) * std::cos(4.4)).epsilon(1e-12));
  // Orthonormality through lambda < 4 on an independent 48 x 48 grid.
  const std::size_t count = s->count_below(4.0);
  const std::size_t G = 48;
  std::vector<double> gram(count * count, 0.0);
  for (std::size_t a = 0; a < G; ++a)
    for (std::size_t b = 0; b < G; ++b) {
      const auto v = s->basis(torus_point(2 * pi * a / G, 2 * pi * b / G), count);
      for (std::size_t j = 0; j < count; ++j)
        for (std::size_t k = 0; k < count; ++k) gram[j * count + k] += v[j] * v[k] / (G * G);
    }
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t k = 0; k < count; ++k) CHECK(gram[j * count + k] == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
  Rng rng(9);
  for (int t = 0; t < 10; ++t) CHECK(s->eigenfunction(0, s->random_point(rng)) == 1.0);
  CHECK(code_of([] { torus2_space(0); }) == ErrorCode::invalid_argument);
  CHECK(gram_residual(*s, s->spectrum_size()) <= 1e-8);
}

TEST_CASE("sphere space") {
  const auto s = sphere2_space(8);
  CHECK(s->q() == 2.0);
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const auto x = s->random_point(rng);
    const auto b = s->basis(x, s->spectrum_size());
    double sum3 = 0.0;
    for (std::size_t k = 9; k < 16; ++k) sum3 += b[k] * b[k];  // degree 3 block
    CHECK(sum3 == doctest::Approx(7.0).epsilon(1e-12));
  }
  const auto& rule = s->reference_rule();
  for (std::size_t k = 1; k < s->spectrum_size(); ++k) {
    double integral = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) integral += rule.weights[i] * s->eigenfunction(k, rule.support[i]);
    CHECK(std::abs(integral) <= 1e-12);
  }
  CHECK(s->distance(sphere_point(0, 0, 1), sphere_point(1, 0, 0)) == doctest::Approx(pi / 2));
  CHECK(code_of([] { sphere2_space(0); }) == ErrorCode::invalid_argument);
  CHECK(gram_residual(*s, s->spectrum_size()) <= 1e-8);

  // Addition theorem against an independent Legendre evaluation.
  for (int t = 0; t < 10; ++t) {
    const auto x = s->random_point(rng), y = s->random_point(rng);
    const double c = x.x[0] * y.x[0] + x.x[1] * y.x[1] + x.x[2] * y.x[2];
    const auto bx = s->basis(x, s->spectrum_size()), by = s->basis(y, s->spectrum_size());
    for (int l = 0; l <= 8; ++l) {
      double sum = 0.0;
      for (int k = l * l; k < (l + 1) * (l + 1); ++k) sum += bx[k] * by[k];
      CHECK(sum == doctest::Approx((2 * l + 1) * oracle::legendre(l, c)).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("model metrics satisfy the triangle inequality and two-sided ball growth") {
  for (const auto& s : {circle_space(4), torus2_space(4), sphere2_space(4)}) {
    CAPTURE(s->kind());
    Rng rng(17);
    for (int t = 0; t < 1000; ++t) {
      const auto x = s->random_point(rng), y = s->random_point(rng), z = s->random_point(rng);
      CHECK(s->distance(x, y) <= s->distance(x, z) + s->distance(z, y) + 1e-12);
      CHECK(s->distance(x, y) == doctest::Approx(s->distance(y, x)).epsilon(1e-15));
      CHECK(s->distance(x, x) <= 1e-7);
    }
    double lo = 1e300, hi = 0.0;
    for (int t = 0; t < 100; ++t) {
      const auto x = s->random_point(rng);
      for (double r = 0.05; r <= 1.0; r += 0.05) {
        const double ratio = s->ball_measure(x, r) / std::pow(r, s->q());
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }
    CHECK(lo > 0.05);
    CHECK(hi < 2.0);
  }
}

TEST_CASE("point cloud ingestion") {
  const auto data = discrete_fourier(64, 8);
  CHECK(eigendata_gram_residual(data) <= 1e-10);
  const auto cloud = pointcloud_space(data);
  const auto circle = circle_space(8);
  for (std::size_t j = 0; j < 64; ++j) {
    const auto bc = cloud->basis(cloud_point(static_cast<std::int64_t>(j)), cloud->spectrum_size());
    const auto bm = circle->basis(angle_point(data.points[j][0]), circle->spectrum_size());
    for (std::size_t k = 0; k < bc.size(); ++k) CHECK(bc[k] == doctest::Approx(bm[k]).epsilon(1e-8).scale(1.0));
  }
  CHECK(cloud->distance(cloud_point(0), cloud_point(32)) == doctest::Approx(pi));

  auto bad = data;
  bad.eigenvectors[3][5] += 1e-3 * 64;  // Gram residual ~ 1e-3
  CHECK(code_of([&] { pointcloud_space(bad); }) == ErrorCode::rejected_eigendata);

  auto no_coords = data;
  no_coords.distances.reset();
  for (auto& p : no_coords.points) p.clear();
  CHECK(code_of([&] { pointcloud_space(no_coords); }) == ErrorCode::invalid_argument);

  auto nonconstant = data;
  nonconstant.eigenvalues[0] = 0.5;
  CHECK(code_of([&] { pointcloud_space(nonconstant); }) == ErrorCode::rejected_eigendata);
}

TEST_CASE("dense Laplacian spectrum") {
  const auto tiny = dense_laplacian_spectrum({{0.0}, {1.0}, {2.5}}, 1.0, 2);
  CHECK(std::abs(tiny.eigenvalues[0]) <= 1e-10);
  CHECK(code_of([] { dense_laplacian_spectrum({{0.0}, {0.0}, {1.0}}, 1.0, 2); }) == ErrorCode::numeric_failure);
  CHECK(code_of([] { dense_laplacian_spectrum({{0.0}, {1.0}}, 1.0, 3); }) == ErrorCode::invalid_argument);

  std::vector<std::vector<double>> pts;
  for (int j = 0; j < 128; ++j) {
    const double t = 2 * pi * j / 128.0;
    pts.push_back({std::cos(t), std::sin(t)});
  }
  const auto d = dense_laplacian_spectrum(pts, 0.15, 9);
  const double ladder[] = {0, 1, 1, 2, 2, 3, 3, 4, 4};
  for (int k = 1; k < 9; ++k) CHECK(d.eigenvalues[k] / d.eigenvalues[1] == doctest::Approx(ladder[k]).epsilon(0.10));
  CHECK(eigendata_gram_residual(d) <= 1e-8);
}

TEST_CASE("closed balls") {
  const auto s = circle_space(4);
  const auto nodes = equispaced_circle(8);
  CHECK(ball_points(*s, nodes[2], 0.0, nodes).size() == 1);
  CHECK(ball_points(*s, angle_point(0.0), pi, nodes).size() == 8);
  CHECK(ball_points(*s, nodes[0], 2 * pi / 8, nodes).size() == 3);
}

TEST_CASE("spectral bookkeeping") {
  const auto s = circle_space(10);
  CHECK(s->spectral_bound() == 11.0);
  CHECK(s->count_below(4.0) == 7);
  CHECK(s->count_below(4.5) == 9);
  const auto& lam = s->eigenvalues();
  CHECK(std::is_sorted(lam.begin(), lam.end()));
  const auto sp = sphere2_space(5);
  CHECK(sp->count_below(3.0) == 9);
}
