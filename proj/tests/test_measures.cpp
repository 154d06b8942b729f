#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "diffquad/error.hpp"
#include "diffquad/measures.hpp"
#include "diffquad/rng.hpp"
#include "diffquad/spaces.hpp"
#include "oracles.hpp"

using namespace diffquad;
using oracle::pi;

namespace {

PointMeasure uniform(std::vector<Point> pts) {
  PointMeasure nu;
  nu.weights.assign(pts.size(), 1.0 / static_cast<double>(pts.size()));
  nu.support = std::move(pts);
  return nu;
}

PointMeasure random_measure(const Space& s, Rng& rng, std::size_t m) {
  PointMeasure nu;
  for (std::size_t i = 0; i < m; ++i) {
    nu.support.push_back(s.random_point(rng));
    nu.weights.push_back(rng.uniform(-1.0, 1.0));
  }
  return nu;
}

}  // namespace

TEST_CASE("total variation") {
  CHECK(total_variation({{angle_point(0), angle_point(1), angle_point(2)}, {0.5, -0.25, 0.25}}) == 1.0);
  CHECK(total_variation({}) == 0.0);
  CHECK(total_variation(uniform(equispaced_circle(8))) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("ball mass") {
  const auto s = circle_space(8);
  const auto nu = uniform(equispaced_circle(8));
  CHECK(ball_mass(*s, nu, angle_point(0.1), 0.0) == 0.0);
  CHECK(ball_mass(*s, nu, nu.support[0], 2 * pi / 8) == doctest::Approx(3.0 / 8.0));
  CHECK(ball_mass(*s, nu, angle_point(0.3), s->diameter()) == doctest::Approx(1.0));
  // Monotone in r for the absolute measure.
  Rng rng(1);
  const auto rnd = random_measure(*s, rng, 40);
  double prev = 0.0;
  for (double r = 0.0; r <= pi; r += 0.01) {
    const double m = ball_mass(*s, rnd, angle_point(1.0), r);
    CHECK(m >= prev);
    prev = m;
  }
  // Signed mass against brute force.
  double brute = 0.0;
  for (std::size_t i = 0; i < rnd.size(); ++i)
    if (oracle::arc(rnd.support[i].x[0], 1.0) <= 0.7) brute += rnd.weights[i];
  CHECK(ball_mass(*s, rnd, angle_point(1.0), 0.7, true) == doctest::Approx(brute).epsilon(1e-14));
}

TEST_CASE("regularity constant") {
  const auto s = circle_space(8);
  const auto nu = uniform(equispaced_circle(8));
  const auto rep = regularity_constant(*s, nu, 2 * pi / 8);
  CHECK(rep.constant == doctest::Approx(3.0 / (2.0 * pi)).epsilon(1e-12));
  CHECK(rep.center_set_size >= 8);
  const double max_center = *std::max_element(rep.per_center.begin(), rep.per_center.end());
  CHECK(rep.constant >= max_center);

  PointMeasure point{{angle_point(0.5)}, {1.0}};
  CHECK(regularity_constant(*s, point, 0.01).constant == doctest::Approx(100.0));

  for (const auto& sp : {circle_space(8), torus2_space(4), sphere2_space(4)}) {
    for (double d : {0.1, 0.3, 1.0}) CHECK(regularity_constant(*sp, sp->reference_rule(), d).constant < 3.0);
  }
}

TEST_CASE("regularity rescaling and ball growth") {
  const auto s = circle_space(16);
  Rng rng(21);
  double c1 = 0.0;
  for (int t = 0; t < 20; ++t) {
    auto nu = random_measure(*s, rng, 30);
    const double d = 0.2;
    const double base = regularity_constant(*s, nu, d).constant;
    for (double alpha : {0.25, 0.5, 2.0, 4.0}) {
      const double scaled = regularity_constant(*s, nu, alpha * d).constant;
      c1 = std::max(c1, scaled / ((1.0 + 1.0 / alpha) * base));
    }
    for (double r : {0.05, 0.3, 1.0}) {
      for (const auto& x : s->probe_grid(32).points) {
        CHECK(ball_mass(*s, nu, x, r) <= 2.0 * base * (r + d) * (1 + 1e-12));
      }
    }
  }
  CHECK(c1 <= 2.0);  // one fitted constant serves all 20 measures
}

TEST_CASE("mesh norm and separation") {
  const auto s = circle_space(64);
  auto nodes = equispaced_circle(8);
  auto m8 = mesh_norm(*s, nodes);
  CHECK(m8.value <= pi / 8 + 1e-12);
  CHECK(m8.value + m8.probe_spacing >= pi / 8);
  const auto single = mesh_norm(*s, std::vector<Point>{angle_point(0.0)});
  CHECK(single.value <= pi);
  CHECK(single.value + single.probe_spacing >= pi);
  auto dense = nodes;
  for (const auto& p : equispaced_circle(8, pi / 8)) dense.push_back(p);
  const auto m16 = mesh_norm(*s, dense);
  CHECK(m16.value <= pi / 16 + 1e-12);
  CHECK(m16.value + m16.probe_spacing >= pi / 16);
  CHECK(m16.value <= m8.value);
  CHECK_THROWS_AS(mesh_norm(*s, std::vector<Point>{}), Error);

  CHECK(min_separation(*s, nodes) == doctest::Approx(2 * pi / 8));
  CHECK(min_separation(*s, dense) <= min_separation(*s, nodes));
  auto dup = nodes;
  dup.push_back(nodes[3]);
  CHECK(min_separation(*s, dup) == 0.0);
  CHECK_THROWS_AS(min_separation(*s, std::vector<Point>{angle_point(0)}), Error);

  Rng rng(6);
  std::vector<Point> rnd;
  for (int i = 0; i < 100; ++i) rnd.push_back(s->random_point(rng));
  double brute = 1e300;
  for (std::size_t i = 0; i < rnd.size(); ++i)
    for (std::size_t j = i + 1; j < rnd.size(); ++j) brute = std::min(brute, oracle::arc(rnd[i].x[0], rnd[j].x[0]));
  CHECK(min_separation(*s, rnd) == doctest::Approx(brute).epsilon(1e-14));
  auto shuffled = rnd;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(min_separation(*s, shuffled) == min_separation(*s, rnd));
  CHECK(mesh_norm(*s, shuffled).value == mesh_norm(*s, rnd).value);
}

TEST_CASE("eta-regular measure") {
  const auto s = circle_space(8);
  const auto nodes = equispaced_circle(8);
  const auto nu = eta_regular_measure(*s, nodes);
  for (double w : nu.weights) CHECK(w == doctest::Approx(2 * pi / 8));
  CHECK(total_variation(nu) == doctest::Approx(8 * 2 * pi / 8));
  for (const auto& sp : {circle_space(8), sphere2_space(4)}) {
    Rng rng(3);
    std::vector<Point> pts;
    for (int i = 0; i < 40; ++i) pts.push_back(sp->random_point(rng));
    const auto eta = min_separation(*sp, pts);
    CHECK(regularity_constant(*sp, eta_regular_measure(*sp, pts), eta).constant <= 4.0);
  }
}
