#include "diffquad/rules.hpp"

#include <cmath>
#include <string>

#include "diffquad/error.hpp"
#include "diffquad/rng.hpp"
#include "diffquad/spaces.hpp"

namespace diffquad {

PointMeasure torus_grid(std::size_t count) {
  require(count >= 1, "torus_grid: count must be positive");
  const auto angles = equispaced_circle(count);
  PointMeasure out;
  const double w = 1.0 / static_cast<double>(count * count);
  for (const auto& a : angles)
    for (const auto& b : angles) {
      out.support.push_back(torus_point(a.x[0], b.x[0]));
      out.weights.push_back(w);
    }
  return out;
}

PointMeasure rule_measure(const Space& space, std::string_view rule, double n, std::size_t count,
                          std::uint64_t seed) {
  require(n > 0.0, "rule_measure: n must be positive");
  const std::string_view kind = space.kind();
  const std::size_t grid = count > 0 ? count : static_cast<std::size_t>(std::ceil(n));
  if (rule == "reference") return space.reference_rule();
  if (rule == "random") {
    const std::size_t m = count > 0 ? count : 2 * space.count_below(n);
    Rng rng(seed);
    PointMeasure out;
    for (std::size_t i = 0; i < m; ++i) {
      out.support.push_back(space.random_point(rng));
      out.weights.push_back(1.0 / static_cast<double>(m));
    }
    return out;
  }
  if (rule == "trapezoid" || rule == "product") {
    if (kind == "circle") {
      PointMeasure out;
      out.support = equispaced_circle(grid);
      out.weights.assign(grid, 1.0 / static_cast<double>(grid));
      return out;
    }
    if (kind == "torus") return torus_grid(grid);
    if (kind == "sphere" && rule == "product") return sphere_product_rule(grid, 2 * grid + 1);
  }
  fail(ErrorCode::invalid_argument,
       "rule '" + std::string(rule) + "' is not available on the " + std::string(kind) + " space");
}

}  // namespace diffquad
