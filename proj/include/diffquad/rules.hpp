#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "diffquad/space.hpp"

namespace diffquad {

// Named node/weight generators used to build measure sequences.
//   trapezoid  circle: `count` equispaced nodes; torus: count x count grid
//   product    sphere: Gauss-Legendre(count) x equispaced(2 count + 1);
//              circle and torus: same as trapezoid
//   random     `count` points drawn from the space, equal weights
//   reference  the space's own reference rule
// count = 0 selects n (rounded up) for grid rules and 2 dim Pi_n for random.
PointMeasure rule_measure(const Space& space, std::string_view rule, double n, std::size_t count = 0,
                          std::uint64_t seed = 0);

// Equispaced count x count grid on the torus with equal weights.
PointMeasure torus_grid(std::size_t count);

}  // namespace diffquad
