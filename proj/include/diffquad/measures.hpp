#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "diffquad/space.hpp"
#include "diffquad/types.hpp"

namespace diffquad {

double total_variation(const PointMeasure& nu);

// nu(B(x, r)) over the closed ball; |nu| unless signed_mass is set.
double ball_mass(const Space& space, const PointMeasure& nu, const Point& x, double r, bool signed_mass = false);

// Probe count used when a caller passes 0: four times the stored spectrum size.
std::size_t default_probe_count(const Space& space);

struct RegularityReport {
  double d = 0.0;
  // max over probed centers of |nu|(B(x, d)) / d^q. A lower estimate of the
  // regularity constant, whose definition takes the sup over the whole space.
  double constant = 0.0;
  std::size_t center_set_size = 0;
  double probe_spacing = 0.0;
  std::vector<double> per_center;  // ball mass / d^q, same order as the centers probed
};

// Centers are the support of nu, then extra_centers, then a probe grid.
RegularityReport regularity_constant(const Space& space, const PointMeasure& nu, double d,
                                     std::span<const Point> extra_centers = {}, std::size_t probe_count = 0);

struct MeshNormReport {
  double value = 0.0;  // max over probes of the distance to the nearest node
  double probe_spacing = 0.0;
  std::size_t probe_count = 0;
};

// Mesh norm (fill distance). The true value lies in [value, value + probe_spacing].
MeshNormReport mesh_norm(const Space& space, std::span<const Point> nodes, std::size_t probe_count = 0);

// Exact minimal pairwise distance (brute force).
double min_separation(const Space& space, std::span<const Point> nodes);

// Mass eta(C)^q at every node.
PointMeasure eta_regular_measure(const Space& space, std::span<const Point> nodes);

}  // namespace diffquad
