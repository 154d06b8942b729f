#include "diffquad/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diffquad/error.hpp"
#include "diffquad/parallel.hpp"

namespace diffquad {

double total_variation(const PointMeasure& nu) {
  double s = 0.0;
  for (double w : nu.weights) s += std::abs(w);
  return s;
}

double ball_mass(const Space& space, const PointMeasure& nu, const Point& x, double r, bool signed_mass) {
  require(r >= 0.0, "ball_mass: radius must be nonnegative");
  double s = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (within(space.distance(x, nu.support[i]), r)) s += signed_mass ? nu.weights[i] : std::abs(nu.weights[i]);
  }
  return s;
}

std::size_t default_probe_count(const Space& space) { return 4 * space.spectrum_size(); }

RegularityReport regularity_constant(const Space& space, const PointMeasure& nu, double d,
                                     std::span<const Point> extra_centers, std::size_t probe_count) {
  require(d > 0.0, "regularity_constant: d must be positive");
  const auto grid = space.probe_grid(probe_count == 0 ? default_probe_count(space) : probe_count);
  std::vector<Point> centers = nu.support;
  centers.insert(centers.end(), extra_centers.begin(), extra_centers.end());
  centers.insert(centers.end(), grid.points.begin(), grid.points.end());

  RegularityReport report;
  report.d = d;
  report.center_set_size = centers.size();
  report.probe_spacing = grid.spacing;
  report.per_center.resize(centers.size());
  const double dq = std::pow(d, space.q());
  parallel_for(centers.size(), [&](std::size_t i) {
    report.per_center[i] = ball_mass(space, nu, centers[i], d) / dq;
  });
  for (double v : report.per_center) report.constant = std::max(report.constant, v);
  return report;
}

MeshNormReport mesh_norm(const Space& space, std::span<const Point> nodes, std::size_t probe_count) {
  require(!nodes.empty(), "mesh_norm: node set is empty");
  const auto grid = space.probe_grid(probe_count == 0 ? default_probe_count(space) : probe_count);
  std::vector<double> nearest(grid.points.size());
  parallel_for(grid.points.size(), [&](std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : nodes) best = std::min(best, space.distance(grid.points[i], c));
    nearest[i] = best;
  });
  MeshNormReport report;
  report.value = *std::max_element(nearest.begin(), nearest.end());
  report.probe_spacing = grid.spacing;
  report.probe_count = grid.points.size();
  return report;
}

double min_separation(const Space& space, std::span<const Point> nodes) {
  require(nodes.size() >= 2, "min_separation: need at least two nodes");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) best = std::min(best, space.distance(nodes[i], nodes[j]));
  }
  return best;
}

PointMeasure eta_regular_measure(const Space& space, std::span<const Point> nodes) {
  const double eta = min_separation(space, nodes);
  PointMeasure out;
  out.support.assign(nodes.begin(), nodes.end());
  out.weights.assign(nodes.size(), std::pow(eta, space.q()));
  return out;
}

}  // namespace diffquad
