#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "diffquad/space.hpp"

namespace diffquad {

// Circle R/2piZ with arc-length metric, normalized arc measure and the
// trigonometric system {1, sqrt2 cos k., sqrt2 sin k.}, lambda = k <= max_index.
SpacePtr circle_space(std::size_t max_index);

// Two-torus with the max of coordinate geodesics as metric; products of
// circle eigenfunctions, lambda = |(k1, k2)| <= max_index.
SpacePtr torus2_space(std::size_t max_index);

// Unit sphere S^2 with geodesic metric, normalized surface measure and real
// spherical harmonics orthonormal for it; lambda = degree <= max_degree.
SpacePtr sphere2_space(std::size_t max_degree);

// Point cloud with eigenvectors orthonormal under weights 1/M.
struct EigenData {
  std::vector<std::vector<double>> points;
  double q = 1.0;
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenvectors;  // one row per eigenfunction
  std::optional<std::vector<double>> distances;  // row-major M x M

  std::size_t point_count() const { return points.size(); }
};

// Max |G - I| for the Gram matrix of the eigenvectors under weights 1/M.
double eigendata_gram_residual(const EigenData& data);

// Validates and wraps EigenData. Gram deviation above 1e-6 or a missing
// constant ground state is rejected-eigendata.
SpacePtr pointcloud_space(EigenData data);

// Dense graph-Laplacian spectrum L = D - W with W_ij = exp(-|xi - xj|^2 /
// bandwidth^2). Eigenvalues are reported as sqrt of the Laplacian eigenvalue.
EigenData dense_laplacian_spectrum(const std::vector<std::vector<double>>& points, double bandwidth,
                                   std::size_t count, double q = 1.0);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

// Equispaced angles 2 pi j / count.
std::vector<Point> equispaced_circle(std::size_t count, double offset = 0.0);

// Gauss-Legendre(n_lat) x equispaced(n_lon) product rule on the sphere,
// normalized to total mass 1.
PointMeasure sphere_product_rule(std::size_t n_lat, std::size_t n_lon);

}  // namespace diffquad
