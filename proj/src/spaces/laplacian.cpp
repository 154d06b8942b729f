#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "diffquad/error.hpp"
#include "diffquad/spaces.hpp"

namespace diffquad {

EigenData dense_laplacian_spectrum(const std::vector<std::vector<double>>& points, double bandwidth,
                                   std::size_t count, double q) {
  const std::size_t M = points.size();
  require(bandwidth > 0.0, "dense_laplacian_spectrum: bandwidth must be positive");
  require(count >= 2, "dense_laplacian_spectrum: count must be >= 2");
  require(count <= M, "dense_laplacian_spectrum: count exceeds number of points");
  require(M <= 2000, "dense_laplacian_spectrum: more than 2000 points; supply precomputed eigendata");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) require(p.size() == dim && dim > 0, "points must share a positive dimension");

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
  const double inv_h2 = 1.0 / (bandwidth * bandwidth);
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = i + 1; j < M; ++j) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < dim; ++d) d2 += (points[i][d] - points[j][d]) * (points[i][d] - points[j][d]);
      if (d2 == 0.0) {
        fail(ErrorCode::numeric_failure, "degenerate affinity: points " + std::to_string(i) + " and " +
                                             std::to_string(j) + " coincide");
      }
      const double w = std::exp(-d2 * inv_h2);
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      L(a, b) = -w;
      L(b, a) = -w;
      L(a, a) += w;
      L(b, b) += w;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L);
  if (solver.info() != Eigen::Success) fail(ErrorCode::numeric_failure, "symmetric eigensolver did not converge");

  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  const double scale = std::sqrt(static_cast<double>(M));
  const double tiny = 1e-10 * std::max(1.0, L.diagonal().maxCoeff());

  EigenData out;
  out.points = points;
  out.q = q;
  for (std::size_t k = 0; k < count; ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    std::vector<double> v(M);
    if (k == 0 && values(0) <= tiny) {
      // Row sums vanish, so the constant vector is an exact null vector.
      std::fill(v.begin(), v.end(), 1.0);
      out.eigenvalues.push_back(0.0);
      out.eigenvectors.push_back(std::move(v));
      continue;
    }
    Eigen::Index pivot = 0;
    vectors.col(col).cwiseAbs().maxCoeff(&pivot);
    const double sign = vectors(pivot, col) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < M; ++i) v[i] = sign * scale * vectors(static_cast<Eigen::Index>(i), col);
    out.eigenvalues.push_back(std::sqrt(std::max(0.0, values(col))));
    out.eigenvectors.push_back(std::move(v));
  }
  return out;
}

}  // namespace diffquad
