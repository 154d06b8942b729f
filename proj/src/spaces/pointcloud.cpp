#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "diffquad/error.hpp"
#include "diffquad/simd.hpp"
#include "diffquad/spaces.hpp"

namespace diffquad {
namespace {

constexpr double kGramTolerance = 1e-6;

std::vector<SpectrumEntry> cloud_entries(const std::vector<double>& lambdas) {
  std::vector<SpectrumEntry> out;
  for (std::size_t k = 0; k < lambdas.size(); ++k) out.push_back({k, lambdas[k], "v" + std::to_string(k)});
  return out;
}

double cloud_bound(const EigenData& d) {
  // A full eigenbasis leaves nothing unstored.
  if (d.eigenvalues.size() == d.point_count()) return std::numeric_limits<double>::infinity();
  return d.eigenvalues.back();
}

class PointCloudSpace final : public Space {
 public:
  explicit PointCloudSpace(EigenData data)
      : Space(data.q, cloud_entries(data.eigenvalues), cloud_bound(data)), data_(std::move(data)) {
    const std::size_t M = data_.point_count();
    const std::size_t K = data_.eigenvalues.size();
    by_point_.resize(M * K);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < M; ++i) by_point_[i * K + k] = data_.eigenvectors[k][i];
    }
    residual_mass_.resize(M);
    for (std::size_t i = 0; i < M; ++i) {
      std::span<const double> row(by_point_.data() + i * K, K);
      residual_mass_[i] = std::max(0.0, static_cast<double>(M) - simd::dot(row, row));
    }
    PointMeasure rule;
    for (std::size_t i = 0; i < M; ++i) {
      rule.support.push_back(cloud_point(static_cast<std::int64_t>(i)));
      rule.weights.push_back(1.0 / static_cast<double>(M));
    }
    set_reference_rule(std::move(rule));
    if (data_.distances) {
      diameter_ = *std::max_element(data_.distances->begin(), data_.distances->end());
    } else {
      diameter_ = 0.0;
      for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = i + 1; j < M; ++j) diameter_ = std::max(diameter_, euclid(i, j));
      }
    }
  }

  std::string_view kind() const override { return "cloud"; }

  double distance(const Point& a, const Point& b) const override {
    const auto i = checked(a);
    const auto j = checked(b);
    if (data_.distances) return (*data_.distances)[i * data_.point_count() + j];
    return euclid(i, j);
  }
  double diameter() const override { return diameter_; }

  void basis(const Point& x, std::span<double> out) const override {
    require(out.size() <= spectrum_size(), "basis request exceeds stored spectrum");
    const auto i = checked(x);
    const double* row = by_point_.data() + i * spectrum_size();
    std::copy(row, row + out.size(), out.begin());
  }

  double kernel_sum(const Point& x, const Point& y, std::span<const double> coeff) const override {
    const std::size_t n = std::min(coeff.size(), spectrum_size());
    const std::size_t K = spectrum_size();
    return simd::weighted_dot(coeff.first(n), {by_point_.data() + checked(x) * K, n},
                              {by_point_.data() + checked(y) * K, n});
  }

  double christoffel_bound(double) const override { return static_cast<double>(data_.point_count()); }

  double tail_bound(const std::function<double(double)>& m) const override {
    // Completeness under weights 1/M: sum over all eigenvectors of phi(x)^2 is
    // M, so the unstored remainder at x is residual_mass_[x]. Unstored
    // eigenvalues are >= the last stored one and m is nonincreasing.
    if (!std::isfinite(spectral_bound())) return 0.0;
    const double rest = *std::max_element(residual_mass_.begin(), residual_mass_.end());
    return m(eigenvalues().back()) * rest;
  }

  double ball_measure(const Point& x, double r) const override {
    std::size_t count = 0;
    for (std::size_t j = 0; j < data_.point_count(); ++j) {
      if (within(distance(x, cloud_point(static_cast<std::int64_t>(j))), r)) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(data_.point_count());
  }

  ProbeGrid probe_grid(std::size_t) const override {
    // The space is the cloud itself, so probing every point is exact.
    return {reference_rule().support, 0.0};
  }

  std::vector<Point> shell(const Point& c, double r, std::size_t) const override {
    std::vector<Point> out;
    const double tol = 0.05 * r;
    for (std::size_t j = 0; j < data_.point_count(); ++j) {
      const auto p = cloud_point(static_cast<std::int64_t>(j));
      if (std::abs(distance(c, p) - r) <= tol) out.push_back(p);
    }
    return out;
  }

  Point random_point(Rng& rng) const override {
    return cloud_point(static_cast<std::int64_t>(rng.below(data_.point_count())));
  }

  std::vector<double> coordinates(const Point& p) const override {
    const auto i = checked(p);
    if (!data_.points[i].empty()) return data_.points[i];
    return {static_cast<double>(i)};
  }

  Point point_from_coordinates(std::span<const double> c) const override {
    if (data_.points.front().empty()) {
      // Clouds without coordinates are addressed by index.
      require(c.size() == 1 && c[0] >= 0.0 && c[0] == std::floor(c[0]) &&
                  c[0] < static_cast<double>(data_.point_count()),
              "expected a cloud point index");
      return cloud_point(static_cast<std::int64_t>(c[0]));
    }
    for (std::size_t i = 0; i < data_.point_count(); ++i) {
      const auto& p = data_.points[i];
      if (p.size() != c.size()) continue;
      bool same = true;
      for (std::size_t d = 0; d < c.size() && same; ++d) same = std::abs(p[d] - c[d]) <= 1e-9 * (1.0 + std::abs(p[d]));
      if (same) return cloud_point(static_cast<std::int64_t>(i));
    }
    fail(ErrorCode::invalid_argument, "coordinates do not match any cloud point");
  }

 private:
  std::size_t checked(const Point& p) const {
    require(p.index >= 0 && static_cast<std::size_t>(p.index) < data_.point_count(),
            "point is not a member of this cloud");
    return static_cast<std::size_t>(p.index);
  }

  double euclid(std::size_t i, std::size_t j) const {
    const auto& a = data_.points[i];
    const auto& b = data_.points[j];
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
    return std::sqrt(s);
  }

  EigenData data_;
  std::vector<double> by_point_;  // M x K, point-major
  std::vector<double> residual_mass_;
  double diameter_ = 0.0;
};

}  // namespace

double eigendata_gram_residual(const EigenData& data) {
  const std::size_t M = data.point_count();
  const std::size_t K = data.eigenvectors.size();
  double worst = 0.0;
  for (std::size_t j = 0; j < K; ++j) {
    for (std::size_t k = j; k < K; ++k) {
      const double g = simd::dot(data.eigenvectors[j], data.eigenvectors[k]) / static_cast<double>(M);
      worst = std::max(worst, std::abs(g - (j == k ? 1.0 : 0.0)));
    }
  }
  return worst;
}

SpacePtr pointcloud_space(EigenData data) {
  const std::size_t M = data.point_count();
  require(M >= 1, "pointcloud_space: empty cloud");
  require(data.q > 0.0, "pointcloud_space: q must be positive");
  require(!data.eigenvalues.empty(), "pointcloud_space: no eigenvalues");
  if (data.eigenvectors.size() != data.eigenvalues.size()) {
    fail(ErrorCode::rejected_eigendata, "eigenvector count differs from eigenvalue count");
  }
  for (const auto& v : data.eigenvectors) {
    if (v.size() != M) fail(ErrorCode::rejected_eigendata, "eigenvector length differs from point count");
  }
  if (data.distances) {
    if (data.distances->size() != M * M) fail(ErrorCode::invalid_argument, "distance table must have M^2 entries");
  } else {
    const std::size_t dim = data.points.front().size();
    require(dim > 0, "point coordinates required when no distance table is given");
    for (const auto& p : data.points) require(p.size() == dim, "points have inconsistent dimension");
  }
  for (std::size_t k = 1; k < data.eigenvalues.size(); ++k) {
    if (data.eigenvalues[k] < data.eigenvalues[k - 1]) {
      fail(ErrorCode::rejected_eigendata, "eigenvalues must be nondecreasing");
    }
  }
  if (std::abs(data.eigenvalues[0]) > 1e-8) fail(ErrorCode::rejected_eigendata, "first eigenvalue must be 0");
  auto& ground = data.eigenvectors[0];
  const double sign = ground[0] < 0.0 ? -1.0 : 1.0;
  for (auto& v : ground) {
    v *= sign;
    if (std::abs(v - 1.0) > kGramTolerance) {
      fail(ErrorCode::rejected_eigendata, "first eigenvector must be constant");
    }
  }
  const double residual = eigendata_gram_residual(data);
  if (residual > kGramTolerance) {
    fail(ErrorCode::rejected_eigendata, "Gram residual " + std::to_string(residual) + " exceeds 1e-6");
  }
  return std::make_shared<PointCloudSpace>(std::move(data));
}

}  // namespace diffquad
