#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace diffquad {

// A point of a model or point-cloud space. Continuum spaces use `x`
// (circle: angle; torus: two angles; sphere: unit vector). Point-cloud
// spaces identify points by `index` into the cloud.
struct Point {
  std::array<double, 3> x{};
  std::int64_t index = -1;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point angle_point(double theta) { return Point{{theta, 0.0, 0.0}, -1}; }
inline Point torus_point(double a, double b) { return Point{{a, b, 0.0}, -1}; }
inline Point sphere_point(double x, double y, double z) { return Point{{x, y, z}, -1}; }
inline Point cloud_point(std::int64_t i) { return Point{{}, i}; }

// Finitely supported signed measure: mass weights[i] at support[i].
struct PointMeasure {
  std::vector<Point> support;
  std::vector<double> weights;

  std::size_t size() const { return support.size(); }
};

}  // namespace diffquad
