#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diffquad/rng.hpp"
#include "diffquad/types.hpp"

namespace diffquad {

// One stored eigenpair. `label` is a human-readable tag such as "cos3" or
// "Y(2,-1)"; evaluation goes through Space::eigenfunction.
struct SpectrumEntry {
  std::size_t index = 0;
  double lambda = 0.0;
  std::string label;
};

struct ProbeGrid {
  std::vector<Point> points;
  // Upper bound on the distance from any point of the space to the grid.
  double spacing = 0.0;
};

// A spectral space: quasi-metric, dimension exponent q, reference
// measure mu* (carried as an exact quadrature rule), and an orthonormal
// eigensystem with lambda_0 = 0, phi_0 = 1, sorted by eigenvalue.
//
// Immutable after construction; all members are safe for concurrent reads.
class Space {
 public:
  virtual ~Space() = default;

  virtual std::string_view kind() const = 0;
  double q() const { return q_; }

  virtual double distance(const Point& a, const Point& b) const = 0;
  virtual double diameter() const = 0;

  std::size_t spectrum_size() const { return entries_.size(); }
  const std::vector<SpectrumEntry>& spectrum() const { return entries_; }
  const std::vector<double>& eigenvalues() const { return lambdas_; }

  // Every eigenvalue strictly below this bound is stored.
  double spectral_bound() const { return spectral_bound_; }

  // Number of stored entries with lambda < bound (entries are sorted).
  std::size_t count_below(double bound) const;

  // Writes phi_0(x) .. phi_{out.size()-1}(x).
  virtual void basis(const Point& x, std::span<double> out) const = 0;
  std::vector<double> basis(const Point& x, std::size_t count) const;
  double eigenfunction(std::size_t k, const Point& x) const;

  // Rule for mu* that integrates every product phi_j phi_k of stored
  // entries exactly (up to rounding).
  const PointMeasure& reference_rule() const { return reference_; }

  // sum_k coeff[k] phi_k(x) phi_k(y). coeff must be a function of lambda
  // (equal across entries sharing an eigenvalue); model spaces use this to
  // take addition-theorem shortcuts.
  virtual double kernel_sum(const Point& x, const Point& y, std::span<const double> coeff) const;

  // Generic per-entry evaluation of kernel_sum; kept as a cross-check for
  // the shortcuts.
  double kernel_sum_by_basis(const Point& x, const Point& y, std::span<const double> coeff) const;

  // Upper bound on sup_x sum_{lambda_j < N} phi_j(x)^2.
  virtual double christoffel_bound(double N) const = 0;

  // Certified bound on sup_{x,y} |sum over unstored entries of m(lambda)
  // phi(x) phi(y)| for a nonnegative nonincreasing multiplier m. Returns
  // +inf when no finite bound can be certified.
  virtual double tail_bound(const std::function<double(double)>& m) const;

  // mu*(B(x, r)) for the closed ball.
  virtual double ball_measure(const Point& x, double r) const = 0;

  // Quasi-uniform set of roughly `count` points covering the space.
  virtual ProbeGrid probe_grid(std::size_t count) const = 0;

  // Points at distance exactly r from `center` (as many as the geometry
  // allows, at most about `count`).
  virtual std::vector<Point> shell(const Point& center, double r, std::size_t count) const = 0;

  virtual Point random_point(Rng& rng) const = 0;

  // Coordinate representation used by the file formats.
  virtual std::vector<double> coordinates(const Point& p) const = 0;
  virtual Point point_from_coordinates(std::span<const double> c) const = 0;

 protected:
  Space(double q, std::vector<SpectrumEntry> entries, double spectral_bound);
  void set_reference_rule(PointMeasure rule) { reference_ = std::move(rule); }

 private:
  double q_;
  std::vector<SpectrumEntry> entries_;
  std::vector<double> lambdas_;
  double spectral_bound_;
  PointMeasure reference_;
};

using SpacePtr = std::shared_ptr<const Space>;

// Relative slack applied to closed-ball membership so that points at
// distance r up to rounding are counted.
inline constexpr double kBallSlack = 1e-12;

inline bool within(double dist, double r) { return dist <= r * (1.0 + kBallSlack) + 1e-15; }

// Candidates with rho(center, .) <= r.
std::vector<Point> ball_points(const Space& space, const Point& center, double r,
                               std::span<const Point> candidates);

}  // namespace diffquad
