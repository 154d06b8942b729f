#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "diffquad/space.hpp"

namespace diffquad {

// Fixed C-infinity cutoff: 1 on [0, 1/2], 0 on [1, inf), even, strictly
// decreasing on (1/2, 1). The transition is the normalized running integral
// of the bump u -> exp(-1/(u(1-u))) rescaled to [1/2, 1].
double cutoff_h(double t);

enum class MaskKind { cutoff_h, band_g, band_gtilde, beta, custom };

// Scalar spectral profile evaluated at lambda / N (or at lambda for beta).
class Mask {
 public:
  static Mask cutoff();
  static Mask band_g();       // h(t) - h(2t)
  static Mask band_gtilde();  // h(t/2) - h(4t); equals 1 on supp(g)
  static Mask type_beta(double beta);  // (1 + |t|)^-beta
  static Mask custom(std::function<double(double)> fn, double support_end,
                     std::optional<unsigned> smoothness = std::nullopt);

  double operator()(double t) const;

  MaskKind kind() const { return kind_; }
  double beta() const { return beta_; }
  // Right end of the support on [0, inf); +inf when not compactly supported.
  double support_end() const { return support_end_; }
  bool compact() const { return support_end_ < std::numeric_limits<double>::infinity(); }
  // Continuous derivatives; nullopt means unbounded.
  std::optional<unsigned> smoothness() const { return smoothness_; }

 private:
  Mask(MaskKind kind, double beta, double support_end, std::optional<unsigned> smoothness,
       std::function<double(double)> fn);

  MaskKind kind_;
  double beta_ = 0.0;
  double support_end_;
  std::optional<unsigned> smoothness_;
  std::function<double(double)> fn_;
};

// A kernel sum_k m(lambda_k) phi_k(x) phi_k(y) over the stored spectrum,
// with a certified bound on the discarded tail.
class KernelHandle {
 public:
  // Phi_N(H; x, y) = sum H(lambda / N) phi(x) phi(y). Compact H only: the
  // sum is exact, and spectrum-exhausted is raised if lambda < N * supp(H)
  // is not fully stored.
  static KernelHandle localized(SpacePtr space, const Mask& H, double N);
  // K_t = sum exp(-lambda^2 t) phi(x) phi(y), t in (0, 1].
  static KernelHandle heat(SpacePtr space, double t, double tail_tolerance);
  // G(b; x, y) with b(lambda) = (1 + lambda)^-beta, k = 0 term included.
  static KernelHandle beta(SpacePtr space, double beta, double tail_tolerance);
  // G*(x, y) = sum_{k >= 1} b(lambda_k)^2 phi(x) phi(y).
  static KernelHandle beta_star(SpacePtr space, double beta, double tail_tolerance);

  double operator()(const Point& x, const Point& y) const;
  // out[i] = K(x, ys[i])
  void row(const Point& x, std::span<const Point> ys, std::span<double> out) const;
  std::vector<double> row(const Point& x, std::span<const Point> ys) const;

  const Space& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::span<const double> coefficients() const { return coeff_; }
  double tail_bound() const { return tail_; }

  // Kernel from explicit per-entry coefficients and a known tail bound.
  static KernelHandle from_parts(SpacePtr space, std::vector<double> coeff, double tail);

 private:
  KernelHandle(SpacePtr space, std::vector<double> coeff, double tail);

  SpacePtr space_;
  std::vector<double> coeff_;
  double tail_ = 0.0;
};

double localized_kernel(const SpacePtr& space, const Mask& H, double N, const Point& x, const Point& y);
double heat_kernel(const SpacePtr& space, double t, const Point& x, const Point& y,
                   double tail_tolerance = 1e-10);
double beta_kernel(const SpacePtr& space, double beta, const Point& x, const Point& y,
                   double tail_tolerance = 1e-8);
double beta_kernel_star(const SpacePtr& space, double beta, const Point& x, const Point& y,
                        double tail_tolerance = 1e-8);

// sum_{lambda_j < N} phi_j(x)^2 (strict inequality).
double christoffel(const Space& space, double N, const Point& x);

struct ProfileRow {
  double r = 0.0;
  double sup_abs = 0.0;
  double bound = 0.0;
};

struct LocalizationProfile {
  std::vector<ProfileRow> rows;
  double fitted_exponent = 0.0;  // log-log slope of sup_abs over the fit window
  double fitted_constant = 0.0;  // smallest c with sup_abs <= c N^q / max(1, (N r)^S)
  double order = 8.0;            // S used in the bound column
  std::size_t fit_points = 0;
};

struct ProfileOptions {
  std::size_t shell_points = 64;   // angular samples per shell
  std::size_t annulus_steps = 16;  // shells per annulus [r_i, r_{i+1})
  double order = 8.0;
  double fit_min_nr = 4.0;  // fit window r in [fit_min_nr / N, fit_max_r]
  double fit_max_r = 1.0;
};

// For each radius r_i, the sup of |Phi_N(H; center, y)| over the annulus
// r_i <= rho < r_{i+1} (last annulus: [r, 1.1 r]); r = 0 gives Phi_N(x, x).
LocalizationProfile localization_profile(const SpacePtr& space, const Mask& H, double N,
                                         const Point& center, std::span<const double> radii,
                                         const ProfileOptions& options = {});

struct LowerBoundRow {
  double beta = 0.0;
  double ratio = 0.0;  // min over sweep, centers and ball of |Phi_m(x, y)| / m^q
};

struct PhiLowerBound {
  std::vector<LowerBoundRow> rows;
  std::optional<double> best_beta;  // largest beta with ratio >= floor
  double ratio_at_best = 0.0;
  std::vector<double> sweep;        // orders m, m/2, ... actually probed
};

struct LowerBoundOptions {
  double floor = 0.1;
  std::size_t sweep_levels = 4;
  std::size_t centers = 4;
  std::size_t radial_steps = 32;
  std::size_t shell_points = 32;
};

PhiLowerBound phin_lower_bound_check(const SpacePtr& space, double m, std::span<const double> beta_search,
                                     const LowerBoundOptions& options = {});

// Least-squares slope of log(y) against log(x) over pairs with y > 0.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace diffquad
