#include "diffquad/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "diffquad/error.hpp"
#include "diffquad/parallel.hpp"
#include "diffquad/simd.hpp"
#include "diffquad/spaces.hpp"

namespace diffquad {
namespace {

double bump(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return std::exp(-1.0 / (u * (1.0 - u)));
}

// Running integral of the bump on [0, s], s in [0, 1]: cumulative values at
// 1024 panel ends plus one 16-point Gauss-Legendre panel for the remainder.
class BumpIntegral {
 public:
  BumpIntegral() {
    gauss_legendre(16, nodes_, weights_);
    cumulative_[0] = 0.0;
    for (std::size_t i = 0; i < kPanels; ++i) {
      cumulative_[i + 1] = cumulative_[i] + panel(static_cast<double>(i) / kPanels,
                                                  static_cast<double>(i + 1) / kPanels);
    }
  }

  double operator()(double s) const {
    s = std::clamp(s, 0.0, 1.0);
    const auto i = std::min<std::size_t>(kPanels - 1, static_cast<std::size_t>(s * kPanels));
    return cumulative_[i] + panel(static_cast<double>(i) / kPanels, s);
  }

  double total() const { return cumulative_[kPanels]; }

 private:
  static constexpr std::size_t kPanels = 1024;

  double panel(double a, double b) const {
    if (b <= a) return 0.0;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) s += weights_[k] * bump(mid + half * nodes_[k]);
    return s * half;
  }

  std::vector<double> nodes_, weights_;
  std::array<double, kPanels + 1> cumulative_{};
};

const BumpIntegral& bump_integral() {
  static const BumpIntegral integral;
  return integral;
}

double beta_mask(double beta, double t) { return std::pow(1.0 + std::abs(t), -beta); }

}  // namespace

double cutoff_h(double t) {
  const double a = std::abs(t);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  const auto& I = bump_integral();
  const double s = 2.0 * a - 1.0;
  // The bump is symmetric about 1/2; integrate the short side to keep
  // relative accuracy where h is tiny.
  if (s >= 0.5) return I(1.0 - s) / I.total();
  return 1.0 - I(s) / I.total();
}

Mask::Mask(MaskKind kind, double beta, double support_end, std::optional<unsigned> smoothness,
           std::function<double(double)> fn)
    : kind_(kind), beta_(beta), support_end_(support_end), smoothness_(smoothness), fn_(std::move(fn)) {}

Mask Mask::cutoff() { return Mask(MaskKind::cutoff_h, 0.0, 1.0, std::nullopt, nullptr); }
Mask Mask::band_g() { return Mask(MaskKind::band_g, 0.0, 1.0, std::nullopt, nullptr); }
Mask Mask::band_gtilde() { return Mask(MaskKind::band_gtilde, 0.0, 2.0, std::nullopt, nullptr); }

Mask Mask::type_beta(double beta) {
  require(beta > 0.0, "type-beta mask needs beta > 0");
  // |t| makes the even extension only continuous at 0.
  return Mask(MaskKind::beta, beta, std::numeric_limits<double>::infinity(), 0u, nullptr);
}

Mask Mask::custom(std::function<double(double)> fn, double support_end, std::optional<unsigned> smoothness) {
  require(static_cast<bool>(fn), "custom mask needs an evaluator");
  require(support_end > 0.0, "custom mask support must be positive");
  return Mask(MaskKind::custom, 0.0, support_end, smoothness, std::move(fn));
}

double Mask::operator()(double t) const {
  switch (kind_) {
    case MaskKind::cutoff_h: return cutoff_h(t);
    case MaskKind::band_g: return cutoff_h(t) - cutoff_h(2.0 * t);
    case MaskKind::band_gtilde: return cutoff_h(0.5 * t) - cutoff_h(4.0 * t);
    case MaskKind::beta: return beta_mask(beta_, t);
    case MaskKind::custom: return fn_(t);
  }
  return 0.0;
}

KernelHandle::KernelHandle(SpacePtr space, std::vector<double> coeff, double tail)
    : space_(std::move(space)), coeff_(std::move(coeff)), tail_(tail) {}

KernelHandle KernelHandle::localized(SpacePtr space, const Mask& H, double N) {
  require(N > 0.0, "localized kernel: N must be positive");
  require(H.compact(), "localized kernel: mask must be compactly supported");
  const double reach = N * H.support_end();
  if (reach > space->spectral_bound()) {
    fail(ErrorCode::spectrum_exhausted, "localized kernel needs every eigenvalue below " +
                                            std::to_string(reach) + "; stored bound is " +
                                            std::to_string(space->spectral_bound()));
  }
  const std::size_t n = space->count_below(reach);
  std::vector<double> coeff(n);
  const auto& lam = space->eigenvalues();
  for (std::size_t k = 0; k < n; ++k) coeff[k] = H(lam[k] / N);
  return KernelHandle(std::move(space), std::move(coeff), 0.0);
}

namespace {

KernelHandle certified(SpacePtr space, const std::function<double(double)>& m, bool skip_ground,
                       double tail_tolerance, const char* what) {
  require(tail_tolerance > 0.0, "tail tolerance must be positive");
  const double tail = space->tail_bound(m);
  if (!(tail <= tail_tolerance)) {
    fail(ErrorCode::spectrum_exhausted, std::string(what) + ": certified tail bound " + std::to_string(tail) +
                                            " exceeds tolerance " + std::to_string(tail_tolerance));
  }
  const auto& lam = space->eigenvalues();
  std::vector<double> coeff(lam.size());
  for (std::size_t k = 0; k < lam.size(); ++k) coeff[k] = m(lam[k]);
  if (skip_ground && !coeff.empty()) coeff[0] = 0.0;
  return KernelHandle::from_parts(std::move(space), std::move(coeff), tail);
}

}  // namespace

KernelHandle KernelHandle::heat(SpacePtr space, double t, double tail_tolerance) {
  require(t > 0.0 && t <= 1.0, "heat kernel: t must lie in (0, 1]");
  return certified(std::move(space), [t](double l) { return std::exp(-l * l * t); }, false, tail_tolerance,
                   "heat kernel");
}

KernelHandle KernelHandle::beta(SpacePtr space, double beta, double tail_tolerance) {
  require(beta > 0.0, "beta kernel: beta must be positive");
  return certified(std::move(space), [beta](double l) { return beta_mask(beta, l); }, false, tail_tolerance,
                   "beta kernel");
}

KernelHandle KernelHandle::beta_star(SpacePtr space, double beta, double tail_tolerance) {
  require(beta > 0.0, "beta kernel: beta must be positive");
  return certified(std::move(space), [beta](double l) { return beta_mask(2.0 * beta, l); }, true,
                   tail_tolerance, "G* kernel");
}

KernelHandle KernelHandle::from_parts(SpacePtr space, std::vector<double> coeff, double tail) {
  return KernelHandle(std::move(space), std::move(coeff), tail);
}

double KernelHandle::operator()(const Point& x, const Point& y) const {
  return space_->kernel_sum(x, y, coeff_);
}

void KernelHandle::row(const Point& x, std::span<const Point> ys, std::span<double> out) const {
  require(out.size() == ys.size(), "kernel row: output size mismatch");
  for (std::size_t i = 0; i < ys.size(); ++i) out[i] = space_->kernel_sum(x, ys[i], coeff_);
}

std::vector<double> KernelHandle::row(const Point& x, std::span<const Point> ys) const {
  std::vector<double> out(ys.size());
  row(x, ys, out);
  return out;
}

double localized_kernel(const SpacePtr& space, const Mask& H, double N, const Point& x, const Point& y) {
  return KernelHandle::localized(space, H, N)(x, y);
}

double heat_kernel(const SpacePtr& space, double t, const Point& x, const Point& y, double tail_tolerance) {
  return KernelHandle::heat(space, t, tail_tolerance)(x, y);
}

double beta_kernel(const SpacePtr& space, double beta, const Point& x, const Point& y, double tail_tolerance) {
  return KernelHandle::beta(space, beta, tail_tolerance)(x, y);
}

double beta_kernel_star(const SpacePtr& space, double beta, const Point& x, const Point& y,
                        double tail_tolerance) {
  return KernelHandle::beta_star(space, beta, tail_tolerance)(x, y);
}

double christoffel(const Space& space, double N, const Point& x) {
  require(N > 0.0, "christoffel: N must be positive");
  if (N > space.spectral_bound()) {
    fail(ErrorCode::spectrum_exhausted, "christoffel: N exceeds stored spectral bound");
  }
  const auto b = space.basis(x, space.count_below(N));
  return simd::dot(b, b);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double nd = static_cast<double>(n);
  const double den = nd * sxx - sx * sx;
  if (den == 0.0) return 0.0;
  return (nd * sxy - sx * sy) / den;
}

LocalizationProfile localization_profile(const SpacePtr& space, const Mask& H, double N, const Point& center,
                                         std::span<const double> radii, const ProfileOptions& options) {
  for (double r : radii) require(r >= 0.0, "localization_profile: radii must be nonnegative");
  const auto kernel = KernelHandle::localized(space, H, N);
  std::vector<double> sorted(radii.begin(), radii.end());
  std::sort(sorted.begin(), sorted.end());

  LocalizationProfile out;
  out.order = options.order;
  out.rows.resize(sorted.size());
  parallel_for(sorted.size(), [&](std::size_t i) {
    const double r = sorted[i];
    double sup = 0.0;
    if (r == 0.0) {
      sup = std::abs(kernel(center, center));
    } else {
      const double hi = i + 1 < sorted.size() ? sorted[i + 1] : 1.1 * r;
      const std::size_t steps = std::max<std::size_t>(1, options.annulus_steps);
      for (std::size_t s = 0; s < steps; ++s) {
        const double rad = r + (hi - r) * static_cast<double>(s) / static_cast<double>(steps);
        for (const auto& y : space->shell(center, rad, options.shell_points)) {
          sup = std::max(sup, std::abs(kernel(center, y)));
        }
      }
    }
    out.rows[i].r = r;
    out.rows[i].sup_abs = sup;
  });

  const double nq = std::pow(N, space->q());
  double c = 0.0;
  std::vector<double> fx, fy;
  for (const auto& row : out.rows) {
    c = std::max(c, row.sup_abs * std::max(1.0, std::pow(N * row.r, options.order)) / nq);
    if (row.r >= options.fit_min_nr / N && row.r <= options.fit_max_r) {
      fx.push_back(row.r);
      fy.push_back(row.sup_abs);
    }
  }
  for (auto& row : out.rows) row.bound = c * nq / std::max(1.0, std::pow(N * row.r, options.order));
  out.fitted_constant = c;
  out.fitted_exponent = loglog_slope(fx, fy);
  out.fit_points = fx.size();
  return out;
}

PhiLowerBound phin_lower_bound_check(const SpacePtr& space, double m, std::span<const double> beta_search,
                                     const LowerBoundOptions& options) {
  require(m > 0.0, "phin_lower_bound_check: m must be positive");
  PhiLowerBound out;
  for (std::size_t i = 0; i < options.sweep_levels; ++i) {
    const double level = m / std::ldexp(1.0, static_cast<int>(i));
    if (level < 1.0) break;
    out.sweep.push_back(level);
  }
  require(!out.sweep.empty(), "phin_lower_bound_check: m must be >= 1");

  auto grid = space->probe_grid(options.centers);
  std::vector<Point> centers(grid.points.begin(),
                             grid.points.begin() + static_cast<std::ptrdiff_t>(std::min(options.centers, grid.points.size())));

  std::vector<KernelHandle> kernels;
  for (double level : out.sweep) kernels.push_back(KernelHandle::localized(space, Mask::cutoff(), level));

  out.rows.resize(beta_search.size());
  parallel_for(beta_search.size(), [&](std::size_t b) {
    const double beta = beta_search[b];
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t li = 0; li < out.sweep.size(); ++li) {
      const double level = out.sweep[li];
      const double radius = beta / level;
      const double nq = std::pow(level, space->q());
      for (const auto& x : centers) {
        for (std::size_t s = 0; s <= options.radial_steps; ++s) {
          const double rad = radius * static_cast<double>(s) / static_cast<double>(options.radial_steps);
          for (const auto& y : space->shell(x, rad, options.shell_points)) {
            worst = std::min(worst, std::abs(kernels[li](x, y)) / nq);
          }
        }
      }
    }
    out.rows[b] = {beta, worst};
  });
  for (const auto& row : out.rows) {
    if (row.ratio >= options.floor && (!out.best_beta || row.beta > *out.best_beta)) {
      out.best_beta = row.beta;
      out.ratio_at_best = row.ratio;
    }
  }
  return out;
}

}  // namespace diffquad
