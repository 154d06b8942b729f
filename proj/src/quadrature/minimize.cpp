#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "diffquad/error.hpp"
#include "diffquad/kernels.hpp"
#include "diffquad/parallel.hpp"
#include "diffquad/quadrature.hpp"
#include "diffquad/simd.hpp"

namespace diffquad {
namespace {

// Euclidean projection onto {w >= 0, sum w = 1}.
void project_simplex(std::span<double> w) {
  std::vector<double> u(w.begin(), w.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  for (double& x : w) x = std::max(0.0, x - theta);
}

void project_orthant(std::span<double> w) {
  for (double& x : w) x = std::max(0.0, x);
}

// w^T A w (+ (sum w - 1)^2 off the simplex) and its gradient, given A w.
struct Objective {
  std::span<const double> gram;
  std::size_t m;
  bool simplex;

  std::vector<double> apply(std::span<const double> w) const {
    std::vector<double> out(m);
    simd::gemv(gram, m, m, w, out);
    return out;
  }
  double value(std::span<const double> w, std::span<const double> aw) const {
    double f = simd::dot(w, aw);
    if (!simplex) {
      const double s = std::accumulate(w.begin(), w.end(), 0.0) - 1.0;
      f += s * s;
    }
    return f;
  }
  std::vector<double> gradient(std::span<const double> w, std::span<const double> aw) const {
    std::vector<double> g(m);
    const double s = simplex ? 0.0 : std::accumulate(w.begin(), w.end(), 0.0) - 1.0;
    for (std::size_t i = 0; i < m; ++i) g[i] = 2.0 * aw[i] + 2.0 * s;
    return g;
  }
};

// Frank-Wolfe gap on the simplex; scaled projected-gradient residual on the orthant.
double optimality_gap(const Objective& obj, std::span<const double> w, std::span<const double> g, double L) {
  if (obj.simplex) {
    return simd::dot(g, w) - *std::min_element(g.begin(), g.end());
  }
  double r = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double step = std::max(0.0, w[i] - g[i] / L);
    r = std::max(r, std::abs(w[i] - step));
  }
  return r * L;
}

struct RunState {
  std::vector<double> w;
  double f = 0.0;
  double gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Monotone FISTA with function-value restart.
RunState accelerated(const Objective& obj, std::vector<double> x, double L, const OptimizerSettings& opt,
                     std::vector<double>& history) {
  const std::size_t m = obj.m;
  auto project = [&](std::span<double> w) { obj.simplex ? project_simplex(w) : project_orthant(w); };
  project(x);
  auto ax = obj.apply(x);
  double fx = obj.value(x, ax);
  auto gx = obj.gradient(x, ax);
  RunState st;
  st.gap = optimality_gap(obj, x, gx, L);
  history.push_back(fx);
  std::vector<double> y = x, ay = ax, z(m);
  double t = 1.0;
  std::size_t it = 0;
  while (st.gap > opt.tolerance && it < opt.max_iterations) {
    ++it;
    const auto gy = obj.gradient(y, ay);
    for (std::size_t i = 0; i < m; ++i) z[i] = y[i] - gy[i] / L;
    project(z);
    const auto az = obj.apply(z);
    const double fz = obj.value(z, az);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (fz <= fx) {
      // y = z + ((t - 1) / t_next)(z - x)
      const double mom = (t - 1.0) / t_next;
      for (std::size_t i = 0; i < m; ++i) {
        y[i] = z[i] + mom * (z[i] - x[i]);
        ay[i] = az[i] + mom * (az[i] - ax[i]);
      }
      x = z;
      ax = az;
      fx = fz;
      t = t_next;
      gx = obj.gradient(x, ax);
      st.gap = optimality_gap(obj, x, gx, L);
    } else {
      // Restart from the kept iterate.
      y = x;
      ay = ax;
      t = 1.0;
    }
    history.push_back(fx);
  }
  st.w = std::move(x);
  st.f = fx;
  st.iterations = it;
  st.converged = st.gap <= opt.tolerance;
  return st;
}

// Away-step Frank-Wolfe with exact line search (simplex only).
RunState away_step_frank_wolfe(const Objective& obj, std::vector<double> x, std::size_t budget, double tolerance,
                               std::vector<double>& history) {
  const std::size_t m = obj.m;
  auto ax = obj.apply(x);
  double fx = obj.value(x, ax);
  RunState st;
  std::size_t it = 0;
  std::vector<double> ad(m);
  for (;;) {
    const auto g = obj.gradient(x, ax);
    const std::size_t s = static_cast<std::size_t>(std::min_element(g.begin(), g.end()) - g.begin());
    std::size_t v = s;
    for (std::size_t i = 0; i < m; ++i) {
      if (x[i] > 0.0 && (v == s || g[i] > g[v])) v = i;
    }
    const double gx = simd::dot(g, x);
    const double gap_fw = gx - g[s];
    const double gap_away = g[v] - gx;
    st.gap = gap_fw;
    if (gap_fw <= tolerance || it >= budget) break;
    ++it;
    const bool toward = gap_fw >= gap_away;
    const std::size_t vertex = toward ? s : v;
    const double sign = toward ? 1.0 : -1.0;  // d = sign * (e_vertex - x)
    const double max_step = toward ? 1.0 : x[v] / std::max(1e-300, 1.0 - x[v]);
    for (std::size_t i = 0; i < m; ++i) ad[i] = sign * (obj.gram[i * m + vertex] - ax[i]);
    const double slope = -(toward ? gap_fw : gap_away);
    double curvature = sign * (ad[vertex] - simd::dot(x, ad));
    double step = curvature > 0.0 ? std::min(max_step, -slope / (2.0 * curvature)) : max_step;
    if (step <= 0.0) break;
    std::vector<double> xn = x;
    for (std::size_t i = 0; i < m; ++i) xn[i] -= sign * step * x[i];
    xn[vertex] += sign * step;
    project_orthant(xn);
    std::vector<double> axn(m);
    if (it % 64 == 0) {
      axn = obj.apply(xn);
    } else {
      for (std::size_t i = 0; i < m; ++i) axn[i] = ax[i] + step * ad[i];
    }
    const double fn = obj.value(xn, axn);
    if (fn > fx) break;  // stalled at rounding level
    x = std::move(xn);
    ax = std::move(axn);
    fx = fn;
    history.push_back(fx);
  }
  st.w = std::move(x);
  st.f = fx;
  st.iterations = it;
  st.converged = st.gap <= tolerance;
  return st;
}

// Solves the stationarity system on the support of st.w exactly. First-order
// runs stall at the rounding floor of the objective while the gap is still
// above tolerance; the face solve closes that gap when the support is right.
void polish_on_face(const Objective& obj, double L, RunState& st, std::vector<double>& history) {
  const std::size_t m = obj.m;
  for (int round = 0; round < 8; ++round) {
    std::vector<std::size_t> face;
    for (std::size_t i = 0; i < m; ++i)
      if (st.w[i] > 0.0) face.push_back(i);
    const auto k = static_cast<Eigen::Index>(face.size());
    if (k == 0) return;
    Eigen::MatrixXd H(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b)
        H(a, b) = obj.gram[face[static_cast<std::size_t>(a)] * m + face[static_cast<std::size_t>(b)]] + (obj.simplex ? 0.0 : 1.0);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
    Eigen::VectorXd sol = H.colPivHouseholderQr().solve(ones);
    if (obj.simplex) sol /= sol.sum();
    if (!sol.allFinite() || sol.minCoeff() < 0.0) return;

    std::vector<double> w(m, 0.0);
    for (Eigen::Index a = 0; a < k; ++a) w[face[static_cast<std::size_t>(a)]] = sol(a);
    const auto aw = obj.apply(w);
    const double f = obj.value(w, aw);
    const auto g = obj.gradient(w, aw);
    const double gap = optimality_gap(obj, w, g, L);
    if (gap >= st.gap || f > st.f + 64.0 * std::numeric_limits<double>::epsilon() * std::abs(st.f)) return;
    st.w = std::move(w);
    st.f = std::min(f, st.f);
    st.gap = gap;
    history.push_back(st.f);
    if (gap <= 0.0) return;
    // A coordinate off the face with the smallest gradient joins it.
    const std::size_t enter = static_cast<std::size_t>(std::min_element(g.begin(), g.end()) - g.begin());
    if (st.w[enter] > 0.0) return;
    st.w[enter] = std::numeric_limits<double>::min();
  }
}

}  // namespace

std::vector<double> discrepancy_gram(const QuadratureProblem& problem) {
  problem.validate();
  const double beta = problem.beta > 0.0 ? problem.beta : default_beta(problem.space->q(), 2.0);
  require(beta > problem.space->q() / 2.0, "minimize_discrepancy: beta must exceed q / 2");
  const auto kernel = KernelHandle::beta_star(problem.space, beta, problem.kernel_tail_tolerance);
  const std::size_t m = problem.nodes.size();
  std::vector<double> gram(m * m);
  parallel_for(m, [&](std::size_t j) {
    kernel.row(problem.nodes[j], problem.nodes, std::span<double>(gram.data() + j * m, m));
  });
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t l = j + 1; l < m; ++l) {
      const double s = 0.5 * (gram[j * m + l] + gram[l * m + j]);
      gram[j * m + l] = gram[l * m + j] = s;
    }
  return gram;
}

MinimizeResult minimize_discrepancy(const QuadratureProblem& problem) {
  require(problem.constraint == WeightConstraint::simplex || problem.constraint == WeightConstraint::nonnegative,
          "minimize_discrepancy: constraint must be simplex or nonnegative");
  const auto gram = discrepancy_gram(problem);
  const std::size_t m = problem.nodes.size();
  const OptimizerSettings& opt = problem.optimizer;
  const Objective obj{gram, m, problem.constraint == WeightConstraint::simplex};

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
      gram.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) fail(ErrorCode::numeric_failure, "minimize_discrepancy: Gram spectrum failed");
  const double top = std::max(0.0, eig.eigenvalues().maxCoeff());
  const double bottom = eig.eigenvalues().minCoeff();
  const double L = std::max(1e-300, 2.0 * top + (obj.simplex ? 0.0 : 2.0 * static_cast<double>(m)));

  std::vector<double> start(m, 1.0 / static_cast<double>(m));
  if (opt.initial) {
    require(opt.initial->size() == m, "minimize_discrepancy: initial point has the wrong length");
    start = *opt.initial;
  }

  MinimizeResult out;
  out.condition = bottom > 0.0 ? top / bottom : kInfinity;
  RunState st = accelerated(obj, start, L, opt, out.history);
  out.method = "accelerated-projected-gradient";
  if (!st.converged) {
    polish_on_face(obj, L, st, out.history);
    st.converged = st.gap <= opt.tolerance;
  }
  if (!st.converged && obj.simplex && out.condition > opt.ill_conditioned) {
    RunState fw = away_step_frank_wolfe(obj, st.w, opt.max_iterations, opt.tolerance, out.history);
    if (fw.f <= st.f) {
      fw.iterations += st.iterations;
      st = std::move(fw);
      out.method = "away-step-frank-wolfe";
    }
  }
  out.measure.support = problem.nodes;
  out.measure.weights = std::move(st.w);
  out.objective = st.f;
  out.discrepancy = std::sqrt(std::max(0.0, st.f));
  out.gap = st.gap;
  out.iterations = st.iterations;
  out.converged = st.converged;
  return out;
}

}  // namespace diffquad
