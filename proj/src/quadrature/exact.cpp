#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "diffquad/error.hpp"
#include "diffquad/parallel.hpp"
#include "diffquad/quadrature.hpp"

namespace diffquad {

std::string_view to_string(WeightConstraint c) {
  switch (c) {
    case WeightConstraint::free: return "free";
    case WeightConstraint::nonnegative: return "nonnegative";
    case WeightConstraint::simplex: return "simplex";
    case WeightConstraint::equal: return "equal";
  }
  return "free";
}

WeightConstraint parse_constraint(std::string_view name) {
  for (auto c : {WeightConstraint::free, WeightConstraint::nonnegative, WeightConstraint::simplex,
                 WeightConstraint::equal}) {
    if (name == to_string(c)) return c;
  }
  fail(ErrorCode::invalid_argument, "unknown weight constraint '" + std::string(name) + "'");
}

void QuadratureProblem::validate() const {
  require(space != nullptr, "quadrature problem needs a space");
  require(!nodes.empty(), "quadrature problem needs at least one node");
  require(order > 0.0, "quadrature order must be positive");
  if (order > space->spectral_bound()) {
    fail(ErrorCode::spectrum_exhausted, "quadrature order exceeds the stored spectrum");
  }
  require(beta >= 0.0, "beta must be nonnegative (0 selects the default)");
}

double default_beta(double q, double p) { return (std::isinf(p) ? 0.0 : q / p) + 1.5; }

std::vector<double> basis_at_nodes(const Space& space, std::span<const Point> nodes, std::size_t count) {
  std::vector<double> out(nodes.size() * count);
  parallel_for(nodes.size(), [&](std::size_t j) {
    space.basis(nodes[j], std::span<double>(out.data() + j * count, count));
  });
  return out;
}

std::vector<double> moment_residuals(const Space& space, const PointMeasure& nu, double order) {
  const std::size_t K = space.count_below(order);
  const auto table = basis_at_nodes(space, nu.support, K);
  std::vector<double> r(K, 0.0);
  for (std::size_t j = 0; j < nu.size(); ++j) {
    for (std::size_t k = 0; k < K; ++k) r[k] += nu.weights[j] * table[j * K + k];
  }
  if (K > 0) r[0] -= 1.0;
  return r;
}

std::vector<double> nnls(std::span<const double> A, std::size_t rows, std::size_t cols, std::span<const double> b,
                         std::size_t max_iterations) {
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  require(A.size() == rows * cols && b.size() == rows, "nnls: dimension mismatch");
  const Eigen::Map<const Mat> a(A.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(rows));
  if (max_iterations == 0) max_iterations = 3 * cols + 10;

  const Eigen::Index n = static_cast<Eigen::Index>(cols);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(cols, false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * a.cwiseAbs().colwise().sum().maxCoeff() *
                     static_cast<double>(std::max(rows, cols));

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j) if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(idx[c]);
    const Eigen::VectorXd s = sub.completeOrthogonalDecomposition().solve(rhs);
    z.setZero(n);
    for (std::size_t c = 0; c < idx.size(); ++c) z(idx[c]) = s(static_cast<Eigen::Index>(c));
  };

  Eigen::VectorXd w = a.transpose() * (rhs - a * x);
  for (std::size_t outer = 0; outer < max_iterations; ++outer) {
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    Eigen::VectorXd z;
    for (std::size_t inner = 0; inner <= cols; ++inner) {
      solve_passive(z);
      bool positive = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) positive = false;
      }
      if (positive) break;
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x(j) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
    }
    x = z.cwiseMax(0.0);
    w = a.transpose() * (rhs - a * x);
  }
  return {x.data(), x.data() + n};
}

ExactResult exact_weights(const QuadratureProblem& problem) {
  problem.validate();
  const Space& space = *problem.space;
  const std::size_t K = space.count_below(problem.order);
  const std::size_t M = problem.nodes.size();
  const auto table = basis_at_nodes(space, problem.nodes, K);  // M x K

  ExactResult out;
  out.measure.support = problem.nodes;
  std::vector<double>& w = out.measure.weights;

  switch (problem.constraint) {
    case WeightConstraint::free: {
      Eigen::MatrixXd phi(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(M));
      for (std::size_t j = 0; j < M; ++j)
        for (std::size_t k = 0; k < K; ++k) phi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = table[j * K + k];
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K));
      rhs(0) = 1.0;
      const Eigen::VectorXd sol = phi.completeOrthogonalDecomposition().solve(rhs);
      w.assign(sol.data(), sol.data() + sol.size());
      break;
    }
    case WeightConstraint::nonnegative:
    case WeightConstraint::simplex: {
      // The sum constraint is moment 0; the simplex variant weights it up.
      const double lead = problem.constraint == WeightConstraint::simplex ? 1e3 : 1.0;
      std::vector<double> a(K * M);
      for (std::size_t j = 0; j < M; ++j)
        for (std::size_t k = 0; k < K; ++k) a[k * M + j] = table[j * K + k] * (k == 0 ? lead : 1.0);
      std::vector<double> rhs(K, 0.0);
      rhs[0] = lead;
      w = nnls(a, K, M, rhs);
      break;
    }
    case WeightConstraint::equal:
      w.assign(M, 1.0 / static_cast<double>(M));
      break;
  }

  out.residuals.assign(K, 0.0);
  for (std::size_t j = 0; j < M; ++j)
    for (std::size_t k = 0; k < K; ++k) out.residuals[k] += w[j] * table[j * K + k];
  out.residuals[0] -= 1.0;
  double s = 0.0;
  for (double r : out.residuals) s += r * r;
  out.residual = std::sqrt(s);
  out.certified = out.residual <= kExactTolerance;
  out.infeasible = !out.certified && problem.constraint != WeightConstraint::free;
  return out;
}

}  // namespace diffquad
