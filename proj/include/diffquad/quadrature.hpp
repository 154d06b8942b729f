#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "diffquad/operators.hpp"
#include "diffquad/space.hpp"

namespace diffquad {

enum class WeightConstraint { free, nonnegative, simplex, equal };

std::string_view to_string(WeightConstraint c);
WeightConstraint parse_constraint(std::string_view name);

struct OptimizerSettings {
  std::size_t max_iterations = 100000;
  double tolerance = 1e-10;  // Frank-Wolfe gap (simplex) or projected-gradient residual
  // Frank-Wolfe takes over from the accelerated method when the Gram
  // matrix condition number exceeds this and the accelerated run stalls.
  double ill_conditioned = 1e10;
  std::optional<std::vector<double>> initial;  // default: barycenter
};

struct QuadratureProblem {
  SpacePtr space;
  std::vector<Point> nodes;
  double order = 1.0;  // target class Pi_order (entries with lambda < order)
  WeightConstraint constraint = WeightConstraint::free;
  double beta = 0.0;  // 0 selects default_beta(q, 2)
  double kernel_tail_tolerance = 1e-8;
  OptimizerSettings optimizer;

  void validate() const;
};

// q / p + 1.5.
double default_beta(double q, double p);

// Row-major (nodes x count) table of phi_k(node).
std::vector<double> basis_at_nodes(const Space& space, std::span<const Point> nodes, std::size_t count);

// sum_j w_j phi_k(x_j) - delta_{k0} for every entry with lambda < order.
std::vector<double> moment_residuals(const Space& space, const PointMeasure& nu, double order);

struct ExactResult {
  PointMeasure measure;
  std::vector<double> residuals;  // per eigen-index
  double residual = 0.0;          // Euclidean norm of `residuals`
  bool certified = false;         // residual <= kExactTolerance
  bool infeasible = false;        // constrained solve missed the tolerance
};

inline constexpr double kExactTolerance = 1e-10;

ExactResult exact_weights(const QuadratureProblem& problem);

// Nonnegative least squares min ||A w - b|| s.t. w >= 0 (Lawson-Hanson).
// A is row-major rows x cols.
std::vector<double> nnls(std::span<const double> A, std::size_t rows, std::size_t cols, std::span<const double> b,
                         std::size_t max_iterations = 0);

struct DiscrepancyValue {
  double value = 0.0;  // over the stored spectrum
  double tail = 0.0;   // certified bound on |true - value| contributed by unstored entries
};

// M_p(nu) with G(b), b(lambda) = (1 + lambda)^-beta; p in {1, 2, inf}.
DiscrepancyValue discrepancy_detail(const Space& space, const PointMeasure& nu, double beta, double p);
double discrepancy(const Space& space, const PointMeasure& nu, double beta, double p);
// p = 2 evaluated through the reference-rule L^2 norm of the potential
// difference instead of the coefficient formula.
double discrepancy_reference_l2(const Space& space, const PointMeasure& nu, double beta);

// |P^(0) - sum_j w_j P(x_j)|.
double poly_quad_error(const Space& space, const PointMeasure& nu, const SpectralFunction& P);

struct MinimizeResult {
  PointMeasure measure;
  double objective = 0.0;    // w^T A w (+ b(0)^2 (sum w - 1)^2 off the simplex) = M_2^2
  double discrepancy = 0.0;  // sqrt(objective)
  double gap = 0.0;          // final optimality certificate
  std::size_t iterations = 0;
  bool converged = false;    // false: best iterate, flagged suboptimal
  std::string method;
  std::vector<double> history;  // objective per iteration, nonincreasing
  double condition = 0.0;
};

// Gram matrix G*(x_j, x_l), row-major.
std::vector<double> discrepancy_gram(const QuadratureProblem& problem);

MinimizeResult minimize_discrepancy(const QuadratureProblem& problem);

struct WorstCaseError {
  double value = 0.0;
  std::vector<double> samples;  // per trial, normalized error
  bool empty = false;           // trials == 0
  double degree = 0.0;          // random polynomials drawn from Pi_degree
};

// Randomized lower estimate of sup |int P dmu* - int P dnu| over
// ||P||_{H_gamma^p} = 1, P in Pi_{degree_factor * n}.
WorstCaseError worst_case_error(const Space& space, const PointMeasure& nu, double gamma, double p, double n,
                                std::size_t trials, std::uint64_t seed, double degree_factor = 1.0);

struct OrderedMeasure {
  double n = 0.0;
  PointMeasure measure;
};

struct OrderRecord {
  double n = 0.0;
  double total_variation = 0.0;
  double regularity_constant = 0.0;  // at d = 1 / n
  double wce = 0.0;
  double scaled_wce = 0.0;  // n^gamma * wce
  double max_exactness_residual = 0.0;
};

struct ClassVerdict {
  bool bounded_variation = false;   // sup_n |nu_n|(X) bounded
  bool uniform_regularity = false;  // sup_n |||nu_n|||_{R,1/n} bounded
  bool error_decay = false;         // n^gamma WCE(nu_n) bounded
  double A = 0.0;                   // max_n n^gamma WCE
  bool pass = false;
};

struct CoveringRow {
  double c1 = 0.0;
  double min_scaled_mass = 0.0;  // min over centers of |nu|(B(x, c1 / n^(1/p~))) n^(q/p~)
};

struct CoveringReport {
  double n = 0.0;
  double p_tilde = 0.0;
  double floor = 0.0;
  std::vector<CoveringRow> rows;
  std::optional<double> c1;  // smallest ladder value meeting the floor
  std::size_t centers = 0;
  bool pass = false;
};

struct QuadReport {
  double gamma = 0.0;
  double p = 0.0;
  std::vector<OrderRecord> orders;
  std::vector<double> exactness_residuals;  // last measure, per eigen-index
  double total_variation = 0.0;             // sup over the sequence
  double regularity_constant = 0.0;         // sup over the sequence, at d = 1 / n
  std::optional<double> discrepancy;
  double discrepancy_tail = 0.0;
  std::vector<std::pair<double, double>> wce_samples;  // (n, wce)
  std::optional<double> fitted_gamma;                  // -slope of log wce against log n
  std::vector<CoveringReport> covering;
  ClassVerdict verdict;
  std::string regime;
  bool wce_is_lower_estimate = true;
  double degree_factor = 1.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

struct ClassOptions {
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  double degree_factor = 1.0;
  double exact_floor = 1e-9;       // scaled errors below this count as zero
  double growth_slope_max = 0.25;  // log-log growth tolerated as "bounded"
  std::size_t probe_count = 0;
};

QuadReport verify_approx_class(const Space& space, std::span<const OrderedMeasure> sequence, double gamma, double p,
                               const ClassOptions& options = {});

struct CoveringOptions {
  std::vector<double> ladder{1.0, 2.0, 4.0, 8.0};
  double floor = 0.5;
  std::size_t probe_count = 0;  // 0: max(default_probe_count, 8 |supp nu|)
};

// p~ = 1 + q / (gamma p'), p' the conjugate exponent.
double covering_exponent(double q, double gamma, double p);

CoveringReport covering_check(const Space& space, const PointMeasure& nu, double n, double gamma, double p,
                              const CoveringOptions& options = {});

// Smallest ladder value passing at every order of the sequence.
std::optional<double> covering_constant(std::span<const CoveringReport> reports);

// sup over pairs lambda_j, lambda_k < N of ||phi_j phi_k - Proj_{lambda < A N}(phi_j phi_k)||_inf.
double product_defect(const Space& space, double A, double N);

struct PositivityReport {
  double n = 0.0;
  double exponent = 0.0;          // q / p
  double max_scaled_mass = 0.0;   // max_x nu(B(x, 1/n)) n^(q/p)
  double regularity_constant = 0.0;
  double total_variation = 0.0;
  double bound = 4.0;
  bool within_bound = false;
};

PositivityReport positivity_regularity_check(const Space& space, const PointMeasure& nu, double n, double p,
                                             double bound = 4.0, std::size_t probe_count = 0);

struct PositivitySequence {
  std::vector<PositivityReport> reports;
  double growth_slope = 0.0;
  bool flagged = false;  // bound exceeded or unbounded growth
};

PositivitySequence positivity_regularity_sequence(const Space& space, std::span<const OrderedMeasure> sequence,
                                                  double p, double bound = 4.0);

struct SweepRow {
  double n = 0.0;
  double wce = 0.0;
  double tv = 0.0;
  double reg_const = 0.0;
  double discrepancy = 0.0;
};

struct Sweep {
  std::vector<SweepRow> rows;
  QuadReport report;
  double slope = 0.0;
};

Sweep wce_sweep(const Space& space, std::span<const OrderedMeasure> sequence, double gamma, double p, double beta,
                const ClassOptions& options);

}  // namespace diffquad
