#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "socolab/environment.hpp"
#include "socolab/policy.hpp"

namespace socolab {

// Normalized rank-1 quadratic measurements: observations y'_k approximate
// (1/2) z_k' A z_k, and noise_budget is the worst-case l1 error
// eta_bar * m / gamma^2 available to the recovery program.
struct MeasurementSet {
  std::vector<Vector> probes;  // z_1..z_m
  Vector observations;         // y'_1..y'_m
  double gamma_sq = 1.0;
  double noise_budget = 0.0;

  int count() const { return static_cast<int>(probes.size()); }
  void validate() const;
};

struct ProbeCollection {
  MeasurementSet measurements;
  Trajectory exploration;  // true costs incurred during rounds 1..m
};

// x_t = v_t + gamma * z_t for t = 1..m, starting from x_0 = 0.
ProbeCollection collect_probes(const CostModel& model,
                               const MinimizerPath& path, int m,
                               double gamma_sq, double eta_bar,
                               std::mt19937_64& rng);
// Deterministic core taking pre-drawn probe directions and unit noise.
ProbeCollection collect_probes_with(const CostModel& model,
                                    const MinimizerPath& path, int m,
                                    double gamma_sq, double eta_bar,
                                    const std::vector<Vector>& z,
                                    const std::vector<double>& unit_noise);

struct RecoveryResult {
  Matrix estimate;        // PSD
  double residual_l1 = 0.0;
  double trace = 0.0;
  int solver_iterations = 0;
  bool converged = false;
};

struct TraceMinOptions {
  int max_iterations = 50000;
  double primal_tolerance = 1e-6;
  std::string trace_csv_path;  // optional per-iteration dump
};

class RecoveryInfeasibleError : public std::runtime_error {
 public:
  RecoveryInfeasibleError(double minimal_residual, double budget);
  double minimal_residual;
  double budget;
};

// min tr(M) s.t. M >= 0 and ||y' - A(M)||_1 <= noise_budget, solved by an
// ADMM splitting that alternates a PSD-cone projection with an l1-ball
// residual projection.  Falls back to a penalized minimum-residual solve when
// the feasible set is numerically thin; throws RecoveryInfeasibleError when
// even the minimal achievable residual exceeds the budget.
RecoveryResult trace_min_recover(const MeasurementSet& ms,
                                 const TraceMinOptions& options = {});

// psd_project(estimate - xi * (<estimate, u u'> - y) * u u')
Matrix pgd_update(const Matrix& estimate, const Vector& u, double y,
                  double xi);

struct RecoveryErrorReport {
  double nuclear_gap = 0.0;
  double frobenius_gap = 0.0;
  double operator_gap = 0.0;
  Vector eigenvalue_gaps;          // lambda_i(estimate) - lambda_i(A)
  double weyl_violation = 0.0;     // max(0, max_i |gap_i| - operator_gap)
  double subspace_distance = 0.0;  // leading-r eigenvectors, sign-aligned
  std::optional<double> sin_theta_bound;  // sqrt(2) eps / (sigma_min - eps)
};

RecoveryErrorReport recovery_error(const Matrix& estimate,
                                   const CostModel& model);

}  // namespace socolab
