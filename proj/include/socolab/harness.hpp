#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "socolab/agents.hpp"
#include "socolab/stats.hpp"

namespace socolab {

// Environment generator: one cost matrix per experiment (drawn from the
// master seed), fresh paths and noise per run.
struct EnvSpec {
  int d = 1;
  int r = 1;
  std::vector<double> eigenvalues{1.0};  // r values, or one value replicated
  ProcessKind process = ProcessKind::iid_gaussian;
  double sigma_v = 1.0;
  double alpha = 1.0;
  double eta_bar = 0.0;

  ProcessSpec process_spec() const;
  // Gaussian kinds only; nullopt for the heavy-tailed kinds.
  std::optional<Matrix> increment_covariance() const;
};

CostModel realize_model(const EnvSpec& env, std::uint64_t master_seed);

struct RunStreams {
  MinimizerPath path;
  std::vector<Vector> probes;
  std::vector<double> noise;
};

RunStreams make_run_streams(const EnvSpec& env, int T,
                            std::uint64_t master_seed, int run_index);

struct RunSeries {
  bool failed = false;
  std::string error;
  std::vector<double> hitting, switching, cum_cost;  // index t, entry 0 = 0
  std::vector<double> inst_regret, cum_regret;
  std::vector<Phase> phase;
  double final_regret = 0.0;
  int weyl_violations = 0;
  double max_recursion_residual = 0.0;
};

struct DiagnosticTotals {
  long weyl_violations = 0;
  double max_recursion_residual = 0.0;
};

// Per-round regret of one agent against the full-knowledge benchmark on the
// same paths and noise streams (common random numbers).
struct RegretReport {
  AgentKind agent = AgentKind::ftm;
  int T = 0;
  int runs = 0;
  int failures = 0;
  std::uint64_t master_seed = 0;
  std::vector<RunSeries> series;      // one per run, failed runs included
  std::vector<double> final_regrets;  // successful runs only
  SampleStats stats;                  // of final_regrets
  std::vector<double> mean_cum_regret;  // index t, successful runs
  DiagnosticTotals diagnostics;
};

RegretReport evaluate_regret(AgentKind agent, AgentParams params,
                             const EnvSpec& env, int T, int runs,
                             std::uint64_t master_seed, int jobs = 1);

// Exact expected-regret split for the interpolation policy built from an
// estimate, under iid Gaussian increments with covariance Sigma:
//   R_val   = sum_s 1/2 <Sigma, C_s - C_hat_s>
//   R_basis = sum_s 1/2 <C_hat_s (A - A_hat) C_hat_s, M_s>,
//   M_1 = Sigma,  M_{s+1} = C_hat_s M_s C_hat_s + Sigma.
struct OracleBreakdown {
  double total = 0.0;
  double r_val = 0.0;
  double r_basis = 0.0;
  std::vector<double> error_cov_trace;  // tr(M_s), s = 1..T
};

OracleBreakdown expected_regret_oracle(const Matrix& A, const Matrix& A_hat,
                                       const Matrix& Sigma, int T);
// Refuses heavy-tailed kinds (no covariance).  Exact for iid increments; the
// correlated kind is evaluated by Monte Carlo instead.
OracleBreakdown expected_regret_oracle_for(const EnvSpec& env,
                                           const CostModel& model,
                                           const Matrix& A_hat, int T);

// Independent cross-check route: expected total cost of the estimate-driven
// policy by direct covariance propagation (no regret decomposition).
double expected_policy_cost(const Matrix& A_true, const Matrix& A_est,
                            const Matrix& Sigma, int T);

// m/2 tr(Sigma) + m gamma^2 (tr(A)/2 + d)
double exploration_cost_expectation(const CostModel& model,
                                    const Matrix& Sigma, double gamma_sq,
                                    int m);
double exploration_cost_expectation_for(const EnvSpec& env,
                                        const CostModel& model,
                                        double gamma_sq, int m);

struct LowerBoundCheck {
  double simulated_mean = 0.0;
  double simulated_se = 0.0;
  double closed_form = 0.0;
};

// Scalar interpolation policy x_t = (1-eps) x_{t-1} + eps v_t on a flat cost
// (A = 0) against a Gaussian random walk; closed form
// sum_t (eps^2/2) sigma^2 (1 - (1-eps)^{2t}) / (eps (2-eps)).
LowerBoundCheck lower_bound_instance_check(double eps, double sigma_sq, int T,
                                           int runs, std::uint64_t seed);

struct HorizonSweepRow {
  int T = 0;
  double mean_regret = 0.0;
  double se = 0.0;
  int failures = 0;
};

struct HorizonSweep {
  std::vector<HorizonSweepRow> rows;
  std::optional<double> loglog_slope;  // absent when any mean is <= 0
};

HorizonSweep horizon_sweep(AgentKind agent, const AgentParams& params,
                           const EnvSpec& env, const std::vector<int>& Ts,
                           int runs, std::uint64_t master_seed, int jobs = 1);

struct C1Profile {
  std::vector<double> grid;
  std::vector<double> mean_regret;
  std::vector<double> se;
  std::vector<int> failures;
  std::vector<bool> usable;  // false when every run at that point failed
  double best_c1 = 0.0;
};

// Evaluates the exploring agent across the grid and returns the argmin of the
// mean regret, ties broken toward the smaller multiplier.
C1Profile c1_line_search(const EnvSpec& env, AgentParams params,
                         const std::vector<double>& grid, int T, int runs,
                         std::uint64_t master_seed, int jobs = 1);

struct SpectralDiagnosticsReport {
  RecoveryErrorReport error;
  OracleBreakdown oracle;  // at the reference horizon with Sigma = I
  int reference_T = 100;
  bool weyl_ok = true;
  std::optional<bool> sin_theta_ok;  // absent unless gap conditions hold
};

SpectralDiagnosticsReport spectral_diagnostics(const CostModel& model,
                                               const Matrix& estimate);
std::string format_spectral_diagnostics(const SpectralDiagnosticsReport& rep);

}  // namespace socolab
