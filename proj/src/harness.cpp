#include "socolab/harness.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "socolab/random.hpp"

namespace socolab {

namespace {

constexpr std::uint64_t kStreamModel = 0x10;
constexpr std::uint64_t kStreamPath = 0x21;
constexpr std::uint64_t kStreamProbe = 0x22;
constexpr std::uint64_t kStreamNoise = 0x23;

}  // namespace

ProcessSpec EnvSpec::process_spec() const {
  ProcessSpec ps;
  ps.kind = process;
  ps.sigma_v = sigma_v;
  ps.alpha = alpha;
  ps.dim = d;
  return ps;
}

std::optional<Matrix> EnvSpec::increment_covariance() const {
  return process_spec().increment_covariance();
}

CostModel realize_model(const EnvSpec& env, std::uint64_t master_seed) {
  std::mt19937_64 rng = make_engine(derive_seed(master_seed, 0, kStreamModel));
  return make_cost_matrix(env.d, env.r, env.eigenvalues, rng);
}

RunStreams make_run_streams(const EnvSpec& env, int T,
                            std::uint64_t master_seed, int run_index) {
  RunStreams s;
  s.path = sample_path(env.process_spec(), T,
                       derive_seed(master_seed, run_index, kStreamPath));
  std::mt19937_64 probe_rng =
      make_engine(derive_seed(master_seed, run_index, kStreamProbe));
  std::normal_distribution<double> gauss(0.0, 1.0);
  s.probes.resize(T);
  for (int t = 0; t < T; ++t) {
    s.probes[t].resize(env.d);
    for (int i = 0; i < env.d; ++i) s.probes[t](i) = gauss(probe_rng);
  }
  std::mt19937_64 noise_rng =
      make_engine(derive_seed(master_seed, run_index, kStreamNoise));
  s.noise.resize(T);
  for (int t = 0; t < T; ++t) s.noise[t] = unit_noise_draw(noise_rng);
  return s;
}

namespace {

// Eigenvalue-gap tripwire: |lambda_i(est) - lambda_i(A)| can exceed the
// operator gap only through numerics.
int count_weyl_violations(const Matrix& estimate, const CostModel& model) {
  const Matrix delta = estimate - model.matrix();
  const SpectralForm df = sym_eig(0.5 * (delta + delta.transpose()));
  const double op = df.eigenvalues.cwiseAbs().maxCoeff();
  const SpectralForm ef = sym_eig(0.5 * (estimate + estimate.transpose()));
  int violations = 0;
  for (int i = 0; i < model.dim; ++i) {
    const double gap =
        std::abs(ef.eigenvalues(i) - model.spectral.eigenvalues(i));
    if (gap > op + 1e-10 * (1.0 + op)) ++violations;
  }
  return violations;
}

bool all_finite(const Trajectory& traj) {
  if (!std::isfinite(traj.cumulative)) return false;
  for (std::size_t t = 1; t < traj.hitting.size(); ++t)
    if (!std::isfinite(traj.hitting[t]) || !std::isfinite(traj.switching[t]))
      return false;
  return true;
}

RunSeries evaluate_one_run(AgentKind agent, const AgentParams& params,
                           const EnvSpec& env, const CostModel& model, int T,
                           std::uint64_t master_seed, int run_index) {
  RunSeries out;
  const RunStreams streams = make_run_streams(env, T, master_seed, run_index);
  RunInputs in{model, streams.path, FeedbackSpec{env.eta_bar}, streams.probes,
               streams.noise};
  try {
    const RunRecord rec = run_agent(agent, in, params);
    const Trajectory bench = lai_benchmark(model, streams.path);
    if (!all_finite(rec.trajectory) || !all_finite(bench))
      throw std::runtime_error("non-finite trajectory cost");

    out.hitting.assign(T + 1, 0.0);
    out.switching.assign(T + 1, 0.0);
    out.cum_cost.assign(T + 1, 0.0);
    out.inst_regret.assign(T + 1, 0.0);
    out.cum_regret.assign(T + 1, 0.0);
    out.phase = rec.phase;
    for (int t = 1; t <= T; ++t) {
      out.hitting[t] = rec.trajectory.hitting[t];
      out.switching[t] = rec.trajectory.switching[t];
      out.cum_cost[t] = out.cum_cost[t - 1] + out.hitting[t] + out.switching[t];
      out.inst_regret[t] = (rec.trajectory.hitting[t] +
                            rec.trajectory.switching[t]) -
                           (bench.hitting[t] + bench.switching[t]);
      out.cum_regret[t] = out.cum_regret[t - 1] + out.inst_regret[t];
    }
    out.final_regret = out.cum_regret[T];
    out.max_recursion_residual = rec.max_recursion_residual;
    for (const auto& [round, est] : rec.estimate_history)
      out.weyl_violations += count_weyl_violations(est, model);
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

}  // namespace

RegretReport evaluate_regret(AgentKind agent, AgentParams params,
                             const EnvSpec& env, int T, int runs,
                             std::uint64_t master_seed, int jobs) {
  if (runs < 1) throw std::invalid_argument("evaluate_regret: runs >= 1");
  if (T < 1) throw std::invalid_argument("evaluate_regret: T >= 1");
  params.horizon = T;
  params.eta_bar = env.eta_bar;

  const CostModel model = realize_model(env, master_seed);
  RegretReport rep;
  rep.agent = agent;
  rep.T = T;
  rep.runs = runs;
  rep.master_seed = master_seed;
  rep.series.resize(runs);

  const int workers = std::max(1, std::min(jobs, runs));
  if (workers == 1) {
    for (int ri = 0; ri < runs; ++ri)
      rep.series[ri] =
          evaluate_one_run(agent, params, env, model, T, master_seed, ri);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int ri = next.fetch_add(1); ri < runs; ri = next.fetch_add(1))
          rep.series[ri] =
              evaluate_one_run(agent, params, env, model, T, master_seed, ri);
      });
    }
    for (auto& th : pool) th.join();
  }

  rep.mean_cum_regret.assign(T + 1, 0.0);
  for (const RunSeries& rs : rep.series) {
    if (rs.failed) {
      ++rep.failures;
      continue;
    }
    rep.final_regrets.push_back(rs.final_regret);
    for (int t = 0; t <= T; ++t) rep.mean_cum_regret[t] += rs.cum_regret[t];
    rep.diagnostics.weyl_violations += rs.weyl_violations;
    rep.diagnostics.max_recursion_residual = std::max(
        rep.diagnostics.max_recursion_residual, rs.max_recursion_residual);
  }
  const int ok = runs - rep.failures;
  if (ok > 0)
    for (double& v : rep.mean_cum_regret) v /= ok;
  rep.stats = summarize(rep.final_regrets);
  return rep;
}

OracleBreakdown expected_regret_oracle(const Matrix& A, const Matrix& A_hat,
                                       const Matrix& Sigma, int T) {
  require_symmetric(Sigma, "expected_regret_oracle(Sigma)");
  const PolicySchedule true_sched = recur_gen(A, 1, T);
  const PolicySchedule est_sched = recur_gen(A_hat, 1, T);
  const Matrix delta = A - est_sched.source_estimate;

  OracleBreakdown ob;
  ob.error_cov_trace.reserve(T);
  Matrix M = Sigma;  // E[(x_{s-1} - v_s)(x_{s-1} - v_s)'] for s = 1
  for (int s = 1; s <= T; ++s) {
    const Matrix& C = true_sched.at(s);
    const Matrix& Ch = est_sched.at(s);
    ob.error_cov_trace.push_back(M.trace());
    ob.r_val += 0.5 * (C - Ch).cwiseProduct(Sigma).sum();
    ob.r_basis += 0.5 * (Ch * delta * Ch).cwiseProduct(M).sum();
    M = Ch * M * Ch + Sigma;
  }
  ob.total = ob.r_val + ob.r_basis;
  return ob;
}

OracleBreakdown expected_regret_oracle_for(const EnvSpec& env,
                                           const CostModel& model,
                                           const Matrix& A_hat, int T) {
  const auto Sigma = env.increment_covariance();
  if (!Sigma) {
    std::ostringstream os;
    os << "expected_regret_oracle: no increment covariance for process "
       << to_string(env.process);
    throw std::invalid_argument(os.str());
  }
  return expected_regret_oracle(model.matrix(), A_hat, *Sigma, T);
}

double expected_policy_cost(const Matrix& A_true, const Matrix& A_est,
                            const Matrix& Sigma, int T) {
  const PolicySchedule sched = recur_gen(A_est, 1, T);
  const int d = static_cast<int>(A_true.rows());
  const Matrix I = Matrix::Identity(d, d);
  double cost = 0.0;
  Matrix M = Sigma;
  for (int s = 1; s <= T; ++s) {
    const Matrix& C = sched.at(s);
    const Matrix W = C * A_true * C + (I - C) * (I - C);
    cost += 0.5 * W.cwiseProduct(M).sum();
    M = C * M * C + Sigma;
  }
  return cost;
}

double exploration_cost_expectation(const CostModel& model,
                                    const Matrix& Sigma, double gamma_sq,
                                    int m) {
  require_symmetric(Sigma, "exploration_cost_expectation(Sigma)");
  if (m < 1)
    throw std::invalid_argument("exploration_cost_expectation: m >= 1");
  if (gamma_sq < 0.0)
    throw std::invalid_argument("exploration_cost_expectation: gamma_sq >= 0");
  return m * 0.5 * Sigma.trace() +
         m * gamma_sq * (0.5 * model.matrix().trace() + model.dim);
}

double exploration_cost_expectation_for(const EnvSpec& env,
                                        const CostModel& model,
                                        double gamma_sq, int m) {
  const auto Sigma = env.increment_covariance();
  if (!Sigma) {
    std::ostringstream os;
    os << "exploration_cost_expectation: no increment covariance for process "
       << to_string(env.process);
    throw std::invalid_argument(os.str());
  }
  return exploration_cost_expectation(model, *Sigma, gamma_sq, m);
}

LowerBoundCheck lower_bound_instance_check(double eps, double sigma_sq, int T,
                                           int runs, std::uint64_t seed) {
  if (eps <= 0.0 || eps > 1.0)
    throw std::invalid_argument("lower_bound_instance_check: eps in (0, 1]");
  LowerBoundCheck out;
  const double denom = eps * (2.0 - eps);
  for (int t = 1; t <= T; ++t) {
    const double M_t =
        sigma_sq * (1.0 - std::pow(1.0 - eps, 2.0 * t)) / denom;
    out.closed_form += 0.5 * eps * eps * M_t;
  }

  const double sigma = std::sqrt(sigma_sq);
  std::vector<double> costs(runs);
  for (int ri = 0; ri < runs; ++ri) {
    std::mt19937_64 rng = make_engine(derive_seed(seed, ri, kStreamPath));
    std::normal_distribution<double> gauss(0.0, 1.0);
    double v = 0.0, x = 0.0, cost = 0.0;
    for (int t = 1; t <= T; ++t) {
      v += sigma * gauss(rng);
      const double x_next = (1.0 - eps) * x + eps * v;
      cost += 0.5 * (x_next - x) * (x_next - x);
      x = x_next;
    }
    costs[ri] = cost;
  }
  const SampleStats st = summarize(costs);
  out.simulated_mean = st.mean;
  out.simulated_se = st.se;
  return out;
}

HorizonSweep horizon_sweep(AgentKind agent, const AgentParams& params,
                           const EnvSpec& env, const std::vector<int>& Ts,
                           int runs, std::uint64_t master_seed, int jobs) {
  HorizonSweep sweep;
  bool slope_ok = true;
  std::vector<double> xs, ys;
  for (int T : Ts) {
    const RegretReport rep =
        evaluate_regret(agent, params, env, T, runs, master_seed, jobs);
    HorizonSweepRow row;
    row.T = T;
    row.mean_regret = rep.stats.mean;
    row.se = rep.stats.se;
    row.failures = rep.failures;
    sweep.rows.push_back(row);
    if (row.mean_regret > 0.0) {
      xs.push_back(static_cast<double>(T));
      ys.push_back(row.mean_regret);
    } else {
      slope_ok = false;
    }
  }
  if (slope_ok && xs.size() >= 2) sweep.loglog_slope = loglog_slope(xs, ys);
  return sweep;
}

C1Profile c1_line_search(const EnvSpec& env, AgentParams params,
                         const std::vector<double>& grid, int T, int runs,
                         std::uint64_t master_seed, int jobs) {
  if (grid.empty()) throw std::invalid_argument("c1_line_search: empty grid");
  C1Profile prof;
  prof.grid = grid;
  bool any_usable = false;
  for (double c : grid) {
    params.c1 = c;
    const RegretReport rep = evaluate_regret(AgentKind::scale, params, env, T,
                                             runs, master_seed, jobs);
    const bool usable = rep.failures < rep.runs;
    prof.mean_regret.push_back(usable
                                   ? rep.stats.mean
                                   : std::numeric_limits<double>::quiet_NaN());
    prof.se.push_back(usable ? rep.stats.se : 0.0);
    prof.failures.push_back(rep.failures);
    prof.usable.push_back(usable);
    any_usable = any_usable || usable;
  }
  if (!any_usable)
    throw std::runtime_error("c1_line_search: every grid point failed");
  int best = -1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!prof.usable[i]) continue;
    if (best < 0 || prof.mean_regret[i] < prof.mean_regret[best])
      best = static_cast<int>(i);
  }
  prof.best_c1 = grid[best];
  return prof;
}

SpectralDiagnosticsReport spectral_diagnostics(const CostModel& model,
                                               const Matrix& estimate) {
  SpectralDiagnosticsReport rep;
  rep.error = recovery_error(estimate, model);
  const Matrix Sigma = Matrix::Identity(model.dim, model.dim);
  rep.oracle = expected_regret_oracle(model.matrix(), psd_project(estimate),
                                      Sigma, rep.reference_T);
  rep.weyl_ok =
      rep.error.weyl_violation <= 1e-10 * (1.0 + rep.error.operator_gap);
  if (rep.error.sin_theta_bound) {
    // Per-column alignment is only meaningful when the leading eigenvalues
    // are mutually separated beyond the perturbation size.
    const double eps = rep.error.operator_gap;
    bool simple = true;
    for (int i = 0; i < model.rank; ++i) {
      const double next = (i + 1 < model.dim)
                              ? model.spectral.eigenvalues(i + 1)
                              : 0.0;
      if (model.spectral.eigenvalues(i) - next <= 2.0 * eps) simple = false;
    }
    if (simple)
      rep.sin_theta_ok =
          rep.error.subspace_distance <= *rep.error.sin_theta_bound + 1e-8;
  }
  return rep;
}

std::string format_spectral_diagnostics(const SpectralDiagnosticsReport& rep) {
  std::ostringstream os;
  os << "estimate error: nuclear " << rep.error.nuclear_gap << ", frobenius "
     << rep.error.frobenius_gap << ", operator " << rep.error.operator_gap
     << "\n";
  os << "eigenvalue gaps:";
  for (int i = 0; i < rep.error.eigenvalue_gaps.size(); ++i)
    os << " " << rep.error.eigenvalue_gaps(i);
  os << "\nweyl violation: " << rep.error.weyl_violation
     << (rep.weyl_ok ? " (ok)" : " (VIOLATED)") << "\n";
  os << "leading-subspace distance: " << rep.error.subspace_distance;
  if (rep.error.sin_theta_bound) {
    os << " (bound " << *rep.error.sin_theta_bound;
    if (rep.sin_theta_ok)
      os << (*rep.sin_theta_ok ? ", holds" : ", VIOLATED");
    os << ")";
  }
  os << "\nexpected regret at T=" << rep.reference_T
     << ", Sigma=I: total " << rep.oracle.total << " = value "
     << rep.oracle.r_val << " + basis " << rep.oracle.r_basis << "\n";
  return os.str();
}

}  // namespace socolab
