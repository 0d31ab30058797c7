// Acceptance suite: one pass/fail line per criterion.  Exit code is the
// number of failed criteria.  `--only N` runs a single criterion (the
// diagnostics criterion re-runs the experiment criteria it audits).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "socolab/cli.hpp"
#include "socolab/experiment.hpp"
#include "socolab/harness.hpp"
#include "socolab/random.hpp"
#include "socolab/report_io.hpp"

using namespace socolab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Diagnostics accumulated across the experiment criteria (8-11) for the
// diagnostics criterion (12).
struct DiagAccumulator {
  long weyl_violations = 0;
  double max_recursion_residual = 0.0;
  long reports = 0;

  void add(const RegretReport& rep) {
    weyl_violations += rep.diagnostics.weyl_violations;
    max_recursion_residual = std::max(max_recursion_residual,
                                      rep.diagnostics.max_recursion_residual);
    ++reports;
  }
} g_diag;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.5g", x);
  return buf;
}

Matrix random_psd(int d, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> uni(lo, hi);
  Vector lam(d);
  for (int i = 0; i < d; ++i) lam(i) = uni(rng);
  const Matrix U = random_orthonormal(d, rng);
  const Matrix A = U * lam.asDiagonal() * U.transpose();
  return 0.5 * (A + A.transpose());
}

// ---- criterion 1: scalar recursion == matrix recursion ---------------------

Outcome criterion_recursion_equivalence() {
  auto rng = make_engine(0xC1);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 8;
    const Matrix A = random_psd(d, rng, 0.01, 4.0);
    const int T = 200;
    const PolicySchedule s = recur_gen(A, 1, T);
    const auto ref = oracles::recur_gen_matrix_route(A, 1, T);
    for (int t = 1; t <= T; ++t)
      worst = std::max(worst, (s.at(t) - ref[t - 1]).norm());
  }
  Outcome o;
  o.pass = worst <= 1e-10;
  o.detail = "max Frobenius gap " + fmt(worst) + " (tol 1e-10)";
  return o;
}

// ---- criterion 2: backward fixed point --------------------------------------

Outcome criterion_fixed_point() {
  Outcome o;
  o.pass = true;
  std::ostringstream detail;
  for (double a : {0.1, 1.0, 2.0}) {
    const double fp = fixed_point(a);
    double lam = 1.0, prev = 2.0;
    bool monotone = true;
    for (int k = 0; k < 200; ++k) {
      lam = 1.0 / (2.0 + a - lam);
      if (lam > prev + 1e-15) monotone = false;
      if (prev - fp > 1e-12 && !(lam < prev)) monotone = false;
      prev = lam;
    }
    const double gap = std::abs(lam - fp);
    if (!monotone || gap > 1e-8) o.pass = false;
    detail << "a=" << a << ": gap " << fmt(gap) << (monotone ? "" : " NOT monotone")
           << "; ";
  }
  const double closed = std::abs(fixed_point(2.0) - (2.0 - std::sqrt(3.0)));
  if (closed > 1e-8) o.pass = false;
  detail << "closed-form gap at a=2: " << fmt(closed);
  o.detail = detail.str();
  return o;
}

// ---- criterion 3: noiseless recovery ----------------------------------------

Outcome criterion_noiseless_recovery() {
  auto rng = make_engine(0xC3);
  std::uniform_real_distribution<double> uni(0.5, 2.0);
  std::normal_distribution<double> g(0.0, 1.0);
  int ok = 0;
  double worst_rel = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const CostModel model = make_cost_matrix(4, 1, {uni(rng)}, rng);
    MeasurementSet ms;
    ms.gamma_sq = 1.0;
    ms.noise_budget = 0.0;
    ms.observations.resize(48);
    for (int k = 0; k < 48; ++k) {
      Vector z(4);
      for (int i = 0; i < 4; ++i) z(i) = g(rng);
      ms.probes.push_back(z);
      ms.observations(k) = 0.5 * z.dot(model.matrix() * z);
    }
    const RecoveryResult res = trace_min_recover(ms);
    const double rel =
        (res.estimate - model.matrix()).norm() / model.matrix().norm();
    worst_rel = std::max(worst_rel, rel);
    if (res.converged && rel <= 1e-3) ++ok;
  }
  Outcome o;
  o.pass = ok == 20;
  o.detail = std::to_string(ok) + "/20 instances, worst relative error " +
             fmt(worst_rel) + " (tol 1e-3)";
  return o;
}

// ---- criterion 4: noise scaling ----------------------------------------------

Outcome criterion_noise_scaling() {
  auto rng = make_engine(0xC4);
  const CostModel model = make_cost_matrix(4, 1, {1.5}, rng);
  const int m = 48;
  const double eta_bar = 10.0;
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<Vector> z(m);
  std::vector<double> eta(m);
  for (int k = 0; k < m; ++k) {
    z[k].resize(4);
    for (int i = 0; i < 4; ++i) z[k](i) = g(rng);
    eta[k] = eta_bar * uni(rng);
  }
  std::vector<double> errors;
  for (double gamma_sq : {10.0, 100.0, 1000.0}) {
    MeasurementSet ms;
    ms.probes = z;
    ms.gamma_sq = gamma_sq;
    ms.noise_budget = eta_bar * m / gamma_sq;
    ms.observations.resize(m);
    for (int k = 0; k < m; ++k)
      ms.observations(k) =
          0.5 * z[k].dot(model.matrix() * z[k]) + eta[k] / gamma_sq;
    const RecoveryResult res = trace_min_recover(ms);
    errors.push_back(sym_norms(res.estimate - model.matrix()).nuclear);
  }
  const double r1 = errors[0] / errors[1];
  const double r2 = errors[1] / errors[2];
  Outcome o;
  o.pass = errors[0] > errors[1] && errors[1] > errors[2] && r1 >= 3.0 &&
           r1 <= 30.0 && r2 >= 3.0 && r2 <= 30.0;
  o.detail = "nuclear errors " + fmt(errors[0]) + " > " + fmt(errors[1]) +
             " > " + fmt(errors[2]) + ", decade ratios " + fmt(r1) + ", " +
             fmt(r2) + " (need [3,30])";
  return o;
}

// ---- criterion 5: oracle vs Monte Carlo --------------------------------------

Outcome criterion_oracle_agreement() {
  auto rng = make_engine(0xC5);
  std::normal_distribution<double> g(0.0, 1.0);
  const int T = 100, runs = 2000;
  int ok = 0;
  double worst_z = 0.0;
  for (int pair = 0; pair < 10; ++pair) {
    const Matrix A = random_psd(3, rng, 0.3, 2.0);
    Matrix E(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) E(i, j) = 0.15 * g(rng);
    const Matrix Ahat = psd_project(A + 0.5 * (E + E.transpose()));
    const Matrix Sigma = Matrix::Identity(3, 3);
    const OracleBreakdown ob = expected_regret_oracle(A, Ahat, Sigma, T);

    CostModel model;
    model.dim = 3;
    model.rank = 3;
    model.spectral = sym_eig(A);
    model.sigma_r_min = model.spectral.eigenvalues.minCoeff();
    model.sigma_max = model.spectral.eigenvalues.maxCoeff();
    model.dense = A;
    ProcessSpec ps{ProcessKind::iid_gaussian, 1.0, 1.0, 3};
    const PolicySchedule est_sched = recur_gen(Ahat, 1, T);
    std::vector<double> regret(runs);
    for (int ri = 0; ri < runs; ++ri) {
      const MinimizerPath path =
          sample_path(ps, T, derive_seed(0xC5, pair, 600 + ri));
      const Trajectory est = rollout(est_sched, path, Vector::Zero(3), model);
      const Trajectory bench = lai_benchmark(model, path);
      regret[ri] = est.cumulative - bench.cumulative;
    }
    const SampleStats st = summarize(regret);
    const double zscore = std::abs(st.mean - ob.total) / st.se;
    worst_z = std::max(worst_z, zscore);
    if (zscore <= 3.0) ++ok;
  }
  Outcome o;
  o.pass = ok == 10;
  o.detail = std::to_string(ok) + "/10 pairs within 3 SE (worst " +
             fmt(worst_z) + " SE)";
  return o;
}

// ---- criterion 6: exploration cost formula -----------------------------------

Outcome criterion_exploration_cost() {
  auto rng = make_engine(0xC6);
  const CostModel model = make_cost_matrix(2, 2, {1.5, 0.5}, rng);
  EnvSpec env;
  env.d = 2;
  env.r = 2;
  env.eigenvalues = {1.5, 0.5};
  env.process = ProcessKind::iid_gaussian;
  env.sigma_v = 50.0;
  env.eta_bar = 10.0;
  const double gamma_sq = 40.0;
  const int m = 12, runs = 5000;
  std::vector<double> costs(runs);
  for (int ri = 0; ri < runs; ++ri) {
    const RunStreams st = make_run_streams(env, m, 0xC6, ri);
    const ProbeCollection pc = collect_probes_with(
        model, st.path, m, gamma_sq, env.eta_bar, st.probes, st.noise);
    costs[ri] = pc.exploration.cumulative;
  }
  const SampleStats st = summarize(costs);
  const double formula = exploration_cost_expectation(
      model, env.increment_covariance().value(), gamma_sq, m);
  const double z = std::abs(st.mean - formula) / st.se;
  Outcome o;
  o.pass = z <= 3.0;
  o.detail = "Monte Carlo " + fmt(st.mean) + " vs formula " + fmt(formula) +
             " (" + fmt(z) + " SE)";
  return o;
}

// ---- criterion 7: flat-curvature interpolation cost --------------------------

Outcome criterion_lower_bound_instance() {
  Outcome o;
  o.pass = true;
  std::ostringstream detail;
  for (double eps : {0.05, 0.1, 0.5}) {
    const LowerBoundCheck c =
        lower_bound_instance_check(eps, 1.0, 200, 5000, 0xC7);
    const double z = std::abs(c.simulated_mean - c.closed_form) /
                     std::max(1e-300, c.simulated_se);
    if (z > 3.0) o.pass = false;
    detail << "eps=" << eps << ": " << fmt(z) << " SE; ";
  }
  o.detail = detail.str();
  return o;
}

// ---- criteria 8-11: experiment reproductions ----------------------------------

EnvSpec lowrank_env() {
  EnvSpec env;
  env.d = 4;
  env.r = 1;
  env.eigenvalues = {0.01};
  env.process = ProcessKind::correlated_gaussian;
  env.alpha = 0.7;
  env.sigma_v = 50.0;
  env.eta_bar = 10.0;
  return env;
}

Outcome criterion_lowrank_ordering() {
  const EnvSpec env = lowrank_env();
  AgentParams p;
  p.eta_bar = env.eta_bar;
  p.rank_hint = 1;
  p.sigma_floor = 1e-3;  // conservative lower estimate of the 1e-2 eigenvalue
  p.c1 = 3.0;
  // Learning rate sized for this drift scale: gradient kicks go as
  // xi * residual * ||u||^2 with ||u||^2 up to d sigma_v^2 T ~ 4e6 here, so
  // the 1e-6 default oscillates; 1e-11 keeps the refinement contractive.
  p.xi = 1e-11;
  const int T = 400, runs = 20;
  const std::uint64_t seed = 0xC8;
  const RegretReport scale =
      evaluate_regret(AgentKind::scale, p, env, T, runs, seed);
  const RegretReport hyscale =
      evaluate_regret(AgentKind::hyscale, p, env, T, runs, seed);
  const RegretReport ftm =
      evaluate_regret(AgentKind::ftm, p, env, T, runs, seed);
  g_diag.add(scale);
  g_diag.add(hyscale);
  g_diag.add(ftm);

  // paired slack for the hybrid comparison
  double se_diff = 0.0;
  {
    std::vector<double> diff;
    for (int ri = 0; ri < runs; ++ri)
      if (!scale.series[ri].failed && !hyscale.series[ri].failed)
        diff.push_back(hyscale.series[ri].final_regret -
                       scale.series[ri].final_regret);
    const SampleStats st = summarize(diff);
    se_diff = st.se;
  }
  Outcome o;
  const bool beats_ftm = scale.stats.mean < ftm.stats.mean;
  const bool hybrid_ok =
      hyscale.stats.mean <= scale.stats.mean + se_diff;
  o.pass = beats_ftm && hybrid_ok && scale.failures == 0 &&
           hyscale.failures == 0;
  o.detail = "mean regret: scale " + fmt(scale.stats.mean) + " < ftm " +
             fmt(ftm.stats.mean) + (beats_ftm ? " ok" : " VIOLATED") +
             "; hyscale " + fmt(hyscale.stats.mean) + " <= scale + 1 SE (" +
             fmt(scale.stats.mean + se_diff) + ")" +
             (hybrid_ok ? " ok" : " VIOLATED");
  return o;
}

Outcome criterion_heavy_tail() {
  EnvSpec env;
  env.d = 4;
  env.r = 1;
  env.eigenvalues = {0.01};
  env.process = ProcessKind::cauchy;
  env.sigma_v = 1.0;
  env.eta_bar = 50.0;
  AgentParams p;
  p.eta_bar = env.eta_bar;
  p.rank_hint = 1;
  p.sigma_floor = 0.01;
  p.c1 = 3.0;
  p.xi = 1e-6;
  const int T = 400, runs = 20;
  const std::uint64_t seed = 0xC9;
  const RegretReport scale =
      evaluate_regret(AgentKind::scale, p, env, T, runs, seed);
  const RegretReport pol =
      evaluate_regret(AgentKind::pol, p, env, T, runs, seed);
  const RegretReport oal =
      evaluate_regret(AgentKind::oal, p, env, T, runs, seed);
  const RegretReport hyscale =
      evaluate_regret(AgentKind::hyscale, p, env, T, runs, seed);
  g_diag.add(scale);
  g_diag.add(pol);
  g_diag.add(oal);
  g_diag.add(hyscale);

  Outcome o;
  o.pass = scale.stats.median < pol.stats.median &&
           scale.stats.median < oal.stats.median &&
           scale.stats.median < hyscale.stats.median;
  o.detail = "median regret: scale " + fmt(scale.stats.median) + " vs pol " +
             fmt(pol.stats.median) + ", oal " + fmt(oal.stats.median) +
             ", hyscale " + fmt(hyscale.stats.median);
  return o;
}

Outcome criterion_sublinearity() {
  EnvSpec env;
  env.d = 4;
  env.r = 4;
  env.eigenvalues = {1.0};
  env.process = ProcessKind::iid_gaussian;
  env.sigma_v = 50.0;
  env.eta_bar = 10.0;
  AgentParams p;
  p.eta_bar = env.eta_bar;
  p.rank_hint = 4;
  p.sigma_floor = 1.0;
  p.c1 = 3.0;
  p.xi = 1e-6;
  const std::vector<int> Ts{400, 1000, 2000};
  std::vector<double> per_round;
  std::vector<double> xs, ys;
  bool failures = false;
  for (int T : Ts) {
    const RegretReport rep =
        evaluate_regret(AgentKind::scale, p, env, T, 5, 0xC10);
    g_diag.add(rep);
    failures = failures || rep.failures > 0;
    per_round.push_back(rep.stats.mean / T);
    xs.push_back(T);
    ys.push_back(rep.stats.mean);
  }
  const double slope = loglog_slope(xs, ys);
  Outcome o;
  o.pass = !failures && per_round[0] > per_round[1] &&
           per_round[1] > per_round[2] && slope <= 0.85;
  o.detail = "regret/T " + fmt(per_round[0]) + " > " + fmt(per_round[1]) +
             " > " + fmt(per_round[2]) + "; log-log slope " + fmt(slope) +
             " (tol 0.85)";
  return o;
}

Outcome criterion_c1_profile() {
  EnvSpec env;
  env.d = 4;
  env.r = 4;
  env.eigenvalues = {1.0};
  env.process = ProcessKind::iid_gaussian;
  env.sigma_v = 50.0;
  AgentParams p;
  p.rank_hint = 4;
  p.sigma_floor = 1.0;
  p.xi = 1e-6;
  const std::vector<double> grid{1, 2, 3, 4, 5, 6, 7, 8};
  Outcome o;
  o.pass = true;
  std::ostringstream detail;
  for (double eta_bar : {1.0, 100.0}) {
    env.eta_bar = eta_bar;
    p.eta_bar = eta_bar;
    const C1Profile prof = c1_line_search(env, p, grid, 400, 10, 0xC11);
    // the profile itself came from per-point regret evaluations; rebuild the
    // diagnostics by evaluating the best point once more is unnecessary --
    // collect from a fresh report at the argmin
    AgentParams best = p;
    best.c1 = prof.best_c1;
    g_diag.add(evaluate_regret(AgentKind::scale, best, env, 400, 10, 0xC11));
    const bool interior = prof.best_c1 > grid.front() &&
                          prof.best_c1 < grid.back();
    const bool in_window = prof.best_c1 >= 2.0 && prof.best_c1 <= 6.0;
    if (!(interior && in_window)) o.pass = false;
    detail << "eta=" << eta_bar << ": best c1 = " << prof.best_c1
           << (interior && in_window ? " ok" : " VIOLATED") << "; ";
  }
  o.detail = detail.str();
  return o;
}

Outcome criterion_diagnostics() {
  Outcome o;
  o.pass = g_diag.reports > 0 && g_diag.weyl_violations == 0 &&
           g_diag.max_recursion_residual <= 1e-8;
  o.detail = std::to_string(g_diag.weyl_violations) +
             " Weyl violations across " + std::to_string(g_diag.reports) +
             " reports; max recursion residual " +
             fmt(g_diag.max_recursion_residual) + " (tol 1e-8)";
  return o;
}

// ---- criterion 13: byte-identical reruns --------------------------------------

Outcome criterion_determinism() {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "socolab_acceptance_13";
  fs::remove_all(base);
  fs::create_directories(base);
  const std::string out1 = (base / "out1").string();
  const std::string out2 = (base / "out2").string();
  const std::string cfg_path = (base / "exp.toml").string();
  std::ostringstream cfg;
  cfg << "[environment]\nd = 2\nr = 1\nsigma_a = 1.0\n"
      << "process = \"iid_gaussian\"\nsigma_v = 1.0\n\n"
      << "[feedback]\neta_bar = 1.0\n\n"
      << "[agents]\nnames = [\"scale\", \"ftm\", \"lai\"]\nc1 = 3.0\n\n"
      << "[run]\nT = 60\nruns = 2\nmaster_seed = 13\n\n"
      << "[output]\ndirectory = \"" << out1
      << "\"\nformats = [\"csv\", \"svg\"]\n";
  write_file(cfg_path, cfg.str());

  Outcome o;
  if (cli_main({"run", "--config", cfg_path}) != 0) {
    o.detail = "first run failed";
    return o;
  }
  if (cli_main({"run", "--config", out1 + "/manifest.json", "--out", out2}) !=
      0) {
    o.detail = "manifest rerun failed";
    return o;
  }
  bool identical = true;
  std::ostringstream detail;
  for (const char* name : {"rounds_scale.csv", "rounds_ftm.csv",
                           "rounds_lai.csv", "summary.csv",
                           "regret_curves.svg"}) {
    const bool same = read_file(out1 + "/" + name) ==
                      read_file(out2 + "/" + name);
    identical = identical && same;
    if (!same) detail << name << " differs; ";
  }
  o.pass = identical;
  o.detail = identical ? "all CSV and SVG artifacts byte-identical on rerun"
                       : detail.str();
  fs::remove_all(base);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> fn;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> cs{
      {1, "recursion equivalence", criterion_recursion_equivalence},
      {2, "backward fixed point", criterion_fixed_point},
      {3, "noiseless recovery", criterion_noiseless_recovery},
      {4, "noise scaling", criterion_noise_scaling},
      {5, "oracle agreement", criterion_oracle_agreement},
      {6, "exploration cost formula", criterion_exploration_cost},
      {7, "flat-curvature interpolation cost", criterion_lower_bound_instance},
      {8, "low-rank ordering", criterion_lowrank_ordering},
      {9, "heavy-tail robustness", criterion_heavy_tail},
      {10, "sublinearity", criterion_sublinearity},
      {11, "exploration multiplier profile", criterion_c1_profile},
      {12, "diagnostics never fire", criterion_diagnostics},
      {13, "determinism", criterion_determinism},
  };
  return cs;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  int failures = 0;
  for (const Criterion& c : criteria()) {
    const bool counted = only == 0 || c.id == only;
    if (!counted) {
      // the diagnostics criterion audits the runs of criteria 8-11; replay
      // them quietly when it is invoked on its own
      if (only == 12 && c.id >= 8 && c.id <= 11) {
        try {
          c.fn();
        } catch (const std::exception&) {
        }
      }
      continue;
    }
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2d: %s -- %s\n", o.pass ? "PASS" : "FAIL",
                c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures;
}
