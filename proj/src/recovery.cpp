#include "socolab/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace socolab {

void MeasurementSet::validate() const {
  if (probes.empty()) throw std::invalid_argument("MeasurementSet: m >= 1");
  if (observations.size() != count())
    throw std::invalid_argument("MeasurementSet: probe/observation mismatch");
  if (gamma_sq <= 0.0)
    throw std::invalid_argument("MeasurementSet: gamma_sq must be > 0");
  if (noise_budget < 0.0)
    throw std::invalid_argument("MeasurementSet: noise_budget must be >= 0");
  const auto d = probes.front().size();
  for (const auto& z : probes)
    if (z.size() != d)
      throw std::invalid_argument("MeasurementSet: probe dimension mismatch");
}

ProbeCollection collect_probes_with(const CostModel& model,
                                    const MinimizerPath& path, int m,
                                    double gamma_sq, double eta_bar,
                                    const std::vector<Vector>& z,
                                    const std::vector<double>& unit_noise) {
  if (m < 1) throw std::invalid_argument("collect_probes: m must be >= 1");
  if (gamma_sq <= 0.0)
    throw std::invalid_argument("collect_probes: gamma_sq must be > 0");
  if (path.horizon() < m)
    throw std::invalid_argument("collect_probes: path shorter than m");
  if (static_cast<int>(z.size()) < m ||
      static_cast<int>(unit_noise.size()) < m)
    throw std::invalid_argument("collect_probes: not enough draws");

  const double gamma = std::sqrt(gamma_sq);
  ProbeCollection pc;
  pc.measurements.gamma_sq = gamma_sq;
  pc.measurements.noise_budget = eta_bar * m / gamma_sq;
  pc.measurements.probes.assign(z.begin(), z.begin() + m);
  pc.measurements.observations.resize(m);

  Trajectory& traj = pc.exploration;
  traj.actions.push_back(Vector::Zero(model.dim));
  traj.hitting.assign(m + 1, 0.0);
  traj.switching.assign(m + 1, 0.0);
  for (int t = 1; t <= m; ++t) {
    const Vector x = path.values[t] + gamma * z[t - 1];
    const double h = hitting_cost(model, path.values[t], x);
    const double y = h + eta_bar * unit_noise[t - 1];
    pc.measurements.observations(t - 1) = y / gamma_sq;
    traj.hitting[t] = h;
    traj.switching[t] = switching_cost(x, traj.actions.back());
    traj.cumulative += traj.hitting[t] + traj.switching[t];
    traj.actions.push_back(x);
  }
  return pc;
}

ProbeCollection collect_probes(const CostModel& model,
                               const MinimizerPath& path, int m,
                               double gamma_sq, double eta_bar,
                               std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vector> z(m);
  std::vector<double> noise(m);
  for (int k = 0; k < m; ++k) {
    z[k].resize(model.dim);
    for (int i = 0; i < model.dim; ++i) z[k](i) = gauss(rng);
    noise[k] = unit_noise_draw(rng);
  }
  return collect_probes_with(model, path, m, gamma_sq, eta_bar, z, noise);
}

namespace {

// Symmetric matrices live in R^D with D = d(d+1)/2; off-diagonal entries
// carry sqrt(2) so Euclidean inner products match Frobenius ones.
struct SymVec {
  int d;
  int D;

  explicit SymVec(int dim) : d(dim), D(dim * (dim + 1) / 2) {}

  Vector pack(const Matrix& M) const {
    Vector v(D);
    int k = 0;
    for (int i = 0; i < d; ++i) {
      v(k++) = M(i, i);
      for (int j = i + 1; j < d; ++j) v(k++) = M_SQRT2 * M(i, j);
    }
    return v;
  }

  Matrix unpack(const Vector& v) const {
    Matrix M(d, d);
    int k = 0;
    for (int i = 0; i < d; ++i) {
      M(i, i) = v(k++);
      for (int j = i + 1; j < d; ++j) {
        M(i, j) = v(k) / M_SQRT2;
        M(j, i) = M(i, j);
        ++k;
      }
    }
    return M;
  }
};

// Euclidean projection onto the l1 ball of radius eps (Duchi et al.).
Vector project_l1_ball(const Vector& w, double eps) {
  if (eps <= 0.0) return Vector::Zero(w.size());
  if (w.lpNorm<1>() <= eps) return w;
  Vector a = w.cwiseAbs();
  std::vector<double> s(a.data(), a.data() + a.size());
  std::sort(s.begin(), s.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    cum += s[j];
    const double cand = (cum - eps) / static_cast<double>(j + 1);
    if (s[j] - cand > 0.0)
      theta = cand;
    else
      break;
  }
  Vector out(w.size());
  for (int i = 0; i < w.size(); ++i) {
    const double m = std::max(0.0, std::abs(w(i)) - theta);
    out(i) = w(i) >= 0.0 ? m : -m;
  }
  return out;
}

struct AdmmProblem {
  SymVec sv;
  Matrix Aop;   // m x D measurement operator
  Vector y;
  double eps;
  Vector trace_grad;  // svec(I)

  AdmmProblem(const MeasurementSet& ms)
      : sv(static_cast<int>(ms.probes.front().size())),
        y(ms.observations),
        eps(ms.noise_budget) {
    const int m = ms.count();
    Aop.resize(m, sv.D);
    for (int k = 0; k < m; ++k)
      Aop.row(k) = sv.pack(0.5 * ms.probes[k] * ms.probes[k].transpose());
    trace_grad = sv.pack(Matrix::Identity(sv.d, sv.d));
  }

  double residual_l1_of(const Matrix& M) const {
    return (y - Aop * sv.pack(M)).lpNorm<1>();
  }
};

struct AdmmOutcome {
  Matrix S;
  int iterations = 0;
  bool converged = false;
};

// Shared ADMM loop.  trace_weight = 1 gives the constrained trace
// minimization; trace_weight ~ 0 with soft_residual gives the penalized
// minimum-residual fallback (r-step becomes soft thresholding instead of an
// l1-ball projection).  In constrained mode, convergence additionally
// requires the returned PSD iterate itself to meet the residual budget
// within feas_margin, so the solver contract holds at the reported point.
AdmmOutcome run_admm(const AdmmProblem& P, double trace_weight,
                     bool soft_residual, double feas_margin,
                     const TraceMinOptions& opt) {
  const int D = P.sv.D;
  const int m = static_cast<int>(P.y.size());
  const Matrix G =
      Matrix::Identity(D, D) + P.Aop.transpose() * P.Aop;
  const Eigen::LLT<Matrix> llt(G);

  Vector mv = Vector::Zero(D);
  Matrix S = Matrix::Zero(P.sv.d, P.sv.d);
  Vector r = soft_residual ? Vector(P.y) : project_l1_ball(P.y, P.eps);
  Matrix U = Matrix::Zero(P.sv.d, P.sv.d);
  Vector w = Vector::Zero(m);
  double rho = 1.0;
  const double alpha = 1.6;  // over-relaxation
  const double abs_tol = 1e-10;
  const double rel_tol = opt.primal_tolerance;

  std::ofstream dump;
  if (!opt.trace_csv_path.empty()) {
    dump.open(opt.trace_csv_path);
    dump << "iteration,objective,residual\n";
  }

  AdmmOutcome out;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    // m-step: quadratic in the svec coordinates; system matrix is
    // rho-independent so the factorization is reused across rho updates.
    const Vector rhs = P.sv.pack(S - U) +
                       P.Aop.transpose() * (P.y - r - w) -
                       (trace_weight / rho) * P.trace_grad;
    mv = llt.solve(rhs);
    const Matrix Mmat = P.sv.unpack(mv);
    const Vector Am = P.Aop * mv;

    const Matrix S_prev = S;
    const Vector r_prev = r;

    const Matrix M_rel = alpha * Mmat + (1.0 - alpha) * S_prev;
    S = psd_project(M_rel + U);
    U += M_rel - S;

    const Vector Am_rel = alpha * Am + (1.0 - alpha) * (P.y - r_prev);
    if (soft_residual) {
      const Vector target = P.y - Am_rel - w;
      r.resize(m);
      for (int k = 0; k < m; ++k) {
        const double thr = 1.0 / rho;
        r(k) = target(k) > thr    ? target(k) - thr
               : target(k) < -thr ? target(k) + thr
                                  : 0.0;
      }
    } else {
      r = project_l1_ball(P.y - Am_rel - w, P.eps);
    }
    w += Am_rel + r - P.y;

    const double pri = std::sqrt((Mmat - S).squaredNorm() +
                                 (Am + r - P.y).squaredNorm());
    const double dual =
        rho * (P.sv.pack(S - S_prev) + P.Aop.transpose() * (r - r_prev)).norm();
    const double pri_scale =
        std::max({std::sqrt(mv.squaredNorm() + Am.squaredNorm()),
                  std::sqrt(S.squaredNorm() + r.squaredNorm()),
                  P.y.norm()});
    const double dual_scale =
        rho * std::sqrt(P.sv.pack(U).squaredNorm() +
                        (P.Aop.transpose() * w).squaredNorm());
    const double eps_pri =
        std::sqrt(static_cast<double>(D + m)) * abs_tol + rel_tol * pri_scale;
    const double eps_dual =
        std::sqrt(static_cast<double>(D)) * abs_tol + rel_tol * dual_scale;

    if (dump.is_open() && (it % 25 == 0 || it == 1)) {
      char line[128];
      std::snprintf(line, sizeof(line), "%d,%.12g,%.12g\n", it, S.trace(),
                    (P.y - P.Aop * P.sv.pack(S)).lpNorm<1>());
      dump << line;
    }

    if (pri <= eps_pri && dual <= eps_dual) {
      const double res_S =
          soft_residual ? 0.0
                        : (P.y - P.Aop * P.sv.pack(S)).lpNorm<1>() - P.eps;
      if (res_S <= feas_margin) {
        out.iterations = it;
        out.converged = true;
        break;
      }
    }
    out.iterations = it;

    if (it % 25 == 0) {  // residual balancing
      if (pri > 10.0 * dual && rho < 1e8) {
        rho *= 2.0;
        U *= 0.5;
        w *= 0.5;
      } else if (dual > 10.0 * pri && rho > 1e-8) {
        rho *= 0.5;
        U *= 2.0;
        w *= 2.0;
      }
    }
  }
  out.S = S;
  if (dump.is_open()) {
    char line[128];
    std::snprintf(line, sizeof(line), "%d,%.12g,%.12g\n", out.iterations,
                  out.S.trace(), (P.y - P.Aop * P.sv.pack(out.S)).lpNorm<1>());
    dump << line;
  }
  return out;
}

}  // namespace

RecoveryInfeasibleError::RecoveryInfeasibleError(double minimal, double b)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "trace_min_recover: infeasible, minimal residual " << minimal
           << " exceeds budget " << b;
        return os.str();
      }()),
      minimal_residual(minimal),
      budget(b) {}

RecoveryResult trace_min_recover(const MeasurementSet& ms,
                                 const TraceMinOptions& options) {
  ms.validate();
  AdmmProblem P(ms);
  const double feas_tol = 1e-6 * (1.0 + P.y.lpNorm<1>());

  AdmmOutcome main = run_admm(P, 1.0, false, 0.5 * feas_tol, options);
  double res = P.residual_l1_of(main.S);

  RecoveryResult result;
  result.estimate = main.S;
  result.residual_l1 = res;
  result.solver_iterations = main.iterations;
  result.converged = main.converged && res <= P.eps + feas_tol;

  if (!result.converged) {
    // Feasible set may be numerically thin; the penalized solve chases the
    // minimum achievable residual with a vanishing trace weight.
    TraceMinOptions fallback_opt = options;
    fallback_opt.trace_csv_path.clear();
    AdmmOutcome fb = run_admm(P, 1e-8, true, 0.0, fallback_opt);
    const double fb_res = P.residual_l1_of(fb.S);
    if (fb.converged && fb_res > P.eps + 10.0 * feas_tol &&
        res > P.eps + 10.0 * feas_tol)
      throw RecoveryInfeasibleError(std::min(res, fb_res), P.eps);
    if (fb_res <= P.eps + feas_tol &&
        (res > P.eps + feas_tol || fb.S.trace() < main.S.trace())) {
      result.estimate = fb.S;
      result.residual_l1 = fb_res;
      result.solver_iterations = main.iterations + fb.iterations;
    }
  }
  result.trace = result.estimate.trace();
  result.residual_l1 = P.residual_l1_of(result.estimate);
  return result;
}

Matrix pgd_update(const Matrix& estimate, const Vector& u, double y,
                  double xi) {
  if (xi <= 0.0) throw std::invalid_argument("pgd_update: xi must be > 0");
  if (estimate.rows() != u.size())
    throw std::invalid_argument("pgd_update: dimension mismatch");
  const double residual = quad_form(estimate, u) - y;
  if (residual == 0.0) return estimate;  // zero gradient: no movement
  return psd_project(estimate - (xi * residual) * (u * u.transpose()));
}

RecoveryErrorReport recovery_error(const Matrix& estimate,
                                   const CostModel& model) {
  if (estimate.rows() != model.dim || estimate.cols() != model.dim)
    throw std::invalid_argument("recovery_error: dimension mismatch");
  RecoveryErrorReport rep;
  const Matrix delta = estimate - model.matrix();
  const MatrixNorms n = sym_norms(0.5 * (delta + delta.transpose()));
  rep.nuclear_gap = n.nuclear;
  rep.frobenius_gap = n.frobenius;
  rep.operator_gap = n.operator_norm;

  const SpectralForm ef = sym_eig(0.5 * (estimate + estimate.transpose()));
  rep.eigenvalue_gaps = ef.eigenvalues - model.spectral.eigenvalues;
  rep.weyl_violation = std::max(
      0.0, rep.eigenvalue_gaps.cwiseAbs().maxCoeff() - rep.operator_gap);

  const int r = model.rank;
  rep.subspace_distance = subspace_alignment(ef.basis.leftCols(r),
                                             model.spectral.basis.leftCols(r));
  if (rep.operator_gap < model.sigma_r_min)
    rep.sin_theta_bound = M_SQRT2 * rep.operator_gap /
                          (model.sigma_r_min - rep.operator_gap);
  return rep;
}

}  // namespace socolab
