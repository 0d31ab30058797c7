#include "socolab/policy.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace socolab {

PolicySchedule recur_gen(const Matrix& estimate, int t, int T) {
  if (t < 1 || t > T) {
    std::ostringstream os;
    os << "recur_gen: need 1 <= t <= T, got t=" << t << " T=" << T;
    throw std::invalid_argument(os.str());
  }
  SpectralForm form = sym_eig(estimate);
  const int d = static_cast<int>(form.eigenvalues.size());
  for (int i = 0; i < d; ++i) {
    if (form.eigenvalues(i) < -1e-10) {
      std::ostringstream os;
      os << "recur_gen: estimate not PSD, min eigenvalue "
         << form.eigenvalues.minCoeff();
      throw std::invalid_argument(os.str());
    }
    form.eigenvalues(i) = std::max(0.0, form.eigenvalues(i));
  }

  PolicySchedule sched;
  sched.start_round = t;
  sched.horizon = T;
  const Matrix clipped = form.reconstruct();
  sched.source_estimate = 0.5 * (clipped + clipped.transpose());
  sched.matrices.resize(T - t + 1);

  Vector lam = Vector::Ones(d);  // lambda_{T+1}
  std::vector<Vector> lambdas(T - t + 1);
  for (int tau = T; tau >= t; --tau) {
    for (int i = 0; i < d; ++i)
      lam(i) = 1.0 / (2.0 + form.eigenvalues(i) - lam(i));
    lambdas[tau - t] = lam;
  }
  for (int k = 0; k < static_cast<int>(sched.matrices.size()); ++k) {
    Matrix C = form.basis * lambdas[k].asDiagonal() * form.basis.transpose();
    sched.matrices[k] = 0.5 * (C + C.transpose());
  }
  return sched;
}

double fixed_point(double a) {
  if (a < 0.0) throw std::invalid_argument("fixed_point: a must be >= 0");
  // (a + 2 - sqrt(a^2 + 4a)) / 2, rationalized to avoid cancellation
  return 2.0 / (a + 2.0 + std::sqrt(a * (a + 4.0)));
}

Vector interpolate_step(const Matrix& C, const Vector& x_prev,
                        const Vector& v) {
  if (C.rows() != x_prev.size() || C.rows() != v.size())
    throw std::invalid_argument("interpolate_step: dimension mismatch");
  return C * x_prev + (v - C * v);
}

Trajectory rollout(const PolicySchedule& schedule, const MinimizerPath& path,
                   const Vector& x_start, const CostModel& model) {
  const int T = path.horizon();
  if (schedule.start_round != 1 || schedule.horizon != T)
    throw std::invalid_argument("rollout: schedule does not cover the path");
  if (x_start.size() != model.dim)
    throw std::invalid_argument("rollout: dimension mismatch");

  Trajectory traj;
  traj.actions.reserve(T + 1);
  traj.actions.push_back(x_start);
  traj.hitting.assign(T + 1, 0.0);
  traj.switching.assign(T + 1, 0.0);
  for (int t = 1; t <= T; ++t) {
    const Vector x =
        interpolate_step(schedule.at(t), traj.actions.back(), path.values[t]);
    traj.hitting[t] = hitting_cost(model, path.values[t], x);
    traj.switching[t] = switching_cost(x, traj.actions.back());
    traj.cumulative += traj.hitting[t] + traj.switching[t];
    traj.actions.push_back(x);
  }
  return traj;
}

Trajectory lai_benchmark(const CostModel& model, const MinimizerPath& path) {
  const PolicySchedule sched = recur_gen(model.matrix(), 1, path.horizon());
  return rollout(sched, path, Vector::Zero(model.dim), model);
}

double schedule_recursion_residual(const PolicySchedule& schedule) {
  const int d = static_cast<int>(schedule.source_estimate.rows());
  const Matrix I = Matrix::Identity(d, d);
  const Matrix base = 2.0 * I + schedule.source_estimate;
  const double scale = 1.0 + schedule.source_estimate.norm();
  double worst = 0.0;
  for (std::size_t k = 0; k < schedule.matrices.size(); ++k) {
    const Matrix& next =
        (k + 1 < schedule.matrices.size()) ? schedule.matrices[k + 1] : I;
    const double res =
        (schedule.matrices[k] * (base - next) - I).norm() / scale;
    worst = std::max(worst, res);
  }
  return worst;
}

}  // namespace socolab
