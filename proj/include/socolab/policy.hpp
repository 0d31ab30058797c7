#pragma once

#include <vector>

#include "socolab/environment.hpp"
#include "socolab/spectral.hpp"

namespace socolab {

// Interpolation matrices C_t..C_T from the backward recursion
//   C_tau^{-1} = 2I + A_hat - C_{tau+1},  C_{T+1} = I.
// All iterates share the estimate's eigenbasis, so they are generated by one
// diagonalization plus a scalar recursion per eigenvalue.
struct PolicySchedule {
  int start_round = 1;
  int horizon = 0;
  Matrix source_estimate;         // PSD-clipped symmetrized input
  std::vector<Matrix> matrices;   // matrices[tau - start_round] = C_tau

  const Matrix& at(int t) const { return matrices.at(t - start_round); }
};

PolicySchedule recur_gen(const Matrix& estimate, int t, int T);

// Backward-recursion limit for a single eigenvalue a >= 0:
// the lambda in (0, 1] with 1/lambda = 2 + a - lambda.
double fixed_point(double a);

Vector interpolate_step(const Matrix& C, const Vector& x_prev, const Vector& v);

struct Trajectory {
  std::vector<Vector> actions;    // x_0..x_T
  std::vector<double> hitting;    // index t, entry 0 unused (= 0)
  std::vector<double> switching;  // index t, entry 0 unused (= 0)
  double cumulative = 0.0;

  int horizon() const { return static_cast<int>(actions.size()) - 1; }
};

// Plays the schedule against the path; costs are charged against the true
// model.  Requires a full-horizon schedule (start_round == 1).
Trajectory rollout(const PolicySchedule& schedule, const MinimizerPath& path,
                   const Vector& x_start, const CostModel& model);

// Full-knowledge benchmark: recur_gen on the true matrix, rolled out from the
// origin.
Trajectory lai_benchmark(const CostModel& model, const MinimizerPath& path);

// Max over tau of ||C_tau (2I + A_hat - C_{tau+1}) - I||_F, normalized by
// 1 + ||A_hat||_F so the diagnostic is scale-free; ~1e-14 for schedules
// built here.
double schedule_recursion_residual(const PolicySchedule& schedule);

}  // namespace socolab
