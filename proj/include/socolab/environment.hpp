#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "socolab/spectral.hpp"

namespace socolab {

// The unknown curvature of the quadratic hitting cost, kept with its spectral
// factors so diagnostics can reach eigenvalues and eigenvectors directly.
struct CostModel {
  int dim = 0;
  int rank = 0;
  SpectralForm spectral;   // exactly `rank` positive eigenvalues, rest zero
  double sigma_r_min = 0;  // smallest nonzero eigenvalue
  double sigma_max = 0;    // largest eigenvalue
  Matrix dense;            // cached basis * diag * basis'

  const Matrix& matrix() const { return dense; }
};

enum class ProcessKind { iid_gaussian, correlated_gaussian, laplace, cauchy };

const char* to_string(ProcessKind k);
ProcessKind process_kind_from_string(const std::string& name);

struct ProcessSpec {
  ProcessKind kind = ProcessKind::iid_gaussian;
  double sigma_v = 1.0;  // per-coordinate scale; 0 allowed (degenerate paths)
  double alpha = 1.0;    // correlation weight, correlated_gaussian only
  int dim = 1;

  void validate() const;

  // Increment covariance for the Gaussian kinds; nullopt for the heavy-tailed
  // kinds, whose covariance-based oracles are refused.  For the correlated
  // kind this is the stationary covariance; early increments are
  // sub-stationary because the recursion starts from a zero increment.
  std::optional<Matrix> increment_covariance() const;
};

// Realized minimizer sequence v_0..v_T with v_0 = 0.
struct MinimizerPath {
  std::vector<Vector> values;
  ProcessSpec spec;
  std::uint64_t seed = 0;

  int horizon() const { return static_cast<int>(values.size()) - 1; }
};

struct FeedbackSpec {
  double eta_bar = 0.0;  // noise cap, >= 0

  void validate() const;
};

// eigenvalues: either r positive values or a single value replicated r times.
CostModel make_cost_matrix(int d, int r, const std::vector<double>& eigenvalues,
                           std::mt19937_64& rng);
// Basis override for tests and pinned instances.
CostModel make_cost_matrix_with_basis(int d, int r,
                                      const std::vector<double>& eigenvalues,
                                      const Matrix& basis);

MinimizerPath sample_path(const ProcessSpec& spec, int T, std::uint64_t seed);

double hitting_cost(const CostModel& model, const Vector& v, const Vector& x);
double switching_cost(const Vector& x, const Vector& x_prev);

// f(x) + eta with eta uniform on [-eta_bar, eta_bar]; |eta| <= eta_bar always.
double bandit_feedback(const CostModel& model, const Vector& v, const Vector& x,
                       const FeedbackSpec& fb, std::mt19937_64& rng);

// One uniform draw on [-1, 1); feedback noise is eta_bar * draw, so a run's
// noise stream is independent of eta_bar's value (including 0).
double unit_noise_draw(std::mt19937_64& rng);

}  // namespace socolab
