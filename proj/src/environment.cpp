#include "socolab/environment.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "socolab/random.hpp"

namespace socolab {

const char* to_string(ProcessKind k) {
  switch (k) {
    case ProcessKind::iid_gaussian: return "iid_gaussian";
    case ProcessKind::correlated_gaussian: return "correlated_gaussian";
    case ProcessKind::laplace: return "laplace";
    case ProcessKind::cauchy: return "cauchy";
  }
  return "?";
}

ProcessKind process_kind_from_string(const std::string& name) {
  if (name == "iid_gaussian") return ProcessKind::iid_gaussian;
  if (name == "correlated_gaussian") return ProcessKind::correlated_gaussian;
  if (name == "laplace") return ProcessKind::laplace;
  if (name == "cauchy") return ProcessKind::cauchy;
  throw std::invalid_argument("unknown process kind: " + name);
}

void ProcessSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("ProcessSpec: dim must be >= 1");
  if (sigma_v < 0.0)
    throw std::invalid_argument("ProcessSpec: sigma_v must be >= 0");
  if (kind == ProcessKind::correlated_gaussian &&
      (alpha <= 0.0 || alpha > 1.0))
    throw std::invalid_argument("ProcessSpec: alpha must be in (0, 1]");
}

std::optional<Matrix> ProcessSpec::increment_covariance() const {
  switch (kind) {
    case ProcessKind::iid_gaussian:
      return Matrix(sigma_v * sigma_v * Matrix::Identity(dim, dim));
    case ProcessKind::correlated_gaussian: {
      const double a2 = alpha * alpha;
      const double denom = 1.0 - (1.0 - alpha) * (1.0 - alpha);
      return Matrix(a2 * sigma_v * sigma_v / denom * Matrix::Identity(dim, dim));
    }
    case ProcessKind::laplace:
    case ProcessKind::cauchy:
      return std::nullopt;
  }
  return std::nullopt;
}

void FeedbackSpec::validate() const {
  if (eta_bar < 0.0)
    throw std::invalid_argument("FeedbackSpec: eta_bar must be >= 0");
}

namespace {

std::vector<double> expand_eigenvalues(int r,
                                       const std::vector<double>& spec) {
  std::vector<double> vals;
  if (static_cast<int>(spec.size()) == r) {
    vals = spec;
  } else if (spec.size() == 1) {
    vals.assign(r, spec[0]);
  } else {
    std::ostringstream os;
    os << "make_cost_matrix: eigenvalue spec has " << spec.size()
       << " entries, expected 1 or r=" << r;
    throw std::invalid_argument(os.str());
  }
  for (double v : vals)
    if (v <= 0.0)
      throw std::invalid_argument(
          "make_cost_matrix: eigenvalues must be positive");
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  return vals;
}

}  // namespace

CostModel make_cost_matrix_with_basis(int d, int r,
                                      const std::vector<double>& eigenvalues,
                                      const Matrix& basis) {
  if (d < 1) throw std::invalid_argument("make_cost_matrix: d must be >= 1");
  if (r < 1 || r > d)
    throw std::invalid_argument("make_cost_matrix: need 1 <= r <= d");
  if (basis.rows() != d || basis.cols() != d)
    throw std::invalid_argument("make_cost_matrix: basis must be d x d");
  const std::vector<double> vals = expand_eigenvalues(r, eigenvalues);

  CostModel m;
  m.dim = d;
  m.rank = r;
  m.spectral.basis = basis;
  m.spectral.eigenvalues = Vector::Zero(d);
  for (int i = 0; i < r; ++i) m.spectral.eigenvalues(i) = vals[i];
  m.sigma_r_min = vals[r - 1];
  m.sigma_max = vals[0];
  Matrix A = m.spectral.reconstruct();
  m.dense = 0.5 * (A + A.transpose());
  return m;
}

CostModel make_cost_matrix(int d, int r, const std::vector<double>& eigenvalues,
                           std::mt19937_64& rng) {
  return make_cost_matrix_with_basis(d, r, eigenvalues,
                                     random_orthonormal(d, rng));
}

namespace {

double laplace_draw(double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-0.5, 0.5);
  double u = uni(rng);
  // inverse CDF; guard the open endpoint
  const double a = std::max(1e-300, 1.0 - 2.0 * std::abs(u));
  return -scale * (u >= 0.0 ? 1.0 : -1.0) * std::log(a);
}

}  // namespace

MinimizerPath sample_path(const ProcessSpec& spec, int T, std::uint64_t seed) {
  spec.validate();
  if (T < 1) throw std::invalid_argument("sample_path: T must be >= 1");
  std::mt19937_64 rng = make_engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::cauchy_distribution<double> cauchy(0.0, 1.0);

  MinimizerPath path;
  path.spec = spec;
  path.seed = seed;
  path.values.reserve(T + 1);
  path.values.push_back(Vector::Zero(spec.dim));

  Vector delta_prev = Vector::Zero(spec.dim);
  for (int t = 1; t <= T; ++t) {
    Vector delta(spec.dim);
    switch (spec.kind) {
      case ProcessKind::iid_gaussian:
        for (int i = 0; i < spec.dim; ++i) delta(i) = spec.sigma_v * gauss(rng);
        break;
      case ProcessKind::correlated_gaussian:
        for (int i = 0; i < spec.dim; ++i)
          delta(i) = (1.0 - spec.alpha) * delta_prev(i) +
                     spec.alpha * spec.sigma_v * gauss(rng);
        break;
      case ProcessKind::laplace:
        for (int i = 0; i < spec.dim; ++i)
          delta(i) = laplace_draw(spec.sigma_v, rng);
        break;
      case ProcessKind::cauchy:
        for (int i = 0; i < spec.dim; ++i)
          delta(i) = spec.sigma_v * cauchy(rng);
        break;
    }
    path.values.push_back(path.values.back() + delta);
    delta_prev = delta;
  }
  return path;
}

double hitting_cost(const CostModel& model, const Vector& v, const Vector& x) {
  if (v.size() != model.dim || x.size() != model.dim)
    throw std::invalid_argument("hitting_cost: dimension mismatch");
  const Vector u = x - v;
  return std::max(0.0, 0.5 * quad_form(model.matrix(), u));
}

double switching_cost(const Vector& x, const Vector& x_prev) {
  if (x.size() != x_prev.size())
    throw std::invalid_argument("switching_cost: dimension mismatch");
  return 0.5 * (x - x_prev).squaredNorm();
}

double unit_noise_draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  return uni(rng);
}

double bandit_feedback(const CostModel& model, const Vector& v, const Vector& x,
                       const FeedbackSpec& fb, std::mt19937_64& rng) {
  fb.validate();
  return hitting_cost(model, v, x) + fb.eta_bar * unit_noise_draw(rng);
}

}  // namespace socolab
