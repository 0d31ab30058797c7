#include "socolab/agents.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace socolab {

void AgentParams::validate(int d) const {
  if (eta_bar < 0.0) throw std::invalid_argument("AgentParams: eta_bar >= 0");
  if (rank_hint < 1 || rank_hint > d)
    throw std::invalid_argument("AgentParams: need 1 <= rank_hint <= d");
  if (sigma_floor <= 0.0)
    throw std::invalid_argument("AgentParams: sigma_floor must be > 0");
  if (horizon < 1) throw std::invalid_argument("AgentParams: horizon >= 1");
  if (c1 <= 0.0) throw std::invalid_argument("AgentParams: c1 must be > 0");
  if (xi < 0.0) throw std::invalid_argument("AgentParams: xi must be >= 0");
}

GammaSchedule gamma_schedule(const AgentParams& params, int d) {
  params.validate(d);
  GammaSchedule gs;
  gs.m = static_cast<int>(std::llround(params.c1 * params.rank_hint * d));
  if (gs.m < 1) gs.m = 1;
  if (gs.m >= params.horizon) {
    std::ostringstream os;
    os << "gamma_schedule: m=" << gs.m << " leaves no exploitation rounds in T="
       << params.horizon;
    throw std::invalid_argument(os.str());
  }
  const double T = static_cast<double>(params.horizon);
  const double horizon_term = params.rank_hint < d
                                  ? std::pow(T, 2.0 / 3.0)
                                  : std::sqrt(T);
  gs.gamma_sq = std::sqrt(params.eta_bar) *
                std::max(horizon_term, 1.0 / params.sigma_floor);
  if (gs.gamma_sq <= 0.0) gs.gamma_sq = std::max(horizon_term, 1.0);
  gs.underdetermined = gs.m < d * (d + 1) / 2;
  return gs;
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::explore: return "explore";
    case Phase::exploit: return "exploit";
    case Phase::none: return "";
  }
  return "";
}

const char* to_string(AgentKind k) {
  switch (k) {
    case AgentKind::scale: return "scale";
    case AgentKind::hyscale: return "hyscale";
    case AgentKind::ftm: return "ftm";
    case AgentKind::pol: return "pol";
    case AgentKind::oal: return "oal";
    case AgentKind::lai: return "lai";
  }
  return "?";
}

AgentKind agent_kind_from_string(const std::string& name) {
  if (name == "scale") return AgentKind::scale;
  if (name == "hyscale") return AgentKind::hyscale;
  if (name == "ftm") return AgentKind::ftm;
  if (name == "pol") return AgentKind::pol;
  if (name == "oal") return AgentKind::oal;
  if (name == "lai") return AgentKind::lai;
  throw std::invalid_argument("unknown agent: " + name);
}

Matrix quadratic_feedback_update(const Matrix& estimate, const Vector& u,
                                 double y, double xi) {
  // xi = 0 degenerates to no learning at all, bit for bit
  if (xi == 0.0) return estimate;
  return pgd_update(estimate, u, 2.0 * y, 0.25 * xi);
}

namespace {

class FtmAgent final : public Agent {
 public:
  Vector act(int, const Vector& v_t) override { return v_t; }
};

class LaiAgent final : public Agent {
 public:
  LaiAgent(const CostModel& model, int T)
      : schedule_(recur_gen(model.matrix(), 1, T)),
        x_(Vector::Zero(model.dim)) {
    residual_ = schedule_recursion_residual(schedule_);
  }

  Vector act(int t, const Vector& v_t) override {
    x_ = interpolate_step(schedule_.at(t), x_, v_t);
    return x_;
  }
  double max_recursion_residual() const override { return residual_; }

 private:
  PolicySchedule schedule_;
  Vector x_;
  double residual_ = 0.0;
};

// Explore-then-commit: scaled Gaussian probes for m rounds, one trace-norm
// recovery, then the committed interpolation schedule replayed from a virtual
// trajectory.  Feedback received after round m is discarded.
class ScaleAgent : public Agent {
 public:
  ScaleAgent(const RunInputs& in, const AgentParams& params)
      : in_(in),
        params_(params),
        d_(in.model.dim),
        T_(params.horizon),
        gs_(gamma_schedule(params, in.model.dim)),
        x_(Vector::Zero(in.model.dim)) {
    if (static_cast<int>(in.probe_draws.size()) < gs_.m)
      throw std::invalid_argument("ScaleAgent: not enough probe draws");
    seen_v_.reserve(gs_.m + 1);
    seen_v_.push_back(Vector::Zero(d_));  // v_0
    ys_.reserve(gs_.m);
  }

  Vector act(int t, const Vector& v_t) override {
    if (t <= gs_.m) {
      seen_v_.push_back(v_t);
      x_ = v_t + std::sqrt(gs_.gamma_sq) * in_.probe_draws[t - 1];
      return x_;
    }
    if (t == gs_.m + 1) commit(v_t);
    x_ = interpolate_step(schedule_.at(t), t == gs_.m + 1 ? virtual_state_ : x_,
                          v_t);
    return x_;
  }

  void observe(int t, double y_t) override {
    if (t <= gs_.m) ys_.push_back(y_t);
  }

  int exploration_rounds() const override { return gs_.m; }
  double max_recursion_residual() const override { return residual_; }
  const std::vector<std::pair<int, Matrix>>& estimates() const override {
    return estimates_;
  }
  bool discards_exploit_feedback() const override { return true; }
  const GammaSchedule& schedule_info() const { return gs_; }

 protected:
  void commit(const Vector&) {
    MeasurementSet ms;
    ms.gamma_sq = gs_.gamma_sq;
    ms.noise_budget = params_.eta_bar * gs_.m / gs_.gamma_sq;
    ms.probes.assign(in_.probe_draws.begin(),
                     in_.probe_draws.begin() + gs_.m);
    ms.observations.resize(gs_.m);
    for (int k = 0; k < gs_.m; ++k) ms.observations(k) = ys_[k] / gs_.gamma_sq;

    RecoveryResult rec = trace_min_recover(ms);
    estimate_ = rec.estimate;
    estimates_.emplace_back(gs_.m + 1, estimate_);

    schedule_ = recur_gen(estimate_, 1, T_);
    residual_ = std::max(residual_, schedule_recursion_residual(schedule_));

    // Replay of the committed policy over the exploration rounds; the round
    // m+1 action continues from this virtual state, not the last probe point.
    virtual_state_ = Vector::Zero(d_);
    for (int tau = 1; tau <= gs_.m; ++tau)
      virtual_state_ =
          interpolate_step(schedule_.at(tau), virtual_state_, seen_v_[tau]);
  }

  const RunInputs& in_;
  AgentParams params_;
  int d_;
  int T_;
  GammaSchedule gs_;
  Vector x_;
  std::vector<Vector> seen_v_;
  std::vector<double> ys_;
  Matrix estimate_;
  PolicySchedule schedule_;
  Vector virtual_state_;
  double residual_ = 0.0;
  std::vector<std::pair<int, Matrix>> estimates_;
};

// Same exploration and hand-off as the commit agent, then keeps learning: a
// projected gradient step on the previous round's feedback refreshes the
// estimate, and the tail schedule is re-derived before each action.
class HyscaleAgent final : public ScaleAgent {
 public:
  using ScaleAgent::ScaleAgent;

  Vector act(int t, const Vector& v_t) override {
    if (t <= gs_.m + 1) {
      const Vector x = ScaleAgent::act(t, v_t);
      last_u_ = x - v_t;
      return x;
    }
    estimate_ = quadratic_feedback_update(estimate_, last_u_, last_y_,
                                          params_.xi);
    estimates_.emplace_back(t, estimate_);
    const PolicySchedule tail = recur_gen(estimate_, t, T_);
    residual_ = std::max(residual_, schedule_recursion_residual(tail));
    x_ = interpolate_step(tail.at(t), x_, v_t);
    last_u_ = x_ - v_t;
    return x_;
  }

  void observe(int t, double y_t) override {
    ScaleAgent::observe(t, y_t);
    if (t >= gs_.m + 1) last_y_ = y_t;
  }

  bool discards_exploit_feedback() const override { return false; }

 private:
  Vector last_u_;
  double last_y_ = 0.0;
};

// Passive online learner: naive identity estimate refined by one projected
// gradient step per round; the tail schedule is re-derived every round.
class PolAgent final : public Agent {
 public:
  PolAgent(const RunInputs& in, const AgentParams& params)
      : params_(params),
        d_(in.model.dim),
        T_(params.horizon),
        estimate_(Matrix::Identity(in.model.dim, in.model.dim)),
        x_(Vector::Zero(in.model.dim)) {}

  Vector act(int t, const Vector& v_t) override {
    if (t >= 2) {
      estimate_ =
          quadratic_feedback_update(estimate_, last_u_, last_y_, params_.xi);
      estimates_.emplace_back(t, estimate_);
    }
    const PolicySchedule tail = recur_gen(estimate_, t, T_);
    residual_ = std::max(residual_, schedule_recursion_residual(tail));
    x_ = interpolate_step(tail.at(t), x_, v_t);
    last_u_ = x_ - v_t;
    return x_;
  }

  void observe(int, double y_t) override { last_y_ = y_t; }

  double max_recursion_residual() const override { return residual_; }
  const std::vector<std::pair<int, Matrix>>& estimates() const override {
    return estimates_;
  }

 private:
  AgentParams params_;
  int d_;
  int T_;
  Matrix estimate_;
  Vector x_;
  Vector last_u_;
  double last_y_ = 0.0;
  double residual_ = 0.0;
  std::vector<std::pair<int, Matrix>> estimates_;
};

}  // namespace

std::unique_ptr<Agent> make_agent(AgentKind kind, const RunInputs& in,
                                  const AgentParams& params) {
  switch (kind) {
    case AgentKind::scale: return std::make_unique<ScaleAgent>(in, params);
    case AgentKind::hyscale: return std::make_unique<HyscaleAgent>(in, params);
    case AgentKind::ftm: return std::make_unique<FtmAgent>();
    case AgentKind::pol:
    case AgentKind::oal: return std::make_unique<PolAgent>(in, params);
    case AgentKind::lai:
      return std::make_unique<LaiAgent>(in.model, params.horizon);
  }
  throw std::logic_error("make_agent: unreachable");
}

RunRecord drive_agent(Agent& agent, const RunInputs& in, bool noiseless) {
  const int T = in.path.horizon();
  if (static_cast<int>(in.noise_draws.size()) < T)
    throw std::invalid_argument("drive_agent: not enough noise draws");

  RunRecord rec;
  Trajectory& traj = rec.trajectory;
  traj.actions.reserve(T + 1);
  traj.actions.push_back(Vector::Zero(in.model.dim));
  traj.hitting.assign(T + 1, 0.0);
  traj.switching.assign(T + 1, 0.0);
  rec.phase.assign(T + 1, Phase::none);

  const int m = agent.exploration_rounds();
  for (int t = 1; t <= T; ++t) {
    const Vector x = agent.act(t, in.path.values[t]);
    traj.hitting[t] = hitting_cost(in.model, in.path.values[t], x);
    traj.switching[t] = switching_cost(x, traj.actions.back());
    traj.cumulative += traj.hitting[t] + traj.switching[t];
    traj.actions.push_back(x);
    rec.phase[t] = m > 0 ? (t <= m ? Phase::explore : Phase::exploit)
                         : Phase::none;
    const double y = noiseless
                         ? traj.hitting[t]
                         : traj.hitting[t] + in.fb.eta_bar * in.noise_draws[t - 1];
    agent.observe(t, y);
  }
  rec.estimate_history = agent.estimates();
  rec.max_recursion_residual = agent.max_recursion_residual();
  return rec;
}

RunRecord run_scale(const RunInputs& in, const AgentParams& params) {
  ScaleAgent agent(in, params);
  RunRecord rec = drive_agent(agent, in, false);
  rec.schedule_info = agent.schedule_info();
  return rec;
}

RunRecord run_hyscale(const RunInputs& in, const AgentParams& params) {
  HyscaleAgent agent(in, params);
  RunRecord rec = drive_agent(agent, in, false);
  rec.schedule_info = agent.schedule_info();
  return rec;
}

RunRecord run_ftm(const RunInputs& in) {
  FtmAgent agent;
  return drive_agent(agent, in, false);
}

RunRecord run_pol(const RunInputs& in, const AgentParams& params,
                  bool noiseless) {
  PolAgent agent(in, params);
  return drive_agent(agent, in, noiseless);
}

RunRecord run_agent(AgentKind kind, const RunInputs& in,
                    const AgentParams& params) {
  auto agent = make_agent(kind, in, params);
  RunRecord rec = drive_agent(*agent, in, kind == AgentKind::oal);
  if (kind == AgentKind::scale || kind == AgentKind::hyscale)
    rec.schedule_info = static_cast<ScaleAgent&>(*agent).schedule_info();
  return rec;
}

}  // namespace socolab
