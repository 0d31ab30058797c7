#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "socolab/policy.hpp"
#include "socolab/recovery.hpp"

namespace socolab {

struct AgentParams {
  double eta_bar = 0.0;
  int rank_hint = 1;
  double sigma_floor = 1.0;  // lower estimate of the smallest nonzero eigenvalue
  int horizon = 0;
  double c1 = 3.0;           // exploration multiplier, m = round(c1 * r * d)
  double xi = 1e-6;          // gradient-agent learning rate
  bool noiseless = false;    // oracle-assisted variant of the passive learner

  void validate(int d) const;
};

struct GammaSchedule {
  double gamma_sq = 0.0;
  int m = 0;
  bool underdetermined = false;  // m < d(d+1)/2: recovery is under-determined
};

// gamma^2 = sqrt(eta_bar) * max{T^{2/3}, 1/sigma_floor} for rank-deficient
// hints and sqrt(eta_bar) * max{T^{1/2}, 1/sigma_floor} at full rank;
// m = round(c1 * r * d).  Errors when no exploitation rounds would remain.
GammaSchedule gamma_schedule(const AgentParams& params, int d);

enum class Phase : std::uint8_t { explore, exploit, none };
const char* to_string(Phase p);

enum class AgentKind { scale, hyscale, ftm, pol, oal, lai };
const char* to_string(AgentKind k);
AgentKind agent_kind_from_string(const std::string& name);

// Online decision-maker contract: the driver reveals v_t, receives x_t, then
// delivers the scalar feedback y_t.  Future path entries are never visible,
// which enforces causality structurally.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual Vector act(int t, const Vector& v_t) = 0;
  virtual void observe(int /*t*/, double /*y_t*/) {}
  virtual int exploration_rounds() const { return 0; }
  // Max recursion-identity residual across every schedule this agent built.
  virtual double max_recursion_residual() const { return 0.0; }
  // (round, estimate) snapshots: explore-end for the commit agents, per round
  // for the gradient agents.
  virtual const std::vector<std::pair<int, Matrix>>& estimates() const {
    static const std::vector<std::pair<int, Matrix>> none;
    return none;
  }
  // True when this agent never reads feedback delivered after its exploration
  // phase (used by the pairing tests).
  virtual bool discards_exploit_feedback() const { return false; }
};

struct RunRecord {
  Trajectory trajectory;
  std::vector<Phase> phase;  // index t, entry 0 = none
  std::vector<std::pair<int, Matrix>> estimate_history;
  GammaSchedule schedule_info;
  double max_recursion_residual = 0.0;
};

// Pre-drawn randomness shared by every agent evaluated on the same run, so
// comparisons are paired: one path, one probe stream, one noise stream.
struct RunInputs {
  const CostModel& model;
  const MinimizerPath& path;
  FeedbackSpec fb;
  std::span<const Vector> probe_draws;   // z_t, one per round
  std::span<const double> noise_draws;   // uniform [-1,1), one per round
};

std::unique_ptr<Agent> make_agent(AgentKind kind, const RunInputs& in,
                                  const AgentParams& params);

// Drives the agent over the whole horizon, charging true costs.
RunRecord drive_agent(Agent& agent, const RunInputs& in, bool noiseless);

RunRecord run_scale(const RunInputs& in, const AgentParams& params);
RunRecord run_hyscale(const RunInputs& in, const AgentParams& params);
RunRecord run_ftm(const RunInputs& in);
RunRecord run_pol(const RunInputs& in, const AgentParams& params,
                  bool noiseless);
RunRecord run_agent(AgentKind kind, const RunInputs& in,
                    const AgentParams& params);

// Gradient step consistent with feedback that measures half the quadratic
// form: psd_project(est - (xi/2) * (<est, uu'>/2 - y) * uu'), expressed
// through pgd_update so both code paths share one kernel.
Matrix quadratic_feedback_update(const Matrix& estimate, const Vector& u,
                                 double y, double xi);

}  // namespace socolab
