#pragma once

#include "betacut/breakdown.hpp"
#include "betacut/markov.hpp"
#include "betacut/reward_spec.hpp"

namespace betacut {

/// Expected attacker reward credited from the no-fork state, split by the
/// three ways a fresh attacker block can end up on the canonical chain:
/// published immediately (case_i), extended by a second attacker block
/// (case_ii), or winning the length-1 race (case_iii).
struct StateZeroRewards {
  RewardBreakdown case_i;
  RewardBreakdown case_ii;
  RewardBreakdown case_iii;

  RewardBreakdown total() const { return case_i + case_ii + case_iii; }
};

/// Expected attacker reward canonicalized from lead state i (i >= 1 uses the
/// path family of state i+... with i paths; the first lead state is the
/// two-path instance i = 2). Per chain event, not per unit time.
RewardBreakdown f_state(const RewardSpec& spec, int i, double alpha, double lambda,
                        Engine engine = Engine::closed_form);

/// Expected attacker reward canonicalized from the no-fork state.
StateZeroRewards f_zero(const RewardSpec& spec, const AttackerParams& params, double lambda,
                        Engine engine = Engine::closed_form);

/// Aggregate contribution of all lead states i >= 2, already weighted by
/// alpha and the stationary masses. extra_terms extends the truncation of
/// the quadrature route (used to test truncation stability).
RewardBreakdown lead_tail_contribution(const RewardSpec& spec, double alpha, double lambda,
                                       double p1, Engine engine = Engine::closed_form,
                                       int extra_terms = 0);

struct AttackerReward {
  RewardBreakdown per_unit_time;  // final result: reward per unit time
  Equilibrium eq;
  StateZeroRewards f0;
  RewardBreakdown f1;
  RewardBreakdown lead_tail;  // weighted tail, per chain event
};

/// Expected attacker reward per unit time at the solved difficulty
/// equilibrium.
AttackerReward attacker_reward(const RewardSpec& spec, const AttackerParams& params,
                               Engine engine = Engine::closed_form);

/// Same, but with the orphan rate supplied instead of solved; used for
/// sweeps that treat the difficulty adjustment as exogenous.
AttackerReward attacker_reward_at(const RewardSpec& spec, const AttackerParams& params,
                                  double lambda, Engine engine = Engine::closed_form);

/// Per-unit-time reward of an alpha-fraction miner when everyone follows
/// the protocol (no orphans, canonical blocks at rate 1).
RewardBreakdown honest_benchmark(const RewardSpec& spec, double alpha);

/// Always-hide strategy under a unit block reward and no other sources.
/// Direct transcription of the constant-reward specialization; agrees with
/// attacker_reward(constant(1), beta=+inf).
double selfish_block_only(double alpha, double gamma);

}  // namespace betacut
