#pragma once

#include "betacut/breakdown.hpp"
#include "betacut/reward_spec.hpp"

namespace betacut {

/// Strategy parameters of the withholding miner.
struct AttackerParams {
  double alpha = 0.0;  // attacker hashrate fraction, in [0, 0.5)
  double gamma = 0.0;  // honest fraction mining the attacker tip in a race
  double beta = 0.0;   // publish cutoff in reward units (+inf = always hide)

  void validate() const;
};

/// Stationary distribution of the withholding chain. States beyond the
/// first lead state carry geometrically decaying mass with the given ratio.
struct StationaryDistribution {
  double p0 = 1.0;
  double p0_prime = 0.0;
  double p0_dprime = 0.0;
  double p1 = 0.0;
  double tail_ratio = 0.0;  // alpha / (1 - alpha)

  /// Total mass of all lead states i >= 1.
  double lead_mass() const { return tail_ratio < 1.0 ? p1 / (1.0 - tail_ratio) : 0.0; }
  double simplex_sum() const { return p0 + p0_prime + p0_dprime + lead_mass(); }
};

/// Solved difficulty equilibrium: orphan rate, hide probability and the
/// stationary distribution they induce.
struct Equilibrium {
  double lambda = 0.0;
  double h = 0.0;
  StationaryDistribution stationary;
  int iterations = 0;
};

/// Moments of the reward law censored at the cutoff, averaged over an
/// exponential inter-block time with mean (1 - lambda):
///   hide_prob = Pr[R <= cutoff], above = E[R 1{R > cutoff}] by source,
///   below = E[R 1{R <= cutoff}] by source.
struct ExpCensoring {
  double hide_prob = 0.0;
  RewardBreakdown above;
  RewardBreakdown below;
};

ExpCensoring censor_at_cutoff(const RewardSpec& spec, double beta, double lambda,
                              Engine engine = Engine::closed_form);

/// Probability that a fresh attacker block falls below the cutoff and is
/// withheld (the alpha factor is applied by the caller).
double hide_probability(const RewardSpec& spec, const AttackerParams& params, double lambda,
                        Engine engine = Engine::closed_form);

/// Stationary distribution given the hide probability.
StationaryDistribution stationary(double alpha, double h);

/// Long-run fraction of produced blocks that end up orphaned.
double orphan_rate(double alpha, double p1);

/// Fixed point of the orphan-rate map; couples the hide decision to the
/// difficulty-adjusted block production rate 1/(1 - lambda).
Equilibrium solve_equilibrium(const RewardSpec& spec, const AttackerParams& params,
                              Engine engine = Engine::closed_form);

}  // namespace betacut
