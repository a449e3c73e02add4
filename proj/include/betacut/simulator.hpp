#pragma once

#include <cstdint>
#include <vector>

#include "betacut/calculus.hpp"
#include "betacut/markov.hpp"
#include "betacut/reward_spec.hpp"

namespace betacut {

/// How the simulator picks the block production rate 1/(1 - lambda).
enum class LambdaMode {
  analytic,          // solve the equilibrium and use its orphan rate
  self_calibrating,  // iterate runs until the canonical chain grows at rate 1
  fixed,             // use the supplied orphan rate as-is
};

struct SimConfig {
  RewardSpec spec = RewardSpec::constant(1.0);
  AttackerParams params;
  LambdaMode lambda_mode = LambdaMode::analytic;
  double fixed_lambda = 0.0;
  std::int64_t horizon_events = 1'000'000;
  std::uint64_t seed = 0;
  int replicas = 1;

  void validate() const;
};

/// Compact state label used for traces and occupancy counts:
/// 0 = no fork, 1 = length-1 race, 2 = just published, 2+i = hidden lead i.
int encode_state(bool race, bool post_publish, int lead);
std::string state_name(int code);

struct TraceRecord {
  std::int64_t index = 0;
  double time = 0.0;
  char winner = 'H';      // 'A' attacker, 'H' honest
  int state_before = 0;
  int state_after = 0;
  char action = 'p';      // 'h' hide, 'e' extend private chain, 'p' publish
  double reward = 0.0;    // realized reward of the created block
};

struct ComponentStats {
  RewardBreakdown mean;
  RewardBreakdown se;
};

struct SimResult {
  ComponentStats attacker;  // canonical reward per unit time, with SEs
  ComponentStats honest;
  double empirical_orphan_rate = 0.0;
  double orphan_rate_se = 0.0;
  double canonical_growth_rate = 0.0;  // canonical blocks per unit time
  std::int64_t events = 0;             // block creations across all replicas
  double elapsed_sim_time = 0.0;       // decided (canonicalized) time, summed
  double lambda_used = 0.0;
  std::int64_t canonical_blocks = 0;
  std::int64_t orphaned_blocks = 0;
  std::vector<double> occupancy;  // visit frequency by encoded state
};

/// Runs horizon_events block creations per replica and measures canonical
/// rewards per unit time. Identical (seed, config) pairs produce identical
/// results; replicas use seeds derived from the base seed and run in
/// parallel. When trace is non-null, the first replica's events are
/// recorded.
SimResult simulate(const SimConfig& config, std::vector<TraceRecord>* trace = nullptr);

/// Iterates simulation runs, feeding the measured orphan fraction back into
/// the block production rate until the canonical chain grows at rate
/// 1 +- growth_tol. Returns the implied empirical orphan rate.
double calibrate_lambda(const RewardSpec& spec, const AttackerParams& params,
                        std::int64_t events_per_round, std::uint64_t seed,
                        int max_rounds = 20, double growth_tol = 0.002);

/// Visit frequencies by encoded state, computed from an event trace.
std::vector<double> state_occupancy(const std::vector<TraceRecord>& trace);

}  // namespace betacut
