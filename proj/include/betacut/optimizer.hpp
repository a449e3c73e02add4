#pragma once

#include <optional>
#include <string>
#include <vector>

#include "betacut/calculus.hpp"

namespace betacut {

/// Subset of reward sources a strategy maximizes (and is judged on).
struct Objective {
  bool block = false;
  bool linear = false;
  bool bernoulli = false;

  static Objective total() { return {true, true, true}; }
  static Objective only_block() { return {true, false, false}; }
  static Objective only_linear() { return {false, true, false}; }
  static Objective only_bernoulli() { return {false, false, true}; }
  static Objective parse(const std::string& name);

  bool empty() const { return !block && !linear && !bernoulli; }
  double value(const RewardBreakdown& b) const {
    return (block ? b.block : 0.0) + (linear ? b.linear : 0.0) +
           (bernoulli ? b.bernoulli : 0.0);
  }
  std::string name() const;
};

struct OptimizationResult {
  double beta_star = 0.0;
  double objective_value = 0.0;      // masked attacker reward at beta_star
  RewardBreakdown full_breakdown;    // full per-unit-time breakdown at beta_star
  double honest_value = 0.0;         // masked honest benchmark
  Equilibrium eq;                    // equilibrium at beta_star
};

/// Maximizes the masked per-unit-time attacker reward over the publish
/// cutoff. Candidates: a coarse grid over [C, C + E + 30], the no-hiding
/// cutoff beta = C, and beta = +inf; the best bracket is refined by
/// golden-section search.
OptimizationResult optimize_beta(const RewardSpec& spec, double alpha, double gamma,
                                 const Objective& objective,
                                 Engine engine = Engine::closed_form);

/// Smallest alpha in (0, 0.5) at which the optimized masked reward strictly
/// exceeds the masked honest benchmark (bisection to 1e-4). nullopt when no
/// such alpha exists below 0.5.
std::optional<double> profitability_threshold(const RewardSpec& spec, double gamma,
                                              const Objective& objective,
                                              Engine engine = Engine::closed_form);

struct SweepRow {
  double alpha = 0.0;
  Objective objective;
  OptimizationResult result;
};

/// One optimization per (alpha, objective) pair, alpha-major, input order
/// preserved. Grid points are independent and evaluated in parallel.
std::vector<SweepRow> sweep(const RewardSpec& spec, const std::vector<double>& alphas,
                            double gamma, const std::vector<Objective>& objectives,
                            Engine engine = Engine::closed_form);

}  // namespace betacut
