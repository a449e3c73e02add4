#include "betacut/calculus.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "betacut/quadrature.hpp"

namespace betacut {

namespace {

constexpr double kTailBoundTol = 1e-12;
constexpr double kErlangTailEps = 1e-14;
constexpr int kMaxLeadStates = 4096;

void check_state_inputs(int i, double alpha, double lambda) {
  if (i < 1) throw std::invalid_argument("lead state index must be >= 1");
  if (!(alpha >= 0.0 && alpha < 0.5)) {
    throw std::invalid_argument("alpha must lie in [0, 0.5)");
  }
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("lambda must lie in [0, 1)");
  }
}

/// Expected reward components claimed by the single attacker block closing a
/// path of j+1 inter-block times (numeric route).
RewardBreakdown path_integral_quadrature(const RewardSpec& spec, int j, double mean) {
  const double hi = quad::erlang_tail_cutoff(j + 1, mean, kErlangTailEps);
  const auto density = [&](double t) { return quad::erlang_pdf(j + 1, mean, t); };
  RewardBreakdown out;
  out.block = spec.constant_total() *
              quad::adaptive_simpson([&](double t) { return density(t); }, 0.0, hi);
  out.linear = spec.linear_rate() *
               quad::adaptive_simpson([&](double t) { return density(t) * t; }, 0.0, hi);
  out.bernoulli = spec.bernoulli_mean() *
                  quad::adaptive_simpson([&](double t) { return density(t); }, 0.0, hi);
  return out;
}

RewardBreakdown f_state_closed(const RewardSpec& spec, int i, double alpha, double lambda) {
  // Partial geometric sums over the i paths; summation avoids the
  // cancellation of the equivalent closed expressions at small alpha.
  const double mean = 1.0 - lambda;
  double win_mass = 0.0;    // sum alpha (1-alpha)^j
  double length_mass = 0.0;  // sum alpha (1-alpha)^j (j+1)
  double geom = alpha;
  for (int j = 0; j < i; ++j) {
    win_mass += geom;
    length_mass += geom * (j + 1);
    geom *= 1.0 - alpha;
  }
  RewardBreakdown out;
  out.block = spec.constant_total() * win_mass;
  out.bernoulli = spec.bernoulli_mean() * win_mass;
  out.linear = spec.linear_rate() * mean * length_mass;
  return out;
}

RewardBreakdown f_state_quadrature(const RewardSpec& spec, int i, double alpha,
                                   double lambda) {
  const double mean = 1.0 - lambda;
  RewardBreakdown out;
  double geom = alpha;
  for (int j = 0; j < i; ++j) {
    out += geom * path_integral_quadrature(spec, j, mean);
    geom *= 1.0 - alpha;
  }
  return out;
}

RewardBreakdown lead_tail_closed(const RewardSpec& spec, double alpha, double lambda,
                                 double p1) {
  const double mean = 1.0 - lambda;
  const double denom = 1.0 - 2.0 * alpha;
  RewardBreakdown out;
  const double win_factor = 2.0 * alpha * alpha * (1.0 - alpha) / denom;
  out.block = p1 * spec.constant_total() * win_factor;
  out.bernoulli = p1 * spec.bernoulli_mean() * win_factor;
  out.linear = p1 * spec.linear_rate() * mean * alpha * alpha * (3.0 - 2.0 * alpha) / denom;
  return out;
}

RewardBreakdown lead_tail_quadrature(const RewardSpec& spec, double alpha, double lambda,
                                     double p1, int extra_terms) {
  const double mean = 1.0 - lambda;
  const double ratio = alpha / (1.0 - alpha);
  // f_i is bounded by the full-geometric path sums, uniformly in i.
  const double f_bound = spec.constant_total() + spec.bernoulli_mean() +
                         spec.linear_rate() * mean / alpha;
  const double first_bound = alpha * p1 * ratio / (1.0 - ratio) * f_bound;
  if (first_bound >= kTailBoundTol) {
    const double needed =
        2.0 + std::log(kTailBoundTol / first_bound) / std::log(ratio) + extra_terms;
    if (needed > kMaxLeadStates) {
      throw std::runtime_error("lead-state tail truncation did not converge");
    }
  }
  RewardBreakdown out;
  RewardBreakdown f_i;               // path sum for the current state index
  double geom = alpha;               // alpha (1-alpha)^j for the next path
  double state_weight = alpha * p1;  // alpha * p_{i-1}
  int pending_extra = extra_terms;
  int next_path = 0;
  bool converged = false;
  for (int i = 2; i <= kMaxLeadStates; ++i) {
    while (next_path < i) {
      f_i += geom * path_integral_quadrature(spec, next_path, mean);
      geom *= 1.0 - alpha;
      ++next_path;
    }
    out += state_weight * f_i;
    const double tail_bound = state_weight * ratio / (1.0 - ratio) * f_bound;
    state_weight *= ratio;
    if (tail_bound < kTailBoundTol) {
      converged = true;
      if (pending_extra <= 0) break;
      --pending_extra;
    }
  }
  if (!converged) {
    throw std::runtime_error("lead-state tail truncation did not converge");
  }
  return out;
}

}  // namespace

RewardBreakdown f_state(const RewardSpec& spec, int i, double alpha, double lambda,
                        Engine engine) {
  check_state_inputs(i, alpha, lambda);
  if (alpha == 0.0) return {};
  return engine == Engine::closed_form ? f_state_closed(spec, i, alpha, lambda)
                                       : f_state_quadrature(spec, i, alpha, lambda);
}

StateZeroRewards f_zero(const RewardSpec& spec, const AttackerParams& params, double lambda,
                        Engine engine) {
  params.validate();
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("lambda must lie in [0, 1)");
  }
  StateZeroRewards out;
  if (params.alpha == 0.0) return out;
  const ExpCensoring cens = censor_at_cutoff(spec, params.beta, lambda, engine);
  const double a = params.alpha;
  out.case_i = a * cens.above;
  out.case_ii = (a * a) * cens.below;
  out.case_iii = (a * (1.0 - a) * (a + params.gamma * (1.0 - a))) * cens.below;
  return out;
}

RewardBreakdown lead_tail_contribution(const RewardSpec& spec, double alpha, double lambda,
                                       double p1, Engine engine, int extra_terms) {
  if (alpha == 0.0 || p1 == 0.0) return {};
  check_state_inputs(1, alpha, lambda);
  return engine == Engine::closed_form ? lead_tail_closed(spec, alpha, lambda, p1)
                                       : lead_tail_quadrature(spec, alpha, lambda, p1,
                                                              extra_terms);
}

AttackerReward attacker_reward_at(const RewardSpec& spec, const AttackerParams& params,
                                  double lambda, Engine engine) {
  params.validate();
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("lambda must lie in [0, 1)");
  }
  AttackerReward out;
  out.eq.lambda = lambda;
  if (params.alpha == 0.0) return out;
  out.eq.h = hide_probability(spec, params, lambda, engine);
  out.eq.stationary = stationary(params.alpha, out.eq.h);
  out.f0 = f_zero(spec, params, lambda, engine);
  out.f1 = f_state(spec, 2, params.alpha, lambda, engine);
  out.lead_tail = lead_tail_contribution(spec, params.alpha, lambda, out.eq.stationary.p1,
                                         engine);
  const RewardBreakdown per_event = out.eq.stationary.p0 * out.f0.total() +
                                    out.eq.stationary.p1 * out.f1 + out.lead_tail;
  // Events arrive at rate 1/(1 - lambda); convert to reward per unit time.
  out.per_unit_time = per_event / (1.0 - lambda);
  return out;
}

AttackerReward attacker_reward(const RewardSpec& spec, const AttackerParams& params,
                               Engine engine) {
  const Equilibrium eq = solve_equilibrium(spec, params, engine);
  AttackerReward out = attacker_reward_at(spec, params, eq.lambda, engine);
  out.eq = eq;
  return out;
}

RewardBreakdown honest_benchmark(const RewardSpec& spec, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  RewardBreakdown out;
  out.block = alpha * spec.constant_total();
  out.linear = alpha * spec.linear_rate();
  out.bernoulli = alpha * spec.bernoulli_mean();
  return out;
}

double selfish_block_only(double alpha, double gamma) {
  if (!(alpha >= 0.0 && alpha < 0.5)) {
    throw std::invalid_argument("alpha must lie in [0, 0.5)");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1]");
  }
  if (alpha == 0.0) return 0.0;
  const double c = 1.0;
  // Hide probability is 1 regardless of the orphan rate, so the fixed point
  // is immediate.
  const double p1 = 1.0 / (1.0 / alpha + 1.0 + (1.0 - alpha) / (1.0 - 2.0 * alpha));
  const double p0 = p1 / alpha;
  const double lambda = p1 * (1.0 - alpha) * (1.0 + alpha / (1.0 - 2.0 * alpha));
  const double f0 =
      c * (alpha * alpha + alpha * (1.0 - alpha) * (alpha + gamma * (1.0 - alpha)));
  const double f1 = c * (alpha + alpha * (1.0 - alpha));
  const double tail =
      p1 * c * 2.0 * alpha * alpha * (1.0 - alpha) / (1.0 - 2.0 * alpha);
  return (f0 * p0 + f1 * p1 + tail) / (1.0 - lambda);
}

}  // namespace betacut
