#include "betacut/markov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "betacut/quadrature.hpp"

namespace betacut {

namespace {

constexpr double kFixedPointTol = 1e-12;
constexpr int kMaxFixedPointIter = 200;
constexpr double kTailEps = 1e-14;

ExpCensoring censor_closed(const RewardSpec& spec, double beta, double lambda) {
  const double mean = 1.0 - lambda;
  const double rate = spec.linear_rate();
  const double c = spec.constant_total();
  ExpCensoring out;
  RewardBreakdown mean_parts{c, rate * mean, spec.bernoulli_mean()};
  for (const Atom& a : spec.offset_atoms().atoms()) {
    // Survival of {offset + rate*T > beta} for T ~ Exp(mean).
    double survive;
    double wait;  // time the block must exceed, given this offset
    if (rate > 0.0) {
      wait = std::max(0.0, (beta - a.value) / rate);
      survive = std::exp(-wait / mean);
    } else {
      wait = 0.0;
      survive = a.value > beta ? 1.0 : 0.0;
    }
    out.hide_prob += a.prob * (1.0 - survive);
    if (survive > 0.0) {
      out.above.block += c * a.prob * survive;
      out.above.bernoulli += (a.value - c) * a.prob * survive;
      out.above.linear += rate * (wait + mean) * a.prob * survive;
    }
  }
  out.below = mean_parts - out.above;
  return out;
}

ExpCensoring censor_quadrature(const RewardSpec& spec, double beta, double lambda) {
  const double mean = 1.0 - lambda;
  const double rate = spec.linear_rate();
  const double c = spec.constant_total();
  const double hi = quad::exp_tail_cutoff(mean, kTailEps);
  std::vector<double> cuts;
  if (rate > 0.0 && std::isfinite(beta)) {
    for (const Atom& a : spec.offset_atoms().atoms()) {
      cuts.push_back((beta - a.value) / rate);
    }
  }
  const auto density = [mean](double t) { return std::exp(-t / mean) / mean; };
  const auto mass_above = [&](double t) {
    double p = 0.0;
    for (const Atom& a : spec.offset_atoms().atoms()) {
      if (a.value + rate * t > beta) p += a.prob;
    }
    return p;
  };
  const auto bern_above = [&](double t) {
    double s = 0.0;
    for (const Atom& a : spec.offset_atoms().atoms()) {
      if (a.value + rate * t > beta) s += (a.value - c) * a.prob;
    }
    return s;
  };
  ExpCensoring out;
  out.hide_prob = quad::integrate_piecewise(
      [&](double t) { return density(t) * (1.0 - mass_above(t)); }, 0.0, hi, cuts);
  out.above.block = quad::integrate_piecewise(
      [&](double t) { return density(t) * c * mass_above(t); }, 0.0, hi, cuts);
  out.above.linear = quad::integrate_piecewise(
      [&](double t) { return density(t) * rate * t * mass_above(t); }, 0.0, hi, cuts);
  out.above.bernoulli = quad::integrate_piecewise(
      [&](double t) { return density(t) * bern_above(t); }, 0.0, hi, cuts);
  out.below.block = quad::integrate_piecewise(
      [&](double t) { return density(t) * c * (1.0 - mass_above(t)); }, 0.0, hi, cuts);
  out.below.linear = quad::integrate_piecewise(
      [&](double t) { return density(t) * (rate * t - rate * t * mass_above(t)); }, 0.0, hi,
      cuts);
  out.below.bernoulli = quad::integrate_piecewise(
      [&](double t) { return density(t) * (spec.bernoulli_mean() - bern_above(t)); }, 0.0, hi,
      cuts);
  return out;
}

}  // namespace

void AttackerParams::validate() const {
  if (!(alpha >= 0.0 && alpha < 0.5)) {
    throw std::invalid_argument("alpha must lie in [0, 0.5)");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1]");
  }
  if (std::isnan(beta) || beta < 0.0) {
    throw std::invalid_argument("beta must be >= 0 (+inf allowed)");
  }
}

ExpCensoring censor_at_cutoff(const RewardSpec& spec, double beta, double lambda,
                              Engine engine) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("lambda must lie in [0, 1)");
  }
  ExpCensoring out = engine == Engine::closed_form ? censor_closed(spec, beta, lambda)
                                                   : censor_quadrature(spec, beta, lambda);
  out.hide_prob = std::min(1.0, std::max(0.0, out.hide_prob));
  return out;
}

double hide_probability(const RewardSpec& spec, const AttackerParams& params, double lambda,
                        Engine engine) {
  return censor_at_cutoff(spec, params.beta, lambda, engine).hide_prob;
}

StationaryDistribution stationary(double alpha, double h) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw std::invalid_argument("alpha must lie in (0, 0.5)");
  }
  if (h < -1e-12 || h > 1.0 + 1e-12) {
    throw std::invalid_argument("hide probability must lie in [0, 1]");
  }
  h = std::min(1.0, std::max(0.0, h));
  StationaryDistribution d;
  d.tail_ratio = alpha / (1.0 - alpha);
  if (h == 0.0) {
    // The attacker never withholds; all mass sits in the no-fork state.
    d.p0 = 1.0;
    d.p0_prime = d.p0_dprime = d.p1 = 0.0;
    return d;
  }
  d.p1 = 1.0 / (1.0 / (alpha * h) + 1.0 + (1.0 - alpha) / (1.0 - 2.0 * alpha));
  d.p0 = d.p1 / (alpha * h);
  d.p0_prime = d.p1 * (1.0 - alpha);
  d.p0_dprime = d.p1 * alpha;
  return d;
}

double orphan_rate(double alpha, double p1) {
  if (!(alpha >= 0.0 && alpha < 0.5)) {
    throw std::invalid_argument("alpha must lie in [0, 0.5)");
  }
  if (!(p1 >= 0.0 && p1 <= 1.0)) {
    throw std::invalid_argument("p1 must lie in [0, 1]");
  }
  return p1 * (1.0 - alpha) * (1.0 + alpha / (1.0 - 2.0 * alpha));
}

Equilibrium solve_equilibrium(const RewardSpec& spec, const AttackerParams& params,
                              Engine engine) {
  params.validate();
  Equilibrium eq;
  if (params.alpha == 0.0) {
    eq.stationary.tail_ratio = 0.0;
    return eq;  // no attacker blocks, no forks, orphan rate zero
  }
  double lambda = 0.0;
  for (int iter = 1; iter <= kMaxFixedPointIter; ++iter) {
    const double h = hide_probability(spec, params, lambda, engine);
    const StationaryDistribution st = stationary(params.alpha, h);
    const double next = orphan_rate(params.alpha, st.p1);
    if (std::abs(next - lambda) < kFixedPointTol) {
      eq.lambda = next;
      eq.h = hide_probability(spec, params, next, engine);
      eq.stationary = stationary(params.alpha, eq.h);
      eq.iterations = iter;
      return eq;
    }
    lambda = next;
  }
  throw std::runtime_error("orphan-rate fixed point did not converge");
}

}  // namespace betacut
