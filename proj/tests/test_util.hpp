#pragma once

#include <cmath>
#include <vector>

#include "betacut/reward_spec.hpp"

namespace testutil {

/// Default instantiation used across the suites: unit block reward, unit
/// fee rate, and a 25% chance of a size-4 bonus.
inline betacut::RewardSpec default_combined() {
  return betacut::RewardSpec::combined(1.0, 1.0, 0.25, 4.0);
}

/// Independent enumeration of the conditional law at elapsed time t:
/// recurses over bonus outcomes without going through AtomSet.
struct EnumMoments {
  double mean = 0.0;
  double mean_below = 0.0;  // values <= cutoff
  double prob_below = 0.0;
};

inline void enum_recurse(const std::vector<betacut::BernoulliTerm>& berns, std::size_t k,
                         double value, double prob, double cutoff, EnumMoments& out) {
  if (k == berns.size()) {
    out.mean += value * prob;
    if (value <= cutoff) {
      out.mean_below += value * prob;
      out.prob_below += prob;
    }
    return;
  }
  enum_recurse(berns, k + 1, value, prob * (1.0 - berns[k].p), cutoff, out);
  enum_recurse(berns, k + 1, value + berns[k].e, prob * berns[k].p, cutoff, out);
}

inline EnumMoments enumerate_at(const betacut::RewardSpec& spec, double t, double cutoff) {
  EnumMoments out;
  const double base = spec.constant_total() + spec.linear_rate() * t;
  enum_recurse(spec.bernoulli_terms(), 0, base, 1.0, cutoff, out);
  return out;
}

/// Reward per unit time of the always-hide-below-cutoff strategy under a
/// pure linear-in-time fee source with unit rate, at an exogenous orphan
/// rate. Independent transcription used as the oracle for the generic
/// engine.
inline double linear_only_closed(double alpha, double gamma, double lambda, double beta) {
  const double m = 1.0 - lambda;
  const double decay = std::exp(-beta / m);
  const double h = 1.0 - decay;
  if (h <= 0.0) return alpha * 1.0;  // no hiding: honest fee share
  const double p1 = 1.0 / (1.0 / (alpha * h) + 1.0 + (1.0 - alpha) / (1.0 - 2.0 * alpha));
  const double p0 = p1 / (alpha * h);
  const double below = m - (beta + m) * decay;
  const double f0 = alpha * decay * (beta + m) +
                    (alpha * alpha +
                     alpha * (1.0 - alpha) * (alpha + gamma * (1.0 - alpha))) *
                        below;
  const double f1 = m * (alpha + 2.0 * alpha * (1.0 - alpha));
  const double tail =
      p1 * m * alpha * alpha * (3.0 - 2.0 * alpha) / (1.0 - 2.0 * alpha);
  return (f0 * p0 + f1 * p1 + tail) / m;
}

}  // namespace testutil
