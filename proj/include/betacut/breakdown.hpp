#pragma once

namespace betacut {

/// Reward split by source. Depending on context the unit is either reward
/// per unit time or expected reward per chain event.
struct RewardBreakdown {
  double block = 0.0;
  double linear = 0.0;
  double bernoulli = 0.0;

  double total() const { return block + linear + bernoulli; }

  RewardBreakdown& operator+=(const RewardBreakdown& o) {
    block += o.block;
    linear += o.linear;
    bernoulli += o.bernoulli;
    return *this;
  }
  friend RewardBreakdown operator+(RewardBreakdown a, const RewardBreakdown& b) {
    return a += b;
  }
  friend RewardBreakdown operator-(RewardBreakdown a, const RewardBreakdown& b) {
    a.block -= b.block;
    a.linear -= b.linear;
    a.bernoulli -= b.bernoulli;
    return a;
  }
  friend RewardBreakdown operator*(double s, RewardBreakdown b) {
    b.block *= s;
    b.linear *= s;
    b.bernoulli *= s;
    return b;
  }
  friend RewardBreakdown operator/(RewardBreakdown b, double s) {
    b.block /= s;
    b.linear /= s;
    b.bernoulli /= s;
    return b;
  }
};

/// Which evaluation route computes chain quantities: exact per-atom closed
/// forms, or numeric integration over the inter-block time distribution.
enum class Engine { closed_form, quadrature };

}  // namespace betacut
