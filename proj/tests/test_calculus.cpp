#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "betacut/calculus.hpp"
#include "test_util.hpp"

using namespace betacut;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double max_component_gap(const RewardBreakdown& a, const RewardBreakdown& b) {
  return std::max({std::abs(a.block - b.block), std::abs(a.linear - b.linear),
                   std::abs(a.bernoulli - b.bernoulli)});
}
}  // namespace

TEST_CASE("per-state reward for the first lead state") {
  const RewardBreakdown f = f_state(testutil::default_combined(), 2, 1.0 / 3.0, 0.0);
  CHECK(f.block + f.bernoulli == doctest::Approx(10.0 / 9.0).epsilon(1e-12));
  CHECK(f.linear == doctest::Approx(7.0 / 9.0).epsilon(1e-12));
  CHECK(f.total() == doctest::Approx(17.0 / 9.0).epsilon(1e-12));

  CHECK(f_state(testutil::default_combined(), 1, 0.0, 0.0).total() == 0.0);
  CHECK_THROWS_AS(f_state(testutil::default_combined(), 0, 0.3, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(f_state(testutil::default_combined(), 2, 0.3, 1.0),
                  std::invalid_argument);
}

TEST_CASE("per-state reward agrees between the two engines") {
  const RewardBreakdown closed = f_state(RewardSpec::linear(1.0), 3, 0.3, 0.1);
  const RewardBreakdown numeric =
      f_state(RewardSpec::linear(1.0), 3, 0.3, 0.1, Engine::quadrature);
  CHECK(max_component_gap(closed, numeric) < 1e-9);

  const RewardBreakdown c2 = f_state(testutil::default_combined(), 5, 0.4, 0.25);
  const RewardBreakdown n2 =
      f_state(testutil::default_combined(), 5, 0.4, 0.25, Engine::quadrature);
  CHECK(max_component_gap(c2, n2) < 1e-9);
}

TEST_CASE("no-fork state rewards for the always-hide constant chain") {
  const StateZeroRewards f0 =
      f_zero(RewardSpec::constant(1.0), {1.0 / 3.0, 0.0, kInf}, 2.0 / 9.0);
  CHECK(f0.case_i.total() == 0.0);
  CHECK(f0.case_ii.total() == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(f0.case_iii.total() == doctest::Approx(2.0 / 27.0).epsilon(1e-12));
  CHECK(f0.total().total() == doctest::Approx(5.0 / 27.0).epsilon(1e-12));
}

TEST_CASE("no-fork state rewards when the cutoff disables hiding") {
  const double alpha = 0.37;
  const StateZeroRewards f0 =
      f_zero(testutil::default_combined(), {alpha, 0.8, 1.0}, 0.0);
  CHECK(f0.case_ii.total() == 0.0);
  CHECK(f0.case_iii.total() == 0.0);
  // Full published mean: C + p*E + linear rate * mean inter-block time.
  CHECK(f0.case_i.total() == doctest::Approx(alpha * 3.0).epsilon(1e-12));
  CHECK(f0.case_i.block == doctest::Approx(alpha).epsilon(1e-12));
  CHECK(f0.case_i.linear == doctest::Approx(alpha).epsilon(1e-12));
  CHECK(f0.case_i.bernoulli == doctest::Approx(alpha).epsilon(1e-12));
}

TEST_CASE("attacker reward trivia") {
  CHECK(attacker_reward(testutil::default_combined(), {0.0, 0.0, 3.0})
            .per_unit_time.total() == 0.0);

  // Cutoff at the block reward disables hiding entirely: honest rate.
  const AttackerReward honest =
      attacker_reward(testutil::default_combined(), {0.2, 0.3, 1.0});
  CHECK(honest.per_unit_time.total() == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(honest.eq.lambda == 0.0);
}

TEST_CASE("linear-only engine matches the independent closed transcription") {
  const RewardSpec linear = RewardSpec::linear(1.0);
  const AttackerReward r = attacker_reward(linear, {0.3, 0.0, 2.0});
  const double oracle = testutil::linear_only_closed(0.3, 0.0, r.eq.lambda, 2.0);
  CHECK(std::abs(r.per_unit_time.total() - oracle) < 1e-10);
  CHECK(r.per_unit_time.block == 0.0);
  CHECK(r.per_unit_time.bernoulli == 0.0);
}

TEST_CASE("generic engine matches the linear-only transcription at exogenous orphan rates") {
  const RewardSpec linear = RewardSpec::linear(1.0);
  for (double alpha : {0.2, 0.3, 0.4}) {
    for (double lambda : {0.0, 0.5}) {
      for (double beta = 0.25; beta <= 4.0; beta += 0.75) {
        const AttackerReward r =
            attacker_reward_at(linear, {alpha, 0.0, beta}, lambda, Engine::quadrature);
        const double oracle = testutil::linear_only_closed(alpha, 0.0, lambda, beta);
        CHECK(std::abs(r.per_unit_time.total() - oracle) < 1e-10);
      }
    }
  }
}

TEST_CASE("block-only specialization") {
  CHECK(selfish_block_only(0.0, 0.0) == 0.0);
  CHECK(selfish_block_only(1e-9, 0.0) == doctest::Approx(0.0).epsilon(1e-6));
  // Profitability crossing: equals the hashrate share at the known threshold.
  CHECK(std::abs(selfish_block_only(1.0 / 3.0, 0.0) - 1.0 / 3.0) < 0.01);
  // Same value through the generic machinery.
  const AttackerReward general =
      attacker_reward(RewardSpec::constant(1.0), {0.4, 0.5, kInf});
  CHECK(selfish_block_only(0.4, 0.5) ==
        doctest::Approx(general.per_unit_time.total()).epsilon(1e-12));
  CHECK(general.per_unit_time.linear == 0.0);
  CHECK(general.per_unit_time.bernoulli == 0.0);
}

TEST_CASE("honest benchmark") {
  CHECK(honest_benchmark(testutil::default_combined(), 0.2).total() ==
        doctest::Approx(0.6).epsilon(1e-12));
  const RewardSpec two =
      RewardSpec::composite({RewardSpec::constant(1.0), RewardSpec::linear(1.0)});
  CHECK(honest_benchmark(two, 0.3).total() == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(honest_benchmark(two, 0.0).total() == 0.0);
  CHECK(honest_benchmark(testutil::default_combined(), 0.25).bernoulli ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("closed and quadrature engines agree at spot checks") {
  const RewardSpec combined = testutil::default_combined();
  for (double alpha : {0.1, 0.3, 0.45}) {
    for (double beta : {1.5, 3.0, 6.0}) {
      const AttackerReward c = attacker_reward(combined, {alpha, 0.25, beta});
      const AttackerReward q =
          attacker_reward(combined, {alpha, 0.25, beta}, Engine::quadrature);
      CHECK(max_component_gap(c.per_unit_time, q.per_unit_time) < 1e-8);
    }
  }
}

TEST_CASE("lead-state tail truncation rejects near-degenerate hashrate") {
  // The geometric state ratio approaches 1 as alpha approaches 1/2; the
  // quadrature tail refuses instead of silently truncating.
  CHECK_THROWS_AS(lead_tail_contribution(testutil::default_combined(), 0.4999, 0.0, 0.1,
                                         Engine::quadrature),
                  std::runtime_error);
}

TEST_CASE("lead-state tail truncation is stable") {
  const RewardSpec combined = testutil::default_combined();
  const Equilibrium eq = solve_equilibrium(combined, {0.42, 0.0, 3.0});
  const RewardBreakdown base = lead_tail_contribution(
      combined, 0.42, eq.lambda, eq.stationary.p1, Engine::quadrature, 0);
  const RewardBreakdown more = lead_tail_contribution(
      combined, 0.42, eq.lambda, eq.stationary.p1, Engine::quadrature, 10);
  CHECK(std::abs(base.total() - more.total()) < 1e-10);
}

TEST_CASE("breakdown components never cross-contaminate") {
  // A composite's block/linear/bonus attribution matches the component
  // magnitudes: zeroing a source zeroes exactly its column.
  const AttackerReward with_bonus =
      attacker_reward(testutil::default_combined(), {0.3, 0.0, 3.0});
  CHECK(with_bonus.per_unit_time.block > 0.0);
  CHECK(with_bonus.per_unit_time.linear > 0.0);
  CHECK(with_bonus.per_unit_time.bernoulli > 0.0);
  CHECK(with_bonus.per_unit_time.total() ==
        doctest::Approx(with_bonus.per_unit_time.block + with_bonus.per_unit_time.linear +
                        with_bonus.per_unit_time.bernoulli)
            .epsilon(1e-12));

  const RewardSpec no_bonus =
      RewardSpec::composite({RewardSpec::constant(1.0), RewardSpec::linear(1.0)});
  const AttackerReward r = attacker_reward(no_bonus, {0.3, 0.0, 3.0});
  CHECK(r.per_unit_time.bernoulli == 0.0);
}
