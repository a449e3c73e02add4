// Acceptance suite: end-to-end checks of the analytic engines, the
// optimizer, and the Monte Carlo simulator against each other and against
// frozen reference values. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "betacut/calculus.hpp"
#include "betacut/markov.hpp"
#include "betacut/optimizer.hpp"
#include "betacut/simulator.hpp"
#include "property_fuzz.hpp"
#include "test_util.hpp"

using namespace betacut;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int failures = 0;

class Criterion {
 public:
  Criterion(int id, std::string name) : id_(id), name_(std::move(name)) {
    start_ = std::chrono::steady_clock::now();
  }

  void check(bool ok, const std::string& detail) {
    if (!ok && failure_count_ < 4) {
      if (!failures_.empty()) failures_ += " | ";
      failures_ += detail;
    }
    if (!ok) ++failure_count_;
    ok_ = ok_ && ok;
  }

  ~Criterion() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::string suffix;
    if (!ok_) {
      suffix = " -- " + failures_;
      if (failure_count_ > 4) {
        suffix += " | (+" + std::to_string(failure_count_ - 4) + " more)";
      }
    }
    std::printf("[%s] criterion %d: %s (%.1fs)%s\n", ok_ ? "PASS" : "FAIL", id_,
                name_.c_str(), secs, suffix.c_str());
    std::fflush(stdout);
    if (!ok_) ++failures;
  }

 private:
  int id_;
  std::string name_;
  bool ok_ = true;
  int failure_count_ = 0;
  std::string failures_;
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

const RewardSpec kBlockOnly = RewardSpec::constant(1.0);
const RewardSpec kLinearOnly = RewardSpec::linear(1.0);
const RewardSpec kBlockPlusLinear =
    RewardSpec::composite({RewardSpec::constant(1.0), RewardSpec::linear(1.0)});

void criterion1_block_thresholds() {
  Criterion c(1, "block-only profitability thresholds at gamma 0/0.25/0.5");
  const double expected[] = {1.0 / 3.0, 0.30, 0.25};
  const double gammas[] = {0.0, 0.25, 0.5};
  for (int i = 0; i < 3; ++i) {
    const auto th = profitability_threshold(kBlockOnly, gammas[i], Objective::only_block());
    if (!th) {
      c.check(false, "no threshold found at gamma=" + fmt(gammas[i]));
      continue;
    }
    c.check(std::abs(*th - expected[i]) <= 0.005,
            "gamma=" + fmt(gammas[i]) + " threshold=" + fmt(*th) + " expected=" +
                fmt(expected[i]));
  }
}

void criterion2_combined_thresholds() {
  Criterion c(2, "combined-reward profitability thresholds");
  struct Case {
    const RewardSpec& spec;
    const char* label;
    double gamma;
    double expected;
    double tol;
  };
  const RewardSpec combined = testutil::default_combined();
  const Case cases[] = {
      {kBlockPlusLinear, "block+fee", 0.0, 0.26, 0.01},
      {combined, "block+fee+bonus", 0.0, 0.18, 0.01},
      {kBlockPlusLinear, "block+fee", 0.5, 0.18, 0.01},
      {combined, "block+fee+bonus", 0.5, 0.09, 0.01},
  };
  for (const Case& cs : cases) {
    const auto th = profitability_threshold(cs.spec, cs.gamma, Objective::total());
    if (!th) {
      c.check(false, std::string(cs.label) + " gamma=" + fmt(cs.gamma) + ": no threshold");
      continue;
    }
    c.check(std::abs(*th - cs.expected) <= cs.tol,
            std::string(cs.label) + " gamma=" + fmt(cs.gamma) + " threshold=" + fmt(*th) +
                " expected=" + fmt(cs.expected));
  }
}

void criterion3_interpolation() {
  Criterion c(3, "combined curve interpolates between the single-source curves");
  for (double alpha = 0.05; alpha < 0.451; alpha += 0.05) {
    const double block_share = selfish_block_only(alpha, 0.0);  // honest share = alpha
    const double linear_share =
        optimize_beta(kLinearOnly, alpha, 0.0, Objective::only_linear()).objective_value;
    const double combined_share =
        optimize_beta(kBlockPlusLinear, alpha, 0.0, Objective::total()).objective_value /
        2.0;
    const double lo = std::min(block_share, linear_share) - 1e-9;
    const double hi = std::max(block_share, linear_share) + 1e-9;
    c.check(combined_share >= lo && combined_share <= hi,
            "alpha=" + fmt(alpha) + " combined=" + fmt(combined_share) + " outside [" +
                fmt(lo) + ", " + fmt(hi) + "]");
    if (alpha >= 0.1499 && alpha <= 0.2501) {
      c.check(std::abs(combined_share - alpha) <= 1e-6,
              "alpha=" + fmt(alpha) + " combined=" + fmt(combined_share) +
                  " should equal honest");
    }
  }
}

void criterion4_dominance() {
  Criterion c(4, "total-objective optimum dominates single-source optima");
  const RewardSpec combined = testutil::default_combined();
  const Objective singles[] = {Objective::only_block(), Objective::only_linear(),
                               Objective::only_bernoulli()};
  for (double alpha = 0.05; alpha < 0.451; alpha += 0.05) {
    const double best =
        optimize_beta(combined, alpha, 0.0, Objective::total()).full_breakdown.total();
    for (const Objective& obj : singles) {
      const double single =
          optimize_beta(combined, alpha, 0.0, obj).full_breakdown.total();
      c.check(best >= single - 1e-12, "alpha=" + fmt(alpha) + " " + obj.name() + "=" +
                                          fmt(single) + " beats total=" + fmt(best));
      if (std::abs(alpha - 0.35) < 1e-9) {
        c.check(best > single, "not strict at alpha=0.35 for " + obj.name());
      }
    }
  }
}

void criterion5_closed_vs_quadrature() {
  Criterion c(5, "closed forms agree with the quadrature engine on the full grid");
  const RewardSpec combined = testutil::default_combined();
  double worst = 0.0;
  for (double alpha = 0.05; alpha < 0.451; alpha += 0.05) {
    for (double beta = 1.0; beta < 8.01; beta += 1.0) {
      for (double gamma : {0.0, 0.25, 0.5}) {
        const AttackerParams params{alpha, gamma, beta};
        const RewardBreakdown a = attacker_reward(combined, params).per_unit_time;
        const RewardBreakdown b =
            attacker_reward(combined, params, Engine::quadrature).per_unit_time;
        const double gap =
            std::max({std::abs(a.block - b.block), std::abs(a.linear - b.linear),
                      std::abs(a.bernoulli - b.bernoulli)});
        worst = std::max(worst, gap);
        c.check(gap < 1e-8, "alpha=" + fmt(alpha) + " beta=" + fmt(beta) + " gamma=" +
                                fmt(gamma) + " gap=" + fmt(gap));
      }
    }
  }
  c.check(true, "worst gap " + fmt(worst));
}

void criterion6_linear_only() {
  Criterion c(6, "generic engine matches the fee-only closed formula");
  double worst = 0.0;
  for (double alpha : {0.2, 0.3, 0.4}) {
    for (double lambda : {0.0, 0.5}) {
      for (double beta = 0.25; beta <= 5.01; beta += 0.25) {
        const double engine =
            attacker_reward_at(kLinearOnly, {alpha, 0.0, beta}, lambda, Engine::quadrature)
                .per_unit_time.total();
        const double closed = testutil::linear_only_closed(alpha, 0.0, lambda, beta);
        const double gap = std::abs(engine - closed);
        worst = std::max(worst, gap);
        c.check(gap < 1e-10, "alpha=" + fmt(alpha) + " lambda=" + fmt(lambda) + " beta=" +
                                 fmt(beta) + " gap=" + fmt(gap));
      }
    }
  }
  c.check(true, "worst gap " + fmt(worst));
}

void criterion7_simulation() {
  Criterion c(7, "simulated rewards and orphan rate match the analytics");
  const RewardSpec combined = testutil::default_combined();
  std::uint64_t run = 0;
  for (double alpha : {0.1, 0.2, 0.3, 0.4}) {
    for (double beta : {1.5, 3.0, 5.0}) {
      SimConfig cfg;
      cfg.spec = combined;
      cfg.params = {alpha, 0.0, beta};
      cfg.horizon_events = 250'000;  // 10^7 events per configuration
      cfg.replicas = 40;
      cfg.seed = derive_seed(0xacceULL, run++);
      const SimResult sim = simulate(cfg);
      const AttackerReward analytic = attacker_reward(combined, cfg.params);
      const auto near = [&](const char* what, double got, double want, double se) {
        c.check(std::abs(got - want) <= 3.0 * se,
                "alpha=" + fmt(alpha) + " beta=" + fmt(beta) + " " + what + " sim=" +
                    fmt(got) + " analytic=" + fmt(want) + " se=" + fmt(se));
      };
      near("block", sim.attacker.mean.block, analytic.per_unit_time.block,
           sim.attacker.se.block);
      near("linear", sim.attacker.mean.linear, analytic.per_unit_time.linear,
           sim.attacker.se.linear);
      near("bernoulli", sim.attacker.mean.bernoulli, analytic.per_unit_time.bernoulli,
           sim.attacker.se.bernoulli);
      near("lambda", sim.empirical_orphan_rate, analytic.eq.lambda, sim.orphan_rate_se);
    }
  }
}

void criterion8_exact_cases() {
  Criterion c(8, "exact small cases");
  const StationaryDistribution st = stationary(1.0 / 3.0, 1.0);
  c.check(std::abs(st.simplex_sum() - 1.0) < 1e-10, "simplex sum " + fmt(st.simplex_sum()));
  c.check(std::abs(st.p1 - 1.0 / 6.0) < 1e-10, "p1 " + fmt(st.p1));

  const Equilibrium eq = solve_equilibrium(kBlockOnly, {1.0 / 3.0, 0.0, kInf});
  c.check(std::abs(eq.lambda - 2.0 / 9.0) < 1e-10, "lambda " + fmt(eq.lambda));

  const double honest_total =
      attacker_reward(testutil::default_combined(), {0.2, 0.0, 1.0}).per_unit_time.total();
  c.check(std::abs(honest_total - 0.6) < 1e-10,
          "cutoff-at-block-reward total " + fmt(honest_total));
}

void criterion9_property_fuzz() {
  Criterion c(9, "randomized property suite (1000 cases)");
  const auto failure = testutil::property_fuzz_failure(1000, 0xbe7ac07ULL);
  c.check(!failure.has_value(), failure ? *failure : "");
}

}  // namespace

int main() {
  criterion1_block_thresholds();
  criterion2_combined_thresholds();
  criterion3_interpolation();
  criterion4_dominance();
  criterion5_closed_vs_quadrature();
  criterion6_linear_only();
  criterion7_simulation();
  criterion8_exact_cases();
  criterion9_property_fuzz();
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
