#include "betacut/simulator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

namespace betacut {

namespace {

constexpr int kMaxTrackedLead = 64;
constexpr int kStateBuckets = 3 + kMaxTrackedLead + 1;  // overflow bucket at the end

struct ReplicaTotals {
  RewardBreakdown attacker;  // canonical reward per unit time
  RewardBreakdown honest;
  double orphan_fraction = 0.0;
  double growth = 0.0;
  double elapsed = 0.0;
  std::int64_t canonical = 0;
  std::int64_t orphaned = 0;
  std::vector<std::int64_t> occupancy = std::vector<std::int64_t>(kStateBuckets, 0);
};

int bucket(int code) { return code < kStateBuckets ? code : kStateBuckets - 1; }

ReplicaTotals run_replica(const RewardSpec& spec, const AttackerParams& params,
                          double lambda, std::int64_t n, std::uint64_t seed,
                          std::vector<TraceRecord>* trace) {
  const double mean = 1.0 - lambda;
  const double alpha = params.alpha;
  const double gamma = params.gamma;
  const double beta = params.beta;
  std::mt19937_64 rng(seed);

  bool in_race = false;
  bool just_published = false;
  int lead = 0;

  double t = 0.0;
  double pub_tip = 0.0;   // timestamp of the tip honest miners extend
  double att_tip = 0.0;   // timestamp of the tip the attacker extends
  RewardBreakdown priv_sum;
  int priv_count = 0;
  RewardBreakdown race_honest;
  double race_honest_ts = 0.0;
  int pending_honest = 0;

  RewardBreakdown att_total, hon_total;
  std::int64_t canonical = 0, orphaned = 0;
  double last_canonical_ts = 0.0;
  std::vector<std::int64_t> occupancy(kStateBuckets, 0);

  const auto credit = [](RewardBreakdown& sink, const RewardSpec::Realization& r) {
    sink.block += r.block;
    sink.linear += r.linear;
    sink.bernoulli += r.bernoulli;
  };

  for (std::int64_t ev = 0; ev < n; ++ev) {
    const int before = encode_state(in_race, just_published, lead);
    ++occupancy[bucket(before)];
    t += exponential(rng, mean);
    const bool attacker = uniform01(rng) < alpha;
    char action = 'p';
    double realized = 0.0;

    if (in_race) {  // two equal-height public tips
      if (attacker) {
        const auto comps = spec.sample_components(t - att_tip, rng);
        realized = comps.total();
        att_total += priv_sum;
        credit(att_total, comps);
      } else if (uniform01(rng) < gamma) {
        const auto comps = spec.sample_components(t - att_tip, rng);
        realized = comps.total();
        att_total += priv_sum;
        credit(hon_total, comps);
      } else {
        const auto comps = spec.sample_components(t - race_honest_ts, rng);
        realized = comps.total();
        hon_total += race_honest;
        credit(hon_total, comps);
      }
      canonical += 2;   // the surviving fork block plus its extension
      orphaned += 1;    // the losing fork block
      last_canonical_ts = t;
      pub_tip = att_tip = t;
      priv_sum = {};
      priv_count = 0;
      in_race = false;
    } else if (lead >= 1) {
      if (attacker) {
        const auto comps = spec.sample_components(t - att_tip, rng);
        realized = comps.total();
        credit(priv_sum, comps);
        ++priv_count;
        att_tip = t;
        ++lead;
        action = 'e';
      } else {
        const auto comps = spec.sample_components(t - pub_tip, rng);
        realized = comps.total();
        if (lead == 1) {
          // Attacker publishes its single hidden block; a race begins.
          race_honest = {};
          credit(race_honest, comps);
          race_honest_ts = t;
          in_race = true;
          lead = 0;
        } else if (lead == 2) {
          // Attacker publishes the whole private chain and overtakes.
          orphaned += pending_honest + 1;
          canonical += priv_count;
          att_total += priv_sum;
          last_canonical_ts = att_tip;
          pub_tip = att_tip;
          priv_sum = {};
          priv_count = 0;
          pending_honest = 0;
          lead = 0;
          just_published = true;
        } else {
          ++pending_honest;
          pub_tip = t;
          --lead;
        }
      }
    } else {  // single public tip, no hidden chain
      const bool may_hide = !just_published;
      just_published = false;
      const auto comps = spec.sample_components(t - pub_tip, rng);
      realized = comps.total();
      if (attacker && may_hide && realized <= beta) {
        priv_sum = {};
        credit(priv_sum, comps);
        priv_count = 1;
        att_tip = t;
        lead = 1;
        action = 'h';
      } else {
        credit(attacker ? att_total : hon_total, comps);
        ++canonical;
        last_canonical_ts = t;
        pub_tip = att_tip = t;
      }
    }

    if (trace) {
      TraceRecord rec;
      rec.index = ev;
      rec.time = t;
      rec.winner = attacker ? 'A' : 'H';
      rec.state_before = before;
      rec.state_after = encode_state(in_race, just_published, lead);
      rec.action = action;
      rec.reward = realized;
      trace->push_back(rec);
    }
  }

  ReplicaTotals out;
  out.elapsed = last_canonical_ts;
  if (last_canonical_ts > 0.0) {
    out.attacker = att_total / last_canonical_ts;
    out.honest = hon_total / last_canonical_ts;
    out.growth = static_cast<double>(canonical) / last_canonical_ts;
  }
  out.canonical = canonical;
  out.orphaned = orphaned;
  out.orphan_fraction = canonical + orphaned > 0
                            ? static_cast<double>(orphaned) /
                                  static_cast<double>(canonical + orphaned)
                            : 0.0;
  out.occupancy = std::move(occupancy);
  return out;
}

double pick_lambda(const SimConfig& config) {
  switch (config.lambda_mode) {
    case LambdaMode::analytic:
      return solve_equilibrium(config.spec, config.params).lambda;
    case LambdaMode::fixed:
      if (!(config.fixed_lambda >= 0.0 && config.fixed_lambda < 1.0)) {
        throw std::invalid_argument("fixed lambda must lie in [0, 1)");
      }
      return config.fixed_lambda;
    case LambdaMode::self_calibrating:
      return calibrate_lambda(config.spec, config.params, config.horizon_events,
                              derive_seed(config.seed, 0x5e1fca1bULL));
  }
  throw std::invalid_argument("unknown lambda mode");
}

}  // namespace

void SimConfig::validate() const {
  params.validate();
  if (horizon_events < 10'000) {
    throw std::invalid_argument("horizon must be at least 10^4 events");
  }
  if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
}

int encode_state(bool race, bool post_publish, int lead) {
  if (race) return 1;
  if (post_publish) return 2;
  return lead > 0 ? 2 + lead : 0;
}

std::string state_name(int code) {
  switch (code) {
    case 0: return "0";
    case 1: return "0'";
    case 2: return "0''";
    default: return std::to_string(code - 2);
  }
}

SimResult simulate(const SimConfig& config, std::vector<TraceRecord>* trace) {
  config.validate();
  const double lambda = pick_lambda(config);

  const int replicas = config.replicas;
  std::vector<ReplicaTotals> totals(replicas);
  const unsigned workers = std::max(
      1u, std::min<unsigned>(std::thread::hardware_concurrency(), replicas));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int r = static_cast<int>(w); r < replicas; r += workers) {
        totals[r] = run_replica(config.spec, config.params, lambda,
                                config.horizon_events, derive_seed(config.seed, r),
                                (r == 0) ? trace : nullptr);
      }
    });
  }
  for (std::thread& th : pool) th.join();

  SimResult out;
  out.lambda_used = lambda;
  out.events = config.horizon_events * replicas;
  out.occupancy.assign(kStateBuckets, 0.0);

  const auto mean_se = [replicas](const std::vector<double>& xs, double& mean, double& se) {
    mean = 0.0;
    for (double x : xs) mean += x;
    mean /= replicas;
    if (replicas < 2) {
      se = 0.0;
      return;
    }
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= (replicas - 1);
    se = std::sqrt(var / replicas);
  };

  std::vector<double> col(replicas);
  const auto collect = [&](auto getter, double& mean, double& se) {
    for (int r = 0; r < replicas; ++r) col[r] = getter(totals[r]);
    mean_se(col, mean, se);
  };

  collect([](const ReplicaTotals& t) { return t.attacker.block; },
          out.attacker.mean.block, out.attacker.se.block);
  collect([](const ReplicaTotals& t) { return t.attacker.linear; },
          out.attacker.mean.linear, out.attacker.se.linear);
  collect([](const ReplicaTotals& t) { return t.attacker.bernoulli; },
          out.attacker.mean.bernoulli, out.attacker.se.bernoulli);
  collect([](const ReplicaTotals& t) { return t.honest.block; }, out.honest.mean.block,
          out.honest.se.block);
  collect([](const ReplicaTotals& t) { return t.honest.linear; }, out.honest.mean.linear,
          out.honest.se.linear);
  collect([](const ReplicaTotals& t) { return t.honest.bernoulli; },
          out.honest.mean.bernoulli, out.honest.se.bernoulli);
  double growth_se = 0.0;
  collect([](const ReplicaTotals& t) { return t.growth; }, out.canonical_growth_rate,
          growth_se);
  collect([](const ReplicaTotals& t) { return t.orphan_fraction; },
          out.empirical_orphan_rate, out.orphan_rate_se);

  std::int64_t occupancy_events = 0;
  for (const ReplicaTotals& t : totals) {
    out.elapsed_sim_time += t.elapsed;
    out.canonical_blocks += t.canonical;
    out.orphaned_blocks += t.orphaned;
    for (int i = 0; i < kStateBuckets; ++i) out.occupancy[i] += t.occupancy[i];
    occupancy_events += config.horizon_events;
  }
  for (double& o : out.occupancy) o /= static_cast<double>(occupancy_events);
  return out;
}

double calibrate_lambda(const RewardSpec& spec, const AttackerParams& params,
                        std::int64_t events_per_round, std::uint64_t seed, int max_rounds,
                        double growth_tol) {
  params.validate();
  if (events_per_round < 10'000) {
    throw std::invalid_argument("calibration rounds need at least 10^4 events");
  }
  double lambda = 0.0;
  for (int round = 0; round < max_rounds; ++round) {
    const ReplicaTotals t = run_replica(spec, params, lambda, events_per_round,
                                        derive_seed(seed, round), nullptr);
    if (std::abs(t.growth - 1.0) <= growth_tol) return t.orphan_fraction;
    lambda = t.orphan_fraction;
  }
  throw std::runtime_error("self-calibrating difficulty did not converge");
}

std::vector<double> state_occupancy(const std::vector<TraceRecord>& trace) {
  std::vector<double> freq(kStateBuckets, 0.0);
  if (trace.empty()) return freq;
  for (const TraceRecord& r : trace) ++freq[bucket(r.state_before)];
  for (double& f : freq) f /= static_cast<double>(trace.size());
  return freq;
}

}  // namespace betacut
