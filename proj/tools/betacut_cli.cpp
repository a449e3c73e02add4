// Command-line front end: analytic evaluation, cutoff optimization,
// profitability thresholds, Monte Carlo simulation, and CSV reproduction of
// the standard result figures.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "betacut/calculus.hpp"
#include "betacut/json_io.hpp"
#include "betacut/markov.hpp"
#include "betacut/optimizer.hpp"
#include "betacut/simulator.hpp"
#include "betacut/version.hpp"

using namespace betacut;
using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

struct RunConfig {
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double gamma = 0.0;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double block_reward = 1.0;
  double linear_rate = 1.0;
  double bernoulli_p = 0.25;
  double bernoulli_e = 4.0;
  std::string objective = "total";
  std::uint64_t seed = 0;
  std::int64_t events = 1'000'000;
  int replicas = 8;
  std::string lambda_mode = "analytic";
  double lambda = 0.0;  // for --lambda-mode fixed
  std::string format = "csv";
  std::string out;
  std::string engine = "closed";
  std::string trace;

  RewardSpec spec() const {
    std::vector<RewardSpec> parts;
    if (block_reward > 0.0) parts.push_back(RewardSpec::constant(block_reward));
    if (linear_rate > 0.0) parts.push_back(RewardSpec::linear(linear_rate));
    if (bernoulli_p > 0.0 && bernoulli_e > 0.0) {
      parts.push_back(RewardSpec::bernoulli(bernoulli_p, bernoulli_e));
    }
    if (parts.empty()) {
      throw std::invalid_argument("reward spec has no components; set at least one of "
                                  "--block-reward/--linear-rate/--bernoulli-p");
    }
    return RewardSpec::composite(parts);
  }

  Engine engine_kind() const {
    if (engine == "closed") return Engine::closed_form;
    if (engine == "quadrature") return Engine::quadrature;
    throw std::invalid_argument("--engine must be closed or quadrature");
  }

  json effective() const {
    json j;
    j["alpha"] = alpha;
    j["gamma"] = gamma;
    j["beta"] = std::isinf(beta) ? json("inf") : json(beta);
    j["block-reward"] = block_reward;
    j["linear-rate"] = linear_rate;
    j["bernoulli-p"] = bernoulli_p;
    j["bernoulli-e"] = bernoulli_e;
    j["objective"] = objective;
    j["seed"] = seed;
    j["events"] = events;
    j["replicas"] = replicas;
    j["lambda-mode"] = lambda_mode;
    j["format"] = format;
    j["engine"] = engine;
    return j;
  }
};

/// Writes text to the output path or stdout when the path is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::ios_base::failure("cannot write output file: " + path);
  os << text;
  if (!os.flush()) throw std::ios_base::failure("cannot write output file: " + path);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) {
      os << header[i] << (i + 1 < header.size() ? "," : "\n");
    }
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        os << row[i] << (i + 1 < row.size() ? "," : "\n");
      }
    }
    return os.str();
  }

  std::string to_json() const {
    json arr = json::array();
    for (const auto& row : rows) {
      json obj;
      for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i];
      arr.push_back(obj);
    }
    return arr.dump(2) + "\n";
  }

  std::string render(const std::string& format) const {
    if (format == "csv") return csv();
    if (format == "json") return to_json();
    throw std::invalid_argument("--format must be csv or json");
  }
};

void write_figure(const RunConfig& cfg, const std::string& name, const Table& table,
                  const std::string& default_stem) {
  const std::string csv_path = cfg.out.empty() ? default_stem + ".csv" : cfg.out;
  emit(csv_path, table.csv());
  json meta;
  meta["figure"] = name;
  meta["tool"] = "betacut";
  meta["version"] = kVersion;
  meta["columns"] = table.header;
  meta["parameters"] = cfg.effective();
  emit(csv_path + ".meta.json", meta.dump(2) + "\n");
  std::cerr << "wrote " << csv_path << " and " << csv_path << ".meta.json\n";
}

void require_alpha(const RunConfig& cfg) {
  if (std::isnan(cfg.alpha)) throw std::invalid_argument("--alpha is required");
}

void require_beta(const RunConfig& cfg) {
  if (std::isnan(cfg.beta)) throw std::invalid_argument("--beta is required (inf allowed)");
}

// ---------------------------------------------------------------------------
// Commands

void run_analytic(const RunConfig& cfg) {
  require_alpha(cfg);
  require_beta(cfg);
  const RewardSpec spec = cfg.spec();
  const AttackerParams params{cfg.alpha, cfg.gamma, cfg.beta};
  const AttackerReward r = attacker_reward(spec, params, cfg.engine_kind());
  const RewardBreakdown honest = honest_benchmark(spec, cfg.alpha);
  Table t;
  t.header = {"alpha", "gamma",  "beta",      "lambda", "h",     "p0",
              "p0p",   "p0pp",   "p1",        "block",  "linear", "bernoulli",
              "total", "honest_total"};
  t.rows.push_back({num(cfg.alpha), num(cfg.gamma), num(cfg.beta), num(r.eq.lambda),
                    num(r.eq.h), num(r.eq.stationary.p0), num(r.eq.stationary.p0_prime),
                    num(r.eq.stationary.p0_dprime), num(r.eq.stationary.p1),
                    num(r.per_unit_time.block), num(r.per_unit_time.linear),
                    num(r.per_unit_time.bernoulli), num(r.per_unit_time.total()),
                    num(honest.total())});
  emit(cfg.out, t.render(cfg.format));
}

void run_optimize(const RunConfig& cfg) {
  require_alpha(cfg);
  const Objective obj = Objective::parse(cfg.objective);
  const OptimizationResult r =
      optimize_beta(cfg.spec(), cfg.alpha, cfg.gamma, obj, cfg.engine_kind());
  Table t;
  t.header = {"alpha",        "gamma",  "objective", "beta_star", "objective_value",
              "honest_value", "block",  "linear",    "bernoulli", "total",
              "lambda"};
  t.rows.push_back({num(cfg.alpha), num(cfg.gamma), obj.name(), num(r.beta_star),
                    num(r.objective_value), num(r.honest_value), num(r.full_breakdown.block),
                    num(r.full_breakdown.linear), num(r.full_breakdown.bernoulli),
                    num(r.full_breakdown.total()), num(r.eq.lambda)});
  emit(cfg.out, t.render(cfg.format));
}

void run_threshold(const RunConfig& cfg) {
  const Objective obj = Objective::parse(cfg.objective);
  const auto th = profitability_threshold(cfg.spec(), cfg.gamma, obj, cfg.engine_kind());
  Table t;
  t.header = {"gamma", "objective", "threshold_alpha"};
  t.rows.push_back({num(cfg.gamma), obj.name(), th ? num(*th) : ""});
  emit(cfg.out, t.render(cfg.format));
}

void run_simulate(const RunConfig& cfg) {
  require_alpha(cfg);
  require_beta(cfg);
  SimConfig sim;
  sim.spec = cfg.spec();
  sim.params = {cfg.alpha, cfg.gamma, cfg.beta};
  sim.horizon_events = cfg.events;
  sim.seed = cfg.seed;
  sim.replicas = cfg.replicas;
  if (cfg.lambda_mode == "analytic") {
    sim.lambda_mode = LambdaMode::analytic;
  } else if (cfg.lambda_mode == "self-calibrating") {
    sim.lambda_mode = LambdaMode::self_calibrating;
  } else if (cfg.lambda_mode == "fixed") {
    sim.lambda_mode = LambdaMode::fixed;
    sim.fixed_lambda = cfg.lambda;
  } else {
    throw std::invalid_argument(
        "--lambda-mode must be analytic, self-calibrating or fixed");
  }
  std::vector<TraceRecord> trace;
  const SimResult r = simulate(sim, cfg.trace.empty() ? nullptr : &trace);

  if (!cfg.trace.empty()) {
    std::ostringstream os;
    os << "index,time,winner,state_before,state_after,action,reward\n";
    for (const TraceRecord& rec : trace) {
      os << rec.index << ',' << num(rec.time) << ',' << rec.winner << ','
         << state_name(rec.state_before) << ',' << state_name(rec.state_after) << ','
         << rec.action << ',' << num(rec.reward) << '\n';
    }
    emit(cfg.trace, os.str());
  }

  Table t;
  t.header = {"alpha",        "gamma",        "beta",       "lambda_mode",
              "lambda_used",  "events",       "replicas",   "seed",
              "att_block",    "att_linear",   "att_bern",   "att_total",
              "se_block",     "se_linear",    "se_bern",    "hon_block",
              "hon_linear",   "hon_bern",     "hon_total",  "orphan_rate",
              "se_orphan",    "growth_rate",  "elapsed"};
  t.rows.push_back(
      {num(cfg.alpha), num(cfg.gamma), num(cfg.beta), cfg.lambda_mode, num(r.lambda_used),
       std::to_string(r.events), std::to_string(cfg.replicas), std::to_string(cfg.seed),
       num(r.attacker.mean.block), num(r.attacker.mean.linear),
       num(r.attacker.mean.bernoulli), num(r.attacker.mean.total()),
       num(r.attacker.se.block), num(r.attacker.se.linear), num(r.attacker.se.bernoulli),
       num(r.honest.mean.block), num(r.honest.mean.linear), num(r.honest.mean.bernoulli),
       num(r.honest.mean.total()), num(r.empirical_orphan_rate), num(r.orphan_rate_se),
       num(r.canonical_growth_rate), num(r.elapsed_sim_time)});
  emit(cfg.out, t.render(cfg.format));
}

// ---------------------------------------------------------------------------
// Figures

std::vector<double> alpha_grid() {
  std::vector<double> g;
  for (int i = 5; i <= 45; ++i) g.push_back(i / 100.0);
  return g;
}

void figure_interpolation(const RunConfig& cfg) {
  const RewardSpec fee = RewardSpec::linear(cfg.linear_rate);
  const RewardSpec both = RewardSpec::composite(
      {RewardSpec::constant(cfg.block_reward), RewardSpec::linear(cfg.linear_rate)});
  const std::vector<double> grid = alpha_grid();
  const auto fee_rows = sweep(fee, grid, cfg.gamma, {Objective::only_linear()});
  const auto both_rows = sweep(both, grid, cfg.gamma, {Objective::total()});
  Table t;
  t.header = {"alpha", "honest", "selfish_block", "cutoff_linear", "cutoff_linear_block"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = grid[i];
    const double selfish = selfish_block_only(a, cfg.gamma) / cfg.block_reward;
    const double lin = fee_rows[i].result.objective_value / cfg.linear_rate;
    const double comb =
        both_rows[i].result.objective_value / (cfg.block_reward + cfg.linear_rate);
    t.rows.push_back({num(a), num(a), num(selfish), num(lin), num(comb)});
  }
  write_figure(cfg, "interpolation", t, "interpolation");
}

void figure_threshold_alphas(const RunConfig& cfg) {
  const RewardSpec block = RewardSpec::constant(cfg.block_reward);
  const RewardSpec fee = RewardSpec::linear(cfg.linear_rate);
  const RewardSpec both = RewardSpec::composite({block, fee});
  const RewardSpec all = cfg.spec();
  Table t;
  t.header = {"gamma", "block_only", "linear_only", "linear_block", "total"};
  const auto cell = [](std::optional<double> th) { return th ? num(*th) : std::string(); };
  for (int i = 0; i <= 10; ++i) {
    const double g = i * 0.05;
    t.rows.push_back(
        {num(g), cell(profitability_threshold(block, g, Objective::only_block())),
         cell(profitability_threshold(fee, g, Objective::only_linear())),
         cell(profitability_threshold(both, g, Objective::total())),
         cell(profitability_threshold(all, g, Objective::total()))});
  }
  write_figure(cfg, "threshold-alphas", t, "threshold-alphas");
}

void figure_bernoulli(const RunConfig& cfg) {
  const RewardSpec all = cfg.spec();
  const double bonus_mean = cfg.bernoulli_p * cfg.bernoulli_e;
  const double total_mean = cfg.block_reward + cfg.linear_rate + bonus_mean;
  const std::vector<double> grid = alpha_grid();
  const auto rows =
      sweep(all, grid, cfg.gamma, {Objective::only_bernoulli(), Objective::total()});
  Table t;
  t.header = {"alpha", "honest", "selfish_block", "cutoff_bernoulli", "cutoff_total"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = grid[i];
    const double selfish = selfish_block_only(a, cfg.gamma) / cfg.block_reward;
    const double bern = rows[2 * i].result.objective_value / bonus_mean;
    const double total = rows[2 * i + 1].result.objective_value / total_mean;
    t.rows.push_back({num(a), num(a), num(selfish), num(bern), num(total)});
  }
  write_figure(cfg, "bernoulli", t, "bernoulli");
}

void figure_rew_comp(const RunConfig& cfg) {
  const RewardSpec all = cfg.spec();
  const double total_mean =
      cfg.block_reward + cfg.linear_rate + cfg.bernoulli_p * cfg.bernoulli_e;
  const std::vector<double> grid = alpha_grid();
  const auto rows = sweep(all, grid, cfg.gamma,
                          {Objective::only_block(), Objective::only_linear(),
                           Objective::only_bernoulli(), Objective::total()});
  Table t;
  t.header = {"alpha",           "honest_total",     "selfish_total", "opt_block_total",
              "opt_linear_total", "opt_bernoulli_total", "opt_total_total"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = grid[i];
    const double selfish =
        attacker_reward(all, {a, cfg.gamma, kInf}).per_unit_time.total();
    t.rows.push_back({num(a), num(total_mean * a), num(selfish),
                      num(rows[4 * i].result.full_breakdown.total()),
                      num(rows[4 * i + 1].result.full_breakdown.total()),
                      num(rows[4 * i + 2].result.full_breakdown.total()),
                      num(rows[4 * i + 3].result.full_breakdown.total())});
  }
  write_figure(cfg, "rew-comp", t, "rew-comp");
}

void figure_sims(const RunConfig& cfg) {
  const RewardSpec all = cfg.spec();
  Table t;
  t.header = {"alpha",      "beta",       "lambda",     "an_block",  "an_linear",
              "an_bern",    "an_total",   "sim_block",  "sim_linear", "sim_bern",
              "sim_total",  "se_block",   "se_linear",  "se_bern",   "sim_lambda",
              "se_lambda",  "growth"};
  std::uint64_t run = 0;
  for (double alpha : {0.1, 0.2, 0.3, 0.4}) {
    for (double beta : {1.5, 3.0, 5.0}) {
      const AttackerParams params{alpha, cfg.gamma, beta};
      const AttackerReward an = attacker_reward(all, params);
      SimConfig sim;
      sim.spec = all;
      sim.params = params;
      sim.horizon_events = std::max<std::int64_t>(cfg.events / cfg.replicas, 10'000);
      sim.replicas = cfg.replicas;
      sim.seed = derive_seed(cfg.seed, run++);
      const SimResult r = simulate(sim);
      t.rows.push_back({num(alpha), num(beta), num(an.eq.lambda),
                        num(an.per_unit_time.block), num(an.per_unit_time.linear),
                        num(an.per_unit_time.bernoulli), num(an.per_unit_time.total()),
                        num(r.attacker.mean.block), num(r.attacker.mean.linear),
                        num(r.attacker.mean.bernoulli), num(r.attacker.mean.total()),
                        num(r.attacker.se.block), num(r.attacker.se.linear),
                        num(r.attacker.se.bernoulli), num(r.empirical_orphan_rate),
                        num(r.orphan_rate_se), num(r.canonical_growth_rate)});
    }
  }
  write_figure(cfg, "sims", t, "sims");
}

void figure_linear_only(const RunConfig& cfg) {
  const RewardSpec fee = RewardSpec::linear(1.0);
  Table t;
  t.header = {"alpha", "lambda", "beta", "quadrature_total", "closed_total"};
  for (double alpha : {0.2, 0.3, 0.4}) {
    for (double lambda : {0.0, 0.5}) {
      for (double beta = 0.25; beta <= 5.01; beta += 0.25) {
        const double engine =
            attacker_reward_at(fee, {alpha, cfg.gamma, beta}, lambda, Engine::quadrature)
                .per_unit_time.total();
        const double closed =
            attacker_reward_at(fee, {alpha, cfg.gamma, beta}, lambda).per_unit_time.total();
        t.rows.push_back({num(alpha), num(lambda), num(beta), num(engine), num(closed)});
      }
    }
  }
  write_figure(cfg, "linear-only", t, "linear-only");
}

void figure_block_only(const RunConfig& cfg) {
  Table t;
  t.header = {"alpha", "honest", "gamma0", "gamma025", "gamma05"};
  for (int i = 1; i <= 49; ++i) {
    const double a = i / 100.0;
    t.rows.push_back({num(a), num(a), num(selfish_block_only(a, 0.0)),
                      num(selfish_block_only(a, 0.25)), num(selfish_block_only(a, 0.5))});
  }
  write_figure(cfg, "block-only", t, "block-only");
}

void run_figure(const RunConfig& cfg, const std::string& name) {
  if (name == "interpolation") {
    figure_interpolation(cfg);
  } else if (name == "threshold-alphas") {
    figure_threshold_alphas(cfg);
  } else if (name == "bernoulli") {
    figure_bernoulli(cfg);
  } else if (name == "rew-comp") {
    figure_rew_comp(cfg);
  } else if (name == "sims") {
    figure_sims(cfg);
  } else if (name == "linear-only") {
    figure_linear_only(cfg);
  } else if (name == "block-only") {
    figure_block_only(cfg);
  } else {
    throw std::invalid_argument(
        "unknown figure: " + name +
        " (expected interpolation, threshold-alphas, bernoulli, rew-comp, sims, "
        "linear-only or block-only)");
  }
}

/// Fills config-file values into every slot whose flag was not given on the
/// command line; flags win.
void apply_config(const std::string& path, CLI::App* sub, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("invalid config JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw std::invalid_argument("config JSON must be an object");
  const auto given = [&](const std::string& flag) {
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  const auto number = [](const json& v) {
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s == "inf" || s == "infinity") return kInf;
      return std::stod(s);
    }
    return v.get<double>();
  };
  const auto set_num = [&](const char* key, double& slot) {
    if (j.contains(key) && !given(std::string("--") + key)) slot = number(j[key]);
  };
  const auto set_str = [&](const char* key, std::string& slot) {
    if (j.contains(key) && !given(std::string("--") + key)) {
      slot = j[key].get<std::string>();
    }
  };
  set_num("alpha", cfg.alpha);
  set_num("gamma", cfg.gamma);
  set_num("beta", cfg.beta);
  set_num("block-reward", cfg.block_reward);
  set_num("linear-rate", cfg.linear_rate);
  set_num("bernoulli-p", cfg.bernoulli_p);
  set_num("bernoulli-e", cfg.bernoulli_e);
  set_num("lambda", cfg.lambda);
  set_str("objective", cfg.objective);
  set_str("lambda-mode", cfg.lambda_mode);
  set_str("format", cfg.format);
  set_str("out", cfg.out);
  set_str("engine", cfg.engine);
  if (j.contains("seed") && !given("--seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("events") && !given("--events")) {
    cfg.events = j["events"].get<std::int64_t>();
  }
  if (j.contains("replicas") && !given("--replicas")) {
    cfg.replicas = j["replicas"].get<int>();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"beta-cutoff withholding analysis toolkit"};
  app.set_version_flag("--version", std::string("betacut ") + kVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  std::string figure_name;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--alpha", cfg.alpha, "attacker hashrate fraction");
    sub->add_option("--gamma", cfg.gamma,
                    "honest fraction mining the attacker tip in races");
    sub->add_option("--beta", cfg.beta, "publish cutoff in reward units (inf allowed)");
    sub->add_option("--block-reward", cfg.block_reward, "constant reward per block");
    sub->add_option("--linear-rate", cfg.linear_rate, "fee accrual per unit time");
    sub->add_option("--bernoulli-p", cfg.bernoulli_p, "bonus probability per block");
    sub->add_option("--bernoulli-e", cfg.bernoulli_e, "bonus size");
    sub->add_option("--objective", cfg.objective,
                    "reward mask: total, block, linear, bernoulli, or a +-joined list");
    sub->add_option("--seed", cfg.seed, "base rng seed");
    sub->add_option("--events", cfg.events, "block-creation events per replica");
    sub->add_option("--replicas", cfg.replicas, "independent simulation replicas");
    sub->add_option("--lambda-mode", cfg.lambda_mode,
                    "analytic, self-calibrating, or fixed");
    sub->add_option("--lambda", cfg.lambda, "orphan rate for --lambda-mode fixed");
    sub->add_option("--format", cfg.format, "csv or json");
    sub->add_option("--out", cfg.out, "output path (stdout when omitted)");
    sub->add_option("--engine", cfg.engine, "closed or quadrature");
    sub->add_option("--config", config_path, "JSON config file; flags win over its values");
  };

  CLI::App* analytic = app.add_subcommand("analytic", "evaluate the solved equilibrium");
  CLI::App* optimize = app.add_subcommand("optimize", "maximize the masked reward over beta");
  CLI::App* threshold =
      app.add_subcommand("threshold", "lowest profitable hashrate for the objective");
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo validation run");
  CLI::App* figure = app.add_subcommand("figure", "regenerate a result figure as CSV");
  figure->add_option("name", figure_name, "figure name")->required();
  simulate_cmd->add_option("--trace", cfg.trace, "write a per-event CSV trace here");
  for (CLI::App* sub : {analytic, optimize, threshold, simulate_cmd, figure}) {
    add_common(sub);
  }

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!config_path.empty()) apply_config(config_path, sub, cfg);
    if (sub == analytic) {
      run_analytic(cfg);
    } else if (sub == optimize) {
      run_optimize(cfg);
    } else if (sub == threshold) {
      run_threshold(cfg);
    } else if (sub == simulate_cmd) {
      run_simulate(cfg);
    } else if (sub == figure) {
      run_figure(cfg, figure_name);
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
