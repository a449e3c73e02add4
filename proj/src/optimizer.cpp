#include "betacut/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

namespace betacut {

namespace {

constexpr int kGridPoints = 400;
constexpr double kGridSpanInterTimes = 30.0;
constexpr double kGoldenTol = 1e-6;
constexpr double kProfitMargin = 1e-9;
constexpr double kThresholdTol = 1e-4;

double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Objective Objective::parse(const std::string& name) {
  Objective o;
  std::string tok;
  for (std::size_t i = 0; i <= name.size(); ++i) {
    if (i == name.size() || name[i] == '+' || name[i] == ',') {
      if (tok == "total" || tok == "all") {
        o.block = o.linear = o.bernoulli = true;
      } else if (tok == "block") {
        o.block = true;
      } else if (tok == "linear") {
        o.linear = true;
      } else if (tok == "bernoulli" || tok == "bern") {
        o.bernoulli = true;
      } else if (!tok.empty()) {
        throw std::invalid_argument("unknown objective component: " + tok);
      }
      tok.clear();
    } else {
      tok += name[i];
    }
  }
  if (o.empty()) throw std::invalid_argument("objective mask must be non-empty");
  return o;
}

std::string Objective::name() const {
  if (block && linear && bernoulli) return "total";
  std::string s;
  const auto add = [&s](const char* part) {
    if (!s.empty()) s += '+';
    s += part;
  };
  if (block) add("block");
  if (linear) add("linear");
  if (bernoulli) add("bernoulli");
  return s;
}

OptimizationResult optimize_beta(const RewardSpec& spec, double alpha, double gamma,
                                 const Objective& objective, Engine engine) {
  if (objective.empty()) throw std::invalid_argument("objective mask must be non-empty");
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw std::invalid_argument("alpha must lie in (0, 0.5)");
  }
  const double c = spec.constant_total();
  double bonus_span = 0.0;
  for (const BernoulliTerm& b : spec.bernoulli_terms()) bonus_span += b.e;
  const double hi = c + bonus_span + kGridSpanInterTimes;

  const auto evaluate = [&](double beta) {
    return attacker_reward(spec, {alpha, gamma, beta}, engine);
  };
  const auto masked = [&](double beta) {
    return objective.value(evaluate(beta).per_unit_time);
  };

  // Coarse grid, plus the no-hiding and always-hiding extremes.
  std::vector<double> grid;
  grid.reserve(kGridPoints + 1);
  for (int i = 0; i <= kGridPoints; ++i) {
    grid.push_back(c + (hi - c) * i / kGridPoints);
  }
  double best_beta = grid[0];
  double best_value = -std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = masked(grid[i]);
    if (v > best_value) {
      best_value = v;
      best_beta = grid[i];
      best_idx = i;
    }
  }
  const std::size_t left = best_idx > 0 ? best_idx - 1 : 0;
  const std::size_t right = std::min(best_idx + 1, grid.size() - 1);
  if (right > left) {
    const double refined = golden_max(masked, grid[left], grid[right], kGoldenTol);
    const double v = masked(refined);
    if (v > best_value) {
      best_value = v;
      best_beta = refined;
    }
  }
  // Always-hide ties resolve toward +inf: the cutoff is then immaterial.
  const double inf = std::numeric_limits<double>::infinity();
  const double v_inf = masked(inf);
  if (v_inf >= best_value) {
    best_value = v_inf;
    best_beta = inf;
  }

  OptimizationResult out;
  out.beta_star = best_beta;
  const AttackerReward at_best = evaluate(best_beta);
  out.objective_value = objective.value(at_best.per_unit_time);
  out.full_breakdown = at_best.per_unit_time;
  out.honest_value = objective.value(honest_benchmark(spec, alpha));
  out.eq = at_best.eq;
  return out;
}

std::optional<double> profitability_threshold(const RewardSpec& spec, double gamma,
                                              const Objective& objective, Engine engine) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1]");
  }
  const auto profitable = [&](double alpha) {
    const OptimizationResult r = optimize_beta(spec, alpha, gamma, objective, engine);
    return r.objective_value > r.honest_value + kProfitMargin;
  };
  double lo = 1e-3;
  double hi = 0.4999;
  if (!profitable(hi)) return std::nullopt;
  if (profitable(lo)) return lo;
  while (hi - lo > kThresholdTol) {
    const double mid = 0.5 * (lo + hi);
    if (profitable(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<SweepRow> sweep(const RewardSpec& spec, const std::vector<double>& alphas,
                            double gamma, const std::vector<Objective>& objectives,
                            Engine engine) {
  if (alphas.empty()) throw std::invalid_argument("alpha grid must be non-empty");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 0.5)) {
      throw std::invalid_argument("alpha grid values must lie in (0, 0.5)");
    }
  }
  std::vector<SweepRow> rows(alphas.size() * objectives.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(rows.size())));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t idx = w; idx < rows.size(); idx += workers) {
        const std::size_t ai = idx / objectives.size();
        const std::size_t oi = idx % objectives.size();
        rows[idx].alpha = alphas[ai];
        rows[idx].objective = objectives[oi];
        rows[idx].result = optimize_beta(spec, alphas[ai], gamma, objectives[oi], engine);
      }
    });
  }
  for (std::thread& th : pool) th.join();
  return rows;
}

}  // namespace betacut
