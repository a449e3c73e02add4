#include "betacut/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betacut::quad {

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  Tolerance tol;
  int max_depth;
};

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double recurse(const SimpsonState& st, double a, double b, double fa, double fm, double fb,
               double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double delta = left + right - whole;
  if (depth >= st.max_depth || std::abs(delta) <= 15.0 * eps) {
    return left + right + delta / 15.0;
  }
  return recurse(st, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
         recurse(st, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        Tolerance tol) {
  if (!(hi > lo)) return 0.0;
  SimpsonState st{f, tol, 48};
  // Seed with a handful of panels so narrow features are not missed by the
  // first coarse estimate.
  constexpr int kPanels = 8;
  const double width = (hi - lo) / kPanels;
  double sum = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double a = lo + i * width;
    const double b = (i + 1 == kPanels) ? hi : a + width;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(fa, fm, fb, a, b);
    const double eps = std::max(tol.abs / kPanels, tol.rel * std::abs(whole));
    sum += recurse(st, a, b, fa, fm, fb, whole, eps, 0);
  }
  return sum;
}

double integrate_piecewise(const std::function<double(double)>& f, double lo, double hi,
                           std::vector<double> breakpoints, Tolerance tol) {
  if (!(hi > lo)) return 0.0;
  std::vector<double> cuts{lo, hi};
  for (double b : breakpoints) {
    if (b > lo && b < hi && std::isfinite(b)) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] <= 0.0) continue;
    sum += adaptive_simpson(f, cuts[i], cuts[i + 1], tol);
  }
  return sum;
}

double erlang_pdf(int k, double mean_each, double t) {
  if (k < 1) throw std::invalid_argument("erlang stage count must be >= 1");
  if (!(mean_each > 0.0)) throw std::invalid_argument("erlang stage mean must be > 0");
  if (t < 0.0) return 0.0;
  if (t == 0.0) return k == 1 ? 1.0 / mean_each : 0.0;
  const double log_pdf = (k - 1) * std::log(t) - t / mean_each -
                         std::lgamma(static_cast<double>(k)) - k * std::log(mean_each);
  return std::exp(log_pdf);
}

double exp_tail_cutoff(double mean, double eps) {
  return mean * std::log(1.0 / eps);
}

double erlang_tail_cutoff(int k, double mean_each, double eps) {
  // Mean + a wide deviation band + the single-exponential cutoff; the
  // Poisson-tail Chernoff bound puts the remaining mass far below eps.
  const double kk = static_cast<double>(k);
  return mean_each * (kk + 12.0 * std::sqrt(kk) + std::log(1.0 / eps));
}

}  // namespace betacut::quad
