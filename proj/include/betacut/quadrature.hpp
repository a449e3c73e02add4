#pragma once

#include <functional>
#include <vector>

namespace betacut::quad {

struct Tolerance {
  double abs = 1e-13;
  double rel = 1e-12;
};

/// Adaptive Simpson on [lo, hi].
double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        Tolerance tol = {});

/// Adaptive Simpson over [lo, hi] split at the given interior breakpoints
/// (unsorted, duplicates and out-of-range values tolerated). Each smooth
/// piece is integrated separately so kinks do not degrade convergence.
double integrate_piecewise(const std::function<double(double)>& f, double lo, double hi,
                           std::vector<double> breakpoints, Tolerance tol = {});

/// Density of the sum of k i.i.d. exponentials with the given mean,
/// evaluated in log space to stay finite for large k.
double erlang_pdf(int k, double mean_each, double t);

/// Upper integration limit such that the exponential tail mass beyond it is
/// below eps.
double exp_tail_cutoff(double mean, double eps);

/// Upper integration limit covering an Erlang(k) density up to tail mass
/// roughly eps (conservative).
double erlang_tail_cutoff(int k, double mean_each, double eps);

}  // namespace betacut::quad
