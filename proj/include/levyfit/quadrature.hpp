#pragma once

#include <functional>

namespace levyfit {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Global adaptive Gauss-Kronrod (7/15) on a finite interval.
/// Throws Numeric when the error target is not met within max_intervals.
QuadResult integrate(const std::function<double(double)>& f, double lo, double hi,
                     double rel_tol = 1e-12, double abs_tol = 0.0, int max_intervals = 2000);

/// Integral over [lo, inf) through s = lo + t/(1-t).
QuadResult integrate_to_infinity(const std::function<double(double)>& f, double lo,
                                 double rel_tol = 1e-12, double abs_tol = 0.0,
                                 int max_intervals = 2000);

}  // namespace levyfit
