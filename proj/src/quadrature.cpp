#include "levyfit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "levyfit/error.hpp"

namespace levyfit {

namespace {

// Kronrod 15-point nodes (nonnegative half) and weights; Gauss 7-point weights
// sit on the odd-indexed Kronrod nodes.
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kKronrod[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGauss[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double fc = f(center);
  double kron = fc * kKronrod[7];
  double gauss = fc * kGauss[3];
  for (int k = 0; k < 7; ++k) {
    double dx = half * kNodes[k];
    double fsum = f(center - dx) + f(center + dx);
    kron += kKronrod[k] * fsum;
    if (k % 2 == 1) gauss += kGauss[k / 2] * fsum;
  }
  kron *= half;
  gauss *= half;
  double err = std::abs(kron - gauss);
  if (!std::isfinite(kron))
    fail(ErrorCategory::Numeric, "non-finite integrand on [" + std::to_string(lo) + ", " +
                                     std::to_string(hi) + "]");
  return {lo, hi, kron, err};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                     double abs_tol, int max_intervals) {
  if (lo == hi) return {};
  if (hi < lo) {
    QuadResult r = integrate(f, hi, lo, rel_tol, abs_tol, max_intervals);
    r.value = -r.value;
    return r;
  }
  std::priority_queue<Segment> heap;
  Segment first = gk15(f, lo, hi);
  heap.push(first);
  double total = first.value;
  double total_err = first.error;
  int count = 1;
  const double round_off = 50.0 * std::numeric_limits<double>::epsilon();
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) &&
         total_err > round_off * std::abs(total)) {
    if (count >= max_intervals)
      fail(ErrorCategory::Numeric, "quadrature did not converge: estimate " + std::to_string(total) +
                                       ", error " + std::to_string(total_err));
    Segment worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      // interval cannot be split further; accept its contribution
      total_err -= worst.error;
      worst.error = 0.0;
      heap.push(worst);
      if (total_err <= 0.0) break;
      continue;
    }
    Segment left = gk15(f, worst.lo, mid);
    Segment right = gk15(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // re-sum to shed drift from incremental updates
  double sum = 0.0, err = 0.0;
  int n = 0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
    ++n;
  }
  return {sum, err, n};
}

QuadResult integrate_to_infinity(const std::function<double(double)>& f, double lo, double rel_tol,
                                 double abs_tol, int max_intervals) {
  auto g = [&](double t) {
    double one_minus = 1.0 - t;
    if (one_minus <= 0.0) return 0.0;
    double s = lo + t / one_minus;
    double v = f(s);
    if (v == 0.0) return 0.0;
    return v / (one_minus * one_minus);
  };
  return integrate(g, 0.0, 1.0, rel_tol, abs_tol, max_intervals);
}

}  // namespace levyfit
