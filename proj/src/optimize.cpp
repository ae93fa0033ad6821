#include "levyfit/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levyfit/error.hpp"
#include "levyfit/rng.hpp"

namespace levyfit {

namespace {

Vector project(const Vector& x, const Vector& lo, const Vector& hi) { return x.cwiseMax(lo).cwiseMin(hi); }

double projected_gradient_norm(const Vector& x, const Vector& g_min, const Vector& lo, const Vector& hi) {
  if (x.size() == 0) return 0.0;
  return (project(x - g_min, lo, hi) - x).cwiseAbs().maxCoeff();
}

}  // namespace

StartDiagnostics maximize_from(const Objective& f, const Vector& lo, const Vector& hi, const Vector& start,
                               double gradient_tol, int max_iters) {
  const Eigen::Index n = lo.size();
  StartDiagnostics diag;
  diag.start = start;
  Vector x = project(start, lo, hi);
  Vector grad(n);
  // minimize F = -f internally
  auto eval = [&](const Vector& at, Vector& g) {
    double v = f(at, &g);
    g = -g;
    return -v;
  };
  double fx;
  try {
    fx = eval(x, grad);
  } catch (const Error& e) {
    diag.failed = true;
    diag.message = std::string("objective failed at start: ") + e.what();
    diag.argmax = x;
    diag.value = -std::numeric_limits<double>::infinity();
    return diag;
  }
  if (!std::isfinite(fx) || !grad.allFinite()) {
    diag.failed = true;
    diag.message = "objective is not finite at start";
    diag.argmax = x;
    diag.value = -std::numeric_limits<double>::infinity();
    return diag;
  }
  if (n == 0) {
    diag.argmax = x;
    diag.value = -fx;
    diag.converged = true;
    return diag;
  }

  Matrix H = Matrix::Identity(n, n);
  bool fresh = true;  // H is a (scaled) identity
  int it = 0;
  std::string message;
  for (; it < max_iters; ++it) {
    double pg = projected_gradient_norm(x, grad, lo, hi);
    diag.projected_gradient = pg;
    if (pg < gradient_tol) {
      diag.converged = true;
      break;
    }
    // variables held at a bound by the gradient
    std::vector<bool> active(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i)
      active[static_cast<std::size_t>(i)] = (x[i] <= lo[i] && grad[i] > 0.0) || (x[i] >= hi[i] && grad[i] < 0.0);
    Vector gfree = grad;
    for (Eigen::Index i = 0; i < n; ++i)
      if (active[static_cast<std::size_t>(i)]) gfree[i] = 0.0;
    Matrix Hr = H;
    for (Eigen::Index i = 0; i < n; ++i)
      if (active[static_cast<std::size_t>(i)]) {
        Hr.row(i).setZero();
        Hr.col(i).setZero();
      }
    Vector dir = -Hr * gfree;
    if (!(dir.dot(gfree) < 0.0)) {
      H.setIdentity();
      fresh = true;
      dir = -gfree;
    }
    // unscaled steepest descent: keep the trial step within half the box
    auto cap = [&](Vector& d0) {
      double r = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (hi[i] > lo[i]) r = std::max(r, std::abs(d0[i]) / (0.5 * (hi[i] - lo[i])));
      if (r > 1.0) d0 /= r;
    };
    if (fresh) cap(dir);
    // backtracking along the projected path
    bool accepted = false;
    Vector x_new, g_new(n);
    double f_new = 0.0;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double t = 1.0;
      for (int k = 0; k < 60; ++k, t *= 0.5) {
        x_new = project(x + t * dir, lo, hi);
        Vector step = x_new - x;
        if (step.cwiseAbs().maxCoeff() == 0.0) break;
        try {
          f_new = eval(x_new, g_new);
        } catch (const Error&) {
          continue;
        }
        if (!std::isfinite(f_new) || !g_new.allFinite()) continue;
        if (f_new <= fx + 1e-4 * grad.dot(step)) {
          accepted = true;
          break;
        }
      }
      // full step taken: expand while the objective keeps improving
      if (accepted && t == 1.0) {
        for (int k = 0; k < 40; ++k) {
          t *= 2.0;
          Vector x_try = project(x + t * dir, lo, hi);
          if ((x_try - x_new).cwiseAbs().maxCoeff() == 0.0) break;
          Vector g_try(n);
          double f_try;
          try {
            f_try = eval(x_try, g_try);
          } catch (const Error&) {
            break;
          }
          if (!std::isfinite(f_try) || !g_try.allFinite() || !(f_try < f_new)) break;
          x_new = x_try;
          f_new = f_try;
          g_new = g_try;
        }
      }
      if (!accepted && !fresh) {
        H.setIdentity();
        fresh = true;
        dir = -gfree;
        cap(dir);
      } else {
        break;
      }
    }
    if (!accepted) {
      message = "line search made no progress";
      break;
    }
    Vector s = x_new - x;
    Vector y = g_new - grad;
    double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh) {
        H *= sy / y.dot(y);
        fresh = false;
      }
      double rho = 1.0 / sy;
      Matrix I = Matrix::Identity(n, n);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
    } else {
      // curvature condition failed (nonconvex stretch): drop the stale scaling
      H.setIdentity();
      fresh = true;
    }
    x = x_new;
    fx = f_new;
    grad = g_new;
  }
  if (it >= max_iters) message = "iteration limit reached";
  diag.projected_gradient = projected_gradient_norm(x, grad, lo, hi);
  if (diag.projected_gradient < gradient_tol) diag.converged = true;
  diag.iterations = it;
  diag.argmax = x;
  diag.value = -fx;
  diag.message = diag.converged ? "converged" : message;
  return diag;
}

OptimizeResult optimize_box(const Objective& f, const Vector& lower, const Vector& upper, const OptimizeConfig& cfg) {
  if (lower.size() != upper.size()) fail(ErrorCategory::InvalidArgument, "box bounds differ in length");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (!(lower[i] <= upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      fail(ErrorCategory::InvalidArgument, "box bounds must be finite with lower <= upper");
  if (cfg.gradient_tol <= 0.0 || cfg.max_iters < 1 || cfg.multistart_count < 0)
    fail(ErrorCategory::InvalidArgument, "invalid optimizer settings");
  std::vector<Vector> starts;
  if (cfg.start) {
    if (cfg.start->size() != lower.size()) fail(ErrorCategory::InvalidArgument, "start has the wrong length");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
      if (!((*cfg.start)[i] >= lower[i] && (*cfg.start)[i] <= upper[i]))
        fail(ErrorCategory::InvalidArgument, "start lies outside the box at coordinate " + std::to_string(i));
    starts.push_back(*cfg.start);
  }
  RngStream rng(cfg.seed);
  int draws = cfg.multistart_count;
  if (starts.empty() && draws == 0) draws = 1;
  for (int k = 0; k < draws; ++k) {
    Vector s(lower.size());
    for (Eigen::Index i = 0; i < lower.size(); ++i) s[i] = rng.uniform(lower[i], upper[i]);
    starts.push_back(s);
  }
  OptimizeResult result;
  bool any = false;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    StartDiagnostics d = maximize_from(f, lower, upper, starts[k], cfg.gradient_tol, cfg.max_iters);
    if (!d.failed && (!any || d.value > result.value)) {
      any = true;
      result.value = d.value;
      result.argmax = d.argmax;
      result.best_start = k;
      result.converged = d.converged;
      result.projected_gradient = d.projected_gradient;
    }
    result.starts.push_back(std::move(d));
  }
  if (!any) {
    std::string msg = "all " + std::to_string(starts.size()) + " optimizer starts failed";
    if (!result.starts.empty()) msg += ": " + result.starts.front().message;
    fail(ErrorCategory::Optimizer, msg);
  }
  return result;
}

}  // namespace levyfit
