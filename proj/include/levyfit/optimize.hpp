#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "levyfit/numeric.hpp"

namespace levyfit {

struct OptimizeConfig {
  std::optional<Vector> start;
  int multistart_count = 5;
  double gradient_tol = 1e-8;
  int max_iters = 2000;
  std::uint64_t seed = 0;
};

struct StartDiagnostics {
  Vector start;
  Vector argmax;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  double projected_gradient = 0.0;
  std::string message;
};

struct OptimizeResult {
  Vector argmax;
  double value = 0.0;
  std::size_t best_start = 0;
  bool converged = false;
  double projected_gradient = 0.0;
  std::vector<StartDiagnostics> starts;
};

/// Returns f(x); fills *grad with the gradient when grad is non-null.
using Objective = std::function<double(const Vector& x, Vector* grad)>;

/// Projected-gradient quasi-Newton maximization over the box [lower, upper]
/// with multistart. Stationarity: max|P(x + grad f) - x| < gradient_tol.
OptimizeResult optimize_box(const Objective& f, const Vector& lower, const Vector& upper,
                            const OptimizeConfig& cfg = {});

/// Single local run from one start.
StartDiagnostics maximize_from(const Objective& f, const Vector& lower, const Vector& upper, const Vector& start,
                               double gradient_tol, int max_iters);

}  // namespace levyfit
