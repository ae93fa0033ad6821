#pragma once

#include <optional>
#include <vector>

#include "levyfit/model.hpp"
#include "levyfit/optimize.hpp"

namespace levyfit {

struct FitConfig {
  std::optional<Vector> gamma_start;
  std::optional<Vector> alpha_start;
  std::optional<Vector> gamma_lower, gamma_upper;  // default: model boxes
  std::optional<Vector> alpha_lower, alpha_upper;
  int multistart_count = 5;
  double gradient_tol = 1e-8;
  int max_iters = 2000;
  std::uint64_t seed = 0;
};

struct GqmleFit {
  Vector gamma_hat;
  Vector alpha_hat;
  double h1_value = 0.0;
  double h2_value = 0.0;
  double neg2_h1 = 0.0;  // -2 Tn H1
  double neg2_h2 = 0.0;  // -2 Tn H2
  double horizon = 0.0;  // Tn
  OptimizeResult stage1;
  OptimizeResult stage2;

  Vector theta() const;
};

/// Stepwise Gaussian quasi-likelihoods over one dataset.
///
/// H1(gamma) = -(1/2Tn) sum [h log det C + dX' C^-1 dX],  C = c c'
/// H2(alpha) = -(1/2Tn) sum (dX - h a)' C(gamma_hat)^-1 (dX - h a) / h
class QuasiLikelihood {
 public:
  QuasiLikelihood(const Dataset& data, const SdeModel& model);

  double h1(const Vector& gamma, Vector* grad = nullptr, Matrix* hess = nullptr) const;
  /// Caches C(gamma_hat) along the path for h2.
  void fix_gamma(const Vector& gamma_hat);
  double h2(const Vector& alpha, Vector* grad = nullptr, Matrix* hess = nullptr) const;

  double horizon() const noexcept { return horizon_; }
  double step() const noexcept { return h_; }
  std::size_t steps() const noexcept { return n_; }

 private:
  void set_state(std::vector<double>& slots, std::size_t j) const;

  const Dataset& data_;
  const SdeModel& model_;
  std::size_t n_, d_;
  double h_, horizon_;
  RowMatrix dx_;                 // n x d increments
  Vector gamma_hat_;
  std::vector<double> cinv_;     // per step row-major C^-1 at gamma_hat
  bool gamma_fixed_ = false;
};

double h1(const Dataset& data, const SdeModel& model, const Vector& gamma, Vector* grad = nullptr);
double h2(const Dataset& data, const SdeModel& model, const Vector& gamma_hat, const Vector& alpha,
          Vector* grad = nullptr);

GqmleFit fit_gqmle(const Dataset& data, const SdeModel& model, const FitConfig& cfg = {});

}  // namespace levyfit
