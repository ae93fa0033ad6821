#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "levyfit/model.hpp"
#include "levyfit/noise.hpp"
#include "levyfit/numeric.hpp"
#include "levyfit/residuals.hpp"

namespace levyfit {

/// Inverse of a symmetric matrix through its eigendecomposition. Throws
/// Singular when an eigenvalue falls below 1e-12 times the largest one.
Matrix floored_inverse(const Matrix& sym, const std::string& what);

/// diag(-d2 H1(gamma_hat), -d2 H2(alpha_hat)).
Matrix gamma_hat_matrix(const Dataset& data, const SdeModel& model, const Vector& gamma, const Vector& alpha);

/// One d x p matrix per unit block: columns d_gamma(c^{-1})(dX - h a) and -h c^{-1} d_alpha a, summed over the block.
std::vector<Matrix> b_hat(const Dataset& data, const SdeModel& model, const Vector& gamma, const Vector& alpha,
                          const std::vector<UnitBlock>& blocks);

/// Noise part of the plug-in inputs; objective == nullptr means theta only.
struct NoiseInputs {
  const MObjective* objective = nullptr;
  Vector eta;
};

/// Sigma_hat in (gamma, alpha, eta) order. The residual-moment factors use 1/T.
Matrix sigma_hat(const Dataset& data, const SdeModel& model, const Vector& gamma, const Vector& alpha,
                 const ResidualSeries& residuals, const NoiseInputs& noise);

/// [[Gamma_hat, 0], [-(1/T) sum_i d_eta d_eps m(eps_i) b_i, -d2_eta H3]].
Matrix i_hat(const Matrix& gamma_hat, const std::vector<Matrix>& b, const RowMatrix& unit, const NoiseInputs& noise,
             double horizon);

/// Inverse of a block lower-triangular I_hat with symmetric diagonal blocks of the given sizes.
Matrix i_hat_inverse(const Matrix& i_hat, const std::vector<std::size_t>& block_sizes);

struct WaldResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// T delta' I' Sigma^{-1} I delta against chi2(dim delta).
WaldResult wald(const Vector& estimate, const Vector& null_value, const Matrix& i_hat, const Matrix& sigma_hat,
                double horizon);
/// T delta' Gamma Sigma_theta^{-1} Gamma delta against chi2(p).
WaldResult wald_theta(const Vector& theta_hat, const Vector& theta_null, const Matrix& gamma_hat,
                      const Matrix& sigma_theta, double horizon);

/// sqrt(diag(I^{-1} Sigma I^{-T}) / T).
Vector std_errors(const Matrix& i_hat, const Matrix& sigma_hat, double horizon,
                  const std::vector<std::size_t>& block_sizes);

struct AsymptoticsReport {
  std::vector<std::string> names;  // gamma, alpha, eta
  Vector estimate;
  Matrix gamma_hat;
  std::vector<Matrix> b_hat;
  Matrix sigma_hat;
  Matrix i_hat;
  Vector std_errors;
  Vector moment4;  // (1/T) sum_j dJ_a^4 per component
  Vector moment3;
  double horizon = 0.0;
  double sigma_min_eigenvalue = 0.0;
  double i_condition = 0.0;
};

AsymptoticsReport asymptotics(const Dataset& data, const SdeModel& model, const Vector& gamma, const Vector& alpha,
                              const ResidualSeries& residuals, const NoiseInputs& noise);

}  // namespace levyfit
