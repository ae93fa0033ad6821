#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "levyfit/laws.hpp"
#include "levyfit/numeric.hpp"
#include "levyfit/optimize.hpp"

namespace levyfit {

/// Contrast m(eps, eta) for the noise parameter, evaluated over the rows of a
/// residual matrix. Derivatives not overridden are taken by finite differences:
/// score with step cbrt(eps_mach) max(1,|eta|), second and mixed derivatives
/// with step eps_mach^(1/4) max(1,|.|).
class MObjective {
 public:
  explicit MObjective(std::vector<std::string> labels) : labels_(std::move(labels)) {}
  virtual ~MObjective() = default;
  virtual std::string family() const = 0;
  virtual std::size_t dim() const = 0;
  const std::vector<std::string>& param_labels() const noexcept { return labels_; }
  std::size_t num_params() const noexcept { return labels_.size(); }

  /// out[i] = m(row i, eta)
  virtual void values(const RowMatrix& eps, const Vector& eta, double* out) const = 0;
  /// N x p_eta matrix of d_eta m.
  virtual Matrix scores(const RowMatrix& eps, const Vector& eta) const;
  /// Sum over rows of d2_eta m (p_eta x p_eta).
  virtual Matrix hessian_sum(const RowMatrix& eps, const Vector& eta) const;
  /// Row i holds d_eta_l d_eps_a m at entry l*dim + a.
  virtual Matrix cross(const RowMatrix& eps, const Vector& eta) const;

 protected:
  std::vector<std::string> labels_;
};

using MObjectivePtr = std::shared_ptr<const MObjective>;

/// log N(0, sigma^2) density.
class GaussianObjective final : public MObjective {
 public:
  explicit GaussianObjective(std::vector<std::string> labels = {"sigma"}) : MObjective(std::move(labels)) {}
  std::string family() const override { return "gaussian"; }
  std::size_t dim() const override { return 1; }
  void values(const RowMatrix& eps, const Vector& eta, double* out) const override;
  Matrix scores(const RowMatrix& eps, const Vector& eta) const override;
  Matrix hessian_sum(const RowMatrix& eps, const Vector& eta) const override;
  Matrix cross(const RowMatrix& eps, const Vector& eta) const override;
};

/// Unit-time log density of the standardized symmetric VG law.
class VgObjective final : public MObjective {
 public:
  explicit VgObjective(std::vector<std::string> labels = {"eta"}) : MObjective(std::move(labels)) {}
  std::string family() const override { return "vg"; }
  std::size_t dim() const override { return 1; }
  void values(const RowMatrix& eps, const Vector& eta, double* out) const override;
  Matrix scores(const RowMatrix& eps, const Vector& eta) const override;
  Matrix hessian_sum(const RowMatrix& eps, const Vector& eta) const override;
  Matrix cross(const RowMatrix& eps, const Vector& eta) const override;
};

/// Unit-time log density of any law with a density.
class LawObjective final : public MObjective {
 public:
  explicit LawObjective(LawPtr law);
  std::string family() const override { return law_->family(); }
  std::size_t dim() const override { return law_->dim(); }
  void values(const RowMatrix& eps, const Vector& eta, double* out) const override;

 private:
  LawPtr law_;
};

/// Sum of univariate objectives applied to separate columns.
class ProductObjective final : public MObjective {
 public:
  explicit ProductObjective(std::vector<MObjectivePtr> parts);
  std::string family() const override { return "product"; }
  std::size_t dim() const override { return parts_.size(); }
  void values(const RowMatrix& eps, const Vector& eta, double* out) const override;
  Matrix scores(const RowMatrix& eps, const Vector& eta) const override;
  Matrix hessian_sum(const RowMatrix& eps, const Vector& eta) const override;
  Matrix cross(const RowMatrix& eps, const Vector& eta) const override;

 private:
  std::vector<MObjectivePtr> parts_;
  std::vector<std::size_t> offsets_;
  RowMatrix column(const RowMatrix& eps, std::size_t k) const;
  Vector slice(const Vector& eta, std::size_t k) const;
};

/// Quasi-likelihood objective for a law: analytic forms for gaussian and vg,
/// per-component for products, numeric otherwise. The law labels are kept.
MObjectivePtr make_objective(const LawPtr& law);

/// (1/T) sum_i m(eps_i, eta); grad gets (1/T) sum_i d_eta m.
double h3(const RowMatrix& unit, const MObjective& m, const Vector& eta, double horizon, Vector* grad = nullptr);

struct NoiseFitConfig {
  std::optional<Vector> start;
  Vector lower, upper;
  int multistart_count = 5;
  double gradient_tol = 1e-8;
  int max_iters = 2000;
  std::uint64_t seed = 0;
};

struct NoiseFit {
  Vector eta_hat;
  double h3_value = 0.0;
  double log_lik = 0.0;     // sum_i m(eps_i, eta_hat)
  double neg2_m_sum = 0.0;  // -2 log_lik
  double horizon = 0.0;
  OptimizeResult diagnostics;
};

NoiseFit fit_noise(const RowMatrix& unit, const MObjective& m, double horizon, const NoiseFitConfig& cfg);

/// Default search box for a named family.
std::pair<Vector, Vector> default_family_box(const std::string& family);

struct FamilyCandidate {
  std::string family;
  MObjectivePtr objective;
  Vector lower, upper;
};

/// Builds the standard candidate (standardized law) for a family name.
FamilyCandidate make_candidate(const std::string& family);

struct SelectionRow {
  std::string family;
  std::size_t k = 0;
  Vector eta_hat;
  double log_lik = 0.0;
  double aic = 0.0;
  std::size_t rank = 0;  // 1-based; 0 when the fit failed
  std::string status;    // "ok" or "error:<message>"
};

/// Fits every candidate and ranks by AIC = 2k - 2 log L (ties: smaller k, then name).
/// Failures stay in the table with status error:<msg>, after the ranked rows.
std::vector<SelectionRow> aic_select(const RowMatrix& unit, const std::vector<FamilyCandidate>& candidates,
                                     double horizon, const NoiseFitConfig& base = {});

std::string selection_csv(const std::vector<SelectionRow>& rows);

struct KernelDensity {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

/// Gaussian kernel on a 512-point grid over [min - 3bw, max + 3bw].
/// Default bandwidth 0.9 min(sd, IQR/1.34) N^(-1/5).
KernelDensity kernel_density(const std::vector<double>& x, std::optional<double> bandwidth = std::nullopt);

std::string kernel_density_csv(const KernelDensity& kde);

}  // namespace levyfit
