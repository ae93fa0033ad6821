#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "levyfit/numeric.hpp"
#include "levyfit/rng.hpp"

namespace levyfit {

/// Noise law: sampler plus optional density and characteristic function.
///
/// Laws are stateless in their parameters; the parameter vector eta is passed
/// to every call, in the order of param_labels().
class LevyLaw {
 public:
  explicit LevyLaw(std::vector<std::string> labels) : labels_(std::move(labels)) {}
  virtual ~LevyLaw() = default;

  virtual std::string family() const = 0;
  virtual std::size_t dim() const { return 1; }
  const std::vector<std::string>& param_labels() const noexcept { return labels_; }
  std::size_t num_params() const noexcept { return labels_.size(); }

  /// Throws Domain when eta is outside the parameter space.
  virtual void validate(const Vector& eta) const = 0;
  /// count x dim increments over a step of length dt.
  virtual RowMatrix sample(std::size_t count, double dt, const Vector& eta, RngStream& rng) const = 0;

  virtual bool has_density() const { return false; }
  /// log density of the dt-increment at x (x has dim() entries).
  virtual double log_density(const double* x, double dt, const Vector& eta) const;
  /// Vectorized form over the rows of xs; default loops over log_density.
  virtual void log_density_rows(const RowMatrix& xs, double dt, const Vector& eta, double* out) const;

  virtual bool has_char_fn() const { return false; }
  virtual std::complex<double> char_fn(double u, double dt, const Vector& eta) const;

 protected:
  std::vector<std::string> labels_;
};

using LawPtr = std::shared_ptr<const LevyLaw>;

// ---------- free functions ----------

std::vector<double> vg_sample(std::size_t n, double dt, double eta, RngStream& rng);
/// log density of the dt-increment of the standardized symmetric VG law.
double vg_log_density(double x, double dt, double eta);
double vg_unit_log_density(double x, double eta);
/// d/dx log density of the unit-time VG law.
double vg_unit_score_x(double x, double eta);
std::complex<double> vg_char_fn(double u, double dt, double eta);

struct BilateralGammaParams {
  double delta1, gamma1, delta2, gamma2;
};
std::vector<double> bgamma_sample(std::size_t n, double dt, const BilateralGammaParams& p, RngStream& rng);
/// (mean, variance - 1) of the unit-time law.
std::pair<double, double> bgamma_check_standardized(const BilateralGammaParams& p);
double bgamma_log_density(double x, double t, const BilateralGammaParams& p);
double bgamma_density(double x, double t, const BilateralGammaParams& p);
/// Standardized shapes from the rates: delta1 = g1^2 g2/(g1+g2), delta2 = g1 g2^2/(g1+g2).
BilateralGammaParams bgamma_standardized(double gamma1, double gamma2);

struct NtsParams {
  double alpha, a, b, beta, mu;
};
std::vector<double> nts_sample(std::size_t n, double dt, const NtsParams& p, RngStream& rng);
double nts_levy_density(double z, const NtsParams& p);
double nts_mean(const NtsParams& p);
double nts_variance(const NtsParams& p);
/// (a, mu) solving the unit mean 0 / unit variance 1 constraints.
NtsParams nts_standardized(double alpha, double b, double beta);
std::complex<double> nts_char_fn(double u, double dt, const NtsParams& p);

/// Density of the dt-increment by trapezoid Fourier inversion of a tabulated
/// characteristic function.
class NtsDensity {
 public:
  NtsDensity(const NtsParams& p, double dt);
  /// Interpolated from the FFT grid; direct sum outside it.
  double density(double x) const;
  double log_density(double x) const;
  /// Trapezoid sum evaluated at x directly.
  double density_direct(double x) const;

 private:
  double du_;
  std::vector<std::complex<double>> phi_;
  double x_lo_ = 0.0, dx_ = 0.0;
  std::vector<double> grid_;
};

std::vector<double> empirical_sample(std::size_t n, const std::vector<double>& store, RngStream& rng);

// ---------- law objects ----------

class GaussianLaw final : public LevyLaw {
 public:
  explicit GaussianLaw(std::vector<std::string> labels = {"sigma"});
  std::string family() const override { return "gaussian"; }
  void validate(const Vector& eta) const override;
  RowMatrix sample(std::size_t count, double dt, const Vector& eta, RngStream& rng) const override;
  bool has_density() const override { return true; }
  double log_density(const double* x, double dt, const Vector& eta) const override;
  bool has_char_fn() const override { return true; }
  std::complex<double> char_fn(double u, double dt, const Vector& eta) const override;
};

class VarianceGammaLaw final : public LevyLaw {
 public:
  explicit VarianceGammaLaw(std::vector<std::string> labels = {"eta"});
  std::string family() const override { return "vg"; }
  void validate(const Vector& eta) const override;
  RowMatrix sample(std::size_t count, double dt, const Vector& eta, RngStream& rng) const override;
  bool has_density() const override { return true; }
  double log_density(const double* x, double dt, const Vector& eta) const override;
  bool has_char_fn() const override { return true; }
  std::complex<double> char_fn(double u, double dt, const Vector& eta) const override;
};

/// Raw parameters (delta1, gamma1, delta2, gamma2), or (gamma1, gamma2) when
/// standardized, with the shapes derived so the unit law has mean 0, variance 1.
class BilateralGammaLaw final : public LevyLaw {
 public:
  BilateralGammaLaw(bool standardized, std::vector<std::string> labels = {});
  std::string family() const override { return "bgamma"; }
  bool standardized() const noexcept { return standardized_; }
  BilateralGammaParams resolve(const Vector& eta) const;
  void validate(const Vector& eta) const override;
  RowMatrix sample(std::size_t count, double dt, const Vector& eta, RngStream& rng) const override;
  bool has_density() const override { return true; }
  double log_density(const double* x, double dt, const Vector& eta) const override;
  bool has_char_fn() const override { return true; }
  std::complex<double> char_fn(double u, double dt, const Vector& eta) const override;

 private:
  bool standardized_;
};

/// Raw parameters (alpha, a, b, beta, mu), or (alpha, b, beta) when standardized.
class NormalTemperedStableLaw final : public LevyLaw {
 public:
  NormalTemperedStableLaw(bool standardized, std::vector<std::string> labels = {});
  std::string family() const override { return "nts"; }
  bool standardized() const noexcept { return standardized_; }
  NtsParams resolve(const Vector& eta) const;
  void validate(const Vector& eta) const override;
  RowMatrix sample(std::size_t count, double dt, const Vector& eta, RngStream& rng) const override;
  bool has_density() const override { return true; }
  double log_density(const double* x, double dt, const Vector& eta) const override;
  void log_density_rows(const RowMatrix& xs, double dt, const Vector& eta, double* out) const override;
  bool has_char_fn() const override { return true; }
  std::complex<double> char_fn(double u, double dt, const Vector& eta) const override;

 private:
  bool standardized_;
};

/// Resamples stored increments; only valid at the step the store was built for.
class EmpiricalLaw final : public LevyLaw {
 public:
  EmpiricalLaw(std::vector<double> store, double source_dt);
  std::string family() const override { return "empirical"; }
  const std::vector<double>& store() const noexcept { return store_; }
  double source_dt() const noexcept { return source_dt_; }
  void validate(const Vector& eta) const override;
  RowMatrix sample(std::size_t count, double dt, const Vector& eta, RngStream& rng) const override;

 private:
  std::vector<double> store_;
  double source_dt_;
};

/// Independent univariate components; parameters are concatenated in order.
class ProductLaw final : public LevyLaw {
 public:
  explicit ProductLaw(std::vector<LawPtr> components);
  std::string family() const override { return "product"; }
  std::size_t dim() const override { return components_.size(); }
  const std::vector<LawPtr>& components() const noexcept { return components_; }
  /// Slice of eta belonging to component k.
  Vector component_params(std::size_t k, const Vector& eta) const;
  void validate(const Vector& eta) const override;
  RowMatrix sample(std::size_t count, double dt, const Vector& eta, RngStream& rng) const override;
  bool has_density() const override;
  double log_density(const double* x, double dt, const Vector& eta) const override;
  void log_density_rows(const RowMatrix& xs, double dt, const Vector& eta, double* out) const override;

 private:
  std::vector<LawPtr> components_;
  std::vector<std::size_t> offsets_;
};

/// Builds a univariate family by name: gaussian, vg, bgamma, nts.
LawPtr make_law(const std::string& family, bool standardized, std::vector<std::string> labels = {});

}  // namespace levyfit
