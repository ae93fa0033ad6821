#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "levyfit/expr.hpp"
#include "levyfit/laws.hpp"
#include "levyfit/numeric.hpp"

namespace levyfit {

struct ParamSpec {
  std::string name;
  double lower;
  double upper;
};

struct SamplingScheme {
  double t0 = 0.0;
  double terminal = 1.0;
  std::size_t n = 2;

  double step() const noexcept { return (terminal - t0) / static_cast<double>(n); }
  void validate() const;
};

/// Equispaced observations: n+1 rows of d states.
struct Dataset {
  std::vector<double> times;
  RowMatrix values;
  double delta = 0.0;
  std::vector<std::string> names;

  std::size_t steps() const noexcept { return times.empty() ? 0 : times.size() - 1; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(values.cols()); }
  /// Observation horizon n*h.
  double horizon() const noexcept { return delta * static_cast<double>(steps()); }
  void validate() const;
};

/// Builds a dataset on t0 + j*delta.
Dataset make_dataset(RowMatrix values, double delta, double t0 = 0.0, std::vector<std::string> names = {});

/// dX = a(X, alpha) dt + c(X-, gamma) dJ with a d-vector drift and a d x d scale.
class SdeModel {
 public:
  struct Spec {
    std::vector<std::string> state_vars;
    std::vector<std::string> drift;
    std::vector<std::vector<std::string>> scale;  // rows of the scale matrix
    LawPtr law;
    std::vector<ParamSpec> params;                // boxes for drift/scale (and optionally noise) parameters
    std::vector<std::pair<double, double>> state_box;  // per state; default [-1, 1]
  };

  static SdeModel build(const Spec& spec);

  std::size_t dim() const noexcept { return d_; }
  std::size_t noise_dim() const noexcept { return d_; }
  const std::shared_ptr<const SymbolTable>& table() const noexcept { return table_; }
  const LawPtr& law() const noexcept { return law_; }
  const Spec& spec() const noexcept { return spec_; }

  const std::vector<std::string>& gamma_names() const noexcept { return gamma_names_; }
  const std::vector<std::string>& alpha_names() const noexcept { return alpha_names_; }
  const std::vector<std::string>& eta_names() const noexcept { return law_->param_labels(); }
  std::size_t p_gamma() const noexcept { return gamma_names_.size(); }
  std::size_t p_alpha() const noexcept { return alpha_names_.size(); }
  std::size_t p_eta() const noexcept { return law_->num_params(); }

  const std::vector<ParamSpec>& gamma_box() const noexcept { return gamma_box_; }
  const std::vector<ParamSpec>& alpha_box() const noexcept { return alpha_box_; }
  /// Noise parameter boxes when declared.
  const std::vector<ParamSpec>& eta_box() const noexcept { return eta_box_; }

  const CoefficientExpr& drift(std::size_t k) const { return drift_[k]; }
  const CoefficientExpr& scale(std::size_t k, std::size_t l) const { return scale_[k * d_ + l]; }
  /// d a_k / d alpha_i
  const CoefficientExpr& drift_d(std::size_t k, std::size_t i) const { return drift_d_[k * p_alpha() + i]; }
  /// d2 a_k / d alpha_i d alpha_j
  const CoefficientExpr& drift_dd(std::size_t k, std::size_t i, std::size_t j) const {
    return drift_dd_[(k * p_alpha() + i) * p_alpha() + j];
  }
  /// d c_kl / d gamma_i
  const CoefficientExpr& scale_d(std::size_t k, std::size_t l, std::size_t i) const {
    return scale_d_[(k * d_ + l) * p_gamma() + i];
  }
  const CoefficientExpr& scale_dd(std::size_t k, std::size_t l, std::size_t i, std::size_t j) const {
    return scale_dd_[((k * d_ + l) * p_gamma() + i) * p_gamma() + j];
  }
  /// True when the scale matrix has only constant-zero off-diagonal entries.
  bool diagonal_scale() const noexcept { return diagonal_; }

  /// Slot vector template with parameters filled in; time and states set per step.
  std::vector<double> slots(const Vector& gamma, const Vector& alpha) const;
  /// Split a full (gamma, alpha) vector.
  Vector gamma_part(const Vector& theta) const { return theta.head(static_cast<Eigen::Index>(p_gamma())); }
  Vector alpha_part(const Vector& theta) const { return theta.tail(static_cast<Eigen::Index>(p_alpha())); }

  void eval_drift(const double* slots, double* out) const;
  /// Row-major d x d scale matrix.
  void eval_scale(const double* slots, double* out) const;

  /// Names in (gamma, alpha, eta) order.
  std::vector<std::string> all_names() const;

 private:
  Spec spec_;
  std::size_t d_ = 0;
  std::shared_ptr<const SymbolTable> table_;
  LawPtr law_;
  std::vector<std::string> gamma_names_, alpha_names_;
  std::vector<ParamSpec> gamma_box_, alpha_box_, eta_box_;
  std::vector<std::size_t> gamma_slots_, alpha_slots_;
  std::vector<CoefficientExpr> drift_, scale_, drift_d_, drift_dd_, scale_d_, scale_dd_;
  bool diagonal_ = true;
};

}  // namespace levyfit
