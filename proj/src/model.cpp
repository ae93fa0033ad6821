#include "levyfit/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "levyfit/error.hpp"

namespace levyfit {

void SamplingScheme::validate() const {
  if (!std::isfinite(t0) || !std::isfinite(terminal) || !(terminal > t0))
    fail(ErrorCategory::InvalidArgument, "sampling requires terminal > t0");
  if (n < 2) fail(ErrorCategory::InvalidArgument, "sampling requires n >= 2");
}

void Dataset::validate() const {
  if (times.size() < 3) fail(ErrorCategory::Data, "dataset needs at least 3 observations");
  if (static_cast<std::size_t>(values.rows()) != times.size())
    fail(ErrorCategory::Data, "dataset times and values disagree in length");
  if (values.cols() < 1) fail(ErrorCategory::Data, "dataset has no state columns");
  if (!(delta > 0.0)) fail(ErrorCategory::Data, "dataset spacing must be positive");
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index k = 0; k < values.cols(); ++k)
      if (!std::isfinite(values(i, k)))
        fail(ErrorCategory::Data, "non-finite value at row " + std::to_string(i) + ", column " + std::to_string(k));
}

Dataset make_dataset(RowMatrix values, double delta, double t0, std::vector<std::string> names) {
  Dataset ds;
  const auto rows = static_cast<std::size_t>(values.rows());
  ds.times.resize(rows);
  for (std::size_t j = 0; j < rows; ++j) ds.times[j] = t0 + static_cast<double>(j) * delta;
  ds.values = std::move(values);
  ds.delta = delta;
  if (names.empty())
    for (Eigen::Index k = 0; k < ds.values.cols(); ++k) names.push_back("X" + std::to_string(k + 1));
  if (static_cast<Eigen::Index>(names.size()) != ds.values.cols())
    fail(ErrorCategory::InvalidArgument, "column name count does not match the data");
  ds.names = std::move(names);
  ds.validate();
  return ds;
}

namespace {

// Halton radical inverse for deterministic probe points.
double radical_inverse(std::size_t i, std::size_t base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

constexpr std::size_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double determinant(const std::vector<double>& m, std::size_t d) {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mm(
      m.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  return mm.determinant();
}

}  // namespace

SdeModel SdeModel::build(const Spec& spec) {
  SdeModel m;
  m.spec_ = spec;
  const std::size_t d = spec.state_vars.size();
  if (d == 0) fail(ErrorCategory::InvalidArgument, "model needs at least one state variable");
  if (spec.drift.size() != d)
    fail(ErrorCategory::InvalidArgument, "drift has " + std::to_string(spec.drift.size()) + " entries for " +
                                             std::to_string(d) + " states");
  if (spec.scale.size() != d)
    fail(ErrorCategory::InvalidArgument, "scale must have one row per state");
  for (const auto& row : spec.scale)
    if (row.size() != d)
      fail(ErrorCategory::InvalidArgument, "scale must be square (" + std::to_string(d) + " x " + std::to_string(d) + ")");
  if (!spec.law) fail(ErrorCategory::InvalidArgument, "model needs a noise law");
  if (spec.law->dim() != d)
    fail(ErrorCategory::InvalidArgument, "noise law dimension " + std::to_string(spec.law->dim()) +
                                             " does not match the scale columns " + std::to_string(d));
  m.d_ = d;
  m.law_ = spec.law;

  const auto& eta_labels = spec.law->param_labels();
  std::set<std::string> eta_set(eta_labels.begin(), eta_labels.end());
  std::vector<std::string> coef_names;
  std::set<std::string> seen;
  for (const auto& p : spec.params) {
    if (!seen.insert(p.name).second) fail(ErrorCategory::InvalidArgument, "parameter '" + p.name + "' declared twice");
    if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || !(p.lower < p.upper))
      fail(ErrorCategory::InvalidArgument, "parameter '" + p.name + "' needs a bounded box with lower < upper");
    if (!eta_set.count(p.name)) coef_names.push_back(p.name);
  }
  auto table = std::make_shared<SymbolTable>(spec.state_vars, coef_names);
  m.table_ = table;

  std::set<std::size_t> drift_slots, scale_slots;
  for (const auto& text : spec.drift) {
    m.drift_.push_back(parse_expr(text, table));
    auto s = m.drift_.back().free_slots();
    drift_slots.insert(s.begin(), s.end());
  }
  for (const auto& row : spec.scale)
    for (const auto& text : row) {
      m.scale_.push_back(parse_expr(text, table));
      auto s = m.scale_.back().free_slots();
      scale_slots.insert(s.begin(), s.end());
    }
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = 0; l < d; ++l)
      if (k != l && !m.scale_[k * d + l].is_zero()) m.diagonal_ = false;

  for (std::size_t i = 0; i < coef_names.size(); ++i) {
    std::size_t slot = table->param_slot(i);
    bool in_drift = drift_slots.count(slot) > 0;
    bool in_scale = scale_slots.count(slot) > 0;
    const ParamSpec* box = nullptr;
    for (const auto& p : spec.params)
      if (p.name == coef_names[i]) box = &p;
    if (in_drift && in_scale)
      fail(ErrorCategory::InvalidArgument, "parameter '" + coef_names[i] + "' appears in both drift and scale");
    if (in_scale) {
      m.gamma_names_.push_back(coef_names[i]);
      m.gamma_slots_.push_back(slot);
      m.gamma_box_.push_back(*box);
    } else if (in_drift) {
      m.alpha_names_.push_back(coef_names[i]);
      m.alpha_slots_.push_back(slot);
      m.alpha_box_.push_back(*box);
    } else {
      fail(ErrorCategory::InvalidArgument, "parameter '" + coef_names[i] + "' is not used by drift or scale");
    }
  }
  for (const auto& label : eta_labels)
    for (const auto& p : spec.params)
      if (p.name == label) m.eta_box_.push_back(p);
  if (!m.eta_box_.empty() && m.eta_box_.size() != eta_labels.size())
    fail(ErrorCategory::InvalidArgument, "noise parameter boxes must be given for all or none of the noise parameters");

  // derivative tables
  const std::size_t pa = m.alpha_names_.size(), pg = m.gamma_names_.size();
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < pa; ++i) m.drift_d_.push_back(m.drift_[k].differentiate_slot(m.alpha_slots_[i]));
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < pa; ++i)
      for (std::size_t j = 0; j < pa; ++j)
        m.drift_dd_.push_back(m.drift_d_[k * pa + i].differentiate_slot(m.alpha_slots_[j]));
  for (std::size_t kl = 0; kl < d * d; ++kl)
    for (std::size_t i = 0; i < pg; ++i) m.scale_d_.push_back(m.scale_[kl].differentiate_slot(m.gamma_slots_[i]));
  for (std::size_t kl = 0; kl < d * d; ++kl)
    for (std::size_t i = 0; i < pg; ++i)
      for (std::size_t j = 0; j < pg; ++j)
        m.scale_dd_.push_back(m.scale_d_[kl * pg + i].differentiate_slot(m.gamma_slots_[j]));

  // nondegenerate scale at probe points over the state box, gamma at box centers
  auto box = spec.state_box;
  if (box.empty()) box.assign(d, {-1.0, 1.0});
  if (box.size() != d) fail(ErrorCategory::InvalidArgument, "state_box needs one interval per state");
  for (const auto& [lo, hi] : box)
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
      fail(ErrorCategory::InvalidArgument, "state_box intervals need finite lower < upper");
  Vector g(pg), a(pa);
  for (std::size_t i = 0; i < pg; ++i) g[i] = 0.5 * (m.gamma_box_[i].lower + m.gamma_box_[i].upper);
  for (std::size_t i = 0; i < pa; ++i) a[i] = 0.5 * (m.alpha_box_[i].lower + m.alpha_box_[i].upper);
  std::vector<double> slots = m.slots(g, a);
  std::vector<double> c(d * d);
  std::size_t evaluated = 0;
  for (std::size_t probe = 1; probe <= 100; ++probe) {
    for (std::size_t k = 0; k < d; ++k) {
      double u = radical_inverse(probe, kPrimes[k % 12] + (k / 12) * 41);
      slots[table->state_slot(k)] = box[k].first + u * (box[k].second - box[k].first);
    }
    try {
      m.eval_scale(slots.data(), c.data());
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::Domain) continue;
      throw;
    }
    ++evaluated;
    double det = determinant(c, d);
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
      std::string where;
      for (std::size_t k = 0; k < d; ++k)
        where += (k ? ", " : "") + spec.state_vars[k] + "=" + std::to_string(slots[table->state_slot(k)]);
      fail(ErrorCategory::InvalidArgument, "scale is degenerate at probe point (" + where + ")");
    }
  }
  if (evaluated == 0) fail(ErrorCategory::InvalidArgument, "scale could not be evaluated anywhere in the state box");
  return m;
}

std::vector<double> SdeModel::slots(const Vector& gamma, const Vector& alpha) const {
  if (static_cast<std::size_t>(gamma.size()) != p_gamma() || static_cast<std::size_t>(alpha.size()) != p_alpha())
    fail(ErrorCategory::InvalidArgument, "parameter vector has the wrong length");
  std::vector<double> s(table_->slot_count(), 0.0);
  for (std::size_t i = 0; i < p_gamma(); ++i) s[gamma_slots_[i]] = gamma[static_cast<Eigen::Index>(i)];
  for (std::size_t i = 0; i < p_alpha(); ++i) s[alpha_slots_[i]] = alpha[static_cast<Eigen::Index>(i)];
  return s;
}

void SdeModel::eval_drift(const double* slots, double* out) const {
  for (std::size_t k = 0; k < d_; ++k) out[k] = drift_[k].evaluate_slots(slots);
}

void SdeModel::eval_scale(const double* slots, double* out) const {
  for (std::size_t kl = 0; kl < d_ * d_; ++kl) out[kl] = scale_[kl].evaluate_slots(slots);
}

std::vector<std::string> SdeModel::all_names() const {
  std::vector<std::string> out = gamma_names_;
  out.insert(out.end(), alpha_names_.begin(), alpha_names_.end());
  out.insert(out.end(), eta_names().begin(), eta_names().end());
  return out;
}

}  // namespace levyfit
