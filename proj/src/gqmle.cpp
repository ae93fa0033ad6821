#include "levyfit/gqmle.hpp"

#include <cmath>

#include "levyfit/error.hpp"

namespace levyfit {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

[[noreturn]] void degenerate(std::size_t j) {
  fail(ErrorCategory::Domain, "degenerate scale at observation index " + std::to_string(j));
}

Vector box_vector(const std::vector<ParamSpec>& box, bool upper) {
  Vector v(static_cast<Eigen::Index>(box.size()));
  for (std::size_t i = 0; i < box.size(); ++i) v[static_cast<Eigen::Index>(i)] = upper ? box[i].upper : box[i].lower;
  return v;
}

}  // namespace

Vector GqmleFit::theta() const {
  Vector t(gamma_hat.size() + alpha_hat.size());
  t << gamma_hat, alpha_hat;
  return t;
}

QuasiLikelihood::QuasiLikelihood(const Dataset& data, const SdeModel& model)
    : data_(data), model_(model), n_(data.steps()), d_(model.dim()), h_(data.delta), horizon_(data.horizon()) {
  data.validate();
  if (data.dim() != d_)
    fail(ErrorCategory::InvalidArgument, "dataset has " + std::to_string(data.dim()) + " columns, model has " +
                                             std::to_string(d_) + " states");
  dx_ = data.values.bottomRows(static_cast<Eigen::Index>(n_)) - data.values.topRows(static_cast<Eigen::Index>(n_));
}

void QuasiLikelihood::set_state(std::vector<double>& slots, std::size_t j) const {
  slots[0] = data_.times[j];
  for (std::size_t k = 0; k < d_; ++k)
    slots[model_.table()->state_slot(k)] = data_.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
}

double QuasiLikelihood::h1(const Vector& gamma, Vector* grad, Matrix* hess) const {
  const std::size_t p = model_.p_gamma();
  if (static_cast<std::size_t>(gamma.size()) != p) fail(ErrorCategory::InvalidArgument, "gamma has the wrong length");
  std::vector<double> slots = model_.slots(gamma, Vector::Zero(static_cast<Eigen::Index>(model_.p_alpha())));
  KahanSum total;
  std::vector<KahanSum> g(grad ? p : 0);
  Matrix H = Matrix::Zero(static_cast<Eigen::Index>(hess ? p : 0), static_cast<Eigen::Index>(hess ? p : 0));
  const double h = h_;

  if (d_ == 1) {
    std::vector<double> dc(p), d2c(p * p);
    for (std::size_t j = 0; j < n_; ++j) {
      set_state(slots, j);
      const double c = model_.scale(0, 0).evaluate_slots(slots.data());
      if (c == 0.0 || !std::isfinite(c)) degenerate(j);
      const double dx = dx_(static_cast<Eigen::Index>(j), 0);
      const double c2 = c * c;
      const double q = dx * dx / c2;
      total += h * std::log(c2) + q;
      if (!grad && !hess) continue;
      for (std::size_t i = 0; i < p; ++i) dc[i] = model_.scale_d(0, 0, i).evaluate_slots(slots.data());
      const double coef = (2.0 * h - 2.0 * q) / c;
      if (grad)
        for (std::size_t i = 0; i < p; ++i) g[i] += coef * dc[i];
      if (hess) {
        const double coef2 = (-2.0 * h + 6.0 * q) / c2;
        for (std::size_t i = 0; i < p; ++i)
          for (std::size_t k = 0; k <= i; ++k) {
            double d2 = model_.scale_dd(0, 0, i, k).evaluate_slots(slots.data());
            H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) += coef2 * dc[i] * dc[k] + coef * d2;
          }
      }
    }
  } else {
    const auto dd = static_cast<Eigen::Index>(d_);
    RowMat c(dd, dd), ci(dd, dd);
    std::vector<RowMat> dcs(p, RowMat(dd, dd)), M(p, RowMat(dd, dd));
    Vector z(dd);
    for (std::size_t j = 0; j < n_; ++j) {
      set_state(slots, j);
      model_.eval_scale(slots.data(), c.data());
      Eigen::PartialPivLU<Matrix> lu(c);
      const double det = lu.determinant();
      if (det == 0.0 || !std::isfinite(det)) degenerate(j);
      ci = lu.inverse();
      z = ci * dx_.row(static_cast<Eigen::Index>(j)).transpose();
      total += h * 2.0 * std::log(std::abs(det)) + z.squaredNorm();
      if (!grad && !hess) continue;
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t k = 0; k < d_; ++k)
          for (std::size_t l = 0; l < d_; ++l)
            dcs[i](static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = model_.scale_d(k, l, i).evaluate_slots(slots.data());
        M[i] = ci * dcs[i];
      }
      if (grad)
        for (std::size_t i = 0; i < p; ++i) g[i] += 2.0 * h * M[i].trace() - 2.0 * z.dot(M[i] * z);
      if (hess) {
        RowMat d2(dd, dd);
        for (std::size_t i = 0; i < p; ++i)
          for (std::size_t k = 0; k <= i; ++k) {
            for (std::size_t a = 0; a < d_; ++a)
              for (std::size_t b = 0; b < d_; ++b)
                d2(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = model_.scale_dd(a, b, i, k).evaluate_slots(slots.data());
            RowMat N = ci * d2;
            RowMat MkMi = M[k] * M[i];
            RowMat MiMk = M[i] * M[k];
            double v = 2.0 * h * (N.trace() - MkMi.trace()) -
                       2.0 * (-(M[k] * z).dot(M[i] * z) - z.dot(MkMi * z) + z.dot(N * z) - z.dot(MiMk * z));
            H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) += v;
          }
      }
    }
  }
  const double scale = -1.0 / (2.0 * horizon_);
  if (grad) {
    grad->resize(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) (*grad)[static_cast<Eigen::Index>(i)] = scale * g[i].value();
  }
  if (hess) {
    for (Eigen::Index i = 0; i < H.rows(); ++i)
      for (Eigen::Index k = 0; k < i; ++k) H(k, i) = H(i, k);
    *hess = scale * H;
  }
  return scale * total.value();
}

void QuasiLikelihood::fix_gamma(const Vector& gamma_hat) {
  if (static_cast<std::size_t>(gamma_hat.size()) != model_.p_gamma())
    fail(ErrorCategory::InvalidArgument, "gamma has the wrong length");
  gamma_hat_ = gamma_hat;
  std::vector<double> slots = model_.slots(gamma_hat, Vector::Zero(static_cast<Eigen::Index>(model_.p_alpha())));
  const auto dd = static_cast<Eigen::Index>(d_);
  cinv_.assign(n_ * d_ * d_, 0.0);
  RowMat c(dd, dd);
  for (std::size_t j = 0; j < n_; ++j) {
    set_state(slots, j);
    model_.eval_scale(slots.data(), c.data());
    Eigen::PartialPivLU<Matrix> lu(c);
    double det = lu.determinant();
    if (det == 0.0 || !std::isfinite(det)) degenerate(j);
    Matrix ci = lu.inverse();
    Matrix Ci = ci.transpose() * ci;
    for (std::size_t k = 0; k < d_; ++k)
      for (std::size_t l = 0; l < d_; ++l)
        cinv_[(j * d_ + k) * d_ + l] = Ci(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
  }
  gamma_fixed_ = true;
}

double QuasiLikelihood::h2(const Vector& alpha, Vector* grad, Matrix* hess) const {
  if (!gamma_fixed_) fail(ErrorCategory::InvalidArgument, "h2 needs fix_gamma first");
  const std::size_t p = model_.p_alpha();
  if (static_cast<std::size_t>(alpha.size()) != p) fail(ErrorCategory::InvalidArgument, "alpha has the wrong length");
  std::vector<double> slots = model_.slots(gamma_hat_, alpha);
  KahanSum total;
  std::vector<KahanSum> g(grad ? p : 0);
  Matrix H = Matrix::Zero(static_cast<Eigen::Index>(hess ? p : 0), static_cast<Eigen::Index>(hess ? p : 0));
  const double h = h_;
  std::vector<double> a(d_), r(d_), Cr(d_), da(p * d_), Cda(p * d_);
  for (std::size_t j = 0; j < n_; ++j) {
    set_state(slots, j);
    model_.eval_drift(slots.data(), a.data());
    const double* Ci = &cinv_[j * d_ * d_];
    for (std::size_t k = 0; k < d_; ++k) r[k] = dx_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) - h * a[k];
    double quad = 0.0;
    for (std::size_t k = 0; k < d_; ++k) {
      double s = 0.0;
      for (std::size_t l = 0; l < d_; ++l) s += Ci[k * d_ + l] * r[l];
      Cr[k] = s;
      quad += r[k] * s;
    }
    total += quad / h;
    if (!grad && !hess) continue;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t k = 0; k < d_; ++k) da[i * d_ + k] = model_.drift_d(k, i).evaluate_slots(slots.data());
    if (grad)
      for (std::size_t i = 0; i < p; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < d_; ++k) s += da[i * d_ + k] * Cr[k];
        g[i] += -2.0 * s;
      }
    if (hess) {
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t k = 0; k < d_; ++k) {
          double s = 0.0;
          for (std::size_t l = 0; l < d_; ++l) s += Ci[k * d_ + l] * da[i * d_ + l];
          Cda[i * d_ + k] = s;
        }
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t m = 0; m <= i; ++m) {
          double v = 0.0, w = 0.0;
          for (std::size_t k = 0; k < d_; ++k) {
            v += da[i * d_ + k] * Cda[m * d_ + k];
            double d2 = model_.drift_dd(k, i, m).evaluate_slots(slots.data());
            w += d2 * Cr[k];
          }
          H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) += 2.0 * h * v - 2.0 * w;
        }
    }
  }
  const double scale = -1.0 / (2.0 * horizon_);
  if (grad) {
    grad->resize(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) (*grad)[static_cast<Eigen::Index>(i)] = scale * g[i].value();
  }
  if (hess) {
    for (Eigen::Index i = 0; i < H.rows(); ++i)
      for (Eigen::Index k = 0; k < i; ++k) H(k, i) = H(i, k);
    *hess = scale * H;
  }
  return scale * total.value();
}

double h1(const Dataset& data, const SdeModel& model, const Vector& gamma, Vector* grad) {
  QuasiLikelihood q(data, model);
  return q.h1(gamma, grad);
}

double h2(const Dataset& data, const SdeModel& model, const Vector& gamma_hat, const Vector& alpha, Vector* grad) {
  QuasiLikelihood q(data, model);
  q.fix_gamma(gamma_hat);
  return q.h2(alpha, grad);
}

GqmleFit fit_gqmle(const Dataset& data, const SdeModel& model, const FitConfig& cfg) {
  QuasiLikelihood q(data, model);
  GqmleFit fit;
  fit.horizon = q.horizon();

  auto make_cfg = [&](const std::optional<Vector>& start, std::uint64_t salt) {
    OptimizeConfig oc;
    oc.start = start;
    oc.multistart_count = cfg.multistart_count;
    oc.gradient_tol = cfg.gradient_tol;
    oc.max_iters = cfg.max_iters;
    oc.seed = RngStream(cfg.seed).split(salt).key();
    return oc;
  };

  Vector glo = cfg.gamma_lower.value_or(box_vector(model.gamma_box(), false));
  Vector ghi = cfg.gamma_upper.value_or(box_vector(model.gamma_box(), true));
  auto f1 = [&](const Vector& g, Vector* grad) { return q.h1(g, grad); };
  try {
    fit.stage1 = optimize_box(f1, glo, ghi, make_cfg(cfg.gamma_start, 1));
  } catch (const Error& e) {
    fail(e.category(), std::string("scale stage: ") + e.what());
  }
  fit.gamma_hat = fit.stage1.argmax;
  fit.h1_value = fit.stage1.value;

  q.fix_gamma(fit.gamma_hat);
  Vector alo = cfg.alpha_lower.value_or(box_vector(model.alpha_box(), false));
  Vector ahi = cfg.alpha_upper.value_or(box_vector(model.alpha_box(), true));
  auto f2 = [&](const Vector& a, Vector* grad) { return q.h2(a, grad); };
  try {
    fit.stage2 = optimize_box(f2, alo, ahi, make_cfg(cfg.alpha_start, 2));
  } catch (const Error& e) {
    fail(e.category(), std::string("drift stage: ") + e.what());
  }
  fit.alpha_hat = fit.stage2.argmax;
  fit.h2_value = fit.stage2.value;
  fit.neg2_h1 = -2.0 * fit.horizon * fit.h1_value;
  fit.neg2_h2 = -2.0 * fit.horizon * fit.h2_value;
  return fit;
}

}  // namespace levyfit
