#include "levyfit/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/digamma.hpp>

#include "levyfit/csv.hpp"
#include "levyfit/error.hpp"
#include "levyfit/specfun.hpp"

namespace levyfit {

namespace {

const double kEps = std::numeric_limits<double>::epsilon();
const double kStep1 = std::cbrt(kEps);
const double kStep2 = std::pow(kEps, 0.25);
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double step1(double v) { return kStep1 * std::max(1.0, std::abs(v)); }
double step2(double v) { return kStep2 * std::max(1.0, std::abs(v)); }

void check_eta(const MObjective& m, const Vector& eta) {
  if (static_cast<std::size_t>(eta.size()) != m.num_params())
    fail(ErrorCategory::InvalidArgument, m.family() + " objective expects " + std::to_string(m.num_params()) +
                                             " parameters, got " + std::to_string(eta.size()));
}

void check_cols(const MObjective& m, const RowMatrix& eps) {
  if (static_cast<std::size_t>(eps.cols()) != m.dim())
    fail(ErrorCategory::InvalidArgument, m.family() + " objective expects " + std::to_string(m.dim()) +
                                             " residual columns, got " + std::to_string(eps.cols()));
}

double sum_values(const MObjective& m, const RowMatrix& eps, const Vector& eta, std::vector<double>& buf) {
  buf.resize(static_cast<std::size_t>(eps.rows()));
  m.values(eps, eta, buf.data());
  KahanSum s;
  for (double v : buf) s += v;
  return s.value();
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double gaussian_sigma(const Vector& eta) {
  const double s = eta[0];
  if (!(s > 0.0) || !std::isfinite(s)) fail(ErrorCategory::Domain, "gaussian sigma must be positive");
  return s;
}

double vg_eta(const Vector& eta) {
  const double e = eta[0];
  if (!(e > 0.0) || !std::isfinite(e)) fail(ErrorCategory::Domain, "vg eta must be positive");
  return e;
}

// d_eta m and d_eta d_x m of the unit VG log density
void vg_eta_terms(double x, double eta, double* score, double* cross) {
  const double p = eta - 0.5;
  const double nu = std::abs(p);
  const double k = std::sqrt(2.0 * eta);
  const double ax = std::abs(x);
  const double common = std::log(eta) + 1.0 - boost::math::digamma(eta);
  if (ax == 0.0) {
    if (p <= 0.0) fail(ErrorCategory::Domain, "vg density is unbounded at 0 for eta <= 1/2");
    if (score) *score = common - 2.0 * std::log(k) - p / eta + boost::math::digamma(p) + std::log(2.0);
    if (cross) *cross = 0.0;
    return;
  }
  const double z = k * ax;
  auto [k0, k1] = specfun::bessel_k_scaled_pair(nu, z);
  const double R = k1 / k0;
  const double dnu = specfun::bessel_k_dlog_order(nu, z);
  const double sp = sign(p);
  if (score) *score = common + std::log(ax / k) - p / (2.0 * eta) + sp * dnu + (nu / z - R) * z / (2.0 * eta);
  if (cross) {
    const double dnu1 = specfun::bessel_k_dlog_order(nu + 1.0, z);
    const double dR_dnu = R * (dnu1 - dnu);
    const double dR_dz = R * R - 1.0 - (2.0 * nu + 1.0) * R / z;
    const double dR_deta = sp * dR_dnu + dR_dz * z / (2.0 * eta);
    *cross = sign(x) * ((1.0 + sp) / ax - (R / k + k * dR_deta));
  }
}

}  // namespace

// ---------- numeric defaults ----------

Matrix MObjective::scores(const RowMatrix& eps, const Vector& eta) const {
  check_eta(*this, eta);
  const auto n = eps.rows();
  const auto p = static_cast<Eigen::Index>(num_params());
  Matrix out(n, p);
  std::vector<double> up(static_cast<std::size_t>(n)), dn(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < p; ++l) {
    const double s = step1(eta[l]);
    Vector e1 = eta, e2 = eta;
    e1[l] += s;
    e2[l] -= s;
    values(eps, e1, up.data());
    values(eps, e2, dn.data());
    const double width = e1[l] - e2[l];
    for (Eigen::Index i = 0; i < n; ++i) out(i, l) = (up[static_cast<std::size_t>(i)] - dn[static_cast<std::size_t>(i)]) / width;
  }
  return out;
}

Matrix MObjective::hessian_sum(const RowMatrix& eps, const Vector& eta) const {
  check_eta(*this, eta);
  const auto p = static_cast<Eigen::Index>(num_params());
  std::vector<double> buf;
  Matrix H(p, p);
  const double f0 = sum_values(*this, eps, eta, buf);
  for (Eigen::Index l = 0; l < p; ++l) {
    const double sl = step2(eta[l]);
    Vector a = eta, b = eta;
    a[l] += sl;
    b[l] -= sl;
    H(l, l) = (sum_values(*this, eps, a, buf) - 2.0 * f0 + sum_values(*this, eps, b, buf)) / (sl * sl);
    for (Eigen::Index k = 0; k < l; ++k) {
      const double sk = step2(eta[k]);
      Vector pp = eta, pm = eta, mp = eta, mm = eta;
      pp[l] += sl; pp[k] += sk;
      pm[l] += sl; pm[k] -= sk;
      mp[l] -= sl; mp[k] += sk;
      mm[l] -= sl; mm[k] -= sk;
      const double v = (sum_values(*this, eps, pp, buf) - sum_values(*this, eps, pm, buf) -
                        sum_values(*this, eps, mp, buf) + sum_values(*this, eps, mm, buf)) /
                       (4.0 * sl * sk);
      H(l, k) = H(k, l) = v;
    }
  }
  return H;
}

Matrix MObjective::cross(const RowMatrix& eps, const Vector& eta) const {
  check_eta(*this, eta);
  check_cols(*this, eps);
  const auto n = eps.rows();
  const auto p = static_cast<Eigen::Index>(num_params());
  const auto d = eps.cols();
  Matrix out(n, p * d);
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> pp(nn), pm(nn), mp(nn), mm(nn);
  for (Eigen::Index a = 0; a < d; ++a) {
    RowMatrix up = eps, dn = eps;
    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = step2(eps(i, a));
      up(i, a) += s;
      dn(i, a) -= s;
      w[i] = up(i, a) - dn(i, a);
    }
    for (Eigen::Index l = 0; l < p; ++l) {
      const double s = step2(eta[l]);
      Vector e1 = eta, e2 = eta;
      e1[l] += s;
      e2[l] -= s;
      values(up, e1, pp.data());
      values(up, e2, pm.data());
      values(dn, e1, mp.data());
      values(dn, e2, mm.data());
      const double we = e1[l] - e2[l];
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        out(i, l * d + a) = (pp[ii] - pm[ii] - mp[ii] + mm[ii]) / (w[i] * we);
      }
    }
  }
  return out;
}

// ---------- gaussian ----------

void GaussianObjective::values(const RowMatrix& eps, const Vector& eta, double* out) const {
  check_eta(*this, eta);
  check_cols(*this, eps);
  const double s = gaussian_sigma(eta);
  const double ls = std::log(s);
  for (Eigen::Index i = 0; i < eps.rows(); ++i) {
    const double e = eps(i, 0);
    out[i] = -kLogSqrt2Pi - ls - e * e / (2.0 * s * s);
  }
}

Matrix GaussianObjective::scores(const RowMatrix& eps, const Vector& eta) const {
  check_eta(*this, eta);
  check_cols(*this, eps);
  const double s = gaussian_sigma(eta);
  Matrix out(eps.rows(), 1);
  for (Eigen::Index i = 0; i < eps.rows(); ++i) {
    const double e = eps(i, 0);
    out(i, 0) = -1.0 / s + e * e / (s * s * s);
  }
  return out;
}

Matrix GaussianObjective::hessian_sum(const RowMatrix& eps, const Vector& eta) const {
  check_eta(*this, eta);
  check_cols(*this, eps);
  const double s = gaussian_sigma(eta);
  const double s2 = s * s;
  KahanSum acc;
  for (Eigen::Index i = 0; i < eps.rows(); ++i) {
    const double e = eps(i, 0);
    acc += 1.0 / s2 - 3.0 * e * e / (s2 * s2);
  }
  Matrix H(1, 1);
  H(0, 0) = acc.value();
  return H;
}

Matrix GaussianObjective::cross(const RowMatrix& eps, const Vector& eta) const {
  check_eta(*this, eta);
  check_cols(*this, eps);
  const double s = gaussian_sigma(eta);
  Matrix out(eps.rows(), 1);
  for (Eigen::Index i = 0; i < eps.rows(); ++i) out(i, 0) = 2.0 * eps(i, 0) / (s * s * s);
  return out;
}

// ---------- variance gamma ----------

void VgObjective::values(const RowMatrix& eps, const Vector& eta, double* out) const {
  check_eta(*this, eta);
  check_cols(*this, eps);
  const double e = vg_eta(eta);
  for (Eigen::Index i = 0; i < eps.rows(); ++i) out[i] = vg_unit_log_density(eps(i, 0), e);
}

Matrix VgObjective::scores(const RowMatrix& eps, const Vector& eta) const {
  check_eta(*this, eta);
  check_cols(*this, eps);
  const double e = vg_eta(eta);
  Matrix out(eps.rows(), 1);
  for (Eigen::Index i = 0; i < eps.rows(); ++i) vg_eta_terms(eps(i, 0), e, &out(i, 0), nullptr);
  return out;
}

Matrix VgObjective::hessian_sum(const RowMatrix& eps, const Vector& eta) const {
  check_eta(*this, eta);
  const double e = vg_eta(eta);
  const double s = step1(e);
  Vector up(1), dn(1);
  up[0] = e + s;
  dn[0] = e - s;
  Matrix H(1, 1);
  H(0, 0) = (scores(eps, up).sum() - scores(eps, dn).sum()) / (up[0] - dn[0]);
  return H;
}

Matrix VgObjective::cross(const RowMatrix& eps, const Vector& eta) const {
  check_eta(*this, eta);
  check_cols(*this, eps);
  const double e = vg_eta(eta);
  Matrix out(eps.rows(), 1);
  for (Eigen::Index i = 0; i < eps.rows(); ++i) vg_eta_terms(eps(i, 0), e, nullptr, &out(i, 0));
  return out;
}

// ---------- generic law ----------

LawObjective::LawObjective(LawPtr law) : MObjective(law ? law->param_labels() : std::vector<std::string>{}), law_(std::move(law)) {
  if (!law_) fail(ErrorCategory::InvalidArgument, "law objective needs a law");
  if (!law_->has_density()) fail(ErrorCategory::InvalidArgument, "law '" + law_->family() + "' has no density");
}

void LawObjective::values(const RowMatrix& eps, const Vector& eta, double* out) const {
  check_eta(*this, eta);
  check_cols(*this, eps);
  law_->log_density_rows(eps, 1.0, eta, out);
}

// ---------- product ----------

namespace {
std::vector<std::string> concat_labels(const std::vector<MObjectivePtr>& parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) {
    if (!p) fail(ErrorCategory::InvalidArgument, "product objective has an empty component");
    out.insert(out.end(), p->param_labels().begin(), p->param_labels().end());
  }
  return out;
}
}  // namespace

ProductObjective::ProductObjective(std::vector<MObjectivePtr> parts)
    : MObjective(concat_labels(parts)), parts_(std::move(parts)) {
  if (parts_.empty()) fail(ErrorCategory::InvalidArgument, "product objective needs components");
  std::size_t off = 0;
  for (const auto& p : parts_) {
    if (p->dim() != 1) fail(ErrorCategory::InvalidArgument, "product components must be univariate");
    offsets_.push_back(off);
    off += p->num_params();
  }
}

RowMatrix ProductObjective::column(const RowMatrix& eps, std::size_t k) const {
  return eps.col(static_cast<Eigen::Index>(k));
}

Vector ProductObjective::slice(const Vector& eta, std::size_t k) const {
  return eta.segment(static_cast<Eigen::Index>(offsets_[k]), static_cast<Eigen::Index>(parts_[k]->num_params()));
}

void ProductObjective::values(const RowMatrix& eps, const Vector& eta, double* out) const {
  check_eta(*this, eta);
  check_cols(*this, eps);
  const auto n = static_cast<std::size_t>(eps.rows());
  std::fill(out, out + n, 0.0);
  std::vector<double> buf(n);
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    parts_[k]->values(column(eps, k), slice(eta, k), buf.data());
    for (std::size_t i = 0; i < n; ++i) out[i] += buf[i];
  }
}

Matrix ProductObjective::scores(const RowMatrix& eps, const Vector& eta) const {
  check_eta(*this, eta);
  check_cols(*this, eps);
  Matrix out(eps.rows(), static_cast<Eigen::Index>(num_params()));
  for (std::size_t k = 0; k < parts_.size(); ++k)
    out.middleCols(static_cast<Eigen::Index>(offsets_[k]), static_cast<Eigen::Index>(parts_[k]->num_params())) =
        parts_[k]->scores(column(eps, k), slice(eta, k));
  return out;
}

Matrix ProductObjective::hessian_sum(const RowMatrix& eps, const Vector& eta) const {
  check_eta(*this, eta);
  check_cols(*this, eps);
  const auto p = static_cast<Eigen::Index>(num_params());
  Matrix H = Matrix::Zero(p, p);
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    const auto o = static_cast<Eigen::Index>(offsets_[k]);
    const auto q = static_cast<Eigen::Index>(parts_[k]->num_params());
    H.block(o, o, q, q) = parts_[k]->hessian_sum(column(eps, k), slice(eta, k));
  }
  return H;
}

Matrix ProductObjective::cross(const RowMatrix& eps, const Vector& eta) const {
  check_eta(*this, eta);
  check_cols(*this, eps);
  const auto d = static_cast<Eigen::Index>(parts_.size());
  Matrix out = Matrix::Zero(eps.rows(), static_cast<Eigen::Index>(num_params()) * d);
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    Matrix c = parts_[k]->cross(column(eps, k), slice(eta, k));
    for (Eigen::Index l = 0; l < c.cols(); ++l)
      out.col((static_cast<Eigen::Index>(offsets_[k]) + l) * d + static_cast<Eigen::Index>(k)) = c.col(l);
  }
  return out;
}

MObjectivePtr make_objective(const LawPtr& law) {
  if (!law) fail(ErrorCategory::InvalidArgument, "no law given");
  const std::string fam = law->family();
  if (fam == "gaussian") return std::make_shared<GaussianObjective>(law->param_labels());
  if (fam == "vg") return std::make_shared<VgObjective>(law->param_labels());
  if (fam == "product") {
    const auto& prod = static_cast<const ProductLaw&>(*law);
    std::vector<MObjectivePtr> parts;
    for (const auto& c : prod.components()) parts.push_back(make_objective(c));
    return std::make_shared<ProductObjective>(std::move(parts));
  }
  return std::make_shared<LawObjective>(law);
}

// ---------- H3 and fitting ----------

double h3(const RowMatrix& unit, const MObjective& m, const Vector& eta, double horizon, Vector* grad) {
  if (!(horizon > 0.0)) fail(ErrorCategory::InvalidArgument, "horizon must be positive");
  check_cols(m, unit);
  std::vector<double> vals(static_cast<std::size_t>(unit.rows()));
  m.values(unit, eta, vals.data());
  KahanSum s;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!std::isfinite(vals[i]))
      fail(ErrorCategory::Numeric, "non-finite contrast at residual " + std::to_string(i + 1));
    s += vals[i];
  }
  if (grad) {
    Matrix sc = m.scores(unit, eta);
    grad->resize(sc.cols());
    for (Eigen::Index l = 0; l < sc.cols(); ++l) {
      KahanSum g;
      for (Eigen::Index i = 0; i < sc.rows(); ++i) g += sc(i, l);
      (*grad)[l] = g.value() / horizon;
    }
    if (!grad->allFinite()) fail(ErrorCategory::Numeric, "non-finite contrast score");
  }
  return s.value() / horizon;
}

NoiseFit fit_noise(const RowMatrix& unit, const MObjective& m, double horizon, const NoiseFitConfig& cfg) {
  check_cols(m, unit);
  if (unit.rows() < 1) fail(ErrorCategory::Data, "no residuals to fit");
  for (Eigen::Index l = 0; l < unit.cols(); ++l)
    if ((unit.col(l).array() == unit(0, l)).all())
      fail(ErrorCategory::Data, "residual column " + std::to_string(l + 1) + " is constant");
  const auto p = static_cast<Eigen::Index>(m.num_params());
  if (cfg.lower.size() != p || cfg.upper.size() != p)
    fail(ErrorCategory::InvalidArgument, "noise box has the wrong length");
  OptimizeConfig oc;
  oc.start = cfg.start;
  oc.multistart_count = cfg.multistart_count;
  oc.gradient_tol = cfg.gradient_tol;
  oc.max_iters = cfg.max_iters;
  oc.seed = cfg.seed;
  auto f = [&](const Vector& eta, Vector* grad) { return h3(unit, m, eta, horizon, grad); };
  NoiseFit fit;
  fit.diagnostics = optimize_box(f, cfg.lower, cfg.upper, oc);
  fit.eta_hat = fit.diagnostics.argmax;
  fit.h3_value = fit.diagnostics.value;
  fit.horizon = horizon;
  std::vector<double> vals(static_cast<std::size_t>(unit.rows()));
  m.values(unit, fit.eta_hat, vals.data());
  KahanSum s;
  for (double v : vals) s += v;
  fit.log_lik = s.value();
  fit.neg2_m_sum = -2.0 * fit.log_lik;
  return fit;
}

std::pair<Vector, Vector> default_family_box(const std::string& family) {
  auto vec = [](std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
  };
  if (family == "gaussian") return {vec({0.05}), vec({20.0})};
  if (family == "vg") return {vec({0.1}), vec({5.0})};
  if (family == "bgamma") return {vec({0.2, 0.2}), vec({20.0, 20.0})};
  if (family == "nts") return {vec({0.3, 0.2, -1.0}), vec({0.95, 20.0, 1.0})};
  fail(ErrorCategory::InvalidArgument, "unknown noise family '" + family + "'");
}

FamilyCandidate make_candidate(const std::string& family) {
  FamilyCandidate c;
  c.family = family;
  auto [lo, hi] = default_family_box(family);
  c.lower = lo;
  c.upper = hi;
  if (family == "gaussian") c.objective = std::make_shared<GaussianObjective>();
  else if (family == "vg") c.objective = std::make_shared<VgObjective>();
  else c.objective = std::make_shared<LawObjective>(make_law(family, true));
  return c;
}

std::vector<SelectionRow> aic_select(const RowMatrix& unit, const std::vector<FamilyCandidate>& candidates,
                                     double horizon, const NoiseFitConfig& base) {
  if (candidates.empty()) fail(ErrorCategory::InvalidArgument, "no candidate families");
  std::vector<SelectionRow> ok, failed;
  for (const auto& c : candidates) {
    SelectionRow row;
    row.family = c.family;
    row.k = c.objective ? c.objective->num_params() : 0;
    try {
      if (!c.objective) fail(ErrorCategory::InvalidArgument, "candidate has no objective");
      NoiseFitConfig cfg = base;
      cfg.lower = c.lower;
      cfg.upper = c.upper;
      cfg.start.reset();
      NoiseFit fit = fit_noise(unit, *c.objective, horizon, cfg);
      row.eta_hat = fit.eta_hat;
      row.log_lik = fit.log_lik;
      row.aic = 2.0 * static_cast<double>(row.k) - 2.0 * fit.log_lik;
      row.status = "ok";
      ok.push_back(row);
    } catch (const Error& e) {
      row.status = std::string("error:") + e.what();
      failed.push_back(row);
    }
  }
  std::stable_sort(ok.begin(), ok.end(), [](const SelectionRow& a, const SelectionRow& b) {
    if (a.aic != b.aic) return a.aic < b.aic;
    if (a.k != b.k) return a.k < b.k;
    return a.family < b.family;
  });
  for (std::size_t i = 0; i < ok.size(); ++i) ok[i].rank = i + 1;
  ok.insert(ok.end(), failed.begin(), failed.end());
  return ok;
}

std::string selection_csv(const std::vector<SelectionRow>& rows) {
  std::size_t kmax = 0;
  for (const auto& r : rows) kmax = std::max(kmax, r.k);
  std::string out = "family,k";
  for (std::size_t l = 0; l < kmax; ++l) out += ",eta_hat_" + std::to_string(l + 1);
  out += ",logL,AIC,rank,status\n";
  for (const auto& r : rows) {
    const bool good = r.status == "ok";
    out += r.family + "," + std::to_string(r.k);
    for (std::size_t l = 0; l < kmax; ++l) {
      out += ",";
      if (good && l < static_cast<std::size_t>(r.eta_hat.size())) out += format_double(r.eta_hat[static_cast<Eigen::Index>(l)]);
    }
    out += ",";
    if (good) out += format_double(r.log_lik);
    out += ",";
    if (good) out += format_double(r.aic);
    out += ",";
    if (good) out += std::to_string(r.rank);
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out += "," + status + "\n";
  }
  return out;
}

// ---------- kernel density ----------

namespace {
double quantile7(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}
}  // namespace

KernelDensity kernel_density(const std::vector<double>& x, std::optional<double> bandwidth) {
  if (x.size() < 2) fail(ErrorCategory::Data, "kernel density needs at least 2 points");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i])) fail(ErrorCategory::Data, "non-finite value at position " + std::to_string(i + 1));
  const double nd = static_cast<double>(x.size());
  KahanSum s;
  for (double v : x) s += v;
  const double mean = s.value() / nd;
  KahanSum ss;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss.value() / (nd - 1.0));
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  double bw;
  if (bandwidth) {
    bw = *bandwidth;
    if (!(bw > 0.0) || !std::isfinite(bw)) fail(ErrorCategory::InvalidArgument, "bandwidth must be positive");
  } else {
    if (!(sd > 0.0)) fail(ErrorCategory::Data, "kernel density input has zero variance");
    const double iqr = quantile7(sorted, 0.75) - quantile7(sorted, 0.25);
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    bw = 0.9 * spread * std::pow(nd, -0.2);
  }
  KernelDensity kde;
  kde.bandwidth = bw;
  const std::size_t points = 512;
  const double lo = sorted.front() - 3.0 * bw;
  const double hi = sorted.back() + 3.0 * bw;
  kde.grid.resize(points);
  kde.density.resize(points);
  const double norm = 1.0 / (nd * bw * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t g = 0; g < points; ++g) {
    const double t = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(points - 1);
    KahanSum acc;
    for (double v : sorted) {
      const double u = (t - v) / bw;
      if (std::abs(u) < 40.0) acc += std::exp(-0.5 * u * u);
    }
    kde.grid[g] = t;
    kde.density[g] = norm * acc.value();
  }
  return kde;
}

std::string kernel_density_csv(const KernelDensity& kde) {
  std::string out = "x,density\n";
  for (std::size_t g = 0; g < kde.grid.size(); ++g) out += format_double(kde.grid[g]) + "," + format_double(kde.density[g]) + "\n";
  return out;
}

}  // namespace levyfit
