#include "levyfit/laws.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>
#include <string>

#include "levyfit/error.hpp"
#include "levyfit/specfun.hpp"

namespace levyfit {

namespace {

constexpr double kPi = std::numbers::pi;
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

std::string num(double v) { return std::to_string(v); }

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCategory::Domain, "time step must be positive, got " + num(dt));
}

void check_arity(const Vector& eta, std::size_t k, const std::string& family) {
  if (static_cast<std::size_t>(eta.size()) != k)
    fail(ErrorCategory::InvalidArgument, family + " expects " + std::to_string(k) + " parameters, got " +
                                             std::to_string(eta.size()));
}

RowMatrix column(const std::vector<double>& v) {
  RowMatrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

// exponentially tilted positive stable: Laplace exponent c ((b + s)^alpha - b^alpha)
double tilted_stable(double alpha, double c, double b, RngStream& rng) {
  const int pieces = std::max(1, static_cast<int>(std::ceil(c * std::pow(b, alpha))));
  const double cp = c / pieces;
  const double scale = std::pow(cp, 1.0 / alpha);
  constexpr int kMaxTries = 100000;
  double total = 0.0;
  for (int k = 0; k < pieces; ++k) {
    int tries = 0;
    for (;;) {
      if (++tries > kMaxTries)
        fail(ErrorCategory::Numeric, "tempered stable rejection exceeded " + std::to_string(kMaxTries) +
                                         " tries (expected acceptance rate " +
                                         num(std::exp(-cp * std::pow(b, alpha))) + ")");
      double u = kPi * rng.uniform();
      double e = rng.exponential();
      double s0 = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha) *
                  std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
      double s = scale * s0;
      if (rng.uniform() < std::exp(-b * s)) {
        total += s;
        break;
      }
    }
  }
  return total;
}

void check_nts(const NtsParams& p) {
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) fail(ErrorCategory::Domain, "nts alpha must lie in (0,1), got " + num(p.alpha));
  if (!(p.a > 0.0)) fail(ErrorCategory::Domain, "nts a must be positive, got " + num(p.a));
  if (!(p.b > 0.0)) fail(ErrorCategory::Domain, "nts b must be positive, got " + num(p.b));
  if (!std::isfinite(p.beta) || !std::isfinite(p.mu)) fail(ErrorCategory::Domain, "nts beta/mu must be finite");
}

void check_bgamma(const BilateralGammaParams& p) {
  if (!(p.gamma1 > 0.0) || !(p.gamma2 > 0.0))
    fail(ErrorCategory::Domain, "bilateral gamma rates must be positive");
  if (!(p.delta1 >= 0.0) || !(p.delta2 >= 0.0) || (p.delta1 == 0.0 && p.delta2 == 0.0) ||
      !std::isfinite(p.delta1) || !std::isfinite(p.delta2))
    fail(ErrorCategory::Domain, "bilateral gamma shapes must be nonnegative and not both zero");
}

}  // namespace

// ---------- LevyLaw defaults ----------

double LevyLaw::log_density(const double*, double, const Vector&) const {
  fail(ErrorCategory::InvalidArgument, "law '" + family() + "' has no density");
}

void LevyLaw::log_density_rows(const RowMatrix& xs, double dt, const Vector& eta, double* out) const {
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out[i] = log_density(xs.row(i).data(), dt, eta);
}

std::complex<double> LevyLaw::char_fn(double, double, const Vector&) const {
  fail(ErrorCategory::InvalidArgument, "law '" + family() + "' has no characteristic function");
}

// ---------- variance gamma ----------

std::vector<double> vg_sample(std::size_t n, double dt, double eta, RngStream& rng) {
  check_dt(dt);
  if (!(eta > 0.0)) fail(ErrorCategory::Domain, "vg eta must be positive, got " + num(eta));
  const double shape = eta * dt;
  const double sigma = std::sqrt(dt);
  std::vector<double> out(n);
  for (auto& v : out) {
    double g = rng.gamma(shape) / shape;
    v = sigma * std::sqrt(g) * rng.normal();
  }
  return out;
}

double vg_log_density(double x, double dt, double eta) {
  check_dt(dt);
  if (!(eta > 0.0)) fail(ErrorCategory::Domain, "vg eta must be positive, got " + num(eta));
  // sqrt(W) Z with W ~ Gamma(shape s, rate eta), s = eta dt
  const double s = eta * dt;
  const double p = s - 0.5;
  const double k = std::sqrt(2.0 * eta);
  const double head = std::log(2.0) + s * std::log(eta) - std::lgamma(s) - kLogSqrt2Pi;
  const double ax = std::abs(x);
  if (ax == 0.0) {
    if (p <= 0.0) fail(ErrorCategory::Domain, "vg density is unbounded at 0 for eta*dt <= 1/2");
    // (x/k)^p K_p(k x) -> k^(-2p) Gamma(p) 2^(p-1)
    return head - 2.0 * p * std::log(k) + std::lgamma(p) + (p - 1.0) * std::log(2.0);
  }
  return head + p * std::log(ax / k) + specfun::log_bessel_k(std::abs(p), k * ax);
}

double vg_unit_log_density(double x, double eta) { return vg_log_density(x, 1.0, eta); }

double vg_unit_score_x(double x, double eta) {
  if (!(eta > 0.0)) fail(ErrorCategory::Domain, "vg eta must be positive, got " + num(eta));
  if (x == 0.0) return 0.0;
  const double p = eta - 0.5;
  const double nu = std::abs(p);
  const double k = std::sqrt(2.0 * eta);
  const double ax = std::abs(x);
  auto [k0, k1] = specfun::bessel_k_scaled_pair(nu, k * ax);
  double d = (p + nu) / ax - k * k1 / k0;
  return x > 0.0 ? d : -d;
}

std::complex<double> vg_char_fn(double u, double dt, double eta) {
  return std::pow(1.0 + u * u / (2.0 * eta), -eta * dt);
}

// ---------- bilateral gamma ----------

std::vector<double> bgamma_sample(std::size_t n, double dt, const BilateralGammaParams& p, RngStream& rng) {
  check_dt(dt);
  check_bgamma(p);
  std::vector<double> out(n);
  for (auto& v : out) {
    double pos = p.delta1 > 0.0 ? rng.gamma(p.delta1 * dt) / p.gamma1 : 0.0;
    double neg = p.delta2 > 0.0 ? rng.gamma(p.delta2 * dt) / p.gamma2 : 0.0;
    v = pos - neg;
  }
  return out;
}

std::pair<double, double> bgamma_check_standardized(const BilateralGammaParams& p) {
  return {p.delta1 / p.gamma1 - p.delta2 / p.gamma2,
          p.delta1 / (p.gamma1 * p.gamma1) + p.delta2 / (p.gamma2 * p.gamma2) - 1.0};
}

BilateralGammaParams bgamma_standardized(double gamma1, double gamma2) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) fail(ErrorCategory::Domain, "bilateral gamma rates must be positive");
  double s = gamma1 + gamma2;
  return {gamma1 * gamma1 * gamma2 / s, gamma1, gamma1 * gamma2 * gamma2 / s, gamma2};
}

double bgamma_log_density(double x, double t, const BilateralGammaParams& p) {
  check_dt(t);
  check_bgamma(p);
  if (x == 0.0) fail(ErrorCategory::Domain, "bilateral gamma density is not evaluated at 0");
  if (x < 0.0) return bgamma_log_density(-x, t, {p.delta2, p.gamma2, p.delta1, p.gamma1});
  const double d1 = p.delta1 * t;
  const double d2 = p.delta2 * t;
  if (d1 == 0.0) return -std::numeric_limits<double>::infinity();
  const double g = p.gamma1 + p.gamma2;
  const double half = 0.5 * (d1 + d2);
  double out = d1 * std::log(p.gamma1) - half * std::log(g) - std::lgamma(d1) + (half - 1.0) * std::log(x) -
               0.5 * x * (p.gamma1 - p.gamma2);
  if (d2 > 0.0) {
    out += d2 * std::log(p.gamma2) + specfun::log_whittaker_w(0.5 * (d1 - d2), 0.5 * (d1 + d2 - 1.0), x * g);
  } else {
    // W_{mu+1/2, mu}(z) = z^(mu+1/2) e^(-z/2)
    double z = x * g;
    out += half * std::log(z) - 0.5 * z;
  }
  return out;
}

double bgamma_density(double x, double t, const BilateralGammaParams& p) {
  return std::exp(bgamma_log_density(x, t, p));
}

// ---------- normal tempered stable ----------

double nts_mean(const NtsParams& p) {
  return p.mu - p.a * p.alpha * specfun::gamma(-p.alpha) * std::pow(p.b, p.alpha - 1.0) * p.beta;
}

double nts_variance(const NtsParams& p) {
  return p.a * p.alpha * specfun::gamma(-p.alpha) * std::pow(p.b, p.alpha - 1.0) *
         ((p.alpha - 1.0) * p.beta * p.beta / p.b - 1.0);
}

NtsParams nts_standardized(double alpha, double b, double beta) {
  NtsParams p{alpha, 1.0, b, beta, 0.0};
  check_nts(p);
  const double base = alpha * specfun::gamma(-alpha) * std::pow(b, alpha - 1.0);
  p.a = 1.0 / (base * ((alpha - 1.0) * beta * beta / b - 1.0));
  p.mu = p.a * base * beta;
  return p;
}

std::vector<double> nts_sample(std::size_t n, double dt, const NtsParams& p, RngStream& rng) {
  check_dt(dt);
  check_nts(p);
  const double c = p.a * dt * std::abs(specfun::gamma(-p.alpha));
  std::vector<double> out(n);
  for (auto& v : out) {
    double tau = tilted_stable(p.alpha, c, p.b, rng);
    v = p.mu * dt + tau * p.beta + std::sqrt(tau) * rng.normal();
  }
  return out;
}

double nts_levy_density(double z, const NtsParams& p) {
  check_nts(p);
  if (z == 0.0) fail(ErrorCategory::Domain, "nts Levy density is not defined at 0");
  const double r2 = 2.0 * p.b + p.beta * p.beta;
  const double r = std::sqrt(r2);
  const double az = std::abs(z);
  double log_g = 0.5 * std::log(2.0 / kPi) + std::log(p.a) + p.beta * z +
                 (-0.5 * p.alpha - 0.25) * std::log(z * z / r2) + specfun::log_bessel_k(p.alpha + 0.5, az * r);
  return std::exp(log_g);
}

std::complex<double> nts_char_fn(double u, double dt, const NtsParams& p) {
  using C = std::complex<double>;
  const double g = specfun::gamma(-p.alpha);
  C inner(p.b + 0.5 * u * u, -p.beta * u);
  C expo = C(0.0, u * p.mu * dt) + p.a * g * dt * (std::pow(inner, p.alpha) - std::pow(p.b, p.alpha));
  return std::exp(expo);
}

NtsDensity::NtsDensity(const NtsParams& p, double dt) {
  check_dt(dt);
  check_nts(p);
  // period must clear both exponential tails and the bulk
  const double root = std::sqrt(p.beta * p.beta + 2.0 * p.b);
  const double rate = std::min(root - p.beta, root + p.beta);
  const double sd = std::sqrt(std::max(nts_variance(p) * dt, 1e-300));
  const double mean = nts_mean(p) * dt;
  const double period = 2.0 * (36.0 / rate + 25.0 * sd + std::abs(mean));
  du_ = 2.0 * kPi / period;
  constexpr std::size_t kMaxPoints = std::size_t{1} << 21;
  phi_.reserve(1024);
  for (std::size_t k = 0;; ++k) {
    if (k >= kMaxPoints)
      fail(ErrorCategory::Numeric, "nts characteristic function decays too slowly (alpha=" + num(p.alpha) +
                                       ", b=" + num(p.b) + ")");
    auto v = nts_char_fn(du_ * static_cast<double>(k), dt, p);
    phi_.push_back(v);
    if (k > 64 && std::abs(v) < 1e-15) break;
  }

  // same trapezoid sum on x_m = x_lo + m dx, dx du = 2 pi / M, by one FFT
  std::size_t m = 16384;
  while (m < 4 * phi_.size()) m *= 2;
  x_lo_ = mean - 0.5 * period;
  dx_ = period / static_cast<double>(m);
  std::vector<std::complex<double>> in(m, 0.0), out;
  for (std::size_t k = 0; k < phi_.size(); ++k)
    in[k] = phi_[k] * std::polar(k == 0 ? 0.5 : 1.0, -du_ * static_cast<double>(k) * x_lo_);
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  grid_.resize(m);
  for (std::size_t i = 0; i < m; ++i) grid_[i] = out[i].real() * du_ / kPi;
}

double NtsDensity::density_direct(double x) const {
  // (du/pi) [phi_0/2 + sum_k Re(e^{-i u_k x} phi_k)]
  const std::complex<double> step = std::polar(1.0, -du_ * x);
  std::complex<double> rot = 1.0;
  double sum = 0.5 * phi_[0].real();
  for (std::size_t k = 1; k < phi_.size(); ++k) {
    rot *= step;
    if ((k & 63u) == 0) rot = std::polar(1.0, -du_ * x * static_cast<double>(k));
    sum += (rot * phi_[k]).real();
  }
  return sum * du_ / kPi;
}

double NtsDensity::density(double x) const {
  const double s = (x - x_lo_) / dx_;
  const double fl = std::floor(s);
  if (!(fl >= 1.0 && fl + 2.0 < static_cast<double>(grid_.size()))) return density_direct(x);
  const auto i = static_cast<std::size_t>(fl);
  const double t = s - fl;
  // 4-point Lagrange on nodes i-1..i+2
  const double f0 = grid_[i - 1], f1 = grid_[i], f2 = grid_[i + 1], f3 = grid_[i + 2];
  return -t * (t - 1.0) * (t - 2.0) / 6.0 * f0 + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * f1 -
         (t + 1.0) * t * (t - 2.0) / 2.0 * f2 + (t + 1.0) * t * (t - 1.0) / 6.0 * f3;
}

double NtsDensity::log_density(double x) const {
  double f = density(x);
  if (!(f > 0.0))
    fail(ErrorCategory::Numeric, "nts density inversion is not positive at x=" + num(x));
  return std::log(f);
}

// ---------- empirical ----------

std::vector<double> empirical_sample(std::size_t n, const std::vector<double>& store, RngStream& rng) {
  if (store.empty()) fail(ErrorCategory::InvalidArgument, "empirical law has an empty store");
  std::vector<double> out(n);
  for (auto& v : out) v = store[rng.below(store.size())];
  return out;
}

// ---------- law objects ----------

GaussianLaw::GaussianLaw(std::vector<std::string> labels) : LevyLaw(std::move(labels)) {
  check_arity(Vector::Zero(labels_.size()), 1, "gaussian");
}

void GaussianLaw::validate(const Vector& eta) const {
  check_arity(eta, 1, "gaussian");
  if (!(eta[0] > 0.0)) fail(ErrorCategory::Domain, "gaussian sigma must be positive, got " + num(eta[0]));
}

RowMatrix GaussianLaw::sample(std::size_t count, double dt, const Vector& eta, RngStream& rng) const {
  validate(eta);
  check_dt(dt);
  RowMatrix out(count, 1);
  const double s = eta[0] * std::sqrt(dt);
  for (std::size_t i = 0; i < count; ++i) out(i, 0) = s * rng.normal();
  return out;
}

double GaussianLaw::log_density(const double* x, double dt, const Vector& eta) const {
  validate(eta);
  check_dt(dt);
  const double var = eta[0] * eta[0] * dt;
  return -kLogSqrt2Pi - 0.5 * std::log(var) - 0.5 * x[0] * x[0] / var;
}

std::complex<double> GaussianLaw::char_fn(double u, double dt, const Vector& eta) const {
  validate(eta);
  return std::exp(-0.5 * eta[0] * eta[0] * dt * u * u);
}

VarianceGammaLaw::VarianceGammaLaw(std::vector<std::string> labels) : LevyLaw(std::move(labels)) {
  check_arity(Vector::Zero(labels_.size()), 1, "vg");
}

void VarianceGammaLaw::validate(const Vector& eta) const {
  check_arity(eta, 1, "vg");
  if (!(eta[0] > 0.0) || !std::isfinite(eta[0])) fail(ErrorCategory::Domain, "vg eta must be positive, got " + num(eta[0]));
}

RowMatrix VarianceGammaLaw::sample(std::size_t count, double dt, const Vector& eta, RngStream& rng) const {
  validate(eta);
  return column(vg_sample(count, dt, eta[0], rng));
}

double VarianceGammaLaw::log_density(const double* x, double dt, const Vector& eta) const {
  validate(eta);
  return vg_log_density(x[0], dt, eta[0]);
}

std::complex<double> VarianceGammaLaw::char_fn(double u, double dt, const Vector& eta) const {
  validate(eta);
  return vg_char_fn(u, dt, eta[0]);
}

namespace {
std::vector<std::string> default_labels(std::vector<std::string> labels, std::vector<std::string> defaults) {
  return labels.empty() ? defaults : labels;
}
}  // namespace

BilateralGammaLaw::BilateralGammaLaw(bool standardized, std::vector<std::string> labels)
    : LevyLaw(default_labels(std::move(labels), standardized ? std::vector<std::string>{"gamma1", "gamma2"}
                                                             : std::vector<std::string>{"delta1", "gamma1", "delta2", "gamma2"})),
      standardized_(standardized) {
  check_arity(Vector::Zero(labels_.size()), standardized_ ? 2 : 4, "bgamma");
}

BilateralGammaParams BilateralGammaLaw::resolve(const Vector& eta) const {
  check_arity(eta, standardized_ ? 2 : 4, "bgamma");
  if (standardized_) return bgamma_standardized(eta[0], eta[1]);
  return {eta[0], eta[1], eta[2], eta[3]};
}

void BilateralGammaLaw::validate(const Vector& eta) const { check_bgamma(resolve(eta)); }

RowMatrix BilateralGammaLaw::sample(std::size_t count, double dt, const Vector& eta, RngStream& rng) const {
  return column(bgamma_sample(count, dt, resolve(eta), rng));
}

double BilateralGammaLaw::log_density(const double* x, double dt, const Vector& eta) const {
  return bgamma_log_density(x[0], dt, resolve(eta));
}

std::complex<double> BilateralGammaLaw::char_fn(double u, double dt, const Vector& eta) const {
  auto p = resolve(eta);
  using C = std::complex<double>;
  return std::pow(C(p.gamma1, 0.0) / C(p.gamma1, -u), p.delta1 * dt) *
         std::pow(C(p.gamma2, 0.0) / C(p.gamma2, u), p.delta2 * dt);
}

NormalTemperedStableLaw::NormalTemperedStableLaw(bool standardized, std::vector<std::string> labels)
    : LevyLaw(default_labels(std::move(labels), standardized ? std::vector<std::string>{"alpha", "b", "beta"}
                                                             : std::vector<std::string>{"alpha", "a", "b", "beta", "mu"})),
      standardized_(standardized) {
  check_arity(Vector::Zero(labels_.size()), standardized_ ? 3 : 5, "nts");
}

NtsParams NormalTemperedStableLaw::resolve(const Vector& eta) const {
  check_arity(eta, standardized_ ? 3 : 5, "nts");
  if (standardized_) return nts_standardized(eta[0], eta[1], eta[2]);
  return {eta[0], eta[1], eta[2], eta[3], eta[4]};
}

void NormalTemperedStableLaw::validate(const Vector& eta) const { check_nts(resolve(eta)); }

RowMatrix NormalTemperedStableLaw::sample(std::size_t count, double dt, const Vector& eta, RngStream& rng) const {
  return column(nts_sample(count, dt, resolve(eta), rng));
}

double NormalTemperedStableLaw::log_density(const double* x, double dt, const Vector& eta) const {
  NtsDensity d(resolve(eta), dt);
  return d.log_density(x[0]);
}

void NormalTemperedStableLaw::log_density_rows(const RowMatrix& xs, double dt, const Vector& eta, double* out) const {
  NtsDensity d(resolve(eta), dt);
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out[i] = d.log_density(xs(i, 0));
}

std::complex<double> NormalTemperedStableLaw::char_fn(double u, double dt, const Vector& eta) const {
  return nts_char_fn(u, dt, resolve(eta));
}

EmpiricalLaw::EmpiricalLaw(std::vector<double> store, double source_dt)
    : LevyLaw({}), store_(std::move(store)), source_dt_(source_dt) {
  if (store_.empty()) fail(ErrorCategory::InvalidArgument, "empirical law has an empty store");
  check_dt(source_dt_);
  for (double v : store_)
    if (!std::isfinite(v)) fail(ErrorCategory::Data, "empirical store contains a non-finite value");
}

void EmpiricalLaw::validate(const Vector& eta) const { check_arity(eta, 0, "empirical"); }

RowMatrix EmpiricalLaw::sample(std::size_t count, double dt, const Vector& eta, RngStream& rng) const {
  validate(eta);
  if (std::abs(dt - source_dt_) > 1e-9 * source_dt_)
    fail(ErrorCategory::InvalidArgument, "empirical increments were stored at step " + num(source_dt_) +
                                             " but step " + num(dt) + " was requested");
  return column(empirical_sample(count, store_, rng));
}

namespace {
std::vector<std::string> concat_labels(const std::vector<LawPtr>& comps) {
  std::vector<std::string> out;
  for (const auto& c : comps) {
    if (!c) fail(ErrorCategory::InvalidArgument, "product law component is null");
    out.insert(out.end(), c->param_labels().begin(), c->param_labels().end());
  }
  return out;
}
}  // namespace

ProductLaw::ProductLaw(std::vector<LawPtr> components)
    : LevyLaw(concat_labels(components)), components_(std::move(components)) {
  if (components_.empty()) fail(ErrorCategory::InvalidArgument, "product law needs at least one component");
  std::size_t off = 0;
  for (const auto& c : components_) {
    if (c->dim() != 1) fail(ErrorCategory::InvalidArgument, "product law components must be univariate");
    offsets_.push_back(off);
    off += c->num_params();
  }
}

Vector ProductLaw::component_params(std::size_t k, const Vector& eta) const {
  check_arity(eta, num_params(), "product");
  return eta.segment(static_cast<Eigen::Index>(offsets_[k]), static_cast<Eigen::Index>(components_[k]->num_params()));
}

void ProductLaw::validate(const Vector& eta) const {
  for (std::size_t k = 0; k < components_.size(); ++k) components_[k]->validate(component_params(k, eta));
}

RowMatrix ProductLaw::sample(std::size_t count, double dt, const Vector& eta, RngStream& rng) const {
  RowMatrix out(count, components_.size());
  for (std::size_t k = 0; k < components_.size(); ++k) {
    RngStream sub = rng.split(k);
    RowMatrix col = components_[k]->sample(count, dt, component_params(k, eta), sub);
    out.col(static_cast<Eigen::Index>(k)) = col.col(0);
  }
  rng = rng.split(components_.size());
  return out;
}

bool ProductLaw::has_density() const {
  for (const auto& c : components_)
    if (!c->has_density()) return false;
  return true;
}

double ProductLaw::log_density(const double* x, double dt, const Vector& eta) const {
  double s = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k)
    s += components_[k]->log_density(x + k, dt, component_params(k, eta));
  return s;
}

void ProductLaw::log_density_rows(const RowMatrix& xs, double dt, const Vector& eta, double* out) const {
  std::vector<double> buf(static_cast<std::size_t>(xs.rows()));
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out[i] = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    RowMatrix col = xs.col(static_cast<Eigen::Index>(k));
    components_[k]->log_density_rows(col, dt, component_params(k, eta), buf.data());
    for (Eigen::Index i = 0; i < xs.rows(); ++i) out[i] += buf[static_cast<std::size_t>(i)];
  }
}

LawPtr make_law(const std::string& family, bool standardized, std::vector<std::string> labels) {
  if (family == "gaussian") return std::make_shared<GaussianLaw>(labels.empty() ? std::vector<std::string>{"sigma"} : labels);
  if (family == "vg") return std::make_shared<VarianceGammaLaw>(labels.empty() ? std::vector<std::string>{"eta"} : labels);
  if (family == "bgamma") return std::make_shared<BilateralGammaLaw>(standardized, labels);
  if (family == "nts") return std::make_shared<NormalTemperedStableLaw>(standardized, labels);
  fail(ErrorCategory::InvalidArgument, "unknown law family '" + family + "'");
}

}  // namespace levyfit
