#include "levyfit/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "levyfit/error.hpp"
#include "levyfit/quadrature.hpp"

namespace levyfit::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;

std::string fmt_args(double a, double b) { return "(" + std::to_string(a) + ", " + std::to_string(b) + ")"; }

bool is_pole(double x) { return x <= 0.0 && x == std::floor(x); }

// Taylor coefficients of 1/Gamma(z) = sum c_k z^k, k = 1..26.
constexpr double kRecipGamma[26] = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};

// For |mu| <= 1/2:
//   gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu),  gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2
//   gampl = 1/G(1+mu), gammi = 1/G(1-mu)
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
  // 1/G(1+x) = sum_{k>=1} c_k x^(k-1)
  double even = 0.0;  // sum over odd k (even powers)
  double odd = 0.0;   // sum over even k, divided by mu
  double mu2 = mu * mu;
  for (int k = 25; k >= 0; --k) {
    // index k corresponds to c_{k+1}, power x^k
    if (k % 2 == 0)
      even = even * mu2 + kRecipGamma[k];
    else
      odd = odd * mu2 + kRecipGamma[k];
  }
  // 1/G(1+mu) = even + mu*odd ; 1/G(1-mu) = even - mu*odd
  gam2 = even;
  gam1 = -odd;
  gampl = even + mu * odd;
  gammi = even - mu * odd;
}

// Returns scaled (e^x K_nu, e^x K_{nu+1}).
std::pair<double, double> temme_k(double nu, double x) {
  if (!(x > 0.0)) fail(ErrorCategory::Domain, "bessel_k requires x > 0, got " + std::to_string(x));
  if (nu < 0.0 || !std::isfinite(nu)) fail(ErrorCategory::Domain, "bessel_k requires order >= 0, got " + std::to_string(nu));
  const int nl = static_cast<int>(nu + 0.5);
  const double xmu = nu - nl;
  const double xmu2 = xmu * xmu;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  double rkmu, rk1;
  if (x < 2.0) {
    const double x2 = 0.5 * x;
    const double pimu = kPi * xmu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = xmu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(xmu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - xmu2);
      c *= d / i;
      p /= i - xmu;
      q /= i + xmu;
      double del = c * ff;
      sum += del;
      double del1 = c * (p - i * ff);
      sum1 += del1;
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIter) fail(ErrorCategory::Numeric, "bessel_k series did not converge at " + fmt_args(nu, x));
    const double scale = std::exp(x);
    rkmu = sum * scale;
    rk1 = sum1 * xi2 * scale;
  } else {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - xmu2;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int i = 2;
    for (; i <= kMaxIter; ++i) {
      a -= 2 * (i - 1);
      c = -a * c / i;
      double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < kEps) break;
    }
    if (i > kMaxIter) fail(ErrorCategory::Numeric, "bessel_k continued fraction did not converge at " + fmt_args(nu, x));
    h = a1 * h;
    rkmu = std::sqrt(kPi / (2.0 * x)) / s;
    rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
  }
  for (int i = 1; i <= nl; ++i) {
    double next = (xmu + i) * xi2 * rk1 + rkmu;
    rkmu = rk1;
    rk1 = next;
  }
  return {rkmu, rk1};
}

// Asymptotic expansion of U for large z; returns false if the terms stop shrinking too early.
bool hyperu_asymptotic(double a, double b, double z, double& scaled) {
  // U ~ z^-a * sum_k (a)_k (a-b+1)_k / k! * (-1/z)^k
  double term = 1.0, sum = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 200; ++k) {
    term *= (a + k) * (a - b + 1.0 + k) / ((k + 1.0) * -z);
    double mag = std::abs(term);
    if (mag > prev) return false;
    sum += term;
    if (mag <= 1e-17 * std::abs(sum)) {
      scaled = sum;
      return true;
    }
    prev = mag;
  }
  return false;
}

// Integral of e^-s s^(a-1) (1 + s/z)^(b-a-1) over (0, inf), a > 0, divided by Gamma(a), in logs.
double log_hyperu_integral(double a, double b, double z) {
  const double c = b - a - 1.0;
  auto tail_factor = [&](double s) { return c == 0.0 ? 1.0 : std::exp(c * std::log1p(s / z)); };
  auto g = [&](double s) { return std::exp(-s + (a - 1.0) * std::log(s)) * tail_factor(s); };
  const double tail = integrate_to_infinity(g, 1.0, 1e-13).value;
  double total;
  double log_norm;
  if (a < 1.0) {
    // s = u^(1/a) on [0, 1] removes the s^(a-1) singularity; the 1/a joins Gamma(a)
    auto f = [&](double u) {
      double s = std::pow(u, 1.0 / a);
      return std::exp(-s) * tail_factor(s);
    };
    total = integrate(f, 0.0, 1.0, 1e-13).value + a * tail;
    log_norm = -std::lgamma(a + 1.0);
  } else {
    auto f = [&](double s) {
      if (s == 0.0) return a == 1.0 ? 1.0 : 0.0;
      return std::exp(-s + (a - 1.0) * std::log(s)) * tail_factor(s);
    };
    total = integrate(f, 0.0, 1.0, 1e-13).value + tail;
    log_norm = -std::lgamma(a);
  }
  if (!(total > 0.0) || !std::isfinite(total))
    fail(ErrorCategory::Numeric, "hypergeometric U integral failed at a=" + std::to_string(a) +
                                     ", b=" + std::to_string(b) + ", z=" + std::to_string(z));
  return log_norm + std::log(total);
}

}  // namespace

double sin_pi(double x) {
  double n = std::round(x);
  double y = x - n;
  double s = std::sin(kPi * y);
  return std::fmod(std::abs(n), 2.0) == 1.0 ? -s : s;
}

double gamma(double x) {
  if (std::isnan(x)) return x;
  if (is_pole(x)) fail(ErrorCategory::Domain, "gamma has a pole at " + std::to_string(x));
  if (x >= 0.5) return std::tgamma(x);
  return kPi / (sin_pi(x) * std::tgamma(1.0 - x));
}

double log_gamma(double x) {
  if (std::isnan(x)) return x;
  if (is_pole(x)) fail(ErrorCategory::Domain, "log_gamma has a pole at " + std::to_string(x));
  if (x >= 0.5) return std::lgamma(x);
  return std::log(kPi) - std::log(std::abs(sin_pi(x))) - std::lgamma(1.0 - x);
}

std::pair<double, double> bessel_k_scaled_pair(double nu, double x) { return temme_k(nu, x); }

double bessel_k_scaled(double nu, double x) { return temme_k(nu, x).first; }

double bessel_k(double nu, double x) { return temme_k(nu, x).first * std::exp(-x); }

double log_bessel_k(double nu, double x) {
  nu = std::abs(nu);
  double direct = x >= 1e-250 ? temme_k(nu, x).first : std::numeric_limits<double>::infinity();
  if (x > 0.0 && !std::isfinite(direct)) {
    // leading small-argument term; the series loses its footing near underflow
    if (nu == 0.0) return std::log(-std::log(0.5 * x) - std::numbers::egamma);
    return std::lgamma(nu) + (nu - 1.0) * std::log(2.0) - nu * std::log(x);
  }
  return std::log(direct) - x;
}

double bessel_k_dlog_order(double nu, double x) {
  if (!(x > 0.0)) fail(ErrorCategory::Domain, "bessel_k_dlog_order requires x > 0, got " + std::to_string(x));
  if (!(nu >= 0.0)) fail(ErrorCategory::Domain, "bessel_k_dlog_order requires nu >= 0");
  if (nu == 0.0) return 0.0;
  // K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt. The integrand is even and entire in t, so the
  // trapezoid rule converges geometrically; exponents are shifted by the peak of nu t - x (cosh t - 1).
  const double peak_t = std::asinh(nu / x);
  auto cosh_m1 = [](double t) {
    const double sh = std::sinh(0.5 * t);
    return 2.0 * sh * sh;
  };
  const double f_peak = nu * peak_t - x * cosh_m1(peak_t);
  const double width = 1.0 / std::sqrt(std::hypot(x, nu));
  const double h = std::min(0.25, width / 6.0);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < 100000; ++k) {
    const double t = static_cast<double>(k) * h;
    const double base = -x * cosh_m1(t) - f_peak;
    const double ep = std::exp(base + nu * t), em = std::exp(base - nu * t);
    const double w = k == 0 ? 0.5 : 1.0;
    num += w * t * (ep - em);
    den += w * (ep + em);
    if (t > peak_t && base + nu * t < -50.0) break;
  }
  return num / den;
}

double log_hyperu(double a, double b, double z) {
  if (!(z > 0.0)) fail(ErrorCategory::Domain, "hyperu requires z > 0, got " + std::to_string(z));
  if (!(a > 0.0)) {
    double u = hyperu(a, b, z);
    if (!(u > 0.0)) fail(ErrorCategory::Domain, "log_hyperu of nonpositive value at a=" + std::to_string(a));
    return std::log(u);
  }
  double scaled;
  if (z > 25.0 && hyperu_asymptotic(a, b, z, scaled) && scaled > 0.0)
    return -a * std::log(z) + std::log(scaled);
  return -a * std::log(z) + log_hyperu_integral(a, b, z);
}

double hyperu(double a, double b, double z) {
  if (!(z > 0.0)) fail(ErrorCategory::Domain, "hyperu requires z > 0, got " + std::to_string(z));
  if (a == 0.0) return 1.0;
  if (a > 0.0) return std::exp(log_hyperu(a, b, z));
  // downward recurrence U(a-1) = (2a + z - b) U(a) - a (a - b + 1) U(a+1)
  int steps = static_cast<int>(std::ceil(-a));
  double top = a + steps;  // in [0, 1)
  double u_hi, u_mid;
  if (top == 0.0) {
    // start from U(1) and U(0) = 1
    u_hi = hyperu(1.0, b, z);
    u_mid = 1.0;
  } else {
    u_hi = hyperu(top + 1.0, b, z);
    u_mid = hyperu(top, b, z);
  }
  double cur = top;
  for (int k = 0; k < steps; ++k) {
    double next = (2.0 * cur + z - b) * u_mid - cur * (cur - b + 1.0) * u_hi;
    u_hi = u_mid;
    u_mid = next;
    cur -= 1.0;
  }
  return u_mid;
}

double whittaker_w(double lambda, double mu, double z) {
  if (!(z > 0.0)) fail(ErrorCategory::Domain, "whittaker_w requires z > 0, got " + std::to_string(z));
  double a = mu - lambda + 0.5;
  double b = 1.0 + 2.0 * mu;
  double pre = -0.5 * z + (mu + 0.5) * std::log(z);
  if (a > 0.0) return std::exp(pre + log_hyperu(a, b, z));
  return std::exp(pre) * hyperu(a, b, z);
}

double log_whittaker_w(double lambda, double mu, double z) {
  if (!(z > 0.0)) fail(ErrorCategory::Domain, "whittaker_w requires z > 0, got " + std::to_string(z));
  double a = mu - lambda + 0.5;
  double pre = -0.5 * z + (mu + 0.5) * std::log(z);
  if (a > 0.0) return pre + log_hyperu(a, 1.0 + 2.0 * mu, z);
  double u = hyperu(a, 1.0 + 2.0 * mu, z);
  if (!(u > 0.0)) fail(ErrorCategory::Domain, "log_whittaker_w of nonpositive value");
  return pre + std::log(u);
}

}  // namespace levyfit::specfun
