#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "levyfit/error.hpp"
#include "levyfit/quadrature.hpp"
#include "levyfit/rng.hpp"
#include "levyfit/specfun.hpp"

using namespace levyfit;
namespace sf = levyfit::specfun;
constexpr double kPi = std::numbers::pi;

namespace {
bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(b), 1e-300); }

// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt
double bessel_k_oracle(double nu, double x) {
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate([&](double t) {
    const double c = -x * std::cosh(t);
    return 0.5 * (std::exp(c + nu * t) + std::exp(c - nu * t));
  });
}

// U(a,b,z) = 1/Gamma(a) int_0^inf e^{-z t} t^{a-1} (1+t)^{b-a-1} dt, a > 0
double hyperu_oracle(double a, double b, double z) {
  boost::math::quadrature::exp_sinh<double> q;
  double v = q.integrate([&](double t) {
    if (t == 0.0) return 0.0;
    return std::exp(-z * t + (a - 1.0) * std::log(t) + (b - a - 1.0) * std::log1p(t));
  });
  return v / std::tgamma(a);
}
}  // namespace

TEST_CASE("gamma examples") {
  CHECK(rel_close(sf::gamma(5.0), 24.0, 1e-14));
  CHECK(rel_close(sf::gamma(0.5), std::sqrt(kPi), 1e-14));
  CHECK(rel_close(sf::gamma(-0.5), -2.0 * std::sqrt(kPi), 1e-14));
  CHECK(rel_close(sf::gamma(-1.5), 4.0 / 3.0 * std::sqrt(kPi), 1e-14));
  CHECK_THROWS_AS(sf::gamma(-2.0), Error);
  CHECK_THROWS_AS(sf::log_gamma(0.0), Error);
}

TEST_CASE("gamma recurrence and reflection") {
  RngStream r(3);
  for (int i = 0; i < 200; ++i) {
    double x = r.uniform(-6.0, 8.0);
    if (std::abs(x - std::round(x)) < 1e-3) continue;
    CHECK(rel_close(sf::gamma(x + 1.0), x * sf::gamma(x), 1e-12));
    CHECK(rel_close(sf::log_gamma(x), std::log(std::abs(sf::gamma(x))), 1e-11));
    CHECK(rel_close(sf::gamma(x) * sf::gamma(1.0 - x), kPi / std::sin(kPi * x), 1e-11));
  }
}

TEST_CASE("sin_pi exact at integers and halves") {
  CHECK(sf::sin_pi(3.0) == 0.0);
  CHECK(sf::sin_pi(-7.0) == 0.0);
  CHECK(sf::sin_pi(2.5) == 1.0);
  CHECK(sf::sin_pi(-0.5) == -1.0);
}

TEST_CASE("bessel K closed forms") {
  CHECK(rel_close(sf::bessel_k(0.5, 1.0), std::sqrt(kPi / 2.0) * std::exp(-1.0), 1e-13));
  CHECK(rel_close(sf::bessel_k(0.5, 2.0), std::sqrt(kPi / 4.0) * std::exp(-2.0), 1e-13));
  // K_{3/2}(x) = sqrt(pi/2x) e^{-x} (1 + 1/x)
  CHECK(rel_close(sf::bessel_k(1.5, 0.7), std::sqrt(kPi / 1.4) * std::exp(-0.7) * (1.0 + 1.0 / 0.7), 1e-13));
}

TEST_CASE("bessel K small-argument boundedness") {
  const double lambda = 0.7, x = 1e-4;
  const double v = std::pow(x, lambda) * sf::bessel_k(lambda, x);
  // limit 2^{lambda-1} Gamma(lambda)
  CHECK(std::isfinite(v));
  CHECK(v < 2.0);
  CHECK(rel_close(v, std::pow(2.0, lambda - 1.0) * std::tgamma(lambda), 1e-2));
}

TEST_CASE("bessel K against std and an integral oracle") {
  RngStream r(17);
  for (int i = 0; i < 60; ++i) {
    double nu = r.uniform(0.0, 6.0), x = std::exp(r.uniform(std::log(0.01), std::log(40.0)));
    double k = sf::bessel_k(nu, x);
    INFO("nu=" << nu << " x=" << x);
    CHECK(rel_close(k, std::cyl_bessel_k(nu, x), 1e-11));
    CHECK(rel_close(k, bessel_k_oracle(nu, x), 1e-9));
    CHECK(rel_close(sf::bessel_k_scaled(nu, x), std::exp(x) * k, 1e-11));
    CHECK(rel_close(sf::log_bessel_k(nu, x), std::log(k), 1e-12));
    auto [a, b] = sf::bessel_k_scaled_pair(nu, x);
    CHECK(rel_close(a, std::exp(x) * k, 1e-11));
    CHECK(rel_close(b, std::exp(x) * std::cyl_bessel_k(nu + 1.0, x), 1e-11));
  }
  CHECK(std::isfinite(sf::log_bessel_k(3.0, 1e-200)));
  CHECK(std::isfinite(sf::log_bessel_k(0.2, 800.0)));
}

TEST_CASE("order derivative of log K") {
  RngStream r(23);
  for (int i = 0; i < 30; ++i) {
    double nu = r.uniform(0.05, 5.0), x = std::exp(r.uniform(std::log(0.01), std::log(30.0)));
    const double s = 1e-5;
    double fd = (std::log(std::cyl_bessel_k(nu + s, x)) - std::log(std::cyl_bessel_k(nu - s, x))) / (2 * s);
    INFO("nu=" << nu << " x=" << x);
    CHECK(std::abs(sf::bessel_k_dlog_order(nu, x) - fd) < 1e-7 * std::max(1.0, std::abs(fd)));
  }
  CHECK(sf::bessel_k_dlog_order(0.0, 1.3) == 0.0);
  // large argument: log K_nu(x) ~ -x + log sqrt(pi/2x) + (4nu^2-1)/(8x), so the derivative ~ nu/x
  for (double x : {1e4, 1e8, 1e200}) {
    double v = sf::bessel_k_dlog_order(0.7, x);
    CHECK(v == doctest::Approx(0.7 / x).epsilon(1e-3));
  }
  CHECK(std::isfinite(sf::bessel_k_dlog_order(4.0, 1e-12)));
}

TEST_CASE("whittaker W closed forms") {
  CHECK(rel_close(sf::whittaker_w(0.0, 0.5, 1.0), std::exp(-0.5), 1e-12));
  CHECK(rel_close(sf::whittaker_w(1.0, 0.5, 2.0), 2.0 * std::exp(-1.0), 1e-12));
  CHECK(rel_close(sf::hyperu(1.0, 2.0, 3.0), 1.0 / 3.0, 1e-12));
}

TEST_CASE("hyperu and whittaker against the integral representation") {
  RngStream r(31);
  for (int i = 0; i < 20; ++i) {
    double lambda = r.uniform(-2.0, 1.5), mu = r.uniform(0.05, 2.5), z = r.uniform(0.2, 15.0);
    double a = 0.5 + mu - lambda;
    if (a <= 0.05) continue;
    double b = 1.0 + 2.0 * mu;
    double u = hyperu_oracle(a, b, z);
    double w = std::exp(-z / 2.0) * std::pow(z, mu + 0.5) * u;
    INFO("lambda=" << lambda << " mu=" << mu << " z=" << z);
    CHECK(rel_close(sf::hyperu(a, b, z), u, 1e-8));
    CHECK(rel_close(sf::whittaker_w(lambda, mu, z), w, 1e-8));
    CHECK(rel_close(sf::log_whittaker_w(lambda, mu, z), std::log(w), 1e-9));
  }
}

TEST_CASE("hyperu recurrence branch for a <= 0") {
  // U(-n, b, z) is a polynomial: U(-1, b, z) = z - b; U(-2,b,z) = z^2 - 2(b+1)z + b(b+1)
  CHECK(rel_close(sf::hyperu(-1.0, 1.7, 2.3), 2.3 - 1.7, 1e-11));
  CHECK(rel_close(sf::hyperu(-2.0, 1.7, 5.3), 5.3 * 5.3 - 2 * 2.7 * 5.3 + 1.7 * 2.7, 1e-10));
  // contiguous relation U(a-1) - (2a - b + z) U(a) + a(a - b + 1) U(a+1) = 0
  const double a = -0.4, b = 1.3, z = 2.2;
  double lhs = sf::hyperu(a - 1, b, z) - (2 * a - b + z) * sf::hyperu(a, b, z) + a * (a - b + 1) * sf::hyperu(a + 1, b, z);
  CHECK(std::abs(lhs) < 1e-9 * std::abs(sf::hyperu(a - 1, b, z)));
}

TEST_CASE("quadrature helpers") {
  auto r = integrate([](double x) { return std::sin(x); }, 0.0, kPi);
  CHECK(rel_close(r.value, 2.0, 1e-12));
  auto s = integrate_to_infinity([](double x) { return std::exp(-x * x); }, 0.0);
  CHECK(rel_close(s.value, std::sqrt(kPi) / 2.0, 1e-11));
  auto u = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
  CHECK(rel_close(u.value, 2.0, 1e-8));
}
