#pragma once

#include <utility>

namespace levyfit::specfun {

/// sin(pi x) with exact argument reduction.
double sin_pi(double x);

/// Gamma function; negative non-integers via reflection. Domain error at poles.
double gamma(double x);
/// log|Gamma(x)|. Domain error at poles.
double log_gamma(double x);

/// Modified Bessel function of the second kind K_nu(x), nu >= 0, x > 0.
double bessel_k(double nu, double x);
/// exp(x) * K_nu(x).
double bessel_k_scaled(double nu, double x);
/// (exp(x) K_nu(x), exp(x) K_{nu+1}(x)).
std::pair<double, double> bessel_k_scaled_pair(double nu, double x);
/// log K_nu(x); |nu| is used.
double log_bessel_k(double nu, double x);
/// d/dnu log K_nu(x) for nu >= 0, by quadrature of the order-derivative integral.
double bessel_k_dlog_order(double nu, double x);

/// Tricomi confluent hypergeometric U(a, b, z) for z > 0.
double hyperu(double a, double b, double z);
/// log U(a, b, z) for a > 0 (U is positive there).
double log_hyperu(double a, double b, double z);

/// Whittaker W_{lambda,mu}(z), z > 0.
double whittaker_w(double lambda, double mu, double z);
/// log W_{lambda,mu}(z) where W > 0 (mu - lambda + 1/2 > 0).
double log_whittaker_w(double lambda, double mu, double z);

}  // namespace levyfit::specfun
