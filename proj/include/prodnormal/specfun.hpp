#pragma once

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "detail/bessel_kernels.hpp"
#include "detail/scaled_float.hpp"
#include "errors.hpp"

namespace prodnormal::specfun {

/// e^x K_nu(x) for integer nu; K_{-nu} = K_nu.
inline double bessel_k_scaled(int nu, double x) {
  if (!(x > 0)) throw domain_error("bessel_k_scaled: x must be positive");
  detail::bessel_k_scaled_sequence<double> seq(x);
  const auto& v = seq[std::abs(nu)];
  if (v.exp > std::numeric_limits<double>::max_exponent)
    throw nonfinite_error("bessel_k_scaled: result overflows double");
  return v.at_scale(0);
}

/// K_nu(x) for integer nu. Underflows to zero for large x; use the scaled form there.
inline double bessel_k(int nu, double x) {
  if (!(x > 0)) throw domain_error("bessel_k: x must be positive");
  detail::bessel_k_scaled_sequence<double> seq(x);
  const detail::scaled_float<double> half(std::exp(-x / 2));
  auto v = seq[std::abs(nu)] * half * half;
  if (v.exp > std::numeric_limits<double>::max_exponent)
    throw nonfinite_error("bessel_k: result overflows double");
  return v.at_scale(0);
}

/// a_k(nu) of the large-argument expansion of K_nu, built one factor at a time.
inline double ak_coefficient(int k, double nu) {
  if (k < 0) throw domain_error("ak_coefficient: k must be nonnegative");
  const double mu = 4 * nu * nu;
  double a = 1;
  for (int j = 1; j <= k; ++j) {
    const double odd = 2.0 * j - 1;
    a *= (mu - odd * odd) / (8.0 * j);
  }
  return a;
}

/// Truncated large-argument expansion sqrt(pi/2x) e^{-x} sum_{k<=k_max} a_k(nu)/x^k.
inline double bessel_k_asymptotic(double nu, double x, int k_max) {
  if (!(x > 0)) throw domain_error("bessel_k_asymptotic: x must be positive");
  const double mu = 4 * nu * nu;
  double term = 1;
  double sum = 1;
  for (int k = 1; k <= k_max; ++k) {
    const double odd = 2.0 * k - 1;
    term *= (mu - odd * odd) / (8.0 * k * x);
    sum += term;
  }
  return std::sqrt(boost::math::constants::pi<double>() / (2 * x)) * std::exp(-x) * sum;
}

/// Leading small-argument form: -ln x for nu = 0, 2^{|nu|-1} Gamma(|nu|) x^{-|nu|} otherwise.
inline double bessel_k_near_zero(int nu, double x) {
  if (!(x > 0) || !(x < 1)) throw domain_error("bessel_k_near_zero: requires 0 < x < 1");
  const int n = std::abs(nu);
  if (n == 0) return -std::log(x);
  double log_v = (n - 1) * std::log(2.0) - n * std::log(x);
  for (int j = 2; j < n; ++j) log_v += std::log(static_cast<double>(j));
  return std::exp(log_v);
}

inline double erfc(double x) { return std::erfc(x); }

/// ln cosh x without overflow.
inline double log_cosh(double x) {
  const double a = std::abs(x);
  return a - std::log(2.0) + std::log1p(std::exp(-2 * a));
}

/// ln of sum_{n>=1} n^{2k} x^n / (2n)!, accumulated relative to the running
/// largest term. Stops once three consecutive terms fall below tol * sum.
inline double log_series_n2k(int k, double x, double tol) {
  if (k < 1) throw domain_error("series_n2k: k must be >= 1");
  if (!(x >= 0)) throw domain_error("series_n2k: x must be nonnegative");
  if (x == 0) return -std::numeric_limits<double>::infinity();
  const double lx = std::log(x);
  double log_term = lx - std::log(2.0);  // n = 1
  double log_ref = log_term;
  detail::neumaier_sum<double> acc;
  acc.add(1.0);
  int small_run = 0;
  for (int n = 2; n < 10000000; ++n) {
    log_term += lx - std::log((2.0 * n - 1) * (2.0 * n)) +
                2.0 * k * std::log(static_cast<double>(n) / (n - 1));
    if (log_term > log_ref) {
      const double shrink = std::exp(log_ref - log_term);
      detail::neumaier_sum<double> rescaled;
      rescaled.add(acc.value() * shrink);
      acc = rescaled;
      log_ref = log_term;
    }
    const double rel = std::exp(log_term - log_ref);
    acc.add(rel);
    if (rel < tol * acc.value()) {
      if (++small_run == 3) break;
    } else {
      small_run = 0;
    }
  }
  return log_ref + std::log(acc.value());
}

/// sum_{n>=0} n^{2k} x^n / (2n)!
inline double series_n2k(int k, double x, double tol) {
  if (x == 0) {
    if (k < 1) throw domain_error("series_n2k: k must be >= 1");
    return 0.0;
  }
  return std::exp(log_series_n2k(k, x, tol));
}

/// First n_terms of the generalized hypergeometric series with the given parameters.
inline double hypergeometric_pfq_partial(std::span<const double> upper,
                                         std::span<const double> lower, double x,
                                         int n_terms) {
  detail::neumaier_sum<double> acc;
  double term = 1;
  for (int j = 0; j < n_terms; ++j) {
    acc.add(term);
    double ratio = x / (j + 1.0);
    for (double a : upper) ratio *= a + j;
    for (double b : lower) ratio /= b + j;
    term *= ratio;
  }
  return acc.value();
}

/// Partial sum of 2k-1 F 2k (2,...,2; 1,...,1,3/2; x).
inline double pfq_special(int k, double x, int n_terms) {
  if (k < 1) throw domain_error("pfq_special: k must be >= 1");
  std::vector<double> upper(2 * k - 1, 2.0);
  std::vector<double> lower(2 * k - 1, 1.0);
  lower.push_back(1.5);
  return hypergeometric_pfq_partial(upper, lower, x, n_terms);
}

}  // namespace prodnormal::specfun
