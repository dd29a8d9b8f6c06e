#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "detail/bessel_kernels.hpp"
#include "detail/product_series.hpp"
#include "detail/scaled_float.hpp"
#include "errors.hpp"
#include "params.hpp"

namespace prodnormal::exact {

namespace detail {

template <unsigned Digits>
using mpfr_real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<Digits>,
                                                boost::multiprecision::et_off>;

constexpr int max_digits = 480;

inline void check_policy(const TruncationPolicy& policy) {
  if (policy.n_max < 1) throw domain_error("TruncationPolicy: n_max must be >= 1");
  if (!(policy.rel_tol > 0)) throw domain_error("TruncationPolicy: rel_tol must be positive");
  if (!(policy.abs_tol >= 0)) throw domain_error("TruncationPolicy: abs_tol must be nonnegative");
}

inline prodnormal::detail::series_outcome run_series(int digits,
                                                     const prodnormal::detail::series_input& in,
                                                     int n_max, double rel_tol) {
  using prodnormal::detail::sum_product_series;
  switch (digits) {
    case 16: return sum_product_series<double>(in, n_max, rel_tol);
    case 33: return sum_product_series<boost::multiprecision::float128>(in, n_max, rel_tol);
    case 60: return sum_product_series<mpfr_real<60>>(in, n_max, rel_tol);
    case 120: return sum_product_series<mpfr_real<120>>(in, n_max, rel_tol);
    case 240: return sum_product_series<mpfr_real<240>>(in, n_max, rel_tol);
    default: return sum_product_series<mpfr_real<480>>(in, n_max, rel_tol);
  }
}

inline EvalResult finish(double log_prefactor, double log_sum, double log_last, double rel_round,
                         int n_used, int digits, const TruncationPolicy& policy) {
  EvalResult r;
  r.log_value = log_prefactor + log_sum;
  if (!std::isfinite(r.log_value)) throw nonfinite_error("pdf: series value not finite");
  r.value = std::exp(r.log_value);
  r.n_used = n_used;
  r.est_trunc_error = std::exp(log_prefactor + log_last);
  r.est_round_error = r.value * rel_round;
  r.working_digits = digits;
  r.scaled = (r.value == 0 || !std::isfinite(r.value) ||
              r.value < std::numeric_limits<double>::min());
  if (!std::isfinite(r.value) && !policy.allow_log_scale)
    throw nonfinite_error("pdf: value overflows double");
  return r;
}

}  // namespace detail

/// ln C, computed as -(mx - rho my)^2/(2(1-rho^2)) - my^2/2 to stay accurate as rho -> 1.
inline double log_constant_c(const ProductParams& p) {
  const double mx = p.std_mu_x();
  const double my = p.std_mu_y();
  const double r = p.rho();
  const double alpha = mx - r * my;
  return -alpha * alpha / (2 * (1 - r * r)) - my * my / 2;
}

inline double constant_c(const ProductParams& p) { return std::exp(log_constant_c(p)); }

/// Density of XY at x != 0 from the double Bessel series.
///
/// The series is summed in double first; if its measured cancellation says
/// double cannot deliver policy.rel_tol (or the absolute floor policy.abs_tol),
/// it is re-summed in MPFR arithmetic with enough digits.
inline EvalResult pdf_exact(const ProductParams& p, double x, const TruncationPolicy& policy = {}) {
  detail::check_policy(policy);
  if (x == 0) throw singular_error("pdf_exact: density diverges at x = 0");
  if (std::isnan(x)) throw domain_error("pdf_exact: x is NaN");
  if (std::isinf(x)) {
    EvalResult r;
    r.log_value = -std::numeric_limits<double>::infinity();
    return r;
  }
  const double s = p.scale();
  const double z = x / s;
  const double r = p.rho();
  const double om = 1 - r * r;
  const double log_pref = log_constant_c(p) - std::log(boost::math::constants::pi<double>()) -
                          std::log(s) - 0.5 * std::log(om) + (r * z - std::abs(z)) / om;

  prodnormal::detail::series_input in{std::abs(z), x > 0 ? 1 : -1, p.std_mu_x(), p.std_mu_y(), r};
  int digits = 16;
  auto out = detail::run_series(digits, in, policy.n_max, policy.rel_tol);
  const double log_abs_tol =
      policy.abs_tol > 0 ? std::log(policy.abs_tol) : -std::numeric_limits<double>::infinity();
  for (;;) {
    const double err_log = log_pref + out.log_round;
    const bool have_value = std::isfinite(out.log_sum);
    double target_log = log_abs_tol;
    if (have_value) target_log = std::max(target_log, std::log(0.5 * policy.rel_tol) + log_pref + out.log_sum);
    if (err_log <= target_log) {
      if (!have_value) {
        // Sum lost in rounding noise that is itself below the absolute floor.
        EvalResult r;
        r.log_value = -std::numeric_limits<double>::infinity();
        r.n_used = out.n_used;
        r.est_round_error = std::exp(err_log);
        r.working_digits = digits;
        r.scaled = true;
        return r;
      }
      break;
    }
    if (digits >= detail::max_digits) {
      if (!have_value) throw nonfinite_error("pdf_exact: cancellation beyond 480 digits");
      break;
    }
    const double need = std::isfinite(target_log) ? digits + (err_log - target_log) / std::log(10.0) + 4
                                                  : 2.0 * digits;
    int next = digits;
    for (int tier : {33, 60, 120, 240, detail::max_digits}) {
      if (tier > digits) {
        next = tier;
        if (tier >= need) break;
      }
    }
    digits = next;
    out = detail::run_series(digits, in, policy.n_max, policy.rel_tol);
  }
  return detail::finish(log_pref, out.log_sum, out.log_last, out.rel_round, out.n_used, digits,
                        policy);
}

/// Single-series density for rho = 0 and mu_y = 0.
inline EvalResult pdf_mu_y_zero(const ProductParams& p, double x,
                                const TruncationPolicy& policy = {}) {
  detail::check_policy(policy);
  if (p.rho() != 0 || p.mu_y() != 0)
    throw precondition_error("pdf_mu_y_zero: requires rho = 0 and mu_y = 0");
  if (x == 0) throw singular_error("pdf_mu_y_zero: density diverges at x = 0");
  using sf = prodnormal::detail::scaled_float<double>;
  const double s = p.scale();
  const double z = std::abs(x) / s;
  const double mx = p.std_mu_x();
  const double log_pref = -mx * mx / 2 - std::log(boost::math::constants::pi<double>() * s) - z;

  prodnormal::detail::bessel_k_scaled_sequence<double> ks(z);
  const sf step = sf(mx * mx) * sf(z);
  sf factor(1.0);
  sf total;
  sf last;
  int n_used = 0;
  const double log2_tol = std::log2(policy.rel_tol);
  sf prev;
  for (int n = 0; n <= policy.n_max; ++n) {
    if (n > 0) factor = factor * step * sf(1.0 / ((2.0 * n - 1) * (2.0 * n)));
    last = factor * ks[n];
    total = total + last;
    n_used = n;
    if (mx == 0) break;
    if (n >= 1 && last.log2_abs() <= total.log2_abs() + log2_tol &&
        prev.log2_abs() <= total.log2_abs() + log2_tol)
      break;
    prev = last;
  }
  const double ln2 = std::log(2.0);
  return detail::finish(log_pref, total.log2_abs() * ln2, last.log2_abs() * ln2,
                        4 * std::numeric_limits<double>::epsilon(), n_used, 16, policy);
}

/// Closed-form zero-mean density.
inline double pdf_zero_mean(const ProductParams& p, double x) {
  if (!p.zero_mean()) throw precondition_error("pdf_zero_mean: requires mu_x = mu_y = 0");
  if (x == 0) throw singular_error("pdf_zero_mean: density diverges at x = 0");
  const double s = p.scale();
  const double r = p.rho();
  const double om = 1 - r * r;
  const double z = x / s;
  const double k0s = prodnormal::detail::bessel_k01_scaled(std::abs(z) / om).first;
  return std::exp((r * z - std::abs(z)) / om) * k0s /
         (boost::math::constants::pi<double>() * s * std::sqrt(om));
}

}  // namespace prodnormal::exact
