#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>

#include "scaled_float.hpp"

namespace prodnormal::detail {

/// Envelope A t^{-1/2} e^{-a t} cosh(b sqrt t) of a one-sided tail density.
struct tail_envelope {
  double log_amp;
  double a;
  double b;

  double density(double t) const {
    return std::exp(log_amp - 0.5 * std::log(t) - a * t) * std::cosh(b * std::sqrt(t));
  }

  /// Closed form of int_t0^inf t^moment * density(t) dt for moment 0 or 1.
  double tail_integral(double t0, int moment) const {
    // u = sqrt t turns the integral into sum over +/-b of int_u0^inf u^{2 moment} e^{-a u^2 +- b u} du.
    const double u0 = std::sqrt(t0);
    double total = 0;
    for (double beta : {b, -b}) {
      const double c = beta / (2 * a);
      const double l = u0 - c;
      const double pref = std::exp(log_amp + beta * beta / (4 * a));
      const double i0 = 0.5 * std::sqrt(M_PI / a) * std::erfc(std::sqrt(a) * l);
      if (moment == 0) {
        total += pref * i0;
      } else {
        const double g = std::exp(-a * l * l) / (2 * a);
        const double i1 = g;
        const double i2 = l * g + i0 / (2 * a);
        total += pref * (i2 + 2 * c * i1 + c * c * i0);
      }
    }
    return total;
  }
};

/// int_lo^hi f for 0 <= lo < hi, where f may carry an integrable
/// logarithmic singularity at 0.
template <typename F>
double integrate_panel(F&& f, double lo, double hi, double tol) {
  if (lo < 1) {
    static thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
    return ts.integrate(f, lo, hi, tol);
  }
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 10, tol);
}

/// int_a^inf f for a >= 0 on panels of doubling width; the remainder is closed
/// with the envelope once it falls below 1e-16 of the accumulated value.
template <typename F>
double integrate_tail(F&& f, double a, const tail_envelope& env, int moment, double length,
                      double tol) {
  neumaier_sum<double> acc;
  double lo = a;
  double width = length;
  if (lo < 1) width = std::max(1.0 - lo, length);
  // Panels far out only need accuracy relative to the whole tail, not to themselves.
  const double target = tol * env.tail_integral(a, moment);
  for (int panel = 0; panel < 400; ++panel) {
    const double hi = lo + width;
    const double est = env.tail_integral(lo, moment) - env.tail_integral(hi, moment);
    double panel_tol = tol;
    if (est > 0 && target > 0) panel_tol = std::min(1e-3, std::max(tol, target / est));
    acc.add(integrate_panel(f, lo, hi, panel_tol));
    const double rest = env.tail_integral(hi, moment);
    const double cur = std::abs(acc.value());
    if (std::isfinite(rest) && (rest <= 1e-16 * cur || (cur == 0 && rest < 1e-300))) {
      acc.add(rest);
      return acc.value();
    }
    lo = hi;
    width *= 2;
  }
  return acc.value();
}

}  // namespace prodnormal::detail
