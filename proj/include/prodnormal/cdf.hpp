#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "asymptotics.hpp"
#include "detail/tail_quadrature.hpp"
#include "exact.hpp"
#include "params.hpp"

namespace prodnormal::exact {

namespace detail {

inline prodnormal::detail::tail_envelope envelope(const ProductParams& p,
                                                  asymptotics::TailSide side) {
  const auto sh = asymptotics::tail_shape(p, side);
  return {sh.log_amp, sh.a, sh.b};
}

/// Density policy for quadrature nodes: absolute accuracy tied to the density
/// scale at the start of the range, so far-tail nodes stay in double.
inline TruncationPolicy node_policy(const TruncationPolicy& base,
                                    const prodnormal::detail::tail_envelope& env, double start) {
  TruncationPolicy pol = base;
  pol.n_max = std::max(pol.n_max, 1000);
  pol.rel_tol = std::min(pol.rel_tol, 1e-13);
  const double scale = std::min(1.0, env.density(std::max(start, 1.0)));
  pol.abs_tol = std::max(pol.abs_tol, 1e-13 * scale);
  return pol;
}

constexpr double quad_tol = 1e-12;

/// int_a^inf t^moment f(side * t) dt for a >= 0.
inline double one_side(const ProductParams& p, asymptotics::TailSide side, double a, int moment,
                       const TruncationPolicy& base) {
  const auto env = envelope(p, side);
  const auto pol = node_policy(base, env, a);
  const double sgn = side == asymptotics::TailSide::right ? 1.0 : -1.0;
  auto f = [&](double t) {
    if (!(t > 0)) return 0.0;
    const double v = pdf_exact(p, sgn * t, pol).value;
    return moment == 0 ? v : t * v;
  };
  const double length = 1 / env.a;
  return prodnormal::detail::integrate_tail(f, a, env, moment, length, quad_tol);
}

}  // namespace detail

/// P(Z <= x). Direct lower-tail quadrature for x <= 0, complement of the direct upper tail above.
inline double cdf(const ProductParams& p, double x, const TruncationPolicy& policy = {}) {
  if (std::isnan(x)) throw domain_error("cdf: x is NaN");
  if (x == -std::numeric_limits<double>::infinity()) return 0;
  if (x == std::numeric_limits<double>::infinity()) return 1;
  if (x <= 0) return detail::one_side(p, asymptotics::TailSide::left, -x, 0, policy);
  return 1 - detail::one_side(p, asymptotics::TailSide::right, x, 0, policy);
}

/// P(Z > x). Direct upper-tail quadrature for x >= 0.
inline double survival(const ProductParams& p, double x, const TruncationPolicy& policy = {}) {
  if (std::isnan(x)) throw domain_error("survival: x is NaN");
  if (x == -std::numeric_limits<double>::infinity()) return 1;
  if (x == std::numeric_limits<double>::infinity()) return 0;
  if (x >= 0) return detail::one_side(p, asymptotics::TailSide::right, x, 0, policy);
  return 1 - detail::one_side(p, asymptotics::TailSide::left, -x, 0, policy);
}

/// E[Z 1{Z > x}] by quadrature.
inline double upper_partial_expectation(const ProductParams& p, double x,
                                        const TruncationPolicy& policy = {}) {
  using asymptotics::TailSide;
  const double upper = detail::one_side(p, TailSide::right, std::max(x, 0.0), 1, policy);
  if (x >= 0) return upper;
  const auto env = detail::envelope(p, TailSide::left);
  const auto pol = detail::node_policy(policy, env, 0.0);
  auto f = [&](double t) { return t > 0 ? t * pdf_exact(p, -t, pol).value : 0.0; };
  // Split at 1 so tanh-sinh only sees the singular end.
  double lower = 0;
  const double ax = -x;
  lower += prodnormal::detail::integrate_panel(f, 0.0, std::min(ax, 1.0), detail::quad_tol);
  double lo = 1;
  while (lo < ax) {
    const double hi = std::min(ax, 2 * lo);
    lower += prodnormal::detail::integrate_panel(f, lo, hi, detail::quad_tol);
    lo = hi;
  }
  return upper - lower;
}

/// Integral of the density over the real line.
inline double total_mass(const ProductParams& p, const TruncationPolicy& policy = {}) {
  using asymptotics::TailSide;
  return detail::one_side(p, TailSide::left, 0.0, 0, policy) +
         detail::one_side(p, TailSide::right, 0.0, 0, policy);
}

struct Moments {
  double mean;
  double variance;
};

inline Moments moments(const ProductParams& p) {
  const double mx = p.mu_x();
  const double my = p.mu_y();
  const double sx = p.sigma_x();
  const double sy = p.sigma_y();
  const double r = p.rho();
  return {mx * my + r * sx * sy,
          mx * mx * sy * sy + my * my * sx * sx + sx * sx * sy * sy * (1 + r * r) +
              2 * r * sx * sy * mx * my};
}

}  // namespace prodnormal::exact
