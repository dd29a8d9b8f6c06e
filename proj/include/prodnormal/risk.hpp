#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "asymptotics.hpp"
#include "cdf.hpp"
#include "errors.hpp"
#include "params.hpp"

namespace prodnormal::risk {

struct QuantileRequest {
  double p;
  double p_tol = 1e-10;
  double x_tol = 1e-9;
};

namespace detail {

inline void check(const QuantileRequest& req) {
  if (!(req.p > 0 && req.p < 1)) throw domain_error("quantile: p must lie in (0, 1)");
  if (!(req.p_tol > 0) || !(req.x_tol > 0)) throw domain_error("quantile: tolerances must be positive");
}

/// Root of P(Z > x) = q (upper = true) or P(Z <= x) = q (upper = false), with
/// the residual measured on the side where q is small.
inline double solve_tail(const ProductParams& prm, double q, bool upper, double abs_tol,
                         double x_tol, double start) {
  const double tol = std::min(abs_tol, 1e-9 * q);
  double best_x = start;
  double best_r = std::numeric_limits<double>::infinity();
  // Increasing in x in both cases.
  auto resid = [&](double x) {
    const double r = upper ? q - exact::survival(prm, x) : exact::cdf(prm, x) - q;
    if (std::abs(r) < std::abs(best_r)) {
      best_r = r;
      best_x = x;
    }
    return r;
  };

  const auto mom = exact::moments(prm);
  double step = std::max(0.25 * std::sqrt(mom.variance), 1e-3 * std::abs(start));
  double lo = start;
  double hi = start;
  double r_lo = resid(start);
  double r_hi = r_lo;
  if (r_lo == 0) return start;
  int doublings = 0;
  if (r_lo < 0) {
    while (r_hi < 0) {
      if (++doublings > 200) throw bracket_error("quantile: could not bracket from below");
      lo = hi;
      r_lo = r_hi;
      hi = hi + step;
      step *= 2;
      r_hi = resid(hi);
    }
  } else {
    while (r_lo > 0) {
      if (++doublings > 200) throw bracket_error("quantile: could not bracket from above");
      hi = lo;
      r_hi = r_lo;
      lo = lo - step;
      step *= 2;
      r_lo = resid(lo);
    }
  }
  if (std::abs(best_r) <= tol) return best_x;

  auto done = [&](double a, double b) {
    if (std::abs(best_r) <= tol) return true;
    const double width = std::abs(b - a);
    return width <= 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)) ||
           (width <= x_tol * 1e-6 * std::max(1.0, std::abs(a)));
  };
  std::uintmax_t max_iter = 300;
  boost::math::tools::toms748_solve(resid, lo, hi, r_lo, r_hi, done, max_iter);
  return best_x;
}

}  // namespace detail

/// Q(p) by bracketed root finding on the quadrature distribution function.
/// The bracket starts from the asymptotic quantile when it is valid, else from the mean.
inline double quantile_numeric(const ProductParams& prm, const QuantileRequest& req) {
  detail::check(req);
  const auto guess = asymptotics::quantile_asym(prm, req.p);
  double start;
  if (guess.validity.valid && std::isfinite(guess.value)) {
    start = guess.value;
  } else {
    const auto mom = exact::moments(prm);
    start = mom.mean + (req.p >= 0.5 ? 1 : -1) * std::sqrt(mom.variance);
  }
  if (req.p > 0.5) return detail::solve_tail(prm, 1 - req.p, true, req.p_tol, req.x_tol, start);
  return detail::solve_tail(prm, req.p, false, req.p_tol, req.x_tol, start);
}

/// Point with upper tail mass q, for q arbitrarily small.
inline double quantile_upper_tail(const ProductParams& prm, double q, double p_tol = 1e-10) {
  if (!(q > 0 && q < 1)) throw domain_error("quantile_upper_tail: q must lie in (0, 1)");
  double start = exact::moments(prm).mean;
  if (q < 1e-15) {
    // 1 - q is not representable; start from the leading exponential rate.
    start = std::log(1 / q) / asymptotics::tail_shape(prm, asymptotics::TailSide::right).a;
  } else if (q < 0.5) {
    const auto g = asymptotics::quantile_asym(prm, 1 - q);
    if (g.validity.valid) start = g.value;
  }
  return detail::solve_tail(prm, q, true, p_tol, 1e-9, start);
}

/// TVaR at level p given the quantile there: E[Z 1{Z > Q}] / (1 - p).
inline double tvar_at(const ProductParams& prm, double p, double q_p) {
  return exact::upper_partial_expectation(prm, q_p) / (1 - p);
}

/// Conditional tail expectation above Q(p).
inline double tvar_numeric(const ProductParams& prm, const QuantileRequest& req) {
  return tvar_at(prm, req.p, quantile_numeric(prm, req));
}

/// (1/(1-p)) int_p^1 Q(t) dt with t = 1 - (1-p) e^{-s}; cross-check for tvar_numeric.
inline double tvar_var_average(const ProductParams& prm, double p, double tol = 1e-10) {
  if (!(p > 0 && p < 1)) throw domain_error("tvar_var_average: p must lie in (0, 1)");
  const double q = 1 - p;
  auto f = [&](double s) { return quantile_upper_tail(prm, q * std::exp(-s), 1e-13) * std::exp(-s); };
  // e^{-s} weight: the cut at s = 45 drops about 45 e^{-45} relative.
  // Q has an infinite-slope point where it crosses 0 (the density is singular
  // there), so the range is split at that level when it lies inside.
  using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
  const double s0 = std::log(q / exact::survival(prm, 0.0));
  if (!(s0 > 0 && s0 < 45)) return gk::integrate(f, 0.0, 45.0, 10, tol);
  return gk::integrate(f, 0.0, s0, 10, tol) + gk::integrate(f, s0, 45.0, 10, tol);
}

/// TVaR - VaR along an increasing grid of levels.
inline std::vector<double> gap_diagnostic(const ProductParams& prm, const std::vector<double>& p_grid) {
  std::vector<double> out;
  out.reserve(p_grid.size());
  double prev = 0;
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (i > 0 && !(p_grid[i] > prev)) throw domain_error("gap_diagnostic: grid must be increasing");
    prev = p_grid[i];
    const double q = quantile_numeric(prm, {p_grid[i]});
    out.push_back(tvar_at(prm, p_grid[i], q) - q);
  }
  return out;
}

}  // namespace prodnormal::risk
