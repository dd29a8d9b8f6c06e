#pragma once

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "exact.hpp"
#include "params.hpp"
#include "specfun.hpp"

namespace prodnormal::asymptotics {

enum class TailSide { right, left };

/// Whether an asymptotic formula applies; reason is nonempty when it does not.
/// warning flags values computed outside the regime where the expansion is sharp.
struct ApproxValidity {
  bool valid = true;
  std::string reason;
  std::string warning;
};

struct Approx {
  double value = 0;
  double log_value = 0;
  ApproxValidity validity;
};

/// Tail density shape f(x) ~ exp(log_amp) t^{-1/2} e^{-a t} cosh(b sqrt t), t = |x| on one side.
struct TailShape {
  double log_amp;
  double a;
  double b;
};

/// Exp-sqrt equation amp * x^{-1/2} e^{-a x + b sqrt x} = z.
struct ExpSqrtEquation {
  double a;
  double b;
  double amp;
  double z;
};

namespace detail {

// Both tails share one formula; the left tail is the right tail of -Z, which
// swaps delta_plus/delta_minus and 1+rho/1-rho. Feeding identical operands
// makes the reflection law hold bit for bit.
struct side_terms {
  double d_same;   // delta governing the cosh argument
  double d_other;  // delta in the constant exponent
  double one_p;    // 1 + rho on the right, 1 - rho on the left
  double one_m;
};

inline side_terms terms_for(const ProductParams& p, TailSide side) {
  const double r = p.rho();
  if (side == TailSide::right) return {p.delta_plus(), p.delta_minus(), 1 + r, 1 - r};
  return {p.delta_minus(), p.delta_plus(), 1 - r, 1 + r};
}

inline ApproxValidity side_check(double x, TailSide side) {
  if (side == TailSide::right && !(x > 0)) return {false, "right-tail formula requires x > 0", ""};
  if (side == TailSide::left && !(x < 0)) return {false, "left-tail formula requires x < 0", ""};
  return {};
}

}  // namespace detail

inline TailShape tail_shape(const ProductParams& p, TailSide side) {
  const auto t = detail::terms_for(p, side);
  const double s = p.scale();
  const double two_pi = 2 * boost::math::constants::pi<double>();
  return {exact::log_constant_c(p) + t.one_p / t.one_m * t.d_other * t.d_other / 8 -
              0.5 * std::log(two_pi * s),
          1 / (s * t.one_p), std::abs(t.d_same) / (t.one_p * std::sqrt(s))};
}

/// Leading form of the density near its logarithmic singularity at 0.
inline double pdf_near_zero(const ProductParams& p, double x) {
  const double ax = std::abs(x);
  if (!(ax > 0) || !(ax < 1)) throw domain_error("pdf_near_zero: requires 0 < |x| < 1");
  const double r = p.rho();
  return -exact::constant_c(p) * std::log(ax) /
         (boost::math::constants::pi<double>() * p.scale() * std::sqrt(1 - r * r));
}

/// Tail density approximation on the given side.
inline Approx pdf_asym(const ProductParams& p, double x, TailSide side) {
  Approx out;
  out.validity = detail::side_check(x, side);
  if (!out.validity.valid) return out;
  const auto sh = tail_shape(p, side);
  const double t = std::abs(x);
  const double sq = std::sqrt(t);
  out.log_value = sh.log_amp - 0.5 * std::log(t) - sh.a * t + specfun::log_cosh(sh.b * sq);
  out.value = std::exp(out.log_value);
  return out;
}

/// Tail probability approximation: P(Z > x) on the right, P(Z <= x) on the left.
inline Approx tail_asym(const ProductParams& p, double x, TailSide side) {
  Approx out = pdf_asym(p, x, side);
  if (!out.validity.valid) return out;
  const double factor = p.scale() * detail::terms_for(p, side).one_p;
  out.value *= factor;
  out.log_value += std::log(factor);
  return out;
}

/// Closed-form asymptotic root of amp x^{-1/2} e^{-a x + b sqrt x} = z.
inline double solve_exp_sqrt(const ExpSqrtEquation& eq) {
  if (!(eq.a > 0) || !(eq.amp > 0) || !(eq.z > 0))
    throw domain_error("solve_exp_sqrt: requires a > 0, amp > 0, z > 0");
  if (!(std::log(eq.amp / eq.z) > 1)) throw domain_error("solve_exp_sqrt: z not small enough");
  const double l = std::log(1 / eq.z);
  if (!(l > 1)) throw domain_error("solve_exp_sqrt: requires ln(1/z) > 1");
  const double a = eq.a;
  return l / a + eq.b / std::pow(a, 1.5) * std::sqrt(l) - std::log(l) / (2 * a) +
         eq.b * eq.b / (4 * a * a) + std::log(eq.amp * std::sqrt(a)) / a;
}

/// Exp-sqrt equation whose solution is the upper-tail quantile expansion at level p.
inline ExpSqrtEquation quantile_equation(const ProductParams& p, double prob) {
  const auto sh = tail_shape(p, TailSide::right);
  const double r = p.rho();
  const double s = p.scale();
  // Tail probability ~ s(1+rho) * A t^{-1/2} e^{-a t} cosh(b sqrt t), and cosh ~ e^{|.|}/2 unless b = 0.
  const double eps = p.delta_plus() == 0 ? 1.0 : 2.0;
  return {sh.a, sh.b, s * (1 + r) * std::exp(sh.log_amp) / eps, 1 - prob};
}

namespace detail {

inline double g_bracket(const ProductParams& p, double l, const side_terms& t) {
  const double two_pi = 2 * boost::math::constants::pi<double>();
  const double delta = t.d_same == 0 ? 0.0 : 1.0;
  return l + std::abs(t.d_same) / std::sqrt(t.one_p) * std::sqrt(l) - 0.5 * std::log(l) -
         0.5 * std::log(two_pi / t.one_p) + t.d_same * t.d_same / (4 * t.one_p) +
         t.one_p / t.one_m * t.d_other * t.d_other / 8 + exact::log_constant_c(p) -
         delta * std::log(2.0);
}

}  // namespace detail

/// Quantile expansion: upper branch for p >= 1/2, lower branch below.
inline Approx quantile_asym(const ProductParams& p, double prob) {
  if (!(prob > 0 && prob < 1)) throw domain_error("quantile_asym: p must lie in (0, 1)");
  Approx out;
  const bool upper = prob >= 0.5;
  const double q = upper ? 1 - prob : prob;
  const double l = std::log(1 / q);
  if (!(l > 1)) {
    out.validity = {false, "asymptotic regime not reached: ln(1/q) <= 1", ""};
    return out;
  }
  const auto t = detail::terms_for(p, upper ? TailSide::right : TailSide::left);
  const double g = p.scale() * t.one_p * detail::g_bracket(p, l, t);
  out.value = upper ? g : -g;
  if (upper && !(out.value > 0)) {
    out.validity = {false, "approximated upper quantile is not positive", ""};
  } else if (!upper && !(out.value < 0)) {
    out.validity = {false, "approximated lower quantile is not negative", ""};
  } else if (l <= 3) {
    out.validity.warning = "asymptotic regime not reached: ln(1/q) <= 3";
  }
  return out;
}

inline Approx var_asym(const ProductParams& p, double prob) {
  if (!(prob > 0 && prob < 1)) throw domain_error("var_asym: p must lie in (0, 1)");
  if (prob < 0.5) {
    Approx out;
    out.validity = {false, "VaR expansion covers the upper tail only (p >= 0.5)", ""};
    return out;
  }
  return quantile_asym(p, prob);
}

inline Approx tvar_asym(const ProductParams& p, double prob) {
  Approx out = var_asym(p, prob);
  if (out.validity.valid) out.value += p.scale() * (1 + p.rho());
  return out;
}

/// Fitted log-log slope of |pdf_asym/pdf_exact - 1| against |x| over the grid.
/// Grid points are magnitudes; the side decides their sign.
inline double convergence_rate_probe(const ProductParams& p, TailSide side,
                                     const std::vector<double>& x_grid) {
  if (x_grid.size() < 4) throw domain_error("convergence_rate_probe: need at least 4 points");
  TruncationPolicy pol;
  pol.n_max = 4000;
  pol.rel_tol = 1e-15;
  std::vector<double> lx;
  std::vector<double> ly;
  for (double g : x_grid) {
    const double x = side == TailSide::right ? std::abs(g) : -std::abs(g);
    const auto ex = exact::pdf_exact(p, x, pol);
    const auto ap = pdf_asym(p, x, side);
    if (!ap.validity.valid) throw domain_error("convergence_rate_probe: " + ap.validity.reason);
    lx.push_back(std::log(std::abs(x)));
    ly.push_back(std::log(std::abs(std::expm1(ap.log_value - ex.log_value))));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0;
  double sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace prodnormal::asymptotics
