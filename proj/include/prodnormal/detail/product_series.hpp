#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "bessel_kernels.hpp"
#include "scaled_float.hpp"

namespace prodnormal::detail {

/// Standardized inputs of the double series (unit variances).
struct series_input {
  double abs_z;   // |x| / (sigma_x sigma_y), > 0
  int sign;       // sign of x
  double mx;      // mu_x / sigma_x
  double my;      // mu_y / sigma_y
  double rho;
};

struct series_outcome {
  double log_sum = 0;      // ln of the bracketed double sum (Bessel scaling removed)
  double log_last = 0;     // ln of the last included block
  double log_round = 0;    // ln of the estimated absolute rounding error
  double rel_round = 0;    // estimated relative rounding error of the sum
  double kappa = 1;        // sum of |terms| / |sum|
  int n_used = 0;
  bool converged = false;
};

/// Sum over n <= n_max of (w^n/(2n)!) sum_m C(2n,m) a^m b^{2n-m} e^X K_{|m-n|}(X)
/// with X = |z|/(1-rho^2), w = X/(1-rho^2), a = sign*(mx - rho my), b = my - rho mx.
///
/// Every n-block is positive in exact arithmetic, but for a*b < 0 the inner
/// terms alternate and cancel; the returned kappa/rel_round let the caller
/// decide whether Real was wide enough.
template <typename Real>
series_outcome sum_product_series(const series_input& in, int n_max, double rel_tol) {
  using sf = scaled_float<Real>;
  using std::abs;
  const Real eps = std::numeric_limits<Real>::epsilon();

  const Real rho = in.rho;
  const Real om = 1 - rho * rho;
  const Real xx = Real(in.abs_z) / om;
  const Real mx = in.mx;
  const Real my = in.my;
  const Real a = Real(in.sign) * (mx - rho * my);
  const Real b = my - rho * mx;

  bessel_k_scaled_sequence<Real> ks(xx);
  const sf w = sf(xx) / sf(om);

  std::vector<sf> blocks;
  std::vector<sf> block_abs;
  std::vector<sf> terms;
  sf factor(Real(1));   // w^n / (2n)!
  sf b2n(Real(1));      // b^{2n}
  sf a2n(Real(1));      // a^{2n}
  sf total;
  const bool a_zero = (a == 0);
  const bool b_zero = (b == 0);
  const Real ratio = (a_zero || b_zero) ? Real(0) : a / b;
  const double log2_tol = std::log2(rel_tol);

  series_outcome out;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) {
      factor = factor * w * sf(Real(1) / (Real(2 * n - 1) * Real(2 * n)));
      b2n = b2n * sf(b * b);
      a2n = a2n * sf(a * a);
    }
    sf block;
    sf babs;
    if (a_zero && b_zero) {
      if (n == 0) block = babs = ks[0];
    } else if (b_zero) {
      block = babs = a2n * ks[n];
    } else if (a_zero) {
      block = babs = b2n * ks[n];
    } else {
      terms.clear();
      sf c = b2n;
      std::int64_t top = std::numeric_limits<std::int64_t>::min();
      for (int m = 0; m <= 2 * n; ++m) {
        sf t = c * ks[std::abs(m - n)];
        if (!t.is_zero() && t.exp > top) top = t.exp;
        terms.push_back(t);
        if (m < 2 * n) c = c * (ratio * Real(2 * n - m) / Real(m + 1));
      }
      neumaier_sum<Real> s;
      neumaier_sum<Real> sa;
      for (const auto& t : terms) {
        Real v = t.at_scale(top);
        s.add(v);
        sa.add(abs(v));
      }
      block = sf(s.value(), top);
      babs = sf(sa.value(), top);
    }
    block = block * factor;
    babs = babs * factor;
    blocks.push_back(block);
    block_abs.push_back(babs);
    total = total + block;
    out.n_used = n;

    if (a_zero && b_zero) {
      out.converged = true;
      break;
    }
    if (n >= 1 && !total.is_zero()) {
      const double lt = total.log2_abs() + log2_tol;
      if (blocks[n].log2_abs() <= lt && blocks[n - 1].log2_abs() <= lt) {
        out.converged = true;
        break;
      }
    }
  }

  std::int64_t top = std::numeric_limits<std::int64_t>::min();
  for (const auto& bl : block_abs)
    if (!bl.is_zero() && bl.exp > top) top = bl.exp;
  neumaier_sum<Real> s;
  neumaier_sum<Real> weighted_abs;
  Real abs_total = 0;
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    s.add(blocks[n].at_scale(top));
    Real ba = block_abs[n].at_scale(top);
    abs_total += ba;
    weighted_abs.add(ba * Real(4 + 3 * static_cast<int>(n)));
  }
  const Real sum = s.value();
  const double ln2 = std::log(2.0);
  const Real err = eps * weighted_abs.value();
  out.log_round = err > 0 ? sf(err, top).log2_abs() * ln2 : -std::numeric_limits<double>::infinity();
  if (!(sum > 0)) {
    out.log_sum = std::numeric_limits<double>::quiet_NaN();
    out.rel_round = std::numeric_limits<double>::infinity();
    out.kappa = std::numeric_limits<double>::infinity();
  } else {
    out.log_sum = sf(sum, top).log2_abs() * ln2;
    out.kappa = static_cast<double>(abs_total / sum);
    out.rel_round = static_cast<double>(eps * weighted_abs.value() / sum);
  }
  out.log_last = blocks.back().log2_abs() * ln2;
  return out;
}

}  // namespace prodnormal::detail
