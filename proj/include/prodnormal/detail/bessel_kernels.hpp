#pragma once

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "scaled_float.hpp"

namespace prodnormal::detail {

/// (e^x K_0(x), e^x K_1(x)) for x > 0 at the precision of Real.
///
/// x <= 2: ascending series for K_0 and K_1.
/// x > 2: Steed's continued fraction (Temme's CF2 with order 0), which is
/// exact to working precision down to x = 2 unlike the large-argument series.
template <typename Real>
std::pair<Real, Real> bessel_k01_scaled(const Real& x) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::sqrt;
  const Real eps = std::numeric_limits<Real>::epsilon();

  if (x <= 2) {
    const Real gamma = boost::math::constants::euler<Real>();
    const Real y = x * x / 4;
    const Real lx = log(x / 2) + gamma;
    // K0 = -lx*I0 + sum H_k y^k/(k!)^2
    // K1 = 1/x + (x/2) sum y^k/(k!(k+1)!) [lx - (H_k + H_{k+1})/2]
    Real t0 = 1;          // y^k/(k!)^2
    Real t1 = 1;          // y^k/(k!(k+1)!)
    Real harm = 0;        // H_k
    Real i0 = 1;
    Real k0_sum = 0;
    Real k1_sum = lx - Real(1) / 2;
    for (int k = 1; k < 10000; ++k) {
      t0 *= y / (Real(k) * k);
      t1 *= y / (Real(k) * (k + 1));
      Real h_next = harm + Real(1) / k;
      i0 += t0;
      k0_sum += h_next * t0;
      k1_sum += t1 * (lx - (h_next + h_next + Real(1) / (k + 1)) / 2);
      harm = h_next;
      if (t0 < eps * i0 * Real(1e-2)) break;
    }
    Real k0 = -lx * i0 + k0_sum;
    Real k1 = 1 / x + x / 2 * k1_sum;
    Real ex = exp(x);
    return {k0 * ex, k1 * ex};
  }

  const Real pi = boost::math::constants::pi<Real>();
  Real b = 2 * (1 + x);
  Real d = 1 / b;
  Real h = d;
  Real delh = d;
  Real q1 = 0;
  Real q2 = 1;
  const Real a1 = Real(1) / 4;
  Real q = a1;
  Real c = a1;
  Real a = -a1;
  Real s = 1 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1);
    Real qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2;
    d = 1 / (b + a * d);
    delh = (b * d - 1) * delh;
    h += delh;
    Real dels = q * delh;
    s += dels;
    if (abs(dels / s) < eps / 4) break;
  }
  h = a1 * h;
  Real k0 = sqrt(pi / (2 * x)) / s;
  Real k1 = k0 * (x + Real(1) / 2 - h) / x;
  return {k0, k1};
}

/// e^x K_j(x) for j = 0..n_max via forward recurrence, kept in scaled_float
/// so tiny x and large orders cannot overflow.
template <typename Real>
class bessel_k_scaled_sequence {
 public:
  explicit bessel_k_scaled_sequence(const Real& x)
      : x_(x), two_over_x_(scaled_float<Real>(Real(2)) / scaled_float<Real>(x)) {
    auto [k0, k1] = bessel_k01_scaled(x);
    values_.emplace_back(k0);
    values_.emplace_back(k1);
  }

  const scaled_float<Real>& operator[](int j) {
    while (static_cast<int>(values_.size()) <= j) {
      const int n = static_cast<int>(values_.size()) - 1;
      // K_{n+1} = K_{n-1} + (2n/x) K_n
      values_.push_back(values_[n - 1] + two_over_x_ * values_[n] * Real(n));
    }
    return values_[j];
  }

 private:
  Real x_;
  scaled_float<Real> two_over_x_;
  std::vector<scaled_float<Real>> values_;
};

}  // namespace prodnormal::detail
