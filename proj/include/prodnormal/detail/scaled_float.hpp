#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace prodnormal::detail {

using std::frexp;
using std::ldexp;

/// Value stored as mant * 2^exp with mant in [0.5, 1) (or zero), so products
/// of factorials, Bessel values and powers never leave the representable range.
template <typename Real>
struct scaled_float {
  Real mant = Real(0);
  std::int64_t exp = 0;

  scaled_float() = default;
  explicit scaled_float(const Real& v) : mant(v), exp(0) { normalize(); }
  scaled_float(const Real& m, std::int64_t e) : mant(m), exp(e) { normalize(); }

  void normalize() {
    if (mant == 0) {
      exp = 0;
      return;
    }
    int e = 0;
    mant = frexp(mant, &e);
    exp += e;
  }

  bool is_zero() const { return mant == 0; }

  /// log2 of the magnitude; -inf for zero.
  double log2_abs() const {
    if (mant == 0) return -std::numeric_limits<double>::infinity();
    using std::abs;
    using std::log2;
    return static_cast<double>(exp) + std::log2(std::abs(static_cast<double>(mant)));
  }

  /// mant * 2^(exp - ref) as a plain Real; underflows quietly.
  Real at_scale(std::int64_t ref) const {
    if (mant == 0) return Real(0);
    std::int64_t shift = exp - ref;
    if (shift < -100000) return Real(0);
    return ldexp(mant, static_cast<int>(shift));
  }

  friend scaled_float operator*(const scaled_float& a, const scaled_float& b) {
    return scaled_float(a.mant * b.mant, a.exp + b.exp);
  }
  friend scaled_float operator*(const scaled_float& a, const Real& b) {
    return scaled_float(a.mant * b, a.exp);
  }
  friend scaled_float operator/(const scaled_float& a, const scaled_float& b) {
    return scaled_float(a.mant / b.mant, a.exp - b.exp);
  }
  friend scaled_float operator+(const scaled_float& a, const scaled_float& b) {
    if (a.mant == 0) return b;
    if (b.mant == 0) return a;
    std::int64_t ref = a.exp > b.exp ? a.exp : b.exp;
    return scaled_float(a.at_scale(ref) + b.at_scale(ref), ref);
  }
};

/// Neumaier-compensated running sum.
template <typename Real>
struct neumaier_sum {
  Real sum = Real(0);
  Real comp = Real(0);

  void add(const Real& v) {
    using std::abs;
    Real t = sum + v;
    if (abs(sum) >= abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }

  Real value() const { return sum + comp; }
};

}  // namespace prodnormal::detail
