#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"

namespace prodnormal {

/// Parameters of the bivariate normal pair (X, Y) whose product is studied.
/// Invalid combinations are rejected at construction.
class ProductParams {
 public:
  ProductParams(double mu_x, double mu_y, double sigma_x, double sigma_y, double rho)
      : mu_x_(mu_x), mu_y_(mu_y), sigma_x_(sigma_x), sigma_y_(sigma_y), rho_(rho) {
    if (!std::isfinite(mu_x) || !std::isfinite(mu_y))
      throw domain_error("ProductParams: means must be finite");
    if (!(sigma_x > 0) || !(sigma_y > 0) || !std::isfinite(sigma_x) || !std::isfinite(sigma_y))
      throw domain_error("ProductParams: standard deviations must be positive and finite");
    if (!(rho > -1 && rho < 1)) throw domain_error("ProductParams: correlation must lie in (-1, 1)");
  }

  double mu_x() const { return mu_x_; }
  double mu_y() const { return mu_y_; }
  double sigma_x() const { return sigma_x_; }
  double sigma_y() const { return sigma_y_; }
  double rho() const { return rho_; }

  /// sigma_x * sigma_y, the natural scale of Z.
  double scale() const { return sigma_x_ * sigma_y_; }
  double std_mu_x() const { return mu_x_ / sigma_x_; }
  double std_mu_y() const { return mu_y_ / sigma_y_; }

  double delta_plus() const { return snap(std_mu_x() + std_mu_y()); }
  double delta_minus() const { return snap(std_mu_x() - std_mu_y()); }

  /// Same law in units of sigma_x * sigma_y.
  ProductParams standardized() const { return {std_mu_x(), std_mu_y(), 1.0, 1.0, rho_}; }

  /// Parameters of -Z: (mu_x, -mu_y, -rho).
  ProductParams reflected() const { return {mu_x_, -mu_y_, sigma_x_, sigma_y_, -rho_}; }

  bool zero_mean() const { return mu_x_ == 0 && mu_y_ == 0; }

  friend bool operator==(const ProductParams&, const ProductParams&) = default;

 private:
  // Differences below this are treated as an exact zero.
  double snap(double d) const {
    const double tol = 1e-12 * (std::abs(std_mu_x()) + std::abs(std_mu_y()));
    return std::abs(d) <= tol ? 0.0 : d;
  }

  double mu_x_;
  double mu_y_;
  double sigma_x_;
  double sigma_y_;
  double rho_;
};

/// Truncation and accuracy control for the series densities.
struct TruncationPolicy {
  int n_max = 50;
  double rel_tol = 1e-12;
  /// Absolute density error that is acceptable regardless of rel_tol; lets
  /// quadrature skip extended precision where the density is negligible.
  double abs_tol = 0.0;
  bool allow_log_scale = true;
};

/// Value plus the diagnostics of a series evaluation.
struct EvalResult {
  double value = 0;
  double log_value = 0;
  int n_used = 0;
  /// Magnitude of the last included block, in density units.
  double est_trunc_error = 0;
  /// Estimated rounding error of the summation, in density units.
  double est_round_error = 0;
  /// Decimal digits of the arithmetic that produced the value (16 for double).
  int working_digits = 16;
  /// True when value underflows or overflows and only log_value is meaningful.
  bool scaled = false;
};

}  // namespace prodnormal
