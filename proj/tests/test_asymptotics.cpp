#include <gtest/gtest.h>

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include <prodnormal/asymptotics.hpp>
#include <prodnormal/cdf.hpp>
#include <prodnormal/risk.hpp>

#include "table_data.hpp"

using prodnormal::ProductParams;
namespace as = prodnormal::asymptotics;
using as::TailSide;

namespace {

double rel(double a, double b) { return std::abs(a / b - 1); }

std::vector<ProductParams> zero_mean_grid() {
  std::vector<ProductParams> out;
  for (double r : {-0.5, -0.25, 0.0, 0.25, 0.5}) out.emplace_back(0, 0, 1, 1, r);
  return out;
}

}  // namespace

TEST(PdfNearZero, Examples) {
  EXPECT_LT(rel(as::pdf_near_zero({0, 0, 1, 1, 0}, std::exp(-1.0)), 1 / std::numbers::pi), 1e-15);
  EXPECT_EQ(as::pdf_near_zero({1, 2, 1, 1, 0.3}, 0.01), as::pdf_near_zero({1, 2, 1, 1, 0.3}, -0.01));
  const ProductParams p(1, 1, 1, 1, 0.5);
  EXPECT_LT(rel(as::pdf_near_zero(p, 1e-8), prodnormal::exact::pdf_exact(p, 1e-8).value), 0.05);
  EXPECT_THROW(as::pdf_near_zero(p, 1.0), prodnormal::domain_error);
  EXPECT_THROW(as::pdf_near_zero(p, 0.0), prodnormal::domain_error);
}

TEST(PdfAsym, TableOneSpotValues) {
  const auto e1 = as::pdf_asym({0, 0, 1, 1, 0}, 2.5, TailSide::right);
  EXPECT_NEAR(e1.value / prodnormal::exact::pdf_exact({0, 0, 1, 1, 0}, 2.5).value - 1, 4.4e-2, 0.1e-2);
  const auto e2 = as::pdf_asym({1, 1, 1, 1, 0.5}, 15, TailSide::right);
  EXPECT_NEAR(e2.value / prodnormal::exact::pdf_exact({1, 1, 1, 1, 0.5}, 15).value - 1, -2.6e-2, 0.1e-2);
}

TEST(PdfAsym, Validity) {
  const ProductParams p(1, 1, 1, 1, 0);
  EXPECT_FALSE(as::pdf_asym(p, -1, TailSide::right).validity.valid);
  EXPECT_FALSE(as::pdf_asym(p, 1, TailSide::left).validity.valid);
  EXPECT_FALSE(as::pdf_asym(p, 0, TailSide::right).validity.reason.empty());
  EXPECT_TRUE(as::pdf_asym(p, 1, TailSide::right).validity.valid);
  EXPECT_FALSE(as::tail_asym(p, -1, TailSide::right).validity.valid);
}

TEST(PdfAsym, AccuracyWithinTwiceTableOne) {
  // |pdf_asym / pdf_exact - 1| at x = 15, bounded by twice the published magnitude.
  const auto table = testdata::load(1);
  ASSERT_EQ(table.rows.size(), 30u);
  ASSERT_EQ(table.header.back(), "x_15");
  for (const auto& row : table.rows) {
    const ProductParams p(std::stod(row[0]), std::stod(row[1]), 1, 1, std::stod(row[2]));
    const double err =
        std::abs(as::pdf_asym(p, 15, TailSide::right).value / prodnormal::exact::pdf_exact(p, 15).value - 1);
    EXPECT_LE(err, 2 * std::abs(std::stod(row.back()))) << row[0] << ' ' << row[1] << ' ' << row[2];
  }
}

TEST(TailAsym, AlgebraicLinkExact) {
  for (double r : {-0.5, 0.0, 0.7}) {
    const ProductParams p(1.2, -0.3, 1.5, 0.8, r);
    for (double x : {0.5, 4.0, 40.0}) {
      EXPECT_EQ(as::tail_asym(p, x, TailSide::right).value,
                as::pdf_asym(p, x, TailSide::right).value * (p.scale() * (1 + r)));
      EXPECT_EQ(as::tail_asym(p, -x, TailSide::left).value,
                as::pdf_asym(p, -x, TailSide::left).value * (p.scale() * (1 - r)));
    }
  }
}

TEST(TailAsym, ReflectionExact) {
  for (double r : {-0.5, 0.25}) {
    const ProductParams p(2, 1, 1.1, 0.9, r);
    for (double x : {0.7, 6.0, 55.0}) {
      EXPECT_EQ(as::pdf_asym(p, x, TailSide::right).value,
                as::pdf_asym(p.reflected(), -x, TailSide::left).value);
      EXPECT_EQ(as::pdf_asym(p, -x, TailSide::left).value,
                as::pdf_asym(p.reflected(), x, TailSide::right).value);
      EXPECT_EQ(as::tail_asym(p, x, TailSide::right).value,
                as::tail_asym(p.reflected(), -x, TailSide::left).value);
    }
  }
}

TEST(TailAsym, ScalingCovariance) {
  const ProductParams p(1.5, -0.4, 2.0, 0.5, 0.25);
  for (double x : {1.0, 5.0, 20.0})
    EXPECT_LT(rel(as::pdf_asym(p, x, TailSide::right).value,
                  as::pdf_asym(p.standardized(), x, TailSide::right).value / p.scale()),
              1e-14);
  for (double level : {0.99, 0.9999})
    EXPECT_LT(rel(as::quantile_asym(p, level).value, as::quantile_asym(p.standardized(), level).value * p.scale()),
              1e-14);
}

TEST(TailAsym, TableTwoSpotAndNa) {
  const ProductParams p(0, 0, 1, 1, 0);
  const double q = prodnormal::risk::quantile_numeric(p, {0.99});
  const double s = prodnormal::exact::survival(p, q);
  EXPECT_NEAR(as::tail_asym(p, q, TailSide::right).value / s - 1, 1.7e-1, 0.1e-1);
  const ProductParams n(2, -2, 1, 1, 0);
  const double qn = prodnormal::risk::quantile_numeric(n, {0.95});
  EXPECT_LT(qn, 0);
  EXPECT_FALSE(as::tail_asym(n, qn, TailSide::right).validity.valid);
  EXPECT_LT(rel(as::tail_asym(p, 5, TailSide::right).value, prodnormal::exact::survival(p, 5)), 0.15);
}

TEST(TailAsym, MonotoneImprovementOnZeroMeanRows) {
  for (const auto& p : zero_mean_grid()) {
    double prev = 1e300;
    for (double level : {0.95, 0.975, 0.99, 0.995, 0.999, 0.9999}) {
      const double q = prodnormal::risk::quantile_numeric(p, {level});
      const double err = std::abs(as::tail_asym(p, q, TailSide::right).value / prodnormal::exact::survival(p, q) - 1);
      EXPECT_LE(err, prev) << p.rho() << ' ' << level;
      prev = err;
    }
  }
}

TEST(SolveExpSqrt, ClosedFormExample) {
  const as::ExpSqrtEquation eq{1, 0, 1, std::exp(-20.0)};
  const double x = as::solve_exp_sqrt(eq);
  EXPECT_NEAR(x, 20 - 0.5 * std::log(20.0), 1e-13);
  // Numeric root of x^{-1/2} e^{-x} = z.
  auto g = [&](double t) { return -0.5 * std::log(t) - t + 20; };
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t it = 200;
  const auto root = boost::math::tools::bisect(g, 1.0, 40.0, tol, it);
  const double xr = 0.5 * (root.first + root.second);
  EXPECT_LT(std::abs(x - xr), 1 / 20.0);
  const double resid = std::abs(std::exp(-0.5 * std::log(x) - x) / eq.z - 1);
  EXPECT_LT(resid, 0.05);
}

TEST(SolveExpSqrt, ResidualShrinks) {
  double prev = 1e300;
  for (double l : {10.0, 20.0, 40.0}) {
    const as::ExpSqrtEquation eq{0.8, 0.0, 0.6, std::exp(-l)};
    const double x = as::solve_exp_sqrt(eq);
    const double lhs = std::log(eq.amp) - 0.5 * std::log(x) - eq.a * x + eq.b * std::sqrt(x);
    const double r = std::abs(std::expm1(lhs + l));
    EXPECT_LT(r, prev) << l;
    prev = r;
  }
}

TEST(SolveExpSqrt, ConstantTermLimitWithDrift) {
  // With b != 0 the b^2/(4a^2) constant leaves the residual tending to
  // e^{b^2/(4a)} - 1 rather than 0.
  const as::ExpSqrtEquation base{0.8, 1.3, 0.6, 0};
  auto resid = [&](double l) {
    auto eq = base;
    eq.z = std::exp(-l);
    const double x = as::solve_exp_sqrt(eq);
    return std::expm1(std::log(eq.amp) - 0.5 * std::log(x) - eq.a * x + eq.b * std::sqrt(x) + l);
  };
  const double limit = std::expm1(1.3 * 1.3 / (4 * 0.8));
  double prev = INFINITY;
  for (double l : {50.0, 200.0, 700.0}) {
    const double d = std::abs(resid(l) - limit);
    EXPECT_LT(d, prev) << l;
    prev = d;
  }
  EXPECT_LT(prev, 0.25);
}

TEST(SolveExpSqrt, DomainErrors) {
  EXPECT_THROW(as::solve_exp_sqrt({0, 1, 1, 1e-5}), prodnormal::domain_error);
  EXPECT_THROW(as::solve_exp_sqrt({1, 1, -1, 1e-5}), prodnormal::domain_error);
  EXPECT_THROW(as::solve_exp_sqrt({1, 1, 1, 0.5}), prodnormal::domain_error);
}

TEST(QuantileAsym, ZeroMeanClosedForm) {
  const double l = std::log(100.0);
  const double g = l - 0.5 * std::log(l) - 0.5 * std::log(2 * std::numbers::pi);
  EXPECT_LT(rel(as::quantile_asym({0, 0, 1, 1, 0}, 0.99).value, g), 1e-14);
  // Q(0.99) from a 40-digit conditioning-integral oracle.
  const double q_ref = 2.983811124500461;
  EXPECT_LT(rel(prodnormal::risk::quantile_numeric({0, 0, 1, 1, 0}, {0.99}), q_ref), 1e-9);
  EXPECT_NEAR(g / q_ref - 1, -0.0205003876, 1e-9);
}

TEST(QuantileAsym, ConsistentWithSolver) {
  for (const ProductParams& p : {ProductParams(0, 0, 1, 1, 0), ProductParams(1, 1, 1, 1, 0.5),
                                 ProductParams(1, -1, 1, 1, -0.25), ProductParams(2, 1, 1.5, 0.5, 0.25)})
    for (double level : {0.99, 0.999, 0.9999, 1 - 1e-8}) {
      const auto eq = as::quantile_equation(p, level);
      if (!(std::log(eq.amp / eq.z) > 1)) continue;
      EXPECT_LT(rel(as::quantile_asym(p, level).value, as::solve_exp_sqrt(eq)), 1e-12);
    }
}

TEST(QuantileAsym, DeltaSwitch) {
  // delta_plus = 0 drops the ln 2 term.
  const ProductParams p(1, -1, 1, 1, 0.25);
  EXPECT_EQ(p.delta_plus(), 0.0);
  const double l = std::log(1e4);
  const double c = prodnormal::exact::log_constant_c(p);
  const double dm = p.delta_minus();
  const double g = 1.25 * (l - 0.5 * std::log(l) - 0.5 * std::log(2 * std::numbers::pi / 1.25) + 1.25 / 0.75 * dm * dm / 8 + c);
  EXPECT_LT(rel(as::quantile_asym(p, 0.9999).value, g), 1e-13);
}

TEST(QuantileAsym, ValidityRules) {
  EXPECT_THROW(as::quantile_asym({0, 0, 1, 1, 0}, 1.0), prodnormal::domain_error);
  EXPECT_THROW(as::quantile_asym({0, 0, 1, 1, 0}, 0.0), prodnormal::domain_error);
  EXPECT_FALSE(as::quantile_asym({0, 0, 1, 1, 0}, 0.5).validity.valid);
  const auto mid = as::quantile_asym({0, 0, 1, 1, 0}, 0.9);
  EXPECT_TRUE(mid.validity.valid);
  EXPECT_FALSE(mid.validity.warning.empty());
  const auto na = as::var_asym({2, -2, 1, 1, 0}, 0.95);
  EXPECT_FALSE(na.validity.valid);
  EXPECT_FALSE(na.validity.reason.empty());
  EXPECT_FALSE(as::var_asym({0, 0, 1, 1, 0}, 0.01).validity.valid);
  const auto lower = as::quantile_asym({0, 0, 1, 1, 0}, 0.01);
  EXPECT_TRUE(lower.validity.valid);
  EXPECT_LT(lower.value, 0);
  // 1 - 0.99 is not 0.01 in binary, hence the tolerance.
  EXPECT_LT(rel(lower.value, -as::quantile_asym({0, 0, 1, 1, 0}, 0.99).value), 1e-12);
}

TEST(VarTvarAsym, Identities) {
  for (double r : {-0.5, 0.0, 0.5}) {
    const ProductParams p(0.5, 1, 2, 1.5, r);
    for (double level : {0.99, 0.999}) {
      EXPECT_EQ(as::var_asym(p, level).value, as::quantile_asym(p, level).value);
      EXPECT_DOUBLE_EQ(as::tvar_asym(p, level).value - as::var_asym(p, level).value, p.scale() * (1 + r));
    }
  }
  const double l = std::log(100.0);
  const double g = 1.5 * (l - 0.5 * std::log(l) - 0.5 * std::log(2 * std::numbers::pi / 1.5));
  EXPECT_LT(rel(as::tvar_asym({0, 0, 1, 1, 0.5}, 0.99).value, g + 1.5), 1e-14);
}

TEST(QuantileAsym, SubstitutionReproducesTailMass) {
  const double level = 1 - 1e-6;
  for (const auto& p : zero_mean_grid()) {
    const double g = as::quantile_asym(p, level).value;
    EXPECT_LT(rel(as::tail_asym(p, g, TailSide::right).value, 1 - level), 0.25) << p.rho();
  }
}

TEST(ConvergenceRate, Examples) {
  const std::vector<double> grid{50, 80, 125, 200, 320, 400};
  const double s1 = as::convergence_rate_probe({1, 1, 1, 1, 0}, TailSide::right, grid);
  EXPECT_GE(s1, -0.65);
  EXPECT_LE(s1, -0.35);
  const double s2 = as::convergence_rate_probe({1, -1, 1, 1, 0}, TailSide::right, grid);
  EXPECT_GE(s2, -1.2);
  EXPECT_LE(s2, -0.8);
  const double s3 = as::convergence_rate_probe({0, 0, 1, 1, 0.5}, TailSide::right, grid);
  EXPECT_GE(s3, -1.2);
  EXPECT_LE(s3, -0.8);
  EXPECT_THROW(as::convergence_rate_probe({0, 0, 1, 1, 0}, TailSide::right, {50, 100}), prodnormal::domain_error);
}
