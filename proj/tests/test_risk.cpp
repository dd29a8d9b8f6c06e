#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <prodnormal/cdf.hpp>
#include <prodnormal/errors.hpp>
#include <prodnormal/risk.hpp>

using prodnormal::ProductParams;
namespace risk = prodnormal::risk;
namespace ex = prodnormal::exact;

namespace {

double rel(double a, double b) { return std::abs(a / b - 1); }

}  // namespace

TEST(QuantileNumeric, IndependentOracle) {
  // Quantile and TVaR by bisection on a 40-digit conditioning-integral survival function.
  struct row {
    ProductParams p;
    double level, q, tvar;
  };
  const std::vector<row> rows{
      {{0, 0, 1, 1, 0}, 0.99, 2.983811124500461, 3.8887203662557633653},
      {{1, 1, 1, 1, 0.5}, 0.999, 13.292583655485156, 15.164046177762372553},
      {{2, -2, 1, 1, 0.5}, 0.95, -0.10523178050678578, 1.1294367566997339841},
      {{2, 1, 1, 1, -0.25}, 0.01, -3.7398846415951876, 1.8193634586260525059},
  };
  for (const auto& r : rows) {
    const double q = risk::quantile_numeric(r.p, {r.level});
    EXPECT_NEAR(q, r.q, 1e-8 * std::max(1.0, std::abs(r.q))) << r.level;
    EXPECT_LT(rel(risk::tvar_at(r.p, r.level, q), r.tvar), 1e-8) << r.level;
  }
}

TEST(QuantileNumeric, Roundtrip) {
  for (const ProductParams& p : {ProductParams(0, 0, 1, 1, 0), ProductParams(1, -1, 1, 1, 0.25),
                                 ProductParams(2, 1, 1, 1, -0.5), ProductParams(1, 1, 2, 0.5, 0.5)})
    for (double level : {1e-4, 1e-2, 0.1, 0.5, 0.9, 0.99, 1 - 1e-4}) {
      const double q = risk::quantile_numeric(p, {level});
      EXPECT_LE(std::abs(ex::cdf(p, q) - level), 1e-10) << level;
    }
}

TEST(QuantileNumeric, SymmetricMedian) {
  EXPECT_NEAR(risk::quantile_numeric({0, 0, 1, 1, 0}, {0.5}), 0.0, 1e-8);
}

TEST(QuantileNumeric, MonotoneAndScaling) {
  const ProductParams p(1.5, -0.5, 2, 0.5, 0.25);
  double prev = -1e300;
  for (double level : {0.001, 0.05, 0.3, 0.5, 0.7, 0.95, 0.999}) {
    const double q = risk::quantile_numeric(p, {level});
    EXPECT_GT(q, prev);
    prev = q;
    EXPECT_LT(rel(q, risk::quantile_numeric(p.standardized(), {level}) * p.scale()), 1e-8) << level;
  }
}

TEST(QuantileNumeric, RequestValidation) {
  EXPECT_THROW(risk::quantile_numeric({0, 0, 1, 1, 0}, {0.0}), prodnormal::domain_error);
  EXPECT_THROW(risk::quantile_numeric({0, 0, 1, 1, 0}, {1.0}), prodnormal::domain_error);
  EXPECT_THROW(risk::quantile_numeric({0, 0, 1, 1, 0}, {0.5, -1}), prodnormal::domain_error);
}

TEST(Tvar, CoherenceAndGrowth) {
  for (const ProductParams& p : {ProductParams(0, 0, 1, 1, 0.5), ProductParams(2, -2, 1, 1, -0.25)}) {
    double prev_q = -1e300, prev_t = -1e300;
    for (double level : {0.3, 0.9, 0.99, 0.999}) {
      const double q = risk::quantile_numeric(p, {level});
      const double t = risk::tvar_at(p, level, q);
      EXPECT_GE(t, q);
      EXPECT_GT(q, prev_q);
      EXPECT_GT(t, prev_t);
      prev_q = q;
      prev_t = t;
    }
  }
}

TEST(Tvar, VarAverageCrossCheck) {
  for (const ProductParams& p : {ProductParams(0, 0, 1, 1, 0), ProductParams(1, 1, 1, 1, 0.5),
                                 ProductParams(2, -2, 1, 1, -0.25)})
    for (double level : {0.9, 0.99, 0.999}) {
      const double t = risk::tvar_numeric(p, {level});
      EXPECT_LT(rel(t, risk::tvar_var_average(p, level)), 1e-7) << p.mu_x() << ' ' << level;
    }
}

TEST(Gap, ApproachesScaleTimesOnePlusRho) {
  const auto g0 = risk::gap_diagnostic({0, 0, 1, 1, 0}, {0.9, 0.999, 1 - 1e-5});
  EXPECT_LT(rel(g0.back(), 1.0), 0.1);
  EXPECT_LT(std::abs(g0.back() - 1), std::abs(g0.front() - 1));
  const auto g5 = risk::gap_diagnostic({0, 0, 1, 1, 0.5}, {1 - 1e-5});
  EXPECT_LT(rel(g5.back(), 1.5), 0.1);
  EXPECT_THROW(risk::gap_diagnostic({0, 0, 1, 1, 0}, {0.9, 0.8}), prodnormal::domain_error);
}

TEST(Gap, RatioForm) {
  const double level = 1 - 1e-6;
  const ProductParams p(0, 0, 1, 1, 0);
  const double q = risk::quantile_numeric(p, {level});
  const double t = risk::tvar_at(p, level, q);
  EXPECT_LT(std::abs((t / q - 1) * std::log(1 / (1 - level)) - 1), 0.25);
}

TEST(QuantileUpperTail, BeyondDoublePrecisionLevels) {
  const ProductParams p(0, 0, 1, 1, 0);
  const double q = risk::quantile_upper_tail(p, 1e-20);
  EXPECT_LT(rel(ex::survival(p, q), 1e-20), 1e-8);
  EXPECT_LT(rel(risk::quantile_upper_tail(p, 0.01), risk::quantile_numeric(p, {0.99})), 1e-9);
}
