// Value at risk and tail value at risk: numerical values beside their expansions.

#include <cstdio>

#include <prodnormal/asymptotics.hpp>
#include <prodnormal/risk.hpp>

int main() {
  using namespace prodnormal;
  const ProductParams p(0.0, 0.0, 1.0, 1.0, 0.5);

  std::printf("%8s %14s %14s %14s %14s\n", "p", "VaR", "VaR approx", "TVaR", "TVaR approx");
  for (double level : {0.95, 0.99, 0.999, 0.9999}) {
    const double q = risk::quantile_numeric(p, {level});
    const double t = risk::tvar_at(p, level, q);
    const auto qa = asymptotics::var_asym(p, level);
    const auto ta = asymptotics::tvar_asym(p, level);
    std::printf("%8g %14.8f %14.8f %14.8f %14.8f\n", level, q, qa.value, t, ta.value);
  }
}
