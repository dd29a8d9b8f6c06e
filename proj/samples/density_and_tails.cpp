// Exact density against its tail approximation, plus distribution function values.

#include <cstdio>

#include <prodnormal/asymptotics.hpp>
#include <prodnormal/cdf.hpp>
#include <prodnormal/exact.hpp>

int main() {
  using namespace prodnormal;
  const ProductParams p(1.0, 1.0, 1.0, 1.0, 0.25);

  std::printf("%8s %22s %22s %10s\n", "x", "pdf_exact", "pdf_asym", "rel.err");
  for (double x : {2.5, 5.0, 10.0, 20.0, 40.0}) {
    const auto e = exact::pdf_exact(p, x);
    const auto a = asymptotics::pdf_asym(p, x, asymptotics::TailSide::right);
    std::printf("%8.2f %22.15e %22.15e %10.2e\n", x, e.value, a.value, a.value / e.value - 1);
  }

  std::printf("\nP(Z <= 0) = %.15f\n", exact::cdf(p, 0.0));
  std::printf("P(Z > 10) = %.15e\n", exact::survival(p, 10.0));
  const auto m = exact::moments(p);
  std::printf("mean = %.6f, variance = %.6f\n", m.mean, m.variance);
}
