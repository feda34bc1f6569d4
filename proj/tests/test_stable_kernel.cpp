#include "fracheat/errors.hpp"
#include "fracheat/stable_kernel.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fracheat;
using std::numbers::pi;

namespace {

SpectralMeasure uniform_planar(double s, double weight = 1.0) {
  return SpectralMeasure::planar(s, {{0.0, 2 * pi, weight}}, weight);
}

// a = indicator of two opposite arcs of width 0.2 centered at 0 and pi.
SpectralMeasure two_arcs(double s) {
  return SpectralMeasure::planar(
      s, {{0.0, 0.1, 1.0}, {pi - 0.1, pi + 0.1, 1.0}, {2 * pi - 0.1, 2 * pi, 1.0}}, 1.0);
}

}  // namespace

TEST_CASE("one-dimensional symbol is a two-atom sum") {
  const SymbolProfile p(SpectralMeasure::one_dimensional(0.5, 0.5, 0.5, 1.0));
  CHECK(symbol(p, Vec2(2.0, 0.0)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(symbol(p, Vec2::Zero()) == 0.0);
}

TEST_CASE("uniform planar density has symbol 4 at s = 1/2") {
  const auto m = uniform_planar(0.5);
  CHECK(symbol(SymbolProfile(m, 8), Vec2(1.0, 0.0)) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(symbol(SymbolProfile(m, 64), Vec2(1.0, 0.0)) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(symbol(SymbolProfile(two_arcs(0.5)), Vec2::Zero()) == 0.0);
}

TEST_CASE("symbol is homogeneous of degree 2s") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0), nu(0.01, 50.0);
  const SymbolProfile p(two_arcs(0.35));
  for (int i = 0; i < 100; ++i) {
    const Vec2 xi(u(gen), u(gen));
    const double v = nu(gen);
    const double lhs = p(Vec2(v * xi)), rhs = std::pow(v, 0.7) * p(xi);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * lhs);
  }
}

TEST_CASE("ellipticity constants") {
  const auto e1 = ellipticity(SpectralMeasure::one_dimensional(0.3, 0.5, 0.5, 1.0));
  CHECK(e1.mu1 == doctest::Approx(1.0));
  CHECK(e1.mu2 == doctest::Approx(1.0));

  const auto e2 = ellipticity(uniform_planar(0.5));
  CHECK(e2.mu1 == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(e2.mu2 == doctest::Approx(2 * pi).epsilon(1e-12));

  // Minimum at nu orthogonal to the arcs: int |sin| over both arcs = 4 (1 - cos 0.1).
  const auto e3 = ellipticity(two_arcs(0.5));
  CHECK(e3.mu2 == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(e3.mu1 == doctest::Approx(4 * (1 - std::cos(0.1))).epsilon(1e-9));
  CHECK(e3.mu1 > 0.0);
}

TEST_CASE("symbol sandwich on random directions") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double s : {0.2, 0.5, 0.9}) {
    const auto m = two_arcs(s);
    const auto e = ellipticity(m);
    const SymbolProfile p(m);
    for (int i = 0; i < 1000; ++i) {
      const Vec2 xi(u(gen), u(gen));
      const double r = std::pow(xi.norm(), 2 * s);
      const double a = p(xi);
      CHECK(a >= e.mu1 * r * (1 - 1e-8));
      CHECK(a <= e.mu2 * r * (1 + 1e-8));
    }
  }
}

TEST_CASE("measure validation") {
  CHECK_THROWS_AS(SpectralMeasure::one_dimensional(0.5, 1.0, 0.5, 1.0), ValidationError);
  const auto sym = SpectralMeasure::one_dimensional(0.5, 1.0, 0.5, 1.0, SymmetryMode::Complete);
  CHECK(sym.weight_plus() == doctest::Approx(0.75));
  CHECK(sym.weight_minus() == doctest::Approx(0.75));
  CHECK_THROWS_AS(SpectralMeasure::planar(0.5, {{0.0, 0.5, 1.0}}, 1.0), ValidationError);
  CHECK_THROWS_AS(SpectralMeasure::one_dimensional(1.2, 0.5, 0.5, 1.0), ValidationError);
  CHECK_THROWS_AS(SpectralMeasure::one_dimensional(0.5, 2.0, 2.0, 1.0), ValidationError);
  CHECK_THROWS_AS(ellipticity(SpectralMeasure::planar(0.5, {{0.0, 2 * pi, 0.0}}, 1.0)),
                  ValidationError);
}

TEST_CASE("second-difference bound") {
  const SymbolProfile p1(SpectralMeasure::one_dimensional(0.5, 0.5, 0.5, 1.0));
  const auto [lhs, rhs] = second_difference(p1, 1.0, Vec2(1.0, 0.0), Vec2(3.0, 0.0));
  CHECK(lhs == doctest::Approx(4.0));
  CHECK(rhs == doctest::Approx(6.0));
  const auto zero = second_difference(p1, 1.0, Vec2(1.0, 0.0), Vec2::Zero());
  CHECK(zero.first == doctest::Approx(0.0));

  const auto report = second_difference_certificate(SymbolProfile(uniform_planar(0.7)), 10000, 3);
  CHECK(report.trials == 10000);
  CHECK(report.violations == 0);
  CHECK(report.max_ratio <= 1.0);
}

TEST_CASE("power concavity") {
  CHECK(power_concavity(1.0, 0.0, 0.3));
  CHECK(power_concavity(1.0, 1.0, 0.5));
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 10.0), us(0.001, 0.999);
  for (int i = 0; i < 10000; ++i) {
    double a = u(gen), b = u(gen);
    if (a < b) std::swap(a, b);
    CHECK(power_concavity(a, b, us(gen)));
  }
}

TEST_CASE("Weyl constant") {
  const auto w1 = weyl_constant(SymbolProfile(SpectralMeasure::fractional_laplacian(1, 0.5)), 2.0, 0, 1);
  CHECK(w1.volume == doctest::Approx(2.0));
  CHECK(w1.c0 == doctest::Approx(pi / 2).epsilon(1e-14));
  CHECK(w1.lower == doctest::Approx(w1.c0).epsilon(1e-12));
  CHECK(w1.upper == doctest::Approx(w1.c0).epsilon(1e-12));

  // a = 1 on S^1, s = 1/2: A = 4|xi|, V_L = pi/16 and C0 = 2 pi pi^{-1/2} (pi/16)^{-1/2} = 8.
  const auto w2 = weyl_constant(SymbolProfile(uniform_planar(0.5)), pi, 200000, 7);
  CHECK(std::abs(w2.c0 - 8.0) <= 3 * w2.c0_sigma + 1e-12);
  CHECK(w2.sandwich_ok);

  const auto w3 = weyl_constant(SymbolProfile(two_arcs(0.5)), pi, 200000, 7);
  CHECK(w3.sandwich_ok);
  CHECK(w3.lower < w3.c0);
  CHECK(w3.c0 < w3.upper);
}
