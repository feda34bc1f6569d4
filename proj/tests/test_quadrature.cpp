#include "fracheat/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace fracheat;

TEST_CASE("Gauss-Legendre is exact for degree 2n-1") {
  const auto rule = gauss_legendre(6, -0.5, 2.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], 11);
  const double exact = (std::pow(2.0, 12) - std::pow(-0.5, 12)) / 12.0;
  CHECK(sum == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("Gauss-Jacobi reproduces the beta-function moment") {
  for (auto [a, b] : {std::pair{0.0, -0.4}, {0.3, 0.6}, {-0.7, 0.0}}) {
    const auto rule = gauss_jacobi(12, a, b);
    double zeroth = 0.0, second = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      zeroth += rule.weights[i];
      second += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
    }
    const double moment = std::pow(2.0, a + b + 1) * std::beta(a + 1, b + 1);
    CHECK(zeroth == doctest::Approx(moment).epsilon(1e-12));
    // int x^2 (1-x)^a (1+x)^b via 1 + x = 2t: 2^{a+b+1} int (2t-1)^2 t^b (1-t)^a dt
    const double m2 = std::pow(2.0, a + b + 1) *
                      (4 * std::beta(b + 3, a + 1) - 4 * std::beta(b + 2, a + 1) + std::beta(b + 1, a + 1));
    CHECK(second == doctest::Approx(m2).epsilon(1e-12));
  }
}

TEST_CASE("radial rule absorbs the power weight") {
  const double gamma = -0.6, b = 1.7;
  const auto rule = gauss_radial(10, gamma, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
  CHECK(sum == doctest::Approx(std::pow(b, gamma + 3) / (gamma + 3)).epsilon(1e-13));
}

TEST_CASE("adaptive Gauss-Kronrod handles an endpoint singularity") {
  double err = 0.0;
  const double v = integrate_adaptive([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-12, &err);
  CHECK(v == doctest::Approx(2.0 / 3.0).epsilon(1e-11));
  CHECK(err < 1e-10);
  CHECK(integrate_adaptive([](double) { return 0.0; }, 0.0, 1.0, 1e-12) == 0.0);
}
