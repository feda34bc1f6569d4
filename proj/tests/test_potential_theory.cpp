#include "fracheat/errors.hpp"
#include "fracheat/potential_theory.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

using namespace fracheat;
using std::numbers::pi;

TEST_CASE("Riesz constant") {
  CHECK(riesz_constant(2, 0.5) == doctest::Approx(1 / (2 * pi)).epsilon(1e-14));
  // n = 1, s = 1/4: Gamma(1/4) / (sqrt(2) sqrt(pi) Gamma(1/4)).
  CHECK(riesz_constant(1, 0.25) == doctest::Approx(1 / std::sqrt(2 * pi)).epsilon(1e-14));
  CHECK_THROWS_AS(riesz_constant(1, 0.5), ValidationError);
}

TEST_CASE("heat kernel against closed forms") {
  const KernelProfile cauchy(1, 0.5);
  for (double t : {0.1, 1.0, 3.0})
    for (double x : {0.0, 0.4, 5.0})
      CHECK(cauchy.heat_kernel(x, t) == doctest::Approx(t / (pi * (t * t + x * x))).epsilon(1e-9));

  // p(0, t) = Gamma(1 + 1/2s) t^{-1/2s} / pi.
  for (double s : {0.2, 0.45, 0.8}) {
    const KernelProfile k(1, s);
    for (double t : {0.5, 2.0})
      CHECK(k.heat_kernel(0.0, t) ==
            doctest::Approx(std::tgamma(1 + 0.5 / s) * std::pow(t, -0.5 / s) / pi).epsilon(1e-8));
    CHECK(k.heat_kernel(0.7, 1.3) > 0);
    CHECK(k.heat_kernel(0.7, 1.3) == doctest::Approx(k.heat_kernel(-0.7, 1.3)));
  }
  CHECK_THROWS_AS(KernelProfile(2, 0.5), ValidationError);
  CHECK_THROWS_AS(KernelProfile(1, 1.0), ValidationError);
}

TEST_CASE("heat kernel has unit mass") {
  for (double s : {0.15, 0.5, 0.85}) {
    const KernelProfile k(1, s);
    CHECK(k.heat_kernel_mass(1.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(k.heat_kernel_mass(0.2) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("fundamental solution is the Riesz kernel") {
  for (double s : {0.1, 0.3, 0.45}) {
    const KernelProfile k(1, s);
    const double c = riesz_constant(1, s);
    for (double x : {0.5, 1.0, 4.0})
      CHECK(k.fundamental_solution(x) == doctest::Approx(c * std::pow(x, 2 * s - 1)).epsilon(1e-7));
    CHECK(k.fitted_c2({0.5, 1.0, 2.0}) == doctest::Approx(c).epsilon(1e-7));
  }
  CHECK_THROWS_AS(KernelProfile(1, 0.6).fundamental_solution(1.0), ValidationError);
}

TEST_CASE("Riesz potential of indicators") {
  // I f(0) for the indicator of (-1, 1): C 2 int_0^1 r^{2s-1} dr = C / s.
  const double s = 0.3;
  const DomainFunction seg(Domain::interval(-1, 1), [](const Vec2&) { return 1.0; });
  CHECK(riesz_potential(seg, Vec2::Zero(), s) == doctest::Approx(riesz_constant(1, s) / s).epsilon(1e-8));
  // Off center: C / (2s) ((1 - x)^{2s} + (1 + x)^{2s}).
  const double x = 0.4;
  const double off = riesz_constant(1, s) / (2 * s) * (std::pow(1 - x, 2 * s) + std::pow(1 + x, 2 * s));
  CHECK(riesz_potential(seg, Vec2(x, 0), s) == doctest::Approx(off).epsilon(1e-8));

  // Unit disk, center: C 2 pi int_0^1 r^{2s-1} dr = C pi / s.
  const DomainFunction disk(Domain::disk(Vec2::Zero(), 1.0), [](const Vec2&) { return 1.0; });
  CHECK(riesz_potential(disk, Vec2::Zero(), 0.5) == doctest::Approx(riesz_constant(2, 0.5) * 2 * pi).epsilon(1e-8));
}

TEST_CASE("Riesz potential is linear") {
  const double s = 0.35;
  const DomainFunction f(Domain::interval(-1, 1), [](const Vec2& y) { return 1 - y(0) * y(0); });
  const DomainFunction g(Domain::interval(-1, 1), [](const Vec2& y) { return y(0); });
  const DomainFunction fg(Domain::interval(-1, 1), [](const Vec2& y) { return 2 * (1 - y(0) * y(0)) - 3 * y(0); });
  const Vec2 x(0.2, 0);
  CHECK(riesz_potential(fg, x, s) ==
        doctest::Approx(2 * riesz_potential(f, x, s) - 3 * riesz_potential(g, x, s)).epsilon(1e-8));
}

TEST_CASE("Dirichlet solutions stay below the Riesz potential and grow with the domain") {
  const double s = 0.25;
  const auto m = SpectralMeasure::fractional_laplacian(1, s);
  const Datum d{DatumKind::Bump, Vec2::Zero(), 0.5, 1.0, 0.0};
  const double whole = riesz_potential(DomainFunction(Domain::interval(-0.5, 0.5), d), Vec2::Zero(), s);
  double previous = 0.0;
  for (double r : {1.0, 2.0, 4.0}) {
    const auto grid = std::make_shared<const DomainGrid>(DomainGrid::build(Domain::interval(-r, r), 1.0 / 64));
    const auto mats = assemble(m, grid);
    const Eigen::VectorXd u = solve_dirichlet(mats, sample(*grid, d));
    const double center = u(static_cast<Eigen::Index>(grid->size() / 2));
    CHECK(center > previous);
    CHECK(center < whole * 1.01);
    previous = center;
  }
}

TEST_CASE("L^p case selection") {
  CHECK(lp_case_for(1, 0.25, 1.5) == LpCase::A);
  CHECK(lp_case_for(1, 0.25, 2.0) == LpCase::B);
  CHECK(lp_case_for(1, 0.25, 3.0) == LpCase::C);
  CHECK(parse_lp_case(to_string(LpCase::B)) == LpCase::B);
  CHECK_THROWS_AS(parse_lp_case("d"), ValidationError);
}

TEST_CASE("discrete Lp norms") {
  const Eigen::VectorXd f = Eigen::VectorXd::Constant(16, -2.0);
  CHECK(discrete_lp_norm(f, 0.125, 1, 2.0) == doctest::Approx(std::sqrt(4.0 * 2.0)));
  CHECK(discrete_lp_norm(f, 0.5, 2, 1.0) == doctest::Approx(8.0));
  CHECK(discrete_lp_norm(f, 0.5, 1, std::numeric_limits<double>::infinity()) == 2.0);
}

TEST_CASE("test family is seeded and well placed") {
  const auto dom = Domain::interval(-1, 1);
  const auto a = lp_family(dom, 9, 42), b = lp_family(dom, 9, 42);
  REQUIRE(a.size() == 9);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].center == b[i].center);
    CHECK(a[i].radius == b[i].radius);
    CHECK(static_cast<int>(a[i].kind) == static_cast<int>(i % 3));
    CHECK(dom.distance(a[i].center) >= dom.diameter() / 8);
  }
}

TEST_CASE("L^p estimate check in the supercritical case") {
  const double s = 0.4;
  const auto grid = std::make_shared<const DomainGrid>(DomainGrid::build(Domain::interval(-1, 1), 1.0 / 128));
  const auto mats = assemble(SpectralMeasure::fractional_laplacian(1, s), grid);
  const auto family = lp_family(grid->domain(), 6, 1);
  const auto r = lp_estimate_check(mats, LpCase::C, 2.0, family);
  REQUIRE(r.q.size() == 1);
  CHECK(std::isinf(r.q[0]));
  CHECK(r.rows.size() + r.skipped == family.size());
  CHECK(r.max_ratio[0] >= r.min_ratio[0]);
  CHECK(r.linearity_defect <= 1e-12);
  CHECK(r.comparison_defect <= 1e-12);
  CHECK_THROWS_AS(lp_estimate_check(mats, LpCase::A, 2.0, family), ValidationError);

  const auto a = lp_estimate_check(mats, LpCase::A, 1.1, family);
  CHECK(a.q[0] == doctest::Approx(1.1 / (1 - 0.88)));
  const auto b = lp_estimate_check(mats, LpCase::B, 1.25, family);
  CHECK(b.q == std::vector<double>{4, 8, 16});
}
