#include "fracheat/boundary_analysis.hpp"
#include "fracheat/discrete_operator.hpp"
#include "fracheat/errors.hpp"
#include "fracheat/functions.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace fracheat;

namespace {

double ball_constant(double s) {
  return std::pow(4.0, s) * std::tgamma(1 + s) * std::tgamma(0.5 + s) / std::tgamma(0.5);
}

Eigen::VectorXd ball_profile(const DomainGrid& grid, double s) {
  return sample(grid, [s](const Vec2& x) { return std::pow(1 - x(0) * x(0), s); });
}

}  // namespace

TEST_CASE("Holder seminorm of simple functions") {
  std::vector<Vec2> pts;
  Eigen::MatrixXd lin(11, 1), root(11, 1);
  for (int i = 0; i <= 10; ++i) {
    const double x = 0.1 * i;
    pts.emplace_back(x, 0.0);
    lin(i, 0) = 2 * x;
    root(i, 0) = std::sqrt(x);
  }
  CHECK(holder_seminorm(pts, lin, 1.0).value == doctest::Approx(2.0));
  // sqrt is exactly 1/2-Holder with constant 1, attained at pairs containing 0.
  const auto r = holder_seminorm(pts, root, 0.5);
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.pairs == 55);
  CHECK(r.coverage == 1.0);
}

TEST_CASE("nodal gradient of a linear function") {
  const auto g = DomainGrid::build(Domain::rectangle(Vec2(0, 0), Vec2(1, 1)), 0.125);
  const auto u = sample(g, [](const Vec2& x) { return 3 * x(0) - 2 * x(1); });
  const auto grad = nodal_gradient(g, u);
  // Only nodes whose cells avoid the zero exterior see the exact gradient.
  for (auto i : g.inner_region(0.2)) {
    CHECK(grad(i, 0) == doctest::Approx(3.0));
    CHECK(grad(i, 1) == doctest::Approx(-2.0));
  }
}

TEST_CASE("boundary trace of the exact ball profile") {
  const auto g = DomainGrid::build(Domain::interval(-1, 1), 1.0 / 512);
  for (double s : {0.3, 0.5, 0.7}) {
    const auto p = quotient_profile(g, ball_profile(g, s), s);
    REQUIRE(p.trace.size() == 2);
    for (double t : p.trace) CHECK(t == doctest::Approx(std::pow(2.0, s)).epsilon(1e-3));
    CHECK(p.converged);
  }
}

TEST_CASE("boundary trace of the discrete ball solution") {
  const double s = 0.5;
  const auto grid = std::make_shared<const DomainGrid>(DomainGrid::build(Domain::interval(-1, 1), 1.0 / 512));
  const auto mats = assemble(SpectralMeasure::fractional_laplacian(1, s), grid);
  const Eigen::VectorXd u = solve_dirichlet(mats, Eigen::VectorXd::Ones(mats.size()));
  const auto p = quotient_profile(*grid, u, s);
  for (double t : p.trace) CHECK(t == doctest::Approx(std::sqrt(2.0) / ball_constant(s)).epsilon(1e-3));
}

TEST_CASE("default rho ladder") {
  for (double h : {1.0 / 32, 1.0 / 256}) {
    const auto g = DomainGrid::build(Domain::interval(-1, 1), h);
    const auto rho = default_rho_ladder(g);
    CHECK(rho.size() >= 3);
    for (std::size_t i = 0; i < rho.size(); ++i) {
      CHECK(rho[i] >= 4 * h * (1 - 1e-12));
      if (i > 0) CHECK(rho[i] == doctest::Approx(0.5 * rho[i - 1]));
    }
  }
}

TEST_CASE("seminorm scans on the ball profile") {
  const double s = 0.5;
  const auto g = DomainGrid::build(Domain::interval(-1, 1), 1.0 / 1024);
  const auto u = ball_profile(g, s);
  const auto rho = default_rho_ladder(g);
  // beta = 0.8 > s: the seminorm grows like rho^{s - beta}.
  const auto a = seminorm_scan(g, u, s, 0.8, rho);
  CHECK(a.expected_slope == doctest::Approx(-0.3));
  CHECK(a.ok);
  CHECK(a.slope == doctest::Approx(-0.3).epsilon(0.5));
  // u / delta^s = (2 - delta)^s is smooth, so its seminorm stays bounded.
  const auto b = quotient_scan(g, u, s, 0.3, 0.5, rho);
  CHECK(b.ok);
  CHECK(std::abs(b.slope) < 0.1);
  const auto both = hypothesis_scan(g, u, s, 0.3, 0.8, 0.5, rho);
  CHECK(both.a.slope == doctest::Approx(a.slope));
  CHECK(both.b.slope == doctest::Approx(b.slope));
}

TEST_CASE("seminorm scan of an interior bump is flat") {
  const auto g = DomainGrid::build(Domain::interval(-1, 1), 1.0 / 512);
  const auto u = sample(g, [](const Vec2& x) {
    const double r = 2 * x(0);
    return std::abs(r) < 1 ? std::exp(-1 / (1 - r * r)) : 0.0;
  });
  const auto scan = seminorm_scan(g, u, 0.5, 0.9, default_rho_ladder(g));
  CHECK(std::abs(scan.slope) < 0.05);
}

TEST_CASE("Pohozaev identity for the ball profile") {
  const auto g = DomainGrid::build(Domain::interval(-1, 1), 1.0 / 512);
  for (double s : {0.3, 0.7}) {
    const auto u = ball_profile(g, s);
    const Eigen::VectorXd lu = Eigen::VectorXd::Constant(g.size(), ball_constant(s));
    const auto r = pohozaev_residual(SpectralMeasure::fractional_laplacian(1, s), g, u, lu);
    CHECK(r.residual < 5e-3);
    CHECK(r.rhs == doctest::Approx(r.interior + r.boundary));
  }
  CHECK_THROWS_AS(pohozaev_residual(SpectralMeasure::one_dimensional(0.5, 0.8, 0.8, 1.0), g,
                                    ball_profile(g, 0.5), Eigen::VectorXd::Ones(g.size())),
                  ValidationError);
}
