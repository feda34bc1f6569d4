#include "fracheat/domain_grid.hpp"
#include "fracheat/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fracheat;
using std::numbers::pi;

TEST_CASE("interval grid") {
  const auto g = DomainGrid::build(Domain::interval(-1, 1), 0.5);
  REQUIRE(g.size() == 3);
  CHECK(g.node(0)(0) == doctest::Approx(-0.5));
  CHECK(g.node(1)(0) == doctest::Approx(0.0));
  CHECK(g.node(2)(0) == doctest::Approx(0.5));
  CHECK(g.delta()[0] == doctest::Approx(0.5));
  CHECK(g.delta()[1] == doctest::Approx(1.0));
  CHECK(g.delta()[2] == doctest::Approx(0.5));
  CHECK(g.inner_region(0.6) == std::vector<std::size_t>{1});
  CHECK(g.inner_region(0.0).size() == 3);
}

TEST_CASE("inner regions select by threshold and nest") {
  const auto g = DomainGrid::build(Domain::interval(-1, 1), 0.25);
  const auto r = g.inner_region(0.5);
  REQUIRE(r.size() == 5);
  CHECK(g.node(r.front())(0) == doctest::Approx(-0.5));
  CHECK(g.node(r.back())(0) == doctest::Approx(0.5));
  const auto d = DomainGrid::build(Domain::disk(Vec2::Zero(), 1.0), 1.0 / 16);
  std::size_t previous = d.size() + 1;
  for (double rho : {0.0, 0.1, 0.3, 0.6, 0.9}) {
    const auto sub = d.inner_region(rho);
    CHECK(sub.size() <= previous);
    previous = sub.size();
    for (auto i : sub) CHECK(d.delta()[i] >= rho);
  }
}

TEST_CASE("disk grid") {
  const auto g = DomainGrid::build(Domain::disk(Vec2::Zero(), 1.0), 0.5);
  CHECK(g.size() == 9);  // lattice points with |x| < 1
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.node(i).norm() < 1.0);
    CHECK(g.delta()[i] == doctest::Approx(1.0 - g.node(i).norm()));
  }
  // Center is a node, so Omega_R holds exactly the center.
  const auto center = g.inner_region(1.0);
  REQUIRE(center.size() == 1);
  CHECK(g.node(center[0]).norm() == doctest::Approx(0.0));
  // The lattice is anchored at the disk center.
  const auto shifted = DomainGrid::build(Domain::disk(Vec2(0.25, 0.25), 1.0), 0.5);
  REQUIRE(shifted.inner_region(1.0).size() == 1);
  CHECK((shifted.node(shifted.inner_region(1.0)[0]) - Vec2(0.25, 0.25)).norm() < 1e-14);
}

TEST_CASE("rectangle grid and advisory") {
  const auto dom = Domain::rectangle(Vec2(0, 0), Vec2(2, 1));
  CHECK_FALSE(dom.is_c11());
  CHECK_FALSE(dom.advisory().empty());
  const auto g = DomainGrid::build(dom, 0.25);
  CHECK(g.size() == 7 * 3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec2 x = g.node(i);
    CHECK(g.delta()[i] == doctest::Approx(std::min({x(0), 2 - x(0), x(1), 1 - x(1)})));
  }
}

TEST_CASE("lattice ordering is lexicographic, y outer") {
  const auto g = DomainGrid::build(Domain::rectangle(Vec2(0, 0), Vec2(1, 1)), 0.25);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const auto a = g.node(i), b = g.node(i + 1);
    CHECK((a(1) < b(1) || (a(1) == b(1) && a(0) < b(0))));
  }
}

TEST_CASE("boundary quadrature satisfies the divergence theorem") {
  for (const auto& dom : {Domain::interval(-1, 1), Domain::disk(Vec2(0.3, -0.2), 1.0),
                          Domain::rectangle(Vec2(0, 0), Vec2(2, 1))}) {
    const auto g = DomainGrid::build(dom, dom.diameter() / 64);
    const auto& bq = g.boundary();
    double flux = 0.0;
    for (std::size_t k = 0; k < bq.size(); ++k)
      flux += bq.weights[k] * (bq.points[k] - dom.center()).dot(bq.normals[k]);
    CHECK(std::abs(flux - dom.dim() * dom.volume()) <= 0.01 * dom.dim() * dom.volume());
  }
}

TEST_CASE("lattice volume approaches the domain volume") {
  const auto dom = Domain::disk(Vec2::Zero(), 1.0);
  double previous = 1.0;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    const auto g = DomainGrid::build(dom, h);
    const double err = std::abs(g.lattice_volume() - pi) / pi;
    CHECK(err < 4 * h);
    previous = err;
  }
  CHECK(previous < 0.05);
}

TEST_CASE("build rejects bad spacing") {
  CHECK_THROWS_AS(DomainGrid::build(Domain::interval(-1, 1), 0.0), ValidationError);
  CHECK_THROWS_AS(DomainGrid::build(Domain::interval(-1, 1), 1.5), ValidationError);
  CHECK_THROWS_AS(Domain::interval(1, -1), ValidationError);
  CHECK_THROWS_AS(Domain::disk(Vec2::Zero(), -1.0), ValidationError);
}
