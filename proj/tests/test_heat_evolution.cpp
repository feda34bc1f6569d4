#include "fracheat/errors.hpp"
#include "fracheat/heat_evolution.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

using namespace fracheat;
using std::numbers::pi;

namespace {

std::shared_ptr<const EigenSystem> full_system(double s, double h) {
  const auto grid = std::make_shared<const DomainGrid>(DomainGrid::build(Domain::interval(-1, 1), h));
  const auto mats =
      std::make_shared<const OperatorMatrices>(assemble(SpectralMeasure::fractional_laplacian(1, s), grid));
  return std::make_shared<const EigenSystem>(eigenpairs(mats, mats->size()));
}

Eigen::VectorXd bump(const DomainGrid& grid) {
  return sample(grid, [](const Vec2& x) { return std::pow(std::cos(0.5 * pi * x(0)), 2) + 0.3 * x(0); });
}

}  // namespace

TEST_CASE("projection reproduces the initial datum") {
  const auto eig = full_system(0.5, 1.0 / 32);
  const auto sol = project(eig, bump(eig->grid()));
  CHECK(sol.truncation() == eig->count());
  CHECK(std::abs(sol.bessel_defect()) <= 1e-12 * sol.initial_norm * sol.initial_norm);
  CHECK((evaluate(sol, 0.0) - sol.initial).cwiseAbs().maxCoeff() <= 1e-11);
  CHECK_THROWS_AS(evaluate(sol, -1.0), ValidationError);
}

TEST_CASE("time derivative satisfies the semidiscrete equation") {
  const auto eig = full_system(0.3, 1.0 / 32);
  const auto sol = project(eig, bump(eig->grid()));
  const DirichletSolver solver(*eig->matrices);
  for (double t : {0.01, 0.2}) {
    const Eigen::VectorXd u = evaluate(sol, t);
    const Eigen::VectorXd du = time_derivative(sol, 1, t);
    CHECK((du + solver.apply(u)).cwiseAbs().maxCoeff() <= 1e-9 * du.cwiseAbs().maxCoeff());
    // Second derivative against a centered difference of the first.
    const double dt = 1e-5;
    const Eigen::VectorXd fd = (time_derivative(sol, 1, t + dt) - time_derivative(sol, 1, t - dt)) / (2 * dt);
    const Eigen::VectorXd d2 = time_derivative(sol, 2, t);
    CHECK((fd - d2).cwiseAbs().maxCoeff() <= 1e-5 * d2.cwiseAbs().maxCoeff());
  }
  CHECK((time_derivative(sol, 0, 0.1) - evaluate(sol, 0.1)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("L2 norm decays at the first eigenvalue") {
  const auto eig = full_system(0.5, 1.0 / 32);
  const auto sol = project(eig, bump(eig->grid()));
  const auto n = l2_decay(sol, {0.0, 4.0, 5.0});
  CHECK(n[0] == doctest::Approx(sol.initial_norm));
  CHECK(n[1] <= n[0]);
  CHECK(std::log(n[2] / n[1]) == doctest::Approx(-eig->values(0)).epsilon(1e-3));
  CHECK_THROWS_AS(l2_decay(sol, {1.0, 0.5}), ValidationError);
}

TEST_CASE("find_k0 on a synthetic spectrum") {
  Eigen::VectorXd lambda(30);
  for (int k = 1; k <= 30; ++k) lambda(k - 1) = 2.0 * std::pow(k, 0.8);
  CHECK(find_k0(lambda, 2.0, 0.8) == 1);
  lambda(0) = 10.0;
  CHECK(find_k0(lambda, 2.0, 0.8) == 2);
  CHECK(find_k0(lambda.head(5), 2.0, 0.8) == 0);
}

TEST_CASE("tail bound value scales like t0^{-(w + n/2s)} for small t0") {
  const double a = tail_bound_value(pi / 2, 1, 0.5, 2, 5e-4, 1);
  const double b = tail_bound_value(pi / 2, 1, 0.5, 2, 1e-3, 1);
  CHECK(a / b == doctest::Approx(8.0).epsilon(1e-3));
  // k0 = 0, w = 1, beta = 1: (3/2) 2^2 Gamma(2) = 6.
  CHECK(tail_bound_value(1.0, 1, 0.5, 1, 1.0, 0) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("tail bound dominates the computed tail") {
  const auto eig = full_system(0.5, 1.0 / 64);
  for (double t0 : {0.01, 0.1, 1.0}) {
    const auto tb = tail_bound(eig->values, pi / 2, 1, 0.5, 2, t0);
    CHECK(tb.k0 >= 1);
    CHECK(tb.envelope_ok);
    CHECK(tb.dominates);
    CHECK(tb.bound >= tb.direct_sum);
    CHECK(tb.beta == doctest::Approx(2.0));
  }
  CHECK_THROWS_AS(tail_bound(eig->values, 100.0, 1, 0.5, 2, 0.1), NumericalError);
}

TEST_CASE("uniform bound audit and blow-up fit") {
  const auto eig = full_system(0.5, 1.0 / 64);
  const auto sol = project(eig, bump(eig->grid()));
  const auto audit = uniform_bound_audit(sol, 0.01, 0.05, 5, 3);
  REQUIRE(audit.rows.size() == 5);
  CHECK(audit.rows[1].t == doctest::Approx(0.02));
  CHECK(audit.cs_max_at_t0);
  CHECK(audit.quotient_max_at_t0);
  for (std::size_t i = 1; i < audit.rows.size(); ++i) CHECK(audit.rows[i].l2 <= audit.rows[i - 1].l2);

  const auto fit = blowup_fit(sol, {0.04, 0.02, 0.01}, 0.05, 2, 3);
  CHECK(fit.predicted == doctest::Approx(3.0));
  CHECK(fit.within);
  CHECK(fit.exponent_c1 <= fit.predicted + 0.5);
}
