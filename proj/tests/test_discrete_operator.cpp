#include "fracheat/discrete_operator.hpp"
#include "fracheat/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>

using namespace fracheat;
using std::numbers::pi;

namespace {

std::shared_ptr<const DomainGrid> interval_grid(double h) {
  return std::make_shared<const DomainGrid>(DomainGrid::build(Domain::interval(-1, 1), h));
}

// L (1 - |x|^2)_+^s for the operator with symbol |xi|^{2s} in dimension n.
double ball_constant(int n, double s) {
  return std::pow(4.0, s) * std::tgamma(1 + s) * std::tgamma(0.5 * n + s) / std::tgamma(0.5 * n);
}

// K_k at s = 1/2, 1D fractional Laplacian, any h: (LPhi)(k) for Phi = M4, from
// the fourth difference of m^2 log|m| / (2 pi).
double toeplitz_half(int k) {
  static const int binom[5] = {1, 4, 6, 4, 1};
  double sum = 0.0;
  for (int j = 0; j <= 4; ++j) {
    const double m = std::abs(k + 2 - j);
    if (m > 0) sum += (j % 2 ? -1 : 1) * binom[j] * m * m * std::log(m);
  }
  return sum / (2 * pi);
}

}  // namespace

TEST_CASE("normalization makes the symbol exact") {
  // kappa_{1/2} = 2 int (1 - cos t) t^{-2} dt = pi.
  CHECK(operator_normalization(0.5) == doctest::Approx(1 / pi).epsilon(1e-12));
  // kappa_s = -2 Gamma(-2s) cos(pi s) = pi / (Gamma(1 + 2s) sin(pi s)).
  for (double s : {0.2, 0.7}) {
    const double kappa = pi / (std::tgamma(1 + 2 * s) * std::sin(pi * s));
    CHECK(operator_normalization(s) == doctest::Approx(1 / kappa).epsilon(1e-10));
  }
}

TEST_CASE("pointwise operator on the ball profile") {
  for (double s : {0.3, 0.5, 0.7}) {
    const auto m = SpectralMeasure::fractional_laplacian(1, s);
    const DomainFunction u(Domain::interval(-1, 1),
                           [s](const Vec2& x) { return std::pow(1 - x(0) * x(0), s); });
    for (double x : {0.0, 0.45, -0.8}) {
      const auto r = apply_pointwise(m, u, Vec2(x, 0));
      CHECK(r.converged);
      CHECK(r.value == doctest::Approx(ball_constant(1, s)).epsilon(1e-7));
    }
  }
  const double s = 0.4;
  const auto m2 = SpectralMeasure::fractional_laplacian(2, s);
  const DomainFunction u2(Domain::disk(Vec2::Zero(), 1.0),
                          [s](const Vec2& x) { return std::pow(1 - x.squaredNorm(), s); });
  for (const Vec2& x : {Vec2(0, 0), Vec2(0.3, -0.4)}) {
    const auto r = apply_pointwise(m2, u2, x);
    CHECK(r.value == doctest::Approx(ball_constant(2, s)).epsilon(1e-5));
  }
}

TEST_CASE("stiffness matches the closed-form Toeplitz row") {
  const auto m = SpectralMeasure::fractional_laplacian(1, 0.5);
  for (double h : {1.0 / 8, 1.0 / 64}) {
    const auto mats = assemble(m, interval_grid(h));
    const double diag = mats.stiffness(0, 0);
    CHECK(diag == doctest::Approx(toeplitz_half(0)).epsilon(1e-9));
    for (int k = 1; k < static_cast<int>(mats.size()); ++k)
      CHECK(std::abs(mats.stiffness(0, k) - toeplitz_half(k)) <= 1e-9 * diag);
  }
  CHECK(stiffness_entry(m, 0.25, 3, 0) == doctest::Approx(toeplitz_half(3)).epsilon(1e-9));
}

TEST_CASE("stiffness reproduces the stored reference row") {
  std::ifstream in(std::string(FRACHEAT_TEST_DATA) + "/stiffness_s0.5_h2-6.csv");
  REQUIRE(in.good());
  const auto mats = assemble(SpectralMeasure::fractional_laplacian(1, 0.5), interval_grid(1.0 / 64));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    int k;
    char comma;
    double v;
    ss >> k >> comma >> v;
    CHECK(std::abs(mats.stiffness(0, k) - v) <= 1e-10 * mats.stiffness(0, 0));
    ++rows;
  }
  CHECK(rows == static_cast<int>(mats.size()));
}

TEST_CASE("stiffness scales like h^{n - 2s}") {
  const auto m = SpectralMeasure::fractional_laplacian(1, 0.3);
  const double a = stiffness_entry(m, 0.1, 2, 0), b = stiffness_entry(m, 0.05, 2, 0);
  CHECK(a / b == doctest::Approx(std::pow(2.0, 1 - 0.6)).epsilon(1e-9));
}

TEST_CASE("assembled matrices are symmetric positive definite") {
  const auto m = SpectralMeasure::planar(0.6, {{0.0, 2 * pi, 1.0}}, 1.0);
  const auto grid =
      std::make_shared<const DomainGrid>(DomainGrid::build(Domain::disk(Vec2::Zero(), 1.0), 0.25));
  const auto mats = assemble(m, grid);
  CHECK(mats.symmetry_defect <= 1e-10);
  CHECK((mats.stiffness - mats.stiffness.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(Eigen::LLT<Eigen::MatrixXd>(mats.stiffness).info() == Eigen::Success);
  CHECK(mats.mass.sum() == doctest::Approx(grid->lattice_volume()).epsilon(0.2));

  const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(mats.size(), -1, 2);
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(mats.size());
  CHECK(energy(mats, u, v) == doctest::Approx(energy(mats, v, u)).epsilon(1e-12));
  CHECK(energy(mats, u, u) > 0);
}

TEST_CASE("non-elliptic measures are rejected") {
  const auto grid =
      std::make_shared<const DomainGrid>(DomainGrid::build(Domain::disk(Vec2::Zero(), 1.0), 0.25));
  CHECK_THROWS_AS(assemble(SpectralMeasure::planar(0.5, {{0.0, 2 * pi, 0.0}}, 1.0), grid),
                  ValidationError);
}

TEST_CASE("mass type names") {
  CHECK(parse_mass_type("lumped") == MassType::Lumped);
  CHECK(to_string(parse_mass_type(to_string(MassType::Consistent))) == "consistent");
  CHECK_THROWS_AS(parse_mass_type("diagonal-ish"), ValidationError);
}

TEST_CASE("Dirichlet solver: zero data, maximum principle, inverse") {
  const auto mats = assemble(SpectralMeasure::one_dimensional(0.4, 0.6, 0.6, 1.0), interval_grid(1.0 / 32));
  const DirichletSolver solver(mats);
  CHECK(solver.solve(Eigen::VectorXd::Zero(mats.size())).cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd g = Eigen::VectorXd::Zero(mats.size());
  g.segment(10, 5).setOnes();
  const Eigen::VectorXd u = solver.solve(g);
  CHECK(u.minCoeff() >= -1e-12);
  CHECK((solver.apply(u) - g).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("Dirichlet solve converges to the ball solution") {
  const double s = 0.5;
  const auto m = SpectralMeasure::fractional_laplacian(1, s);
  double previous = 0.0;
  for (int p : {6, 7, 8}) {
    const auto grid = interval_grid(std::ldexp(1.0, -p));
    const auto mats = assemble(m, grid);
    const Eigen::VectorXd u = solve_dirichlet(mats, Eigen::VectorXd::Ones(mats.size()));
    const Eigen::VectorXd exact =
        sample(*grid, [s](const Vec2& x) { return std::pow(1 - x(0) * x(0), s); }) / ball_constant(1, s);
    const double err = (u - exact).cwiseAbs().maxCoeff() / exact.maxCoeff();
    CHECK(err < 0.05);
    if (previous > 0) CHECK(previous / err >= 1.3);
    previous = err;
  }
}
