#include "fracheat/errors.hpp"
#include "fracheat/spectral_solver.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

using namespace fracheat;
using std::numbers::pi;

namespace {

std::shared_ptr<const OperatorMatrices> interval_matrices(double s, double h) {
  const auto grid = std::make_shared<const DomainGrid>(DomainGrid::build(Domain::interval(-1, 1), h));
  return std::make_shared<const OperatorMatrices>(assemble(SpectralMeasure::fractional_laplacian(1, s), grid));
}

}  // namespace

TEST_CASE("eigenpairs are M-orthonormal with small residual") {
  const auto eig = eigenpairs(interval_matrices(0.5, 1.0 / 64), 40);
  CHECK(eig.count() == 40);
  CHECK(eig.max_residual <= 1e-8);
  CHECK(eig.orthonormality_defect <= 1e-8);
  const auto& K = eig.matrices->stiffness;
  const auto& M = eig.matrices->mass;
  const Eigen::MatrixXd gram = eig.vectors.transpose() * M * eig.vectors;
  CHECK((gram - Eigen::MatrixXd::Identity(40, 40)).cwiseAbs().maxCoeff() <= 1e-10);
  for (int k = 0; k < 40; ++k) {
    const Eigen::VectorXd r = K * eig.vectors.col(k) - eig.values(k) * M * eig.vectors.col(k);
    CHECK(r.norm() <= 1e-9 * (K * eig.vectors.col(k)).norm());
    if (k > 0) CHECK(eig.values(k) >= eig.values(k - 1));
  }
  // First eigenfunction of a positivity-preserving operator has one sign.
  CHECK(eig.vectors.col(0).minCoeff() > -1e-12);
  CHECK_THROWS_AS(eigenpairs(interval_matrices(0.5, 0.25), 10), ValidationError);
}

TEST_CASE("Galerkin eigenvalues decrease under refinement") {
  const auto coarse = eigenpairs(interval_matrices(0.4, 1.0 / 16), 10);
  const auto fine = eigenpairs(interval_matrices(0.4, 1.0 / 32), 10);
  for (int k = 0; k < 10; ++k) CHECK(coarse.values(k) >= fine.values(k) * (1 - 1e-12));
}

TEST_CASE("first eigenvalue at s = 1/2 on (-1, 1)") {
  // Known value of the half-Laplacian on the unit interval: 1.1577738836977.
  const auto eig = eigenpairs(interval_matrices(0.5, 1.0 / 256), 1);
  CHECK(eig.values(0) == doctest::Approx(1.1577738836977).epsilon(2e-3));
}

TEST_CASE("Weyl audit on the interval") {
  const auto eig = eigenpairs(interval_matrices(0.5, 1.0 / 128), 120);
  const SymbolProfile profile(SpectralMeasure::fractional_laplacian(1, 0.5));
  const auto weyl = weyl_constant(profile, 2.0, 0, 1);
  const auto audit = weyl_audit(eig, weyl, std::pair{10, 40});
  CHECK(audit.k_lo == 10);
  CHECK(audit.k_hi == 40);
  CHECK(audit.c0 == doctest::Approx(pi / 2));
  CHECK(audit.sandwich_equality);
  CHECK(audit.relative_error < 0.05);
  const auto whole = weyl_audit(eig, weyl);
  CHECK(whole.k_lo == 40);
  CHECK(whole.k_hi == 100);
}

TEST_CASE("sup-norm audit") {
  const auto eig = eigenpairs(interval_matrices(0.5, 1.0 / 128), 40);
  const auto audit = sup_norm_audit(eig, 3);
  CHECK(audit.rows.size() == 40);
  CHECK(audit.slope_ok);
  CHECK(audit.lower_bound_ok);
  for (const auto& row : audit.rows) CHECK(row.l2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("bootstrap exponent sequences") {
  // n = 1, s = 1/4: p_0 = 2 = n/2s, critical, no steps.
  CHECK(bootstrap_exponents(1, 0.25).w == 3);
  CHECK(bootstrap_exponents(1, 0.25).branch == BootstrapBranch::Critical);
  CHECK(bootstrap_exponents(1, 0.3).w == 2);
  CHECK(bootstrap_exponents(1, 0.3).branch == BootstrapBranch::Subcritical);
  CHECK(bootstrap_exponents(1, 0.5).w == 2);
  CHECK(bootstrap_exponents(1, 0.5).reduction);
  // n = 2, s = 2/5: 2 -> 10 > 5/2.
  const auto q = bootstrap_exponents(2, 0.4);
  CHECK(q.exponents == std::vector<std::string>{"2", "10"});
  CHECK(q.w == 3);
  CHECK(bootstrap_exponents(2, 0.5).w == 3);

  // n = 2, s = 1/4: 2 -> 4 = n/2s exactly.
  const auto p = bootstrap_exponents(2, "1/4");
  CHECK(p.s == "1/4");
  CHECK(p.exponents == std::vector<std::string>{"2", "4"});
  CHECK(p.critical_exponent == "4");
  CHECK(p.steps == 1);
  CHECK(p.w == 4);
  CHECK(p.branch == BootstrapBranch::Supercritical);

  const auto a = bootstrap_exponents(2, "0.4"), b = bootstrap_exponents(2, 0.4);
  CHECK(a.s == b.s);
  CHECK(a.exponents == b.exponents);
  CHECK(a.w == b.w);
  CHECK_THROWS_AS(bootstrap_exponents(2, "1/0"), ValidationError);
  CHECK_THROWS_AS(bootstrap_exponents(2, 1.5), ValidationError);
}
