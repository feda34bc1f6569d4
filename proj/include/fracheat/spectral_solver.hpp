#pragma once

#include "fracheat/discrete_operator.hpp"
#include "fracheat/stable_kernel.hpp"

#include <Eigen/Core>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fracheat {

/// The m lowest Dirichlet eigenpairs K phi = lambda M phi, M-orthonormal and
/// sign-normalized (first significant component positive).
struct EigenSystem {
  std::shared_ptr<const OperatorMatrices> matrices;
  Eigen::VectorXd values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< one eigenvector per column
  double max_residual = 0.0;       ///< max_k |K phi - lambda M phi| / |K phi|
  double orthonormality_defect = 0.0;  ///< max |Phi^T M Phi - I|

  std::size_t count() const { return static_cast<std::size_t>(values.size()); }
  const DomainGrid& grid() const { return *matrices->grid; }
};

/// Dense generalized symmetric eigensolve.  Throws ValidationError if m
/// exceeds the node count and NumericalError if the solver fails or the
/// residual/orthonormality checks exceed 1e-8.
EigenSystem eigenpairs(std::shared_ptr<const OperatorMatrices> matrices, std::size_t m);

struct WeylRow {
  int k = 0;
  double lambda = 0.0;
  double ratio = 0.0;  ///< lambda_k k^{-2s/n}
};

struct WeylAudit {
  int k_lo = 0;
  int k_hi = 0;
  std::vector<WeylRow> rows;
  double median = 0.0;
  double relative_error = 0.0;  ///< |median - C0| / C0
  double drift = 0.0;  ///< (max - min) of the ratio over the window, relative to the median
  double c0 = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool sandwich_ok = false;
  bool sandwich_equality = false;  ///< lower == upper (isotropic n = 1)
  /// The ratio still moves by more than 5% across the last quarter of the
  /// window: the top of the range is discretization-dominated.
  bool discretization_warning = false;
};

/// Audits lambda_k k^{-2s/n} against the Weyl constant.  The default window is
/// [m/3, 5m/6].
WeylAudit weyl_audit(const EigenSystem& eig, const WeylConstant& weyl,
                     std::optional<std::pair<int, int>> k_range = std::nullopt);

struct SupNormRow {
  int k = 0;
  double lambda = 0.0;
  double sup = 0.0;  ///< max node |phi_k|
  double l2 = 0.0;   ///< (phi_k^T M phi_k)^{1/2}
  double ratio = 0.0;  ///< sup / l2
  double implied_constant = 0.0;  ///< ratio / lambda^{w-1}
};

struct SupNormAudit {
  int w = 0;
  std::vector<SupNormRow> rows;
  double slope = 0.0;      ///< least-squares slope of log ratio against log lambda
  double intercept = 0.0;
  double implied_constant = 0.0;  ///< max over k
  bool slope_ok = false;   ///< slope <= w - 1 + 0.1
  bool lower_bound_ok = false;  ///< ratio >= |Omega|^{-1/2} for every k
};

SupNormAudit sup_norm_audit(const EigenSystem& eig, int w);

enum class BootstrapBranch { Subcritical, Critical, Supercritical };

std::string to_string(BootstrapBranch branch);

/// Exponent sequence p_0 = 2, p_{k+1} = n p_k / (n - 2 p_k s), iterated in
/// exact rational arithmetic until n <= 2 p_N s.  w = N + 2 if p_N > n/2s,
/// w = N + 3 if p_N = n/2s.
struct BootstrapPlan {
  int n = 0;
  std::string s;                      ///< exact rational, "num/den"
  BootstrapBranch branch = BootstrapBranch::Subcritical;
  std::vector<std::string> exponents;  ///< p_0 .. p_N as exact rationals
  std::vector<double> exponent_values;
  std::string critical_exponent;       ///< n / 2s
  int steps = 0;                       ///< N
  int w = 0;
  bool reduction = false;  ///< n <= 2s: only n = 1, s >= 1/2; p = 2 applies directly
};

/// s as a double is converted to the nearest rational with denominator at
/// most 10^6 (to 1e-12); use the string overload for exact input such as "2/5"
/// or "0.4".
BootstrapPlan bootstrap_exponents(int n, double s);
BootstrapPlan bootstrap_exponents(int n, const std::string& s);

}  // namespace fracheat
