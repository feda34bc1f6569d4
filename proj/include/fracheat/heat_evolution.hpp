#pragma once

#include "fracheat/spectral_solver.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <vector>

namespace fracheat {

/// u(x, t) = sum_k u_k phi_k(x) exp(-lambda_k t) over the computed eigenpairs.
struct HeatSolution {
  std::shared_ptr<const EigenSystem> eig;
  Eigen::VectorXd coefficients;  ///< u_k = phi_k^T M u0
  Eigen::VectorXd initial;
  double initial_norm = 0.0;     ///< (u0^T M u0)^{1/2}

  std::size_t truncation() const { return static_cast<std::size_t>(coefficients.size()); }
  /// ||u0||^2 - sum u_k^2, nonnegative up to roundoff; zero when every
  /// eigenpair was computed.
  double bessel_defect() const;
};

HeatSolution project(std::shared_ptr<const EigenSystem> eig, const Eigen::VectorXd& u0);

/// Node values of u(., t).  Throws ValidationError for t < 0.
Eigen::VectorXd evaluate(const HeatSolution& sol, double t);

/// d^j/dt^j u(., t) = (-1)^j sum_k lambda_k^j u_k phi_k exp(-lambda_k t), with
/// each weight formed as exp(j log lambda_k - lambda_k t).
Eigen::VectorXd time_derivative(const HeatSolution& sol, int j, double t);

/// ||u(., t)||_M for each t.  Throws ValidationError unless t is increasing.
std::vector<double> l2_decay(const HeatSolution& sol, const std::vector<double>& t);

/// First k (1-based) such that lambda_j lies in [C0 j^gamma / 2, 3 C0 j^gamma / 2]
/// for j = k .. k + run - 1, or 0 if there is none.
int find_k0(const Eigen::VectorXd& lambda, double c0, double gamma, int run = 10);

struct TailBound {
  double t0 = 0.0;
  int w = 0;
  double gamma = 0.0;  ///< 2s/n
  double beta = 0.0;   ///< w + n/(2s) - 1
  int k0 = 0;
  double c0 = 0.0;
  double bound = 0.0;
  /// sum_{k0 <= k <= k_max} lambda_k^w exp(-lambda_k t0) over all computed
  /// eigenvalues (k_max = their count); a lower bound for the infinite tail.
  double direct_sum = 0.0;
  int k_max = 0;
  /// Every computed lambda_k with k >= k0 lies inside the envelope band.
  bool envelope_ok = false;
  bool dominates = false;  ///< bound >= direct_sum
};

/// (3/2)^w C0^w 2^{beta+1} / (gamma C0^{beta+1} t0^{beta+1})
///   * Gamma(beta + 1, C0 t0 k0^gamma / 2).
/// k0 = 0 gives the complete gamma function.
double tail_bound_value(double c0, int n, double s, int w, double t0, int k0);

/// Bound plus the direct sum over `lambda` (ascending, lambda(0) = lambda_1).
/// k0 < 0 picks find_k0 and throws NumericalError when no index qualifies.
TailBound tail_bound(const Eigen::VectorXd& lambda, double c0, int n, double s, int w, double t0,
                     int k0 = -1);

struct UniformBoundRow {
  double t = 0.0;
  double l2 = 0.0;
  double cs_monitor = 0.0;        ///< [u(., t)]_{C^s}, zero extension through the boundary
  double quotient_monitor = 0.0;  ///< [u / delta^s]_{C^{s - eps}} on Omega_{8h}
};

struct UniformBoundAudit {
  double t0 = 0.0;
  double eps = 0.0;
  std::vector<UniformBoundRow> rows;  ///< t = t0, 2 t0, 4 t0, ...
  bool cs_max_at_t0 = false;
  bool quotient_max_at_t0 = false;
  double c1 = 0.0;  ///< cs monitor at t0 over ||u0||
  double c2 = 0.0;  ///< quotient monitor at t0 over ||u0||
};

UniformBoundAudit uniform_bound_audit(const HeatSolution& sol, double t0, double eps,
                                      int samples = 6, std::uint64_t seed = 0);

struct BlowupFit {
  std::vector<double> t0;
  std::vector<double> c1;
  std::vector<double> c2;
  double exponent_c1 = 0.0;  ///< -slope of log C1 against log t0
  double exponent_c2 = 0.0;
  double predicted = 0.0;    ///< w + n/(2s)
  bool within = false;       ///< both exponents <= predicted + 0.5
};

/// Implied constants at each t0 (descending sweep recommended) and the fitted
/// blow-up orders.
BlowupFit blowup_fit(const HeatSolution& sol, const std::vector<double>& t0, double eps, int w,
                     std::uint64_t seed = 0);

}  // namespace fracheat
