#pragma once

#include "fracheat/domain_grid.hpp"
#include "fracheat/stable_kernel.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace fracheat {

struct Seminorm {
  double value = 0.0;
  std::uint64_t pairs = 0;  ///< pairs examined
  double coverage = 1.0;    ///< pairs examined / all pairs
};

/// Pairs scanned exhaustively up to this many points; above it a seeded
/// random subset of pairs is used.
inline constexpr std::size_t kExhaustiveSeminormPoints = 2000;
inline constexpr std::uint64_t kSampledSeminormPairs = 4000000;

/// max |f(x) - f(y)| / |x - y|^beta over pairs of the given points.
/// `values` has one row per point and one column per component (a scalar
/// function has one column; vector differences use the Euclidean norm).
Seminorm holder_seminorm(const std::vector<Vec2>& points, const Eigen::MatrixXd& values,
                         double beta, std::uint64_t seed = 0);

/// Seminorm of a grid function over a node subset.
Seminorm holder_seminorm(const DomainGrid& grid, const Eigen::VectorXd& f,
                         const std::vector<std::size_t>& region, double beta,
                         std::uint64_t seed = 0);

/// Node values of the gradient of the P1/Q1 interpolant (averaged over the
/// cells touching each node), one row per node.
Eigen::MatrixXd nodal_gradient(const DomainGrid& grid, const Eigen::VectorXd& u);

/// The boundary trace of u/delta^s is extrapolated along the inward normal
/// from samples at delta = j h, 8h <= delta <= H, by a least-squares fit of
///   q(delta) = t + a delta + b delta^2 + c delta^{2s} + k1 h/delta + k2 (h/delta)^2
/// (delta log delta in place of delta^{2s} when 2s = 1).  The h/delta terms
/// model the discretization layer of width O(h) next to the boundary, which
/// would otherwise bias any fixed-multiple-of-h stencil by an h-independent
/// amount.  The delta^{2s} term appears when Lu itself vanishes like delta^s at
/// the boundary, as for heat solutions.  A second fit over [12h, 3H/2] gives
/// the uncertainty.
struct TraceOptions {
  /// Upper end H of the fit window; 0 picks min(max(24h, h^{1/3} L^{2/3}), L/2)
  /// with L the largest node distance to the boundary.
  double window = 0.0;
  double tolerance = 0.05;  ///< relative disagreement of the two fits still accepted
  bool boundary_power = true;  ///< include the delta^{2s} term
};

/// u / delta^s at the nodes and its boundary trace.
struct BoundaryProfile {
  double s = 0.0;
  Eigen::VectorXd quotient;
  std::vector<Vec2> boundary_points;
  std::vector<Vec2> normals;
  std::vector<double> weights;
  std::vector<double> trace;        ///< fit over [8h, H]
  std::vector<double> trace_alt;    ///< fit over [12h, 3H/2]
  std::vector<double> uncertainty;  ///< |trace - trace_alt|
  double window = 0.0;
  bool converged = true;
};

BoundaryProfile quotient_profile(const DomainGrid& grid, const Eigen::VectorXd& u, double s,
                                 const TraceOptions& options = {});

struct SeminormScan {
  double beta = 0.0;
  double expected_slope = 0.0;
  std::vector<double> rho;
  std::vector<double> seminorm;
  double slope = 0.0;  ///< least-squares slope of log seminorm against log rho
  bool monotone = true;
  bool ok = false;     ///< slope >= expected - 0.15
};

/// Default ladder rho_j = L/64 * 2^{-j} while rho_j >= 4h (L the largest node
/// distance to the boundary), extended upward by doubling to at least three
/// rungs when the grid is coarse.  The scan slopes are small-rho rates; above
/// L/64 the C^s seminorm of the ball solution has not saturated yet.
std::vector<double> default_rho_ladder(const DomainGrid& grid);

/// [u]_{C^beta(Omega_rho)} for each rho; expected slope s - beta.  beta > 1
/// uses the order (beta - 1) seminorm of the nodal gradient.
SeminormScan seminorm_scan(const DomainGrid& grid, const Eigen::VectorXd& u, double s,
                           double beta, const std::vector<double>& rho,
                           std::uint64_t seed = 0);

/// [u/delta^s]_{C^beta(Omega_rho)}; expected slope alpha - beta.
SeminormScan quotient_scan(const DomainGrid& grid, const Eigen::VectorXd& u, double s,
                           double alpha, double beta, const std::vector<double>& rho,
                           std::uint64_t seed = 0);

struct HypothesisScan {
  SeminormScan a;  ///< u itself
  SeminormScan b;  ///< u / delta^s
};

HypothesisScan hypothesis_scan(const DomainGrid& grid, const Eigen::VectorXd& u, double s,
                               double alpha, double beta_a, double beta_b,
                               const std::vector<double>& rho, std::uint64_t seed = 0);

struct PohozaevResult {
  double lhs = 0.0;       ///< int ((x - o) . grad u) Lu
  double interior = 0.0;  ///< (2s - n)/2 int u Lu
  double boundary = 0.0;  ///< -Gamma(1+s)^2/2 int (u/delta^s)^2 ((x - o) . nu)
  double rhs = 0.0;
  double residual = 0.0;  ///< |lhs - rhs| / max(|lhs|, |rhs|)
  double trace_uncertainty = 0.0;
};

/// Both sides of the Pohozaev identity for the fractional Laplacian with u
/// and Lu given at the nodes.  Throws ValidationError for other measures.
PohozaevResult pohozaev_residual(const SpectralMeasure& measure, const DomainGrid& grid,
                                 const Eigen::VectorXd& u, const Eigen::VectorXd& lu,
                                 const Vec2& origin = Vec2::Zero(),
                                 const TraceOptions& options = {});

}  // namespace fracheat
