#pragma once

#include "fracheat/domain_grid.hpp"
#include "fracheat/functions.hpp"
#include "fracheat/quadrature.hpp"
#include "fracheat/stable_kernel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <memory>
#include <string>

namespace fracheat {

/// 1 / kappa_s with kappa_s = 2 int_0^inf (1 - cos t) t^{-1-2s} dt.  This is
/// the factor in front of the singular integral that makes the symbol of
/// L exactly A(xi).
double operator_normalization(double s);

struct QuadratureOptions {
  double near_field_radius = 0.0;  ///< extra radial split r0 (0: none)
  double far_field_radius = 0.0;   ///< radius R_far of the analytic tail (at least the support reach)
  int radial_order = 16;           ///< Gauss-Jacobi points on the singular piece
  int angular_order = 8;           ///< Gauss-Legendre points per angular panel (n = 2)
  int angular_panels = 32;         ///< panels over [0, pi) (n = 2)
  double tolerance = 1e-10;        ///< relative tolerance of adaptive pieces
};

struct PointwiseResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// Evaluates
///   L u(x) = (1/kappa_s) int (2u(x) - u(x+y) - u(x-y)) a(y/|y|) |y|^{-n-2s} dy
/// for compactly supported u by radial quadrature along directions theta.
///
/// Along each ray the integral splits at every break reported by u.  The
/// piece touching the origin uses Gauss-Jacobi with weight r^{1-2s} applied to
/// D(r)/r^2, which is smooth when u is C^2 near x.  The remaining
/// pieces use adaptive Gauss-Kronrod, and r > R_far contributes exactly
/// 2u(x) R^{-2s}/(2s).  u must be bounded and C^2 near x.
class PointwiseOperator {
 public:
  explicit PointwiseOperator(SpectralMeasure measure, QuadratureOptions options = {});

  const SpectralMeasure& measure() const { return measure_; }
  const QuadratureOptions& options() const { return options_; }

  PointwiseResult apply(const CompactFunction& u, const Vec2& x) const;

  /// int_0^inf D(r) r^{-1-2s} dr with D(r) = 2u(x) - u(x + r dir) - u(x - r dir).
  PointwiseResult radial(const CompactFunction& u, const Vec2& x, const Vec2& dir) const;

 private:
  struct Direction {
    Vec2 dir;
    double weight;
  };

  SpectralMeasure measure_;
  QuadratureOptions options_;
  double normalization_;
  QuadratureRule jacobi_;       // Gauss-Jacobi on [-1, 1], weight (1 + x)^{1-2s}
  QuadratureRule jacobi_half_;  // lower order for the error estimate
  std::vector<Direction> directions_;
};

PointwiseResult apply_pointwise(const SpectralMeasure& measure, const CompactFunction& u,
                                const Vec2& x, const QuadratureOptions& options = {});

enum class MassType { Consistent, Lumped };

MassType parse_mass_type(const std::string& name);
std::string to_string(MassType type);

struct AssemblyOptions {
  QuadratureOptions quadrature;
  MassType mass = MassType::Consistent;
  /// 2D offsets with max(|di|, |dj|) <= near_offsets use the polar pointwise
  /// rule; farther ones integrate the smooth convolution form directly.
  int near_offsets = 5;
  int far_order = 4;  ///< Gauss points per direction per sub-cell (far field)
  int threads = 1;
  double symmetry_tolerance = 1e-10;
};

/// Galerkin matrices on the hat basis of a DomainGrid with zero exterior
/// values.  stiffness(i, j) = B(hat_i, hat_j) = int hat_i L hat_j.
struct OperatorMatrices {
  SpectralMeasure measure;
  std::shared_ptr<const DomainGrid> grid;
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd mass;
  MassType mass_type = MassType::Consistent;
  double symmetry_defect = 0.0;
  bool converged = true;  ///< all pointwise entries met the quadrature tolerance

  std::size_t size() const { return static_cast<std::size_t>(stiffness.rows()); }
};

/// Assembles K and M.  On the uniform lattice K_ij depends only on the lattice
/// offset, so only the distinct offsets are integrated.  Throws ValidationError
/// if the measure is not elliptic and NumericalError if K fails the symmetry
/// check.
OperatorMatrices assemble(const SpectralMeasure& measure,
                          std::shared_ptr<const DomainGrid> grid,
                          const AssemblyOptions& options = {});

/// Stiffness value for lattice offset (di, dj), i.e. (L Phi)(h (di, dj)) with
/// Phi the hat autocorrelation.
double stiffness_entry(const SpectralMeasure& measure, double h, int di, int dj,
                       const AssemblyOptions& options = {});

/// B(u, v) = v^T K u.
double energy(const OperatorMatrices& matrices, const Eigen::VectorXd& u,
              const Eigen::VectorXd& v);

/// Cholesky-factored Dirichlet problem K u = M g.
class DirichletSolver {
 public:
  explicit DirichletSolver(const OperatorMatrices& matrices);

  Eigen::VectorXd solve(const Eigen::VectorXd& g) const;
  /// Discrete L u = M^{-1} K u.
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

 private:
  const OperatorMatrices* matrices_;
  Eigen::LLT<Eigen::MatrixXd> stiffness_llt_;
  Eigen::LLT<Eigen::MatrixXd> mass_llt_;
};

Eigen::VectorXd solve_dirichlet(const OperatorMatrices& matrices, const Eigen::VectorXd& g);

/// Writes the nonzero entries as "row,col,value" lines.
void write_triplets_csv(const Eigen::MatrixXd& matrix, const std::string& path);

}  // namespace fracheat
