#pragma once

#include "fracheat/domain_grid.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <vector>

namespace fracheat {

/// A function on R^n with compact support, evaluated pointwise.
///
/// Besides values, it reports where it stops being smooth along rays, so
/// radial quadratures can split there, and how far its support reaches.
class CompactFunction {
 public:
  virtual ~CompactFunction() = default;

  virtual int dim() const = 0;
  virtual double value(const Vec2& x) const = 0;
  double operator()(const Vec2& x) const { return value(x); }

  /// Appends every r > 0 at which r -> f(x + r dir) may lose smoothness.
  virtual void ray_breaks(const Vec2& x, const Vec2& dir, std::vector<double>& out) const = 0;
  /// An upper bound of |y - x| over the support.
  virtual double reach(const Vec2& x) const = 0;
};

/// A closed-form expression cut off to zero outside a domain.  The expression
/// must be smooth inside the domain; kinks are assumed only at the boundary.
class DomainFunction final : public CompactFunction {
 public:
  DomainFunction(Domain domain, std::function<double(const Vec2&)> expression)
      : domain_(std::move(domain)), expression_(std::move(expression)) {}

  int dim() const override { return domain_.dim(); }
  double value(const Vec2& x) const override {
    return domain_.contains(x) ? expression_(x) : 0.0;
  }
  void ray_breaks(const Vec2& x, const Vec2& dir, std::vector<double>& out) const override;
  double reach(const Vec2& x) const override { return domain_.farthest_distance(x); }

  const Domain& domain() const { return domain_; }

 private:
  Domain domain_;
  std::function<double(const Vec2&)> expression_;
};

/// Piecewise-linear (n = 1) or bilinear (n = 2) interpolant of nodal values on
/// a lattice grid, zero at every lattice point that is not an interior node.
class GridFunction final : public CompactFunction {
 public:
  GridFunction(std::shared_ptr<const DomainGrid> grid, Eigen::VectorXd values);
  /// Non-owning: the grid must outlive the function.
  GridFunction(const DomainGrid& grid, Eigen::VectorXd values);

  int dim() const override { return grid_->dim(); }
  double value(const Vec2& x) const override;
  void ray_breaks(const Vec2& x, const Vec2& dir, std::vector<double>& out) const override;
  double reach(const Vec2& x) const override;

  /// Gradient of the interpolant at x (piecewise constant in 1D).
  Vec2 gradient(const Vec2& x) const;

  const DomainGrid& grid() const { return *grid_; }
  const Eigen::VectorXd& values() const { return values_; }

 private:
  double nodal(int i, int j) const;

  std::shared_ptr<const DomainGrid> owner_;
  const DomainGrid* grid_;
  Eigen::VectorXd values_;
};

/// Centered cardinal cubic B-spline on [-2, 2] with unit integral.
double cubic_bspline(double t);

/// Autocorrelation of the lattice hat function of spacing h:
/// Phi(z) = int hat(w) hat(z - w) dw = h^n prod_k M4(z_k / h).
/// Stiffness entries are L Phi evaluated at node offsets.
class HatAutocorrelation final : public CompactFunction {
 public:
  HatAutocorrelation(int n, double h) : n_(n), h_(h) {}

  int dim() const override { return n_; }
  double value(const Vec2& x) const override;
  void ray_breaks(const Vec2& x, const Vec2& dir, std::vector<double>& out) const override;
  double reach(const Vec2& x) const override;

 private:
  int n_;
  double h_;
};

/// Samples f at the grid nodes.
Eigen::VectorXd sample(const DomainGrid& grid, const std::function<double(const Vec2&)>& f);

}  // namespace fracheat
