#pragma once

#include "fracheat/stable_kernel.hpp"

#include <array>
#include <string>
#include <vector>

namespace fracheat {

enum class Shape { Interval, Disk, Rectangle };

/// A bounded domain: interval (n = 1), disk or axis-aligned rectangle (n = 2).
/// Points are stored as Vec2; the second coordinate is ignored when n = 1.
class Domain {
 public:
  static Domain interval(double a, double b);
  static Domain disk(const Vec2& center, double radius);
  static Domain rectangle(const Vec2& lower, const Vec2& upper);

  Shape shape() const { return shape_; }
  int dim() const { return shape_ == Shape::Interval ? 1 : 2; }
  double volume() const;
  double diameter() const;
  /// False for the rectangle: its corners are only Lipschitz, so boundary
  /// diagnostics there are advisory.
  bool is_c11() const { return shape_ != Shape::Rectangle; }
  std::string advisory() const;

  const Vec2& lower() const { return lower_; }
  const Vec2& upper() const { return upper_; }
  const Vec2& center() const { return center_; }
  double radius() const { return radius_; }

  bool contains(const Vec2& x) const;
  /// dist(x, boundary) for x inside, 0 outside.
  double distance(const Vec2& x) const;
  /// Distances r > 0 at which x + r dir crosses the boundary, ascending.
  std::vector<double> ray_crossings(const Vec2& x, const Vec2& dir) const;
  /// Largest |y - x| over y in the closed domain.
  double farthest_distance(const Vec2& x) const;

  Domain translated(const Vec2& shift) const;

 private:
  Domain() = default;

  Shape shape_ = Shape::Interval;
  Vec2 lower_ = Vec2::Zero();
  Vec2 upper_ = Vec2::Zero();
  Vec2 center_ = Vec2::Zero();
  double radius_ = 0.0;
};

/// Quadrature on the boundary with outward unit normals.
struct BoundaryQuadrature {
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Nodes of the uniform lattice strictly inside a domain.
///
/// The lattice is anchored at the interval's left end, the disk center or the
/// rectangle's lower corner, and nodes are ordered lexicographically (y
/// outer, x inner).
class DomainGrid {
 public:
  static DomainGrid build(const Domain& domain, double h);

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }
  double spacing() const { return h_; }
  std::size_t size() const { return nodes_.size(); }

  const std::vector<Vec2>& nodes() const { return nodes_; }
  const Vec2& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<double>& delta() const { return delta_; }
  /// Integer lattice coordinates of node i.
  const std::array<int, 2>& lattice_index(std::size_t i) const { return lattice_[i]; }
  const Vec2& origin() const { return origin_; }
  /// Node index at lattice coordinates, or -1 if not an interior node.
  long find(int i, int j = 0) const;

  /// Indices of nodes with delta >= rho, ascending.
  std::vector<std::size_t> inner_region(double rho) const;
  double max_delta() const;

  const BoundaryQuadrature& boundary() const { return boundary_; }
  /// Quadrature volume: node count times h^n.
  double lattice_volume() const;

 private:
  DomainGrid(Domain domain) : domain_(std::move(domain)) {}

  Domain domain_;
  double h_ = 0.0;
  Vec2 origin_ = Vec2::Zero();
  std::array<int, 2> lo_{0, 0};
  std::array<int, 2> extent_{0, 0};
  std::vector<Vec2> nodes_;
  std::vector<double> delta_;
  std::vector<std::array<int, 2>> lattice_;
  std::vector<long> lookup_;
  BoundaryQuadrature boundary_;
};

BoundaryQuadrature boundary_quadrature(const Domain& domain, double h);

}  // namespace fracheat
