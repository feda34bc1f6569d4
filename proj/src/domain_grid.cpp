#include "fracheat/domain_grid.hpp"

#include "fracheat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fracheat {

Domain Domain::interval(double a, double b) {
  if (!(b > a)) throw ValidationError("interval requires a < b");
  Domain d;
  d.shape_ = Shape::Interval;
  d.lower_ = Vec2(a, 0.0);
  d.upper_ = Vec2(b, 0.0);
  d.center_ = Vec2(0.5 * (a + b), 0.0);
  d.radius_ = 0.5 * (b - a);
  return d;
}

Domain Domain::disk(const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw ValidationError("disk radius must be positive");
  Domain d;
  d.shape_ = Shape::Disk;
  d.center_ = center;
  d.radius_ = radius;
  d.lower_ = center - Vec2(radius, radius);
  d.upper_ = center + Vec2(radius, radius);
  return d;
}

Domain Domain::rectangle(const Vec2& lower, const Vec2& upper) {
  if (!(upper(0) > lower(0) && upper(1) > lower(1)))
    throw ValidationError("rectangle requires lower < upper componentwise");
  Domain d;
  d.shape_ = Shape::Rectangle;
  d.lower_ = lower;
  d.upper_ = upper;
  d.center_ = 0.5 * (lower + upper);
  d.radius_ = 0.5 * (upper - lower).norm();
  return d;
}

double Domain::volume() const {
  switch (shape_) {
    case Shape::Interval: return upper_(0) - lower_(0);
    case Shape::Disk: return std::numbers::pi * radius_ * radius_;
    case Shape::Rectangle: return (upper_(0) - lower_(0)) * (upper_(1) - lower_(1));
  }
  return 0.0;
}

double Domain::diameter() const {
  switch (shape_) {
    case Shape::Interval: return upper_(0) - lower_(0);
    case Shape::Disk: return 2.0 * radius_;
    case Shape::Rectangle: return (upper_ - lower_).norm();
  }
  return 0.0;
}

std::string Domain::advisory() const {
  if (shape_ == Shape::Rectangle) return "corners: Lipschitz only";
  return "";
}

bool Domain::contains(const Vec2& x) const {
  switch (shape_) {
    case Shape::Interval: return x(0) > lower_(0) && x(0) < upper_(0);
    case Shape::Disk: return (x - center_).squaredNorm() < radius_ * radius_;
    case Shape::Rectangle:
      return x(0) > lower_(0) && x(0) < upper_(0) && x(1) > lower_(1) && x(1) < upper_(1);
  }
  return false;
}

double Domain::distance(const Vec2& x) const {
  if (!contains(x)) return 0.0;
  switch (shape_) {
    case Shape::Interval: return std::min(x(0) - lower_(0), upper_(0) - x(0));
    case Shape::Disk: return radius_ - (x - center_).norm();
    case Shape::Rectangle:
      return std::min({x(0) - lower_(0), upper_(0) - x(0), x(1) - lower_(1),
                       upper_(1) - x(1)});
  }
  return 0.0;
}

std::vector<double> Domain::ray_crossings(const Vec2& x, const Vec2& dir) const {
  std::vector<double> out;
  auto keep = [&out](double r) {
    if (r > 0.0 && std::isfinite(r)) out.push_back(r);
  };
  switch (shape_) {
    case Shape::Interval: {
      const double d = dir(0);
      if (d == 0.0) break;
      keep((lower_(0) - x(0)) / d);
      keep((upper_(0) - x(0)) / d);
      break;
    }
    case Shape::Disk: {
      const Vec2 p = x - center_;
      const double b = p.dot(dir);
      const double c = p.squaredNorm() - radius_ * radius_;
      const double disc = b * b - c * dir.squaredNorm();
      if (disc <= 0.0) break;
      const double root = std::sqrt(disc);
      const double dd = dir.squaredNorm();
      keep((-b - root) / dd);
      keep((-b + root) / dd);
      break;
    }
    case Shape::Rectangle: {
      double t_enter = -std::numeric_limits<double>::infinity();
      double t_exit = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 2; ++k) {
        if (dir(k) == 0.0) {
          if (x(k) <= lower_(k) || x(k) >= upper_(k)) return out;
          continue;
        }
        double t1 = (lower_(k) - x(k)) / dir(k);
        double t2 = (upper_(k) - x(k)) / dir(k);
        if (t1 > t2) std::swap(t1, t2);
        t_enter = std::max(t_enter, t1);
        t_exit = std::min(t_exit, t2);
      }
      if (t_enter < t_exit) {
        keep(t_enter);
        keep(t_exit);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double Domain::farthest_distance(const Vec2& x) const {
  switch (shape_) {
    case Shape::Interval:
      return std::max(std::abs(x(0) - lower_(0)), std::abs(x(0) - upper_(0)));
    case Shape::Disk: return (x - center_).norm() + radius_;
    case Shape::Rectangle: {
      double best = 0.0;
      for (double cx : {lower_(0), upper_(0)})
        for (double cy : {lower_(1), upper_(1)}) best = std::max(best, (x - Vec2(cx, cy)).norm());
      return best;
    }
  }
  return 0.0;
}

Domain Domain::translated(const Vec2& shift) const {
  Domain d = *this;
  Vec2 sh = shift;
  if (shape_ == Shape::Interval) sh(1) = 0.0;
  d.lower_ += sh;
  d.upper_ += sh;
  d.center_ += sh;
  return d;
}

BoundaryQuadrature boundary_quadrature(const Domain& domain, double h) {
  BoundaryQuadrature q;
  switch (domain.shape()) {
    case Shape::Interval:
      q.points = {domain.lower(), domain.upper()};
      q.normals = {Vec2(-1.0, 0.0), Vec2(1.0, 0.0)};
      q.weights = {1.0, 1.0};
      break;
    case Shape::Disk: {
      const double r = domain.radius();
      const int m = std::max(16, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / h)));
      for (int k = 0; k < m; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / m;
        const Vec2 nu(std::cos(phi), std::sin(phi));
        q.points.push_back(domain.center() + r * nu);
        q.normals.push_back(nu);
        q.weights.push_back(2.0 * std::numbers::pi * r / m);
      }
      break;
    }
    case Shape::Rectangle: {
      const Vec2 lo = domain.lower();
      const Vec2 hi = domain.upper();
      const std::array<Vec2, 4> corners{lo, Vec2(hi(0), lo(1)), hi, Vec2(lo(0), hi(1))};
      const std::array<Vec2, 4> normals{Vec2(0, -1), Vec2(1, 0), Vec2(0, 1), Vec2(-1, 0)};
      for (int e = 0; e < 4; ++e) {
        const Vec2 a = corners[e];
        const Vec2 b = corners[(e + 1) % 4];
        const double len = (b - a).norm();
        const int m = std::max(1, static_cast<int>(std::ceil(len / h)));
        for (int k = 0; k < m; ++k) {
          q.points.push_back(a + (k + 0.5) / m * (b - a));
          q.normals.push_back(normals[e]);
          q.weights.push_back(len / m);
        }
      }
      break;
    }
  }
  return q;
}

DomainGrid DomainGrid::build(const Domain& domain, double h) {
  if (!(h > 0.0)) throw ValidationError("grid spacing must be positive");
  if (!(h <= domain.diameter() / 4.0)) {
    std::ostringstream os;
    os << "grid spacing " << h << " must not exceed diameter/4 = " << domain.diameter() / 4.0;
    throw ValidationError(os.str());
  }
  DomainGrid grid(domain);
  grid.h_ = h;
  switch (domain.shape()) {
    case Shape::Interval:
    case Shape::Rectangle: grid.origin_ = domain.lower(); break;
    case Shape::Disk: grid.origin_ = domain.center(); break;
  }
  const int n = domain.dim();
  const double eps = 1e-9 * h;
  std::array<int, 2> lo{0, 0}, hi{0, 0};
  for (int k = 0; k < n; ++k) {
    lo[k] = static_cast<int>(std::floor((domain.lower()(k) - grid.origin_(k)) / h)) - 1;
    hi[k] = static_cast<int>(std::ceil((domain.upper()(k) - grid.origin_(k)) / h)) + 1;
  }
  grid.lo_ = lo;
  grid.extent_ = {hi[0] - lo[0] + 1, n == 2 ? hi[1] - lo[1] + 1 : 1};
  grid.lookup_.assign(static_cast<std::size_t>(grid.extent_[0]) * grid.extent_[1], -1);

  for (int j = lo[1]; j <= hi[1]; ++j) {
    for (int i = lo[0]; i <= hi[0]; ++i) {
      Vec2 x = grid.origin_ + h * Vec2(i, n == 2 ? j : 0);
      if (n == 1) x(1) = 0.0;
      if (!domain.contains(x)) continue;
      const double d = domain.distance(x);
      if (d <= eps) continue;
      grid.lookup_[static_cast<std::size_t>(j - lo[1]) * grid.extent_[0] + (i - lo[0])] =
          static_cast<long>(grid.nodes_.size());
      grid.nodes_.push_back(x);
      grid.delta_.push_back(d);
      grid.lattice_.push_back({i, n == 2 ? j : 0});
    }
  }
  if (grid.nodes_.empty()) throw ValidationError("grid has no interior nodes");
  grid.boundary_ = boundary_quadrature(domain, h);
  return grid;
}

long DomainGrid::find(int i, int j) const {
  const int ii = i - lo_[0];
  const int jj = j - lo_[1];
  if (ii < 0 || jj < 0 || ii >= extent_[0] || jj >= extent_[1]) return -1;
  return lookup_[static_cast<std::size_t>(jj) * extent_[0] + ii];
}

std::vector<std::size_t> DomainGrid::inner_region(double rho) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (delta_[i] >= rho) out.push_back(i);
  }
  return out;
}

double DomainGrid::max_delta() const {
  return *std::max_element(delta_.begin(), delta_.end());
}

double DomainGrid::lattice_volume() const {
  return static_cast<double>(nodes_.size()) * std::pow(h_, dim());
}

}  // namespace fracheat
