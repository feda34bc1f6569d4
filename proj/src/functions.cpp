#include "fracheat/functions.hpp"

#include "fracheat/errors.hpp"

#include <cmath>

namespace fracheat {

namespace {

// r > 0 with origin + r * dir hitting the lattice line origin_k + m * spacing,
// for m in [m_lo, m_hi].
void lattice_crossings(double x, double d, double origin, double spacing, int m_lo,
                       int m_hi, std::vector<double>& out) {
  if (d == 0.0) return;
  for (int m = m_lo; m <= m_hi; ++m) {
    const double r = (origin + m * spacing - x) / d;
    if (r > 0.0) out.push_back(r);
  }
}

}  // namespace

void DomainFunction::ray_breaks(const Vec2& x, const Vec2& dir,
                                std::vector<double>& out) const {
  const auto crossings = domain_.ray_crossings(x, dir);
  out.insert(out.end(), crossings.begin(), crossings.end());
}

GridFunction::GridFunction(std::shared_ptr<const DomainGrid> grid, Eigen::VectorXd values)
    : GridFunction(*grid, std::move(values)) {
  owner_ = std::move(grid);
}

GridFunction::GridFunction(const DomainGrid& grid, Eigen::VectorXd values)
    : grid_(&grid), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_->size())
    throw ValidationError("grid function size does not match the grid");
}

double GridFunction::nodal(int i, int j) const {
  const long k = grid_->find(i, j);
  return k < 0 ? 0.0 : values_(k);
}

double GridFunction::value(const Vec2& x) const {
  const double h = grid_->spacing();
  const Vec2 t = (x - grid_->origin()) / h;
  const int i = static_cast<int>(std::floor(t(0)));
  const double fx = t(0) - i;
  if (dim() == 1) return (1.0 - fx) * nodal(i, 0) + fx * nodal(i + 1, 0);
  const int j = static_cast<int>(std::floor(t(1)));
  const double fy = t(1) - j;
  return (1.0 - fx) * (1.0 - fy) * nodal(i, j) + fx * (1.0 - fy) * nodal(i + 1, j) +
         (1.0 - fx) * fy * nodal(i, j + 1) + fx * fy * nodal(i + 1, j + 1);
}

Vec2 GridFunction::gradient(const Vec2& x) const {
  const double h = grid_->spacing();
  const Vec2 t = (x - grid_->origin()) / h;
  const int i = static_cast<int>(std::floor(t(0)));
  const double fx = t(0) - i;
  if (dim() == 1) return Vec2((nodal(i + 1, 0) - nodal(i, 0)) / h, 0.0);
  const int j = static_cast<int>(std::floor(t(1)));
  const double fy = t(1) - j;
  const double v00 = nodal(i, j), v10 = nodal(i + 1, j);
  const double v01 = nodal(i, j + 1), v11 = nodal(i + 1, j + 1);
  return Vec2(((1.0 - fy) * (v10 - v00) + fy * (v11 - v01)) / h,
              ((1.0 - fx) * (v01 - v00) + fx * (v11 - v10)) / h);
}

void GridFunction::ray_breaks(const Vec2& x, const Vec2& dir,
                              std::vector<double>& out) const {
  const auto& dom = grid_->domain();
  const double h = grid_->spacing();
  for (int k = 0; k < dim(); ++k) {
    const int m_lo = static_cast<int>(std::floor((dom.lower()(k) - grid_->origin()(k)) / h)) - 1;
    const int m_hi = static_cast<int>(std::ceil((dom.upper()(k) - grid_->origin()(k)) / h)) + 1;
    lattice_crossings(x(k), dir(k), grid_->origin()(k), h, m_lo, m_hi, out);
  }
}

double GridFunction::reach(const Vec2& x) const {
  return grid_->domain().farthest_distance(x) + 2.0 * grid_->spacing();
}

double cubic_bspline(double t) {
  const double a = std::abs(t);
  if (a < 1.0) return 2.0 / 3.0 - a * a + 0.5 * a * a * a;
  if (a < 2.0) {
    const double b = 2.0 - a;
    return b * b * b / 6.0;
  }
  return 0.0;
}

double HatAutocorrelation::value(const Vec2& x) const {
  double v = h_ * cubic_bspline(x(0) / h_);
  if (n_ == 2) v *= h_ * cubic_bspline(x(1) / h_);
  return v;
}

void HatAutocorrelation::ray_breaks(const Vec2& x, const Vec2& dir,
                                    std::vector<double>& out) const {
  for (int k = 0; k < n_; ++k) lattice_crossings(x(k), dir(k), 0.0, h_, -2, 2, out);
}

double HatAutocorrelation::reach(const Vec2& x) const {
  if (n_ == 1) return std::abs(x(0)) + 2.0 * h_;
  return x.norm() + 2.0 * std::sqrt(2.0) * h_;
}

Eigen::VectorXd sample(const DomainGrid& grid, const std::function<double(const Vec2&)>& f) {
  Eigen::VectorXd v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v(i) = f(grid.node(i));
  return v;
}

}  // namespace fracheat
