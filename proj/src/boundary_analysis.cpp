#include "fracheat/boundary_analysis.hpp"

#include "fracheat/errors.hpp"
#include "fracheat/functions.hpp"
#include "fracheat/random.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>

namespace fracheat {

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  return denom > 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

double pair_ratio(const std::vector<Vec2>& points, const Eigen::MatrixXd& values,
                  std::size_t i, std::size_t j, double beta) {
  const double dist = (points[i] - points[j]).norm();
  if (dist == 0.0) return 0.0;
  return (values.row(i) - values.row(j)).norm() / std::pow(dist, beta);
}

double trace_window(const DomainGrid& grid, const TraceOptions& options) {
  if (options.window > 0.0) return options.window;
  const double h = grid.spacing();
  const double L = grid.max_delta();
  return std::min(std::max(24.0 * h, std::cbrt(h * L * L)), 0.5 * L);
}

// Least-squares fit of q over delta = j h in [lo, hi]; returns the constant
// term.  Basis: 1, delta, delta^2, the h/delta and (h/delta)^2 layer terms,
// and with `boundary_power` the delta^{2s} term of solutions whose right-hand
// side itself vanishes like delta^s (delta log delta when 2s = 1).  With too
// few samples the model drops to t + a delta.
double fit_trace(const std::function<double(double)>& q, double h, double lo, double hi,
                 double s, bool boundary_power) {
  std::vector<double> deltas;
  for (int j = static_cast<int>(std::ceil(lo / h)); j * h <= hi * (1.0 + 1e-12); ++j)
    deltas.push_back(j * h);
  if (deltas.size() < 2) deltas = {lo, hi};
  std::vector<std::function<double(double)>> basis{[](double) { return 1.0; },
                                                   [hi](double d) { return d / hi; }};
  const bool resonant = std::abs(2.0 * s - 1.0) < 1e-12;
  if (deltas.size() >= 14) {
    basis.push_back([hi](double d) { return (d / hi) * (d / hi); });
    basis.push_back([h](double d) { return h / d; });
    basis.push_back([h](double d) { return (h / d) * (h / d); });
    if (boundary_power) {
      if (resonant)
        basis.push_back([hi](double d) { return (d / hi) * std::log(d / hi); });
      else
        basis.push_back([hi, s](double d) { return std::pow(d / hi, 2.0 * s); });
    }
  }
  Eigen::MatrixXd A(deltas.size(), basis.size());
  Eigen::VectorXd b(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (std::size_t k = 0; k < basis.size(); ++k)
      A(row, static_cast<Eigen::Index>(k)) = basis[k](deltas[i]);
    b(row) = q(deltas[i]);
  }
  return A.colPivHouseholderQr().solve(b)(0);
}

}  // namespace

Seminorm holder_seminorm(const std::vector<Vec2>& points, const Eigen::MatrixXd& values,
                         double beta, std::uint64_t seed) {
  if (points.size() < 2) throw ValidationError("seminorm needs at least two points");
  if (static_cast<std::size_t>(values.rows()) != points.size())
    throw ValidationError("seminorm values do not match the points");
  if (!(beta > 0.0 && beta <= 1.0)) throw ValidationError("seminorm order must lie in (0, 1]");
  const std::size_t n = points.size();
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  Seminorm out;
  if (n <= kExhaustiveSeminormPoints || total <= kSampledSeminormPairs) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        out.value = std::max(out.value, pair_ratio(points, values, i, j, beta));
    out.pairs = total;
    return out;
  }
  // Neighbor pairs carry the blow-up near the boundary, so they are always
  // included; the remaining budget samples random pairs.
  for (std::size_t i = 0; i + 1 < n; ++i)
    out.value = std::max(out.value, pair_ratio(points, values, i, i + 1, beta));
  out.pairs = n - 1;
  Rng rng(seed);
  for (; out.pairs < kSampledSeminormPairs; ++out.pairs) {
    const auto i = static_cast<std::size_t>(rng.next() % n);
    const auto j = static_cast<std::size_t>(rng.next() % n);
    out.value = std::max(out.value, pair_ratio(points, values, i, j, beta));
  }
  out.coverage = static_cast<double>(out.pairs) / static_cast<double>(total);
  return out;
}

Seminorm holder_seminorm(const DomainGrid& grid, const Eigen::VectorXd& f,
                         const std::vector<std::size_t>& region, double beta,
                         std::uint64_t seed) {
  std::vector<Vec2> pts;
  Eigen::MatrixXd vals(region.size(), 1);
  for (std::size_t k = 0; k < region.size(); ++k) {
    pts.push_back(grid.node(region[k]));
    vals(static_cast<Eigen::Index>(k), 0) = f(static_cast<Eigen::Index>(region[k]));
  }
  return holder_seminorm(pts, vals, beta, seed);
}

Eigen::MatrixXd nodal_gradient(const DomainGrid& grid, const Eigen::VectorXd& u) {
  const GridFunction f(grid, u);
  const int n = grid.dim();
  const double h = grid.spacing();
  Eigen::MatrixXd grad(grid.size(), n);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec2& x = grid.node(i);
    Vec2 g = Vec2::Zero();
    int cells = 0;
    for (int a : {-1, 1})
      for (int b : (n == 2 ? std::vector<int>{-1, 1} : std::vector<int>{0})) {
        g += f.gradient(x + 0.5 * h * Vec2(a, b));
        ++cells;
      }
    grad.row(static_cast<Eigen::Index>(i)) = (g / cells).head(n).transpose();
  }
  return grad;
}

BoundaryProfile quotient_profile(const DomainGrid& grid, const Eigen::VectorXd& u, double s,
                                 const TraceOptions& options) {
  if (static_cast<std::size_t>(u.size()) != grid.size())
    throw ValidationError("grid function size does not match the grid");
  BoundaryProfile profile;
  profile.s = s;
  profile.quotient.resize(u.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    profile.quotient(static_cast<Eigen::Index>(i)) =
        u(static_cast<Eigen::Index>(i)) / std::pow(grid.delta()[i], s);

  const GridFunction f(grid, u);
  const double h = grid.spacing();
  const double H = trace_window(grid, options);
  profile.window = H;
  const auto& bq = grid.boundary();
  double scale = 0.0;
  for (std::size_t k = 0; k < bq.size(); ++k) {
    const Vec2 p = bq.points[k];
    const Vec2 inward = -bq.normals[k];
    auto q = [&](double d) { return f(p + d * inward) / std::pow(d, s); };
    const double t1 = fit_trace(q, h, 8.0 * h, H, s, options.boundary_power);
    const double t2 = fit_trace(q, h, 12.0 * h, std::min(1.5 * H, grid.max_delta()), s, options.boundary_power);
    profile.boundary_points.push_back(p);
    profile.normals.push_back(bq.normals[k]);
    profile.weights.push_back(bq.weights[k]);
    profile.trace.push_back(t1);
    profile.trace_alt.push_back(t2);
    profile.uncertainty.push_back(std::abs(t1 - t2));
    scale = std::max(scale, std::abs(t1));
  }
  for (double e : profile.uncertainty)
    if (e > options.tolerance * scale + 1e-300) profile.converged = false;
  return profile;
}

std::vector<double> default_rho_ladder(const DomainGrid& grid) {
  const double h = grid.spacing();
  const double top = grid.max_delta();
  std::vector<double> rho;
  for (double r = top / 64.0; r >= 4.0 * h * (1.0 - 1e-12); r *= 0.5) rho.push_back(r);
  // Coarse grids: grow the ladder upward until it has three rungs.
  if (rho.empty() && 4.0 * h < top) rho.push_back(4.0 * h);
  double r = rho.empty() ? top : rho.front();
  while (rho.size() < 3 && 2.0 * r < top) {
    r *= 2.0;
    rho.insert(rho.begin(), r);
  }
  return rho;
}

namespace {

SeminormScan scan_values(const DomainGrid& grid, const Eigen::VectorXd& f, double beta,
                         double expected, const std::vector<double>& rho, std::uint64_t seed) {
  if (rho.size() < 2) throw ValidationError("seminorm scan needs at least two radii");
  SeminormScan scan;
  scan.beta = beta;
  scan.expected_slope = expected;
  scan.rho = rho;
  const Eigen::MatrixXd grad = beta > 1.0 ? nodal_gradient(grid, f) : Eigen::MatrixXd();
  for (double r : rho) {
    const auto region = grid.inner_region(r);
    if (region.size() < 2) throw ValidationError("inner region has fewer than two nodes");
    if (beta <= 1.0) {
      scan.seminorm.push_back(holder_seminorm(grid, f, region, beta, seed).value);
    } else {
      std::vector<Vec2> pts;
      Eigen::MatrixXd vals(region.size(), grad.cols());
      for (std::size_t k = 0; k < region.size(); ++k) {
        pts.push_back(grid.node(region[k]));
        vals.row(static_cast<Eigen::Index>(k)) = grad.row(static_cast<Eigen::Index>(region[k]));
      }
      scan.seminorm.push_back(holder_seminorm(pts, vals, beta - 1.0, seed).value);
    }
  }
  for (std::size_t k = 0; k + 1 < rho.size(); ++k) {
    // Omega_rho grows as rho shrinks.
    const bool larger_region = rho[k + 1] < rho[k];
    const double a = scan.seminorm[k], b = scan.seminorm[k + 1];
    if (larger_region ? b < a * (1.0 - 1e-12) : a < b * (1.0 - 1e-12)) scan.monotone = false;
  }
  const bool positive = std::all_of(scan.seminorm.begin(), scan.seminorm.end(),
                                    [](double v) { return v > 0.0; });
  scan.slope = positive ? fit_slope(scan.rho, scan.seminorm) : 0.0;
  scan.ok = scan.slope >= expected - 0.15;
  return scan;
}

}  // namespace

SeminormScan seminorm_scan(const DomainGrid& grid, const Eigen::VectorXd& u, double s,
                           double beta, const std::vector<double>& rho, std::uint64_t seed) {
  return scan_values(grid, u, beta, s - beta, rho, seed);
}

SeminormScan quotient_scan(const DomainGrid& grid, const Eigen::VectorXd& u, double s,
                           double alpha, double beta, const std::vector<double>& rho,
                           std::uint64_t seed) {
  Eigen::VectorXd q(u.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    q(static_cast<Eigen::Index>(i)) = u(static_cast<Eigen::Index>(i)) / std::pow(grid.delta()[i], s);
  return scan_values(grid, q, beta, alpha - beta, rho, seed);
}

HypothesisScan hypothesis_scan(const DomainGrid& grid, const Eigen::VectorXd& u, double s,
                               double alpha, double beta_a, double beta_b,
                               const std::vector<double>& rho, std::uint64_t seed) {
  if (beta_a < s || beta_a >= 1.0 + 2.0 * s)
    throw ValidationError("beta for the u scan must lie in [s, 1 + 2s)");
  if (beta_b < alpha || beta_b > s + alpha)
    throw ValidationError("beta for the quotient scan must lie in [alpha, s + alpha]");
  return {seminorm_scan(grid, u, s, beta_a, rho, seed),
          quotient_scan(grid, u, s, alpha, beta_b, rho, seed)};
}

PohozaevResult pohozaev_residual(const SpectralMeasure& measure, const DomainGrid& grid,
                                 const Eigen::VectorXd& u, const Eigen::VectorXd& lu,
                                 const Vec2& origin, const TraceOptions& options) {
  if (!measure.is_fractional_laplacian())
    throw ValidationError("the Pohozaev identity is implemented for the fractional Laplacian only");
  if (measure.dim() != grid.dim()) throw ValidationError("measure and grid dimensions differ");
  if (static_cast<std::size_t>(u.size()) != grid.size() ||
      static_cast<std::size_t>(lu.size()) != grid.size())
    throw ValidationError("grid function size does not match the grid");

  const int n = grid.dim();
  const double s = measure.order();
  const double h = grid.spacing();
  const GridFunction f(grid, u);
  PohozaevResult out;

  // Cells with at least one interior node; Lu on a cell is the mean over its
  // interior corners, and (x - o) . grad u_h is integrated exactly.
  const double g = 0.5 / std::sqrt(3.0);
  const std::vector<double> gauss{0.5 - g, 0.5 + g};  // 2-point rule on [0, 1], weights 1/2
  const std::vector<double> gauss_y = n == 2 ? gauss : std::vector<double>{0.0};
  const double weight = n == 2 ? 0.25 : 0.5;
  std::vector<std::array<int, 2>> cells;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& l = grid.lattice_index(i);
    for (int a : {-1, 0})
      for (int b : (n == 2 ? std::vector<int>{-1, 0} : std::vector<int>{0}))
        cells.push_back({l[0] + a, l[1] + b});
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  for (const auto& c : cells) {
    double lsum = 0.0;
    int count = 0;
    for (int a : {0, 1})
      for (int b : (n == 2 ? std::vector<int>{0, 1} : std::vector<int>{0})) {
        const long j = grid.find(c[0] + a, c[1] + b);
        if (j >= 0) {
          lsum += lu(j);
          ++count;
        }
      }
    if (count == 0) continue;
    const Vec2 corner = grid.origin() + h * Vec2(c[0], n == 2 ? c[1] : 0);
    double integral = 0.0;
    for (double gx : gauss)
      for (double gy : gauss_y) {
        const Vec2 x = corner + h * Vec2(gx, gy);
        integral += weight * (x - origin).head(n).dot(f.gradient(x).head(n));
      }
    out.lhs += std::pow(h, n) * integral * lsum / count;
  }

  out.interior = 0.5 * (2.0 * s - n) * std::pow(h, n) * u.dot(lu);

  const auto profile = quotient_profile(grid, u, s, options);
  const double gamma = std::tgamma(1.0 + s);
  for (std::size_t k = 0; k < profile.trace.size(); ++k) {
    const Vec2 r = profile.boundary_points[k] - origin;
    const double xn = r.head(n).dot(profile.normals[k].head(n));
    out.boundary -= 0.5 * gamma * gamma * profile.weights[k] * profile.trace[k] *
                    profile.trace[k] * xn;
    out.trace_uncertainty = std::max(out.trace_uncertainty, profile.uncertainty[k]);
  }
  out.rhs = out.interior + out.boundary;
  const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.residual = scale > 0.0 ? std::abs(out.lhs - out.rhs) / scale : 0.0;
  return out;
}

}  // namespace fracheat
