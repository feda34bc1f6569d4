#include "fracheat/discrete_operator.hpp"

#include "fracheat/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace fracheat {

namespace {

constexpr double kPi = std::numbers::pi;

// Sorted, deduplicated breaks in (0, limit).
std::vector<double> clean_breaks(std::vector<double> breaks, double limit) {
  const double eps = 1e-13 * limit;
  std::erase_if(breaks, [&](double b) { return !(b > eps && b < limit - eps); });
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> out;
  for (double b : breaks)
    if (out.empty() || b - out.back() > eps) out.push_back(b);
  return out;
}

double wrap_half_turn(double phi) {
  double t = std::fmod(phi, kPi);
  if (t < 0.0) t += kPi;
  return t;
}

// Angular breakpoints in [0, pi] at which the density of the measure jumps.
std::vector<double> density_breaks(const SpectralMeasure& measure) {
  std::vector<double> out{0.0, kPi};
  for (const auto& seg : measure.segments()) {
    if (seg.from > 0.0 && seg.from < kPi) out.push_back(seg.from);
    if (seg.to > 0.0 && seg.to < kPi) out.push_back(seg.to);
  }
  return out;
}

std::vector<double> merge_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double b : v)
    if (out.empty() || b - out.back() > 1e-14) out.push_back(b);
  return out;
}

template <class Job>
void parallel_for(std::size_t count, int threads, const Job& job) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < count; i = next++) job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

double operator_normalization(double s) {
  if (!(s > 0.0 && s < 1.0)) throw ValidationError("order s must lie in (0, 1)");
  return std::tgamma(1.0 + 2.0 * s) * std::sin(kPi * s) / kPi;
}

PointwiseOperator::PointwiseOperator(SpectralMeasure measure, QuadratureOptions options)
    : measure_(std::move(measure)),
      options_(options),
      normalization_(operator_normalization(measure_.order())) {
  if (options_.radial_order < 2) throw ValidationError("radial_order must be at least 2");
  const double s = measure_.order();
  jacobi_ = gauss_jacobi(options_.radial_order, 0.0, 1.0 - 2.0 * s);
  jacobi_half_ = gauss_jacobi(options_.radial_order / 2 + 1, 0.0, 1.0 - 2.0 * s);

  if (measure_.dim() == 1) {
    directions_.push_back({Vec2(1.0, 0.0), measure_.weight_plus() + measure_.weight_minus()});
    return;
  }
  std::vector<double> breaks = density_breaks(measure_);
  for (int k = 1; k < options_.angular_panels; ++k)
    breaks.push_back(kPi * k / options_.angular_panels);
  breaks = merge_sorted(std::move(breaks));
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k], hi = breaks[k + 1];
    const double a = measure_.density(0.5 * (lo + hi));
    if (a == 0.0) continue;
    const auto rule = gauss_legendre(options_.angular_order, lo, hi);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double th = rule.nodes[i];
      directions_.push_back({Vec2(std::cos(th), std::sin(th)), 2.0 * a * rule.weights[i]});
    }
  }
}

PointwiseResult PointwiseOperator::radial(const CompactFunction& u, const Vec2& x,
                                          const Vec2& dir) const {
  const double s = measure_.order();
  const double ux = u(x);
  const double far = std::max(options_.far_field_radius, u.reach(x));

  std::vector<double> raw;
  u.ray_breaks(x, dir, raw);
  u.ray_breaks(x, -dir, raw);
  if (options_.near_field_radius > 0.0) raw.push_back(options_.near_field_radius);
  std::vector<double> pts{0.0};
  for (double b : clean_breaks(std::move(raw), far)) pts.push_back(b);
  pts.push_back(far);

  auto diff = [&](double r) { return 2.0 * ux - u(x + r * dir) - u(x - r * dir); };
  auto integrand = [&](double r) { return diff(r) * std::pow(r, -1.0 - 2.0 * s); };

  PointwiseResult out;
  double scale = 0.0;

  // Singular piece [0, b1/2]: int r^{1-2s} (D(r)/r^2) dr.
  const double a = 0.5 * pts[1];
  auto jacobi_sum = [&](const QuadratureRule& rule) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double r = 0.5 * a * (1.0 + rule.nodes[i]);
      sum += rule.weights[i] * diff(r) / (r * r);
    }
    return std::pow(0.5 * a, 2.0 - 2.0 * s) * sum;
  };
  const double near = jacobi_sum(jacobi_);
  out.value += near;
  out.error += std::abs(near - jacobi_sum(jacobi_half_));
  scale += std::abs(near);

  // A coarse pass over the remaining pieces fixes the absolute tolerance, so
  // pieces whose integrand is pure roundoff are not refined.
  std::vector<std::pair<double, double>> pieces{{a, pts[1]}};
  for (std::size_t k = 1; k + 1 < pts.size(); ++k) pieces.emplace_back(pts[k], pts[k + 1]);
  for (const auto& [lo, hi] : pieces)
    scale += std::abs(integrate_adaptive(integrand, lo, hi, 1.0, nullptr, 0));
  scale += 2.0 * std::abs(ux) * std::pow(far, -2.0 * s) / (2.0 * s);
  const double abs_tol = options_.tolerance * scale / static_cast<double>(pieces.size());
  for (const auto& [lo, hi] : pieces) {
    double err = 0.0;
    out.value += integrate_adaptive(integrand, lo, hi, options_.tolerance, &err, 24, abs_tol);
    out.error += err;
  }

  const double tail = 2.0 * ux * std::pow(far, -2.0 * s) / (2.0 * s);
  out.value += tail;
  out.converged = out.error <= 1e3 * options_.tolerance * std::max(scale, 1e-300);
  return out;
}

PointwiseResult PointwiseOperator::apply(const CompactFunction& u, const Vec2& x) const {
  if (u.dim() != measure_.dim()) throw ValidationError("function and measure dimensions differ");
  PointwiseResult out;
  for (const auto& d : directions_) {
    const auto r = radial(u, x, d.dir);
    out.value += d.weight * r.value;
    out.error += std::abs(d.weight) * r.error;
    out.converged = out.converged && r.converged;
  }
  out.value *= normalization_;
  out.error *= normalization_;
  return out;
}

PointwiseResult apply_pointwise(const SpectralMeasure& measure, const CompactFunction& u,
                                const Vec2& x, const QuadratureOptions& options) {
  return PointwiseOperator(measure, options).apply(u, x);
}

MassType parse_mass_type(const std::string& name) {
  if (name == "consistent") return MassType::Consistent;
  if (name == "lumped") return MassType::Lumped;
  throw ValidationError("mass must be 'consistent' or 'lumped', got '" + name + "'");
}

std::string to_string(MassType type) {
  return type == MassType::Consistent ? "consistent" : "lumped";
}

namespace {

// (L Phi)(z) in 2D.  The angular integral over [0, pi) is split at density
// jumps and at the directions of the knot vertices seen from z, so the
// integrand is smooth on every angular piece.
PointwiseResult planar_entry(const PointwiseOperator& op, const HatAutocorrelation& phi,
                             double h, const Vec2& z, bool near, const AssemblyOptions& options) {
  const auto& measure = op.measure();
  const double s = measure.order();
  std::vector<double> breaks = density_breaks(measure);
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) {
      const Vec2 v = Vec2(i * h, j * h) - z;
      if (v.norm() > 1e-12 * h) breaks.push_back(wrap_half_turn(std::atan2(v(1), v(0))));
    }
  if (near) {
    const int panels = options.quadrature.angular_panels;
    for (int k = 1; k < panels; ++k) breaks.push_back(kPi * k / panels);
  }
  breaks = merge_sorted(std::move(breaks));

  const auto radial_rule = gauss_legendre(options.far_order + 2, -1.0, 1.0);
  const double reach = z.norm() + 2.0 * std::sqrt(2.0) * h;

  PointwiseResult out;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k], hi = breaks[k + 1];
    const double a = measure.density(0.5 * (lo + hi));
    if (a == 0.0) continue;
    const int order = near ? options.quadrature.angular_order : options.far_order;
    const auto rule = gauss_legendre(order, lo, hi);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 dir(std::cos(rule.nodes[q]), std::sin(rule.nodes[q]));
      const double w = 2.0 * a * rule.weights[q];
      if (near) {
        const auto r = op.radial(phi, z, dir);
        out.value += w * r.value;
        out.error += w * r.error;
        out.converged = out.converged && r.converged;
        continue;
      }
      // Far field: Phi(z) = 0 and the kernel is smooth on the support, so
      // fixed Gauss per piece between knot-line crossings is enough.
      std::vector<double> raw;
      phi.ray_breaks(z, dir, raw);
      phi.ray_breaks(z, -dir, raw);
      std::vector<double> pts = clean_breaks(std::move(raw), reach);
      double sum = 0.0;
      for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
        const double r0 = pts[p], r1 = pts[p + 1];
        const double mid = 0.5 * (r0 + r1), half = 0.5 * (r1 - r0);
        for (std::size_t g = 0; g < radial_rule.size(); ++g) {
          const double r = mid + half * radial_rule.nodes[g];
          sum -= half * radial_rule.weights[g] * (phi(z + r * dir) + phi(z - r * dir)) *
                 std::pow(r, -1.0 - 2.0 * s);
        }
      }
      out.value += w * sum;
    }
  }
  const double norm = operator_normalization(s);
  out.value *= norm;
  out.error *= norm;
  return out;
}

}  // namespace

double stiffness_entry(const SpectralMeasure& measure, double h, int di, int dj,
                       const AssemblyOptions& options) {
  const PointwiseOperator op(measure, options.quadrature);
  const HatAutocorrelation phi(measure.dim(), h);
  if (measure.dim() == 1) return op.apply(phi, Vec2(di * h, 0.0)).value;
  const bool near = std::max(std::abs(di), std::abs(dj)) <= options.near_offsets;
  return planar_entry(op, phi, h, Vec2(di * h, dj * h), near, options).value;
}

OperatorMatrices assemble(const SpectralMeasure& measure,
                          std::shared_ptr<const DomainGrid> grid,
                          const AssemblyOptions& options) {
  if (measure.dim() != grid->dim())
    throw ValidationError("measure and grid dimensions differ");
  ellipticity(measure);  // throws when mu_1 = 0

  const int n = grid->dim();
  const double h = grid->spacing();
  const std::size_t size = grid->size();
  const PointwiseOperator op(measure, options.quadrature);
  const HatAutocorrelation phi(n, h);

  // Offset range covered by node pairs.
  std::array<int, 2> lo = grid->lattice_index(0), hi = lo;
  for (std::size_t i = 0; i < size; ++i)
    for (int k = 0; k < 2; ++k) {
      lo[k] = std::min(lo[k], grid->lattice_index(i)[k]);
      hi[k] = std::max(hi[k], grid->lattice_index(i)[k]);
    }
  const std::array<int, 2> span{hi[0] - lo[0], hi[1] - lo[1]};

  // Canonical offsets: di > 0, or di == 0 and dj >= 0.
  std::vector<std::array<int, 2>> offsets;
  for (int di = 0; di <= span[0]; ++di)
    for (int dj = (di == 0 ? 0 : -span[1]); dj <= span[1]; ++dj) offsets.push_back({di, dj});

  std::vector<double> values(offsets.size());
  std::vector<char> ok(offsets.size(), 1);
  parallel_for(offsets.size(), options.threads, [&](std::size_t k) {
    const auto [di, dj] = offsets[k];
    PointwiseResult r;
    if (n == 1) {
      r = op.apply(phi, Vec2(di * h, 0.0));
    } else {
      const bool near = std::max(std::abs(di), std::abs(dj)) <= options.near_offsets;
      r = planar_entry(op, phi, h, Vec2(di * h, dj * h), near, options);
    }
    values[k] = r.value;
    ok[k] = r.converged ? 1 : 0;
  });

  const int width = 2 * span[1] + 1;
  std::vector<double> table(static_cast<std::size_t>(2 * span[0] + 1) * width, 0.0);
  auto slot = [&](int di, int dj) -> double& {
    return table[static_cast<std::size_t>(di + span[0]) * width + (dj + span[1])];
  };
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    const auto [di, dj] = offsets[k];
    slot(di, dj) = values[k];
    slot(-di, -dj) = values[k];
  }

  OperatorMatrices out{measure, grid, Eigen::MatrixXd(size, size),
                       Eigen::MatrixXd::Zero(size, size), options.mass};
  out.converged = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  for (std::size_t i = 0; i < size; ++i) {
    const auto& li = grid->lattice_index(i);
    for (std::size_t j = 0; j < size; ++j) {
      const auto& lj = grid->lattice_index(j);
      out.stiffness(i, j) = slot(li[0] - lj[0], li[1] - lj[1]);
    }
  }

  auto mass_1d = [h](int d) {
    if (d == 0) return 2.0 * h / 3.0;
    if (std::abs(d) == 1) return h / 6.0;
    return 0.0;
  };
  for (std::size_t i = 0; i < size; ++i) {
    const auto& li = grid->lattice_index(i);
    if (options.mass == MassType::Lumped) {
      out.mass(i, i) = std::pow(h, n);
      continue;
    }
    for (int a = -1; a <= 1; ++a)
      for (int b = (n == 2 ? -1 : 0); b <= (n == 2 ? 1 : 0); ++b) {
        const long j = grid->find(li[0] + a, li[1] + b);
        if (j < 0) continue;
        out.mass(i, j) = n == 1 ? mass_1d(a) : mass_1d(a) * mass_1d(b);
      }
  }

  const double kmax = out.stiffness.cwiseAbs().maxCoeff();
  out.symmetry_defect = (out.stiffness - out.stiffness.transpose()).cwiseAbs().maxCoeff() / kmax;
  if (out.symmetry_defect > options.symmetry_tolerance) {
    std::ostringstream os;
    os << "stiffness symmetry defect " << out.symmetry_defect << " exceeds "
       << options.symmetry_tolerance;
    throw NumericalError(os.str());
  }
  return out;
}

double energy(const OperatorMatrices& matrices, const Eigen::VectorXd& u,
              const Eigen::VectorXd& v) {
  return v.dot(matrices.stiffness * u);
}

DirichletSolver::DirichletSolver(const OperatorMatrices& matrices)
    : matrices_(&matrices), stiffness_llt_(matrices.stiffness), mass_llt_(matrices.mass) {
  if (stiffness_llt_.info() != Eigen::Success)
    throw NumericalError("stiffness matrix is not positive definite; assembly is inconsistent");
  if (mass_llt_.info() != Eigen::Success)
    throw NumericalError("mass matrix is not positive definite");
}

Eigen::VectorXd DirichletSolver::solve(const Eigen::VectorXd& g) const {
  if (static_cast<std::size_t>(g.size()) != matrices_->size())
    throw ValidationError("right-hand side size does not match the grid");
  return stiffness_llt_.solve(matrices_->mass * g);
}

Eigen::VectorXd DirichletSolver::apply(const Eigen::VectorXd& u) const {
  return mass_llt_.solve(matrices_->stiffness * u);
}

Eigen::VectorXd solve_dirichlet(const OperatorMatrices& matrices, const Eigen::VectorXd& g) {
  return DirichletSolver(matrices).solve(g);
}

void write_triplets_csv(const Eigen::MatrixXd& matrix, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path);
  out.precision(17);
  out << "row,col,value\n";
  for (Eigen::Index i = 0; i < matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < matrix.cols(); ++j)
      if (matrix(i, j) != 0.0) out << i << ',' << j << ',' << matrix(i, j) << '\n';
}

}  // namespace fracheat
