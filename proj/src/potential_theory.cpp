#include "fracheat/potential_theory.hpp"

#include "fracheat/errors.hpp"
#include "fracheat/quadrature.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>

namespace fracheat {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailStart = 40.0;

double uniform(std::mt19937_64& gen, double a, double b) {
  return a + (b - a) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Radial integral of f(x + r dir) r^{2s-1} over (0, reach).
double riesz_ray(const CompactFunction& f, const Vec2& x, const Vec2& dir, double s,
                 double tolerance) {
  const double reach = f.reach(x);
  if (!(reach > 0.0)) return 0.0;
  std::vector<double> breaks;
  f.ray_breaks(x, dir, breaks);
  breaks.push_back(reach);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> cuts{0.0};
  for (double b : breaks)
    if (b > cuts.back() * (1.0 + 1e-14) + 1e-300 && b <= reach) cuts.push_back(b);

  auto along = [&](double r) { return f(Vec2(x + r * dir)); };
  const auto rule = gauss_radial(24, 2.0 * s - 1.0, cuts[1]);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) total += rule.weights[i] * along(rule.nodes[i]);
  for (std::size_t k = 1; k + 1 < cuts.size(); ++k) {
    total += integrate_adaptive(
        [&](double r) { return along(r) * std::pow(r, 2.0 * s - 1.0); }, cuts[k], cuts[k + 1],
        tolerance, nullptr, 24, tolerance * std::abs(total) + 1e-300);
  }
  return total;
}

}  // namespace

// The Ooura integrators precompute node tables on first use and lock them
// internally, so one instance serves every evaluation.
struct KernelProfile::Cache {
  Cache(double tolerance) : cosine(tolerance, 10), sine(tolerance, 10) {}
  boost::math::quadrature::ooura_fourier_cos<double> cosine;
  boost::math::quadrature::ooura_fourier_sin<double> sine;
  std::once_flag once;
  double unit_potential = 0.0;
};

double riesz_constant(int n, double s) {
  if (!(s > 0.0 && 2.0 * s < n)) throw ValidationError("the Riesz constant needs 0 < 2s < n");
  return std::tgamma(0.5 * n - s) /
         (std::pow(4.0, s) * std::pow(kPi, 0.5 * n) * std::tgamma(s));
}

KernelProfile::KernelProfile(int n, double s, double tolerance)
    : n_(n), s_(s), tolerance_(tolerance), cache_(std::make_shared<Cache>(tolerance)) {
  if (n != 1) throw ValidationError("heat kernel and fundamental solution are implemented for n = 1");
  if (!(s > 0.0 && s < 1.0)) throw ValidationError("order s must lie in (0, 1)");
}

double KernelProfile::kernel_unit(double y) const {
  y = std::abs(y);
  if (y == 0.0) return std::tgamma(1.0 + 1.0 / (2.0 * s_)) / kPi;
  const double two_s = 2.0 * s_;
  const auto [value, rel] =
      cache_->cosine.integrate([two_s](double xi) { return std::exp(-std::pow(xi, two_s)); }, y);
  if (!(rel <= std::max(1e3 * tolerance_, 1e-8)) && std::abs(value) > 1e-300) {
    std::ostringstream os;
    os << "heat kernel inversion at y = " << y << " did not converge (relative error " << rel << ")";
    throw NumericalError(os.str());
  }
  return value / kPi;
}

// int_{y0}^inf y^{-shift} p(y, 1) dy from
//   p(y, 1) ~ (1/pi) sum_k (-1)^{k+1} Gamma(1 + 2sk) sin(pi s k) / k! y^{-1-2sk},
// summed until the terms stop decreasing.
double KernelProfile::tail_series(double y0, double shift) const {
  double sum = 0.0, previous = kInf;
  for (int k = 1; k <= 80; ++k) {
    const double ks = 2.0 * s_ * k;
    const double log_mag = std::lgamma(1.0 + ks) - std::lgamma(k + 1.0) - (shift + ks) * std::log(y0);
    const double term = (k % 2 ? 1.0 : -1.0) * std::sin(kPi * s_ * k) * std::exp(log_mag) /
                        (shift + ks);
    if (std::abs(term) <= 1e-14 * std::exp(log_mag) / (shift + ks)) continue;  // sin(pi s k) = 0
    if (std::abs(term) > previous) break;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    previous = std::abs(term);
  }
  return sum / kPi;
}

double KernelProfile::heat_kernel(double x, double t) const {
  if (!(t > 0.0)) throw ValidationError("time must be positive");
  const double scale = std::pow(t, -1.0 / (2.0 * s_));
  return scale * kernel_unit(scale * x);
}

double KernelProfile::heat_kernel_mass(double t) const {
  if (!(t > 0.0)) throw ValidationError("time must be positive");
  // int_0^X p(x, t) dx = (1/pi) int_0^inf sin(xi X) exp(-xi^{2s} t) / xi dxi with
  // X = t^{1/2s} x_cut; beyond X the large-|x| expansion of p takes over.
  const double x_cut = kTailStart;
  const double two_s = 2.0 * s_;
  const auto [inner, rel] = cache_->sine.integrate(
      [two_s, t](double xi) { return std::exp(-std::pow(xi, two_s) * t) / xi; },
      x_cut * std::pow(t, 1.0 / two_s));
  if (!(rel <= std::max(1e3 * tolerance_, 1e-8)))
    throw NumericalError("heat kernel mass integral did not converge");
  return 2.0 * (inner / kPi + tail_series(x_cut, 0.0));
}

double KernelProfile::fundamental_solution(double x) const {
  if (!(2.0 * s_ < n_))
    throw ValidationError("no fundamental solution for n <= 2s (this forces n = 1, s >= 1/2)");
  if (x == 0.0) return kInf;
  return 2.0 * s_ * std::pow(std::abs(x), 2.0 * s_ - 1.0) * unit_potential();
}

double KernelProfile::unit_potential() const {
  std::call_once(cache_->once, [this] {
  // p(., 1) is flat below y0 = 1e-3 * 40^{-1/2s}, the scale set by where
  // exp(-xi^{2s}) dies out; above it the integral runs in log y.
  const double weight = -2.0 * s_;
  const double y0 = 1e-3 * std::pow(40.0, -1.0 / (2.0 * s_));
  auto p = [this](double y) { return kernel_unit(y); };
  const auto rule = gauss_radial(16, weight, y0);
  double unit = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) unit += rule.weights[i] * p(rule.nodes[i]);
  unit += integrate_adaptive(
      [&](double v) {
        const double y = std::exp(v);
        return std::pow(y, 1.0 + weight) * p(y);
      },
      std::log(y0), std::log(kTailStart), tolerance_);
  unit += tail_series(kTailStart, 2.0 * s_);
  cache_->unit_potential = unit;
  });
  return cache_->unit_potential;
}

double KernelProfile::fitted_c2(const std::vector<double>& x) const {
  double c2 = 0.0;
  for (double xi : x)
    c2 = std::max(c2, fundamental_solution(xi) * std::pow(std::abs(xi), 1.0 - 2.0 * s_));
  return c2;
}

double riesz_potential(const CompactFunction& f, const Vec2& x, double s, double tolerance,
                       int angular_panels) {
  const int n = f.dim();
  const double c = riesz_constant(n, s);
  if (n == 1) {
    return c * (riesz_ray(f, x, Vec2(1.0, 0.0), s, tolerance) +
                riesz_ray(f, x, Vec2(-1.0, 0.0), s, tolerance));
  }
  double total = 0.0;
  const double panel = 2.0 * kPi / angular_panels;
  for (int k = 0; k < angular_panels; ++k) {
    const auto rule = gauss_legendre(8, k * panel, (k + 1) * panel);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const Vec2 dir(std::cos(rule.nodes[i]), std::sin(rule.nodes[i]));
      total += rule.weights[i] * riesz_ray(f, x, dir, s, tolerance);
    }
  }
  return c * total;
}

std::string to_string(LpCase c) {
  switch (c) {
    case LpCase::A: return "a";
    case LpCase::B: return "b";
    case LpCase::C: return "c";
  }
  return "";
}

LpCase parse_lp_case(const std::string& text) {
  if (text == "a") return LpCase::A;
  if (text == "b") return LpCase::B;
  if (text == "c") return LpCase::C;
  throw ValidationError("unknown L^p case '" + text + "' (expected a, b or c)");
}

LpCase lp_case_for(int n, double s, double p) {
  const double critical = n / (2.0 * s);
  if (std::abs(p - critical) <= 1e-12 * critical) return LpCase::B;
  return p < critical ? LpCase::A : LpCase::C;
}

std::string to_string(DatumKind k) {
  switch (k) {
    case DatumKind::Bump: return "bump";
    case DatumKind::Indicator: return "indicator";
    case DatumKind::Oscillatory: return "oscillatory";
  }
  return "";
}

double Datum::operator()(const Vec2& x) const {
  const double r = (x - center).norm() / radius;
  if (r >= 1.0) return 0.0;
  const double window = std::exp(1.0 - 1.0 / (1.0 - r * r));
  switch (kind) {
    case DatumKind::Bump: return amplitude * window;
    case DatumKind::Indicator: return amplitude;
    case DatumKind::Oscillatory: return amplitude * window * std::sin(frequency * (x(0) - center(0)));
  }
  return 0.0;
}

std::vector<Datum> lp_family(const Domain& domain, int family_size, std::uint64_t seed) {
  if (family_size < 0) throw ValidationError("family size must be nonnegative");
  std::mt19937_64 gen(seed);
  const double diam = domain.diameter();
  const double margin = diam / 8.0;
  Vec2 lo = domain.lower(), hi = domain.upper();
  if (domain.shape() == Shape::Disk) {
    lo = domain.center() - Vec2::Constant(domain.radius());
    hi = domain.center() + Vec2::Constant(domain.radius());
  }
  std::vector<Datum> family;
  for (int i = 0; i < family_size; ++i) {
    Datum d;
    d.kind = static_cast<DatumKind>(i % 3);
    for (;;) {
      d.center = Vec2(uniform(gen, lo(0), hi(0)), domain.dim() == 2 ? uniform(gen, lo(1), hi(1)) : 0.0);
      if (domain.distance(d.center) >= margin) break;
    }
    const double room = domain.distance(d.center);
    d.radius = uniform(gen, diam / 16.0, std::min(room, diam / 4.0));
    d.amplitude = uniform(gen, 0.5, 2.0) * (gen() & 1 ? 1.0 : -1.0);
    d.frequency = uniform(gen, 4.0, 16.0) * kPi / diam;
    family.push_back(d);
  }
  return family;
}

double discrete_lp_norm(const Eigen::VectorXd& f, double h, int n, double p) {
  if (std::isinf(p)) return f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
  if (!(p >= 1.0)) throw ValidationError("norm exponent must be at least 1");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) sum += std::pow(std::abs(f(i)), p);
  return std::pow(std::pow(h, n) * sum, 1.0 / p);
}

LpReport lp_estimate_check(const OperatorMatrices& matrices, LpCase declared, double p,
                           const std::vector<Datum>& family) {
  const auto& grid = *matrices.grid;
  const int n = grid.dim();
  const double s = matrices.measure.order();
  const double h = grid.spacing();
  if (!(p >= 1.0)) throw ValidationError("p must be at least 1");
  const LpCase actual = lp_case_for(n, s, p);
  if (actual != declared) {
    std::ostringstream os;
    os << "p = " << p << " against n/2s = " << n / (2.0 * s) << " is case (" << to_string(actual)
       << "), not (" << to_string(declared) << ")";
    throw ValidationError(os.str());
  }
  LpReport report;
  report.lp_case = declared;
  report.p = p;
  switch (declared) {
    case LpCase::A: report.q = {n * p / (n - 2.0 * p * s)}; break;
    case LpCase::B: report.q = {4.0, 8.0, 16.0}; break;
    case LpCase::C: report.q = {kInf}; break;
  }
  report.max_ratio.assign(report.q.size(), 0.0);
  report.min_ratio.assign(report.q.size(), kInf);

  const DirichletSolver solver(matrices);
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& datum = family[i];
    const Eigen::VectorXd g = sample(grid, datum);
    LpRow row;
    row.index = static_cast<int>(i);
    row.kind = datum.kind;
    row.g_norm = discrete_lp_norm(g, h, n, p);
    if (row.g_norm == 0.0) {
      ++report.skipped;
      continue;
    }
    const Eigen::VectorXd u = solver.solve(g);
    for (std::size_t j = 0; j < report.q.size(); ++j) {
      const double un = discrete_lp_norm(u, h, n, report.q[j]);
      row.u_norm.push_back(un);
      row.ratio.push_back(un / row.g_norm);
      report.max_ratio[j] = std::max(report.max_ratio[j], row.ratio.back());
      report.min_ratio[j] = std::min(report.min_ratio[j], row.ratio.back());
    }
    const double umax = u.cwiseAbs().maxCoeff();
    if (umax > 0.0) {
      const Eigen::VectorXd u2 = solver.solve(2.0 * g);
      report.linearity_defect =
          std::max(report.linearity_defect, (u2 - 2.0 * u).cwiseAbs().maxCoeff() / umax);
    }
    const bool sign_changing = g.maxCoeff() > 0.0 && g.minCoeff() < 0.0;
    if (sign_changing) {
      const Eigen::VectorXd v = solver.solve(g.cwiseAbs());
      const double vmax = v.maxCoeff();
      const double excess = (u.cwiseAbs() - v).maxCoeff();
      if (vmax > 0.0) report.comparison_defect = std::max(report.comparison_defect, std::max(0.0, excess) / vmax);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

LpRefinement lp_refinement(const SpectralMeasure& measure, const Domain& domain,
                           const std::vector<double>& h, LpCase declared, double p,
                           int family_size, std::uint64_t seed, const AssemblyOptions& options) {
  if (h.size() < 2) throw ValidationError("refinement needs at least two spacings");
  LpRefinement out;
  out.h = h;
  const auto family = lp_family(domain, family_size, seed);
  for (double hk : h) {
    auto grid = std::make_shared<const DomainGrid>(DomainGrid::build(domain, hk));
    const auto matrices = assemble(measure, grid, options);
    out.reports.push_back(lp_estimate_check(matrices, declared, p, family));
  }
  const std::size_t nq = out.reports.front().q.size();
  out.stable = true;
  for (std::size_t j = 0; j < nq; ++j) {
    double lo = kInf, hi = 0.0;
    for (const auto& r : out.reports) {
      lo = std::min(lo, r.max_ratio[j]);
      hi = std::max(hi, r.max_ratio[j]);
    }
    out.spread.push_back(lo > 0.0 ? (hi - lo) / lo : kInf);
    out.stable = out.stable && out.spread.back() <= 0.10;
  }
  return out;
}

}  // namespace fracheat
