#include "fracheat/audit.hpp"

#include "fracheat/boundary_analysis.hpp"
#include "fracheat/discrete_operator.hpp"
#include "fracheat/errors.hpp"
#include "fracheat/functions.hpp"
#include "fracheat/heat_evolution.hpp"
#include "fracheat/potential_theory.hpp"
#include "fracheat/random.hpp"
#include "fracheat/spectral_solver.hpp"
#include "fracheat/stable_kernel.hpp"

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

namespace fracheat::audit {

namespace {

using std::numbers::pi;

const std::map<int, std::string>& names() {
  static const std::map<int, std::string> table = {
      {1, "symbol sandwich"},
      {2, "power concavity"},
      {3, "second-difference bound"},
      {4, "bootstrap table"},
      {5, "1D Weyl audit"},
      {6, "Weyl sandwich, anisotropic 2D"},
      {7, "elliptic ball oracle"},
      {8, "Pohozaev ball residual"},
      {9, "heat Pohozaev"},
      {10, "L2 decay"},
      {11, "tail bound"},
      {12, "heat kernel closed form"},
      {13, "hypothesis scans"},
      {14, "Lp refinement"},
  };
  return table;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// Shared state for the s = 1/2 heat criteria; built on first use.
struct Context {
  const Options& options;
  std::shared_ptr<const EigenSystem> heat_system;

  AssemblyOptions assembly() const {
    AssemblyOptions a;
    a.threads = options.threads;
    return a;
  }

  std::shared_ptr<const OperatorMatrices> interval_matrices(double s, double h) const {
    auto grid = std::make_shared<const DomainGrid>(DomainGrid::build(Domain::interval(-1, 1), h));
    return std::make_shared<const OperatorMatrices>(
        assemble(SpectralMeasure::fractional_laplacian(1, s), grid, assembly()));
  }

  const std::shared_ptr<const EigenSystem>& heat() {
    if (!heat_system) {
      auto mats = interval_matrices(0.5, std::ldexp(1.0, -9));
      heat_system = std::make_shared<const EigenSystem>(eigenpairs(mats, mats->size()));
    }
    return heat_system;
  }
};

SpectralMeasure random_measure(Rng& rng) {
  const double s = rng.uniform(0.05, 0.95);
  if (rng.uniform() < 0.5) {
    const double a = rng.uniform(0.1, 2.0);
    return SpectralMeasure::one_dimensional(s, a, a, 2.0);
  }
  const int pieces = 1 + static_cast<int>(rng.uniform() * 4);
  std::vector<double> breaks{0.0};
  for (int i = 1; i < pieces; ++i) breaks.push_back(rng.uniform(0.0, pi));
  std::sort(breaks.begin(), breaks.end());
  breaks.push_back(pi);
  std::vector<ArcSegment> segments;
  bool any = false;
  for (int i = 0; i < pieces; ++i) {
    double w = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.05, 2.0);
    if (i + 1 == pieces && !any && w == 0.0) w = 1.0;
    any = any || w > 0.0;
    if (breaks[i + 1] <= breaks[i]) continue;
    segments.push_back({breaks[i], breaks[i + 1], w});
    segments.push_back({breaks[i] + pi, breaks[i + 1] + pi, w});
  }
  return SpectralMeasure::planar(s, segments, 2.0);
}

CriterionResult symbol_sandwich(const Options& o) {
  CriterionResult r;
  Rng rng(o.seed);
  int cases = 0, failures = 0;
  double worst = 0.0;
  for (int m = 0; m < 50; ++m) {
    const auto measure = random_measure(rng);
    const auto e = ellipticity(measure);
    const SymbolProfile profile(measure);
    const double s = measure.order();
    for (int k = 0; k < 20; ++k) {
      const double mag = std::pow(10.0, rng.uniform(-3.0, 3.0));
      const double phi = rng.uniform(0.0, 2 * pi);
      const Vec2 xi = measure.dim() == 1 ? Vec2(rng.uniform() < 0.5 ? -mag : mag, 0.0)
                                         : Vec2(mag * std::cos(phi), mag * std::sin(phi));
      const double a = profile(xi);
      const double rad = std::pow(xi.norm(), 2 * s);
      const double low = (e.mu1 * rad - a) / (e.mu1 * rad);
      const double high = (a - e.mu2 * rad) / (e.mu2 * rad);
      worst = std::max({worst, low, high});
      if (low > 1e-8 || high > 1e-8) ++failures;
      ++cases;
    }
  }
  r.passed = failures == 0 && cases == 1000;
  r.metrics = {{"cases", double(cases)}, {"failures", double(failures)}, {"worst_relative_excess", worst}};
  r.summary = std::to_string(cases) + " cases, " + std::to_string(failures) + " outside mu1|xi|^2s <= A <= mu2|xi|^2s";
  return r;
}

CriterionResult concavity(const Options& o) {
  CriterionResult r;
  Rng rng(o.seed + 1);
  int failures = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    double a = rng.uniform(0.0, 10.0), b = rng.uniform(0.0, 10.0);
    if (i % 100 == 0) b = 0.0;
    if (i % 100 == 1) b = a;
    if (a < b) std::swap(a, b);
    if (!power_concavity(a, b, rng.uniform(0.001, 0.999), 1e-12)) ++failures;
  }
  r.passed = failures == 0;
  r.metrics = {{"cases", double(trials)}, {"failures", double(failures)}};
  r.summary = std::to_string(trials) + " cases, " + std::to_string(failures) + " failures";
  return r;
}

CriterionResult second_difference(const Options& o) {
  CriterionResult r;
  const SymbolProfile one(SpectralMeasure::one_dimensional(0.7, 0.5, 0.5, 1.0));
  const SymbolProfile two(SpectralMeasure::planar(
      0.6, {{0.0, 0.1, 1.0}, {pi - 0.1, pi + 0.1, 1.0}, {2 * pi - 0.1, 2 * pi, 1.0}}, 1.0));
  const auto a = second_difference_certificate(one, 10000, o.seed + 2);
  const auto b = second_difference_certificate(two, 10000, o.seed + 3);
  r.passed = a.violations == 0 && b.violations == 0;
  r.metrics = {{"n1_trials", double(a.trials)}, {"n1_violations", double(a.violations)},
               {"n1_max_ratio", a.max_ratio}, {"n2_trials", double(b.trials)},
               {"n2_violations", double(b.violations)}, {"n2_max_ratio", b.max_ratio}};
  r.summary = "violations n=1: " + std::to_string(a.violations) + ", n=2: " +
              std::to_string(b.violations) + "; max ratio " + fmt(std::max(a.max_ratio, b.max_ratio));
  return r;
}

CriterionResult bootstrap_table(const Options&) {
  CriterionResult r;
  const std::vector<std::tuple<int, std::string, int>> table = {
      {1, "0.25", 3}, {1, "0.4", 2}, {2, "0.5", 3}, {3, "0.5", 3}, {4, "0.5", 4}};
  r.passed = true;
  std::string got;
  for (const auto& [n, s, w] : table) {
    const auto plan = bootstrap_exponents(n, s);
    r.passed = r.passed && plan.w == w;
    r.metrics.push_back({"w_n" + std::to_string(n) + "_s" + s, double(plan.w)});
    got += (got.empty() ? "" : ", ") + std::to_string(plan.w);
  }
  r.summary = "w = {" + got + "}, expected {3, 2, 3, 3, 4}";
  return r;
}

CriterionResult weyl_1d(Context& ctx) {
  CriterionResult r;
  r.passed = true;
  std::string text;
  for (double s : {0.3, 0.5, 0.7}) {
    const auto mats = ctx.interval_matrices(s, 2.0 / 513);
    const auto eig = eigenpairs(mats, 60);
    const SymbolProfile profile(SpectralMeasure::fractional_laplacian(1, s));
    const auto weyl = weyl_constant(profile, 2.0, 0, ctx.options.seed);
    const auto a = weyl_audit(eig, weyl, std::pair{20, 50});
    const double target = std::pow(pi / 2, 2 * s);
    const double err = std::abs(a.median - target) / target;
    r.passed = r.passed && err <= 0.10 && mats->size() == 512;
    r.metrics.push_back({"s" + fmt(s) + "_median", a.median});
    r.metrics.push_back({"s" + fmt(s) + "_relative_error", err});
    text += (text.empty() ? "" : ", ") + ("s=" + fmt(s) + ": " + fmt(100 * err) + "%");
  }
  r.summary = "median lambda_k k^-2s vs (pi/2)^2s: " + text;
  return r;
}

CriterionResult weyl_sandwich(const Options& o) {
  CriterionResult r;
  const SymbolProfile profile(SpectralMeasure::planar(
      0.5, {{0.0, 0.1, 1.0}, {pi - 0.1, pi + 0.1, 1.0}, {2 * pi - 0.1, 2 * pi, 1.0}}, 1.0));
  const auto w = weyl_constant(profile, pi, 400000, o.seed + 4);
  const double tol = 3 * w.c0_sigma;
  r.passed = w.lower <= w.c0 + tol && w.c0 <= w.upper + tol;
  r.metrics = {{"c_mu1", w.lower}, {"c0", w.c0}, {"c0_sigma", w.c0_sigma}, {"c_mu2", w.upper}};
  r.summary = "C(mu1)=" + fmt(w.lower) + " <= C0=" + fmt(w.c0) + " (sigma " + fmt(w.c0_sigma) +
              ") <= C(mu2)=" + fmt(w.upper);
  return r;
}

struct BallSolve {
  std::shared_ptr<const OperatorMatrices> mats;
  Eigen::VectorXd u;
};

BallSolve ball_solve(const Context& ctx, double s, double h) {
  BallSolve b;
  b.mats = ctx.interval_matrices(s, h);
  b.u = solve_dirichlet(*b.mats, Eigen::VectorXd::Ones(b.mats->size()));
  return b;
}

CriterionResult ball_oracle(Context& ctx) {
  CriterionResult r;
  const auto b = ball_solve(ctx, 0.5, std::ldexp(1.0, -9));
  const auto& grid = *b.mats->grid;
  const Eigen::VectorXd exact = sample(grid, [](const Vec2& x) { return std::sqrt(1 - x(0) * x(0)); });
  const Eigen::VectorXd diff = b.u - exact;
  const auto& M = b.mats->mass;
  const double l2 = std::sqrt(diff.dot(M * diff) / exact.dot(M * exact));
  const auto profile = quotient_profile(grid, b.u, 0.5);
  double trace_err = 0.0;
  for (double t : profile.trace) trace_err = std::max(trace_err, std::abs(t - std::sqrt(2.0)) / std::sqrt(2.0));
  r.passed = l2 <= 0.05 && trace_err <= 0.05;
  r.metrics = {{"l2_relative_error", l2}, {"trace_relative_error", trace_err}};
  r.summary = "L2 error " + fmt(100 * l2) + "%, trace error " + fmt(100 * trace_err) + "%";
  return r;
}

CriterionResult pohozaev_ball(Context& ctx) {
  CriterionResult r;
  const auto m = SpectralMeasure::fractional_laplacian(1, 0.5);
  std::vector<double> res;
  for (int p : {9, 10}) {
    const auto b = ball_solve(ctx, 0.5, std::ldexp(1.0, -p));
    const auto pr = pohozaev_residual(m, *b.mats->grid, b.u, Eigen::VectorXd::Ones(b.mats->size()));
    res.push_back(pr.residual);
  }
  const double ratio = res[0] / res[1];
  r.passed = res[0] <= 0.05 && ratio >= 1.3;
  r.metrics = {{"residual_h2-9", res[0]}, {"residual_h2-10", res[1]}, {"ratio", ratio}};
  r.summary = "residual " + fmt(res[0]) + " at h=2^-9, " + fmt(res[1]) + " at 2^-10 (ratio " + fmt(ratio) + ")";
  return r;
}

HeatSolution indicator_solution(Context& ctx) {
  const auto& eig = ctx.heat();
  const Eigen::VectorXd u0 = sample(eig->grid(), [](const Vec2& x) { return std::abs(x(0)) < 0.5 ? 1.0 : 0.0; });
  return project(eig, u0);
}

CriterionResult heat_pohozaev(Context& ctx) {
  CriterionResult r;
  const auto sol = indicator_solution(ctx);
  const double t = 0.1;
  const Eigen::VectorXd u = evaluate(sol, t);
  const Eigen::VectorXd lu = -time_derivative(sol, 1, t);
  const auto pr = pohozaev_residual(SpectralMeasure::fractional_laplacian(1, 0.5), sol.eig->grid(), u, lu);
  r.passed = pr.residual <= 0.10;
  r.metrics = {{"lhs", pr.lhs}, {"rhs", pr.rhs}, {"residual", pr.residual},
               {"trace_uncertainty", pr.trace_uncertainty}};
  r.summary = "residual " + fmt(100 * pr.residual) + "% at t=0.1, h=2^-9";
  return r;
}

CriterionResult l2_decay_check(Context& ctx) {
  CriterionResult r;
  const auto sol = indicator_solution(ctx);
  std::vector<double> t;
  for (int k = 0; k < 50; ++k) t.push_back(0.2 * k);
  const auto n = l2_decay(sol, t);
  bool monotone = true;
  for (std::size_t k = 1; k < n.size(); ++k) monotone = monotone && n[k] <= n[k - 1];
  // Least-squares slope of log ||u||^2 over the last ten times.
  double st = 0, sy = 0, stt = 0, sty = 0;
  const int m = 10;
  for (std::size_t k = n.size() - m; k < n.size(); ++k) {
    const double y = 2 * std::log(n[k]);
    st += t[k], sy += y, stt += t[k] * t[k], sty += t[k] * y;
  }
  const double slope = (m * sty - st * sy) / (m * stt - st * st);
  const double target = -2 * sol.eig->values(0);
  const double err = std::abs(slope - target) / std::abs(target);
  r.passed = monotone && err <= 0.01;
  r.metrics = {{"monotone", monotone ? 1.0 : 0.0}, {"slope", slope}, {"minus_two_lambda1", target},
               {"relative_error", err}};
  r.summary = std::string(monotone ? "nonincreasing" : "NOT monotone") + ", slope " + fmt(slope) +
              " vs -2 lambda1 " + fmt(target);
  return r;
}

CriterionResult tail(Context& ctx) {
  CriterionResult r;
  const auto& eig = ctx.heat();
  const double s = 0.5, c0 = pi / 2;
  const int w = bootstrap_exponents(1, "1/2").w;
  r.passed = true;
  for (double t0 : {0.01, 0.1, 1.0}) {
    const auto tb = tail_bound(eig->values, c0, 1, s, w, t0);
    r.passed = r.passed && tb.dominates;
    r.metrics.push_back({"t0_" + fmt(t0) + "_bound", tb.bound});
    r.metrics.push_back({"t0_" + fmt(t0) + "_direct_sum", tb.direct_sum});
  }
  const int k0 = find_k0(eig->values, c0, 2 * s);
  const double beta = w + 1 / (2 * s) - 1;
  const double ratio = tail_bound_value(c0, 1, s, w, 5e-4, k0) / tail_bound_value(c0, 1, s, w, 1e-3, k0);
  const double expected = std::pow(2.0, beta + 1);
  const double err = std::abs(ratio - expected) / expected;
  r.passed = r.passed && err <= 0.15;
  r.metrics.push_back({"k0", double(k0)});
  r.metrics.push_back({"doubling_ratio", ratio});
  r.metrics.push_back({"expected_ratio", expected});
  r.summary = "bound dominates at t0 in {0.01, 0.1, 1}: " + std::string(r.passed ? "yes" : "check") +
              "; doubling ratio " + fmt(ratio) + " vs " + fmt(expected);
  return r;
}

CriterionResult kernel(const Options&) {
  CriterionResult r;
  double closed = 0.0, scaling = 0.0, mass = 0.0;
  const KernelProfile cauchy(1, 0.5);
  for (double t : {0.05, 0.5, 2.0, 10.0})
    for (double x : {0.0, 0.25, 1.0, 4.0, 16.0}) {
      const double exact = t / (pi * (t * t + x * x));
      closed = std::max(closed, std::abs(cauchy.heat_kernel(x, t) - exact) / exact);
    }
  // Direct inversion at t != 1 against the rescaled unit-time kernel.
  boost::math::quadrature::ooura_fourier_cos<double> cosine;
  for (double s : {0.3, 0.7}) {
    const KernelProfile k(1, s);
    for (double t : {0.5, 2.0})
      for (double x : {0.3, 1.5}) {
        const auto f = [s, t](double xi) { return std::exp(-std::pow(xi, 2 * s) * t); };
        const double direct = cosine.integrate(f, x).first / pi;
        const double scaled = std::pow(t, -0.5 / s) * k.heat_kernel(x * std::pow(t, -0.5 / s), 1.0);
        scaling = std::max(scaling, std::abs(direct - scaled) / std::abs(direct));
      }
  }
  for (double s : {0.3, 0.5, 0.7}) mass = std::max(mass, std::abs(KernelProfile(1, s).heat_kernel_mass(1.0) - 1));
  r.passed = closed <= 1e-6 && scaling <= 1e-6 && mass <= 1e-6;
  r.metrics = {{"closed_form_error", closed}, {"scaling_error", scaling}, {"mass_error", mass}};
  r.summary = "closed form " + fmt(closed) + ", scaling " + fmt(scaling) + ", mass " + fmt(mass);
  return r;
}

CriterionResult hypothesis(Context& ctx) {
  CriterionResult r;
  const double s = 0.5;
  const auto b = ball_solve(ctx, s, std::ldexp(1.0, -11));
  const auto& grid = *b.mats->grid;
  const auto rho = default_rho_ladder(grid);
  const auto a = seminorm_scan(grid, b.u, s, s, rho, ctx.options.seed);
  const auto g = seminorm_scan(grid, b.u, s, 1.0, rho, ctx.options.seed);
  r.passed = std::abs(a.slope) <= 0.1 && std::abs(g.slope - (s - 1)) <= 0.15;
  r.metrics = {{"rungs", double(rho.size())}, {"slope_beta_s", a.slope}, {"slope_beta_1", g.slope}};
  r.summary = "beta=s slope " + fmt(a.slope) + " (target 0), beta=1 slope " + fmt(g.slope) + " (target " +
              fmt(s - 1) + ")";
  return r;
}

CriterionResult lp(Context& ctx) {
  CriterionResult r;
  const auto ref = lp_refinement(SpectralMeasure::fractional_laplacian(1, 0.4), Domain::interval(-1, 1),
                                 {2.0 / 257, 2.0 / 513, 2.0 / 1025}, LpCase::C, 2.0, 12, ctx.options.seed,
                                 ctx.assembly());
  double lin = 0.0, cmp = 0.0;
  for (std::size_t i = 0; i < ref.reports.size(); ++i) {
    lin = std::max(lin, ref.reports[i].linearity_defect);
    cmp = std::max(cmp, ref.reports[i].comparison_defect);
    r.metrics.push_back({"C_N" + std::to_string(static_cast<int>(std::lround(2 / ref.h[i])) - 1),
                         ref.reports[i].max_ratio[0]});
  }
  r.passed = ref.stable && lin <= 1e-8 && cmp <= 1e-8;
  r.metrics.push_back({"spread", ref.spread[0]});
  r.metrics.push_back({"linearity_defect", lin});
  r.metrics.push_back({"comparison_defect", cmp});
  r.summary = "spread " + fmt(100 * ref.spread[0]) + "%, linearity " + fmt(lin) + ", comparison " + fmt(cmp);
  return r;
}

CriterionResult dispatch(int id, Context& ctx) {
  const Options& o = ctx.options;
  switch (id) {
    case 1: return symbol_sandwich(o);
    case 2: return concavity(o);
    case 3: return second_difference(o);
    case 4: return bootstrap_table(o);
    case 5: return weyl_1d(ctx);
    case 6: return weyl_sandwich(o);
    case 7: return ball_oracle(ctx);
    case 8: return pohozaev_ball(ctx);
    case 9: return heat_pohozaev(ctx);
    case 10: return l2_decay_check(ctx);
    case 11: return tail(ctx);
    case 12: return kernel(o);
    case 13: return hypothesis(ctx);
    case 14: return lp(ctx);
  }
  throw ValidationError("unknown criterion " + std::to_string(id));
}

CriterionResult run_in(int id, Context& ctx) {
  const std::string name = criterion_name(id);
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = dispatch(id, ctx);
  } catch (const std::exception& e) {
    r = CriterionResult{};
    r.passed = false;
    r.summary = std::string("error: ") + e.what();
  }
  r.id = id;
  r.name = name;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (ctx.options.on_result) ctx.options.on_result(r);
  return r;
}

}  // namespace

std::vector<int> criterion_ids() {
  std::vector<int> ids;
  for (const auto& [id, name] : names()) ids.push_back(id);
  return ids;
}

std::string criterion_name(int id) {
  const auto it = names().find(id);
  if (it == names().end()) throw ValidationError("unknown criterion " + std::to_string(id));
  return it->second;
}

CriterionResult run_criterion(int id, const Options& options) {
  Context ctx{options, nullptr};
  return run_in(id, ctx);
}

std::vector<CriterionResult> run_all(const Options& options) {
  Context ctx{options, nullptr};
  std::vector<CriterionResult> out;
  for (int id : options.only.empty() ? criterion_ids() : options.only) out.push_back(run_in(id, ctx));
  return out;
}

}  // namespace fracheat::audit
