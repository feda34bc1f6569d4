#include "commands.hpp"

#include "fracheat/boundary_analysis.hpp"
#include "fracheat/errors.hpp"
#include "fracheat/functions.hpp"
#include "fracheat/heat_evolution.hpp"
#include "fracheat/potential_theory.hpp"
#include "fracheat/spectral_solver.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

namespace fracheat::cli {

namespace {

using std::numbers::pi;

struct Setup {
  SpectralMeasure measure;
  Domain domain;
  std::shared_ptr<const DomainGrid> grid;
  std::shared_ptr<const OperatorMatrices> matrices;
};

Setup setup(const RunConfig& c) {
  const auto measure = parse_measure(c.document.at("measure"));
  const auto domain = parse_domain(c.document.at("domain"));
  if (measure.dim() != domain.dim())
    throw ValidationError("measure dimension " + std::to_string(measure.dim()) +
                          " does not match the domain dimension " + std::to_string(domain.dim()));
  auto grid = std::make_shared<const DomainGrid>(DomainGrid::build(domain, c.h()));
  auto mats = std::make_shared<const OperatorMatrices>(assemble(measure, grid, c.assembly()));
  return {measure, domain, grid, mats};
}

json base_report(const std::string& command, const RunConfig& c) {
  json r;
  r["command"] = command;
  r["config_hash"] = c.hash;
  r["config"] = c.document;
  return r;
}

template <class T>
T param(const RunConfig& c, const std::string& key, const T& fallback) {
  try {
    return c.param(key, json(fallback)).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("params." + key + " has the wrong type");
  }
}

std::size_t mode_count(const RunConfig& c, std::size_t size, bool default_all) {
  const json v = c.param("modes", default_all ? json("all") : json(c.m()));
  if (v.is_string()) {
    if (v.get<std::string>() != "all") throw ValidationError("params.modes must be \"all\" or an integer");
    return size;
  }
  if (!v.is_number_integer() || v.get<long long>() < 1) throw ValidationError("params.modes must be positive");
  return static_cast<std::size_t>(v.get<long long>());
}

Datum initial_datum(const RunConfig& c, int n) {
  const json d = c.param("initial", json{{"kind", "indicator"}, {"center", {0.0, 0.0}}, {"radius", 0.5}});
  Datum datum;
  const std::string kind = d.value("kind", std::string("indicator"));
  if (kind == "indicator") datum.kind = DatumKind::Indicator;
  else if (kind == "bump") datum.kind = DatumKind::Bump;
  else if (kind == "oscillatory") datum.kind = DatumKind::Oscillatory;
  else throw ValidationError("params.initial.kind must be indicator, bump or oscillatory");
  const auto center = d.value("center", std::vector<double>{0.0, 0.0});
  if (center.size() != 2) throw ValidationError("params.initial.center must have two coordinates");
  datum.center = Vec2(center[0], n == 1 ? 0.0 : center[1]);
  datum.radius = d.value("radius", 0.5);
  datum.amplitude = d.value("amplitude", 1.0);
  datum.frequency = d.value("frequency", 0.0);
  if (!(datum.radius > 0)) throw ValidationError("params.initial.radius must be positive");
  return datum;
}

double weyl_c0(const SpectralMeasure& m, const Domain& d, const RunConfig& c) {
  const auto w = weyl_constant(SymbolProfile(m), d.volume(), param<long long>(c, "mc_samples", 200000), c.seed());
  return w.c0;
}

// ---- commands --------------------------------------------------------------

Artifacts cmd_symbol(const RunConfig& c) {
  const auto measure = parse_measure(c.document.at("measure"));
  const SymbolProfile profile(measure);
  const auto e = ellipticity(measure);
  json xis = c.param("xi", json());
  if (xis.is_null()) {
    xis = json::array();
    if (measure.dim() == 1) {
      for (double x : {0.5, 1.0, 2.0, 4.0}) xis.push_back({x, 0.0});
    } else {
      for (int k = 0; k < 16; ++k) xis.push_back({std::cos(pi * k / 8), std::sin(pi * k / 8)});
    }
  }
  Artifacts a;
  a.table.columns = {"xi1", "xi2", "symbol", "mu1_bound", "mu2_bound"};
  const double s = measure.order();
  for (const auto& x : xis) {
    const auto v = x.get<std::vector<double>>();
    if (v.empty() || v.size() > 2) throw ValidationError("params.xi entries need one or two coordinates");
    const Vec2 xi(v[0], v.size() > 1 ? v[1] : 0.0);
    const double r = std::pow(measure.dim() == 1 ? std::abs(xi(0)) : xi.norm(), 2 * s);
    a.table.add({cell(xi(0)), cell(xi(1)), cell(profile(xi)), cell(e.mu1 * r), cell(e.mu2 * r)});
  }
  const auto cert = second_difference_certificate(profile, param<long long>(c, "trials", 10000), c.seed());
  a.report = base_report("symbol", c);
  a.report["mu1"] = e.mu1;
  a.report["mu2"] = e.mu2;
  a.report["argmin_angle"] = e.argmin_angle;
  a.report["second_difference"] = {{"trials", cert.trials},
                                   {"violations", cert.violations},
                                   {"max_ratio", cert.max_ratio},
                                   {"min_slack", cert.min_slack}};
  return a;
}

Artifacts cmd_weyl(const RunConfig& c) {
  const auto st = setup(c);
  const auto eig = eigenpairs(st.matrices, static_cast<std::size_t>(c.m()));
  const auto weyl = weyl_constant(SymbolProfile(st.measure), st.domain.volume(),
                                  param<long long>(c, "mc_samples", 200000), c.seed());
  std::optional<std::pair<int, int>> range;
  const json kr = c.param("k_range", json());
  if (!kr.is_null()) {
    const auto v = kr.get<std::vector<int>>();
    if (v.size() != 2) throw ValidationError("params.k_range must be [k_lo, k_hi]");
    range = std::pair{v[0], v[1]};
  }
  const auto audit = weyl_audit(eig, weyl, range);
  Artifacts a;
  a.table.columns = {"k", "lambda", "ratio"};
  for (const auto& row : audit.rows) a.table.add({cell(row.k), cell(row.lambda), cell(row.ratio)});
  a.report = base_report("weyl", c);
  a.report["c0"] = weyl.c0;
  a.report["c0_sigma"] = weyl.c0_sigma;
  a.report["lower"] = weyl.lower;
  a.report["upper"] = weyl.upper;
  a.report["volume"] = weyl.volume;
  a.report["k_lo"] = audit.k_lo;
  a.report["k_hi"] = audit.k_hi;
  a.report["median"] = audit.median;
  a.report["relative_error"] = audit.relative_error;
  a.report["drift"] = audit.drift;
  a.report["sandwich_ok"] = audit.sandwich_ok;
  a.report["sandwich_equality"] = audit.sandwich_equality;
  a.report["discretization_warning"] = audit.discretization_warning;
  return a;
}

Artifacts cmd_eig(const RunConfig& c) {
  const auto st = setup(c);
  const auto eig = eigenpairs(st.matrices, static_cast<std::size_t>(c.m()));
  const int w = bootstrap_exponents(st.measure.dim(), st.measure.order()).w;
  const auto sup = sup_norm_audit(eig, w);
  Artifacts a;
  a.table.columns = {"k", "lambda", "sup", "l2", "ratio", "implied_constant"};
  for (const auto& row : sup.rows)
    a.table.add({cell(row.k), cell(row.lambda), cell(row.sup), cell(row.l2), cell(row.ratio),
                 cell(row.implied_constant)});
  a.report = base_report("eig", c);
  a.report["nodes"] = st.grid->size();
  a.report["count"] = eig.count();
  a.report["max_residual"] = eig.max_residual;
  a.report["orthonormality_defect"] = eig.orthonormality_defect;
  a.report["symmetry_defect"] = st.matrices->symmetry_defect;
  a.report["sup_norm"] = {{"w", w},
                          {"slope", sup.slope},
                          {"implied_constant", sup.implied_constant},
                          {"slope_ok", sup.slope_ok},
                          {"lower_bound_ok", sup.lower_bound_ok}};
  if (!st.domain.is_c11()) a.report["advisory"] = st.domain.advisory();
  return a;
}

HeatSolution heat_solution(const Setup& st, const RunConfig& c) {
  const std::size_t m = std::min(mode_count(c, st.grid->size(), true), st.grid->size());
  auto eig = std::make_shared<const EigenSystem>(eigenpairs(st.matrices, m));
  return project(eig, sample(*st.grid, initial_datum(c, st.measure.dim())));
}

Artifacts cmd_evolve(const RunConfig& c) {
  const auto st = setup(c);
  const auto sol = heat_solution(st, c);
  const auto times = param<std::vector<double>>(c, "t", {0.0, 0.01, 0.1, 1.0});
  const auto l2 = l2_decay(sol, times);
  Artifacts a;
  a.table.columns = {"t", "node", "x", "y", "u"};
  for (double t : times) {
    const Eigen::VectorXd u = evaluate(sol, t);
    for (std::size_t i = 0; i < st.grid->size(); ++i) {
      const Vec2 x = st.grid->node(i);
      a.table.add({cell(t), cell(i), cell(x(0)), cell(x(1)), cell(u(static_cast<Eigen::Index>(i)))});
    }
  }
  const double t0 = param<double>(c, "t0", 0.01);
  const double eps = param<double>(c, "eps", 0.05);
  const int n = st.measure.dim();
  const double s = st.measure.order();
  const int w = bootstrap_exponents(n, s).w;
  a.report = base_report("evolve", c);
  a.report["truncation"] = sol.truncation();
  a.report["bessel_defect"] = sol.bessel_defect();
  a.report["t"] = times;
  a.report["l2"] = l2;
  const auto ub = uniform_bound_audit(sol, t0, eps, param<int>(c, "samples", 6), c.seed());
  json rows = json::array();
  for (const auto& r : ub.rows)
    rows.push_back({{"t", r.t}, {"l2", r.l2}, {"cs_monitor", r.cs_monitor}, {"quotient_monitor", r.quotient_monitor}});
  a.report["uniform_bound"] = {{"t0", t0},           {"eps", eps},       {"rows", rows},
                               {"cs_max_at_t0", ub.cs_max_at_t0}, {"quotient_max_at_t0", ub.quotient_max_at_t0},
                               {"c1", ub.c1},        {"c2", ub.c2}};
  const double c0 = weyl_c0(st.measure, st.domain, c);
  json tail;
  try {
    const auto tb = tail_bound(sol.eig->values, c0, n, s, w, t0);
    tail = {{"t0", t0},       {"w", w},           {"beta", tb.beta},   {"k0", tb.k0},
            {"c0", tb.c0},    {"bound", tb.bound}, {"direct_sum", tb.direct_sum},
            {"k_max", tb.k_max}, {"envelope_ok", tb.envelope_ok}, {"dominates", tb.dominates}};
  } catch (const NumericalError& e) {
    tail = {{"t0", t0}, {"w", w}, {"c0", c0}, {"error", e.what()}};
  }
  a.report["tail_bound"] = tail;
  return a;
}

Artifacts cmd_boundary(const RunConfig& c) {
  const auto st = setup(c);
  const double s = st.measure.order();
  const std::string source = param<std::string>(c, "source", "elliptic");
  Eigen::VectorXd u;
  if (source == "elliptic") {
    u = solve_dirichlet(*st.matrices, Eigen::VectorXd::Ones(st.matrices->size()));
  } else if (source == "heat") {
    u = evaluate(heat_solution(st, c), param<double>(c, "t", 0.1));
  } else {
    throw ValidationError("params.source must be elliptic or heat");
  }
  const auto profile = quotient_profile(*st.grid, u, s);
  Artifacts a;
  a.table.columns = {"node", "x", "y", "delta", "u", "quotient"};
  for (std::size_t i = 0; i < st.grid->size(); ++i) {
    const Vec2 x = st.grid->node(i);
    const auto k = static_cast<Eigen::Index>(i);
    a.table.add({cell(i), cell(x(0)), cell(x(1)), cell(st.grid->delta()[i]), cell(u(k)), cell(profile.quotient(k))});
  }
  const double alpha = param<double>(c, "alpha", s - 0.05);
  const double beta_a = param<double>(c, "beta_a", s);
  const double beta_b = param<double>(c, "beta_b", alpha);
  const auto rho = param<std::vector<double>>(c, "rho", default_rho_ladder(*st.grid));
  const auto scan = hypothesis_scan(*st.grid, u, s, alpha, beta_a, beta_b, rho, c.seed());
  const auto scan_json = [](const SeminormScan& sc) {
    return json{{"beta", sc.beta},   {"expected_slope", sc.expected_slope}, {"rho", sc.rho},
                {"seminorm", sc.seminorm}, {"slope", sc.slope}, {"monotone", sc.monotone}, {"ok", sc.ok}};
  };
  a.report = base_report("boundary", c);
  a.report["source"] = source;
  a.report["trace"] = profile.trace;
  a.report["trace_alt"] = profile.trace_alt;
  a.report["uncertainty"] = profile.uncertainty;
  a.report["window"] = profile.window;
  a.report["converged"] = profile.converged;
  a.report["hypothesis_a"] = scan_json(scan.a);
  a.report["hypothesis_b"] = scan_json(scan.b);
  a.report["alpha"] = alpha;
  if (!st.domain.is_c11()) a.report["advisory"] = st.domain.advisory();
  return a;
}

Artifacts cmd_pohozaev(const RunConfig& c) {
  const auto st = setup(c);
  const std::string source = param<std::string>(c, "source", "elliptic");
  Eigen::VectorXd u, lu;
  double t = 0.0;
  if (source == "elliptic") {
    lu = Eigen::VectorXd::Ones(st.matrices->size());
    u = solve_dirichlet(*st.matrices, lu);
  } else if (source == "heat") {
    t = param<double>(c, "t", 0.1);
    const auto sol = heat_solution(st, c);
    u = evaluate(sol, t);
    lu = -time_derivative(sol, 1, t);
  } else {
    throw ValidationError("params.source must be elliptic or heat");
  }
  const auto origin = param<std::vector<double>>(c, "origin", {0.0, 0.0});
  if (origin.size() != 2) throw ValidationError("params.origin must have two coordinates");
  const auto r = pohozaev_residual(st.measure, *st.grid, u, lu, Vec2(origin[0], origin[1]));
  Artifacts a;
  a.table.columns = {"source", "t", "lhs", "interior", "boundary", "rhs", "residual", "trace_uncertainty"};
  a.table.add({source, cell(t), cell(r.lhs), cell(r.interior), cell(r.boundary), cell(r.rhs), cell(r.residual),
               cell(r.trace_uncertainty)});
  a.report = base_report("pohozaev", c);
  a.report["source"] = source;
  a.report["t"] = t;
  a.report["lhs"] = r.lhs;
  a.report["interior"] = r.interior;
  a.report["boundary"] = r.boundary;
  a.report["rhs"] = r.rhs;
  a.report["residual"] = r.residual;
  a.report["trace_uncertainty"] = r.trace_uncertainty;
  return a;
}

Artifacts cmd_bootstrap(const RunConfig& c) {
  const json& m = c.document.at("measure");
  if (!m.contains("n") || !m.contains("s")) throw ValidationError("bootstrap needs measure.n and measure.s");
  const int n = m.at("n").get<int>();
  const auto plan = m.at("s").is_string() ? bootstrap_exponents(n, m.at("s").get<std::string>())
                                          : bootstrap_exponents(n, m.at("s").get<double>());
  Artifacts a;
  a.table.columns = {"k", "p_exact", "p"};
  for (std::size_t k = 0; k < plan.exponents.size(); ++k)
    a.table.add({cell(k), plan.exponents[k], cell(plan.exponent_values[k])});
  a.report = base_report("bootstrap", c);
  a.report["n"] = plan.n;
  a.report["s"] = plan.s;
  a.report["branch"] = to_string(plan.branch);
  a.report["p"] = plan.exponent_values;
  a.report["p_exact"] = plan.exponents;
  a.report["critical_exponent"] = plan.critical_exponent;
  a.report["N"] = plan.steps;
  a.report["w"] = plan.w;
  a.report["reduction"] = plan.reduction;
  return a;
}

Artifacts cmd_kernel(const RunConfig& c) {
  const auto measure = parse_measure(c.document.at("measure"));
  if (!measure.is_fractional_laplacian())
    throw ValidationError("kernel computations are implemented for the isotropic symbol only");
  const double s = measure.order();
  const KernelProfile k(measure.dim(), s);
  const auto xs = param<std::vector<double>>(c, "x", {0.0, 0.25, 0.5, 1.0, 2.0, 4.0});
  const auto ts = param<std::vector<double>>(c, "t", {0.1, 1.0});
  Artifacts a;
  a.table.columns = {"x", "t", "p"};
  for (double t : ts)
    for (double x : xs) a.table.add({cell(x), cell(t), cell(k.heat_kernel(x, t))});
  a.report = base_report("kernel", c);
  json mass = json::array();
  for (double t : ts) mass.push_back({{"t", t}, {"mass", k.heat_kernel_mass(t)}});
  a.report["mass"] = mass;
  if (2 * s < measure.dim()) {
    json v = json::array();
    std::vector<double> positive;
    for (double x : xs)
      if (x != 0.0) {
        v.push_back({{"x", x}, {"V", k.fundamental_solution(x)}});
        positive.push_back(std::abs(x));
      }
    a.report["riesz_constant"] = riesz_constant(measure.dim(), s);
    a.report["fundamental_solution"] = v;
    if (!positive.empty()) a.report["fitted_c2"] = k.fitted_c2(positive);
  }
  return a;
}

Artifacts cmd_lp_check(const RunConfig& c) {
  const auto measure = parse_measure(c.document.at("measure"));
  const auto domain = parse_domain(c.document.at("domain"));
  const int n = measure.dim();
  const double s = measure.order();
  const double p = param<double>(c, "p", 2.0);
  const std::string declared_text = param<std::string>(c, "lp_case", to_string(lp_case_for(n, s, p)));
  const LpCase declared = parse_lp_case(declared_text);
  const int family_size = param<int>(c, "family_size", 12);
  const auto hs = param<std::vector<double>>(c, "h_ladder", {c.h()});
  std::vector<LpReport> reports;
  std::vector<double> spread;
  bool stable = true;
  if (hs.size() >= 2) {
    const auto ref = lp_refinement(measure, domain, hs, declared, p, family_size, c.seed(), c.assembly());
    reports = ref.reports;
    spread = ref.spread;
    stable = ref.stable;
  } else {
    auto grid = std::make_shared<const DomainGrid>(DomainGrid::build(domain, hs.at(0)));
    const auto mats = assemble(measure, grid, c.assembly());
    reports.push_back(lp_estimate_check(mats, declared, p, lp_family(domain, family_size, c.seed())));
  }
  Artifacts a;
  a.table.columns = {"h", "datum", "kind", "g_norm", "q", "u_norm", "ratio"};
  json per_h = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    for (const auto& row : r.rows)
      for (std::size_t j = 0; j < r.q.size(); ++j)
        a.table.add({cell(hs[i]), cell(row.index), to_string(row.kind), cell(row.g_norm), cell(r.q[j]),
                     cell(row.u_norm[j]), cell(row.ratio[j])});
    json q = json::array();
    for (double v : r.q) q.push_back(std::isinf(v) ? json("inf") : json(v));
    per_h.push_back({{"h", hs[i]},
                     {"q", q},
                     {"max_ratio", r.max_ratio},
                     {"min_ratio", r.min_ratio},
                     {"skipped", r.skipped},
                     {"linearity_defect", r.linearity_defect},
                     {"comparison_defect", r.comparison_defect}});
  }
  a.report = base_report("lp-check", c);
  a.report["lp_case"] = to_string(declared);
  a.report["p"] = p;
  a.report["reports"] = per_h;
  if (!spread.empty()) {
    a.report["spread"] = spread;
    a.report["stable"] = stable;
  }
  return a;
}

// ---- audit ----------------------------------------------------------------

Artifacts audit_metrics(const std::vector<audit::CriterionResult>& results, const RunConfig& c) {
  Artifacts a;
  a.table.columns = {"criterion", "name", "passed", "metric", "value"};
  json crit = json::array();
  for (const auto& r : results) {
    json metrics = json::object();
    for (const auto& m : r.metrics) {
      a.table.add({cell(r.id), r.name, cell(r.passed), m.name, cell(m.value)});
      metrics[m.name] = m.value;
    }
    crit.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"summary", r.summary}, {"metrics", metrics}});
  }
  a.report = base_report("audit-metrics", c);
  a.report["criteria"] = crit;
  return a;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"symbol", "weyl",      "eig",     "evolve",   "boundary",
                                                 "pohozaev", "bootstrap", "kernel", "lp-check", "audit-all"};
  return names;
}

Artifacts run_command(const std::string& command, const RunConfig& config) {
  if (command == "symbol") return cmd_symbol(config);
  if (command == "weyl") return cmd_weyl(config);
  if (command == "eig") return cmd_eig(config);
  if (command == "evolve") return cmd_evolve(config);
  if (command == "boundary") return cmd_boundary(config);
  if (command == "pohozaev") return cmd_pohozaev(config);
  if (command == "bootstrap") return cmd_bootstrap(config);
  if (command == "kernel") return cmd_kernel(config);
  if (command == "lp-check") return cmd_lp_check(config);
  throw ValidationError("unknown command '" + command + "'");
}

AuditOutcome audit_all(const RunConfig& config, const std::function<void(const audit::CriterionResult&)>& on_result) {
  audit::Options options;
  options.seed = config.seed();
  options.threads = std::max(1, config.threads());
  options.on_result = on_result;
  AuditOutcome out;
  out.results = audit::run_all(options);
  out.metrics = audit_metrics(out.results, config);
  const auto first = write_artifacts(config.out(), "audit-metrics", config.hash, out.metrics);

  // Second, silent run into a scratch directory for the determinism check.
  options.on_result = {};
  const auto rerun = audit_metrics(audit::run_all(options), config);
  const std::string scratch = (std::filesystem::path(config.out()) / (".rerun-" + config.hash)).string();
  const auto second = write_artifacts(scratch, "audit-metrics", config.hash, rerun);
  const bool same_csv = slurp(first.csv) == slurp(second.csv);
  const bool same_json = slurp(first.json) == slurp(second.json);
  std::filesystem::remove_all(scratch);

  audit::CriterionResult det;
  det.id = 15;
  det.name = "determinism";
  det.passed = same_csv && same_json;
  det.metrics = {{"csv_identical", same_csv ? 1.0 : 0.0}, {"json_identical", same_json ? 1.0 : 0.0}};
  det.summary = std::string("two runs: CSV ") + (same_csv ? "identical" : "DIFFERENT") + ", JSON " +
                (same_json ? "identical" : "DIFFERENT");
  if (on_result) on_result(det);
  out.results.push_back(det);

  out.all_passed = true;
  out.summary.table.columns = {"criterion", "name", "passed", "summary"};
  json crit = json::array();
  for (const auto& r : out.results) {
    out.all_passed = out.all_passed && r.passed;
    out.summary.table.add({cell(r.id), r.name, cell(r.passed), r.summary});
    crit.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"summary", r.summary}});
  }
  out.summary.report = base_report("audit-all", config);
  out.summary.report["criteria"] = crit;
  out.summary.report["all_passed"] = out.all_passed;
  write_artifacts(config.out(), "audit-all", config.hash, out.summary);
  return out;
}

}  // namespace fracheat::cli
