#include "fracheat/heat_evolution.hpp"

#include "fracheat/boundary_analysis.hpp"
#include "fracheat/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fracheat {

namespace {

void check_size(const HeatSolution& sol, const Eigen::VectorXd& u) {
  if (static_cast<std::size_t>(u.size()) != sol.eig->grid().size())
    throw ValidationError("grid function size does not match the grid");
}

// Weighted sum of eigenvectors: sum_k w_k u_k phi_k.
Eigen::VectorXd combine(const HeatSolution& sol, const Eigen::VectorXd& weights) {
  return sol.eig->vectors * weights.cwiseProduct(sol.coefficients);
}

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a; sy += b; sxx += a * a; sxy += a * b;
  }
  const double denom = n * sxx - sx * sx;
  return denom > 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

}  // namespace

double HeatSolution::bessel_defect() const {
  return initial_norm * initial_norm - coefficients.squaredNorm();
}

HeatSolution project(std::shared_ptr<const EigenSystem> eig, const Eigen::VectorXd& u0) {
  HeatSolution sol;
  sol.eig = std::move(eig);
  check_size(sol, u0);
  const Eigen::VectorXd mu = sol.eig->matrices->mass * u0;
  sol.coefficients = sol.eig->vectors.transpose() * mu;
  sol.initial = u0;
  sol.initial_norm = std::sqrt(std::max(0.0, u0.dot(mu)));
  return sol;
}

Eigen::VectorXd evaluate(const HeatSolution& sol, double t) {
  return time_derivative(sol, 0, t);
}

Eigen::VectorXd time_derivative(const HeatSolution& sol, int j, double t) {
  if (j < 0) throw ValidationError("derivative order must be nonnegative");
  if (t < 0.0) throw ValidationError("time must be nonnegative");
  const auto& lambda = sol.eig->values;
  Eigen::VectorXd weights(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    const double log_w = j * std::log(lambda(k)) - lambda(k) * t;
    if (log_w > 700.0) {
      std::ostringstream os;
      os << "lambda^" << j << " exp(-lambda t) overflows at t = " << t;
      throw NumericalError(os.str());
    }
    weights(k) = std::exp(log_w);
  }
  Eigen::VectorXd out = combine(sol, weights);
  if (j % 2) out = -out;
  return out;
}

std::vector<double> l2_decay(const HeatSolution& sol, const std::vector<double>& t) {
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    if (!(t[i] < t[i + 1])) throw ValidationError("time grid must be increasing");
  std::vector<double> out;
  out.reserve(t.size());
  const auto& lambda = sol.eig->values;
  for (double ti : t) {
    if (ti < 0.0) throw ValidationError("time must be nonnegative");
    double sum = 0.0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k)
      sum += sol.coefficients(k) * sol.coefficients(k) * std::exp(-2.0 * lambda(k) * ti);
    out.push_back(std::sqrt(sum));
  }
  return out;
}

int find_k0(const Eigen::VectorXd& lambda, double c0, double gamma, int run) {
  const int m = static_cast<int>(lambda.size());
  int streak = 0;
  for (int k = 1; k <= m; ++k) {
    const double env = c0 * std::pow(static_cast<double>(k), gamma);
    const double l = lambda(k - 1);
    streak = (l >= 0.5 * env && l <= 1.5 * env) ? streak + 1 : 0;
    if (streak == run) return k - run + 1;
  }
  return 0;
}

double tail_bound_value(double c0, int n, double s, int w, double t0, int k0) {
  if (!(t0 > 0.0)) throw ValidationError("t0 must be positive");
  if (k0 < 0) throw ValidationError("k0 must be nonnegative");
  const double gamma = 2.0 * s / n;
  const double a = w + n / (2.0 * s);  // beta + 1
  const double x = 0.5 * c0 * t0 * std::pow(static_cast<double>(k0), gamma);
  double log_gamma_upper;
  if (x == 0.0) {
    log_gamma_upper = boost::math::lgamma(a);
  } else {
    const double q = boost::math::gamma_q(a, x);
    if (q == 0.0) return 0.0;
    log_gamma_upper = std::log(q) + boost::math::lgamma(a);
  }
  const double log_prefactor = w * std::log(1.5 * c0) + a * std::log(2.0) - std::log(gamma) -
                               a * std::log(c0 * t0);
  return std::exp(log_prefactor + log_gamma_upper);
}

TailBound tail_bound(const Eigen::VectorXd& lambda, double c0, int n, double s, int w, double t0,
                     int k0) {
  TailBound tb;
  tb.t0 = t0;
  tb.w = w;
  tb.gamma = 2.0 * s / n;
  tb.beta = w + n / (2.0 * s) - 1.0;
  tb.c0 = c0;
  if (k0 < 0) {
    k0 = find_k0(lambda, c0, tb.gamma);
    if (k0 == 0)
      throw NumericalError("no index where the eigenvalues stay within the Weyl envelope band");
  }
  tb.k0 = k0;
  tb.bound = tail_bound_value(c0, n, s, w, t0, k0);
  tb.k_max = static_cast<int>(lambda.size());
  tb.envelope_ok = true;
  for (int k = std::max(k0, 1); k <= tb.k_max; ++k) {
    const double l = lambda(k - 1);
    const double env = c0 * std::pow(static_cast<double>(k), tb.gamma);
    if (l < 0.5 * env || l > 1.5 * env) tb.envelope_ok = false;
    tb.direct_sum += std::exp(w * std::log(l) - l * t0);
  }
  tb.dominates = tb.bound >= tb.direct_sum;
  return tb;
}

UniformBoundAudit uniform_bound_audit(const HeatSolution& sol, double t0, double eps,
                                      int samples, std::uint64_t seed) {
  if (!(t0 > 0.0)) throw ValidationError("t0 must be positive");
  if (samples < 1) throw ValidationError("at least one time sample is needed");
  const auto& grid = sol.eig->grid();
  const double s = sol.eig->matrices->measure.order();
  if (!(eps > 0.0 && eps < s)) throw ValidationError("eps must lie in (0, s)");

  // Zero extension: boundary points carry the value 0.
  std::vector<Vec2> ext_points = grid.nodes();
  const auto& bq = grid.boundary();
  ext_points.insert(ext_points.end(), bq.points.begin(), bq.points.end());
  auto region = grid.inner_region(8.0 * grid.spacing());
  if (region.size() < 2) {
    region.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) region[i] = i;
  }

  UniformBoundAudit audit;
  audit.t0 = t0;
  audit.eps = eps;
  double t = t0;
  for (int i = 0; i < samples; ++i, t *= 2.0) {
    const Eigen::VectorXd u = evaluate(sol, t);
    UniformBoundRow row;
    row.t = t;
    row.l2 = std::sqrt(u.dot(sol.eig->matrices->mass * u));
    Eigen::MatrixXd ext = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ext_points.size()), 1);
    ext.col(0).head(u.size()) = u;
    row.cs_monitor = holder_seminorm(ext_points, ext, s, seed).value;
    Eigen::VectorXd q(u.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
      q(static_cast<Eigen::Index>(k)) = u(static_cast<Eigen::Index>(k)) / std::pow(grid.delta()[k], s);
    row.quotient_monitor = holder_seminorm(grid, q, region, s - eps, seed).value;
    audit.rows.push_back(row);
  }
  const auto& r = audit.rows;
  audit.cs_max_at_t0 = std::all_of(r.begin(), r.end(), [&](const UniformBoundRow& x) {
    return x.cs_monitor <= r.front().cs_monitor * (1.0 + 1e-12);
  });
  audit.quotient_max_at_t0 = std::all_of(r.begin(), r.end(), [&](const UniformBoundRow& x) {
    return x.quotient_monitor <= r.front().quotient_monitor * (1.0 + 1e-12);
  });
  if (sol.initial_norm > 0.0) {
    audit.c1 = r.front().cs_monitor / sol.initial_norm;
    audit.c2 = r.front().quotient_monitor / sol.initial_norm;
  }
  return audit;
}

BlowupFit blowup_fit(const HeatSolution& sol, const std::vector<double>& t0, double eps, int w,
                     std::uint64_t seed) {
  if (t0.size() < 2) throw ValidationError("blow-up fit needs at least two t0 values");
  if (!(sol.initial_norm > 0.0)) throw ValidationError("initial datum is zero");
  const auto& measure = sol.eig->matrices->measure;
  BlowupFit fit;
  fit.t0 = t0;
  fit.predicted = w + measure.dim() / (2.0 * measure.order());
  for (double t : t0) {
    const auto audit = uniform_bound_audit(sol, t, eps, 1, seed);
    fit.c1.push_back(audit.c1);
    fit.c2.push_back(audit.c2);
  }
  fit.exponent_c1 = -fit_log_slope(fit.t0, fit.c1);
  fit.exponent_c2 = -fit_log_slope(fit.t0, fit.c2);
  fit.within = fit.exponent_c1 <= fit.predicted + 0.5 && fit.exponent_c2 <= fit.predicted + 0.5;
  return fit;
}

}  // namespace fracheat
