#include "fracheat/spectral_solver.hpp"

#include "fracheat/errors.hpp"

#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace fracheat {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

std::string rational_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << '/' << denominator(r);
  return os.str();
}

// Best rational approximation with denominator <= 10^6 by continued fractions.
Rational rational_from_double(double x) {
  const std::int64_t max_den = 1000000;
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double rest = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_real = std::floor(rest);
    if (a_real > 1e12) break;
    const auto a = static_cast<std::int64_t>(a_real);
    const std::int64_t h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= 1e-15) break;
    const double frac = rest - a_real;
    if (frac <= 0.0) break;
    rest = 1.0 / frac;
  }
  if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) > 1e-12) {
    std::ostringstream os;
    os << "order s = " << x << " has no rational form with denominator <= 1e6; pass it as a string";
    throw ValidationError(os.str());
  }
  return Rational(Integer(h1), Integer(k1));
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos)
      return Rational(Integer(text.substr(0, slash)), Integer(text.substr(slash + 1)));
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(Integer(text));
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const Integer digits(whole.empty() || whole == "-" ? "0" : whole);
    const Integer tail(frac.empty() ? "0" : frac);
    const bool negative = !text.empty() && text[0] == '-';
    const Integer mag = abs(digits) * scale + tail;
    return Rational(negative ? Integer(-mag) : mag, scale);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse '" + text + "' as a rational number");
  }
}

BootstrapPlan bootstrap_rational(int n, const Rational& s) {
  if (n < 1) throw ValidationError("dimension n must be at least 1");
  if (!(s > 0 && s < 1)) throw ValidationError("order s must lie in (0, 1)");
  BootstrapPlan plan;
  plan.n = n;
  plan.s = rational_string(s);
  const Rational nn(n);
  const Rational critical = nn / (2 * s);
  plan.critical_exponent = rational_string(critical);
  plan.reduction = nn <= 2 * s;

  Rational p(2);
  std::vector<Rational> seq{p};
  while (nn > 2 * p * s) {
    p = nn * p / (nn - 2 * p * s);
    seq.push_back(p);
  }
  plan.steps = static_cast<int>(seq.size()) - 1;
  plan.w = p > critical ? plan.steps + 2 : plan.steps + 3;
  if (critical < 2) plan.branch = BootstrapBranch::Subcritical;
  else if (critical == 2) plan.branch = BootstrapBranch::Critical;
  else plan.branch = BootstrapBranch::Supercritical;
  if (plan.reduction) plan.w = 2;
  for (const auto& q : seq) {
    plan.exponents.push_back(rational_string(q));
    plan.exponent_values.push_back(static_cast<double>(q));
  }
  return plan;
}

}  // namespace

EigenSystem eigenpairs(std::shared_ptr<const OperatorMatrices> matrices, std::size_t m) {
  const std::size_t size = matrices->size();
  if (m == 0 || m > size) {
    std::ostringstream os;
    os << "requested " << m << " eigenpairs but the grid has " << size << " nodes";
    throw ValidationError(os.str());
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      matrices->stiffness, matrices->mass, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw NumericalError("generalized eigensolver did not converge");

  EigenSystem eig;
  eig.values = solver.eigenvalues().head(static_cast<Eigen::Index>(m));
  eig.vectors = solver.eigenvectors().leftCols(static_cast<Eigen::Index>(m));
  for (Eigen::Index k = 0; k < eig.vectors.cols(); ++k) {
    auto col = eig.vectors.col(k);
    const double tol = 1e-8 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > tol) {
        if (col(i) < 0.0) col *= -1.0;
        break;
      }
    }
  }

  const auto& K = matrices->stiffness;
  const auto& M = matrices->mass;
  for (Eigen::Index k = 0; k < eig.vectors.cols(); ++k) {
    const Eigen::VectorXd kv = K * eig.vectors.col(k);
    const double res = (kv - eig.values(k) * (M * eig.vectors.col(k))).norm() / kv.norm();
    eig.max_residual = std::max(eig.max_residual, res);
    if (!(eig.values(k) > 0.0)) {
      std::ostringstream os;
      os << "eigenvalue " << k + 1 << " is not positive: " << eig.values(k);
      throw NumericalError(os.str());
    }
  }
  const Eigen::MatrixXd gram = eig.vectors.transpose() * M * eig.vectors;
  eig.orthonormality_defect =
      (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (eig.max_residual > 1e-8 || eig.orthonormality_defect > 1e-8) {
    std::ostringstream os;
    os << "eigenpair check failed: residual " << eig.max_residual << ", orthonormality "
       << eig.orthonormality_defect;
    throw NumericalError(os.str());
  }
  eig.matrices = std::move(matrices);
  return eig;
}

WeylAudit weyl_audit(const EigenSystem& eig, const WeylConstant& weyl,
                     std::optional<std::pair<int, int>> k_range) {
  const int m = static_cast<int>(eig.count());
  WeylAudit audit;
  if (k_range) {
    audit.k_lo = k_range->first;
    audit.k_hi = k_range->second;
  } else {
    audit.k_lo = std::max(1, m / 3);
    audit.k_hi = std::max(audit.k_lo, 5 * m / 6);
  }
  if (audit.k_lo < 1 || audit.k_hi < audit.k_lo || audit.k_hi > m) {
    std::ostringstream os;
    os << "Weyl window [" << audit.k_lo << ", " << audit.k_hi << "] does not fit " << m
       << " eigenvalues";
    throw ValidationError(os.str());
  }
  const auto& measure = eig.matrices->measure;
  const double gamma = 2.0 * measure.order() / measure.dim();
  std::vector<double> ratios;
  for (int k = audit.k_lo; k <= audit.k_hi; ++k) {
    const double lambda = eig.values(k - 1);
    const double ratio = lambda * std::pow(static_cast<double>(k), -gamma);
    audit.rows.push_back({k, lambda, ratio});
    ratios.push_back(ratio);
  }
  audit.median = median_of(ratios);
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  audit.drift = (*hi - *lo) / audit.median;
  const std::size_t quarter = std::max<std::size_t>(2, ratios.size() / 4);
  const double top_a = ratios[ratios.size() - quarter];
  const double top_b = ratios.back();
  audit.discretization_warning = std::abs(top_b - top_a) / audit.median > 0.05;

  audit.c0 = weyl.c0;
  audit.lower = weyl.lower;
  audit.upper = weyl.upper;
  audit.sandwich_ok = weyl.sandwich_ok;
  audit.sandwich_equality = std::abs(weyl.upper - weyl.lower) <= 1e-12 * weyl.upper;
  audit.relative_error = std::abs(audit.median - weyl.c0) / weyl.c0;
  return audit;
}

SupNormAudit sup_norm_audit(const EigenSystem& eig, int w) {
  SupNormAudit audit;
  audit.w = w;
  const auto& M = eig.matrices->mass;
  const double volume = eig.grid().domain().volume();
  audit.lower_bound_ok = true;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto count = static_cast<double>(eig.count());
  for (std::size_t k = 0; k < eig.count(); ++k) {
    const auto phi = eig.vectors.col(static_cast<Eigen::Index>(k));
    SupNormRow row;
    row.k = static_cast<int>(k) + 1;
    row.lambda = eig.values(static_cast<Eigen::Index>(k));
    row.sup = phi.cwiseAbs().maxCoeff();
    row.l2 = std::sqrt(phi.dot(M * phi));
    row.ratio = row.sup / row.l2;
    row.implied_constant = row.ratio / std::pow(row.lambda, w - 1);
    audit.implied_constant = std::max(audit.implied_constant, row.implied_constant);
    audit.lower_bound_ok = audit.lower_bound_ok && row.ratio >= (1.0 - 1e-12) / std::sqrt(volume);
    const double x = std::log(row.lambda), y = std::log(row.ratio);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    audit.rows.push_back(row);
  }
  const double denom = count * sxx - sx * sx;
  audit.slope = denom > 0.0 ? (count * sxy - sx * sy) / denom : 0.0;
  audit.intercept = (sy - audit.slope * sx) / count;
  audit.slope_ok = audit.slope <= w - 1 + 0.1 && std::isfinite(audit.implied_constant);
  return audit;
}

std::string to_string(BootstrapBranch branch) {
  switch (branch) {
    case BootstrapBranch::Subcritical: return "subcritical";
    case BootstrapBranch::Critical: return "critical";
    case BootstrapBranch::Supercritical: return "supercritical";
  }
  return "";
}

BootstrapPlan bootstrap_exponents(int n, double s) {
  return bootstrap_rational(n, rational_from_double(s));
}

BootstrapPlan bootstrap_exponents(int n, const std::string& s) {
  return bootstrap_rational(n, parse_rational(s));
}

}  // namespace fracheat
