#pragma once

#include "fracheat/discrete_operator.hpp"
#include "fracheat/functions.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace fracheat {

/// C_{n,s} = Gamma(n/2 - s) / (4^s pi^{n/2} Gamma(s)), the constant for which
/// I_{2s} inverts the operator with symbol |xi|^{2s}.  Requires n > 2s.
double riesz_constant(int n, double s);

/// Kernels of the isotropic operator with symbol |xi|^{2s} in one dimension.
class KernelProfile {
 public:
  /// Throws ValidationError unless n = 1 and 0 < s < 1.
  KernelProfile(int n, double s, double tolerance = 1e-10);

  int dim() const { return n_; }
  double order() const { return s_; }

  /// p(x, t) = (1/pi) int_0^inf cos(xi x) exp(-xi^{2s} t) dxi, evaluated as
  /// t^{-1/2s} p(t^{-1/2s} x, 1).  Throws NumericalError if the inversion does
  /// not converge.
  double heat_kernel(double x, double t) const;

  /// int p(x, t) dx: twice the sine transform int_0^X p plus the tail from the
  /// large-|x| expansion of p.
  double heat_kernel_mass(double t) const;

  /// V(x) = int_0^inf p(x, t) dt.  With y = |x| t^{-1/2s} this is
  /// 2s |x|^{2s-1} int_0^inf y^{-2s} p(y, 1) dy.  Requires s < 1/2 (n > 2s);
  /// otherwise ValidationError, since n <= 2s forces n = 1, s >= 1/2, where no
  /// decaying fundamental solution exists.
  double fundamental_solution(double x) const;

  /// sup over the sampled |x| of V(x) |x|^{1-2s}.
  double fitted_c2(const std::vector<double>& x) const;

 private:
  double kernel_unit(double y) const;  // p(y, 1)
  double tail_series(double y0, double shift) const;
  double unit_potential() const;       // int_0^inf y^{-2s} p(y, 1) dy

  struct Cache;

  int n_;
  double s_;
  double tolerance_;
  std::shared_ptr<Cache> cache_;
};

/// (I_{2s} f)(x) = C_{n,s} int f(y) |x - y|^{2s-n} dy in polar coordinates
/// about x: a Gauss-Jacobi rule for r^{2s-1} on the first radial piece,
/// adaptive Gauss-Kronrod beyond it, and Gauss-Legendre angular panels when
/// n = 2.
double riesz_potential(const CompactFunction& f, const Vec2& x, double s,
                       double tolerance = 1e-10, int angular_panels = 32);

enum class LpCase { A, B, C };

std::string to_string(LpCase c);
LpCase parse_lp_case(const std::string& text);

/// The case implied by p against n/(2s): p < n/2s is (a), p = n/2s is (b),
/// p > n/2s is (c).
LpCase lp_case_for(int n, double s, double p);

enum class DatumKind { Bump, Indicator, Oscillatory };

std::string to_string(DatumKind k);

/// A member of the test family, defined on the continuum so the same datum
/// can be sampled on every grid.
struct Datum {
  DatumKind kind = DatumKind::Bump;
  Vec2 center = Vec2::Zero();
  double radius = 0.0;     ///< bump radius or indicator half-width
  double amplitude = 1.0;
  double frequency = 0.0;  ///< oscillatory only
  double operator()(const Vec2& x) const;
};

/// family_size seeded data cycling bump, indicator, oscillatory, with centers
/// inside Omega_{diameter/8}.
std::vector<Datum> lp_family(const Domain& domain, int family_size, std::uint64_t seed);

/// Node-quadrature norms: (h^n sum |f|^p)^{1/p}; p = infinity gives max |f|.
double discrete_lp_norm(const Eigen::VectorXd& f, double h, int n, double p);

struct LpRow {
  int index = 0;
  DatumKind kind = DatumKind::Bump;
  double g_norm = 0.0;
  std::vector<double> u_norm;  ///< one per q
  std::vector<double> ratio;
};

struct LpReport {
  LpCase lp_case = LpCase::C;
  double p = 0.0;
  std::vector<double> q;      ///< target exponents; infinity for (c)
  std::vector<LpRow> rows;
  std::vector<double> max_ratio;  ///< empirical C per q
  std::vector<double> min_ratio;
  int skipped = 0;  ///< data with ||g||_p = 0
  /// max |2 solve(g) - solve(2g)| / max |solve(g)| over the family.
  double linearity_defect = 0.0;
  /// max over sign-changing data of max(|u| - v, 0) / max v, with u the
  /// solution for g and v the solution for |g|.
  double comparison_defect = 0.0;
};

/// Solves Lu = g for each datum and reports ||u||_q / ||g||_p.  q = np/(n - 2ps)
/// in case (a), q in {4, 8, 16} in case (b), q = infinity in case (c).  A
/// declared case that does not match p throws ValidationError.
LpReport lp_estimate_check(const OperatorMatrices& matrices, LpCase declared, double p,
                           const std::vector<Datum>& family);

struct LpRefinement {
  std::vector<double> h;
  std::vector<LpReport> reports;
  std::vector<double> spread;  ///< per q: (max - min) / min of the empirical C across h
  bool stable = false;         ///< every spread <= 10%
};

LpRefinement lp_refinement(const SpectralMeasure& measure, const Domain& domain,
                           const std::vector<double>& h, LpCase declared, double p,
                           int family_size, std::uint64_t seed,
                           const AssemblyOptions& options = {});

}  // namespace fracheat
