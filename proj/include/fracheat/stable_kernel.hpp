#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace fracheat {

using Vec2 = Eigen::Vector2d;

/// One arc [from, to) of a piecewise-constant angular density, in radians.
struct ArcSegment {
  double from = 0.0;
  double to = 0.0;
  double weight = 0.0;
};

enum class SymmetryMode {
  Strict,    ///< reject densities with a(theta) != a(-theta)
  Complete,  ///< replace a by (a(theta) + a(theta + pi)) / 2
};

/// Spectral measure of a symmetric stable operator of order 2s.
///
/// For n = 1 the sphere is {+1, -1} and the measure is a pair of atoms.  For
/// n = 2 the density is piecewise constant on arcs of S^1, stored in
/// canonical form: sorted, non-overlapping, covering [0, 2pi) (zero-weight
/// gaps included) and invariant under theta -> theta + pi.
///
/// The associated operator is normalized so that its Fourier symbol is
/// exactly A(xi) = int |xi . theta|^{2s} a(theta) dtheta.
class SpectralMeasure {
 public:
  static SpectralMeasure one_dimensional(double s, double a_plus, double a_minus,
                                         double lambda2,
                                         SymmetryMode mode = SymmetryMode::Strict);
  static SpectralMeasure planar(double s, std::vector<ArcSegment> segments,
                                double lambda2,
                                SymmetryMode mode = SymmetryMode::Strict);
  /// Constant density with A(xi) = |xi|^{2s}: the fractional Laplacian.
  static SpectralMeasure fractional_laplacian(int n, double s);

  int dim() const { return n_; }
  double order() const { return s_; }
  double lambda2() const { return lambda2_; }
  double weight_plus() const { return a_plus_; }
  double weight_minus() const { return a_minus_; }
  const std::vector<ArcSegment>& segments() const { return segments_; }

  /// a(theta) for n = 2; for n = 1, theta = 0 means +1 and theta = pi means -1.
  double density(double theta) const;
  /// mu_2 = int a(theta) dtheta.
  double total_mass() const;
  /// True when the symbol is |xi|^{2s} to 1e-12 relative.
  bool is_fractional_laplacian() const;

  SpectralMeasure with_order(double s) const;

 private:
  SpectralMeasure() = default;

  int n_ = 1;
  double s_ = 0.5;
  double lambda2_ = 1.0;
  double a_plus_ = 0.0;
  double a_minus_ = 0.0;
  std::vector<ArcSegment> segments_;
};

/// \int_0^x |cos u|^{2s} du for any real x (odd extension for x < 0).
double cosine_power_integral(double x, double s);

/// Evaluates the symbol A(xi) of a spectral measure.
///
/// The angular integral is done in closed form per arc through the incomplete
/// beta function, so A(nu xi) = nu^{2s} A(xi) holds to roundoff.
class SymbolProfile {
 public:
  explicit SymbolProfile(SpectralMeasure measure, int quadrature_order = 16);

  const SpectralMeasure& measure() const { return measure_; }
  int quadrature_order() const { return quadrature_order_; }

  /// A(xi); xi(1) is ignored for n = 1.
  double operator()(const Vec2& xi) const;
  /// A on the unit circle as a function of the direction angle.
  double angular(double phi) const;

 private:
  SpectralMeasure measure_;
  int quadrature_order_;
};

double symbol(const SymbolProfile& profile, const Vec2& xi);

struct Ellipticity {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double argmin_angle = 0.0;  ///< direction attaining mu1 (n = 2)
};

/// Number of equispaced directions scanned before polishing the minimum.
inline constexpr int kEllipticityDirections = 4096;

/// mu_1 = inf_nu A(nu) over unit nu, mu_2 = total mass.  Throws
/// ValidationError if mu_1 <= tolerance (non-elliptic measure).
Ellipticity ellipticity(const SpectralMeasure& measure, double tolerance = 1e-12);

struct SecondDifferenceReport {
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  double min_slack = 0.0;   ///< min over trials of 2|eta|^{2s} mu2 - second difference
  double max_ratio = 0.0;   ///< max of second difference / (2|eta|^{2s} mu2)
  Vec2 worst_xi = Vec2::Zero();
  Vec2 worst_eta = Vec2::Zero();
};

/// A(xi + eta) + A(xi - eta) - 2 A(xi) <= 2 |eta|^{2s} mu_2 on random pairs.
SecondDifferenceReport second_difference_certificate(const SymbolProfile& profile,
                                                     std::int64_t trials,
                                                     std::uint64_t seed,
                                                     double tolerance = 1e-10);

/// Second difference of A at (xi, eta) and its bound 2|eta|^{2s} mu2.
std::pair<double, double> second_difference(const SymbolProfile& profile, double mu2,
                                            const Vec2& xi, const Vec2& eta);

/// 2 a^{2s} + 2 b^{2s} >= (a + b)^{2s} + (a - b)^{2s} for a >= b >= 0.
bool power_concavity(double a, double b, double s, double tolerance = 1e-12);

struct WeylConstant {
  double c0 = 0.0;
  double lower = 0.0;     ///< C(mu_1)
  double upper = 0.0;     ///< C(mu_2)
  double volume = 0.0;    ///< V_L = |{A < 1}|
  double volume_sigma = 0.0;
  double c0_sigma = 0.0;  ///< Monte Carlo standard error of c0 (0 when exact)
  std::int64_t samples = 0;
  bool sandwich_ok = false;
};

/// Weyl constant (2 pi)^{2s} |Omega|^{-2s/n} V_L^{-2s/n} and its bounds
/// C(mu) = (2 pi)^{2s} |Omega|^{-2s/n} |B(mu^{-1/2s})|^{-2s/n}.
/// V_L is exact for n = 1; for n = 2 it is a seeded Monte Carlo estimate over
/// the disk of radius mu_1^{-1/2s}.  Throws NumericalError when the sandwich
/// is violated by more than 3 sigma.
WeylConstant weyl_constant(const SymbolProfile& profile, double domain_volume,
                           std::int64_t mc_samples, std::uint64_t seed);

/// C(mu) for a measure of dimension n and order s.
double weyl_bound(int n, double s, double domain_volume, double mu);

/// Volume of the n-ball of radius r, n in {1, 2}.
double ball_volume(int n, double r);

}  // namespace fracheat
