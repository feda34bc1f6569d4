#include "fracheat/stable_kernel.hpp"

#include "fracheat/errors.hpp"
#include "fracheat/random.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fracheat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_order(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    std::ostringstream os;
    os << "stability order s must lie in (0,1), got " << s;
    throw ValidationError(os.str());
  }
}

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

struct Piece {
  double from;
  double to;
  double weight;
};

// Splits the user arcs into pieces inside [0, 2pi), sorted, rejecting overlap.
std::vector<Piece> normalize_arcs(const std::vector<ArcSegment>& arcs) {
  std::vector<Piece> pieces;
  for (const auto& arc : arcs) {
    if (!(arc.to > arc.from))
      throw ValidationError("arc segment must satisfy from < to");
    if (arc.to - arc.from > kTwoPi + 1e-12)
      throw ValidationError("arc segment longer than the full circle");
    if (arc.weight < 0.0) throw ValidationError("arc weight must be nonnegative");
    const double length = std::min(arc.to - arc.from, kTwoPi);
    const double start = wrap_angle(arc.from);
    const double end = start + length;
    if (end <= kTwoPi + 1e-14) {
      pieces.push_back({start, std::min(end, kTwoPi), arc.weight});
    } else {
      pieces.push_back({start, kTwoPi, arc.weight});
      pieces.push_back({0.0, end - kTwoPi, arc.weight});
    }
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return a.from < b.from; });
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    if (pieces[i].from < pieces[i - 1].to - 1e-12)
      throw ValidationError("arc segments overlap");
  }
  return pieces;
}

double lookup(const std::vector<Piece>& pieces, double theta) {
  for (const auto& p : pieces) {
    if (theta >= p.from && theta < p.to) return p.weight;
  }
  return 0.0;
}

}  // namespace

SpectralMeasure SpectralMeasure::one_dimensional(double s, double a_plus,
                                                 double a_minus, double lambda2,
                                                 SymmetryMode mode) {
  check_order(s);
  if (a_plus < 0.0 || a_minus < 0.0)
    throw ValidationError("atom weights must be nonnegative");
  if (std::abs(a_plus - a_minus) > 1e-12 * std::max(1.0, a_plus + a_minus)) {
    if (mode == SymmetryMode::Strict)
      throw ValidationError("spectral measure is not symmetric: a(+1) != a(-1)");
    const double mean = 0.5 * (a_plus + a_minus);
    a_plus = a_minus = mean;
  }
  if (a_plus > lambda2 * (1.0 + 1e-12) || a_minus > lambda2 * (1.0 + 1e-12))
    throw ValidationError("atom weight exceeds lambda2");
  SpectralMeasure m;
  m.n_ = 1;
  m.s_ = s;
  m.lambda2_ = lambda2;
  m.a_plus_ = a_plus;
  m.a_minus_ = a_minus;
  if (m.total_mass() <= 0.0) throw ValidationError("spectral measure has zero mass");
  return m;
}

SpectralMeasure SpectralMeasure::planar(double s, std::vector<ArcSegment> segments,
                                        double lambda2, SymmetryMode mode) {
  check_order(s);
  const auto pieces = normalize_arcs(segments);

  std::vector<double> breaks{0.0, kPi, kTwoPi};
  for (const auto& p : pieces) {
    for (double b : {p.from, p.to}) {
      breaks.push_back(b);
      breaks.push_back(wrap_angle(b + kPi));
    }
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> uniq;
  for (double b : breaks) {
    if (uniq.empty() || b - uniq.back() > 1e-13) uniq.push_back(b);
  }
  if (uniq.back() < kTwoPi) uniq.push_back(kTwoPi);
  uniq.back() = kTwoPi;

  std::vector<ArcSegment> canonical;
  for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
    const double mid = 0.5 * (uniq[i] + uniq[i + 1]);
    double w = lookup(pieces, mid);
    const double w_opposite = lookup(pieces, wrap_angle(mid + kPi));
    if (std::abs(w - w_opposite) > 1e-12 * std::max(1.0, w)) {
      if (mode == SymmetryMode::Strict)
        throw ValidationError(
            "spectral measure is not symmetric: a(theta) != a(theta + pi)");
      w = 0.5 * (w + w_opposite);
    }
    if (w > lambda2 * (1.0 + 1e-12))
      throw ValidationError("density exceeds lambda2");
    if (!canonical.empty() && canonical.back().weight == w) {
      canonical.back().to = uniq[i + 1];
    } else {
      canonical.push_back({uniq[i], uniq[i + 1], w});
    }
  }
  SpectralMeasure m;
  m.n_ = 2;
  m.s_ = s;
  m.lambda2_ = lambda2;
  m.segments_ = std::move(canonical);
  if (m.total_mass() <= 0.0) throw ValidationError("spectral measure has zero mass");
  return m;
}

SpectralMeasure SpectralMeasure::fractional_laplacian(int n, double s) {
  check_order(s);
  if (n == 1) return one_dimensional(s, 0.5, 0.5, 0.5);
  if (n == 2) {
    const double c = 1.0 / cosine_power_integral(kTwoPi, s);
    return planar(s, {{0.0, kTwoPi, c}}, c);
  }
  throw ValidationError("only n = 1 and n = 2 are supported");
}

double SpectralMeasure::density(double theta) const {
  if (n_ == 1) {
    const double t = wrap_angle(theta);
    if (std::abs(t) < 1e-14 || std::abs(t - kTwoPi) < 1e-14) return a_plus_;
    if (std::abs(t - kPi) < 1e-14) return a_minus_;
    return 0.0;
  }
  const double t = wrap_angle(theta);
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const ArcSegment& seg) { return v < seg.to; });
  if (it == segments_.end()) return segments_.back().weight;
  return it->weight;
}

double SpectralMeasure::total_mass() const {
  if (n_ == 1) return a_plus_ + a_minus_;
  double mass = 0.0;
  for (const auto& seg : segments_) mass += seg.weight * (seg.to - seg.from);
  return mass;
}

bool SpectralMeasure::is_fractional_laplacian() const {
  if (n_ == 1) return std::abs(a_plus_ + a_minus_ - 1.0) < 1e-12;
  const double c = 1.0 / cosine_power_integral(kTwoPi, s_);
  return std::all_of(segments_.begin(), segments_.end(), [c](const ArcSegment& seg) {
    return std::abs(seg.weight - c) < 1e-12 * c;
  });
}

SpectralMeasure SpectralMeasure::with_order(double s) const {
  check_order(s);
  SpectralMeasure m = *this;
  if (is_fractional_laplacian()) return fractional_laplacian(n_, s);
  m.s_ = s;
  return m;
}

double cosine_power_integral(double x, double s) {
  // Over one period pi the integral is B(1/2, s + 1/2); within [0, pi/2] it is
  // (1/2) B(sin^2 x; 1/2, s + 1/2).
  const double a = 0.5;
  const double b = s + 0.5;
  const double period = boost::math::beta(a, b);
  const double k = std::floor(x / kPi);
  const double r = x - k * kPi;
  double partial = 0.0;
  if (r <= 0.5 * kPi) {
    const double sn = std::sin(r);
    partial = 0.5 * boost::math::beta(a, b, sn * sn);
  } else {
    const double sn = std::sin(kPi - r);
    partial = period - 0.5 * boost::math::beta(a, b, sn * sn);
  }
  return k * period + partial;
}

SymbolProfile::SymbolProfile(SpectralMeasure measure, int quadrature_order)
    : measure_(std::move(measure)), quadrature_order_(quadrature_order) {
  if (quadrature_order_ < 1) throw ValidationError("quadrature order must be >= 1");
}

double SymbolProfile::angular(double phi) const {
  const double s = measure_.order();
  if (measure_.dim() == 1) return measure_.total_mass();
  double sum = 0.0;
  for (const auto& seg : measure_.segments()) {
    if (seg.weight == 0.0) continue;
    sum += seg.weight * (cosine_power_integral(seg.to - phi, s) -
                         cosine_power_integral(seg.from - phi, s));
  }
  return sum;
}

double SymbolProfile::operator()(const Vec2& xi) const {
  const double s = measure_.order();
  if (measure_.dim() == 1) {
    const double r = std::abs(xi(0));
    if (r == 0.0) return 0.0;
    return std::pow(r, 2.0 * s) * measure_.total_mass();
  }
  const double r = xi.norm();
  if (r == 0.0) return 0.0;
  return std::pow(r, 2.0 * s) * angular(std::atan2(xi(1), xi(0)));
}

double symbol(const SymbolProfile& profile, const Vec2& xi) { return profile(xi); }

Ellipticity ellipticity(const SpectralMeasure& measure, double tolerance) {
  Ellipticity e;
  e.mu2 = measure.total_mass();
  if (measure.dim() == 1) {
    e.mu1 = e.mu2;
  } else {
    const SymbolProfile profile(measure);
    // A is pi-periodic on the circle.
    const int count = kEllipticityDirections;
    const double step = kPi / count;
    std::vector<double> values(count);
    for (int j = 0; j < count; ++j) values[j] = profile.angular(j * step);

    std::vector<int> candidates;
    for (int j = 0; j < count; ++j) {
      const double prev = values[(j + count - 1) % count];
      const double next = values[(j + 1) % count];
      if (values[j] <= prev && values[j] <= next) candidates.push_back(j);
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](int a, int b) { return values[a] < values[b]; });
    if (candidates.size() > 8) candidates.resize(8);

    e.mu1 = values[candidates.front()];
    e.argmin_angle = candidates.front() * step;
    for (int j : candidates) {
      auto f = [&](double phi) { return profile.angular(phi); };
      const auto [phi, value] = boost::math::tools::brent_find_minima(
          f, (j - 1) * step, (j + 1) * step, 50);
      if (value < e.mu1) {
        e.mu1 = value;
        e.argmin_angle = phi;
      }
    }
  }
  if (!(e.mu1 > tolerance)) {
    std::ostringstream os;
    os << "spectral measure is not elliptic: mu1 = " << e.mu1;
    throw ValidationError(os.str());
  }
  return e;
}

std::pair<double, double> second_difference(const SymbolProfile& profile, double mu2,
                                            const Vec2& xi, const Vec2& eta) {
  const double s = profile.measure().order();
  const double lhs = profile(xi + eta) + profile(xi - eta) - 2.0 * profile(xi);
  const double eta_norm = profile.measure().dim() == 1 ? std::abs(eta(0)) : eta.norm();
  const double bound = 2.0 * std::pow(eta_norm, 2.0 * s) * mu2;
  return {lhs, bound};
}

SecondDifferenceReport second_difference_certificate(const SymbolProfile& profile,
                                                     std::int64_t trials,
                                                     std::uint64_t seed,
                                                     double tolerance) {
  const double mu2 = profile.measure().total_mass();
  const int n = profile.measure().dim();
  Rng rng(seed);
  auto draw = [&]() {
    const double magnitude = std::pow(10.0, rng.uniform(-2.0, 2.0));
    Vec2 v = Vec2::Zero();
    if (n == 1) {
      v(0) = rng.uniform() < 0.5 ? -magnitude : magnitude;
    } else {
      const double phi = rng.uniform(0.0, kTwoPi);
      v << magnitude * std::cos(phi), magnitude * std::sin(phi);
    }
    return v;
  };

  SecondDifferenceReport report;
  report.trials = trials;
  report.min_slack = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < trials; ++i) {
    const Vec2 xi = draw();
    const Vec2 eta = draw();
    const auto [lhs, bound] = second_difference(profile, mu2, xi, eta);
    const double scale = profile(xi + eta) + profile(xi - eta) + 2.0 * profile(xi);
    const double slack = bound - lhs;
    if (slack < report.min_slack) report.min_slack = slack;
    const double ratio = bound > 0.0 ? lhs / bound : 0.0;
    if (i == 0 || ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.worst_xi = xi;
      report.worst_eta = eta;
    }
    if (slack < -tolerance * scale) ++report.violations;
  }
  return report;
}

bool power_concavity(double a, double b, double s, double tolerance) {
  if (a < b || b < 0.0) throw ValidationError("power_concavity requires a >= b >= 0");
  const double e = 2.0 * s;
  const double lhs = 2.0 * std::pow(a, e) + 2.0 * std::pow(b, e);
  const double rhs = std::pow(a + b, e) + std::pow(a - b, e);
  return lhs >= rhs - tolerance * std::max(lhs, rhs);
}

double ball_volume(int n, double r) {
  if (n == 1) return 2.0 * r;
  if (n == 2) return kPi * r * r;
  throw ValidationError("only n = 1 and n = 2 are supported");
}

double weyl_bound(int n, double s, double domain_volume, double mu) {
  const double exponent = -2.0 * s / n;
  return std::pow(kTwoPi, 2.0 * s) * std::pow(domain_volume, exponent) *
         std::pow(ball_volume(n, std::pow(mu, -1.0 / (2.0 * s))), exponent);
}

WeylConstant weyl_constant(const SymbolProfile& profile, double domain_volume,
                           std::int64_t mc_samples, std::uint64_t seed) {
  if (!(domain_volume > 0.0)) throw ValidationError("domain volume must be positive");
  const auto& measure = profile.measure();
  const int n = measure.dim();
  const double s = measure.order();
  const Ellipticity e = ellipticity(measure);

  WeylConstant w;
  if (n == 1) {
    w.volume = 2.0 * std::pow(measure.total_mass(), -1.0 / (2.0 * s));
  } else {
    if (mc_samples < 1) throw ValidationError("Monte Carlo sample count must be >= 1");
    const double radius = std::pow(e.mu1, -1.0 / (2.0 * s));
    Rng rng(seed);
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < mc_samples; ++i) {
      const Vec2 xi(rng.uniform(-radius, radius), rng.uniform(-radius, radius));
      if (xi.squaredNorm() < radius * radius && profile(xi) < 1.0) ++hits;
    }
    const double box = 4.0 * radius * radius;
    const double p = static_cast<double>(hits) / static_cast<double>(mc_samples);
    w.volume = box * p;
    w.volume_sigma = box * std::sqrt(p * (1.0 - p) / static_cast<double>(mc_samples));
    w.samples = mc_samples;
  }
  if (!(w.volume > 0.0)) throw NumericalError("Monte Carlo volume estimate is zero");

  const double exponent = -2.0 * s / n;
  w.c0 = std::pow(kTwoPi, 2.0 * s) * std::pow(domain_volume, exponent) *
         std::pow(w.volume, exponent);
  w.c0_sigma = w.c0 * (2.0 * s / n) * w.volume_sigma / w.volume;
  w.lower = weyl_bound(n, s, domain_volume, e.mu1);
  w.upper = weyl_bound(n, s, domain_volume, e.mu2);

  const double slack = 3.0 * w.c0_sigma + 1e-10 * w.c0;
  w.sandwich_ok = (w.lower <= w.c0 + slack) && (w.c0 <= w.upper + slack);
  if (!w.sandwich_ok) {
    std::ostringstream os;
    os << "Weyl sandwich violated: " << w.lower << " <= " << w.c0 << " <= " << w.upper
       << " (sigma " << w.c0_sigma << ")";
    throw NumericalError(os.str());
  }
  return w;
}

}  // namespace fracheat
