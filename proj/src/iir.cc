// SPDX-License-Identifier: Apache-2.0

#include "restorelab/iir.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace restorelab {

using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Elliptic-function helpers (parameter convention m = k^2).

// Carlson's symmetric integral R_F by duplication.
double carlson_rf(double x, double y, double z) {
  for (int i = 0; i < 200; ++i) {
    const double mu = (x + y + z) / 3.0;
    const double dx = 1.0 - x / mu;
    const double dy = 1.0 - y / mu;
    const double dz = 1.0 - z / mu;
    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < 1e-4) {
      const double e2 = dx * dy - dz * dz;
      const double e3 = dx * dy * dz;
      return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 -
              3.0 * e2 * e3 / 44.0) /
             std::sqrt(mu);
    }
    const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    const double lambda = sx * sy + sx * sz + sy * sz;
    x = 0.25 * (x + lambda);
    y = 0.25 * (y + lambda);
    z = 0.25 * (z + lambda);
  }
  const double mu = (x + y + z) / 3.0;
  return 1.0 / std::sqrt(mu);
}

// K(m), taking the complementary parameter 1 - m directly so that values of m
// within 1e-16 of 1 stay accurate.
double ellipk_from_complement(double one_minus_m) {
  return carlson_rf(0.0, one_minus_m, 1.0);
}

double ellipk(double m) { return ellipk_from_complement(1.0 - m); }

// Incomplete integral of the first kind F(phi | 1 - m1), 0 <= phi <= pi/2,
// parameterized by the complement so that m1 near zero stays accurate.
double ellipf_complement(double phi, double m1) {
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  return s * carlson_rf(c * c, c * c + m1 * s * s, 1.0);
}

struct Jacobi {
  double sn, cn, dn;
};

// Jacobi elliptic functions by the descending AGM / Landen recurrence.
Jacobi ellipj(double u, double m) {
  if (m < 1e-14) return {std::sin(u), std::cos(u), 1.0};
  if (m > 1.0 - 1e-14) {
    const double t = std::tanh(u);
    const double sech = 1.0 / std::cosh(u);
    return {t, sech, sech};
  }
  constexpr int kMaxSteps = 32;
  double a[kMaxSteps + 1];
  double c[kMaxSteps + 1];
  a[0] = 1.0;
  double b = std::sqrt(1.0 - m);
  c[0] = std::sqrt(m);
  int n = 0;
  while (std::abs(c[n]) > 1e-16 && n < kMaxSteps) {
    const double an = a[n];
    a[n + 1] = 0.5 * (an + b);
    c[n + 1] = 0.5 * (an - b);
    b = std::sqrt(an * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * u, n);
  double prev = phi;
  for (int i = n; i > 0; --i) {
    prev = phi;
    phi = 0.5 * (phi + std::asin(c[i] * std::sin(phi) / a[i]));
  }
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  const double dn = n > 0 ? cn / std::cos(prev - phi) : std::sqrt(1.0 - m * sn * sn);
  return {sn, cn, dn};
}

// Solves the degree equation K'(m)/K(m) = K'(m1)/(n K(m1)) via the nome.
double ellipdeg(int n, double m1) {
  const double k1 = ellipk(m1);
  const double k1p = ellipk_from_complement(m1);
  const double q1 = std::exp(-kPi * k1p / k1);
  const double q = std::pow(q1, 1.0 / n);
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i <= 7; ++i) num += std::pow(q, i * (i + 1));
  for (int i = 1; i <= 8; ++i) den += std::pow(q, i * i);
  den = 1.0 + 2.0 * den;
  return 16.0 * q * std::pow(num / den, 4);
}

// ---------------------------------------------------------------------------
// Analog prototypes, all normalized to a 1 rad/s cutoff.

AnalogPrototype butterworth_prototype(int n) {
  AnalogPrototype p;
  for (int k = 0; k < n; ++k) {
    const double theta = kPi * (2.0 * k + n + 1) / (2.0 * n);
    p.poles.push_back(std::polar(1.0, theta));
  }
  return p;
}

AnalogPrototype chebyshev1_prototype(int n, double ripple_db) {
  const double eps = std::sqrt(std::pow(10.0, ripple_db / 10.0) - 1.0);
  const double mu = std::asinh(1.0 / eps) / n;
  AnalogPrototype p;
  for (int k = 0; k < n; ++k) {
    const double theta = kPi * (2.0 * k + 1) / (2.0 * n);
    p.poles.emplace_back(-std::sinh(mu) * std::sin(theta),
                         std::cosh(mu) * std::cos(theta));
  }
  return p;
}

std::vector<cplx> polynomial_roots(const std::vector<double>& coeffs_low_first) {
  // Durand-Kerner on the monic polynomial, then Newton polish.
  const int n = static_cast<int>(coeffs_low_first.size()) - 1;
  const double lead = coeffs_low_first.back();
  std::vector<double> c(coeffs_low_first.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeffs_low_first[i] / lead;
  auto eval = [&](cplx x) {
    cplx acc = 1.0;
    for (int i = n - 1; i >= 0; --i) acc = acc * x + c[static_cast<std::size_t>(i)];
    return acc;
  };
  auto deriv = [&](cplx x) {
    cplx acc = static_cast<double>(n);
    for (int i = n - 1; i >= 1; --i) {
      acc = acc * x + static_cast<double>(i) * c[static_cast<std::size_t>(i)];
    }
    return acc;
  };
  const double radius = std::pow(std::abs(c[0]), 1.0 / n);
  std::vector<cplx> roots(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    roots[static_cast<std::size_t>(i)] =
        std::polar(radius, 2.0 * kPi * i / n + 0.4);
  }
  for (int iter = 0; iter < 2000; ++iter) {
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx denom = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) denom *= roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(j)];
      }
      const cplx delta = eval(roots[static_cast<std::size_t>(i)]) / denom;
      roots[static_cast<std::size_t>(i)] -= delta;
      change = std::max(change, std::abs(delta) / std::max(1.0, std::abs(roots[static_cast<std::size_t>(i)])));
    }
    if (change < 1e-15) break;
  }
  for (cplx& r : roots) {
    for (int k = 0; k < 3; ++k) {
      const cplx d = deriv(r);
      if (std::abs(d) == 0.0) break;
      r -= eval(r) / d;
    }
  }
  return roots;
}

AnalogPrototype bessel_prototype(int n) {
  // Reverse Bessel polynomial: a_k = (2n-k)! / (2^(n-k) k! (n-k)!).
  std::vector<double> a(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const double log_a = std::lgamma(2.0 * n - k + 1) - (n - k) * std::log(2.0) -
                         std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    a[static_cast<std::size_t>(k)] = std::round(std::exp(log_a));
  }
  AnalogPrototype p;
  p.poles = polynomial_roots(a);

  // Scale so that |H(j)| = 1/sqrt(2).
  auto mag2 = [&](double w) {
    double num = 1.0;
    double den = 1.0;
    for (const cplx& pole : p.poles) {
      num *= std::norm(pole);
      den *= std::norm(cplx(0.0, w) - pole);
    }
    return num / den;
  };
  double lo = 1e-6;
  double hi = 1.0;
  while (mag2(hi) > 0.5) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mag2(mid) > 0.5 ? lo : hi) = mid;
  }
  const double w3 = 0.5 * (lo + hi);
  for (cplx& pole : p.poles) pole /= w3;
  return p;
}

AnalogPrototype elliptic_prototype(int n, double ripple_db, double atten_db) {
  if (!(atten_db > ripple_db)) {
    throw std::invalid_argument(
        "elliptic design: stopband attenuation must exceed passband ripple");
  }
  const double eps_sq = std::expm1(0.1 * ripple_db * std::log(10.0));
  const double eps = std::sqrt(eps_sq);
  const double ck1_sq = eps_sq / std::expm1(0.1 * atten_db * std::log(10.0));
  const double k_ck1 = ellipk(ck1_sq);

  const double m = ellipdeg(n, ck1_sq);
  const double capk = ellipk(m);

  AnalogPrototype p;
  std::vector<Jacobi> at_j;
  for (int j = 1 - n % 2; j < n; j += 2) {
    at_j.push_back(ellipj(j * capk / n, m));
  }
  for (const Jacobi& v : at_j) {
    if (std::abs(v.sn) > 1e-14) {
      const cplx z(0.0, 1.0 / (std::sqrt(m) * v.sn));
      p.zeros.push_back(z);
      p.zeros.push_back(std::conj(z));
    }
  }
  // sc(r | 1 - ck1_sq) = 1/eps, i.e. r = F(atan(1/eps) | 1 - ck1_sq).
  const double r = ellipf_complement(std::atan(1.0 / eps), ck1_sq);
  const double v0 = capk * r / (n * k_ck1);
  const Jacobi w = ellipj(v0, 1.0 - m);
  std::vector<cplx> poles;
  for (const Jacobi& v : at_j) {
    const double den = 1.0 - (v.dn * w.sn) * (v.dn * w.sn);
    poles.emplace_back(-(v.cn * v.dn * w.sn * w.cn) / den, -(v.sn * w.dn) / den);
  }
  for (const cplx& pole : poles) {
    p.poles.push_back(pole);
    if (std::abs(pole.imag()) > 1e-12 * std::abs(pole)) {
      p.poles.push_back(std::conj(pole));
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Discretization and biquad assembly.

struct RootGroup {
  std::vector<cplx> roots;  // one real root, a real pair, or a conjugate pair
};

std::vector<RootGroup> group_conjugates(std::vector<cplx> roots) {
  std::vector<RootGroup> groups;
  std::vector<double> reals;
  for (const cplx& r : roots) {
    if (std::abs(r.imag()) <= 1e-10 * std::max(1.0, std::abs(r))) {
      reals.push_back(r.real());
    } else if (r.imag() > 0.0) {
      groups.push_back({{r, std::conj(r)}});
    }
  }
  std::sort(reals.begin(), reals.end());
  for (std::size_t i = 0; i < reals.size(); i += 2) {
    RootGroup g;
    g.roots.emplace_back(reals[i], 0.0);
    if (i + 1 < reals.size()) g.roots.emplace_back(reals[i + 1], 0.0);
    groups.push_back(g);
  }
  return groups;
}

// Coefficients of prod (1 - r z^-1) for up to two roots: {1, c1, c2}.
std::array<double, 3> expand(const std::vector<cplx>& roots) {
  if (roots.empty()) return {1.0, 0.0, 0.0};
  if (roots.size() == 1) return {1.0, -roots[0].real(), 0.0};
  const cplx s = roots[0] + roots[1];
  const cplx p = roots[0] * roots[1];
  return {1.0, -s.real(), p.real()};
}

double distance(const RootGroup& a, const RootGroup& b) {
  return std::abs(a.roots.front() - b.roots.front());
}

cplx section_response(const Biquad& s, cplx zinv) {
  const cplx num = s.b0 + zinv * (s.b1 + zinv * s.b2);
  const cplx den = 1.0 + zinv * (s.a1 + zinv * s.a2);
  return num / den;
}

}  // namespace

std::string to_string(FilterFamily family) {
  switch (family) {
    case FilterFamily::kButterworth: return "butterworth";
    case FilterFamily::kChebyshev1: return "chebyshev1";
    case FilterFamily::kBessel: return "bessel";
    case FilterFamily::kElliptic: return "elliptic";
  }
  return "unknown";
}

FilterFamily filter_family_from_string(const std::string& name) {
  for (FilterFamily f : kAllFilterFamilies) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown filter family '" + name + "'");
}

AnalogPrototype analog_prototype(FilterFamily family, int order,
                                 const IirDesignOptions& opts) {
  switch (family) {
    case FilterFamily::kButterworth: return butterworth_prototype(order);
    case FilterFamily::kChebyshev1:
      return chebyshev1_prototype(order, opts.passband_ripple_db);
    case FilterFamily::kBessel: return bessel_prototype(order);
    case FilterFamily::kElliptic:
      return elliptic_prototype(order, opts.passband_ripple_db,
                                opts.stopband_atten_db);
  }
  throw std::invalid_argument("analog_prototype: unknown family");
}

IirFilter::IirFilter(FilterFamily family, int order, double cutoff_hz,
                     int sample_rate, std::vector<Biquad> sections,
                     std::vector<std::complex<double>> poles)
    : family_(family),
      order_(order),
      cutoff_hz_(cutoff_hz),
      sample_rate_(sample_rate),
      sections_(std::move(sections)),
      poles_(std::move(poles)) {}

std::complex<double> IirFilter::response(double freq_hz) const {
  const cplx zinv = std::polar(1.0, -2.0 * kPi * freq_hz / sample_rate_);
  cplx h = 1.0;
  for (const Biquad& s : sections_) h *= section_response(s, zinv);
  return h;
}

double IirFilter::magnitude_db(double freq_hz) const {
  return 20.0 * std::log10(std::abs(response(freq_hz)));
}

double IirFilter::max_pole_radius() const {
  double r = 0.0;
  for (const cplx& p : poles_) r = std::max(r, std::abs(p));
  return r;
}

IirFilter design_lowpass(FilterFamily family, double cutoff_hz, int order,
                         int sample_rate, const IirDesignOptions& opts) {
  if (sample_rate <= 0) {
    throw std::invalid_argument("design_lowpass: sample rate must be positive");
  }
  const double nyquist = 0.5 * sample_rate;
  if (!(cutoff_hz > 0.0 && cutoff_hz < nyquist)) {
    throw std::invalid_argument("design_lowpass: cutoff " +
                                std::to_string(cutoff_hz) +
                                " Hz outside (0, " + std::to_string(nyquist) +
                                ")");
  }
  if (order < 1 || order > 24) {
    throw std::invalid_argument("design_lowpass: order must be in [1, 24]");
  }

  AnalogPrototype proto = analog_prototype(family, order, opts);
  const double fs2 = 2.0 * sample_rate;
  const double warped = fs2 * std::tan(kPi * cutoff_hz / sample_rate);

  auto bilinear = [&](cplx s) { return (fs2 + s) / (fs2 - s); };
  std::vector<cplx> zpoles;
  std::vector<cplx> zzeros;
  for (const cplx& p : proto.poles) zpoles.push_back(bilinear(p * warped));
  for (const cplx& z : proto.zeros) zzeros.push_back(bilinear(z * warped));
  while (zzeros.size() < zpoles.size()) zzeros.emplace_back(-1.0, 0.0);

  double max_radius = 0.0;
  for (const cplx& p : zpoles) max_radius = std::max(max_radius, std::abs(p));
  if (!(max_radius < 1.0 - 1e-6)) {
    throw std::domain_error(
        "design_lowpass: " + to_string(family) + " order " +
        std::to_string(order) + " at " + std::to_string(cutoff_hz) +
        " Hz is numerically unstable (pole radius " +
        std::to_string(max_radius) + ")");
  }

  std::vector<RootGroup> pole_groups = group_conjugates(zpoles);
  std::vector<RootGroup> zero_groups = group_conjugates(zzeros);
  // Poles closest to the unit circle get the nearest zeros first.
  std::sort(pole_groups.begin(), pole_groups.end(),
            [](const RootGroup& a, const RootGroup& b) {
              return std::abs(a.roots.front()) > std::abs(b.roots.front());
            });

  std::vector<Biquad> sections;
  std::vector<bool> used(zero_groups.size(), false);
  for (const RootGroup& pg : pole_groups) {
    std::size_t best = zero_groups.size();
    for (std::size_t i = 0; i < zero_groups.size(); ++i) {
      if (used[i] || zero_groups[i].roots.size() != pg.roots.size()) continue;
      if (best == zero_groups.size() ||
          distance(pg, zero_groups[i]) < distance(pg, zero_groups[best])) {
        best = i;
      }
    }
    if (best == zero_groups.size()) {
      throw std::logic_error("design_lowpass: unmatched pole/zero grouping");
    }
    used[best] = true;
    const auto a = expand(pg.roots);
    const auto b = expand(zero_groups[best].roots);
    sections.push_back({b[0], b[1], b[2], a[1], a[2]});
  }

  // Unit gain at DC, spread over the first section.
  cplx dc = 1.0;
  for (const Biquad& s : sections) dc *= section_response(s, 1.0);
  const double g = 1.0 / dc.real();
  sections.front().b0 *= g;
  sections.front().b1 *= g;
  sections.front().b2 *= g;

  return IirFilter(family, order, cutoff_hz, sample_rate, std::move(sections),
                   std::move(zpoles));
}

AudioBuffer filter(const AudioBuffer& audio, const IirFilter& f) {
  if (audio.sample_rate != f.sample_rate()) {
    throw std::invalid_argument("filter: sample rate mismatch");
  }
  AudioBuffer out = audio;
  for (const Biquad& s : f.sections()) {
    double z1 = 0.0;
    double z2 = 0.0;
    for (double& x : out.samples) {
      const double y = s.b0 * x + z1;
      z1 = s.b1 * x - s.a1 * y + z2;
      z2 = s.b2 * x - s.a2 * y;
      x = y;
    }
  }
  return out;
}

}  // namespace restorelab
