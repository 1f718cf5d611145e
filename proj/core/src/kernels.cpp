#include "shelab/kernels.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "shelab/errors.hpp"
#include "shelab/quadrature.hpp"
#include "shelab/specfun.hpp"

namespace shelab {

namespace {

constexpr double kPi = M_PI;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / gamma_fn(0.5 * d); }

double two_pi_pow_minus(int d) { return std::pow(2.0 * kPi, -d); }

void require(bool ok, const char* field, const std::string& msg) {
  if (!ok) throw ParameterError(field, msg);
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double triangle(double x) { return std::max(2.0 - std::abs(x), 0.0) / 4.0; }

double sin2_over_sq(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 3.0;
  const double s = std::sin(x) / x;
  return s * s;
}

double sinc2_correlation(double x) {
  if (std::abs(x) < 1e-4) return (1.0 - x * x / 3.0) / (2.0 * kPi);
  const double s = std::sin(x) / x;
  return s * s / (2.0 * kPi);
}

// log of the Matern spectral prefactor (2 pi)^d 2^{nu-1} phi Gamma(nu+d/2) a^{2 nu} pi^{-d/2}
double matern_log_prefactor(const Matern& m, int d) {
  return d * std::log(2.0 * kPi) + (m.nu - 1.0) * std::log(2.0) + std::log(m.phi) +
         log_gamma_fn(m.nu + 0.5 * d) + 2.0 * m.nu * std::log(m.scale) - 0.5 * d * std::log(kPi);
}

// phi * y^nu K_nu(y) with the y -> 0 limit handled
double matern_shape(double nu, double y) {
  if (y == 0.0) return std::pow(2.0, nu - 1.0) * gamma_fn(nu);
  if (y > 740.0) return 0.0;
  try {
    return std::pow(y, nu) * bessel_k(nu, y).value;
  } catch (const std::overflow_error&) {
    return std::pow(2.0, nu - 1.0) * gamma_fn(nu);
  }
}

// Phi_1(r) = int max(2-|xi|,0)/4 e^{-r xi^2} dxi
double triangle_heat_mass_1d(double r) {
  if (r < 2.0) {
    // 1/2 sum_n (-r)^n/n! 2^{2n+2}/((2n+1)(2n+2))
    double sum = 0.0;
    double pw = 4.0;  // (-r)^n 4^{n+1} / n!
    for (int n = 0; n < 200; ++n) {
      if (n > 0) pw *= -4.0 * r / n;
      const double term = pw / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return 0.5 * sum;
  }
  const double sr = std::sqrt(r);
  return std::sqrt(kPi) / (2.0 * sr) * std::erf(2.0 * sr) + std::expm1(-4.0 * r) / (4.0 * r);
}

// int sin^2(xi)/xi^2 e^{-r xi^2} dxi over the real line
double sin2_heat_mass(double r) {
  if (r == 0.0) return kPi;
  return kPi * std::erf(1.0 / std::sqrt(r)) + std::sqrt(kPi * r) * std::expm1(-1.0 / r);
}

// int_0^inf sin^2(xi)/xi^2 w(xi) dxi for a smooth positive w with a power-law tail.
// `singular_origin` marks w ~ xi^{p}, p in (-1, 0), at the origin.
double sin2_weighted_half_line(const std::function<double(double)>& w, bool singular_origin) {
  constexpr int periods = 64;
  auto f = [&](double x) { return sin2_over_sq(x) * w(x); };
  double total = 0.0;
  for (int k = 0; k < periods; ++k) {
    const double a = k * kPi, b = (k + 1) * kPi;
    total += (k == 0 && singular_origin) ? quad::endpoint_singular(f, a, b).value
                                         : quad::interval(f, a, b, 1e-13).value;
  }
  const double R = periods * kPi;
  // sin^2 = (1 - cos 2x)/2; the smooth half via x = R/u
  auto smooth = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double x = R / u;
    return w(x) / R;
  };
  total += 0.5 * quad::endpoint_singular(smooth, 0.0, 1.0).value;
  // cos(2(R+u)) = cos(2u) because R is a multiple of pi
  static thread_local boost::math::quadrature::ooura_fourier_cos<double> ooura;
  auto q = [&](double u) {
    const double x = R + u;
    return w(x) / (x * x);
  };
  total -= 0.5 * ooura.integrate(q, 2.0).first;
  return total;
}

double sinc2_kernel_at(const SpectralModel& m, std::span<const double> x) {
  double v = 1.0;
  for (double xi : x) v *= sinc2_correlation(xi);
  return m.amplitude * v;
}

// Upsilon for the tensor-product triangle spectrum by a pyramid split of [0,2]^d.
double product_triangle_upsilon(int d, double alpha, double beta) {
  const double e = alpha - 1.0;
  if (d == 1) {
    auto g = [&](double r) { return (2.0 - r) / 4.0 * std::pow(beta + r * r, e); };
    return 2.0 * two_pi_pow_minus(1) * quad::endpoint_singular(g, 0.0, 2.0).value;
  }
  static const quad::GaussLegendre gl(28);
  const int n = gl.size();
  const int inner_dims = d - 1;
  std::vector<int> idx(inner_dims);
  auto inner = [&](double rho) {
    if (rho <= 0.0) return 0.0;
    double acc = 0.0;
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      double w = 1.0, t2 = 0.0, shape = 1.0;
      for (int j = 0; j < inner_dims; ++j) {
        const double t = gl.nodes[idx[j]];
        w *= gl.weights[idx[j]];
        t2 += t * t;
        shape *= (2.0 - rho * t) / 4.0;
      }
      acc += w * shape * std::pow(beta + rho * rho * (1.0 + t2), e);
      int j = 0;
      while (j < inner_dims && ++idx[j] == n) idx[j++] = 0;
      if (j == inner_dims) break;
    }
    return std::pow(rho, d - 1) * (2.0 - rho) / 4.0 * acc;
  };
  const double pyramid = quad::endpoint_singular(inner, 0.0, 2.0).value;
  return two_pi_pow_minus(d) * std::pow(2.0, d) * d * pyramid;
}

} // namespace

std::string kind_name(const SpectralModel& m) {
  return std::visit(overloaded{
                        [](const BesselCorrelation&) { return std::string("bessel-corr"); },
                        [](const BesselSpectral&) { return std::string("bessel-spec"); },
                        [](const Matern&) { return std::string("matern"); },
                        [](const RieszType&) { return std::string("riesz-type"); },
                        [](const Triangle1D&) { return std::string("triangle-1d"); },
                        [](const SincSquared1D&) { return std::string("sinc2-1d"); },
                        [](const ProductTriangle&) { return std::string("product-triangle"); },
                    },
                    m.kind);
}

void validate(const SpectralModel& m) {
  require(m.d >= 1, "model.d", "dimension must be a positive integer");
  require(std::isfinite(m.amplitude) && m.amplitude > 0.0, "model.amplitude", "must be > 0");
  std::visit(overloaded{
                 [](const BesselCorrelation& k) {
                   require(std::isfinite(k.s) && k.s > 0.0, "model.s", "must be > 0");
                 },
                 [](const BesselSpectral& k) {
                   require(std::isfinite(k.s) && k.s > 0.0, "model.s", "must be > 0");
                 },
                 [](const Matern& k) {
                   require(std::isfinite(k.phi) && k.phi > 0.0, "model.phi", "must be > 0");
                   require(std::isfinite(k.scale) && k.scale > 0.0, "model.scale", "must be > 0");
                   require(std::isfinite(k.nu) && k.nu > 0.0, "model.nu", "must be > 0");
                 },
                 [&](const RieszType& k) {
                   require(k.s1 > 0.0 && k.s1 < m.d, "model.s1", "requires 0 < s1 < d");
                   require(k.s2 > 0.0 && k.s2 < m.d, "model.s2", "requires 0 < s2 < d");
                 },
                 [&](const Triangle1D&) { require(m.d == 1, "model.d", "triangle-1d requires d = 1"); },
                 [&](const SincSquared1D&) { require(m.d == 1, "model.d", "sinc2-1d requires d = 1"); },
                 [](const ProductTriangle&) {},
             },
             m.kind);
}

bool is_isotropic(const SpectralModel& m) {
  return !std::holds_alternative<ProductTriangle>(m.kind) || m.d == 1;
}

SpectralExponents spectral_exponents(const SpectralModel& m) {
  const double d = m.d;
  return std::visit(overloaded{
                        [](const BesselCorrelation& k) { return SpectralExponents{0.0, -k.s, false}; },
                        [d](const BesselSpectral& k) {
                          if (k.s < d) return SpectralExponents{k.s - d, -kInf, false};
                          return SpectralExponents{0.0, -kInf, k.s == d};
                        },
                        [d](const Matern& k) { return SpectralExponents{0.0, -2.0 * k.nu - d, false}; },
                        [d](const RieszType& k) { return SpectralExponents{k.s2 - d, -k.s1, false}; },
                        [](const Triangle1D&) { return SpectralExponents{0.0, -2.0, false}; },
                        [](const SincSquared1D&) { return SpectralExponents{0.0, -kInf, false}; },
                        [](const ProductTriangle&) { return SpectralExponents{0.0, -kInf, false}; },
                    },
                    m.kind);
}

double bessel_potential(double s, int d, double r) {
  const double nu = 0.5 * (s - d);
  const double mu = std::abs(nu);
  const double log_phi = 0.5 * (2.0 - d - s) * std::log(2.0) - 0.5 * d * std::log(kPi) - log_gamma_fn(0.5 * s);
  const double phi = std::exp(log_phi);
  if (r == 0.0) {
    return nu > 0.0 ? phi * std::pow(2.0, nu - 1.0) * gamma_fn(nu) : kInf;
  }
  if (r > 740.0) return 0.0;
  try {
    return phi * std::pow(r, nu) * bessel_k(mu, r).value;
  } catch (const std::overflow_error&) {
    // only reached for tiny r, where the leading small-argument term is exact to rounding
    if (mu == 0.0) return phi * (-std::log(0.5 * r) - euler_gamma);
    return phi * gamma_fn(mu) * std::pow(2.0, mu - 1.0) * std::pow(r, nu - mu);
  }
}

double spectral_density_radial(const SpectralModel& m, double rho) {
  const int d = m.d;
  const double v = std::visit(
      overloaded{
          [&](const BesselCorrelation& k) { return std::pow(1.0 + rho * rho, -0.5 * k.s); },
          [&](const BesselSpectral& k) { return bessel_potential(k.s, d, rho); },
          [&](const Matern& k) {
            const double a2 = k.scale * k.scale;
            return std::exp(matern_log_prefactor(k, d) - (k.nu + 0.5 * d) * std::log(a2 + rho * rho));
          },
          [&](const RieszType& k) {
            return std::pow(1.0 + rho * rho, -0.5 * k.s1) + bessel_potential(k.s2, d, rho);
          },
          [&](const Triangle1D&) { return sin2_over_sq(rho); },
          [&](const SincSquared1D&) { return triangle(rho); },
          [&](const ProductTriangle&) -> double {
            if (d != 1) throw std::logic_error("product-triangle is not isotropic for d > 1");
            return triangle(rho);
          },
      },
      m.kind);
  return m.amplitude * v;
}

double spectral_density(const SpectralModel& m, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != m.d) throw std::invalid_argument("spectral_density: point dimension mismatch");
  if (std::holds_alternative<ProductTriangle>(m.kind)) {
    double v = m.amplitude;
    for (double x : xi) v *= triangle(x);
    return v;
  }
  return spectral_density_radial(m, norm(xi));
}

double correlation_radial(const SpectralModel& m, double r) {
  const int d = m.d;
  const double v = std::visit(
      overloaded{
          [&](const BesselCorrelation& k) { return bessel_potential(k.s, d, r); },
          [&](const BesselSpectral& k) { return two_pi_pow_minus(d) * std::pow(1.0 + r * r, -0.5 * k.s); },
          [&](const Matern& k) { return k.phi * matern_shape(k.nu, k.scale * r); },
          [&](const RieszType& k) {
            return bessel_potential(k.s1, d, r) + two_pi_pow_minus(d) * std::pow(1.0 + r * r, -0.5 * k.s2);
          },
          [&](const Triangle1D&) { return triangle(r); },
          [&](const SincSquared1D&) { return sinc2_correlation(r); },
          [&](const ProductTriangle&) -> double {
            if (d != 1) throw std::logic_error("product-triangle is not isotropic for d > 1");
            return sinc2_correlation(r);
          },
      },
      m.kind);
  return m.amplitude * v;
}

double correlation(const SpectralModel& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.d) throw std::invalid_argument("correlation: point dimension mismatch");
  if (std::holds_alternative<ProductTriangle>(m.kind)) return sinc2_kernel_at(m, x);
  return correlation_radial(m, norm(x));
}

AlphaWindow upsilon_alpha_window(const SpectralModel& m) {
  const SpectralExponents e = spectral_exponents(m);
  // origin: o + d - 2(1-alpha) > 0, infinity: t + d - 2(1-alpha) < 0
  const double lo = 0.5 * (2.0 - m.d - e.origin);
  const double hi = std::isfinite(e.infinity) ? 0.5 * (2.0 - m.d - e.infinity) : kInf;
  AlphaWindow w;
  w.lo_inclusive = lo < 0.0;
  w.lo = std::max(lo, 0.0);
  w.hi = std::min(hi, 1.0);
  return w;
}

bool upsilon_finite(const SpectralModel& m, double alpha, double beta) {
  const SpectralExponents e = spectral_exponents(m);
  const double d = m.d;
  const double origin_power = e.origin + d - (beta == 0.0 ? 2.0 * (1.0 - alpha) : 0.0);
  const bool origin_ok = origin_power > 0.0;
  const bool tail_ok = !std::isfinite(e.infinity) || e.infinity + d - 2.0 * (1.0 - alpha) < 0.0;
  return origin_ok && tail_ok;
}

double upsilon(const SpectralModel& m, double alpha, double beta) {
  validate(m);
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ParameterError("alpha", "must lie in [0, 1)");
  if (!(beta >= 0.0)) throw ParameterError("beta", "must be >= 0");
  if (!upsilon_finite(m, alpha, beta)) return kInf;

  const int d = m.d;
  const double e = alpha - 1.0;
  if (std::holds_alternative<Triangle1D>(m.kind)) {
    auto w = [&](double x) { return std::pow(beta + x * x, e); };
    return m.amplitude * sin2_weighted_half_line(w, beta == 0.0) / kPi;
  }
  if (std::holds_alternative<SincSquared1D>(m.kind) || std::holds_alternative<ProductTriangle>(m.kind)) {
    return m.amplitude * product_triangle_upsilon(d, alpha, beta);
  }

  const SpectralExponents ex = spectral_exponents(m);
  auto g = [&](double rho) {
    return spectral_density_radial(m, rho) * std::pow(rho, d - 1) * std::pow(beta + rho * rho, e);
  };
  quad::PowerTails tails;
  tails.origin = ex.origin + d - 1.0 + (beta == 0.0 ? 2.0 * e : 0.0);
  tails.infinity = std::isfinite(ex.infinity) ? ex.infinity + d - 1.0 + 2.0 * e : -kInf;
  quad::HalfLineOptions opts;
  opts.high_anchor = 0.5 * std::log(std::max(beta, 1.0));
  const quad::QuadResult q = quad::half_line(g, tails, opts);
  return two_pi_pow_minus(d) * sphere_area(d) * q.value;
}

namespace {

double bessel_corr_closed(double s, int d, double alpha) {
  const double dd = d;
  if (!(dd - 2.0 * (1.0 - alpha) > 0.0)) throw DomainViolation("d - 2(1-alpha) > 0");
  if (!(s > dd - 2.0 * (1.0 - alpha))) throw DomainViolation("s > d - 2(1-alpha)");
  const double lg = log_gamma_fn(0.5 * dd - 1.0 + alpha) + log_gamma_fn(0.5 * (s - dd) + 1.0 - alpha) -
                    dd * std::log(2.0) - 0.5 * dd * std::log(kPi) - log_gamma_fn(0.5 * dd) - log_gamma_fn(0.5 * s);
  return std::exp(lg);
}

double bessel_spec_closed(double s, int d, double alpha) {
  const double dd = d;
  if (!(s > 2.0 * (1.0 - alpha))) throw DomainViolation("s > 2(1-alpha)");
  if (!(dd > 2.0 * (1.0 - alpha))) throw DomainViolation("d > 2(1-alpha)");
  // Parseval against the Riesz potential |xi|^{-2(1-alpha)}, whose transform carries
  // the constant pi^{d/2} 2^{d-b} Gamma((d-b)/2)/Gamma(b/2), b = 2(1-alpha)
  const double lg = (2.0 * alpha - 2.0 - dd) * std::log(2.0) - dd * std::log(kPi) +
                    log_gamma_fn(0.5 * dd - 1.0 + alpha) + log_gamma_fn(alpha - 1.0 + 0.5 * s) -
                    log_gamma_fn(0.5 * dd) - log_gamma_fn(0.5 * s);
  return std::exp(lg);
}

} // namespace

double upsilon_closed_form(const SpectralModel& m, double alpha) {
  validate(m);
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ParameterError("alpha", "must lie in [0, 1)");
  const int d = m.d;
  const double v = std::visit(
      overloaded{
          [&](const BesselCorrelation& k) { return bessel_corr_closed(k.s, d, alpha); },
          [&](const BesselSpectral& k) { return bessel_spec_closed(k.s, d, alpha); },
          [&](const RieszType& k) {
            if (!(k.s1 > d - 2.0 * (1.0 - alpha))) throw DomainViolation("s1 > d - 2(1-alpha)");
            if (!(k.s2 > 2.0 * (1.0 - alpha))) throw DomainViolation("s2 > 2(1-alpha)");
            return bessel_corr_closed(k.s1, d, alpha) + bessel_spec_closed(k.s2, d, alpha);
          },
          [&](const auto&) -> double {
            throw ParameterError("model.kind", "no closed form for " + kind_name(m));
          },
      },
      m.kind);
  return m.amplitude * v;
}

double heat_weighted_mass(const SpectralModel& m, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("heat_weighted_mass: r must be >= 0");
  const int d = m.d;
  if (r == 0.0) {
    // Phi(0) = int f-hat = (2 pi)^d f(0)
    std::vector<double> zero(d, 0.0);
    return std::pow(2.0 * kPi, d) * correlation(m, zero);
  }
  if (const auto* k = std::get_if<BesselCorrelation>(&m.kind)) {
    return m.amplitude * std::pow(kPi, 0.5 * d) * kummer_u(0.5 * d, 0.5 * (2.0 + d - k->s), r).value;
  }
  if (std::holds_alternative<Triangle1D>(m.kind)) return m.amplitude * sin2_heat_mass(r);
  if (std::holds_alternative<SincSquared1D>(m.kind) || std::holds_alternative<ProductTriangle>(m.kind)) {
    return m.amplitude * std::pow(triangle_heat_mass_1d(r), d);
  }
  const SpectralExponents ex = spectral_exponents(m);
  auto g = [&](double rho) {
    return spectral_density_radial(m, rho) * std::pow(rho, d - 1) * std::exp(-r * rho * rho);
  };
  quad::HalfLineOptions opts;
  opts.high_anchor = std::max(0.0, -0.5 * std::log(r));
  const quad::QuadResult q = quad::half_line(g, {ex.origin + d - 1.0, -kInf}, opts);
  return sphere_area(d) * q.value;
}

double h_alpha(const SpectralModel& m, double alpha, double t) {
  validate(m);
  if (!(alpha >= 0.0 && alpha < 0.5)) throw ParameterError("alpha", "must lie in [0, 1/2)");
  if (!(t > 0.0)) throw ParameterError("t", "must be > 0");
  const SpectralExponents ex = spectral_exponents(m);
  // Phi(r) ~ r^{-gamma} as r -> 0
  const double gamma = std::isfinite(ex.infinity) ? std::max(0.0, 0.5 * (m.d + ex.infinity)) : 0.0;
  const double kappa = 1.0 - 2.0 * alpha - gamma;
  if (!(kappa > 0.0)) return kInf;

  // r = e^v: int_{-inf}^{log t} e^{(1-2 alpha) v} Phi(e^v) dv
  auto h = [&](double v) { return std::exp((1.0 - 2.0 * alpha) * v) * heat_weighted_mass(m, std::exp(v)); };
  const double v_hi = std::log(t);
  const double v_lo = std::max(v_hi - 40.0 / kappa, -300.0);
  const int pieces = std::max(1, static_cast<int>(std::ceil((v_hi - v_lo) / 6.0)));
  const double width = (v_hi - v_lo) / pieces;
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) {
    total += quad::interval(h, v_lo + i * width, v_lo + (i + 1) * width, 1e-12).value;
  }
  return total + h(v_lo) / kappa;
}

double inv_ft_sqrt_triangle(double x) {
  const double ax = std::abs(x);
  if (ax < 0.5) {
    // (1/pi) int_0^{sqrt 2} u^2 cos(x (2 - u^2)) du, from xi = 2 - u^2
    static const quad::GaussLegendre gl(40);
    const double top = std::sqrt(2.0);
    double acc = 0.0;
    for (int i = 0; i < gl.size(); ++i) {
      const double u = top * gl.nodes[i];
      acc += gl.weights[i] * u * u * std::cos(ax * (2.0 - u * u));
    }
    return acc * top / kPi;
  }
  const double z = 2.0 * std::sqrt(ax / kPi);
  const FresnelPair f = fresnel(z);
  return (-std::cos(2.0 * ax) * f.S + std::sin(2.0 * ax) * f.C) / (std::sqrt(8.0 * kPi) * std::pow(ax, 1.5));
}

KernelAnalysis analyze(const SpectralModel& m, double alpha, double beta, double t) {
  validate(m);
  KernelAnalysis a;
  a.upsilon_alpha_beta = upsilon(m, alpha, beta);
  a.dalang_ok = upsilon_finite(m, 0.0, 1.0);
  a.upsilon0_finite = upsilon_finite(m, 0.0, 0.0);
  a.upsilon0 = upsilon(m, 0.0, 0.0);
  if (alpha > 0.0 && alpha < 0.5) {
    a.h_alpha_at_t = h_alpha(m, alpha, t);
    a.h_alpha_finite = std::isfinite(a.h_alpha_at_t);
    if (a.h_alpha_finite &&
        (std::holds_alternative<BesselCorrelation>(m.kind) || std::holds_alternative<BesselSpectral>(m.kind))) {
      try {
        a.asymptotic = h_alpha_asymptotic(m, alpha);
        a.has_asymptotic = true;
      } catch (const std::exception&) {
        a.has_asymptotic = false;
      }
    }
  } else {
    a.h_alpha_at_t = std::numeric_limits<double>::quiet_NaN();
  }
  a.closed_form = std::numeric_limits<double>::quiet_NaN();
  try {
    a.closed_form = upsilon_closed_form(m, alpha);
  } catch (const std::exception&) {
  }
  return a;
}

} // namespace shelab
