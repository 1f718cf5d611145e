#include "shelab/heatinit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include "shelab/errors.hpp"
#include "shelab/quadrature.hpp"
#include "shelab/specfun.hpp"

namespace shelab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double sphere_area(int d) { return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d); }

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double dist2(std::span<const double> x, const std::vector<double>& loc) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double di = x[i] - (i < loc.size() ? loc[i] : 0.0);
    s += di * di;
  }
  return s;
}

// e^{-z} times the sphere average of e^{z cos(theta)}.
double scaled_sphere_average(double z, int d) {
  switch (d) {
    case 1: return 0.5 * (1.0 + std::exp(-2.0 * z));
    case 3: return z < 1e-8 ? 1.0 - z : -std::expm1(-2.0 * z) / (2.0 * z);
    default: {
      if (z < 600.0) return std::exp(-z) * boost::math::cyl_bessel_i(0, z);
      const double iz = 1.0 / z;
      return (1.0 + iz / 8.0 + 9.0 * iz * iz / 128.0 + 225.0 * iz * iz * iz / 3072.0) / std::sqrt(2.0 * M_PI * z);
    }
  }
}

// E |x + sqrt(t) Z|^{2s} with |x| = r, Z standard normal in R^d.
double radial_power_moment(double s2, double t, double r, int d) {
  const double s = 0.5 * s2;
  const double z = r * r / (2.0 * t);
  const double pref = std::pow(2.0 * t, s) * std::exp(std::lgamma(0.5 * d + s) - std::lgamma(0.5 * d));
  return pref * boost::math::hypergeometric_1F1(-s, 0.5 * d, -z);
}

double density_value(const InitialDatum& mu, double s) {
  switch (mu.kind) {
    case DatumKind::riesz: return std::pow(s, -mu.alpha);
    case DatumKind::poly_growth: return std::pow(s, mu.alpha);
    case DatumKind::constant: return mu.c;
    default: return 0.0;
  }
}

// J0 for a centered density by radial quadrature against the sphere-averaged heat kernel.
J0Value radial_density_quadrature(double t, double r, const InitialDatum& mu, int d) {
  const double st = std::sqrt(t);
  const double sig = sphere_area(d) * std::pow(2.0 * M_PI * t, -0.5 * d);
  auto f = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double g = (s - r) * (s - r) / (2.0 * t);
    return density_value(mu, s) * std::pow(s, d - 1) * sig * std::exp(-g) * scaled_sphere_average(r * s / t, d);
  };
  const double lo = std::max(0.0, r - 40.0 * st);
  const double hi = r + 40.0 * st;
  const int pieces = 40;
  const double w = (hi - lo) / pieces;
  J0Value out;
  out.closed_form = false;
  for (int i = 0; i < pieces; ++i) {
    const double a = lo + i * w, b = a + w;
    const quad::QuadResult q = a == 0.0 ? quad::endpoint_singular(f, a, b, 1e-11) : quad::interval(f, a, b, 1e-11);
    out.value += q.value;
    out.ok = out.ok && q.ok;
  }
  return out;
}

// log erfc(x), stable for large positive x.
double log_erfc(double x) {
  if (x < 25.0) return std::log(std::erfc(x));
  const double x2 = x * x;
  return -x2 - std::log(x * std::sqrt(M_PI)) + std::log1p(-0.5 / x2 + 0.75 / (x2 * x2));
}
} // namespace

InitialDatum InitialDatum::dirac_delta(double mass, std::vector<double> location) {
  InitialDatum m;
  m.kind = DatumKind::dirac;
  m.mass = mass;
  m.location = std::move(location);
  return m;
}
InitialDatum InitialDatum::constant_density(double c) {
  InitialDatum m;
  m.kind = DatumKind::constant;
  m.c = c;
  return m;
}
InitialDatum InitialDatum::riesz_singular(double alpha) {
  InitialDatum m;
  m.kind = DatumKind::riesz;
  m.alpha = alpha;
  return m;
}
InitialDatum InitialDatum::poly_growth_density(double alpha) {
  InitialDatum m;
  m.kind = DatumKind::poly_growth;
  m.alpha = alpha;
  return m;
}
InitialDatum InitialDatum::signed_combo(std::vector<Term> terms) {
  InitialDatum m;
  m.kind = DatumKind::combo;
  m.terms = std::move(terms);
  return m;
}

std::string datum_name(DatumKind k) {
  switch (k) {
    case DatumKind::dirac: return "dirac";
    case DatumKind::constant: return "constant";
    case DatumKind::riesz: return "riesz";
    case DatumKind::poly_growth: return "poly-growth";
    case DatumKind::combo: return "combo";
  }
  return "?";
}

void validate(const InitialDatum& mu, int d) {
  switch (mu.kind) {
    case DatumKind::dirac:
      if (!std::isfinite(mu.mass)) throw ParameterError("init.mass", "must be finite");
      if (!mu.location.empty() && static_cast<int>(mu.location.size()) != d) {
        throw ParameterError("init.location", "must have d coordinates");
      }
      for (double v : mu.location) {
        if (!std::isfinite(v)) throw ParameterError("init.location", "must be finite");
      }
      break;
    case DatumKind::constant:
      if (!std::isfinite(mu.c)) throw ParameterError("init.c", "must be finite");
      break;
    case DatumKind::riesz:
      if (!(mu.alpha > 0.0 && mu.alpha < d)) throw ParameterError("init.alpha", "must lie in (0, d)");
      break;
    case DatumKind::poly_growth:
      if (!(mu.alpha > 0.0) || !std::isfinite(mu.alpha)) throw ParameterError("init.alpha", "must be > 0");
      break;
    case DatumKind::combo:
      if (mu.terms.empty()) throw ParameterError("init.terms", "must not be empty");
      for (const auto& t : mu.terms) {
        if (!std::isfinite(t.coefficient)) throw ParameterError("init.terms", "coefficients must be finite");
        validate(t.datum, d);
      }
      break;
  }
}

bool is_centered(const InitialDatum& mu) {
  switch (mu.kind) {
    case DatumKind::dirac:
      return std::all_of(mu.location.begin(), mu.location.end(), [](double v) { return v == 0.0; });
    case DatumKind::combo:
      return std::all_of(mu.terms.begin(), mu.terms.end(), [](const auto& t) { return is_centered(t.datum); });
    default: return true;
  }
}

InitialDatum abs_datum(const InitialDatum& mu) {
  InitialDatum out = mu;
  switch (mu.kind) {
    case DatumKind::dirac: out.mass = std::abs(mu.mass); break;
    case DatumKind::constant: out.c = std::abs(mu.c); break;
    case DatumKind::combo:
      for (auto& t : out.terms) {
        t.coefficient = std::abs(t.coefficient);
        t.datum = abs_datum(t.datum);
      }
      break;
    default: break;
  }
  return out;
}

InitialDatum mu_star(const InitialDatum& mu) {
  return InitialDatum::signed_combo({{1.0, InitialDatum::constant_density(1.0)}, {1.0, abs_datum(mu)}});
}

double heat_kernel_r2(double t, double r2, int d) {
  if (!(t > 0.0)) throw std::domain_error("heat_kernel: t must be > 0");
  return std::pow(2.0 * M_PI * t, -0.5 * d) * std::exp(-r2 / (2.0 * t));
}

double heat_kernel(double t, std::span<const double> x) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return heat_kernel_r2(t, r2, static_cast<int>(x.size()));
}

double riesz_constant(double alpha, int d) {
  return std::pow(2.0, -0.5 * alpha) * gamma_fn(0.5 * (d - alpha)) / gamma_fn(0.5 * d);
}

J0Value j0_eval(double t, std::span<const double> x, const InitialDatum& mu) {
  if (!(t > 0.0)) throw std::domain_error("j0_eval: t must be > 0");
  const int d = static_cast<int>(x.size());
  switch (mu.kind) {
    case DatumKind::dirac: return {mu.mass * heat_kernel_r2(t, dist2(x, mu.location), d), true, true};
    case DatumKind::constant: return {mu.c, true, true};
    case DatumKind::riesz:
    case DatumKind::poly_growth: {
      const double s2 = mu.kind == DatumKind::riesz ? -mu.alpha : mu.alpha;
      try {
        const double v = radial_power_moment(s2, t, norm(x), d);
        if (std::isfinite(v)) return {v, true, true};
      } catch (const std::exception&) {
      }
      return radial_density_quadrature(t, norm(x), mu, d);
    }
    case DatumKind::combo: {
      J0Value acc;
      for (const auto& term : mu.terms) {
        const J0Value v = j0_eval(t, x, term.datum);
        acc.value += term.coefficient * v.value;
        acc.closed_form = acc.closed_form && v.closed_form;
        acc.ok = acc.ok && v.ok;
      }
      return acc;
    }
  }
  return {0.0, false, false};
}

J0Value j0_quadrature(double t, std::span<const double> x, const InitialDatum& mu) {
  if (!(t > 0.0)) throw std::domain_error("j0_quadrature: t must be > 0");
  switch (mu.kind) {
    case DatumKind::riesz:
    case DatumKind::poly_growth:
    case DatumKind::constant:
      return radial_density_quadrature(t, norm(x), mu, static_cast<int>(x.size()));
    case DatumKind::combo: {
      J0Value acc;
      acc.closed_form = false;
      for (const auto& term : mu.terms) {
        const J0Value v = j0_quadrature(t, x, term.datum);
        acc.value += term.coefficient * v.value;
        acc.ok = acc.ok && v.ok;
      }
      return acc;
    }
    case DatumKind::dirac: return j0_eval(t, x, mu);
  }
  return {0.0, false, false};
}

double j0_radial(double t, double r, const InitialDatum& mu, int d) {
  double x[3] = {r, 0.0, 0.0};
  return j0_eval(t, std::span<const double>(x, static_cast<std::size_t>(d)), mu).value;
}

namespace {
// (G(s,.) * e^{-a|.|})(x) in d = 1, exact.
double smoothed_exp_1d(double a, double s, double r) {
  r = std::abs(r);
  const double sg = std::sqrt(s);
  const double base = 0.5 * a * a * s;
  const double t1 = std::exp(base - a * r + log_erfc((a * sg - r / sg) / M_SQRT2));
  const double t2 = std::exp(base + a * r + log_erfc((a * sg + r / sg) / M_SQRT2));
  return 0.5 * (t1 + t2);
}

double smoothed_weight(const Weight& w, double s, double r) {
  if (w.d == 1 && w.kind == WeightKind::exp_decay) return smoothed_exp_1d(w.param, s, r);
  return heat_smoothed_weight(w, s, r);
}

// Power of |x| governing J0(t, x) at large |x|; -inf for Gaussian decay.
double growth_power(const InitialDatum& mu) {
  switch (mu.kind) {
    case DatumKind::dirac: return -kInf;
    case DatumKind::constant: return 0.0;
    case DatumKind::riesz: return -mu.alpha;
    case DatumKind::poly_growth: return mu.alpha;
    case DatumKind::combo: {
      double p = -kInf;
      for (const auto& t : mu.terms) p = std::max(p, growth_power(t.datum));
      return p;
    }
  }
  return 0.0;
}

const InitialDatum* single_dirac(const InitialDatum& mu, double* coef) {
  if (mu.kind == DatumKind::dirac) {
    *coef = 1.0;
    return &mu;
  }
  if (mu.kind == DatumKind::combo && mu.terms.size() == 1) {
    double inner = 1.0;
    const InitialDatum* d = single_dirac(mu.terms[0].datum, &inner);
    *coef = inner * mu.terms[0].coefficient;
    return d;
  }
  return nullptr;
}
} // namespace

GRhoValue g_rho(double t, const InitialDatum& mu, const Weight& w) {
  validate(w);
  validate(mu, w.d);
  if (!(t > 0.0)) throw std::domain_error("g_rho: t must be > 0");
  const int d = w.d;

  double coef = 1.0;
  if (const InitialDatum* dm = single_dirac(mu, &coef)) {
    const double m = coef * dm->mass;
    const double r0 = dm->location.empty() ? 0.0 : norm(dm->location);
    GRhoValue out;
    out.closed_form = true;
    out.value = m * m * heat_kernel_r2(2.0 * t, 0.0, d) * smoothed_weight(w, 0.5 * t, r0);
    out.ok = std::isfinite(out.value);
    return out;
  }

  const double p = growth_power(mu);
  if (w.kind == WeightKind::poly_decay && std::isfinite(p) && 2.0 * p + d - w.param >= 0.0) {
    return {kInf, false, false};
  }

  if (is_centered(mu)) {
    const double sd = sphere_area(d);
    auto g = [&](double r) {
      const double j = j0_radial(t, r, mu, d);
      return sd * std::pow(r, d - 1) * j * j * weight_value(w, r);
    };
    quad::PowerTails tails{d - 1.0, -kInf};
    if (w.kind == WeightKind::poly_decay) tails.infinity = d - 1.0 + 2.0 * std::max(p, -0.5 * d) - w.param;
    quad::HalfLineOptions o;
    o.low_anchor = std::min(0.0, 0.5 * std::log(t));
    o.high_anchor = std::max(0.0, 0.5 * std::log(t));
    o.rel_tol = 1e-10;
    const quad::QuadResult q = quad::half_line(g, tails, o);
    return {q.value, q.ok, false};
  }

  if (d == 1) {
    // off-center data in one dimension: integrate over the line with breaks at the atoms
    std::vector<double> cuts{0.0};
    auto collect = [&](auto&& self, const InitialDatum& m) -> void {
      if (m.kind == DatumKind::dirac && !m.location.empty()) cuts.push_back(m.location[0]);
      for (const auto& tt : m.terms) self(self, tt.datum);
    };
    collect(collect, mu);
    std::sort(cuts.begin(), cuts.end());
    const double reach = 60.0 * std::sqrt(t) + 200.0;
    cuts.insert(cuts.begin(), cuts.front() - reach);
    cuts.push_back(cuts.back() + reach);
    auto f = [&](double x) {
      const double j = j0_eval(t, std::span<const double>(&x, 1), mu).value;
      return j * j * weight_value(w, x);
    };
    GRhoValue out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double len = cuts[i + 1] - cuts[i];
      const int pieces = std::max(1, static_cast<int>(std::ceil(len / std::max(1.0, std::sqrt(t)))));
      for (int k = 0; k < pieces; ++k) {
        const quad::QuadResult q =
            quad::interval(f, cuts[i] + k * len / pieces, cuts[i] + (k + 1) * len / pieces, 1e-10);
        out.value += q.value;
        out.ok = out.ok && q.ok;
      }
    }
    if (w.kind != WeightKind::exp_decay && w.kind != WeightKind::stretched_exp) out.ok = false;
    return out;
  }
  throw ParameterError("init", "g_rho supports off-center Dirac masses mixed with other data only in d = 1");
}

std::string to_string(ProfileClass c) {
  switch (c) {
    case ProfileClass::vanishes: return "vanishes";
    case ProfileClass::bounded_at_infinity: return "bounded_at_infinity";
    case ProfileClass::grows_like_power: return "grows_like_t_power";
    case ProfileClass::unknown: return "unknown";
  }
  return "unknown";
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& v, double t_lo, double t_hi,
                    double* stderr_out) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t_lo * (1 - 1e-12) && t[i] <= t_hi * (1 + 1e-12) && v[i] > 0.0 && std::isfinite(v[i])) {
      xs.push_back(std::log(t[i]));
      ys.push_back(std::log(v[i]));
    }
  }
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("loglog_slope: need at least two positive samples in range");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  if (stderr_out) {
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = ys[i] - my - slope * (xs[i] - mx);
      rss += e * e;
    }
    *stderr_out = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  }
  return slope;
}

std::vector<double> geometric_grid(double a, double b, int count) {
  if (!(a > 0.0) || !(b > a) || count < 2) throw std::invalid_argument("geometric_grid: need 0 < a < b, count >= 2");
  std::vector<double> g(count);
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < count; ++i) g[i] = std::exp(la + (lb - la) * i / (count - 1));
  g.front() = a;
  g.back() = b;
  return g;
}

GRhoProfile g_rho_profile(const InitialDatum& mu, const Weight& w, const std::vector<double>& t_grid) {
  if (t_grid.size() < 2) throw ParameterError("t_grid", "needs at least two points");
  const auto [tmin_it, tmax_it] = std::minmax_element(t_grid.begin(), t_grid.end());
  if (!(*tmin_it > 0.0) || *tmax_it / *tmin_it < 1e4 * (1 - 1e-9)) {
    throw ParameterError("t_grid", "must be positive and span at least four decades");
  }
  GRhoProfile p;
  bool all_ok = true;
  for (double t : t_grid) {
    const GRhoValue v = g_rho(t, mu, w);
    p.t.push_back(t);
    p.value.push_back(v.value);
    all_ok = all_ok && v.ok && std::isfinite(v.value);
  }
  p.sup_estimate = *std::max_element(p.value.begin(), p.value.end());
  if (!all_ok) {
    p.classification = ProfileClass::unknown;
    return p;
  }
  const double tmax = *tmax_it;
  p.fitted_slope = loglog_slope(p.t, p.value, tmax / 10.0, tmax, &p.slope_stderr);
  if (p.fitted_slope < -0.1) {
    p.classification = ProfileClass::vanishes;
  } else if (p.fitted_slope <= 0.1) {
    p.classification = ProfileClass::bounded_at_infinity;
  } else {
    p.classification = ProfileClass::grows_like_power;
    p.sup_estimate = kInf;
  }
  p.init_gate_ok = p.classification == ProfileClass::vanishes || p.classification == ProfileClass::bounded_at_infinity;
  return p;
}

} // namespace shelab
