#include "shelab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "shelab/errors.hpp"
#include "shelab/quadrature.hpp"

namespace shelab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double sphere_area(int d) { return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d); }

// Gauss-Legendre nodes for the perpendicular chi integral on [0, kChiCut].
constexpr double kChiCut = 10.0;
const quad::GaussLegendre& chi_rule() {
  static const quad::GaussLegendre gl(64);
  return gl;
}

double log_sum_exp_gk(const quad::Integrand& f, double a, double b) {
  return quad::interval(f, a, b, 1e-10).value;
}
} // namespace

std::string weight_name(WeightKind k) {
  switch (k) {
    case WeightKind::exp_decay: return "exp-decay";
    case WeightKind::poly_decay: return "poly-decay";
    case WeightKind::stretched_exp: return "stretched-exp";
  }
  return "?";
}

void validate(const Weight& w) {
  if (w.d < 1 || w.d > 3) throw ParameterError("weight.d", "must be 1, 2 or 3");
  if (!(w.param > 0.0) || !std::isfinite(w.param)) throw ParameterError("weight.param", "must be finite and > 0");
}

double log_weight(const Weight& w, double r) {
  r = std::abs(r);
  switch (w.kind) {
    case WeightKind::exp_decay: return -w.param * r;
    case WeightKind::poly_decay: return -std::log1p(std::pow(r, w.param));
    case WeightKind::stretched_exp: return -std::pow(r, w.param);
  }
  return 0.0;
}

double weight_value(const Weight& w, double r) { return std::exp(log_weight(w, r)); }

double weight_l1(const Weight& w) {
  validate(w);
  const double s = sphere_area(w.d);
  const double d = w.d;
  switch (w.kind) {
    case WeightKind::exp_decay: return s * std::tgamma(d) / std::pow(w.param, d);
    case WeightKind::stretched_exp: return s * std::tgamma(d / w.param) / w.param;
    case WeightKind::poly_decay:
      if (w.param <= d) return kInf;
      return s * (M_PI / w.param) / std::sin(d * M_PI / w.param);
  }
  return kInf;
}

double weight_tail_mass(const Weight& w, double R) {
  validate(w);
  if (R <= 0.0) return weight_l1(w);
  const double s = sphere_area(w.d);
  const double d = w.d;
  switch (w.kind) {
    case WeightKind::exp_decay:
      return s * boost::math::tgamma(d, w.param * R) / std::pow(w.param, d);
    case WeightKind::stretched_exp:
      return s * boost::math::tgamma(d / w.param, std::pow(R, w.param)) / w.param;
    case WeightKind::poly_decay: {
      if (w.param <= d) return kInf;
      auto g = [&](double u) { return std::pow(R + u, d - 1) * weight_value(w, R + u); };
      quad::HalfLineOptions o;
      o.low_anchor = std::log(R);
      o.high_anchor = std::log(R);
      return s * quad::half_line(g, {0.0, d - 1 - w.param}, o).value;
    }
  }
  return kInf;
}

std::vector<double> weight_field(const LatticeGrid& g, const Weight& w) {
  std::vector<double> rho(g.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = weight_value(w, std::sqrt(g.radius2(i)));
  return rho;
}

double weighted_norm_sq(const std::vector<double>& u, const std::vector<double>& rho, double cell_volume) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * u[i] * rho[i];
  return s * cell_volume;
}

WeightedNorm weighted_norm(const FieldState& field, const Weight& w) {
  validate(w);
  if (w.d != field.grid.d) throw ParameterError("weight.d", "does not match the grid dimension");
  const LatticeGrid& g = field.grid;
  WeightedNorm out;
  double boundary_max = 0.0;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const double u2 = field.values[i] * field.values[i];
    out.value += u2 * weight_value(w, std::sqrt(g.radius2(i)));
    const auto j = g.unflatten(i);
    for (int a = 0; a < g.d; ++a) {
      if (j[a] == 0 || j[a] == g.n - 1) {
        boundary_max = std::max(boundary_max, u2);
        break;
      }
    }
  }
  out.value *= g.cell_volume();
  out.truncation_error = boundary_max * weight_tail_mass(w, 0.5 * g.L);
  out.truncation_warning = out.truncation_error > 0.01 * out.value;
  return out;
}

std::string to_string(Admissibility a) {
  switch (a) {
    case Admissibility::admissible: return "admissible";
    case Admissibility::not_admissible: return "not_admissible";
    case Admissibility::unknown: return "unknown";
  }
  return "unknown";
}

Admissibility classify_admissible(const Weight& w) {
  validate(w);
  switch (w.kind) {
    case WeightKind::exp_decay: return Admissibility::admissible;
    case WeightKind::poly_decay: return w.param > w.d ? Admissibility::admissible : Admissibility::not_admissible;
    case WeightKind::stretched_exp: return w.param <= 1.0 ? Admissibility::admissible : Admissibility::not_admissible;
  }
  return Admissibility::unknown;
}

double log_heat_smoothed_ratio(const Weight& w, double t, double r) {
  validate(w);
  if (!(t > 0.0)) throw std::domain_error("log_heat_smoothed_ratio: t must be > 0");
  r = std::abs(r);
  const double st = std::sqrt(t);
  const double lr = log_weight(w, r);
  const int k = w.d - 1;  // degrees of freedom perpendicular to x
  const double chi_norm = k > 0 ? std::pow(2.0, 0.5 * k - 1.0) * std::tgamma(0.5 * k) : 1.0;

  // log of the w = 0 slice; the perpendicular factor is <= 1 because rho decreases in |y|
  auto slice = [&](double z) { return -0.5 * z * z + log_weight(w, r + st * z) - lr; };
  auto perpendicular = [&](double a) {
    if (k == 0) return 1.0;
    const auto& gl = chi_rule();
    const double la = log_weight(w, a);
    double s = 0.0;
    for (int i = 0; i < gl.size(); ++i) {
      const double wv = kChiCut * gl.nodes[i];
      const double dens = std::pow(wv, k - 1) * std::exp(-0.5 * wv * wv) / chi_norm;
      s += gl.weights[i] * dens * std::exp(log_weight(w, std::sqrt(a * a + t * wv * wv)) - la);
    }
    return s * kChiCut;
  };

  // the peak lies between the cusp of rho (z = -r/sqrt t) and the Gaussian mode
  const double z_cusp = -r / st;
  const double lo_scan = z_cusp - 4.0, hi_scan = 4.0;
  const int steps = std::clamp(static_cast<int>((hi_scan - lo_scan) / 0.05), 200, 4000);
  const double dz = (hi_scan - lo_scan) / steps;
  double emax = std::max(slice(z_cusp), slice(0.0));
  for (int i = 0; i <= steps; ++i) emax = std::max(emax, slice(lo_scan + i * dz));
  int first = -1, last = -1;
  for (int i = 0; i <= steps; ++i) {
    if (slice(lo_scan + i * dz) > emax - 60.0) {
      if (first < 0) first = i;
      last = i;
    }
  }
  double a = lo_scan + first * dz - 12.0;
  double b = lo_scan + last * dz + 12.0;

  auto f = [&](double z) {
    const double e = slice(z) - emax;
    if (e < -700.0) return 0.0;
    return std::exp(e) * perpendicular(r + st * z);
  };
  // break the range at the cusp so each piece is smooth
  std::vector<double> cuts{a};
  if (z_cusp > a && z_cusp < b) cuts.push_back(z_cusp);
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double len = cuts[c + 1] - cuts[c];
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / 2.0)));
    for (int p = 0; p < pieces; ++p) {
      total += log_sum_exp_gk(f, cuts[c] + p * len / pieces, cuts[c] + (p + 1) * len / pieces);
    }
  }
  return emax + std::log(total / std::sqrt(2.0 * M_PI));
}

double heat_smoothed_weight(const Weight& w, double t, double r) {
  return std::exp(log_weight(w, r) + log_heat_smoothed_ratio(w, t, r));
}

AdmissibilityCertificate admissibility_scan(const Weight& w, double T, double radius, int resolution) {
  validate(w);
  if (!(T > 0.0)) throw ParameterError("T", "must be > 0");
  if (!(radius > 0.0)) throw ParameterError("radius", "must be > 0");
  if (resolution < 2) throw ParameterError("resolution", "must be >= 2");
  AdmissibilityCertificate c;
  c.analytic_verdict = classify_admissible(w);
  c.T = T;
  c.radius = radius;
  c.resolution = resolution;

  auto sup_log = [&](double R, int res) {
    double best = -kInf;
    for (int i = 1; i <= 10; ++i) {
      const double t = T * i / 10.0;
      for (int j = 0; j < res; ++j) {
        const double v = log_heat_smoothed_ratio(w, t, R * j / (res - 1));
        if (!std::isfinite(v)) c.quadrature_ok = false;
        else best = std::max(best, v);
      }
    }
    return best;
  };
  for (double scale : {1.0, 2.0, 4.0}) c.log_sup_by_radius.push_back(sup_log(scale * radius, resolution));
  const double refined = sup_log(radius, 2 * resolution - 1);
  c.refined_change = std::abs(std::expm1(refined - c.log_sup_by_radius[0]));
  c.numeric_sup_ratio = std::exp(c.log_sup_by_radius[0]);

  const auto& ls = c.log_sup_by_radius;
  if (!c.quadrature_ok) {
    c.scan_verdict = Admissibility::unknown;
  } else if (ls[2] - ls[0] > std::log(2.0)) {
    c.scan_verdict = Admissibility::not_admissible;
  } else if (std::abs(ls[1] - ls[0]) < std::log(1.05) && std::abs(ls[2] - ls[1]) < std::log(1.05) &&
             c.refined_change < 0.05) {
    c.scan_verdict = Admissibility::admissible;
  } else {
    c.scan_verdict = Admissibility::unknown;
  }
  return c;
}

std::string to_string(PairIntegrability p) {
  switch (p) {
    case PairIntegrability::integrable: return "integrable";
    case PairIntegrability::not_integrable: return "not_integrable";
    case PairIntegrability::unsupported: return "unsupported";
  }
  return "unsupported";
}

PairIntegrability ratio_integrable(const Weight& rho, const Weight& rt) {
  validate(rho);
  validate(rt);
  if (rho.d != rt.d) return PairIntegrability::unsupported;
  using K = WeightKind;
  auto yes = [](bool b) { return b ? PairIntegrability::integrable : PairIntegrability::not_integrable; };
  const double p = rho.param, q = rt.param;
  const double d = rho.d;
  // rho / rho_tilde at large |x| decides everything; all three families are locally bounded
  if (rho.kind == K::exp_decay && rt.kind == K::exp_decay) return yes(p > q);
  if (rho.kind == K::poly_decay && rt.kind == K::poly_decay) return yes(p - q > d);
  if (rho.kind == K::stretched_exp && rt.kind == K::stretched_exp) return yes(p > q);
  if (rt.kind == K::poly_decay) return yes(rho.kind != K::poly_decay);
  if (rho.kind == K::poly_decay) return yes(false);
  if (rho.kind == K::exp_decay && rt.kind == K::stretched_exp) {
    // e^{-p r + r^q}
    return yes(q < 1.0 || (q == 1.0 && p > 1.0));
  }
  if (rho.kind == K::stretched_exp && rt.kind == K::exp_decay) {
    // e^{-r^p + q r}
    return yes(p > 1.0 || (p == 1.0 && q < 1.0));
  }
  return PairIntegrability::unsupported;
}

} // namespace shelab
