#include <cmath>
#include <limits>

#include "shelab/errors.hpp"
#include "shelab/kernels.hpp"
#include "shelab/specfun.hpp"

namespace shelab {

namespace {

// Gamma on (-1, 0) through the recurrence; the expansions only need that strip.
double gamma_signed(double x) { return x > 0.0 ? gamma_fn(x) : gamma_fn(x + 1.0) / x; }

bool same(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

} // namespace

double HAlphaAsymptotic::evaluate(double t) const {
  double v = 0.0;
  for (const auto& term : terms) {
    v += term.coefficient * std::pow(t, term.exponent) * std::pow(std::log(1.0 / t), term.log_power);
  }
  return v;
}

double HAlphaAsymptotic::leading(double t) const {
  const AsymptoticTerm* best = nullptr;
  for (const auto& term : terms) {
    if (!best || term.exponent < best->exponent ||
        (term.exponent == best->exponent && term.log_power > best->log_power)) {
      best = &term;
    }
  }
  if (!best) return 0.0;
  return best->coefficient * std::pow(t, best->exponent) * std::pow(std::log(1.0 / t), best->log_power);
}

HAlphaAsymptotic h_alpha_asymptotic(const SpectralModel& m, double alpha) {
  validate(m);
  if (!(alpha > 0.0 && alpha < 0.5)) throw ParameterError("alpha", "must lie in (0, 1/2)");
  const double a1 = 1.0 - 2.0 * alpha;
  HAlphaAsymptotic out;

  if (std::holds_alternative<BesselSpectral>(m.kind)) {
    out.regime = 'S';
    out.terms.push_back({a1, m.amplitude / a1, 0});
    return out;
  }
  const auto* k = std::get_if<BesselCorrelation>(&m.kind);
  if (!k) throw ParameterError("model.kind", "small-t expansion is available for bessel-corr and bessel-spec only");

  const double d = m.d;
  const double s = k->s;
  const double pd = m.amplitude * std::pow(M_PI, 0.5 * d);

  if (same(s, d)) {
    out.regime = 'b';
    const double c = digamma_fn(0.5 * d) + 2.0 * euler_gamma;
    out.terms.push_back({a1, pd / (a1 * gamma_fn(0.5 * d)), 1});
    out.terms.push_back({a1, pd * (1.0 - a1 * c) / (a1 * a1 * gamma_fn(0.5 * d)), 0});
  } else if (same(s, d + 2.0)) {
    out.regime = 'd';
    out.terms.push_back({a1, pd / (a1 * gamma_fn(0.5 * d + 1.0)), 0});
  } else if (s < d) {
    if (!(s > d - 2.0)) throw DomainViolation("s > d - 2");
    const double e1 = 0.5 * (s - d) + a1;
    if (!(e1 > 0.0)) throw DomainViolation("alpha < 1/2 - (d-s)/4");
    out.regime = 'a';
    out.terms.push_back({e1, pd * gamma_fn(0.5 * (d - s)) / (e1 * gamma_fn(0.5 * d)), 0});
    // Gamma((s-d)/2) < 0 here, so this correction is negative
    out.terms.push_back({a1, pd * gamma_signed(0.5 * (s - d)) / (a1 * gamma_fn(0.5 * s)), 0});
  } else {
    // d < s < d+2 and s > d+2 share the constant U(d/2, b, 0) = Gamma((s-d)/2)/Gamma(s/2)
    out.regime = s < d + 2.0 ? 'c' : 'e';
    out.terms.push_back({a1, pd * gamma_fn(0.5 * (s - d)) / (a1 * gamma_fn(0.5 * s)), 0});
  }
  return out;
}

} // namespace shelab
