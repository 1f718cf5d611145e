#include "shelab/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/legendre.hpp>

namespace shelab::quad {

namespace {
using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

constexpr unsigned kMaxDepth = 18;

double safe_eval(const Integrand& f, double x) {
  double v = f(x);
  return std::isfinite(v) ? v : 0.0;
}
} // namespace

QuadResult interval(const Integrand& f, double a, double b, double rel_tol) {
  QuadResult r;
  if (a == b) return r;
  double l1 = 0.0;
  r.value = gauss_kronrod<double, 61>::integrate(
      [&](double x) { return f(x); }, a, b, kMaxDepth, rel_tol, &r.error, &l1);
  r.ok = std::isfinite(r.value) && r.error <= std::max(1e3 * rel_tol * l1, 1e-300);
  return r;
}

QuadResult endpoint_singular(const Integrand& f, double a, double b, double rel_tol) {
  QuadResult r;
  if (a == b) return r;
  // the abscissa cache grows lazily, so keep one integrator per thread
  thread_local tanh_sinh<double> integrator(15);
  double l1 = 0.0;
  std::size_t levels = 0;
  r.value = integrator.integrate([&](double x) { return safe_eval(f, x); }, a, b, rel_tol,
                                 &r.error, &l1, &levels);
  r.ok = std::isfinite(r.value) && r.error <= std::max(1e3 * rel_tol * l1, 1e-300);
  return r;
}

QuadResult half_line(const Integrand& g, PowerTails tails, HalfLineOptions opts) {
  const double k0 = tails.origin + 1.0;
  const double kinf = tails.infinity + 1.0;
  if (!(k0 > 0.0) || !(kinf < 0.0)) {
    throw std::invalid_argument("half_line: integrand is not integrable at the declared tails");
  }
  auto h = [&](double v) {
    const double r = std::exp(v);
    const double val = g(r) * r;
    return std::isfinite(val) ? val : 0.0;
  };

  const double v_lo = std::max(opts.low_anchor - 40.0 / k0, opts.log_floor);
  double v_hi;
  if (std::isfinite(kinf)) {
    v_hi = std::min(opts.high_anchor + 40.0 / -kinf, opts.log_ceiling);
  } else {
    // faster-than-power decay: walk out until the integrand is negligible
    double peak = std::abs(h(opts.high_anchor));
    double prev = peak;
    v_hi = opts.high_anchor;
    for (int i = 0; i < 1400 && v_hi < opts.log_ceiling; ++i) {
      v_hi += 0.5;
      const double cur = std::abs(h(v_hi));
      peak = std::max(peak, cur);
      if (cur <= 1e-30 * peak && cur <= prev) break;
      prev = cur;
    }
  }

  QuadResult core;
  // split the log-window so each adaptive call sees a mildly varying integrand
  const int pieces = std::max(1, static_cast<int>(std::ceil((v_hi - v_lo) / opts.piece_width)));
  const double width = (v_hi - v_lo) / pieces;
  core.ok = true;
  for (int i = 0; i < pieces; ++i) {
    QuadResult part = interval(h, v_lo + i * width, v_lo + (i + 1) * width, opts.rel_tol);
    core.value += part.value;
    core.error += part.error;
    core.ok = core.ok && part.ok;
  }

  const double lower_tail = h(v_lo) / k0;
  const double upper_tail = std::isfinite(kinf) ? h(v_hi) / -kinf : 0.0;
  core.value += lower_tail + upper_tail;
  core.error += 1e-6 * (std::abs(lower_tail) + std::abs(upper_tail));
  core.ok = core.ok && std::isfinite(core.value);
  return core;
}

GaussLegendre::GaussLegendre(int n) {
  if (n < 1) throw std::invalid_argument("GaussLegendre: n must be positive");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const double p = boost::math::legendre_p(n, x);
      const double dp = boost::math::legendre_p_prime(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = boost::math::legendre_p_prime(n, x);
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

} // namespace shelab::quad
