//! \file quadrature.hpp
//! Thin adaptive-quadrature layer shared by the analytic modules.
#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace shelab::quad {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool ok = true;
};

using Integrand = std::function<double(double)>;

//! Adaptive Gauss-Kronrod (61 point) on a finite interval with a smooth integrand.
QuadResult interval(const Integrand& f, double a, double b, double rel_tol = 1e-12);

//! Double-exponential rule on a finite interval; tolerates algebraic endpoint singularities.
QuadResult endpoint_singular(const Integrand& f, double a, double b, double rel_tol = 1e-12);

//! Leading power laws of an integrand g on (0, inf): g(r) ~ r^origin as r -> 0 and
//! g(r) ~ r^infinity as r -> inf. Use -inf for decay faster than any power.
struct PowerTails {
  double origin = 0.0;
  double infinity = -std::numeric_limits<double>::infinity();
};

//! Options for half_line. The integrand is handled in v = log r. The window starts
//! 40/(origin+1) below `low_anchor` and ends past `high_anchor` (40/|infinity+1| above it,
//! or where a super-algebraic tail has died out). Both ends are clipped to
//! [log_floor, log_ceiling] and the clipped tails are added analytically from the
//! declared power laws.
struct HalfLineOptions {
  double low_anchor = 0.0;
  double high_anchor = 0.0;
  double log_floor = -300.0;
  double log_ceiling = 300.0;
  double rel_tol = 1e-12;
  double piece_width = 8.0;
};

//! int_0^inf g(r) dr through r = e^v. Requires origin > -1 and infinity < -1;
//! callers decide divergence before calling.
QuadResult half_line(const Integrand& g, PowerTails tails, HalfLineOptions opts = {});

//! Tensor Gauss-Legendre nodes and weights on [0, 1].
struct GaussLegendre {
  explicit GaussLegendre(int n);
  int size() const { return static_cast<int>(nodes.size()); }
  std::vector<double> nodes;
  std::vector<double> weights;
};

} // namespace shelab::quad
