#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_erf.h>
#include <gsl/gsl_sf_gamma.h>
#include <gsl/gsl_sf_hyperg.h>
#include <gsl/gsl_sf_psi.h>

namespace oracle {

namespace {

struct Workspace {
  gsl_integration_workspace* w;
  Workspace() : w(gsl_integration_workspace_alloc(4000)) { gsl_set_error_handler_off(); }
  ~Workspace() { gsl_integration_workspace_free(w); }
};

double trampoline(double x, void* p) { return (*static_cast<const Fn*>(p))(x); }

void check(int status, const char* what) {
  if (status != GSL_SUCCESS && status != GSL_EROUND) {
    throw std::runtime_error(std::string(what) + ": " + gsl_strerror(status));
  }
}

} // namespace

double integrate(const Fn& f, double a, double b, double rel, double abs) {
  Workspace ws;  // one per call, so nested integrals stay independent
  gsl_function F{&trampoline, const_cast<Fn*>(&f)};
  double r = 0.0, err = 0.0;
  check(gsl_integration_qags(&F, a, b, abs, rel, 4000, ws.w, &r, &err), "qags");
  return r;
}

double integrate_to_inf(const Fn& f, double a, double rel, double abs) {
  Workspace ws;
  gsl_function F{&trampoline, const_cast<Fn*>(&f)};
  double r = 0.0, err = 0.0;
  check(gsl_integration_qagiu(&F, a, abs, rel, 4000, ws.w, &r, &err), "qagiu");
  return r;
}

double integrate_smooth(const Fn& f, double a, double b, double rel, double abs) {
  Workspace ws;
  gsl_function F{&trampoline, const_cast<Fn*>(&f)};
  double r = 0.0, err = 0.0;
  check(gsl_integration_qag(&F, a, b, abs, rel, 4000, GSL_INTEG_GAUSS61, ws.w, &r, &err), "qag");
  return r;
}

double fourier_cos(const Fn& f, double omega, double abs) {
  Workspace ws, cycles;
  gsl_integration_qawo_table* t = gsl_integration_qawo_table_alloc(omega, 1.0, GSL_INTEG_COSINE, 100);
  gsl_function F{&trampoline, const_cast<Fn*>(&f)};
  double r = 0.0, err = 0.0;
  const int status = gsl_integration_qawf(&F, 0.0, abs, 4000, ws.w, cycles.w, t, &r, &err);
  gsl_integration_qawo_table_free(t);
  check(status, "qawf");
  return r;
}

double gamma(double x) { return gsl_sf_gamma(x); }
double lgamma(double x) { return gsl_sf_lngamma(x); }
double digamma(double x) { return gsl_sf_psi(x); }
double bessel_k(double nu, double x) { return gsl_sf_bessel_Knu(nu, x); }
double hyperg_u(double a, double b, double x) { return gsl_sf_hyperg_U(a, b, x); }
double erfc(double x) { return gsl_sf_erfc(x); }

double fresnel_s(double z) {
  return integrate_smooth([](double t) { return std::sin(M_PI * t * t / 2.0); }, 0.0, z, 1e-13, 1e-15);
}
double fresnel_c(double z) {
  return integrate_smooth([](double t) { return std::cos(M_PI * t * t / 2.0); }, 0.0, z, 1e-13, 1e-15);
}

double sphere_area(int d) { return 2.0 * std::pow(M_PI, d / 2.0) / gsl_sf_gamma(d / 2.0); }

double bessel_potential(double s, int d, double r) {
  const Fn g = [=](double u) {
    return std::exp(-u - r * r / (4.0 * u)) * std::pow(4.0 * M_PI * u, -d / 2.0) * std::pow(u, s / 2.0 - 1.0);
  };
  // split at u = 1 so that the r -> 0 spike and the slow tail are integrated separately
  return (integrate(g, 0.0, 1.0, 1e-11) + integrate_to_inf(g, 1.0, 1e-11)) / gsl_sf_gamma(s / 2.0);
}

double upsilon_radial(const Fn& spectral, int d, double alpha, double beta) {
  const Fn g = [&](double r) { return spectral(r) * std::pow(r, d - 1) / std::pow(beta + r * r, 1.0 - alpha); };
  const double v = integrate(g, 0.0, 1.0, 1e-11) + integrate_to_inf(g, 1.0, 1e-11);
  return sphere_area(d) * v / std::pow(2.0 * M_PI, d);
}

double h_alpha_radial(const Fn& spectral, int d, double alpha, double t) {
  const Fn phi = [&](double r) {
    const Fn g = [&](double x) { return spectral(x) * std::pow(x, d - 1) * std::exp(-r * x * x); };
    return sphere_area(d) * (integrate(g, 0.0, 1.0, 1e-12) + integrate_to_inf(g, 1.0, 1e-12));
  };
  return integrate([&](double r) { return std::pow(r, -2.0 * alpha) * phi(r); }, 0.0, t, 1e-9);
}

} // namespace oracle
