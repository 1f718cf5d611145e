//! \file invariant.hpp
//! Time-averaged (Krylov-Bogoliubov) occupation statistics and tightness proxies.
#pragma once

#include <string>
#include <vector>

#include "shelab/lattice.hpp"
#include "shelab/weights.hpp"

namespace shelab {

//! Observables of one state: ||u||_rho and the first m coefficients <u, e_j>_rho.
struct OccupationSample {
  double t = 0.0;
  double norm_rho = 0.0;
  std::vector<double> projections;
};

//! Lattice Gram-Schmidt (in L^2_rho) of m Gaussian bumps of width `width` centred on
//! (c_j, 0, ..., 0), c_j evenly spaced in [-L/4, L/4].
struct ProjectionFamily {
  LatticeGrid grid;
  Weight weight;
  std::vector<double> rho;                 //!< weight on the lattice
  std::vector<std::vector<double>> basis;  //!< orthonormal in the lattice L^2_rho product

  ProjectionFamily(const LatticeGrid& g, const Weight& w, int m, double width = 0.0);
  int size() const { return static_cast<int>(basis.size()); }
  OccupationSample observe(const FieldState& s) const;
  //! Lattice L^2_rho inner product.
  double inner(const std::vector<double>& a, const std::vector<double>& b) const;
};

//! Per replica, the samples at uniformly spaced record times.
using OccupationSeries = std::vector<std::vector<OccupationSample>>;

struct KBAverage {
  double T = 0.0;
  double tau = 0.0;
  std::vector<OccupationSample> samples;  //!< replicas x recorded times in [tau, tau + T]
  int replicas = 0;
  int times = 0;
};

//! Time-and-replica empirical measure over [tau, tau + T]. Throws when the window is not
//! covered by the records, when tau <= 0, or when spacing is not uniform.
KBAverage kb_average(const OccupationSeries& series, double tau, double T);
//! Convenience: observe full trajectories first.
KBAverage kb_average(const std::vector<std::vector<FieldState>>& trajectories, const ProjectionFamily& fam,
                     double tau, double T);

//! Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<double> a, std::vector<double> b);
//! Expected two-sample KS statistic under the null: sqrt(pi/2) ln 2 sqrt((n+m)/(nm)).
double ks_noise_floor(std::size_t n, std::size_t m);

struct KBCoordinate {
  std::string name;                 //!< "norm" or "proj<j>"
  std::vector<double> distances;    //!< KS between successive windows
  std::vector<double> noise_floors; //!< nominal two-sample floor for each pair
  bool decreasing = false;          //!< strictly decreasing
  bool final_below = false;         //!< last distance < 2 x its floor
};

struct KBConvergenceReport {
  std::vector<double> windows;      //!< T of each KB average
  std::vector<KBCoordinate> coords;
  bool converged = false;           //!< every coordinate decreasing and final_below
  bool norm_converged = false;      //!< the norm coordinate alone
};

//! KS distances between successive KB averages (at least three nested windows).
KBConvergenceReport kb_convergence(const std::vector<KBAverage>& kb);

struct QuantileRow {
  double t = 0.0;
  double level = 0.0;
  double value = 0.0;
};

struct TightnessTable {
  std::vector<QuantileRow> rows;
  std::vector<double> levels;
  //! Lambda(eps) per level: the max over t >= tau of the (1 - eps) quantile across replicas.
  std::vector<double> envelope;
  //! Same envelope restricted to the first half of the window.
  std::vector<double> envelope_first_half;
};

//! Quantiles of ||u(t)||_rho across replicas for each recorded t >= tau. `levels` are
//! exceedance probabilities eps; the reported quantile is at 1 - eps.
TightnessTable tightness_quantiles(const OccupationSeries& series, double tau, const std::vector<double>& levels);

//! Empirical quantile with linear interpolation (type 7).
double quantile(std::vector<double> v, double q);

} // namespace shelab
