//! \file factorization.hpp
//! Factorization of the stochastic convolution:
//!   int_0^t G(t-r) * (b dW)(r) = (sin(alpha pi)/pi) int_0^t (t-s)^{alpha-1} G(t-s) * Y(s) ds,
//!   Y(s) = int_0^s (s-r)^{-alpha} G(s-r) * (b dW)(r).
//! All sums run in Fourier space on the record of per-step forcings.
#pragma once

#include <vector>

#include "shelab/solver.hpp"

namespace shelab {

enum class SingularRule {
  //! Exact integral of each singular kernel over its cell (default).
  product,
  //! Kernel at the cell's left endpoint, the cell touching the singularity at its midpoint.
  endpoint_midpoint
};

//! Y on the grid s_j = t0 + j dt, j = 1..M, stored as half spectra (unnormalized r2c scale).
struct YSeries {
  LatticeGrid grid;
  double dt = 0.0;
  double t0 = 0.0;
  double alpha = 0.0;
  SingularRule rule = SingularRule::product;
  std::vector<std::vector<cplx>> spectral;  //!< index j-1 holds Y(s_j)

  std::size_t steps() const { return spectral.size(); }
  //! Y(s_j) as a real lattice field.
  std::vector<double> field(std::size_t j) const;
};

//! Y(s_j) = sum_{m<j} w_{j,m} G(s_j - r_m) * F_m with r_m = t0 + m dt.
//! alpha must lie in [0, 1/2); alpha = 0 reproduces the plain stochastic convolution.
YSeries compute_Y(const NoiseRecord& rec, double alpha, SingularRule rule = SingularRule::product);

//! (sin(alpha pi)/pi) sum_j a_j G(t - s_j) * Y(s_j) over s_j <= t; t must be a grid time.
//! alpha must lie in (0, 1/2).
std::vector<double> factorization_reconstruct(const YSeries& y, double t);

//! The stochastic convolution sum_{m < M} G(t - r_m) * F_m accumulated directly.
std::vector<double> direct_convolution(const NoiseRecord& rec, double t);

//! Combined discrete weight (sin(alpha pi)/pi) sum_j a_j w_{j,m} for a forcing at cell m seen
//! at time index M; equals 1 in the continuum limit by the Beta integral.
double impulse_coefficient(double alpha, double dt, std::size_t M, std::size_t m, SingularRule rule);

//! Relative L2 distance ||a - b|| / ||b||.
double relative_l2(const std::vector<double>& a, const std::vector<double>& b);

} // namespace shelab
