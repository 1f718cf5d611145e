//! \file noise.hpp
//! Spatially homogeneous, white-in-time Gaussian noise increments on the periodic lattice,
//! synthesized from the spectral density.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "shelab/kernels.hpp"
#include "shelab/lattice.hpp"
#include "shelab/spectral_ops.hpp"

namespace shelab {

//! Immutable per-mode amplitudes. sigma[c] = sqrt(f-hat(xi_c) L^d) for each half-spectrum
//! entry c. A field is X = (1/L^d) sum_k A_k e^{i xi_k.x}, so E X(x) X(y) = dt L^{-d} sum_k
//! f-hat(xi_k) e^{i xi_k.(x-y)}, the Riemann sum of dt f(x - y) on the torus.
struct NoiseSampler {
  LatticeGrid grid;
  std::uint64_t seed = 0;
  std::vector<double> sigma;
  std::shared_ptr<const SpectralPlan> plan;
  //! f-hat at the largest lattice frequency relative to its maximum; an aliasing indicator.
  double nyquist_ratio = 0.0;
};

//! Throws ParameterError naming the mode when f-hat is infinite on a lattice frequency.
NoiseSampler build_sampler(const SpectralModel& model, const LatticeGrid& grid, std::uint64_t seed);

//! Spectral coefficients A_k of the increment for (replica, step), already Hermitian-consistent
//! in the k_last = 0 and k_last = n/2 planes. Deterministic in (seed, replica, step).
void sample_increment_spectral(const NoiseSampler& s, double dt, std::uint64_t replica, std::uint64_t step,
                               std::vector<cplx>& out);

//! Real increment field dW for (replica, step). `scratch` is resized as needed.
void sample_increment(const NoiseSampler& s, double dt, std::uint64_t replica, std::uint64_t step,
                      std::vector<double>& out, std::vector<cplx>& scratch);

//! Exclusive per-replica cursor over the counter stream.
class NoiseStream {
 public:
  NoiseStream(const NoiseSampler& s, std::uint64_t replica, std::uint64_t first_step = 0)
      : s_(&s), replica_(replica), step_(first_step) {}
  void next(double dt, std::vector<double>& out) {
    sample_increment(*s_, dt, replica_, step_++, out, scratch_);
  }
  std::uint64_t position() const { return step_; }

 private:
  const NoiseSampler* s_;
  std::uint64_t replica_;
  std::uint64_t step_;
  std::vector<cplx> scratch_;
};

struct CovarianceEstimate {
  std::array<int, 3> lag{0, 0, 0};
  double estimate = 0.0;
  double standard_error = 0.0;
};

//! Translation-averaged covariance per field, then mean and standard error over fields
//! (fields assumed independent and centered). Needs at least 100 fields.
std::vector<CovarianceEstimate> empirical_covariance(const LatticeGrid& g,
                                                     const std::vector<std::vector<double>>& fields,
                                                     const std::vector<std::array<int, 3>>& lags);

} // namespace shelab
