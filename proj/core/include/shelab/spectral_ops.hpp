//! \file spectral_ops.hpp
//! Real-to-complex FFTs on a lattice and the spectral heat propagator.
#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "shelab/lattice.hpp"

namespace shelab {

using cplx = std::complex<double>;

//! Plans for the r2c/c2r pair on one grid. Construction is serialized internally;
//! execution is safe from several threads on distinct buffers.
class SpectralPlan {
 public:
  explicit SpectralPlan(const LatticeGrid& g);
  ~SpectralPlan();
  SpectralPlan(const SpectralPlan&) = delete;
  SpectralPlan& operator=(const SpectralPlan&) = delete;

  const LatticeGrid& grid() const { return grid_; }
  //! n^{d-1} (n/2 + 1) half-spectrum entries.
  std::size_t complex_size() const { return csize_; }
  std::size_t real_size() const { return rsize_; }

  //! Unnormalized forward transform sum_x u(x) e^{-i k.x}.
  void forward(const double* in, cplx* out) const;
  //! Unnormalized inverse; overwrites `in`.
  void inverse(cplx* in, double* out) const;

  //! |xi|^2 for every half-spectrum entry.
  const std::vector<double>& xi2() const { return xi2_; }
  //! Multi-index (FFT order) of a half-spectrum entry; the last coordinate is in [0, n/2].
  std::array<int, 3> half_index(std::size_t c) const;
  std::size_t half_flatten(const std::array<int, 3>& k) const;

 private:
  LatticeGrid grid_;
  std::size_t csize_ = 0, rsize_ = 0;
  void* fwd_ = nullptr;
  void* inv_ = nullptr;
  std::vector<double> xi2_;
};

//! Shared plan cache keyed by grid.
std::shared_ptr<const SpectralPlan> plan_for(const LatticeGrid& g);

//! u <- G(t) * u on the torus (exact in Fourier space).
void heat_semigroup(const SpectralPlan& plan, std::vector<double>& u, double t);

} // namespace shelab
