#include "shelab/spectral_ops.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <fftw3.h>

namespace shelab {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace

SpectralPlan::SpectralPlan(const LatticeGrid& g) : grid_(g) {
  g.validate(std::size_t{1} << 30);
  int dims[3] = {g.n, g.n, g.n};
  rsize_ = g.size();
  csize_ = rsize_ / g.n * (g.n / 2 + 1);
  std::vector<double> rbuf(rsize_);
  std::vector<cplx> cbuf(csize_);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_r2c(g.d, dims, rbuf.data(), reinterpret_cast<fftw_complex*>(cbuf.data()), flags);
    inv_ = fftw_plan_dft_c2r(g.d, dims, reinterpret_cast<fftw_complex*>(cbuf.data()), rbuf.data(),
                             flags | FFTW_DESTROY_INPUT);
  }
  if (!fwd_ || !inv_) throw std::runtime_error("FFTW planning failed");

  xi2_.resize(csize_);
  for (std::size_t c = 0; c < csize_; ++c) {
    const auto k = half_index(c);
    double s = 0.0;
    for (int a = 0; a < g.d; ++a) {
      const double xi = g.freq(k[a]);
      s += xi * xi;
    }
    xi2_[c] = s;
  }
}

SpectralPlan::~SpectralPlan() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void SpectralPlan::forward(const double* in, cplx* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void SpectralPlan::inverse(cplx* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_), reinterpret_cast<fftw_complex*>(in), out);
}

std::array<int, 3> SpectralPlan::half_index(std::size_t c) const {
  std::array<int, 3> k{0, 0, 0};
  const std::size_t last = static_cast<std::size_t>(grid_.n / 2 + 1);
  k[grid_.d - 1] = static_cast<int>(c % last);
  c /= last;
  for (int a = grid_.d - 2; a >= 0; --a) {
    k[a] = static_cast<int>(c % grid_.n);
    c /= grid_.n;
  }
  return k;
}

std::size_t SpectralPlan::half_flatten(const std::array<int, 3>& k) const {
  std::size_t c = 0;
  for (int a = 0; a < grid_.d - 1; ++a) c = c * grid_.n + static_cast<std::size_t>(k[a]);
  return c * static_cast<std::size_t>(grid_.n / 2 + 1) + static_cast<std::size_t>(k[grid_.d - 1]);
}

std::shared_ptr<const SpectralPlan> plan_for(const LatticeGrid& g) {
  static std::mutex m;
  static std::map<std::tuple<int, int, double>, std::weak_ptr<const SpectralPlan>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto key = std::make_tuple(g.d, g.n, g.L);
  if (auto p = cache[key].lock()) return p;
  auto p = std::make_shared<const SpectralPlan>(g);
  cache[key] = p;
  return p;
}

void heat_semigroup(const SpectralPlan& plan, std::vector<double>& u, double t) {
  std::vector<cplx> c(plan.complex_size());
  plan.forward(u.data(), c.data());
  const double inv_n = 1.0 / static_cast<double>(plan.real_size());
  const auto& xi2 = plan.xi2();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= std::exp(-0.5 * xi2[i] * t) * inv_n;
  plan.inverse(c.data(), u.data());
}

} // namespace shelab
