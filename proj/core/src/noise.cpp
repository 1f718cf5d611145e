#include "shelab/noise.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "shelab/errors.hpp"
#include "shelab/philox.hpp"

namespace shelab {

NoiseSampler build_sampler(const SpectralModel& model, const LatticeGrid& grid, std::uint64_t seed) {
  validate(model);
  grid.validate();
  if (model.d != grid.d) throw ParameterError("grid.d", "must equal model.d");
  NoiseSampler s;
  s.grid = grid;
  s.seed = seed;
  s.plan = plan_for(grid);
  const std::size_t nc = s.plan->complex_size();
  s.sigma.resize(nc);
  const double vol = std::pow(grid.L, grid.d);
  double fmax = 0.0;
  std::vector<double> xi(grid.d);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto k = s.plan->half_index(c);
    for (int a = 0; a < grid.d; ++a) xi[a] = grid.freq(k[a]);
    const double f = spectral_density(model, xi);
    if (!std::isfinite(f)) {
      std::ostringstream os;
      os << "spectral density is infinite at lattice mode (";
      for (int a = 0; a < grid.d; ++a) os << (a ? ", " : "") << xi[a];
      os << ")";
      throw ParameterError("model", os.str());
    }
    s.sigma[c] = std::sqrt(std::max(f, 0.0) * vol);
    fmax = std::max(fmax, f);
  }
  // f-hat at (pi n / L, 0, ..., 0)
  std::fill(xi.begin(), xi.end(), 0.0);
  xi[0] = M_PI * grid.n / grid.L;
  s.nyquist_ratio = fmax > 0.0 ? spectral_density(model, xi) / fmax : 0.0;
  return s;
}

void sample_increment_spectral(const NoiseSampler& s, double dt, std::uint64_t replica, std::uint64_t step,
                               std::vector<cplx>& out) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_increment: dt must be > 0");
  const SpectralPlan& plan = *s.plan;
  const LatticeGrid& g = s.grid;
  const std::size_t nc = plan.complex_size();
  out.resize(nc);
  const PhiloxKey key = philox_key(s.seed);
  const double sdt = std::sqrt(dt);
  const auto ctr_for = [&](std::size_t c) {
    return PhiloxCounter{static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(step),
                         static_cast<std::uint32_t>(step >> 32), static_cast<std::uint32_t>(replica)};
  };
  for (std::size_t c = 0; c < nc; ++c) {
    const auto z = philox_normal_pair(ctr_for(c), key);
    const double amp = s.sigma[c] * sdt;
    out[c] = cplx(amp * z[0] * M_SQRT1_2, amp * z[1] * M_SQRT1_2);
  }

  // In the k_last = 0 and n/2 planes the half spectrum holds both members of a conjugate
  // pair. Keep the lower-index member, mirror it onto its partner, and make
  // self-conjugate modes real with the full variance.
  const int half = g.n / 2;
  const std::size_t plane = nc / static_cast<std::size_t>(half + 1);
  for (int kl : {0, half}) {
    for (std::size_t p = 0; p < plane; ++p) {
      const std::size_t c = p * static_cast<std::size_t>(half + 1) + static_cast<std::size_t>(kl);
      auto k = plan.half_index(c);
      std::array<int, 3> kp = k;
      for (int a = 0; a < g.d - 1; ++a) kp[a] = (g.n - k[a]) % g.n;
      const std::size_t cp = plan.half_flatten(kp);
      if (cp == c) {
        const auto z = philox_normal_pair(ctr_for(c), key);
        out[c] = cplx(s.sigma[c] * sdt * z[0], 0.0);
      } else if (cp > c) {
        out[cp] = std::conj(out[c]);
      }
    }
  }
}

void sample_increment(const NoiseSampler& s, double dt, std::uint64_t replica, std::uint64_t step,
                      std::vector<double>& out, std::vector<cplx>& scratch) {
  sample_increment_spectral(s, dt, replica, step, scratch);
  out.resize(s.plan->real_size());
  const double inv_vol = 1.0 / std::pow(s.grid.L, s.grid.d);
  for (auto& v : scratch) v *= inv_vol;
  s.plan->inverse(scratch.data(), out.data());
}

std::vector<CovarianceEstimate> empirical_covariance(const LatticeGrid& g,
                                                     const std::vector<std::vector<double>>& fields,
                                                     const std::vector<std::array<int, 3>>& lags) {
  if (fields.size() < 100) throw std::invalid_argument("empirical_covariance: need at least 100 fields");
  const std::size_t N = g.size();
  std::vector<CovarianceEstimate> out;
  for (const auto& lag : lags) {
    // flat index shift for every lattice point under the periodic lag
    std::vector<std::size_t> shifted(N);
    for (std::size_t i = 0; i < N; ++i) {
      auto j = g.unflatten(i);
      for (int a = 0; a < g.d; ++a) j[a] = ((j[a] + lag[a]) % g.n + g.n) % g.n;
      shifted[i] = g.flatten(j);
    }
    double sum = 0.0, sum2 = 0.0;
    for (const auto& f : fields) {
      if (f.size() != N) throw std::invalid_argument("empirical_covariance: field size does not match grid");
      double c = 0.0;
      for (std::size_t i = 0; i < N; ++i) c += f[i] * f[shifted[i]];
      c /= static_cast<double>(N);
      sum += c;
      sum2 += c * c;
    }
    const double n = static_cast<double>(fields.size());
    const double mean = sum / n;
    const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
    out.push_back({lag, mean, std::sqrt(var / n)});
  }
  return out;
}

} // namespace shelab
