#include "shelab/factorization.hpp"

#include <cmath>
#include <sstream>

#include "shelab/errors.hpp"

namespace shelab {

namespace {

// Weight of forcing cell m in Y(s_j), lag = j - m >= 1.
double y_weight(double alpha, double dt, std::size_t lag, SingularRule rule) {
  const double L = static_cast<double>(lag);
  if (rule == SingularRule::endpoint_midpoint) {
    return lag == 1 ? std::pow(0.5 * dt, -alpha) : std::pow(L * dt, -alpha);
  }
  return std::pow(dt, -alpha) * (std::pow(L, 1.0 - alpha) - std::pow(L - 1.0, 1.0 - alpha)) / (1.0 - alpha);
}

// Weight of Y(s_j) in the reconstruction at t, lag = M - j >= 0.
double a_weight(double alpha, double dt, std::size_t lag, SingularRule rule) {
  const double K = static_cast<double>(lag);
  if (rule == SingularRule::endpoint_midpoint) {
    return lag == 0 ? std::pow(0.5 * dt, alpha - 1.0) * dt : std::pow(K * dt, alpha - 1.0) * dt;
  }
  return std::pow(dt, alpha) * (std::pow(K + 1.0, alpha) - std::pow(K, alpha)) / alpha;
}

// exp(-|xi|^2 lag dt / 2), tabulated per lag when the table is small enough.
class Decay {
 public:
  Decay(const SpectralPlan& plan, double dt, std::size_t max_lag) : xi2_(plan.xi2()), dt_(dt) {
    if ((max_lag + 1) * xi2_.size() > kTableLimit) return;
    tab_.assign(max_lag + 1, std::vector<double>(xi2_.size()));
    for (std::size_t c = 0; c < xi2_.size(); ++c) {
      const double one = std::exp(-0.5 * xi2_[c] * dt);
      double v = 1.0;
      for (std::size_t l = 0; l <= max_lag; ++l) {
        tab_[l][c] = v;
        v *= one;
      }
    }
  }
  //! Row for `lag`; `buf` is filled only when the table was not built.
  const std::vector<double>& row(std::size_t lag, std::vector<double>& buf) const {
    if (!tab_.empty()) return tab_[lag];
    buf.resize(xi2_.size());
    for (std::size_t c = 0; c < xi2_.size(); ++c) buf[c] = std::exp(-0.5 * xi2_[c] * dt_ * static_cast<double>(lag));
    return buf;
  }

 private:
  static constexpr std::size_t kTableLimit = std::size_t{1} << 24;
  const std::vector<double>& xi2_;
  double dt_;
  std::vector<std::vector<double>> tab_;
};

std::vector<double> to_real(const SpectralPlan& plan, std::vector<cplx> spec) {
  std::vector<double> out(plan.real_size());
  const double inv_n = 1.0 / static_cast<double>(plan.real_size());
  for (auto& v : spec) v *= inv_n;
  plan.inverse(spec.data(), out.data());
  return out;
}

std::size_t time_index(double t, double t0, double dt, std::size_t available, const char* what) {
  const double x = (t - t0) / dt;
  const long long M = std::llround(x);
  if (std::abs(x - static_cast<double>(M)) > 1e-6 || M < 1 || static_cast<std::size_t>(M) > available) {
    std::ostringstream os;
    os << what << ": t = " << t << " is not a covered grid time (coverage " << available << " steps of " << dt
       << " from " << t0 << ")";
    throw std::out_of_range(os.str());
  }
  return static_cast<std::size_t>(M);
}

} // namespace

std::vector<double> YSeries::field(std::size_t j) const {
  return to_real(*plan_for(grid), spectral.at(j - 1));
}

YSeries compute_Y(const NoiseRecord& rec, double alpha, SingularRule rule) {
  if (!(alpha >= 0.0 && alpha < 0.5)) throw ParameterError("alpha", "must lie in [0, 1/2)");
  if (!(rec.dt > 0.0)) throw ParameterError("noise.dt", "must be > 0");
  auto plan = plan_for(rec.grid);
  const std::size_t M = rec.forcing.size();
  const std::size_t NC = plan->complex_size();
  YSeries y{rec.grid, rec.dt, rec.t0, alpha, rule, {}};
  y.spectral.assign(M, std::vector<cplx>(NC, cplx(0.0, 0.0)));
  const Decay decay(*plan, rec.dt, M);
  std::vector<double> buf;
  std::vector<double> w(M + 1);
  for (std::size_t l = 1; l <= M; ++l) w[l] = y_weight(alpha, rec.dt, l, rule);
  for (std::size_t j = 1; j <= M; ++j) {
    auto& out = y.spectral[j - 1];
    for (std::size_t m = 0; m < j; ++m) {
      const std::size_t lag = j - m;
      const auto& F = rec.forcing[m];
      const auto& P = decay.row(lag, buf);
      const double wl = w[lag];
      for (std::size_t c = 0; c < NC; ++c) out[c] += (wl * P[c]) * F[c];
    }
  }
  return y;
}

std::vector<double> factorization_reconstruct(const YSeries& y, double t) {
  if (!(y.alpha > 0.0 && y.alpha < 0.5)) throw ParameterError("alpha", "must lie in (0, 1/2) for the reconstruction");
  const std::size_t M = time_index(t, y.t0, y.dt, y.steps(), "factorization_reconstruct");
  auto plan = plan_for(y.grid);
  const std::size_t NC = plan->complex_size();
  const Decay decay(*plan, y.dt, M);
  std::vector<double> buf;
  const double pref = std::sin(y.alpha * M_PI) / M_PI;
  std::vector<cplx> acc(NC, cplx(0.0, 0.0));
  for (std::size_t j = 1; j <= M; ++j) {
    const std::size_t lag = M - j;
    const double a = pref * a_weight(y.alpha, y.dt, lag, y.rule);
    const auto& P = decay.row(lag, buf);
    const auto& Y = y.spectral[j - 1];
    for (std::size_t c = 0; c < NC; ++c) acc[c] += (a * P[c]) * Y[c];
  }
  return to_real(*plan, std::move(acc));
}

std::vector<double> direct_convolution(const NoiseRecord& rec, double t) {
  const std::size_t M = time_index(t, rec.t0, rec.dt, rec.forcing.size(), "direct_convolution");
  auto plan = plan_for(rec.grid);
  const Decay decay(*plan, rec.dt, M);
  std::vector<double> buf;
  std::vector<cplx> acc(plan->complex_size(), cplx(0.0, 0.0));
  for (std::size_t m = 0; m < M; ++m) {
    const auto& P = decay.row(M - m, buf);
    const auto& F = rec.forcing[m];
    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += P[c] * F[c];
  }
  return to_real(*plan, std::move(acc));
}

double impulse_coefficient(double alpha, double dt, std::size_t M, std::size_t m, SingularRule rule) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw ParameterError("alpha", "must lie in (0, 1/2)");
  if (m >= M) throw std::invalid_argument("impulse_coefficient: need m < M");
  double s = 0.0;
  for (std::size_t j = m + 1; j <= M; ++j) s += a_weight(alpha, dt, M - j, rule) * y_weight(alpha, dt, j - m, rule);
  return std::sin(alpha * M_PI) / M_PI * s;
}

double relative_l2(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("relative_l2: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

} // namespace shelab
