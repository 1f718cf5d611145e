#include "shelab/conditions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "shelab/errors.hpp"
#include "shelab/specfun.hpp"

namespace shelab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlack = 1e-6;

void check_lip(const LipschitzSpec& lip) {
  if (!(lip.L_b >= 0.0) || !std::isfinite(lip.L_b)) throw ParameterError("lipschitz.L_b", "must be finite and >= 0");
  if (!(lip.L_0 >= 0.0) || !std::isfinite(lip.L_0)) throw ParameterError("lipschitz.L_0", "must be finite and >= 0");
}
} // namespace

double LipschitzSpec::varsigma_bar() const { return L_b > 0.0 ? L_0 / L_b : kInf; }

LipschitzBound max_lipschitz(const SpectralModel& m) {
  const double u0 = upsilon(m, 0.0, 0.0);
  if (!std::isfinite(u0)) return {0.0, false};
  return {1.0 / std::sqrt(128.0 * u0), true};
}

double alpha_max(const SpectralModel& m) {
  const AlphaWindow w = upsilon_alpha_window(m);
  if (w.empty()) return 0.0;
  const double lo = 0.5 * w.lo;
  const double hi = std::min(0.5, 0.5 * w.hi);
  return hi > lo ? hi : 0.0;
}

AlphaQResult select_alpha_q(double upsilon0, double amax, const LipschitzSpec& lip) {
  check_lip(lip);
  AlphaQResult out;
  if (!std::isfinite(upsilon0)) {
    out.binding_constraint = "Upsilon(0) < inf";
    return out;
  }
  const double lo = 64.0 * lip.L_b * lip.L_b * upsilon0;
  if (!(128.0 * lip.L_b * lip.L_b * upsilon0 < 1.0)) {
    out.binding_constraint = "128 L_b^2 Upsilon(0) < 1";
    return out;
  }
  if (!(amax > lo)) {
    std::ostringstream os;
    os << "64 L_b^2 Upsilon(0) < alpha_max (" << lo << " >= " << amax << ")";
    out.binding_constraint = os.str();
    return out;
  }
  AlphaQChoice c;
  c.alpha = 0.5 * (lo + amax);
  c.q = lo > 0.0 ? std::sqrt(1.0 / (c.alpha * lo)) : 2.0 / c.alpha;
  out.choice = c;
  return out;
}

AlphaQResult select_alpha_q(const SpectralModel& m, const LipschitzSpec& lip) {
  return select_alpha_q(upsilon(m, 0.0, 0.0), alpha_max(m), lip);
}

HuaReport hua_check(const SpectralModel& m, double alpha, const std::vector<double>& t_grid) {
  if (!(alpha >= 0.0 && alpha < 0.5)) throw ParameterError("alpha", "must lie in [0, 1/2)");
  HuaReport rep;
  rep.alpha = alpha;
  rep.upsilon_2alpha = upsilon(m, 2.0 * alpha, 0.0);
  rep.upsilon0 = upsilon(m, 0.0, 0.0);
  const double g = gamma_fn(1.0 - 2.0 * alpha);
  const double tpd = std::pow(2.0 * M_PI, m.d);
  rep.limit = tpd * g * rep.upsilon_2alpha;
  rep.ok = true;
  double worst_excess = -kInf;
  for (double t : t_grid) {
    HuaRow row;
    row.t = t;
    row.h_alpha = h_alpha(m, alpha, t);
    row.lhs = row.h_alpha / tpd;
    row.rhs = g * rep.upsilon_2alpha;
    row.part3_rhs = row.h_alpha / (tpd * g) + rep.upsilon0 / (g * std::pow(t, 2.0 * alpha));
    row.part1_ok = row.lhs <= row.rhs * (1.0 + kSlack);
    row.part3_ok = rep.upsilon_2alpha <= row.part3_rhs * (1.0 + kSlack);
    const double excess1 = row.lhs / row.rhs - 1.0;
    const double excess3 = rep.upsilon_2alpha / row.part3_rhs - 1.0;
    if (!row.part1_ok || !row.part3_ok) {
      rep.ok = false;
      const double e = std::max(excess1, excess3);
      if (e > worst_excess) {
        worst_excess = e;
        std::ostringstream os;
        os << "t=" << t << (row.part1_ok ? " part (3)" : " part (1)") << " exceeded by relative " << e;
        rep.worst = os.str();
      }
    }
    rep.rows.push_back(row);
  }
  return rep;
}

ConditionReport check_conditions(const SpectralModel& m, const LipschitzSpec& lip, bool run_hua) {
  validate(m);
  check_lip(lip);
  ConditionReport r;
  r.dalang_value = upsilon(m, 0.0, 1.0);
  r.dalang_ok = std::isfinite(r.dalang_value);
  r.upsilon0 = upsilon(m, 0.0, 0.0);
  r.dalang00_ok = std::isfinite(r.upsilon0);
  const double lb2 = lip.L_b * lip.L_b;
  r.interval_lo = r.dalang00_ok ? 128.0 * lb2 * r.upsilon0 : kInf;
  r.interval_hi = 1.0;
  r.lip_ok = r.interval_lo < 1.0;
  r.alpha_max = alpha_max(m);

  AlphaQResult aq = select_alpha_q(r.upsilon0, r.alpha_max, lip);
  r.binding_constraint = aq.binding_constraint;
  if (aq.choice) {
    r.upsilon_2alpha = upsilon(m, 2.0 * aq.choice->alpha, 0.0);
    if (std::isfinite(r.upsilon_2alpha)) {
      r.choice = aq.choice;
    } else {
      r.binding_constraint = "Upsilon_{2 alpha}(0) < inf";
    }
  }
  if (r.choice && run_hua) {
    const HuaReport h = hua_check(m, r.choice->alpha, {0.1, 1.0, 10.0, 100.0});
    r.hua_evaluated = true;
    r.hua_ok = h.ok;
  }

  const AlphaWindow w = upsilon_alpha_window(m);
  const double lo = std::max(r.interval_lo, w.lo);
  r.statement_window_ok = r.dalang00_ok && std::min(1.0, w.hi) > lo;
  return r;
}

} // namespace shelab
