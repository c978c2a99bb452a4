#pragma once

// Stability of x' = A(t) x, A(t + T) = A(t), from the entries of A(t):
//
//   Pi+(t) = int_{t0}^{t} mu[A(s)] ds,   Pi-(t) = int_{t0}^{t} mu[-A(s)] ds
//   lambda* = Pi*(t0 + T) / T
//   delta_U* = max_{[t0, t0+T]} (Pi*(t) - lambda*(t - t0)),  delta_L* = min of the same
//
// Pi+(t0 + T) < 0 certifies uniform exponential stability with
// ||Phi(t, tau)|| <= K exp(-alpha (t - tau)), K = exp(delta_U+ - delta_L+),
// alpha = -Pi+(t0 + T) / T. Pi+(t0 + T) = 0 gives uniform stability and
// Pi-(t0 + T) < 0 gives instability. Every Floquet exponent has real part in
// [-lambda-, lambda+].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lnstab/error.hpp"
#include "lnstab/linalg.hpp"
#include "lnstab/lognorm.hpp"
#include "lnstab/norms.hpp"
#include "lnstab/quadrature.hpp"
#include "lnstab/settings.hpp"
#include "lnstab/system.hpp"

namespace lnstab {

enum class Sign { plus, minus };

// mu[A(t)] or mu[-A(t)].
inline double mu_at(const SystemDef& sys, const NormKind& kind, Sign sign, double t,
                    const Settings& cfg = default_settings()) {
  Matrix a = sys.matrix_at(t);
  if (sign == Sign::minus) a *= -1.0;
  return mu(a, kind, cfg);
}

// Pi*(t) by direct adaptive quadrature; t beyond one period reduces through
// Pi*(t) = k Pi*(t0 + T) + Pi*(t - kT).
inline double pi_integral(const SystemDef& sys, const NormKind& kind, Sign sign, double t,
                          const Settings& cfg = default_settings()) {
  const double t0 = sys.t0(), period = sys.period();
  if (!(t >= t0)) throw InputError("pi_integral: t must be >= t0");
  auto f = [&](double s) { return mu_at(sys, kind, sign, s, cfg); };
  const double periods = std::floor((t - t0) / period);
  double rest = t - periods * period;
  if (rest < t0) rest = t0;
  double value = 0.0;
  if (periods > 0.0)
    value += periods * adaptive_simpson(f, t0, t0 + period, cfg.quadrature_tol, cfg.quadrature_max_evals).value;
  if (rest > t0) {
    const double tol = cfg.quadrature_tol * std::max((rest - t0) / period, 1e-3);
    value += adaptive_simpson(f, t0, rest, tol, cfg.quadrature_max_evals).value;
  }
  return value;
}

// Pi*(t) tabulated on a uniform grid over one period, with exact off-grid
// evaluation by a short quadrature from the nearest node to the left.
class PiProfile {
 public:
  PiProfile(SystemDef sys, NormKind kind, Sign sign, const Settings& cfg = default_settings())
      : sys_(std::move(sys)), kind_(std::move(kind)), sign_(sign), cfg_(cfg) {
    const std::size_t n = std::max<std::size_t>(cfg_.extremum_scan_points, 1);
    step_ = sys_.period() / static_cast<double>(n);
    node_tol_ = cfg_.quadrature_tol / static_cast<double>(n);
    times_.resize(n + 1);
    values_.resize(n + 1);
    times_[0] = sys_.t0();
    values_[0] = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      times_[k] = k == n ? sys_.t0() + sys_.period() : sys_.t0() + step_ * static_cast<double>(k);
      const auto piece = integrate(times_[k - 1], times_[k]);
      values_[k] = values_[k - 1] + piece;
    }
  }

  const SystemDef& system() const noexcept { return sys_; }
  const NormKind& kind() const noexcept { return kind_; }
  Sign sign() const noexcept { return sign_; }

  // Pi*(t0 + T)
  double period_value() const noexcept { return values_.back(); }
  double error_estimate() const noexcept { return error_; }
  const std::vector<double>& grid_times() const noexcept { return times_; }
  const std::vector<double>& grid_values() const noexcept { return values_; }

  // Pi*(t) for any t >= t0.
  double operator()(double t) const {
    const double t0 = sys_.t0(), period = sys_.period();
    if (!(t >= t0)) throw InputError("Pi(t) needs t >= t0");
    double periods = std::floor((t - t0) / period);
    double rest = t - periods * period;
    if (rest >= t0 + period) {
      rest -= period;
      periods += 1.0;
    }
    rest = std::max(rest, t0);
    return periods * period_value() + within_period(rest);
  }

 private:
  double within_period(double t) const {
    const double t0 = sys_.t0();
    auto k = static_cast<std::size_t>(std::floor((t - t0) / step_));
    k = std::min(k, times_.size() - 1);
    while (k > 0 && times_[k] > t) --k;
    if (t == times_[k]) return values_[k];
    return values_[k] + integrate_quiet(times_[k], t);
  }

  double integrate(double a, double b) {
    auto f = [this](double s) { return mu_at(sys_, kind_, sign_, s, cfg_); };
    const auto r = adaptive_simpson(f, a, b, node_tol_, cfg_.quadrature_max_evals);
    error_ += r.error_estimate;
    return r.value;
  }

  double integrate_quiet(double a, double b) const {
    auto f = [this](double s) { return mu_at(sys_, kind_, sign_, s, cfg_); };
    return adaptive_simpson(f, a, b, node_tol_, cfg_.quadrature_max_evals).value;
  }

  SystemDef sys_;
  NormKind kind_;
  Sign sign_;
  Settings cfg_;
  double step_ = 0.0;
  double node_tol_ = 0.0;
  double error_ = 0.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

struct RateSummary {
  NormKind kind;
  double t0 = 0.0;
  double period = 0.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double delta_u_plus = 0.0;
  double delta_l_plus = 0.0;
  double delta_u_minus = 0.0;
  double delta_l_minus = 0.0;
  double quadrature_error_estimate = 0.0;

  double pi_plus_period() const noexcept { return lambda_plus * period; }
  double pi_minus_period() const noexcept { return lambda_minus * period; }
};

namespace detail {

// Maximizes g on [lo, hi] by golden-section search down to width `width`.
template <class G>
double golden_max(G&& g, double lo, double hi, double width) {
  constexpr double inv_phi = 0.6180339887498949;
  double best = std::max(g(lo), g(hi));
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = g(x1), f2 = g(x2);
  best = std::max({best, f1, f2});
  for (int it = 0; it < 200 && hi - lo > width; ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = g(x1);
      best = std::max(best, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = g(x2);
      best = std::max(best, f2);
    }
  }
  return best;
}

// max over [t0, t0 + T] of sign_factor * (Pi(t) - lambda (t - t0)): uniform
// scan over the profile grid, then golden-section refinement around the best
// local-extremum candidates.
inline double deviation_extremum(const PiProfile& profile, double lambda, double sign_factor, const Settings& cfg) {
  const auto& ts = profile.grid_times();
  const auto& vs = profile.grid_values();
  const double t0 = ts.front();
  const std::size_t n = ts.size();
  auto dev = [&](double t, double pi) { return sign_factor * (pi - lambda * (t - t0)); };
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = dev(ts[k], vs[k]);
  // the deviation vanishes at both ends of the period by construction
  g.front() = 0.0;
  g.back() = 0.0;

  std::vector<std::size_t> candidates;
  for (std::size_t k = 0; k < n; ++k) {
    const bool left_ok = k == 0 || g[k] >= g[k - 1];
    const bool right_ok = k + 1 == n || g[k] >= g[k + 1];
    if (left_ok && right_ok) candidates.push_back(k);
  }
  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) { return g[a] > g[b]; });
  if (candidates.size() > cfg.extremum_candidates) candidates.resize(cfg.extremum_candidates);

  double best = *std::max_element(g.begin(), g.end());
  const double width = cfg.extremum_bracket_rel * profile.system().period();
  auto g_at = [&](double t) { return dev(t, profile(t)); };
  for (std::size_t k : candidates) {
    const double lo = ts[k == 0 ? 0 : k - 1];
    const double hi = ts[std::min(k + 1, n - 1)];
    if (hi > lo) best = std::max(best, golden_max(g_at, lo, hi, width));
  }
  return sign_factor * best;
}

}  // namespace detail

inline RateSummary summarize_rates(const PiProfile& plus, const PiProfile& minus,
                                   const Settings& cfg = default_settings()) {
  RateSummary r;
  r.kind = plus.kind();
  r.t0 = plus.system().t0();
  r.period = plus.system().period();
  r.lambda_plus = plus.period_value() / r.period;
  r.lambda_minus = minus.period_value() / r.period;
  r.delta_u_plus = detail::deviation_extremum(plus, r.lambda_plus, 1.0, cfg);
  r.delta_l_plus = detail::deviation_extremum(plus, r.lambda_plus, -1.0, cfg);
  r.delta_u_minus = detail::deviation_extremum(minus, r.lambda_minus, 1.0, cfg);
  r.delta_l_minus = detail::deviation_extremum(minus, r.lambda_minus, -1.0, cfg);
  r.quadrature_error_estimate = plus.error_estimate() + minus.error_estimate();
  return r;
}

inline RateSummary rate_summary(const SystemDef& sys, const NormKind& kind, const Settings& cfg = default_settings()) {
  const PiProfile plus(sys, kind, Sign::plus, cfg);
  const PiProfile minus(sys, kind, Sign::minus, cfg);
  return summarize_rates(plus, minus, cfg);
}

enum class Classification { ues, us, unstable, inconclusive };

inline std::string to_string(Classification c) {
  switch (c) {
    case Classification::ues:
      return "UES";
    case Classification::us:
      return "US";
    case Classification::unstable:
      return "Unstable";
    case Classification::inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct Verdict {
  Classification classification = Classification::inconclusive;
  NormKind kind;
  RateSummary rates;
  double pi_plus_period = 0.0;  // raw Pi+(t0 + T)
  double pi_minus_period = 0.0;  // raw Pi-(t0 + T)
  double zero_tol = 0.0;
  std::optional<double> k;  // UES certificate
  std::optional<double> alpha_tilde;  // UES certificate, 1/time
  std::optional<double> uniform_bound;  // US: sup ||Phi|| <= exp(delta_U+ - delta_L+)
  Interval fce_strip;
  std::string message;
};

inline Verdict classify(const RateSummary& rates, double zero_tol) {
  if (!(zero_tol >= 0.0)) throw InputError("zero_tol must be non-negative");
  Verdict v;
  v.kind = rates.kind;
  v.rates = rates;
  v.zero_tol = zero_tol;
  v.pi_plus_period = rates.pi_plus_period();
  v.pi_minus_period = rates.pi_minus_period();
  v.fce_strip = {-rates.lambda_minus, rates.lambda_plus};
  const double bound = std::exp(rates.delta_u_plus - rates.delta_l_plus);
  if (v.pi_plus_period < -zero_tol) {
    v.classification = Classification::ues;
    v.k = bound;
    v.alpha_tilde = -v.pi_plus_period / rates.period;
    v.message = "Pi+(t0+T) < 0: uniformly exponentially stable";
  } else if (std::abs(v.pi_plus_period) <= zero_tol) {
    v.classification = Classification::us;
    v.uniform_bound = bound;
    v.message = "|Pi+(t0+T)| <= zero_tol: uniformly stable, ||Phi(t,tau)|| <= " + std::to_string(bound);
  } else if (v.pi_minus_period < -zero_tol) {
    v.classification = Classification::unstable;
    v.message = "Pi-(t0+T) < 0: the norms of all nonzero solutions grow without bound";
  } else {
    v.classification = Classification::inconclusive;
    v.message = "Pi+(t0+T) > 0 and Pi-(t0+T) >= 0: no certificate under this norm";
  }
  return v;
}

inline Verdict classify(const SystemDef& sys, const NormKind& kind, double zero_tol,
                        const Settings& cfg = default_settings()) {
  return classify(rate_summary(sys, kind, cfg), zero_tol);
}

inline Interval fce_strip(const RateSummary& rates) { return {-rates.lambda_minus, rates.lambda_plus}; }

inline Interval fce_strip(const SystemDef& sys, const NormKind& kind, const Settings& cfg = default_settings()) {
  return fce_strip(rate_summary(sys, kind, cfg));
}

struct FrozenTimeSample {
  double t = 0.0;
  double norm_a = 0.0;
  double norm_a_dot = 0.0;
  std::vector<Complex> spectrum;
};

struct FrozenTimeReport {
  std::vector<FrozenTimeSample> samples;
  double m = 0.0;  // max sampled ||A(t)||_2
  double m_with_margin = 0.0;  // bound used for C1 and C2
  bool applicable = false;  // every sampled spectrum in Re < 0
  std::optional<double> alpha;  // -max sampled spectral abscissa
  double sup_a_dot = 0.0;
  std::optional<double> c2_bound;  // (2/(2n-1)) alpha^(4n-2) / (2 M^(4n-4))
  std::optional<double> c2_bound_alt;  // same with (2M)^(4n-4) in the denominator
  bool c1_satisfied = false;
  bool c2_satisfied = false;
  std::string message;
};

inline FrozenTimeSample frozen_time_sample(const SystemDef& sys, double t, const Settings& cfg = default_settings()) {
  const double h = sys.period() * cfg.finite_difference_rel_step;
  const Matrix a = sys.matrix_at(t);
  return {t, mat_norm_two(a, cfg), mat_norm_two(sys.derivative_at(t, h), cfg), gen_eigs(a, cfg)};
}

// Frozen-time criteria C1 (alpha > 4M) and C2 on a uniform grid over one
// period, with the 2-norm.
inline FrozenTimeReport frozen_time_check(const SystemDef& sys, std::size_t grid_points,
                                          const Settings& cfg = default_settings()) {
  if (grid_points < 16) throw InputError("frozen_time_check: grid_points must be >= 16");
  FrozenTimeReport rep;
  double abscissa = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double t = sys.t0() + sys.period() * static_cast<double>(k) / static_cast<double>(grid_points);
    FrozenTimeSample s = frozen_time_sample(sys, t, cfg);
    rep.m = std::max(rep.m, s.norm_a);
    rep.sup_a_dot = std::max(rep.sup_a_dot, s.norm_a_dot);
    for (const Complex& z : s.spectrum) abscissa = std::max(abscissa, z.real());
    rep.samples.push_back(std::move(s));
  }
  rep.m_with_margin = rep.m * (1.0 + cfg.frozen_margin);
  rep.applicable = abscissa < 0.0 && rep.m > 0.0;
  if (!rep.applicable) {
    rep.message = "not applicable: a sampled spectrum has Re >= 0";
    return rep;
  }
  const double alpha = -abscissa;
  const double m = rep.m_with_margin;
  const double n = static_cast<double>(sys.dimension());
  rep.alpha = alpha;
  rep.c1_satisfied = alpha > 4.0 * m;
  rep.c2_bound = (2.0 / (2.0 * n - 1.0)) * std::pow(alpha, 4.0 * n - 2.0) / (2.0 * std::pow(m, 4.0 * n - 4.0));
  rep.c2_bound_alt = (2.0 / (2.0 * n - 1.0)) * std::pow(alpha, 4.0 * n - 2.0) / std::pow(2.0 * m, 4.0 * n - 4.0);
  rep.c2_satisfied = rep.sup_a_dot < *rep.c2_bound;
  rep.message = std::string("C1 ") + (rep.c1_satisfied ? "holds" : "fails") + ", C2 " +
                (rep.c2_satisfied ? "holds" : "fails");
  return rep;
}

struct BarrierRow {
  double t = 0.0;
  double pi_plus = 0.0;
  double pi_minus = 0.0;
  double low_plus = 0.0;  // lambda+ (t - t0) + delta_L+
  double up_plus = 0.0;  // lambda+ (t - t0) + delta_U+
  double low_minus = 0.0;
  double up_minus = 0.0;
};

inline std::vector<BarrierRow> barrier_series(const SystemDef& sys, const NormKind& kind, double t_end,
                                              std::size_t samples, const Settings& cfg = default_settings()) {
  if (!(t_end > sys.t0())) throw InputError("barrier_series: t_end must exceed t0");
  if (samples < 2) throw InputError("barrier_series: need at least 2 samples");
  const PiProfile plus(sys, kind, Sign::plus, cfg);
  const PiProfile minus(sys, kind, Sign::minus, cfg);
  const RateSummary r = summarize_rates(plus, minus, cfg);
  std::vector<BarrierRow> rows;
  rows.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(samples - 1);
    const double t = i + 1 == samples ? t_end : sys.t0() + frac * (t_end - sys.t0());
    const double dt = t - sys.t0();
    rows.push_back({t, plus(t), minus(t), r.lambda_plus * dt + r.delta_l_plus, r.lambda_plus * dt + r.delta_u_plus,
                    r.lambda_minus * dt + r.delta_l_minus, r.lambda_minus * dt + r.delta_u_minus});
  }
  return rows;
}

}  // namespace lnstab
