#pragma once

// Independent oracle: the state-transition matrix from direct integration of
// X' = A(t) X, the monodromy Phi(t0 + T, t0), and checks of every bound the
// log-norm analysis produces against it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

#include "lnstab/error.hpp"
#include "lnstab/linalg.hpp"
#include "lnstab/norms.hpp"
#include "lnstab/ode.hpp"
#include "lnstab/periodic.hpp"
#include "lnstab/settings.hpp"
#include "lnstab/system.hpp"

namespace lnstab {

namespace detail {

// dY/dt = A(t) Y on a flattened row-major n x n matrix. Caches the last two
// evaluations of A, which RK4 revisits at t + h/2 and at step boundaries.
class TransitionRhs {
 public:
  explicit TransitionRhs(const SystemDef& sys) : sys_(sys), n_(sys.dimension()) {}

  void operator()(double t, const Vector& y, Vector& dy) {
    const Matrix& a = at(t);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n_; ++k) s += a(i, k) * y[k * n_ + j];
        dy[i * n_ + j] = s;
      }
  }

  const Matrix& at(double t) {
    for (auto& c : cache_)
      if (c.valid && c.t == t) return c.a;
    Slot& slot = cache_[next_];
    next_ ^= 1U;
    slot = {true, t, sys_.matrix_at(t)};
    return slot.a;
  }

 private:
  struct Slot {
    bool valid = false;
    double t = 0.0;
    Matrix a;
  };

  const SystemDef& sys_;
  std::size_t n_;
  Slot cache_[2];
  unsigned next_ = 0;
};

inline Matrix unflatten(const Vector& y, std::size_t n) {
  Matrix m(n);
  std::copy(y.begin(), y.end(), m.data().begin());
  return m;
}

}  // namespace detail

struct TransitionMatrix {
  Matrix value;  // Phi(t_to, t_from)
  double t_from = 0.0;
  double t_to = 0.0;
  std::size_t steps_used = 0;
  double step_halving_error_estimate = 0.0;
};

inline TransitionMatrix integrate_transition(const SystemDef& sys, double t_from, double t_to, std::size_t steps,
                                             const Settings& cfg = default_settings()) {
  const std::size_t n = sys.dimension();
  const Matrix eye = Matrix::identity(n);
  const Vector y0(eye.data().begin(), eye.data().end());
  detail::TransitionRhs rhs(sys);
  auto scale = [](const Vector& y) { return norm_inf(y); };
  OdeSolution sol = rk4_controlled(rhs, y0, t_from, t_to, steps, scale, cfg);
  TransitionMatrix out{detail::unflatten(sol.state, n), t_from, t_to, sol.steps, sol.error_estimate};
  if (t_to == t_from) out.value = eye;
  return out;
}

// Phi(t_j, t_i) for every pair of a sorted time grid, composed from the
// one-segment maps so that decaying and growing modes keep relative accuracy.
class GridFlow {
 public:
  GridFlow(const SystemDef& sys, std::vector<double> times, const Settings& cfg = default_settings())
      : times_(std::move(times)) {
    const std::size_t n = sys.dimension();
    if (times_.empty()) throw InputError("GridFlow: empty grid");
    for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
      const double len = times_[i + 1] - times_[i];
      if (len < 0.0) throw InputError("GridFlow: grid must be sorted");
      const auto steps = static_cast<std::size_t>(std::max(4.0, std::ceil(32.0 * len / sys.period())));
      TransitionMatrix seg = integrate_transition(sys, times_[i], times_[i + 1], steps, cfg);
      error_ += seg.step_halving_error_estimate;
      segments_.push_back(std::move(seg.value));
    }
    from_.resize(times_.size());
    for (std::size_t i = 0; i < times_.size(); ++i) {
      Matrix p = Matrix::identity(n);
      from_[i].push_back(p);
      for (std::size_t j = i + 1; j < times_.size(); ++j) {
        p = segments_[j - 1] * p;
        from_[i].push_back(p);
      }
    }
  }

  const std::vector<double>& times() const noexcept { return times_; }

  // Phi(times[j], times[i]), i <= j.
  const Matrix& transition(std::size_t i, std::size_t j) const {
    if (j < i) throw InputError("GridFlow: need i <= j");
    return from_[i][j - i];
  }

  double error_estimate() const noexcept { return error_; }

 private:
  std::vector<double> times_;
  std::vector<Matrix> segments_;
  std::vector<std::vector<Matrix>> from_;
  double error_ = 0.0;
};

inline std::vector<double> uniform_grid(double a, double b, std::size_t points) {
  if (points < 2) throw InputError("grid needs at least 2 points");
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k)
    g[k] = k + 1 == points ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1);
  return g;
}

struct FceEstimate {
  std::vector<Complex> multipliers;  // eigenvalues of Phi(t0 + T, t0)
  Vector real_parts;  // ln|multiplier| / T, ascending
  double integration_error = 0.0;
  Matrix monodromy;
};

inline FceEstimate monodromy_fce(const SystemDef& sys, const Settings& cfg = default_settings()) {
  const TransitionMatrix phi = integrate_transition(sys, sys.t0(), sys.t0() + sys.period(), 64, cfg);
  FceEstimate out;
  out.monodromy = phi.value;
  out.integration_error = phi.step_halving_error_estimate;
  out.multipliers = gen_eigs(phi.value, cfg);
  for (const Complex& m : out.multipliers) {
    if (std::abs(m) < 1e-14) throw NumericError("monodromy_fce: Floquet multiplier below 1e-14");
    out.real_parts.push_back(std::log(std::abs(m)) / sys.period());
  }
  std::sort(out.real_parts.begin(), out.real_parts.end());
  return out;
}

struct StripVerification {
  bool pass = false;
  Vector fce_real_parts;
  Interval strip;
  double epsilon = 0.0;
  double lower_margin = 0.0;  // min FCE real part - strip lower edge
  double upper_margin = 0.0;  // strip upper edge - max FCE real part
};

inline StripVerification verify_strip(const SystemDef& sys, const RateSummary& rates, const FceEstimate& fce,
                                      const Settings& cfg = default_settings()) {
  StripVerification v;
  v.fce_real_parts = fce.real_parts;
  v.strip = fce_strip(rates);
  double min_mult = std::numeric_limits<double>::infinity();
  for (const Complex& m : fce.multipliers) min_mult = std::min(min_mult, std::abs(m));
  v.epsilon = cfg.strip_base_eps + rates.quadrature_error_estimate / sys.period() +
              fce.integration_error / (min_mult * sys.period());
  v.lower_margin = fce.real_parts.front() - v.strip.lower;
  v.upper_margin = v.strip.upper - fce.real_parts.back();
  v.pass = v.lower_margin >= -v.epsilon && v.upper_margin >= -v.epsilon;
  return v;
}

inline StripVerification verify_strip(const SystemDef& sys, const NormKind& kind,
                                      const Settings& cfg = default_settings()) {
  return verify_strip(sys, rate_summary(sys, kind, cfg), monodromy_fce(sys, cfg), cfg);
}

struct SandwichVerification {
  bool pass = false;
  double max_violation = 0.0;  // largest relative violation, positive = violated
  std::size_t pairs = 0;
};

// exp(-(Pi-(t) - Pi-(tau))) <= ||Phi(t, tau)|| <= exp(Pi+(t) - Pi+(tau)) for
// grid pairs t0 <= tau <= t <= t0 + 2T.
inline SandwichVerification verify_sandwich(const SystemDef& sys, const NormKind& kind, std::size_t grid,
                                            const Settings& cfg = default_settings()) {
  if (grid < 2) throw InputError("verify_sandwich: grid must be >= 2");
  const PiProfile plus(sys, kind, Sign::plus, cfg);
  const PiProfile minus(sys, kind, Sign::minus, cfg);
  const GridFlow flow(sys, uniform_grid(sys.t0(), sys.t0() + 2.0 * sys.period(), grid), cfg);
  const auto& ts = flow.times();
  std::vector<double> pp(ts.size()), pm(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    pp[i] = plus(ts[i]);
    pm[i] = minus(ts[i]);
  }
  SandwichVerification out;
  out.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = i; j < ts.size(); ++j) {
      const double norm = mat_norm(flow.transition(i, j), kind, cfg);
      const double upper = std::exp(pp[j] - pp[i]);
      const double lower = std::exp(-(pm[j] - pm[i]));
      out.max_violation = std::max(out.max_violation, (norm - upper) / upper);
      if (lower > 0.0) out.max_violation = std::max(out.max_violation, (lower - norm) / lower);
      ++out.pairs;
    }
  out.pass = out.max_violation <= cfg.verify_rel_slack;
  return out;
}

struct DecayVerification {
  bool pass = false;
  double worst_margin = 0.0;  // min of 1 - ||Phi|| / (K e^{-alpha (t - tau)})
  double worst_envelope_margin = 0.0;  // min relative distance inside the solution envelope
  std::size_t pairs = 0;
};

// ||Phi(t, tau)|| <= K e^{-alpha (t - tau)} on grid pairs over [t0, t0 + 3T],
// plus the two-sided solution envelope
//   |x0| e^{-lambda- (t - t0) - delta_U-} <= |x(t)| <= |x0| e^{lambda+ (t - t0) + delta_U+}
// for 8 pseudo-random initial states.
inline DecayVerification verify_decay(const SystemDef& sys, const Verdict& verdict, std::size_t grid,
                                      const Settings& cfg = default_settings()) {
  if (verdict.classification != Classification::ues || !verdict.k || !verdict.alpha_tilde)
    throw InputError("verify_decay: verdict is not UES");
  if (grid < 2) throw InputError("verify_decay: grid must be >= 2");
  const double k = *verdict.k, alpha = *verdict.alpha_tilde;
  const RateSummary& r = verdict.rates;
  const NormKind& kind = verdict.kind;
  const GridFlow flow(sys, uniform_grid(sys.t0(), sys.t0() + 3.0 * sys.period(), grid), cfg);
  const auto& ts = flow.times();

  DecayVerification out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = i; j < ts.size(); ++j) {
      const double bound = k * std::exp(-alpha * (ts[j] - ts[i]));
      out.worst_margin = std::min(out.worst_margin, 1.0 - mat_norm(flow.transition(i, j), kind, cfg) / bound);
      ++out.pairs;
    }

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  out.worst_envelope_margin = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 8; ++trial) {
    Vector x0(sys.dimension());
    for (double& v : x0) v = unit(rng);
    const double n0 = vec_norm(x0, kind);
    if (n0 == 0.0) continue;
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const double dt = ts[j] - sys.t0();
      const double nx = vec_norm(flow.transition(0, j) * x0, kind);
      const double upper = n0 * std::exp(r.lambda_plus * dt + r.delta_u_plus);
      const double lower = n0 * std::exp(-r.lambda_minus * dt - r.delta_u_minus);
      out.worst_envelope_margin = std::min(out.worst_envelope_margin, (upper - nx) / upper);
      if (lower > 0.0) out.worst_envelope_margin = std::min(out.worst_envelope_margin, (nx - lower) / lower);
    }
  }
  out.pass = out.worst_margin >= -cfg.verify_rel_slack && out.worst_envelope_margin >= -cfg.verify_rel_slack;
  return out;
}

}  // namespace lnstab
