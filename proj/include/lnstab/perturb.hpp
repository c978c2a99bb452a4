#pragma once

// Disturbed system x' = A(t) x + d(t): simulation, the windowed-integral
// functional sup_{0<=eta<=1} |int_t^{t+eta} d| and convergence diagnostics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lnstab/error.hpp"
#include "lnstab/expr.hpp"
#include "lnstab/floquet.hpp"
#include "lnstab/linalg.hpp"
#include "lnstab/norms.hpp"
#include "lnstab/ode.hpp"
#include "lnstab/quadrature.hpp"
#include "lnstab/settings.hpp"
#include "lnstab/system.hpp"

namespace lnstab {

struct Disturbance {
  std::vector<Expression> components;

  // Components separated by ';' or ','.
  static Disturbance parse(std::string_view text) {
    Disturbance d;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == ';' || text[i] == ',') {
        d.components.push_back(parse_expression(text.substr(start, i - start)));
        start = i + 1;
      }
    }
    return d;
  }

  static Disturbance zero(std::size_t n) { return {std::vector<Expression>(n)}; }

  std::size_t dimension() const noexcept { return components.size(); }

  Vector operator()(double t) const {
    Vector v(components.size());
    for (std::size_t i = 0; i < components.size(); ++i) v[i] = components[i].eval(t);
    return v;
  }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::size_t steps = 0;
  double error_estimate = 0.0;
  bool overflow = false;  // integration stopped at the last stored sample
  std::optional<double> cross_check_rel_error;  // vs variation of constants at 3 sample times
};

namespace detail {

class ForcedRhs {
 public:
  ForcedRhs(const SystemDef& sys, const Disturbance* d) : sys_(sys), d_(d), n_(sys.dimension()) {}

  void operator()(double t, const Vector& x, Vector& dx) {
    const Matrix a = sys_.matrix_at(t);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < n_; ++k) s += a(i, k) * x[k];
      dx[i] = s;
    }
    if (d_)
      for (std::size_t i = 0; i < n_; ++i) dx[i] += d_->components[i].eval(t);
  }

 private:
  const SystemDef& sys_;
  const Disturbance* d_;
  std::size_t n_;
};

inline std::size_t initial_steps(double len, double period) {
  return static_cast<std::size_t>(std::max(4.0, std::ceil(32.0 * len / period)));
}

inline OdeSolution flow_vector(const SystemDef& sys, const Disturbance* d, const Vector& x, double a, double b,
                               const Settings& cfg) {
  ForcedRhs rhs(sys, d);
  return rk4_controlled(rhs, x, a, b, initial_steps(b - a, sys.period()), [](const Vector& y) { return norm_inf(y); },
                        cfg);
}

}  // namespace detail

// x(t) = Phi(t, t0) x0 + int_{t0}^{t} Phi(t, tau) d(tau) dtau, evaluated on
// panels [a, b] of length <= T/8:
//   x(b) = Phi(b, a) x(a) + int_a^b Phi(b, tau) d(tau) dtau
// with Phi(b, a) from integrate_transition and the panel integral by adaptive
// Simpson over homogeneous flows of d(tau).
inline Vector variation_of_constants(const SystemDef& sys, const Disturbance& d, const Vector& x0, double t,
                                     double rel_tol = 1e-9, const Settings& cfg = default_settings()) {
  if (t < sys.t0()) throw InputError("variation_of_constants: t precedes t0");
  Vector x = x0;
  if (t == sys.t0()) return x;
  const auto panels = static_cast<std::size_t>(std::ceil(8.0 * (t - sys.t0()) / sys.period()));
  const std::vector<double> grid = uniform_grid(sys.t0(), t, panels + 1);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double a = grid[k - 1], b = grid[k];
    const Matrix phi = integrate_transition(sys, a, b, 8, cfg).value;
    auto integrand = [&](double tau) { return detail::flow_vector(sys, nullptr, d(tau), tau, b, cfg).state; };
    const double scale = std::max({1.0, norm_inf(d(a)), norm_inf(d(b))}) * (b - a);
    const auto forced = adaptive_simpson(integrand, a, b, rel_tol * scale, cfg.quadrature_max_evals);
    Vector next = phi * x;
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += forced.value[i];
    x = std::move(next);
  }
  return x;
}

struct SimulationOptions {
  bool cross_check = true;
  std::uint64_t seed = 7;
};

inline Trajectory simulate_perturbed(const SystemDef& sys, const Disturbance& d, const Vector& x0, double t_end,
                                     std::size_t samples, const SimulationOptions& opts = {},
                                     const Settings& cfg = default_settings()) {
  if (d.dimension() != sys.dimension()) throw InputError("disturbance dimension does not match the system");
  if (x0.size() != sys.dimension()) throw InputError("initial state dimension does not match the system");
  if (!(t_end > sys.t0())) throw InputError("t_end must exceed t0");
  if (samples < 2) throw InputError("need at least 2 samples");
  const std::vector<double> grid = uniform_grid(sys.t0(), t_end, samples);

  Trajectory traj;
  traj.times.push_back(grid[0]);
  traj.states.push_back(x0);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    try {
      OdeSolution s = detail::flow_vector(sys, &d, traj.states.back(), grid[k - 1], grid[k], cfg);
      traj.steps += s.steps;
      traj.error_estimate = std::max(traj.error_estimate, s.error_estimate);
      traj.times.push_back(grid[k]);
      traj.states.push_back(std::move(s.state));
    } catch (const NumericError& e) {
      if (std::string_view(e.what()).starts_with("blow-up")) {
        traj.overflow = true;
        return traj;
      }
      throw;
    }
  }

  if (opts.cross_check) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<std::size_t> pick(1, traj.times.size() - 1);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      const std::size_t k = pick(rng);
      const Vector ref = variation_of_constants(sys, d, x0, traj.times[k], 1e-8, cfg);
      double diff = 0.0;
      for (std::size_t j = 0; j < ref.size(); ++j) diff = std::max(diff, std::abs(ref[j] - traj.states[k][j]));
      worst = std::max(worst, diff / (norm_inf(ref) + 1e-12));
    }
    traj.cross_check_rel_error = worst;
  }
  return traj;
}

struct WindowPoint {
  double t = 0.0;
  double sup = 0.0;  // sup_{0<=eta<=1} || int_t^{t+eta} d ||_2
};

struct WindowReport {
  std::vector<WindowPoint> points;
  std::optional<double> tail_log_slope;  // least-squares slope of log(sup) over the last third
  bool non_increasing = false;
  bool vanishing_observed = false;  // non-increasing and the last value below 10% of the first
};

inline WindowReport check_window_integral(const Disturbance& d, const std::vector<double>& t_grid,
                                         std::size_t eta_samples, const Settings& cfg = default_settings()) {
  if (eta_samples < 8) throw InputError("check_window_integral: eta_samples must be >= 8");
  const double piece_tol = 1e-10 / static_cast<double>(eta_samples);
  WindowReport rep;
  for (double t : t_grid) {
    Vector acc(d.dimension(), 0.0);
    double sup = 0.0;
    std::size_t best = 0;
    std::vector<Vector> partial{acc};
    for (std::size_t j = 1; j <= eta_samples; ++j) {
      const double a = t + static_cast<double>(j - 1) / static_cast<double>(eta_samples);
      const double b = t + static_cast<double>(j) / static_cast<double>(eta_samples);
      const auto piece = adaptive_simpson(d, a, b, piece_tol, cfg.quadrature_max_evals);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += piece.value[i];
      partial.push_back(acc);
      const double nv = norm_two(acc);
      if (nv > sup) {
        sup = nv;
        best = j;
      }
    }
    if (sup > 0.0) {
      // refine around the best node: |I(eta)| with I(eta) = I(eta_{j-1}) + int
      const std::size_t lo_idx = best > 0 ? best - 1 : 0;
      const double lo = static_cast<double>(lo_idx) / static_cast<double>(eta_samples);
      const double hi = static_cast<double>(std::min(best + 1, eta_samples)) / static_cast<double>(eta_samples);
      auto value_at = [&](double eta) {
        Vector v = partial[lo_idx];
        if (eta > lo) {
          const auto piece = adaptive_simpson(d, t + lo, t + eta, piece_tol, cfg.quadrature_max_evals);
          for (std::size_t i = 0; i < v.size(); ++i) v[i] += piece.value[i];
        }
        return norm_two(v);
      };
      sup = std::max(sup, detail::golden_max(value_at, lo, hi, 1e-9));
    }
    rep.points.push_back({t, sup});
  }

  const std::size_t count = rep.points.size();
  if (count > 0) {
    bool non_inc = true;
    for (std::size_t k = 1; k < count; ++k)
      if (rep.points[k].sup > rep.points[k - 1].sup + 1e-9 * std::max(1.0, rep.points[k - 1].sup)) non_inc = false;
    rep.non_increasing = non_inc;
    const double first = rep.points.front().sup, last = rep.points.back().sup;
    rep.vanishing_observed = non_inc && (last <= 1e-12 || last < 0.1 * first);

    const std::size_t start = count - std::max<std::size_t>(2, count / 3);
    std::vector<double> xs, ys;
    for (std::size_t k = count >= 2 ? start : 0; k < count; ++k)
      if (rep.points[k].sup > 0.0) {
        xs.push_back(rep.points[k].t);
        ys.push_back(std::log(rep.points[k].sup));
      }
    if (xs.size() >= 2) {
      const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
      const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
      }
      if (sxx > 0.0) rep.tail_log_slope = sxy / sxx;
    }
  }
  return rep;
}

struct ConvergenceReport {
  double tail_max_norm = 0.0;  // max |x(t)| over the last quarter of samples
  bool decreasing_tail = false;  // block maxima over the last half non-increasing
  std::vector<double> block_maxima;
};

// The last half of the samples is cut into four consecutive blocks; the tail
// is decreasing when each block maximum is <= the previous one (1e-9 slack).
inline ConvergenceReport convergence_report(const Trajectory& traj, const NormKind& kind) {
  const std::size_t n = traj.states.size();
  if (n < 16) throw InputError("convergence_report: need at least 16 samples");
  std::vector<double> norms(n);
  for (std::size_t k = 0; k < n; ++k) norms[k] = vec_norm(traj.states[k], kind);

  ConvergenceReport rep;
  for (std::size_t k = n - n / 4; k < n; ++k) rep.tail_max_norm = std::max(rep.tail_max_norm, norms[k]);

  const std::size_t half = n - n / 2;
  const std::size_t len = n - half;
  rep.decreasing_tail = true;
  for (std::size_t b = 0; b < 4; ++b) {
    const std::size_t lo = half + b * len / 4, hi = half + (b + 1) * len / 4;
    double m = 0.0;
    for (std::size_t k = lo; k < hi; ++k) m = std::max(m, norms[k]);
    if (!rep.block_maxima.empty() && m > rep.block_maxima.back() + 1e-9 * std::max(1.0, rep.block_maxima.back()))
      rep.decreasing_tail = false;
    rep.block_maxima.push_back(m);
  }
  if (traj.overflow) rep.decreasing_tail = false;
  return rep;
}

}  // namespace lnstab
