#pragma once

// Classic fourth-order Runge-Kutta with step-doubling convergence control.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "lnstab/error.hpp"
#include "lnstab/matrix.hpp"
#include "lnstab/settings.hpp"

namespace lnstab {

struct OdeSolution {
  Vector state;
  std::size_t steps = 0;  // steps of the accepted (finer) run
  double error_estimate = 0.0;  // max entry difference between the last two runs
};

// `rhs(t, y, dy)` writes dy/dt. Fixed step count over [t_from, t_to].
template <class Rhs>
Vector rk4_fixed(Rhs& rhs, Vector y, double t_from, double t_to, std::size_t steps) {
  const std::size_t m = y.size();
  const double h = (t_to - t_from) / static_cast<double>(steps);
  Vector k1(m), k2(m), k3(m), k4(m), tmp(m);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t_from + h * static_cast<double>(s);
    const double t_next = s + 1 == steps ? t_to : t + h;
    const double t_mid = t + 0.5 * h;
    rhs(t, y, k1);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(t_mid, tmp, k2);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(t_mid, tmp, k3);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(t_next, tmp, k4);
    for (std::size_t i = 0; i < m; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return y;
}

// Runs with `steps`, 2*steps, 4*steps, ... until the max entry difference of
// consecutive runs is <= tol * (1 + scale(y)). Returns the finer run.
template <class Rhs, class Scale>
OdeSolution rk4_controlled(Rhs& rhs, const Vector& y0, double t_from, double t_to, std::size_t steps, Scale&& scale,
                           const Settings& cfg = default_settings()) {
  if (steps == 0) throw InputError("rk4: steps must be >= 1");
  if (!(t_to >= t_from)) throw InputError("rk4: t_to must be >= t_from");
  if (t_to == t_from) return {y0, 0, 0.0};

  auto check = [&](const Vector& y) {
    for (double v : y)
      if (!std::isfinite(v) || std::abs(v) > cfg.blowup_threshold)
        throw NumericError("blow-up: solution exceeded " + std::to_string(cfg.blowup_threshold));
  };

  Vector coarse = rk4_fixed(rhs, y0, t_from, t_to, steps);
  check(coarse);
  for (;;) {
    const std::size_t fine_steps = 2 * steps;
    if (fine_steps > cfg.rk4_max_steps) throw NumericError("rk4: step cap reached without convergence");
    Vector fine = rk4_fixed(rhs, y0, t_from, t_to, fine_steps);
    check(fine);
    double diff = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) diff = std::max(diff, std::abs(fine[i] - coarse[i]));
    const double size = scale(fine);
    if (!std::isfinite(size)) throw NumericError("blow-up: solution scale is not finite");
    if (diff <= cfg.rk4_tol * (1.0 + size)) return {std::move(fine), fine_steps, diff};
    coarse = std::move(fine);
    steps = fine_steps;
  }
}

}  // namespace lnstab
