#pragma once

#include <cstddef>

namespace lnstab {

// Every numeric tolerance and budget used by the library, in one place.
// Defaults are the values the acceptance suite is pinned against.
struct Settings {
  // linalg
  std::size_t max_dimension = 64;
  double symmetry_tol = 1e-12;
  std::size_t jacobi_max_sweeps = 100;
  std::size_t qr_max_iterations_per_eigenvalue = 100;
  double lyapunov_residual_tol = 1e-8;

  // quadrature of s -> mu[+-A(s)], absolute tolerance per period
  double quadrature_tol = 1e-9;
  std::size_t quadrature_max_evals = 4'000'000;

  // delta extrema search
  std::size_t extremum_scan_points = 2048;
  double extremum_bracket_rel = 1e-10;
  std::size_t extremum_candidates = 8;

  // zero band for Pi+(t0 + T)
  double zero_tol = 1e-8;

  // periodicity check
  std::size_t periodicity_grid = 64;
  double periodicity_tol = 1e-9;

  // RK4 step doubling: stop when max entry difference <= tol * (1 + norm)
  double rk4_tol = 1e-8;
  std::size_t rk4_max_steps = std::size_t{1} << 20;
  double blowup_threshold = 1e300;

  // frozen-time checker
  double finite_difference_rel_step = 1e-6;
  double frozen_margin = 0.05;

  // oracle verification slack
  double verify_rel_slack = 1e-6;
  double strip_base_eps = 1e-6;
};

inline const Settings& default_settings() {
  static const Settings s{};
  return s;
}

}  // namespace lnstab
