#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's numerical kernels.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "lnstab/matrix.hpp"

namespace oracle {

using lnstab::Matrix;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// exp(A) by scaling and squaring with a 20-term Taylor series.
inline Matrix expm(const Matrix& a) {
  const std::size_t n = a.size();
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(a(i, j));
    norm = std::max(norm, row);
  }
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  Matrix s = a * std::ldexp(1.0, -squarings);
  Matrix term = Matrix::identity(n), sum = Matrix::identity(n);
  for (int k = 1; k <= 20; ++k) {
    term = term * s * (1.0 / k);
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return sum;
}

// Example 1 fundamental matrix Phi_beta(t, 0).
inline Matrix example1_phi(double beta, double t) {
  const double g = std::exp((beta - 1.0) * t), d = std::exp(-t);
  return Matrix{{g * std::cos(t), d * std::sin(t)}, {-g * std::sin(t), d * std::cos(t)}};
}

inline Matrix example1_a(double beta, double t) {
  const double c = std::cos(t), s = std::sin(t);
  return Matrix{{-1.0 + beta * c * c, 1.0 - beta * s * c}, {-1.0 - beta * s * c, -1.0 + beta * s * s}};
}

// Example 2 log norms in closed form:
//   mu_1[A]  = -11/2 + 15/2 (sin 12t + |cos 12t|)
//   mu_1[-A] =  41/2 + 15/2 (sin 12t + |cos 12t|)
//   mu_2[+-A] = -+13 + 15/2 sqrt(2 + 2 sin 12t)
inline double ex2_mu_one(double t, int sign) {
  const double w = 7.5 * (std::sin(12.0 * t) + std::abs(std::cos(12.0 * t)));
  return sign > 0 ? -5.5 + w : 20.5 + w;
}

inline double ex2_mu_two(double t, int sign) {
  const double w = 7.5 * std::sqrt(2.0 + 2.0 * std::sin(12.0 * t));
  return sign > 0 ? -13.0 + w : 13.0 + w;
}

struct Deviation {
  double lambda = 0.0;
  double upper = 0.0;
  double lower = 0.0;
};

// lambda = int_0^T f / T and the extrema of int_0^t f - lambda t over [0, T],
// by composite trapezoid on `n` panels (dense enough that both the integral
// and the extremum location are resolved well below 1e-6).
inline Deviation deviation(const std::function<double(double)>& f, double period, std::size_t n = 400000) {
  const double h = period / static_cast<double>(n);
  std::vector<double> cum(n + 1, 0.0);
  double prev = f(0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double cur = f(h * static_cast<double>(k));
    cum[k] = cum[k - 1] + 0.5 * h * (prev + cur);
    prev = cur;
  }
  Deviation d;
  d.lambda = cum[n] / period;
  for (std::size_t k = 0; k <= n; ++k) {
    const double v = cum[k] - d.lambda * h * static_cast<double>(k);
    d.upper = std::max(d.upper, v);
    d.lower = std::min(d.lower, v);
  }
  return d;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(n);
  for (double& v : m.data()) v = u(rng);
  return m;
}

// Random matrix shifted left of all its Gershgorin discs, hence Hurwitz.
inline Matrix random_hurwitz(std::mt19937_64& rng, std::size_t n) {
  Matrix m = random_matrix(rng, n);
  double radius = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += std::abs(m(i, j));
    radius = std::max(radius, r);
  }
  std::uniform_real_distribution<double> margin(0.05, 1.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) -= radius + margin(rng);
  return m;
}

// max |a_ij - b_ij|
inline double max_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
  return d;
}

// Largest singular value by power iteration on A^T A.
inline double norm_two(const Matrix& a) {
  const std::size_t n = a.size();
  std::vector<double> v(n, 1.0), w(n);
  double lambda = 0.0;
  for (int it = 0; it < 2000; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) w[i] += a(i, j) * v[j];
    }
    std::vector<double> z(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) z[i] += a(j, i) * w[j];
    double nz = 0.0;
    for (double x : z) nz += x * x;
    nz = std::sqrt(nz);
    if (nz == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = z[i] / nz;
    lambda = nz;
  }
  return std::sqrt(lambda);
}

}  // namespace oracle
