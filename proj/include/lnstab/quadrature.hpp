#pragma once

// Adaptive Simpson quadrature with interval bisection keyed to the local
// error estimate |S(a,m) + S(m,b) - S(a,b)| / 15. Works for scalar and
// vector-valued integrands; needs only continuity of the integrand.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <type_traits>
#include <utility>

#include "lnstab/error.hpp"
#include "lnstab/matrix.hpp"

namespace lnstab {

template <class R>
struct QuadratureResult {
  R value{};
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

inline double combine(double a, double wa, double b, double wb) { return wa * a + wb * b; }

inline Vector combine(const Vector& a, double wa, const Vector& b, double wb) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = wa * a[i] + wb * b[i];
  return out;
}

inline double magnitude(double x) { return std::abs(x); }

inline double magnitude(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

template <class R>
R simpson(double a, double b, const R& fa, const R& fm, const R& fb) {
  const double w = (b - a) / 6.0;
  return combine(combine(fa, w, fb, w), 1.0, fm, 4.0 * w);
}

template <class F, class R>
class SimpsonIntegrator {
 public:
  SimpsonIntegrator(F& f, std::size_t max_evals) : f_(f), max_evals_(max_evals) {}

  R run(double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    R fa = eval(a), fm = eval(m), fb = eval(b);
    R whole = simpson(a, b, fa, fm, fb);
    return refine(a, b, fa, fm, fb, whole, tol, kMaxDepth);
  }

  double error() const noexcept { return error_; }
  std::size_t evaluations() const noexcept { return evals_; }

 private:
  static constexpr int kMaxDepth = 50;

  R eval(double x) {
    if (++evals_ > max_evals_) throw NumericError("adaptive Simpson: evaluation budget exhausted");
    return f_(x);
  }

  R refine(double a, double b, const R& fa, const R& fm, const R& fb, const R& whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    R flm = eval(lm), frm = eval(rm);
    R left = simpson(a, m, fa, flm, fm);
    R right = simpson(m, b, fm, frm, fb);
    R both = combine(left, 1.0, right, 1.0);
    R delta = combine(both, 1.0, whole, -1.0);
    const double err = magnitude(delta) / 15.0;
    const bool tiny = (b - a) <= 1e-15 * std::max(1.0, std::abs(a));
    if (err <= tol || depth <= 0 || tiny) {
      error_ += err;
      return combine(both, 1.0, delta, 1.0 / 15.0);
    }
    R l = refine(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    R r = refine(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    return combine(l, 1.0, r, 1.0);
  }

  F& f_;
  std::size_t max_evals_;
  std::size_t evals_ = 0;
  double error_ = 0.0;
};

}  // namespace detail

// Integral of f over [a, b] to absolute tolerance `tol`. Throws NumericError
// when more than `max_evals` evaluations would be needed.
template <class F>
auto adaptive_simpson(F&& f, double a, double b, double tol, std::size_t max_evals = 4'000'000) {
  using R = std::decay_t<std::invoke_result_t<F&, double>>;
  QuadratureResult<R> out;
  if (b == a) {
    out.value = detail::combine(f(a), 0.0, f(a), 0.0);
    out.evaluations = 1;
    return out;
  }
  if (b < a) throw InputError("adaptive_simpson: reversed interval");
  detail::SimpsonIntegrator<std::remove_reference_t<F>, R> integ(f, max_evals);
  out.value = integ.run(a, b, tol);
  out.error_estimate = integ.error();
  out.evaluations = integ.evaluations();
  return out;
}

}  // namespace lnstab
