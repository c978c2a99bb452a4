#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lnstab/error.hpp"
#include "lnstab/expr.hpp"
#include "lnstab/matrix.hpp"
#include "lnstab/settings.hpp"

namespace lnstab {

// Expression for a real constant; negative values become a negated literal.
inline Expression constant_expression(double v) {
  if (!std::isfinite(v)) throw InputError("non-finite constant");
  if (std::signbit(v)) return Expression::negate(Expression::number(-v));
  return Expression::number(v);
}

// x' = A(t) x with A(t + T) = A(t), observed from t0.
class SystemDef {
 public:
  SystemDef(std::size_t n, std::vector<Expression> entries, double period, double t0 = 0.0,
            const Settings& cfg = default_settings())
      : n_(n), entries_(std::move(entries)), period_(period), t0_(t0) {
    if (n_ == 0) throw InputError("system dimension must be at least 1");
    if (n_ > cfg.max_dimension) throw InputError("system dimension exceeds " + std::to_string(cfg.max_dimension));
    if (entries_.size() != n_ * n_) throw InputError("system needs n*n entries");
    if (!(period_ > 0.0) || !std::isfinite(period_)) throw InputError("period must be positive");
    if (!(t0_ >= 0.0) || !std::isfinite(t0_)) throw InputError("t0 must be non-negative");
  }

  static SystemDef from_strings(std::size_t n, const std::vector<std::string>& entries, double period,
                                double t0 = 0.0) {
    std::vector<Expression> parsed;
    parsed.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
      try {
        parsed.push_back(parse_expression(entries[k]));
      } catch (const ParseError& e) {
        throw InputError("entry (" + std::to_string(k / std::max<std::size_t>(n, 1)) + "," +
                         std::to_string(k % std::max<std::size_t>(n, 1)) + "): " + e.what());
      }
    }
    return SystemDef(n, std::move(parsed), period, t0);
  }

  // Time-invariant system; any period is valid, 1 by convention.
  static SystemDef constant(const Matrix& a, double period = 1.0, double t0 = 0.0) {
    std::vector<Expression> e;
    e.reserve(a.size() * a.size());
    for (double v : a.data()) e.push_back(constant_expression(v));
    return SystemDef(a.size(), std::move(e), period, t0);
  }

  std::size_t dimension() const noexcept { return n_; }
  double period() const noexcept { return period_; }
  double t0() const noexcept { return t0_; }

  const Expression& entry(std::size_t i, std::size_t j) const { return entries_.at(i * n_ + j); }
  const std::vector<Expression>& entries() const noexcept { return entries_; }

  Matrix matrix_at(double t) const {
    Matrix a(n_);
    auto out = a.data();
    for (std::size_t k = 0; k < entries_.size(); ++k) out[k] = entries_[k].eval(t);
    return a;
  }

  // Central difference (A(t + h) - A(t - h)) / 2h.
  Matrix derivative_at(double t, double h) const {
    Matrix d = matrix_at(t + h) - matrix_at(t - h);
    d *= 1.0 / (2.0 * h);
    return d;
  }

 private:
  std::size_t n_;
  std::vector<Expression> entries_;
  double period_;
  double t0_;
};

// Max over a uniform grid on [t0, t0 + T) of |a_ij(t) - a_ij(t + T)|,
// relative to (1 + max |a_ij|).
inline double periodicity_defect(const SystemDef& sys, const Settings& cfg = default_settings()) {
  const std::size_t grid = cfg.periodicity_grid;
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < grid; ++k) {
    const double t = sys.t0() + sys.period() * static_cast<double>(k) / static_cast<double>(grid);
    const Matrix a = sys.matrix_at(t);
    const Matrix b = sys.matrix_at(t + sys.period());
    scale = std::max(scale, a.max_abs());
    worst = std::max(worst, (a - b).max_abs());
  }
  return worst / (1.0 + scale);
}

inline void validate_periodicity(const SystemDef& sys, const Settings& cfg = default_settings()) {
  const double defect = periodicity_defect(sys, cfg);
  if (!(defect <= cfg.periodicity_tol))
    throw InputError("A(t) is not periodic with period " + std::to_string(sys.period()) +
                     " (relative defect " + std::to_string(defect) + ")");
}

}  // namespace lnstab
