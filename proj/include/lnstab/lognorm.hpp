#pragma once

// Logarithmic norm mu[A] = lim_{h->0+} (||I + hA|| - 1) / h, evaluated by the
// closed forms for the 1-, 2- and inf-norms and by similarity for weighted norms.

#include <algorithm>
#include <cmath>
#include <limits>

#include "lnstab/linalg.hpp"
#include "lnstab/norms.hpp"

namespace lnstab {

// max_j (a_jj + sum_{i != j} |a_ij|)
inline double mu_one(const Matrix& a) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < a.size(); ++j) {
    double s = a(j, j);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (i != j) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

// max_i (a_ii + sum_{j != i} |a_ij|)
inline double mu_inf(const Matrix& a) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = a(i, i);
    for (std::size_t j = 0; j < a.size(); ++j)
      if (j != i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

// lambda_max((A + A^T) / 2)
inline double mu_two(const Matrix& a, const Settings& cfg = default_settings()) {
  Matrix sym = a + a.transpose();
  sym *= 0.5;
  return sym_eigs(sym, cfg).back();
}

// mu_2[P A P^-1]: the log norm of A under ||x|| = ||P x||_2.
inline double mu_weighted(const Matrix& a, const Matrix& p, const Settings& cfg = default_settings()) {
  Matrix p_inv;
  try {
    p_inv = inverse(p);
  } catch (const NumericError&) {
    throw InputError("mu_weighted: transform is singular");
  }
  return mu_two(p * a * p_inv, cfg);
}

inline double mu(const Matrix& a, const NormKind& kind, const Settings& cfg = default_settings()) {
  if (a.empty()) throw InputError("mu: empty matrix");
  switch (kind.tag()) {
    case NormKind::Tag::one:
      return mu_one(a);
    case NormKind::Tag::two:
      return mu_two(a, cfg);
    case NormKind::Tag::inf:
      return mu_inf(a);
    case NormKind::Tag::weighted:
      if (kind.dimension() != a.size()) throw InputError("weighted norm: dimension mismatch");
      return mu_two(kind.transform() * a * kind.inverse_transform(), cfg);
  }
  return 0.0;
}

// (||I + hA|| - 1) / h. Test oracle for the closed forms; mu() never calls it.
inline double mu_limit_estimate(const Matrix& a, const NormKind& kind, double h,
                                const Settings& cfg = default_settings()) {
  if (!(h > 0.0)) throw InputError("mu_limit_estimate: h must be positive");
  return (mat_norm(Matrix::identity(a.size()) + a * h, kind, cfg) - 1.0) / h;
}

}  // namespace lnstab
