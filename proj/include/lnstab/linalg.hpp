#pragma once

// Dense kernels: vector and induced matrix norms, symmetric (Jacobi) and
// general (Hessenberg + Francis double-shift QR) eigensolvers, LU, Cholesky,
// and the Lyapunov equation A^T H + H A = -2 I.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "lnstab/error.hpp"
#include "lnstab/matrix.hpp"
#include "lnstab/settings.hpp"

namespace lnstab {

using Complex = std::complex<double>;

inline double norm_one(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

inline double norm_two(const Vector& v) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x / scale) * (x / scale);
  return scale * std::sqrt(s);
}

inline double norm_inf(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Max absolute column sum.
inline double mat_norm_one(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

// Max absolute row sum.
inline double mat_norm_inf(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

struct SymmetricEigen {
  Vector values;  // ascending
  Matrix vectors;  // column k pairs with values[k]
};

// Cyclic Jacobi rotations. The input is symmetrized as (S + S^T)/2 after
// checking that it is symmetric to within settings.symmetry_tol.
inline SymmetricEigen sym_eigen(const Matrix& s, const Settings& cfg = default_settings()) {
  const std::size_t n = s.size();
  if (n == 0) throw InputError("sym_eigs: empty matrix");
  const double scale = std::max(1.0, s.max_abs());
  Matrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(s(i, j) - s(j, i)) > cfg.symmetry_tol * scale)
        throw InputError("sym_eigs: matrix is not symmetric");
      a(i, j) = 0.5 * (s(i, j) + s(j, i));
    }
  Matrix v = Matrix::identity(n);

  auto off_norm = [&] {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    return std::sqrt(off);
  };
  double frob = 0.0;
  for (double x : a.data()) frob += x * x;
  frob = std::sqrt(frob);

  bool converged = n == 1;
  for (std::size_t sweep = 0; sweep < cfg.jacobi_max_sweeps && !converged; ++sweep) {
    if (off_norm() <= std::numeric_limits<double>::epsilon() * frob) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    if (off_norm() <= std::numeric_limits<double>::epsilon() * frob) converged = true;
  }
  if (!converged) throw NumericError("sym_eigs: Jacobi iteration did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymmetricEigen out{Vector(n), Matrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

inline Vector sym_eigs(const Matrix& s, const Settings& cfg = default_settings()) {
  return sym_eigen(s, cfg).values;
}

// sqrt(lambda_max(A^T A)).
inline double mat_norm_two(const Matrix& a, const Settings& cfg = default_settings()) {
  const Vector ev = sym_eigs(a.transpose() * a, cfg);
  return std::sqrt(std::max(0.0, ev.back()));
}

namespace detail {

// Householder reduction to upper Hessenberg form, in place.
inline void hessenberg(Matrix& a) {
  const std::size_t n = a.size();
  if (n < 3) return;
  Vector v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    if (a(k + 1, k) > 0.0) alpha = -alpha;
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
    v[k + 1] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0.0) continue;
    // A <- (I - 2vv^T/|v|^2) A (I - 2vv^T/|v|^2)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
      s *= 2.0 / vnorm2;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= 2.0 / vnorm2;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
    }
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr layout,
// 1-based indices internally).
inline std::vector<Complex> hessenberg_qr(const Matrix& h, std::size_t max_its) {
  const int n = static_cast<int>(h.size());
  std::vector<double> buf(static_cast<std::size_t>((n + 1) * (n + 1)), 0.0);
  auto a = [&](int i, int j) -> double& { return buf[static_cast<std::size_t>(i * (n + 1) + j)]; };
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) a(i, j) = h(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));

  std::vector<double> wr(static_cast<std::size_t>(n + 1)), wi(static_cast<std::size_t>(n + 1));
  auto sign = [](double x, double y) { return y >= 0.0 ? std::abs(x) : -std::abs(x); };

  double anorm = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));

  int nn = n;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, w = 0.0, x = 0.0, y = 0.0, z = 0.0;
  while (nn >= 1) {
    std::size_t its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 2; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) + s == s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        wr[static_cast<std::size_t>(nn)] = x + t;
        wi[static_cast<std::size_t>(nn)] = 0.0;
        --nn;
      } else {
        y = a(nn - 1, nn - 1);
        w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w;
          z = std::sqrt(std::abs(q));
          x += t;
          const auto i1 = static_cast<std::size_t>(nn - 1), i2 = static_cast<std::size_t>(nn);
          if (q >= 0.0) {
            z = p + sign(z, p);
            wr[i1] = wr[i2] = x + z;
            if (z != 0.0) wr[i2] = x - w / z;
            wi[i1] = wi[i2] = 0.0;
          } else {
            wr[i1] = wr[i2] = x + p;
            wi[i2] = z;
            wi[i1] = -z;
          }
          nn -= 2;
        } else {
          if (its == max_its) throw NumericError("gen_eigs: QR iteration did not converge");
          if (its != 0 && its % 10 == 0) {
            // exceptional shift
            t += x;
            for (int i = 1; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k != nn - 1) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k != nn - 1) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }

  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) out.emplace_back(wr[static_cast<std::size_t>(i)], wi[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace detail

// All eigenvalues, sorted by (real part, imaginary part).
inline std::vector<Complex> gen_eigs(const Matrix& m, const Settings& cfg = default_settings()) {
  if (m.empty()) throw InputError("gen_eigs: empty matrix");
  if (!m.is_finite()) throw InputError("gen_eigs: non-finite entries");
  Matrix h = m;
  detail::hessenberg(h);
  std::vector<Complex> ev = detail::hessenberg_qr(h, cfg.qr_max_iterations_per_eigenvalue);
  std::sort(ev.begin(), ev.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return ev;
}

inline double spectral_abscissa(const Matrix& m, const Settings& cfg = default_settings()) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Complex& z : gen_eigs(m, cfg)) best = std::max(best, z.real());
  return best;
}

namespace detail {

// In-place LU with partial pivoting on a dense n x n row-major buffer. Returns
// false on a pivot that is zero to working precision.
inline bool lu_factor(std::vector<double>& a, std::size_t n, std::vector<std::size_t>& perm, int& parity) {
  perm.resize(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  parity = 1;
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  const double tiny = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;
  if (scale == 0.0) return false;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    if (std::abs(a[piv * n + k]) <= tiny) return false;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(perm[k], perm[piv]);
      parity = -parity;
    }
    const double inv = 1.0 / a[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] * inv;
      a[i * n + k] = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
    }
  }
  return true;
}

inline Vector lu_substitute(const std::vector<double>& lu, std::size_t n, const std::vector<std::size_t>& perm,
                            const Vector& b) {
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu[i * n + j] * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu[i * n + j] * x[j];
    x[i] = s / lu[i * n + i];
  }
  return x;
}

}  // namespace detail

// Factorization of a square matrix, reusable for several right-hand sides.
class LuDecomposition {
 public:
  explicit LuDecomposition(const Matrix& m) : n_(m.size()), lu_(m.data().begin(), m.data().end()) {
    if (n_ == 0) throw InputError("LU: empty matrix");
    if (!detail::lu_factor(lu_, n_, perm_, parity_)) throw NumericError("LU: matrix is singular to working precision");
  }

  Vector solve(const Vector& b) const {
    if (b.size() != n_) throw InputError("linear_solve: dimension mismatch");
    return detail::lu_substitute(lu_, n_, perm_, b);
  }

  double determinant() const {
    double d = parity_;
    for (std::size_t i = 0; i < n_; ++i) d *= lu_[i * n_ + i];
    return d;
  }

  Matrix inverse() const {
    Matrix inv(n_);
    Vector e(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      std::fill(e.begin(), e.end(), 0.0);
      e[j] = 1.0;
      const Vector col = solve(e);
      for (std::size_t i = 0; i < n_; ++i) inv(i, j) = col[i];
    }
    return inv;
  }

 private:
  std::size_t n_;
  std::vector<double> lu_;
  std::vector<std::size_t> perm_;
  int parity_ = 1;
};

inline Vector linear_solve(const Matrix& m, const Vector& b) { return LuDecomposition(m).solve(b); }

inline Matrix inverse(const Matrix& m) { return LuDecomposition(m).inverse(); }

// Zero for matrices singular to working precision.
inline double determinant(const Matrix& m) {
  std::vector<double> lu(m.data().begin(), m.data().end());
  std::vector<std::size_t> perm;
  int parity = 1;
  if (!detail::lu_factor(lu, m.size(), perm, parity)) return 0.0;
  double d = parity;
  for (std::size_t i = 0; i < m.size(); ++i) d *= lu[i * m.size() + i];
  return d;
}

// Lower-triangular L with L L^T = H.
inline Matrix cholesky(const Matrix& h, const Settings& cfg = default_settings()) {
  const std::size_t n = h.size();
  if (n == 0) throw InputError("cholesky: empty matrix");
  const double scale = std::max(1.0, h.max_abs());
  Matrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j; i < n; ++i) {
      if (std::abs(h(i, j) - h(j, i)) > cfg.symmetry_tol * scale) throw InputError("cholesky: matrix is not symmetric");
      double s = h(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) throw NumericError("cholesky: non-positive pivot, matrix is not positive definite");
        l(j, j) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

// Symmetric positive definite H with A^T H + H A = -2 I, from the n^2 x n^2
// vectorized system. Throws NumericError when A is not Hurwitz.
inline Matrix solve_lyapunov(const Matrix& a, const Settings& cfg = default_settings()) {
  const std::size_t n = a.size();
  if (n == 0) throw InputError("solve_lyapunov: empty matrix");
  if (n > cfg.max_dimension) throw InputError("solve_lyapunov: dimension exceeds cap");
  const std::size_t m = n * n;
  // unknown H(k, j) at index k * n + j; equation (i, j) at row i * n + j
  std::vector<double> k(m * m, 0.0);
  Vector rhs(m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      for (std::size_t p = 0; p < n; ++p) {
        k[row * m + (p * n + j)] += a(p, i);
        k[row * m + (i * n + p)] += a(p, j);
      }
      if (i == j) rhs[row] = -2.0;
    }
  std::vector<std::size_t> perm;
  int parity = 1;
  if (!detail::lu_factor(k, m, perm, parity))
    throw NumericError("solve_lyapunov: singular Lyapunov operator, A is not Hurwitz");
  const Vector vec_h = detail::lu_substitute(k, m, perm, rhs);

  Matrix h(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (vec_h[i * n + j] + vec_h[j * n + i]);

  Matrix residual = a.transpose() * h + h * a + Matrix::identity(n) * 2.0;
  if (mat_norm_two(residual, cfg) > cfg.lyapunov_residual_tol)
    throw NumericError("solve_lyapunov: residual above tolerance");
  try {
    (void)cholesky(h, cfg);
  } catch (const NumericError&) {
    throw NumericError("solve_lyapunov: solution not positive definite, A is not Hurwitz");
  }
  return h;
}

}  // namespace lnstab
