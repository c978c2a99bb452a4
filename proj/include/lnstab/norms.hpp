#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "lnstab/error.hpp"
#include "lnstab/linalg.hpp"
#include "lnstab/settings.hpp"

namespace lnstab {

// Vector norm selector. The weighted kind is ||x|| = ||P x||_2 for a
// nonsingular transform P, i.e. sqrt(x^T H x) with H = P^T P.
class NormKind {
 public:
  enum class Tag { one, two, inf, weighted };

  NormKind() = default;

  static NormKind one() { return NormKind(Tag::one); }
  static NormKind two() { return NormKind(Tag::two); }
  static NormKind inf() { return NormKind(Tag::inf); }

  static NormKind weighted(const Matrix& transform) {
    if (transform.empty()) throw InputError("weighted norm: empty transform");
    NormKind k(Tag::weighted);
    Matrix inv;
    try {
      inv = inverse(transform);
    } catch (const NumericError&) {
      throw InputError("weighted norm: transform is singular");
    }
    k.weights_ = std::make_shared<const Weights>(Weights{transform, std::move(inv)});
    return k;
  }

  // From a symmetric positive definite Gram matrix H: P = L^T where H = L L^T.
  static NormKind from_gram(const Matrix& h) {
    Matrix l;
    try {
      l = cholesky(h);
    } catch (const NumericError&) {
      throw InputError("weighted norm: H is not positive definite");
    }
    return weighted(l.transpose());
  }

  // "one", "two", "inf"; weighted kinds need a matrix and are built elsewhere.
  static NormKind parse(std::string_view name) {
    if (name == "one" || name == "1") return one();
    if (name == "two" || name == "2") return two();
    if (name == "inf") return inf();
    throw InputError("unknown norm '" + std::string(name) + "'");
  }

  Tag tag() const noexcept { return tag_; }

  std::string name() const {
    switch (tag_) {
      case Tag::one:
        return "one";
      case Tag::two:
        return "two";
      case Tag::inf:
        return "inf";
      case Tag::weighted:
        return "weighted";
    }
    return "two";
  }

  const Matrix& transform() const {
    require_weighted();
    return weights_->transform;
  }

  const Matrix& inverse_transform() const {
    require_weighted();
    return weights_->inverse;
  }

  std::size_t dimension() const noexcept { return weights_ ? weights_->transform.size() : 0; }

 private:
  struct Weights {
    Matrix transform;
    Matrix inverse;
  };

  explicit NormKind(Tag t) : tag_(t) {}

  void require_weighted() const {
    if (tag_ != Tag::weighted) throw InputError("norm kind has no transform");
  }

  Tag tag_ = Tag::two;
  std::shared_ptr<const Weights> weights_;
};

inline double vec_norm(const Vector& v, const NormKind& kind) {
  switch (kind.tag()) {
    case NormKind::Tag::one:
      return norm_one(v);
    case NormKind::Tag::two:
      return norm_two(v);
    case NormKind::Tag::inf:
      return norm_inf(v);
    case NormKind::Tag::weighted:
      if (kind.dimension() != v.size()) throw InputError("weighted norm: dimension mismatch");
      return norm_two(kind.transform() * v);
  }
  return 0.0;
}

// Norm induced by the vector norm `kind`.
inline double mat_norm(const Matrix& a, const NormKind& kind, const Settings& cfg = default_settings()) {
  switch (kind.tag()) {
    case NormKind::Tag::one:
      return mat_norm_one(a);
    case NormKind::Tag::two:
      return mat_norm_two(a, cfg);
    case NormKind::Tag::inf:
      return mat_norm_inf(a);
    case NormKind::Tag::weighted:
      if (kind.dimension() != a.size()) throw InputError("weighted norm: dimension mismatch");
      return mat_norm_two(kind.transform() * a * kind.inverse_transform(), cfg);
  }
  return 0.0;
}

}  // namespace lnstab
