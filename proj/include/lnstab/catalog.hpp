#pragma once

// Built-in systems: two periodic examples and small LTI references.

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lnstab/error.hpp"
#include "lnstab/expr.hpp"
#include "lnstab/matrix.hpp"
#include "lnstab/system.hpp"

namespace lnstab {

enum class Origin { published, derived, trivial };

inline std::string to_string(Origin p) {
  switch (p) {
    case Origin::published: return "published";
    case Origin::derived: return "derived";
    case Origin::trivial: return "trivial";
  }
  return "?";
}

struct KnownConstant {
  std::string name;
  double value = 0.0;
  Origin origin = Origin::derived;
};

using Params = std::map<std::string, double>;
using TransitionFn = std::function<Matrix(double t)>;  // Phi(t, t0)

struct CatalogEntry {
  std::string name;
  SystemDef system;
  std::vector<KnownConstant> constants;
  std::optional<TransitionFn> closed_form;

  std::optional<double> constant(std::string_view key) const {
    for (const auto& c : constants)
      if (c.name == key) return c.value;
    return std::nullopt;
  }
};

namespace catalog {

inline constexpr double pi = 3.141592653589793238462643383279502884;

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> list{"example1", "example2", "lti_diag", "lti_jordan_marginal",
                                             "scalar_unstable"};
  return list;
}

namespace detail {

inline double require(const Params& p, const std::string& key, const std::string& system) {
  auto it = p.find(key);
  if (it == p.end()) throw InputError("system '" + system + "' requires parameter '" + key + "'");
  if (!std::isfinite(it->second)) throw InputError("parameter '" + key + "' must be finite");
  return it->second;
}

inline void reject_unknown(const Params& p, std::initializer_list<std::string_view> allowed, const std::string& system) {
  for (const auto& [key, value] : p) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) throw InputError("system '" + system + "' has no parameter '" + key + "'");
  }
}

// Shortest round-trip text for a real, usable inside an expression.
inline std::string literal(double v) {
  return serialize(constant_expression(v));
}

}  // namespace detail

// A_beta(t) = -I + beta * [cos^2, -sin cos; -sin cos, sin^2] + [0, 1; -1, 0]
inline CatalogEntry example1(double beta) {
  const std::string b = detail::literal(beta);
  SystemDef sys = SystemDef::from_strings(2,
                                          {"-1 + " + b + "*cos(t)^2", "1 - " + b + "*sin(t)*cos(t)",
                                           "-1 - " + b + "*sin(t)*cos(t)", "-1 + " + b + "*sin(t)^2"},
                                          2.0 * pi);
  CatalogEntry e{"example1", std::move(sys), {}, std::nullopt};
  e.constants = {
      {"beta", beta, Origin::published},
      {"pointwise_eigenvalue_real_part", (beta - 2.0) / 2.0, Origin::published},
      {"fce_1", beta - 1.0, Origin::derived},
      {"fce_2", -1.0, Origin::derived},
      {"pi_plus_two_period", 2.0 * pi * std::max(-1.0, beta - 1.0), Origin::published},
  };
  e.closed_form = [beta](double t) {
    const double g = std::exp((beta - 1.0) * t), d = std::exp(-t);
    const double c = std::cos(t), s = std::sin(t);
    return Matrix{{g * c, d * s}, {-g * s, d * c}};
  };
  return e;
}

inline CatalogEntry example2() {
  SystemDef sys = SystemDef::from_strings(
      2, {"-11/2 + (15/2)*sin(12*t)", "(15/2)*cos(12*t)", "(15/2)*cos(12*t)", "-41/2 - (15/2)*sin(12*t)"}, pi / 6.0);
  CatalogEntry e{"example2", std::move(sys), {}, std::nullopt};
  e.constants = {
      {"lambda_plus_one", -0.7253, Origin::published},
      {"lambda_minus_one", 25.2747, Origin::published},
      {"delta_u_plus_one", 1.2872, Origin::published},
      {"delta_u_minus_one", 1.2871, Origin::published},
      {"delta_l_plus_one", -0.0364, Origin::published},
      {"lambda_plus_two", -3.4507, Origin::published},
      {"lambda_minus_two", 22.5493, Origin::published},
      {"delta_u_plus_two", 0.9337, Origin::published},
      {"delta_u_minus_two", 1.0441, Origin::published},
      {"lambda_plus_one_closed_form", 15.0 / pi - 5.5, Origin::derived},
      {"lambda_minus_one_closed_form", 15.0 / pi + 20.5, Origin::derived},
  };
  return e;
}

inline CatalogEntry lti_diag(double a, double b) {
  CatalogEntry e{"lti_diag", SystemDef::constant(Matrix::diagonal({a, b})), {}, std::nullopt};
  e.constants = {{"a", a, Origin::trivial}, {"b", b, Origin::trivial}};
  e.closed_form = [a, b](double t) { return Matrix::diagonal({std::exp(a * t), std::exp(b * t)}); };
  return e;
}

inline CatalogEntry lti_jordan_marginal() {
  CatalogEntry e{"lti_jordan_marginal", SystemDef::constant(Matrix{{0.0, 1.0}, {0.0, 0.0}}), {}, std::nullopt};
  e.constants = {{"mu_two", 0.5, Origin::trivial}, {"mu_one", 1.0, Origin::trivial}};
  e.closed_form = [](double t) { return Matrix{{1.0, t}, {0.0, 1.0}}; };
  return e;
}

// x' = (0.3 + sin t) x; Phi(t, 0) = exp(0.3 t + 1 - cos t).
inline CatalogEntry scalar_unstable() {
  CatalogEntry e{"scalar_unstable", SystemDef::from_strings(1, {"0.3 + sin(t)"}, 2.0 * pi), {}, std::nullopt};
  e.constants = {{"fce", 0.3, Origin::trivial}};
  e.closed_form = [](double t) { return Matrix{{std::exp(0.3 * t + 1.0 - std::cos(t))}}; };
  return e;
}

inline CatalogEntry get(const std::string& name, const Params& params = {}) {
  if (name == "example1") {
    detail::reject_unknown(params, {"beta"}, name);
    return example1(detail::require(params, "beta", name));
  }
  if (name == "example2") {
    detail::reject_unknown(params, {}, name);
    return example2();
  }
  if (name == "lti_diag") {
    detail::reject_unknown(params, {"a", "b"}, name);
    return lti_diag(detail::require(params, "a", name), detail::require(params, "b", name));
  }
  if (name == "lti_jordan_marginal") {
    detail::reject_unknown(params, {}, name);
    return lti_jordan_marginal();
  }
  if (name == "scalar_unstable") {
    detail::reject_unknown(params, {}, name);
    return scalar_unstable();
  }
  std::string known;
  for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
  throw InputError("unknown system '" + name + "' (known: " + known + ")");
}

// One instance of every system, parameterized ones at representative values.
inline std::vector<CatalogEntry> reference_instances() {
  std::vector<CatalogEntry> out;
  for (double beta : {0.25, 0.5, 0.9, 1.0, 1.5, 3.0}) out.push_back(example1(beta));
  out.push_back(example2());
  out.push_back(lti_diag(-1.0, -2.0));
  out.push_back(lti_diag(-0.5, 0.25));
  out.push_back(lti_jordan_marginal());
  out.push_back(scalar_unstable());
  return out;
}

}  // namespace catalog
}  // namespace lnstab
