#pragma once

// Analysis report records, JSON (de)serialization, CSV writers and text
// rendering. Reports use 6 significant digits, CSV uses 17.

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lnstab/catalog.hpp"
#include "lnstab/error.hpp"
#include "lnstab/floquet.hpp"
#include "lnstab/periodic.hpp"
#include "lnstab/perturb.hpp"
#include "lnstab/system.hpp"

namespace lnstab {

inline constexpr const char* tool_version = "0.3.0";

struct SystemInfo {
  std::string source;  // "catalog" or "file"
  std::string name;
  std::map<std::string, double> params;
  std::size_t n = 0;
  double t0 = 0.0;
  double period = 0.0;
  std::vector<std::vector<std::string>> entries;
  bool operator==(const SystemInfo&) const = default;
};

struct ToleranceInfo {
  double zero_tol = 0.0;
  double quadrature_tol = 0.0;
  double rk4_tol = 0.0;
  double verify_rel_slack = 0.0;
  double periodicity_tol = 0.0;
  bool operator==(const ToleranceInfo&) const = default;
};

struct RateRecord {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double delta_u_plus = 0.0;
  double delta_l_plus = 0.0;
  double delta_u_minus = 0.0;
  double delta_l_minus = 0.0;
  double quadrature_error_estimate = 0.0;
  bool operator==(const RateRecord&) const = default;
};

struct VerdictRecord {
  std::string classification;
  double pi_plus_period = 0.0;
  double pi_minus_period = 0.0;
  std::optional<double> k;
  std::optional<double> alpha_tilde;
  std::optional<double> uniform_bound;
  double strip_lower = 0.0;
  double strip_upper = 0.0;
  std::string message;
  bool operator==(const VerdictRecord&) const = default;
};

struct StripRecord {
  bool pass = false;
  std::vector<double> fce_real_parts;
  double epsilon = 0.0;
  double lower_margin = 0.0;
  double upper_margin = 0.0;
  bool operator==(const StripRecord&) const = default;
};

struct SandwichRecord {
  bool pass = false;
  double max_violation = 0.0;
  std::size_t pairs = 0;
  bool operator==(const SandwichRecord&) const = default;
};

struct DecayRecord {
  bool pass = false;
  double worst_margin = 0.0;
  double worst_envelope_margin = 0.0;
  std::size_t pairs = 0;
  bool operator==(const DecayRecord&) const = default;
};

// status: "ok" or "skipped: oracle disabled". decay_status explains a
// missing decay record.
struct OracleRecord {
  std::string status;
  std::optional<StripRecord> strip;
  std::optional<SandwichRecord> sandwich;
  std::optional<DecayRecord> decay;
  std::string decay_status;
  bool operator==(const OracleRecord&) const = default;
};

struct NormAnalysis {
  std::string norm;
  RateRecord rates;
  VerdictRecord verdict;
  OracleRecord oracle;
  bool operator==(const NormAnalysis&) const = default;
};

struct FrozenRecord {
  std::size_t grid_points = 0;
  double m = 0.0;
  double m_with_margin = 0.0;
  bool applicable = false;
  std::optional<double> alpha;
  double sup_a_dot = 0.0;
  std::optional<double> c2_bound;
  std::optional<double> c2_bound_alt;
  bool c1_satisfied = false;
  bool c2_satisfied = false;
  std::string message;
  bool operator==(const FrozenRecord&) const = default;
};

struct FceRecord {
  std::vector<double> real_parts;
  std::vector<std::array<double, 2>> multipliers;  // (re, im)
  double integration_error = 0.0;
  bool operator==(const FceRecord&) const = default;
};

struct AnalysisReport {
  std::string tool_version;
  SystemInfo system;
  ToleranceInfo tolerances;
  std::vector<NormAnalysis> norms;
  FrozenRecord frozen_time;
  std::optional<FceRecord> oracle_fce;
  bool operator==(const AnalysisReport&) const = default;
};

// ---- conversions from library results ----

inline RateRecord to_record(const RateSummary& r) {
  return {r.lambda_plus,   r.lambda_minus,  r.delta_u_plus, r.delta_l_plus,
          r.delta_u_minus, r.delta_l_minus, r.quadrature_error_estimate};
}

inline VerdictRecord to_record(const Verdict& v) {
  return {to_string(v.classification), v.pi_plus_period, v.pi_minus_period, v.k, v.alpha_tilde, v.uniform_bound,
          v.fce_strip.lower, v.fce_strip.upper, v.message};
}

inline StripRecord to_record(const StripVerification& s) {
  return {s.pass, std::vector<double>(s.fce_real_parts.begin(), s.fce_real_parts.end()), s.epsilon, s.lower_margin,
          s.upper_margin};
}

inline SandwichRecord to_record(const SandwichVerification& s) { return {s.pass, s.max_violation, s.pairs}; }

inline DecayRecord to_record(const DecayVerification& d) {
  return {d.pass, d.worst_margin, d.worst_envelope_margin, d.pairs};
}

inline FrozenRecord to_record(const FrozenTimeReport& f) {
  return {f.samples.size(), f.m,        f.m_with_margin, f.applicable,   f.alpha,  f.sup_a_dot,
          f.c2_bound,       f.c2_bound_alt, f.c1_satisfied, f.c2_satisfied, f.message};
}

inline FceRecord to_record(const FceEstimate& f) {
  FceRecord r;
  r.real_parts.assign(f.real_parts.begin(), f.real_parts.end());
  for (const Complex& m : f.multipliers) r.multipliers.push_back({m.real(), m.imag()});
  r.integration_error = f.integration_error;
  return r;
}

inline SystemInfo describe_system(const SystemDef& sys, std::string source, std::string name,
                                  std::map<std::string, double> params) {
  SystemInfo info{std::move(source), std::move(name), std::move(params), sys.dimension(), sys.t0(), sys.period(), {}};
  for (std::size_t i = 0; i < sys.dimension(); ++i) {
    std::vector<std::string> row;
    for (std::size_t j = 0; j < sys.dimension(); ++j) row.push_back(serialize(sys.entry(i, j)));
    info.entries.push_back(std::move(row));
  }
  return info;
}

// ---- JSON ----

namespace detail {

using nlohmann::json;

template <class T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
  else j[key] = nullptr;
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const SystemInfo& s) {
  j = {{"source", s.source}, {"name", s.name}, {"params", s.params}, {"n", s.n},
       {"t0", s.t0},         {"period", s.period}, {"entries", s.entries}};
}
inline void from_json(const nlohmann::json& j, SystemInfo& s) {
  j.at("source").get_to(s.source);
  j.at("name").get_to(s.name);
  j.at("params").get_to(s.params);
  j.at("n").get_to(s.n);
  j.at("t0").get_to(s.t0);
  j.at("period").get_to(s.period);
  j.at("entries").get_to(s.entries);
}

inline void to_json(nlohmann::json& j, const ToleranceInfo& t) {
  j = {{"zero_tol", t.zero_tol},
       {"quadrature_tol", t.quadrature_tol},
       {"rk4_tol", t.rk4_tol},
       {"verify_rel_slack", t.verify_rel_slack},
       {"periodicity_tol", t.periodicity_tol}};
}
inline void from_json(const nlohmann::json& j, ToleranceInfo& t) {
  j.at("zero_tol").get_to(t.zero_tol);
  j.at("quadrature_tol").get_to(t.quadrature_tol);
  j.at("rk4_tol").get_to(t.rk4_tol);
  j.at("verify_rel_slack").get_to(t.verify_rel_slack);
  j.at("periodicity_tol").get_to(t.periodicity_tol);
}

inline void to_json(nlohmann::json& j, const RateRecord& r) {
  j = {{"lambda_plus", r.lambda_plus},     {"lambda_minus", r.lambda_minus},
       {"delta_u_plus", r.delta_u_plus},   {"delta_l_plus", r.delta_l_plus},
       {"delta_u_minus", r.delta_u_minus}, {"delta_l_minus", r.delta_l_minus},
       {"quadrature_error_estimate", r.quadrature_error_estimate}};
}
inline void from_json(const nlohmann::json& j, RateRecord& r) {
  j.at("lambda_plus").get_to(r.lambda_plus);
  j.at("lambda_minus").get_to(r.lambda_minus);
  j.at("delta_u_plus").get_to(r.delta_u_plus);
  j.at("delta_l_plus").get_to(r.delta_l_plus);
  j.at("delta_u_minus").get_to(r.delta_u_minus);
  j.at("delta_l_minus").get_to(r.delta_l_minus);
  j.at("quadrature_error_estimate").get_to(r.quadrature_error_estimate);
}

inline void to_json(nlohmann::json& j, const VerdictRecord& v) {
  j = {{"classification", v.classification},
       {"pi_plus_period", v.pi_plus_period},
       {"pi_minus_period", v.pi_minus_period},
       {"fce_strip", {v.strip_lower, v.strip_upper}},
       {"message", v.message}};
  detail::put_opt(j, "k", v.k);
  detail::put_opt(j, "alpha_tilde", v.alpha_tilde);
  detail::put_opt(j, "uniform_bound", v.uniform_bound);
}
inline void from_json(const nlohmann::json& j, VerdictRecord& v) {
  j.at("classification").get_to(v.classification);
  j.at("pi_plus_period").get_to(v.pi_plus_period);
  j.at("pi_minus_period").get_to(v.pi_minus_period);
  v.strip_lower = j.at("fce_strip").at(0).get<double>();
  v.strip_upper = j.at("fce_strip").at(1).get<double>();
  j.at("message").get_to(v.message);
  v.k = detail::get_opt<double>(j, "k");
  v.alpha_tilde = detail::get_opt<double>(j, "alpha_tilde");
  v.uniform_bound = detail::get_opt<double>(j, "uniform_bound");
}

inline void to_json(nlohmann::json& j, const StripRecord& s) {
  j = {{"pass", s.pass},
       {"fce_real_parts", s.fce_real_parts},
       {"epsilon", s.epsilon},
       {"lower_margin", s.lower_margin},
       {"upper_margin", s.upper_margin}};
}
inline void from_json(const nlohmann::json& j, StripRecord& s) {
  j.at("pass").get_to(s.pass);
  j.at("fce_real_parts").get_to(s.fce_real_parts);
  j.at("epsilon").get_to(s.epsilon);
  j.at("lower_margin").get_to(s.lower_margin);
  j.at("upper_margin").get_to(s.upper_margin);
}

inline void to_json(nlohmann::json& j, const SandwichRecord& s) {
  j = {{"pass", s.pass}, {"max_violation", s.max_violation}, {"pairs", s.pairs}};
}
inline void from_json(const nlohmann::json& j, SandwichRecord& s) {
  j.at("pass").get_to(s.pass);
  j.at("max_violation").get_to(s.max_violation);
  j.at("pairs").get_to(s.pairs);
}

inline void to_json(nlohmann::json& j, const DecayRecord& d) {
  j = {{"pass", d.pass},
       {"worst_margin", d.worst_margin},
       {"worst_envelope_margin", d.worst_envelope_margin},
       {"pairs", d.pairs}};
}
inline void from_json(const nlohmann::json& j, DecayRecord& d) {
  j.at("pass").get_to(d.pass);
  j.at("worst_margin").get_to(d.worst_margin);
  j.at("worst_envelope_margin").get_to(d.worst_envelope_margin);
  j.at("pairs").get_to(d.pairs);
}

inline void to_json(nlohmann::json& j, const OracleRecord& o) {
  j = {{"status", o.status}, {"decay_status", o.decay_status}};
  detail::put_opt(j, "strip", o.strip);
  detail::put_opt(j, "sandwich", o.sandwich);
  detail::put_opt(j, "decay", o.decay);
}
inline void from_json(const nlohmann::json& j, OracleRecord& o) {
  j.at("status").get_to(o.status);
  j.at("decay_status").get_to(o.decay_status);
  o.strip = detail::get_opt<StripRecord>(j, "strip");
  o.sandwich = detail::get_opt<SandwichRecord>(j, "sandwich");
  o.decay = detail::get_opt<DecayRecord>(j, "decay");
}

inline void to_json(nlohmann::json& j, const NormAnalysis& a) {
  j = {{"norm", a.norm}, {"rates", a.rates}, {"verdict", a.verdict}, {"oracle", a.oracle}};
}
inline void from_json(const nlohmann::json& j, NormAnalysis& a) {
  j.at("norm").get_to(a.norm);
  j.at("rates").get_to(a.rates);
  j.at("verdict").get_to(a.verdict);
  j.at("oracle").get_to(a.oracle);
}

inline void to_json(nlohmann::json& j, const FrozenRecord& f) {
  j = {{"grid_points", f.grid_points}, {"m", f.m},
       {"m_with_margin", f.m_with_margin}, {"applicable", f.applicable},
       {"sup_a_dot", f.sup_a_dot},     {"c1_satisfied", f.c1_satisfied},
       {"c2_satisfied", f.c2_satisfied}, {"message", f.message}};
  detail::put_opt(j, "alpha", f.alpha);
  detail::put_opt(j, "c2_bound", f.c2_bound);
  detail::put_opt(j, "c2_bound_alt", f.c2_bound_alt);
}
inline void from_json(const nlohmann::json& j, FrozenRecord& f) {
  j.at("grid_points").get_to(f.grid_points);
  j.at("m").get_to(f.m);
  j.at("m_with_margin").get_to(f.m_with_margin);
  j.at("applicable").get_to(f.applicable);
  j.at("sup_a_dot").get_to(f.sup_a_dot);
  j.at("c1_satisfied").get_to(f.c1_satisfied);
  j.at("c2_satisfied").get_to(f.c2_satisfied);
  j.at("message").get_to(f.message);
  f.alpha = detail::get_opt<double>(j, "alpha");
  f.c2_bound = detail::get_opt<double>(j, "c2_bound");
  f.c2_bound_alt = detail::get_opt<double>(j, "c2_bound_alt");
}

inline void to_json(nlohmann::json& j, const FceRecord& f) {
  j = {{"real_parts", f.real_parts}, {"multipliers", f.multipliers}, {"integration_error", f.integration_error}};
}
inline void from_json(const nlohmann::json& j, FceRecord& f) {
  j.at("real_parts").get_to(f.real_parts);
  j.at("multipliers").get_to(f.multipliers);
  j.at("integration_error").get_to(f.integration_error);
}

inline void to_json(nlohmann::json& j, const AnalysisReport& r) {
  j = {{"tool_version", r.tool_version}, {"system", r.system},       {"tolerances", r.tolerances},
       {"norms", r.norms},               {"frozen_time", r.frozen_time}};
  detail::put_opt(j, "oracle_fce", r.oracle_fce);
}
inline void from_json(const nlohmann::json& j, AnalysisReport& r) {
  j.at("tool_version").get_to(r.tool_version);
  j.at("system").get_to(r.system);
  j.at("tolerances").get_to(r.tolerances);
  j.at("norms").get_to(r.norms);
  j.at("frozen_time").get_to(r.frozen_time);
  r.oracle_fce = detail::get_opt<FceRecord>(j, "oracle_fce");
}

inline std::string report_to_json(const AnalysisReport& r) { return nlohmann::json(r).dump(2) + "\n"; }

inline AnalysisReport report_from_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text).get<AnalysisReport>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
}

// System file: {"n": int, "t0": real, "period": real, "entries": [[string]]}.
// t0 defaults to 0; numeric entries are accepted as constants.
inline SystemDef system_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed system file: ") + e.what());
  }
  try {
    if (!j.is_object()) throw InputError("malformed system file: top level must be an object");
    const auto n = j.at("n").get<long long>();
    if (n < 1) throw InputError("malformed system file: n must be >= 1");
    const double period = j.at("period").get<double>();
    const double t0 = j.contains("t0") ? j.at("t0").get<double>() : 0.0;
    const auto& rows = j.at("entries");
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n))
      throw InputError("malformed system file: entries must have n rows");
    std::vector<std::string> flat;
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
        throw InputError("malformed system file: every row of entries must have n items");
      for (const auto& cell : row) {
        if (cell.is_string()) flat.push_back(cell.get<std::string>());
        else if (cell.is_number()) flat.push_back(serialize(constant_expression(cell.get<double>())));
        else throw InputError("malformed system file: entries must be strings or numbers");
      }
    }
    return SystemDef::from_strings(static_cast<std::size_t>(n), flat, period, t0);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed system file: ") + e.what());
  }
}

inline std::string system_to_json(const SystemDef& sys) {
  nlohmann::json j;
  j["n"] = sys.dimension();
  j["t0"] = sys.t0();
  j["period"] = sys.period();
  j["entries"] = describe_system(sys, "", "", {}).entries;
  return j.dump(2) + "\n";
}

// ---- number formatting ----

inline std::string fmt6(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string fmt17(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- CSV ----

inline void write_barrier_csv(std::ostream& os, const std::vector<BarrierRow>& rows) {
  os << "t,pi_plus,pi_minus,low_plus,up_plus,low_minus,up_minus\n";
  for (const auto& r : rows)
    os << fmt17(r.t) << ',' << fmt17(r.pi_plus) << ',' << fmt17(r.pi_minus) << ',' << fmt17(r.low_plus) << ','
       << fmt17(r.up_plus) << ',' << fmt17(r.low_minus) << ',' << fmt17(r.up_minus) << '\n';
}

// `envelope`, when given, appends lower and upper bound columns per sample.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const NormKind& kind,
                                 const std::vector<std::array<double, 2>>* envelope = nullptr) {
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  os << 't';
  for (std::size_t i = 1; i <= n; ++i) os << ",x" << i;
  os << ",norm";
  if (envelope) os << ",lower,upper";
  os << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << fmt17(traj.times[k]);
    for (double v : traj.states[k]) os << ',' << fmt17(v);
    os << ',' << fmt17(vec_norm(traj.states[k], kind));
    if (envelope) os << ',' << fmt17((*envelope)[k][0]) << ',' << fmt17((*envelope)[k][1]);
    os << '\n';
  }
}

// ---- text ----

inline void write_text_report(std::ostream& os, const AnalysisReport& r) {
  const auto& s = r.system;
  os << "lnstab " << r.tool_version << "\n";
  os << "system: " << s.name << " (" << s.source << ")";
  for (const auto& [k, v] : s.params) os << ' ' << k << '=' << fmt6(v);
  os << "\n  n = " << s.n << ", t0 = " << fmt6(s.t0) << ", period = " << fmt6(s.period) << "\n";
  for (const auto& row : s.entries) {
    os << "  [";
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? ", " : " ") << row[j];
    os << " ]\n";
  }

  for (const auto& a : r.norms) {
    const auto& rt = a.rates;
    const auto& v = a.verdict;
    os << "\nnorm " << a.norm << "\n";
    os << "  lambda+ = " << fmt6(rt.lambda_plus) << "  lambda- = " << fmt6(rt.lambda_minus) << "\n";
    os << "  delta_U+ = " << fmt6(rt.delta_u_plus) << "  delta_L+ = " << fmt6(rt.delta_l_plus)
       << "  delta_U- = " << fmt6(rt.delta_u_minus) << "  delta_L- = " << fmt6(rt.delta_l_minus) << "\n";
    os << "  Pi+(t0+T) = " << fmt6(v.pi_plus_period) << "  Pi-(t0+T) = " << fmt6(v.pi_minus_period) << "\n";
    os << "  verdict: " << v.classification << " - " << v.message << "\n";
    if (v.k) os << "  K = " << fmt6(*v.k) << "  alpha~ = " << fmt6(*v.alpha_tilde) << "\n";
    if (v.uniform_bound) os << "  sup ||Phi|| <= " << fmt6(*v.uniform_bound) << "\n";
    os << "  FCE strip: [" << fmt6(v.strip_lower) << ", " << fmt6(v.strip_upper) << "]\n";

    const auto& o = a.oracle;
    if (o.status != "ok") {
      os << "  oracle: " << o.status << "\n";
      continue;
    }
    if (o.strip)
      os << "  oracle strip: " << (o.strip->pass ? "pass" : "FAIL") << " (margins " << fmt6(o.strip->lower_margin)
         << ", " << fmt6(o.strip->upper_margin) << ", eps " << fmt6(o.strip->epsilon) << ")\n";
    if (o.sandwich)
      os << "  oracle sandwich: " << (o.sandwich->pass ? "pass" : "FAIL") << " (max violation "
         << fmt6(o.sandwich->max_violation) << " over " << o.sandwich->pairs << " pairs)\n";
    if (o.decay)
      os << "  oracle decay: " << (o.decay->pass ? "pass" : "FAIL") << " (worst margin " << fmt6(o.decay->worst_margin)
         << ", envelope " << fmt6(o.decay->worst_envelope_margin) << ")\n";
    else
      os << "  oracle decay: " << o.decay_status << "\n";
    if (v.classification == "Inconclusive" && r.oracle_fce) {
      os << "  oracle FCE real parts (not a rate-test certificate):";
      for (double x : r.oracle_fce->real_parts) os << ' ' << fmt6(x);
      os << "\n";
      const double top = r.oracle_fce->real_parts.empty() ? 0.0 : r.oracle_fce->real_parts.back();
      if (top > 0.0) os << "  => Inconclusive by the rate test, unstable by oracle\n";
    }
  }

  const auto& f = r.frozen_time;
  os << "\nfrozen-time check (" << f.grid_points << " samples, 2-norm)\n";
  os << "  M = " << fmt6(f.m) << " (with margin " << fmt6(f.m_with_margin) << "), sup ||A'|| = " << fmt6(f.sup_a_dot)
     << "\n";
  if (f.alpha) os << "  alpha = " << fmt6(*f.alpha) << "\n";
  if (f.c2_bound) os << "  C2 bound = " << fmt6(*f.c2_bound) << " (alternative " << fmt6(*f.c2_bound_alt) << ")\n";
  os << "  " << f.message << "\n";

  if (r.oracle_fce) {
    os << "\noracle Floquet exponents (real parts):";
    for (double x : r.oracle_fce->real_parts) os << ' ' << fmt6(x);
    os << "\n";
  }
}

}  // namespace lnstab
