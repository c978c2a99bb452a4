#pragma once

// Command-line front end: analyze, series, perturb.
// Exit codes: 0 completed, 1 input error, 2 numeric failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lnstab/catalog.hpp"
#include "lnstab/error.hpp"
#include "lnstab/floquet.hpp"
#include "lnstab/io/report.hpp"
#include "lnstab/linalg.hpp"
#include "lnstab/norms.hpp"
#include "lnstab/periodic.hpp"
#include "lnstab/perturb.hpp"
#include "lnstab/settings.hpp"
#include "lnstab/system.hpp"

namespace lnstab::cli {

struct LoadedSystem {
  SystemDef system;
  SystemInfo info;
};

struct CommonOptions {
  std::string system_name;
  std::string file;
  std::vector<std::string> params;
  std::string norms;
  double zero_tol = default_settings().zero_tol;
};

inline std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--param expects k=v, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    double v = 0.0;
    try {
      v = parse_expression(text).eval(0.0);
    } catch (const Error&) {
      throw InputError("--param " + key + ": cannot read value '" + text + "'");
    }
    out[key] = v;
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw InputError("file not found: " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline LoadedSystem load_system(const CommonOptions& o, const Settings& cfg) {
  const auto params = parse_params(o.params);
  std::optional<SystemDef> sys;
  SystemInfo info;
  if (!o.file.empty()) {
    if (!params.empty()) throw InputError("--param applies to catalog systems only");
    sys = system_from_json(read_file(o.file));
    info = describe_system(*sys, "file", o.file, {});
  } else {
    CatalogEntry e = catalog::get(o.system_name, params);
    sys = e.system;
    info = describe_system(*sys, "catalog", o.system_name, params);
  }
  validate_periodicity(*sys, cfg);
  return {*sys, info};
}

// Weighted norm from the Lyapunov solution for the period-averaged A.
inline NormKind weighted_for(const SystemDef& sys) {
  constexpr std::size_t samples = 64;
  Matrix avg(sys.dimension());
  for (std::size_t k = 0; k < samples; ++k)
    avg += sys.matrix_at(sys.t0() + sys.period() * static_cast<double>(k) / static_cast<double>(samples));
  avg *= 1.0 / static_cast<double>(samples);
  Matrix h;
  try {
    h = solve_lyapunov(avg);
  } catch (const NumericError& e) {
    throw InputError(std::string("weighted norm unavailable: ") + e.what());
  }
  return NormKind::from_gram(h);
}

inline std::vector<NormKind> parse_norms(const std::string& list, const SystemDef& sys) {
  std::vector<NormKind> out;
  std::string item;
  std::istringstream ss(list);
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw InputError("--norm: empty item in '" + list + "'");
    if (item == "weighted") out.push_back(weighted_for(sys));
    else out.push_back(NormKind::parse(item));
  }
  if (out.empty()) throw InputError("--norm: no norms given");
  return out;
}

inline Vector parse_vector(const std::string& text, std::size_t n, const std::string& flag) {
  Vector v;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i)
    if (i == text.size() || text[i] == ',' || text[i] == ';') {
      try {
        v.push_back(parse_expression(std::string_view(text).substr(start, i - start)).eval(0.0));
      } catch (const Error& e) {
        throw InputError(flag + ": " + e.what());
      }
      start = i + 1;
    }
  if (v.size() != n)
    throw InputError(flag + ": expected " + std::to_string(n) + " components, got " + std::to_string(v.size()));
  return v;
}

// Writes to `path`, or to `fallback` when path is empty.
template <class F>
void emit(const std::string& path, std::ostream& fallback, F&& body) {
  if (path.empty()) {
    body(fallback);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write file: " + path);
  body(out);
  out.flush();
  if (!out) throw InputError("write failed: " + path);
}

inline ToleranceInfo tolerances(const Settings& cfg, double zero_tol) {
  return {zero_tol, cfg.quadrature_tol, cfg.rk4_tol, cfg.verify_rel_slack, cfg.periodicity_tol};
}

constexpr std::size_t oracle_grid = 16;
constexpr std::size_t frozen_grid = 64;

inline AnalysisReport analyze(const LoadedSystem& in, const std::vector<NormKind>& norms, bool oracle,
                              double zero_tol, const Settings& cfg = default_settings()) {
  const SystemDef& sys = in.system;
  AnalysisReport rep;
  rep.tool_version = tool_version;
  rep.system = in.info;
  rep.tolerances = tolerances(cfg, zero_tol);

  std::optional<FceEstimate> fce;
  if (oracle) {
    fce = monodromy_fce(sys, cfg);
    rep.oracle_fce = to_record(*fce);
  }
  for (const NormKind& kind : norms) {
    const RateSummary rates = rate_summary(sys, kind, cfg);
    const Verdict verdict = classify(rates, zero_tol);
    NormAnalysis a{kind.name(), to_record(rates), to_record(verdict), {}};
    if (!oracle) {
      a.oracle.status = "skipped: oracle disabled";
      a.oracle.decay_status = "skipped: oracle disabled";
    } else {
      a.oracle.status = "ok";
      a.oracle.strip = to_record(verify_strip(sys, rates, *fce, cfg));
      a.oracle.sandwich = to_record(verify_sandwich(sys, kind, oracle_grid, cfg));
      if (verdict.classification == Classification::ues) {
        a.oracle.decay = to_record(verify_decay(sys, verdict, oracle_grid, cfg));
        a.oracle.decay_status = "checked";
      } else {
        a.oracle.decay_status = "not applicable: verdict is not UES";
      }
    }
    rep.norms.push_back(std::move(a));
  }
  rep.frozen_time = to_record(frozen_time_check(sys, frozen_grid, cfg));
  return rep;
}

struct PerturbResult {
  Trajectory trajectory;
  ConvergenceReport convergence;
  WindowReport window;
  std::vector<std::pair<std::string, std::string>> verdicts;  // norm, classification
  bool a1_confirmed = false;  // some requested norm certifies UES
  bool a2_confirmed = false;  // windowed integrals observed to vanish
};

inline PerturbResult perturb(const SystemDef& sys, const std::vector<NormKind>& norms, const Disturbance& d,
                             const Vector& x0, double t_end, std::size_t samples, double zero_tol,
                             const Settings& cfg = default_settings()) {
  PerturbResult r;
  for (const NormKind& kind : norms) {
    const Verdict v = classify(sys, kind, zero_tol, cfg);
    r.verdicts.emplace_back(kind.name(), to_string(v.classification));
    r.a1_confirmed = r.a1_confirmed || v.classification == Classification::ues;
  }
  r.trajectory = simulate_perturbed(sys, d, x0, t_end, samples, {}, cfg);
  if (r.trajectory.overflow)
    throw NumericError("blow-up: trajectory left the representable range after t = " +
                       fmt6(r.trajectory.times.back()));
  r.convergence = convergence_report(r.trajectory, norms.front());
  r.window = check_window_integral(d, uniform_grid(sys.t0(), t_end, 16), 32, cfg);
  r.a2_confirmed = r.window.vanishing_observed;
  return r;
}

inline void write_perturb_text(std::ostream& os, const SystemInfo& info, const PerturbResult& r,
                               const NormKind& kind) {
  os << "lnstab " << tool_version << "\n";
  os << "system: " << info.name << " (" << info.source << "), n = " << info.n << "\n";
  for (const auto& [norm, cls] : r.verdicts) os << "  verdict under " << norm << ": " << cls << "\n";
  os << "A1 (uniform exponential stability certified): " << (r.a1_confirmed ? "confirmed" : "not confirmed") << "\n";
  os << "A2 (windowed disturbance integral vanishes): "
     << (r.a2_confirmed ? "observed" : "not observed") << "\n";
  os << "  sup_{0<=eta<=1} |int_t^{t+eta} d| at t =";
  for (const auto& p : r.window.points) os << ' ' << fmt6(p.t) << ':' << fmt6(p.sup);
  os << "\n";
  if (r.window.tail_log_slope) os << "  tail log-slope: " << fmt6(*r.window.tail_log_slope) << "\n";
  const auto& t = r.trajectory;
  os << "trajectory: " << t.times.size() << " samples to t = " << fmt6(t.times.back()) << ", " << t.steps
     << " RK4 steps";
  if (t.overflow) os << ", OVERFLOW";
  os << "\n";
  if (t.cross_check_rel_error)
    os << "  variation-of-constants cross-check: relative error " << fmt6(*t.cross_check_rel_error) << "\n";
  os << "  tail max |x| (" << kind.name() << "): " << fmt6(r.convergence.tail_max_norm)
     << ", decreasing tail: " << (r.convergence.decreasing_tail ? "true" : "false") << "\n";
  if (r.a1_confirmed && r.a2_confirmed)
    os << "convergence to 0 claimed (both hypotheses confirmed numerically)\n";
  else
    os << "convergence to 0 NOT claimed\n";
}

inline void add_common(CLI::App* cmd, CommonOptions& o, const char* default_norms) {
  auto* g = cmd->add_option_group("source");
  g->add_option("--system", o.system_name, "catalog system name");
  g->add_option("--file", o.file, "JSON system file");
  g->require_option(1);
  cmd->add_option("--param", o.params, "catalog parameter k=v (repeatable)")->take_all();
  o.norms = default_norms;
  cmd->add_option("--norm", o.norms, "comma list of one|two|inf|weighted")->capture_default_str();
  cmd->add_option("--zero-tol", o.zero_tol, "tolerance for Pi+(t0+T) = 0")->check(CLI::NonNegativeNumber);
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const Settings cfg = default_settings();
  CLI::App app{"Stability analysis of linear periodic systems by logarithmic norms"};
  app.set_version_flag("--version", tool_version);
  app.require_subcommand(1);

  CommonOptions an_opts, se_opts, pe_opts;
  bool no_oracle = false;
  std::string json_path;
  auto* analyze_cmd = app.add_subcommand("analyze", "rates, verdicts, strips and oracle checks");
  add_common(analyze_cmd, an_opts, "one,two,inf");
  analyze_cmd->add_flag("--no-oracle", no_oracle, "skip the Floquet oracle");
  analyze_cmd->add_option("--json", json_path, "write the JSON report to PATH ('-' for stdout)");

  std::optional<double> se_t_end;
  std::size_t se_samples = 201;
  std::string se_out, se_traj, se_traj_out;
  auto* series_cmd = app.add_subcommand("series", "barrier-function CSV");
  add_common(series_cmd, se_opts, "two");
  series_cmd->add_option("--t-end", se_t_end, "end time (default t0 + 3T)");
  series_cmd->add_option("--samples", se_samples, "number of rows")->check(CLI::Range(2, 1000000));
  series_cmd->add_option("--out", se_out, "CSV path (default stdout)");
  series_cmd->add_option("--trajectory", se_traj, "initial state c1,...,cn for the solution series");
  series_cmd->add_option("--trajectory-out", se_traj_out, "CSV path for the solution series");

  std::optional<double> pe_t_end;
  std::size_t pe_samples = 201;
  std::string pe_d, pe_x0, pe_out, pe_json;
  auto* perturb_cmd = app.add_subcommand("perturb", "simulate x' = A(t)x + d(t)");
  add_common(perturb_cmd, pe_opts, "two");
  perturb_cmd->add_option("--d", pe_d, "disturbance e1;...;en (or comma separated)")->required();
  perturb_cmd->add_option("--x0", pe_x0, "initial state (default 0)");
  perturb_cmd->add_option("--t-end", pe_t_end, "end time (default t0 + 10)");
  perturb_cmd->add_option("--samples", pe_samples, "trajectory samples")->check(CLI::Range(16, 1000000));
  perturb_cmd->add_option("--out", pe_out, "trajectory CSV path");
  perturb_cmd->add_option("--json", pe_json, "write a JSON summary to PATH ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << tool_version << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (analyze_cmd->parsed()) {
      const LoadedSystem in = load_system(an_opts, cfg);
      const auto norms = parse_norms(an_opts.norms, in.system);
      const AnalysisReport rep = analyze(in, norms, !no_oracle, an_opts.zero_tol, cfg);
      if (json_path == "-") {
        out << report_to_json(rep);
      } else {
        write_text_report(out, rep);
        if (!json_path.empty()) emit(json_path, out, [&](std::ostream& os) { os << report_to_json(rep); });
      }
      return 0;
    }

    if (series_cmd->parsed()) {
      const LoadedSystem in = load_system(se_opts, cfg);
      const SystemDef& sys = in.system;
      const auto norms = parse_norms(se_opts.norms, sys);
      if (norms.size() != 1) throw InputError("series takes exactly one --norm");
      const NormKind& kind = norms.front();
      const double t_end = se_t_end.value_or(sys.t0() + 3.0 * sys.period());
      const auto rows = barrier_series(sys, kind, t_end, se_samples, cfg);
      std::optional<Trajectory> traj;
      std::vector<std::array<double, 2>> envelope;
      if (!se_traj.empty()) {
        const Vector x0 = parse_vector(se_traj, sys.dimension(), "--trajectory");
        traj = simulate_perturbed(sys, Disturbance::zero(sys.dimension()), x0, t_end, se_samples,
                                  {.cross_check = false}, cfg);
        const RateSummary r = rate_summary(sys, kind, cfg);
        const double n0 = vec_norm(x0, kind);
        for (double t : traj->times) {
          const double dt = t - sys.t0();
          envelope.push_back({n0 * std::exp(-r.lambda_minus * dt - r.delta_u_minus),
                              n0 * std::exp(r.lambda_plus * dt + r.delta_u_plus)});
        }
      }
      emit(se_out, out, [&](std::ostream& os) { write_barrier_csv(os, rows); });
      if (traj) {
        if (se_traj_out.empty() && se_out.empty()) out << "\n";
        emit(se_traj_out, out, [&](std::ostream& os) { write_trajectory_csv(os, *traj, kind, &envelope); });
      }
      return 0;
    }

    if (perturb_cmd->parsed()) {
      const LoadedSystem in = load_system(pe_opts, cfg);
      const SystemDef& sys = in.system;
      const auto norms = parse_norms(pe_opts.norms, sys);
      Disturbance d;
      try {
        d = Disturbance::parse(pe_d);
      } catch (const ParseError& e) {
        throw InputError(std::string("--d: ") + e.what());
      }
      if (d.dimension() != sys.dimension())
        throw InputError("--d: expected " + std::to_string(sys.dimension()) + " components, got " +
                         std::to_string(d.dimension()));
      const Vector x0 = pe_x0.empty() ? Vector(sys.dimension(), 0.0) : parse_vector(pe_x0, sys.dimension(), "--x0");
      const double t_end = pe_t_end.value_or(sys.t0() + 10.0);
      const PerturbResult r = perturb(sys, norms, d, x0, t_end, pe_samples, pe_opts.zero_tol, cfg);
      if (pe_json != "-") write_perturb_text(out, in.info, r, norms.front());
      if (!pe_json.empty()) {
        nlohmann::json j;
        j["tool_version"] = tool_version;
        j["system"] = in.info;
        j["verdicts"] = r.verdicts;
        j["a1_confirmed"] = r.a1_confirmed;
        j["a2_confirmed"] = r.a2_confirmed;
        j["tail_max_norm"] = r.convergence.tail_max_norm;
        j["decreasing_tail"] = r.convergence.decreasing_tail;
        j["overflow"] = r.trajectory.overflow;
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : r.window.points) pts.push_back({p.t, p.sup});
        j["window_integral"] = pts;
        j["convergence_claimed"] = r.a1_confirmed && r.a2_confirmed;
        emit(pe_json == "-" ? "" : pe_json, out, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
      }
      if (!pe_out.empty())
        emit(pe_out, out, [&](std::ostream& os) { write_trajectory_csv(os, r.trajectory, norms.front()); });
      return 0;
    }
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace lnstab::cli
