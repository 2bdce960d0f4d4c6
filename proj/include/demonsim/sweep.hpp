#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "demonsim/core.hpp"
#include "demonsim/errors.hpp"
#include "demonsim/exact.hpp"
#include "demonsim/measurement.hpp"
#include "demonsim/montecarlo.hpp"
#include "demonsim/protocols.hpp"
#include "demonsim/report.hpp"

namespace demonsim {

enum class EngineMode { exact, montecarlo, both };
enum class OutputFormat { csv, json };

inline const char* engine_mode_name(EngineMode m) {
  switch (m) {
    case EngineMode::exact: return "exact";
    case EngineMode::montecarlo: return "montecarlo";
    case EngineMode::both: return "both";
  }
  return "?";
}

inline const char* output_format_name(OutputFormat f) {
  return f == OutputFormat::csv ? "csv" : "json";
}

struct ProtocolConfig {
  std::string name = "szilard";  // szilard | flip | ion | identity
  double kappa = 1.0;            // battery storage efficiency
  double lamb_dicke = 0.11;      // ion only
  double nbar = 0.14;            // ion only
  int n_max = 30;                // ion only
  double pulse_area = M_PI;      // ion only
};

/// The measurement-error axis of a sweep: either explicit epsilon values or
/// a depumping-pulse angle grid mapped through epsilon = 1 - exp(-zeta theta).
struct ErrorAxis {
  enum class Kind { epsilon, pulse };
  Kind kind = Kind::epsilon;
  std::vector<double> epsilon;      // kind == epsilon
  double zeta = 1.94;               // kind == pulse
  std::vector<double> pulse_theta;  // kind == pulse

  std::vector<double> resolve() const {
    if (kind == Kind::epsilon) return epsilon;
    std::vector<double> eps;
    eps.reserve(pulse_theta.size());
    for (double theta : pulse_theta)
      eps.push_back(error_from_pulse(ErrorModel{zeta, theta}));
    return eps;
  }
};

struct SweepConfig {
  ProtocolConfig protocol;
  std::vector<double> theta_c{M_PI / 2.0, M_PI / 3.0, M_PI / 6.0};
  ErrorAxis error_axis{ErrorAxis::Kind::epsilon,
                       {0.0,  0.05, 0.1,  0.15, 0.2,  0.25, 0.3,
                        0.35, 0.4,  0.45, 0.5,  0.55, 0.6,  0.65,
                        0.7,  0.75, 0.8,  0.85, 0.9,  0.95, 1.0},
                       1.94,
                       {}};
  EngineMode engine = EngineMode::exact;
  std::size_t n_samples = 100000;
  std::uint64_t seed = 42;
  SigmaMode sigma_mode = SigmaMode::model;
  CoarseVariant coarse_variant = CoarseVariant::cycle_improper;
  std::string output_path;  // empty = stdout
  OutputFormat format = OutputFormat::csv;
  bool timestamp = true;

  bool monte_carlo_enabled() const { return engine != EngineMode::exact; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + t + "'");
  }
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(t, &used);
    if (used != t.size() || t.front() == '-') throw std::invalid_argument(t);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a non-negative integer: '" + t + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError(key + ": expected true/false: '" + t + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

inline std::string format_number(double v, const char* fmt = "%.12g") {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

inline std::string format_exact(double v) { return format_number(v, "%.17g"); }

inline std::string join_numbers(const std::vector<double>& values, const char* fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_number(values[i], fmt);
  }
  return out;
}

}  // namespace detail

/// Numeric grid syntax: "start:stop:step" (inclusive of stop, up to a step
/// tolerance) or a comma-separated list.
inline std::vector<double> parse_grid(const std::string& key, const std::string& text) {
  const std::string t = detail::trim(text);
  if (t.empty()) throw ConfigError(key + ": empty grid");
  if (t.find(':') != std::string::npos) {
    const auto parts = detail::split(t, ':');
    if (parts.size() != 3)
      throw ConfigError(key + ": grid ranges need start:stop:step: '" + t + "'");
    const double start = detail::parse_double(key, parts[0]);
    const double stop = detail::parse_double(key, parts[1]);
    const double step = detail::parse_double(key, parts[2]);
    if (!(step > 0.0)) throw ConfigError(key + ": grid step must be positive");
    if (stop < start) throw ConfigError(key + ": grid stop is below start");
    const auto count =
        static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> values;
    values.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
      values.push_back(start + static_cast<double>(k) * step);
    return values;
  }
  std::vector<double> values;
  for (const auto& part : detail::split(t, ','))
    values.push_back(detail::parse_double(key, part));
  return values;
}

inline EngineMode parse_engine_mode(const std::string& key, const std::string& text) {
  const std::string t = detail::trim(text);
  if (t == "exact") return EngineMode::exact;
  if (t == "montecarlo") return EngineMode::montecarlo;
  if (t == "both") return EngineMode::both;
  throw ConfigError(key + ": expected exact|montecarlo|both: '" + t + "'");
}

inline SigmaMode parse_sigma_mode(const std::string& key, const std::string& text) {
  const std::string t = detail::trim(text);
  if (t == "model") return SigmaMode::model;
  if (t == "empirical") return SigmaMode::empirical;
  throw ConfigError(key + ": expected model|empirical: '" + t + "'");
}

inline CoarseVariant parse_coarse_variant(const std::string& key,
                                          const std::string& text) {
  const std::string t = detail::trim(text);
  if (t == "marginal") return CoarseVariant::marginal;
  if (t == "cycle-improper") return CoarseVariant::cycle_improper;
  if (t == "partial-average") return CoarseVariant::partial_average;
  throw ConfigError(key + ": expected marginal|cycle-improper|partial-average: '" +
                    t + "'");
}

inline OutputFormat parse_output_format(const std::string& key,
                                        const std::string& text) {
  const std::string t = detail::trim(text);
  if (t == "csv") return OutputFormat::csv;
  if (t == "json") return OutputFormat::json;
  throw ConfigError(key + ": expected csv|json: '" + t + "'");
}

/// Checks every cross-field constraint a finished config must satisfy; the
/// thrown message names the offending key.
inline void validate_config(const SweepConfig& config) {
  const auto& p = config.protocol;
  if (p.name != "szilard" && p.name != "flip" && p.name != "ion" &&
      p.name != "identity")
    throw ConfigError("protocol.name: unknown protocol '" + p.name + "'");
  if (!(p.kappa >= 0.0 && p.kappa <= 1.0))
    throw ConfigError("protocol.kappa: must lie in [0, 1]");
  if (p.name == "ion") {
    if (!(p.lamb_dicke > 0.0)) throw ConfigError("protocol.lamb_dicke: must be > 0");
    if (!(p.nbar >= 0.0)) throw ConfigError("protocol.nbar: must be >= 0");
    if (p.n_max < 2) throw ConfigError("protocol.n_max: must be >= 2");
    if (!(p.pulse_area > 0.0)) throw ConfigError("protocol.pulse_area: must be > 0");
  }
  if (config.theta_c.empty()) throw ConfigError("theta_c: grid is empty");
  for (double theta : config.theta_c)
    if (!(theta > 0.0) || theta > M_PI / 2.0 + 1e-12)
      throw ConfigError(
          "theta_c: preparation angle must lie in (0, pi/2]; beyond pi/2 the "
          "prepared populations are inverted (negative beta)");
  if (config.error_axis.kind == ErrorAxis::Kind::epsilon) {
    if (config.error_axis.epsilon.empty())
      throw ConfigError("error_axis: epsilon grid is empty");
    for (double eps : config.error_axis.epsilon)
      if (!(eps >= 0.0 && eps <= 1.0))
        throw ConfigError("error_axis: epsilon " + detail::format_number(eps) +
                          " outside [0, 1]");
  } else {
    if (config.error_axis.pulse_theta.empty())
      throw ConfigError("error_axis: pulse_theta grid is empty");
    if (!(config.error_axis.zeta > 0.0))
      throw ConfigError("error_axis: zeta must be > 0");
    for (double theta : config.error_axis.pulse_theta)
      if (!(theta >= 0.0))
        throw ConfigError("error_axis: pulse_theta entries must be >= 0");
  }
  if (config.monte_carlo_enabled() && config.n_samples < 1)
    throw ConfigError("engine.n_samples: must be >= 1");
}

/// Flat `key = value` config text: '#' comments, one key per line, section
/// prefixes protocol. / sweep. / engine. Unknown keys are rejected.
inline SweepConfig parse_config(const std::string& text,
                                SweepConfig base = SweepConfig{}) {
  SweepConfig config = std::move(base);
  bool saw_epsilon = false;
  bool saw_pulse = false;
  std::istringstream stream(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value: '" + t + "'");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));

    if (key == "protocol.name") config.protocol.name = value;
    else if (key == "protocol.kappa") config.protocol.kappa = detail::parse_double(key, value);
    else if (key == "protocol.lamb_dicke") config.protocol.lamb_dicke = detail::parse_double(key, value);
    else if (key == "protocol.nbar") config.protocol.nbar = detail::parse_double(key, value);
    else if (key == "protocol.n_max") config.protocol.n_max = static_cast<int>(detail::parse_uint(key, value));
    else if (key == "protocol.pulse_area") config.protocol.pulse_area = detail::parse_double(key, value);
    else if (key == "sweep.theta_c") config.theta_c = parse_grid(key, value);
    else if (key == "sweep.epsilon") {
      saw_epsilon = true;
      config.error_axis.kind = ErrorAxis::Kind::epsilon;
      config.error_axis.epsilon = parse_grid(key, value);
    } else if (key == "sweep.pulse_theta") {
      saw_pulse = true;
      config.error_axis.kind = ErrorAxis::Kind::pulse;
      config.error_axis.pulse_theta = parse_grid(key, value);
    } else if (key == "sweep.zeta") config.error_axis.zeta = detail::parse_double(key, value);
    else if (key == "sweep.output_path") config.output_path = value;
    else if (key == "sweep.output_format") config.format = parse_output_format(key, value);
    else if (key == "sweep.timestamp") config.timestamp = detail::parse_bool(key, value);
    else if (key == "engine.mode") config.engine = parse_engine_mode(key, value);
    else if (key == "engine.n_samples") config.n_samples = static_cast<std::size_t>(detail::parse_uint(key, value));
    else if (key == "engine.seed") config.seed = detail::parse_uint(key, value);
    else if (key == "engine.sigma_mode") config.sigma_mode = parse_sigma_mode(key, value);
    else if (key == "engine.coarse_variant") config.coarse_variant = parse_coarse_variant(key, value);
    else throw ConfigError("unknown key '" + key + "'");
  }
  if (saw_epsilon && saw_pulse)
    throw ConfigError(
        "error_axis: sweep.epsilon and sweep.pulse_theta are mutually exclusive");
  return config;
}

/// Inverse of parse_config: values carry 17 significant digits so a
/// serialize/parse round trip reproduces the config exactly.
inline std::string serialize_config(const SweepConfig& config) {
  std::ostringstream out;
  out << "protocol.name = " << config.protocol.name << "\n";
  out << "protocol.kappa = " << detail::format_exact(config.protocol.kappa) << "\n";
  if (config.protocol.name == "ion") {
    out << "protocol.lamb_dicke = " << detail::format_exact(config.protocol.lamb_dicke)
        << "\n";
    out << "protocol.nbar = " << detail::format_exact(config.protocol.nbar) << "\n";
    out << "protocol.n_max = " << config.protocol.n_max << "\n";
    out << "protocol.pulse_area = " << detail::format_exact(config.protocol.pulse_area)
        << "\n";
  }
  out << "sweep.theta_c = " << detail::join_numbers(config.theta_c, "%.17g") << "\n";
  if (config.error_axis.kind == ErrorAxis::Kind::epsilon) {
    out << "sweep.epsilon = " << detail::join_numbers(config.error_axis.epsilon, "%.17g")
        << "\n";
  } else {
    out << "sweep.zeta = " << detail::format_exact(config.error_axis.zeta) << "\n";
    out << "sweep.pulse_theta = "
        << detail::join_numbers(config.error_axis.pulse_theta, "%.17g") << "\n";
  }
  if (!config.output_path.empty())
    out << "sweep.output_path = " << config.output_path << "\n";
  out << "sweep.output_format = " << output_format_name(config.format) << "\n";
  out << "sweep.timestamp = " << (config.timestamp ? "true" : "false") << "\n";
  out << "engine.mode = " << engine_mode_name(config.engine) << "\n";
  out << "engine.n_samples = " << config.n_samples << "\n";
  out << "engine.seed = " << config.seed << "\n";
  out << "engine.sigma_mode = " << sigma_mode_name(config.sigma_mode) << "\n";
  out << "engine.coarse_variant = " << coarse_variant_name(config.coarse_variant)
      << "\n";
  return out.str();
}

/// One sweep point's worth of output columns.
struct SweepRow {
  double theta_c = 0.0;
  double beta = 0.0;
  double temperature = 0.0;
  double epsilon = 0.0;
  WorkReport report;
  bool has_mc = false;
  Estimate mc_work;
  std::array<Estimate, 3> mc_sigma;  // cond, uncond, info
  std::array<Estimate, 3> mc_ft;     // cond, uncond, info
};

struct SweepResult {
  SweepConfig config;
  bool protocol_reconstructed = false;
  std::vector<SweepRow> rows;
};

/// Build the protocol instance a config names, on a unit-gap space.
inline FeedbackProtocol build_protocol(const ProtocolConfig& config,
                                       const ThermalContext& ctx) {
  if (config.name == "szilard") return szilard_protocol(StateSpace::two_level(ctx.energy_gap));
  if (config.name == "flip") return state_flip_protocol(StateSpace::two_level(ctx.energy_gap));
  if (config.name == "identity") return identity_protocol(StateSpace::two_level(ctx.energy_gap));
  if (config.name == "ion") {
    IonCompositeModel model;
    model.lamb_dicke = config.lamb_dicke;
    model.nbar = config.nbar;
    model.n_max = config.n_max;
    model.pulse_area = config.pulse_area;
    return ion_composite_protocol(model, ctx);
  }
  throw ConfigError("protocol.name: unknown protocol '" + config.name + "'");
}

/// Evaluate one sweep point. The Monte Carlo stream seed is carved from the
/// root seed by point index, so point results never depend on grid shape
/// upstream of their own index.
inline SweepRow run_point(const SweepConfig& config, double theta_c, double epsilon,
                          std::size_t point_index) {
  SweepRow row;
  row.theta_c = theta_c;
  row.epsilon = epsilon;
  const PrepCalibration calib = beta_from_prep_angle(PulsePrep{theta_c});
  const ThermalContext ctx = make_thermal_context(calib.beta);
  row.beta = ctx.beta;
  row.temperature = ctx.temperature();

  const Distribution p_eq = two_level_equilibrium(ctx.beta, ctx.energy_gap);
  const MeasurementOutcomeTable table = measure(p_eq, epsilon);
  const FeedbackProtocol protocol = build_protocol(config.protocol, ctx);
  const Enumeration en = enumerate_outcomes(protocol, table);
  row.report = ensemble_report(en, ctx, config.protocol.kappa, config.coarse_variant);

  if (config.monte_carlo_enabled()) {
    row.has_mc = true;
    TrajectoryBatch batch =
        sample_trajectories(protocol, table, config.n_samples,
                            mix64(config.seed, point_index), config.sigma_mode);
    batch.sweep_point = "theta_c=" + detail::format_number(theta_c) +
                        ",epsilon=" + detail::format_number(epsilon);
    row.mc_work =
        estimate(batch, [](const TrajectoryRecord& r) { return r.work; });
    const auto sigma_of = [&batch](Sigma which) {
      return estimate(batch, [which](const TrajectoryRecord& r) {
        return r.sigma(which);
      });
    };
    row.mc_sigma = {sigma_of(Sigma::conditional), sigma_of(Sigma::unconditional),
                    sigma_of(Sigma::informational)};
    row.mc_ft = ft_estimate(batch);
  }
  return row;
}

/// Run the whole grid in deterministic order: theta_c outer (as listed),
/// error axis inner.
inline SweepResult run_sweep(const SweepConfig& config) {
  validate_config(config);
  SweepResult result;
  result.config = config;
  const std::vector<double> epsilons = config.error_axis.resolve();
  for (double eps : epsilons)
    if (!(eps >= 0.0 && eps <= 1.0))
      throw ConfigError("error_axis: resolved epsilon " +
                        detail::format_number(eps) + " outside [0, 1]");
  result.rows.reserve(config.theta_c.size() * epsilons.size());
  std::size_t point_index = 0;
  for (double theta : config.theta_c)
    for (double eps : epsilons)
      result.rows.push_back(run_point(config, theta, eps, point_index++));
  if (!result.rows.empty()) {
    const ThermalContext ctx =
        make_thermal_context(beta_from_prep_angle(PulsePrep{config.theta_c[0]}).beta);
    result.protocol_reconstructed = build_protocol(config.protocol, ctx).reconstructed;
  }
  return result;
}

inline std::vector<std::string> column_names(bool with_mc) {
  std::vector<std::string> names{
      "theta_c",        "beta",
      "temperature",    "epsilon",
      "w_out",          "w_ext",
      "delta_f",        "delta_f_coarse",
      "mean_sigma_cond", "mean_sigma_uncond",
      "mean_sigma_info", "ft_cond",
      "ft_uncond",      "ft_info",
      "support_deficit_cond", "support_deficit_info",
      "eta_out",        "eta_ext",
      "eta_max",        "coarse_violated",
      "coarse_margin"};
  if (with_mc) {
    for (const char* base :
         {"w_out", "mean_sigma_cond", "mean_sigma_uncond", "mean_sigma_info",
          "ft_cond", "ft_uncond", "ft_info"}) {
      names.push_back(std::string(base) + "_mc");
      names.push_back(std::string(base) + "_stderr");
    }
  }
  return names;
}

/// Row cells in column order, ready for either writer. NaN marks an
/// undefined cell (rendered empty in CSV, null in JSON).
inline std::vector<double> row_values(const SweepRow& row, bool with_mc) {
  const WorkReport& r = row.report;
  std::vector<double> v{row.theta_c,
                        row.beta,
                        row.temperature,
                        row.epsilon,
                        r.w_out,
                        r.w_ext,
                        r.delta_f,
                        r.delta_f_coarse,
                        r.mean_sigma_cond,
                        r.mean_sigma_uncond,
                        r.mean_sigma_info,
                        r.ft_cond.value,
                        r.ft_uncond.value,
                        r.ft_info.value,
                        r.ft_cond.support_deficit,
                        r.ft_info.support_deficit,
                        r.eff.eta_out,
                        r.eff.eta_ext,
                        r.eff.eta_max,
                        r.coarse.violated ? 1.0 : 0.0,
                        r.coarse.margin};
  if (with_mc) {
    const auto push = [&v](const Estimate& e) {
      v.push_back(e.mean);
      v.push_back(e.stderr_of_mean);
    };
    push(row.mc_work);
    for (const auto& e : row.mc_sigma) push(e);
    for (const auto& e : row.mc_ft) push(e);
  }
  return v;
}

namespace detail {

inline std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::vector<std::pair<std::string, std::string>> metadata_entries(
    const SweepResult& result) {
  const SweepConfig& c = result.config;
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("tool", "demonsim sweep");
  if (c.timestamp) meta.emplace_back("generated", utc_timestamp());
  meta.emplace_back("protocol", c.protocol.name);
  meta.emplace_back("kappa", format_number(c.protocol.kappa));
  if (c.protocol.name == "ion")
    meta.emplace_back("ion_params",
                      "lamb_dicke=" + format_number(c.protocol.lamb_dicke) +
                          ";nbar=" + format_number(c.protocol.nbar) +
                          ";n_max=" + std::to_string(c.protocol.n_max) +
                          ";pulse_area=" + format_number(c.protocol.pulse_area));
  meta.emplace_back("protocol_reconstructed",
                    result.protocol_reconstructed ? "1" : "0");
  meta.emplace_back("conventions",
                    "work w = E(x0) - E(xc); heat Q = E(xt) - E(xc); entropies in "
                    "nats; k_B = 1; energies in units of the gap E; record 1 "
                    "reads up");
  meta.emplace_back("error_axis",
                    c.error_axis.kind == ErrorAxis::Kind::epsilon
                        ? std::string("epsilon")
                        : "pulse;zeta=" + format_number(c.error_axis.zeta));
  meta.emplace_back("engine", engine_mode_name(c.engine));
  if (c.monte_carlo_enabled()) {
    meta.emplace_back("n_samples", std::to_string(c.n_samples));
    meta.emplace_back("seed", std::to_string(c.seed));
    meta.emplace_back("sigma_mode", sigma_mode_name(c.sigma_mode));
  }
  meta.emplace_back("coarse_variant", coarse_variant_name(c.coarse_variant));
  return meta;
}

}  // namespace detail

inline void write_csv(const SweepResult& result, std::ostream& out) {
  const bool with_mc = result.config.monte_carlo_enabled();
  for (const auto& [key, value] : detail::metadata_entries(result))
    out << "# " << key << ": " << value << "\n";
  const auto names = column_names(with_mc);
  for (std::size_t i = 0; i < names.size(); ++i)
    out << (i ? "," : "") << names[i];
  out << "\n";
  for (const auto& row : result.rows) {
    const auto values = row_values(row, with_mc);
    for (std::size_t i = 0; i < values.size(); ++i)
      out << (i ? "," : "") << detail::format_number(values[i]);
    out << "\n";
  }
}

/// JSON mirror of the CSV: {"metadata": {...}, "rows": [{column: value}]}
/// with undefined cells as null and infinities as the strings "inf"/"-inf".
inline nlohmann::ordered_json sweep_json(const SweepResult& result) {
  const bool with_mc = result.config.monte_carlo_enabled();
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : detail::metadata_entries(result))
    meta[key] = value;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  const auto names = column_names(with_mc);
  for (const auto& row : result.rows) {
    const auto values = row_values(row, with_mc);
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < names.size(); ++i) {
      const double v = values[i];
      if (std::isnan(v)) obj[names[i]] = nullptr;
      else if (std::isinf(v)) obj[names[i]] = v > 0.0 ? "inf" : "-inf";
      else obj[names[i]] = v;
    }
    rows.push_back(std::move(obj));
  }
  return nlohmann::ordered_json{{"metadata", std::move(meta)}, {"rows", std::move(rows)}};
}

inline void write_json(const SweepResult& result, std::ostream& out) {
  out << sweep_json(result).dump(2) << "\n";
}

inline void write_output(const SweepResult& result, std::ostream& out) {
  if (result.config.format == OutputFormat::csv) write_csv(result, out);
  else write_json(result, out);
}

}  // namespace demonsim
