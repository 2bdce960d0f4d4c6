// demonsim: sweep and single-point front end for the feedback-control
// thermodynamics engines. Exit codes: 0 success, 2 bad configuration,
// 3 runtime failure.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "demonsim/demonsim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw demonsim::ConfigError("config: cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string fmt(double v) { return demonsim::detail::format_number(v); }

// Shared flag bundle for the single-point subcommands.
struct PointOptions {
  std::string protocol = "szilard";
  double kappa = 1.0;
  double lamb_dicke = 0.11;
  double nbar = 0.14;
  int n_max = 30;
  double pulse_area = M_PI;
  double theta_c = M_PI / 3.0;
  double epsilon = 0.2;
  double zeta = 1.94;
  double pulse_theta = 0.0;
  std::string coarse_variant = "cycle-improper";
};

void add_point_options(CLI::App* cmd, PointOptions& opt) {
  cmd->add_option("--protocol", opt.protocol, "szilard | flip | ion | identity")
      ->capture_default_str();
  cmd->add_option("--kappa", opt.kappa, "battery storage efficiency")
      ->capture_default_str();
  cmd->add_option("--lamb-dicke", opt.lamb_dicke, "ion coupling scale")
      ->capture_default_str();
  cmd->add_option("--nbar", opt.nbar, "ion initial mean phonon number")
      ->capture_default_str();
  cmd->add_option("--n-max", opt.n_max, "ion Fock truncation")->capture_default_str();
  cmd->add_option("--pulse-area", opt.pulse_area, "ion sideband pulse area")
      ->capture_default_str();
  cmd->add_option("--theta-c", opt.theta_c, "preparation angle, radians")
      ->capture_default_str();
  cmd->add_option("--epsilon", opt.epsilon, "measurement error probability")
      ->capture_default_str();
  cmd->add_option("--zeta", opt.zeta, "depumping decay parameter")
      ->capture_default_str();
  cmd->add_option("--pulse-theta", opt.pulse_theta,
                  "depumping pulse angle; sets epsilon = 1 - exp(-zeta theta)");
  cmd->add_option("--coarse-variant", opt.coarse_variant,
                  "marginal | cycle-improper | partial-average")
      ->capture_default_str();
}

// Resolve the point flags into a validated single-point SweepConfig.
demonsim::SweepConfig point_config(const CLI::App* cmd, const PointOptions& opt,
                                   demonsim::EngineMode engine, std::size_t n_samples,
                                   std::uint64_t seed, demonsim::SigmaMode sigma_mode) {
  if (cmd->count("--epsilon") && cmd->count("--pulse-theta"))
    throw demonsim::ConfigError(
        "error_axis: --epsilon and --pulse-theta are mutually exclusive");
  demonsim::SweepConfig config;
  config.protocol.name = opt.protocol;
  config.protocol.kappa = opt.kappa;
  config.protocol.lamb_dicke = opt.lamb_dicke;
  config.protocol.nbar = opt.nbar;
  config.protocol.n_max = opt.n_max;
  config.protocol.pulse_area = opt.pulse_area;
  config.theta_c = {opt.theta_c};
  if (cmd->count("--pulse-theta")) {
    config.error_axis.kind = demonsim::ErrorAxis::Kind::pulse;
    config.error_axis.zeta = opt.zeta;
    config.error_axis.pulse_theta = {opt.pulse_theta};
  } else {
    config.error_axis.kind = demonsim::ErrorAxis::Kind::epsilon;
    config.error_axis.epsilon = {opt.epsilon};
  }
  config.engine = engine;
  config.n_samples = n_samples;
  config.seed = seed;
  config.sigma_mode = sigma_mode;
  config.coarse_variant =
      demonsim::parse_coarse_variant("coarse_variant", opt.coarse_variant);
  demonsim::validate_config(config);
  return config;
}

std::uint64_t env_seed_or(std::uint64_t fallback) {
  if (const char* env = std::getenv("DEMONSIM_SEED"))
    return demonsim::detail::parse_uint("DEMONSIM_SEED", env);
  return fallback;
}

void run_sweep_command(const CLI::App* cmd, const std::string& config_path,
                       const PointOptions& proto, const std::string& theta_grid,
                       const std::string& epsilon_grid, const std::string& pulse_grid,
                       const std::string& engine, std::size_t n_samples,
                       std::uint64_t seed, const std::string& sigma_mode,
                       const std::string& output, const std::string& format,
                       bool no_timestamp) {
  demonsim::SweepConfig config;
  config.seed = env_seed_or(config.seed);
  if (cmd->count("--config"))
    config = demonsim::parse_config(read_file(config_path), config);

  if (cmd->count("--protocol")) config.protocol.name = proto.protocol;
  if (cmd->count("--kappa")) config.protocol.kappa = proto.kappa;
  if (cmd->count("--lamb-dicke")) config.protocol.lamb_dicke = proto.lamb_dicke;
  if (cmd->count("--nbar")) config.protocol.nbar = proto.nbar;
  if (cmd->count("--n-max")) config.protocol.n_max = proto.n_max;
  if (cmd->count("--pulse-area")) config.protocol.pulse_area = proto.pulse_area;
  if (cmd->count("--theta-c")) config.theta_c = demonsim::parse_grid("theta_c", theta_grid);
  if (cmd->count("--epsilon") && cmd->count("--pulse-theta"))
    throw demonsim::ConfigError(
        "error_axis: --epsilon and --pulse-theta are mutually exclusive");
  if (cmd->count("--epsilon")) {
    config.error_axis.kind = demonsim::ErrorAxis::Kind::epsilon;
    config.error_axis.epsilon = demonsim::parse_grid("error_axis", epsilon_grid);
  }
  if (cmd->count("--zeta")) config.error_axis.zeta = proto.zeta;
  if (cmd->count("--pulse-theta")) {
    config.error_axis.kind = demonsim::ErrorAxis::Kind::pulse;
    config.error_axis.pulse_theta = demonsim::parse_grid("error_axis", pulse_grid);
  }
  if (cmd->count("--engine")) config.engine = demonsim::parse_engine_mode("engine.mode", engine);
  if (cmd->count("--n-samples")) config.n_samples = n_samples;
  if (cmd->count("--seed")) config.seed = seed;
  if (cmd->count("--sigma-mode"))
    config.sigma_mode = demonsim::parse_sigma_mode("engine.sigma_mode", sigma_mode);
  if (cmd->count("--coarse-variant"))
    config.coarse_variant =
        demonsim::parse_coarse_variant("engine.coarse_variant", proto.coarse_variant);
  if (cmd->count("--output")) config.output_path = output;
  if (cmd->count("--format")) config.format = demonsim::parse_output_format("sweep.output_format", format);
  if (no_timestamp) config.timestamp = false;

  const demonsim::SweepResult result = demonsim::run_sweep(config);
  if (config.output_path.empty()) {
    demonsim::write_output(result, std::cout);
  } else {
    std::ofstream out(config.output_path);
    if (!out)
      throw demonsim::Error("output: cannot write '" + config.output_path + "'");
    demonsim::write_output(result, out);
  }
}

void run_verify_ft(const CLI::App* cmd, const PointOptions& opt) {
  const auto config = point_config(cmd, opt, demonsim::EngineMode::exact, 1, 0,
                                   demonsim::SigmaMode::model);
  const double epsilon = config.error_axis.resolve()[0];
  const auto calib = demonsim::beta_from_prep_angle(demonsim::PulsePrep{config.theta_c[0]});
  const auto ctx = demonsim::make_thermal_context(calib.beta);
  const auto p_eq = demonsim::two_level_equilibrium(ctx.beta, ctx.energy_gap);
  const auto table = demonsim::measure(p_eq, epsilon);
  const auto protocol = demonsim::build_protocol(config.protocol, ctx);
  const auto en = demonsim::enumerate_outcomes(protocol, table);
  std::cout << "protocol: " << protocol.name << "  theta_c: " << fmt(config.theta_c[0])
            << "  epsilon: " << fmt(epsilon) << "\n";
  for (auto which : {demonsim::Sigma::conditional, demonsim::Sigma::unconditional,
                     demonsim::Sigma::informational}) {
    const auto ft = demonsim::ft_exponential_average(en, which);
    std::cout << demonsim::sigma_name(which) << ": exp_average = " << fmt(ft.value)
              << "  support_deficit = " << fmt(ft.support_deficit)
              << "  sum = " << fmt(ft.value + ft.support_deficit) << "\n";
  }
}

void run_report(const CLI::App* cmd, const PointOptions& opt) {
  const auto config = point_config(cmd, opt, demonsim::EngineMode::exact, 1, 0,
                                   demonsim::SigmaMode::model);
  const double epsilon = config.error_axis.resolve()[0];
  const auto row = demonsim::run_point(config, config.theta_c[0], epsilon, 0);
  const auto& r = row.report;
  std::cout << "protocol: " << config.protocol.name
            << "  theta_c: " << fmt(row.theta_c) << "  epsilon: " << fmt(row.epsilon)
            << "\n";
  std::cout << "beta = " << fmt(row.beta) << "\n";
  std::cout << "temperature = " << fmt(row.temperature) << "\n";
  std::cout << "w_out = " << fmt(r.w_out) << "\n";
  std::cout << "w_ext = " << fmt(r.w_ext) << "  (kappa = " << fmt(r.kappa) << ")\n";
  std::cout << "delta_f = " << fmt(r.delta_f) << "\n";
  std::cout << "delta_f_marginal = " << fmt(r.delta_f_marginal) << "\n";
  std::cout << "mean_sigma_cond = " << fmt(r.mean_sigma_cond) << "\n";
  std::cout << "mean_sigma_uncond = " << fmt(r.mean_sigma_uncond) << "\n";
  std::cout << "mean_sigma_info = " << fmt(r.mean_sigma_info) << "\n";
  std::cout << "mean_heat = " << fmt(r.mean_heat) << "\n";
  std::cout << "ft_cond = " << fmt(r.ft_cond.value)
            << "  deficit = " << fmt(r.ft_cond.support_deficit) << "\n";
  std::cout << "ft_uncond = " << fmt(r.ft_uncond.value)
            << "  deficit = " << fmt(r.ft_uncond.support_deficit) << "\n";
  std::cout << "ft_info = " << fmt(r.ft_info.value)
            << "  deficit = " << fmt(r.ft_info.support_deficit) << "\n";
  std::cout << "eta_out = " << fmt(r.eff.eta_out) << "\n";
  std::cout << "eta_ext = " << fmt(r.eff.eta_ext) << "\n";
  std::cout << "eta_max = " << fmt(r.eff.eta_max) << "\n";
  std::cout << "coarse_variant = " << demonsim::coarse_variant_name(r.coarse.variant)
            << "\n";
  std::cout << "coarse_margin = " << fmt(r.coarse.margin) << "\n";
  std::cout << "coarse_violated = " << (r.coarse.violated ? 1 : 0) << "\n";
}

void run_sample(const CLI::App* cmd, const PointOptions& opt, std::size_t n,
                std::uint64_t seed, const std::string& sigma_mode,
                const std::string& output) {
  const auto mode = demonsim::parse_sigma_mode("engine.sigma_mode", sigma_mode);
  // Flag beats environment beats the built-in default.
  const std::uint64_t resolved_seed = cmd->count("--seed") ? seed : env_seed_or(seed);
  const auto config = point_config(cmd, opt, demonsim::EngineMode::montecarlo, n,
                                   resolved_seed, mode);
  const double epsilon = config.error_axis.resolve()[0];
  const auto calib = demonsim::beta_from_prep_angle(demonsim::PulsePrep{config.theta_c[0]});
  const auto ctx = demonsim::make_thermal_context(calib.beta);
  const auto p_eq = demonsim::two_level_equilibrium(ctx.beta, ctx.energy_gap);
  const auto table = demonsim::measure(p_eq, epsilon);
  const auto protocol = demonsim::build_protocol(config.protocol, ctx);
  auto batch = demonsim::sample_trajectories(protocol, table, config.n_samples,
                                             config.seed, mode);
  batch.sweep_point = "theta_c=" + fmt(config.theta_c[0]) + ",epsilon=" + fmt(epsilon);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) throw demonsim::Error("output: cannot write '" + output + "'");
    out = &file;
  }
  *out << "# protocol: " << batch.protocol_id << "\n";
  *out << "# point: " << batch.sweep_point << "\n";
  *out << "# n: " << batch.n() << "  seed: " << batch.seed
       << "  sigma_mode: " << demonsim::sigma_mode_name(batch.sigma_mode) << "\n";
  *out << "index,x0,y,xc,xt,work,heat,sigma_cond,sigma_uncond,sigma_info\n";
  const auto& labels = protocol.space.labels;
  static const char* kSystemLabels[2] = {"dn", "up"};
  for (std::size_t i = 0; i < batch.n(); ++i) {
    const auto& rec = batch.records[i];
    *out << i << ',' << labels[rec.x0] << ',' << rec.y << ',' << labels[rec.xc] << ','
         << kSystemLabels[rec.xt] << ',' << fmt(rec.work) << ',' << fmt(rec.heat)
         << ',' << fmt(rec.sigma_cond) << ',' << fmt(rec.sigma_uncond) << ','
         << fmt(rec.sigma_info) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "demonsim: measurement-feedback ('demon') thermodynamics on finite state "
      "spaces.\nExact enumeration and seeded Monte Carlo engines for entropy "
      "production, fluctuation-theorem checks, work bounds, and demon "
      "efficacies."};
  app.require_subcommand(1);

  // --- sweep ---
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Run a (theta_c x error) grid and emit CSV or JSON rows");
  std::string config_path;
  PointOptions sweep_proto;
  std::string theta_grid = "1.5707963267948966,1.0471975511965976,0.5235987755982988";
  std::string epsilon_grid = "0:1:0.05";
  std::string pulse_grid;
  std::string engine = "exact";
  std::size_t n_samples = 100000;
  std::uint64_t seed = 42;
  std::string sigma_mode = "model";
  std::string output;
  std::string format = "csv";
  bool no_timestamp = false;
  sweep_cmd->add_option("--config", config_path,
                        "flat key = value config file (flags override it)");
  sweep_cmd->add_option("--protocol", sweep_proto.protocol,
                        "szilard | flip | ion | identity")
      ->capture_default_str();
  sweep_cmd->add_option("--kappa", sweep_proto.kappa, "battery storage efficiency")
      ->capture_default_str();
  sweep_cmd->add_option("--lamb-dicke", sweep_proto.lamb_dicke, "ion coupling scale")
      ->capture_default_str();
  sweep_cmd->add_option("--nbar", sweep_proto.nbar, "ion initial mean phonon number")
      ->capture_default_str();
  sweep_cmd->add_option("--n-max", sweep_proto.n_max, "ion Fock truncation")
      ->capture_default_str();
  sweep_cmd->add_option("--pulse-area", sweep_proto.pulse_area,
                        "ion sideband pulse area")
      ->capture_default_str();
  sweep_cmd->add_option("--theta-c", theta_grid,
                        "preparation angle grid: a:b:step or comma list")
      ->capture_default_str();
  sweep_cmd->add_option("--epsilon", epsilon_grid,
                        "measurement error grid: a:b:step or comma list")
      ->capture_default_str();
  sweep_cmd->add_option("--zeta", sweep_proto.zeta, "depumping decay parameter")
      ->capture_default_str();
  sweep_cmd->add_option("--pulse-theta", pulse_grid,
                        "depumping pulse angle grid; maps to epsilon = 1 - "
                        "exp(-zeta theta); excludes --epsilon");
  sweep_cmd->add_option("--engine", engine, "exact | montecarlo | both")
      ->capture_default_str();
  sweep_cmd->add_option("--n-samples", n_samples, "Monte Carlo trajectories per point")
      ->capture_default_str();
  sweep_cmd->add_option("--seed", seed,
                        "root seed (default 42, or DEMONSIM_SEED if set)");
  sweep_cmd->add_option("--sigma-mode", sigma_mode, "model | empirical")
      ->capture_default_str();
  sweep_cmd->add_option("--coarse-variant", sweep_proto.coarse_variant,
                        "marginal | cycle-improper | partial-average")
      ->capture_default_str();
  sweep_cmd->add_option("--output", output, "output path (default stdout)");
  sweep_cmd->add_option("--format", format, "csv | json")->capture_default_str();
  sweep_cmd->add_flag("--no-timestamp", no_timestamp,
                      "suppress the generated-at header for byte-identical reruns");

  // --- verify-ft ---
  auto* verify_cmd = app.add_subcommand(
      "verify-ft",
      "Exact exponential averages <e^-sigma> and support deficits at one point");
  PointOptions verify_opt;
  add_point_options(verify_cmd, verify_opt);

  // --- report ---
  auto* report_cmd = app.add_subcommand(
      "report", "Full work/information budget of one sweep point (exact engine)");
  PointOptions report_opt;
  add_point_options(report_cmd, report_opt);

  // --- sample ---
  auto* sample_cmd =
      app.add_subcommand("sample", "Draw a trajectory batch and dump it as CSV");
  PointOptions sample_opt;
  add_point_options(sample_cmd, sample_opt);
  std::size_t sample_n = 10;
  std::uint64_t sample_seed = 42;
  std::string sample_sigma_mode = "model";
  std::string sample_output;
  sample_cmd->add_option("--n", sample_n, "number of trajectories")
      ->capture_default_str();
  sample_cmd->add_option("--seed", sample_seed,
                         "root seed (default 42, or DEMONSIM_SEED if set)");
  sample_cmd->add_option("--sigma-mode", sample_sigma_mode, "model | empirical")
      ->capture_default_str();
  sample_cmd->add_option("--output", sample_output, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sweep_cmd->parsed()) {
      run_sweep_command(sweep_cmd, config_path, sweep_proto, theta_grid, epsilon_grid,
                        pulse_grid, engine, n_samples, seed, sigma_mode, output,
                        format, no_timestamp);
    } else if (verify_cmd->parsed()) {
      run_verify_ft(verify_cmd, verify_opt);
    } else if (report_cmd->parsed()) {
      run_report(report_cmd, report_opt);
    } else if (sample_cmd->parsed()) {
      run_sample(sample_cmd, sample_opt, sample_n, sample_seed, sample_sigma_mode,
                 sample_output);
    }
  } catch (const demonsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
