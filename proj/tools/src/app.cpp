#include "musiclite_cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "musiclite/adder_spec.hpp"
#include "musiclite/characterize.hpp"
#include "musiclite/cost_model.hpp"
#include "musiclite/dse.hpp"
#include "musiclite/errors.hpp"
#include "musiclite/gk_svd.hpp"
#include "musiclite/pipeline.hpp"
#include "musiclite_cli/config.hpp"

namespace musiclite::cli {

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::vector<std::string> adders;
  std::optional<std::string> output;

  // characterize
  bool exhaustive = false;
  std::optional<std::uint64_t> sampled;

  // simulate / sweep / dse
  bool no_noise = false;
  std::vector<double> snr;
  std::optional<int> runs;
  std::optional<std::string> spectrum;
  std::string constraints;

  // checks
  int trials = 0;
  int size = 4;
};

CliConfig load(const Options& o) {
  CliConfig c = o.config_path.empty() ? CliConfig{} : load_config(o.config_path);
  if (!o.adders.empty()) {
    c.adders = o.adders;
  }
  c.sweep.adders = c.adders;
  if (o.seed) c.sweep.seed = *o.seed;
  if (o.output) c.output.dir = *o.output;
  if (o.spectrum) c.output.spectrum = *o.spectrum;
  if (o.runs) c.sweep.runs = *o.runs;
  c.sweep.validate();
  return c;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

AdderModel adder_for(const CliConfig& c) {
  AdderModel adder = parse_adder_spec(c.adders.front());
  if (adder.width() != c.scenario.format.width) {
    throw ConfigError(fmt::format("adder {} is {} bits wide but the datapath is {} bits",
                                  c.adders.front(), adder.width(), c.scenario.format.width));
  }
  return adder;
}

int cmd_characterize(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.exhaustive == o.sampled.has_value()) {
    throw ConfigError("characterize needs exactly one of --exhaustive or --sampled N");
  }
  const CliConfig c = load(o);
  const AdderModel adder = parse_adder_spec(c.adders.front());
  CharacterizeMode mode = Exhaustive{};
  if (o.sampled) {
    mode = Sampled{*o.sampled, c.sweep.seed};
  }
  const ErrorMetrics m = characterize(adder, mode);
  const std::string csv = std::string(kCharacterizeCsvHeader) + "\n" + characterize_csv_row(adder, m) + "\n";
  if (o.output) {
    write_file(*o.output, csv);
  } else {
    out << csv;
  }
  fmt::print(err, "{}: {} {} samples, ER {:.4g}, MAE {:.4g}, WCE {}, MRE {:.4g}, NED {:.4g}\n",
             adder.name(), m.exhaustive ? "exhaustive" : "sampled", m.sample_count, m.error_rate,
             m.mean_absolute_error, m.worst_case_error, m.mean_relative_error,
             m.normalized_error_distance);
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  CliConfig c = load(o);
  if (o.no_noise) {
    c.scenario.scene.snr_db.reset();
  } else if (!o.snr.empty()) {
    c.scenario.scene.snr_db = o.snr.front();
  }
  c.scenario.validate();
  const AdderModel adder = adder_for(c);
  const RngSpec rng{c.sweep.seed, 0};
  const RunResult r = run_pipeline(c.scenario, adder, rng, c.output.spectrum.has_value());

  fmt::print(out, "adder={}\n", adder.name());
  fmt::print(out, "snr_db={}\n", c.scenario.scene.snr_db ? fmt::format("{}", *c.scenario.scene.snr_db) : "none");
  fmt::print(out, "seed={}\n", c.sweep.seed);
  fmt::print(out, "true_range_m={}\n", c.scenario.scene.target_range_m);
  fmt::print(out, "converged={}\n", r.converged);
  if (r.converged) {
    fmt::print(out, "estimated_range_m={:.6f}\n", r.estimated_range_m);
    fmt::print(out, "abs_error_pct={:.6f}\n", r.abs_error_pct);
  }
  fmt::print(out, "sweeps={}\n", r.sweeps);
  if (r.delay_exceeds_cp) {
    fmt::print(err, "warning: round-trip delay exceeds the cyclic prefix\n");
  }
  if (r.peak_shortfall) {
    fmt::print(err, "warning: fewer pseudospectrum peaks than targets\n");
  }
  if (!r.converged) {
    fmt::print(err, "error: {}\n", r.diagnostic);
    return kExitRuntime;
  }
  if (c.output.spectrum && r.spectrum) {
    std::string csv = "range_m,p_mu\n";
    for (std::size_t i = 0; i < r.spectrum->grid_m.size(); ++i) {
      csv += fmt::format("{},{}\n", r.spectrum->grid_m[i], r.spectrum->p_mu[i]);
    }
    write_file(*c.output.spectrum, csv);
  }
  return kExitOk;
}

void print_points(const std::vector<DsePoint>& points, std::ostream& out) {
  fmt::print(out, "{:<24} {:>12} {:>10} {:>10} {:>9} {:>9}\n", "adder", "error_pct", "area",
             "power", "converged", "pareto");
  for (const DsePoint& p : points) {
    fmt::print(out, "{:<24} {:>12.5f} {:>10.1f} {:>10.1f} {:>9.3f} {:>9}\n", p.adder,
               p.mean_error_pct, p.area_proxy, p.power_proxy, p.converged_fraction,
               p.dominated ? "" : "yes");
  }
}

int sweep_and_report(const Options& o, bool constrained, std::ostream& out, std::ostream& err) {
  CliConfig c = load(o);
  if (!o.snr.empty()) {
    c.sweep.snr_db = o.snr;
  }
  if (o.no_noise) {
    throw ConfigError("--no-noise applies to simulate only");
  }
  c.sweep.validate();
  c.scenario.validate();
  std::optional<QualityConstraints> qc;
  if (constrained && !o.constraints.empty()) {
    qc = QualityConstraints::parse(o.constraints);
  }
  for (const std::string& spec : c.sweep.adders) {
    if (parse_adder_spec(spec).width() != c.scenario.format.width) {
      throw ConfigError(fmt::format("adder {} does not match the {}-bit datapath", spec,
                                    c.scenario.format.width));
    }
  }

  const SweepResult result = run_sweep(c.sweep, c.scenario, o.jobs);
  std::vector<DsePoint> points = build_points(result, c.sweep.adders);
  pareto_filter(points);
  std::vector<DsePoint> reported = qc ? apply_constraints(points, *qc) : points;
  emit_report(result, reported, c.output.dir);

  print_points(points, out);
  if (qc) {
    fmt::print(out, "{} of {} adders meet the constraints\n", reported.size(), points.size());
    fmt::print(out,
               "note: savings are unit-gate proxy estimates; thresholds taken from synthesized "
               "designs are illustrative only\n");
  }
  fmt::print(err, "wrote {}/runs.csv, aggregates.csv, dse.csv\n", c.output.dir.string());

  const bool any_converged = std::any_of(result.rows.begin(), result.rows.end(),
                                         [](const RunRow& r) { return r.converged; });
  if (!result.rows.empty() && !any_converged) {
    fmt::print(err, "error: no run converged\n");
    return kExitRuntime;
  }
  return kExitOk;
}

// Worst component error of CORDIC rotations against the exact rotation, for
// random vectors of magnitude <= 1 and angles inside the convergence range.
int cmd_cordic_check(const Options& o, std::ostream& out) {
  const CliConfig c = load(o);
  const AdderModel adder = adder_for(c);
  const CordicConfig cordic(c.scenario.format, adder, c.scenario.cordic_iterations, c.scenario.rounding);
  const FixedFormat& f = cordic.format();
  const int iters = cordic.iterations();
  const double bound = std::ldexp(1.0, -(iters - 1)) + iters * std::ldexp(1.0, -f.frac + 1);
  const double limit = f.to_double(cordic.angle_limit_raw());

  std::mt19937_64 rng(RngSpec{c.sweep.seed, 0xC0D1C}.derived_seed());
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int trials = o.trials > 0 ? o.trials : 10000;
  double worst = 0.0;
  int violations = 0;
  for (int t = 0; t < trials; ++t) {
    double x = unit(rng);
    double y = unit(rng);
    const double mag = std::hypot(x, y);
    if (mag > 1.0) {
      x /= mag;
      y /= mag;
    }
    const std::int64_t theta = f.quantize(unit(rng) * limit);
    const std::int64_t xr = f.quantize(x);
    const std::int64_t yr = f.quantize(y);
    const RotationRaw r = cordic.rotate_raw(xr, yr, theta);
    const double th = f.to_double(theta);
    const double xq = f.to_double(xr);
    const double yq = f.to_double(yr);
    const double ex = xq * std::cos(th) - yq * std::sin(th);
    const double ey = xq * std::sin(th) + yq * std::cos(th);
    const double e = std::max(std::abs(f.to_double(r.x) - ex), std::abs(f.to_double(r.y) - ey));
    worst = std::max(worst, e);
    violations += e > bound ? 1 : 0;
  }
  fmt::print(out, "adder={} format=Q{}.{} iterations={} trials={}\n", adder.name(),
             f.width - f.frac - 1, f.frac, iters, trials);
  fmt::print(out, "max_error={:.6g} bound={:.6g} violations={}\n", worst, bound, violations);
  return violations == 0 ? kExitOk : kExitRuntime;
}

// Random complex Gaussian matrices: reconstruction and unitarity residuals.
int cmd_svd_check(const Options& o, std::ostream& out) {
  const CliConfig c = load(o);
  const AdderModel adder = adder_for(c);
  const CordicConfig cordic(c.scenario.format, adder, c.scenario.cordic_iterations, c.scenario.rounding);
  if (o.size < 1 || o.size > 64) {
    throw ConfigError("--size must be in [1, 64]");
  }
  const int n = o.size;
  const int trials = o.trials > 0 ? o.trials : 100;
  std::mt19937_64 rng(RngSpec{c.sweep.seed, 0x5FD}.derived_seed());
  std::normal_distribution<double> normal;
  double worst_recon = 0.0;
  double worst_unitarity = 0.0;
  int max_sweeps = 0;
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    CMatrix a(n, n);
    for (int r = 0; r < n; ++r) {
      for (int k = 0; k < n; ++k) {
        a(r, k) = {normal(rng), normal(rng)};
      }
    }
    try {
      const SvdResult s = svd(FixedMatrix::from_complex(a, cordic.format()), cordic, c.scenario.svd);
      worst_recon = std::max(worst_recon, max_abs_diff(s.reconstruct(), a) / a.frobenius_norm());
      worst_unitarity = std::max({worst_unitarity, unitarity_residual(s.u.to_complex_unscaled()),
                                  unitarity_residual(s.v.to_complex_unscaled())});
      max_sweeps = std::max(max_sweeps, s.sweeps);
    } catch (const NonConvergence&) {
      ++failures;
    }
  }
  fmt::print(out, "adder={} size={} trials={} non_converged={}\n", adder.name(), n, trials, failures);
  fmt::print(out, "max_relative_reconstruction_error={:.6g} max_unitarity_residual={:.6g} max_sweeps={}\n",
             worst_recon, worst_unitarity, max_sweeps);
  return failures == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate-adder MUSIC range estimation: characterization, simulation, sweeps, DSE",
               "music_lite"};
  app.set_version_flag("--version", std::string("music_lite ") + MUSICLITE_VERSION);
  app.require_subcommand(1);
  Options o;
  if (const char* env = std::getenv("MUSIC_LITE_JOBS")) {
    try {
      o.jobs = std::stoi(env);
    } catch (const std::exception&) {
      fmt::print(err, "error: MUSIC_LITE_JOBS must be an integer\n");
      return kExitConfig;
    }
  }
  app.option_defaults()->always_capture_default();
  app.add_option("--config", o.config_path, "JSON configuration file");
  app.add_option("--seed", o.seed, "base seed (overrides the config)");
  app.add_option("--jobs", o.jobs, "sweep worker threads (default $MUSIC_LITE_JOBS or 1)")
      ->check(CLI::Range(1, 1024));
  app.add_option("--adder", o.adders, "adder spec, e.g. exact:16, acla:16:4 (repeatable)");
  app.add_option("--output", o.output, "output directory (sweep, dse) or CSV file (characterize)");
  app.fallthrough();

  auto* characterize_cmd = app.add_subcommand("characterize", "error metrics of one adder");
  characterize_cmd->add_flag("--exhaustive", o.exhaustive, "all input pairs");
  characterize_cmd->add_option("--sampled", o.sampled, "number of random input pairs");

  auto* simulate_cmd = app.add_subcommand("simulate", "one end-to-end pipeline run");
  simulate_cmd->add_flag("--no-noise", o.no_noise, "noiseless channel");
  simulate_cmd->add_option("--snr", o.snr, "SNR in dB")->expected(1);
  simulate_cmd->add_option("--spectrum", o.spectrum, "write the pseudospectrum as CSV");

  auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo sweep over adders and SNR");
  auto* dse_cmd = app.add_subcommand("dse", "sweep plus Pareto flags and constraint filtering");
  for (auto* cmd : {sweep_cmd, dse_cmd}) {
    cmd->add_option("--snr", o.snr, "SNR list in dB");
    cmd->add_option("--runs", o.runs, "runs per (adder, SNR)");
  }
  dse_cmd->add_option("--constraints", o.constraints,
                      "e.g. max_error_pct=1.0,min_area_saving_pct=5,min_power_saving_pct=5");

  auto* cordic_cmd = app.add_subcommand("cordic-check", "CORDIC rotation error against its bound");
  cordic_cmd->add_option("--trials", o.trials, "random rotations (default 10000)");
  auto* svd_cmd = app.add_subcommand("svd-check", "fixed-point SVD on random matrices");
  svd_cmd->add_option("--trials", o.trials, "random matrices (default 100)");
  svd_cmd->add_option("--size", o.size, "matrix dimension");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (characterize_cmd->parsed()) return cmd_characterize(o, out, err);
    if (simulate_cmd->parsed()) return cmd_simulate(o, out, err);
    if (sweep_cmd->parsed()) return sweep_and_report(o, false, out, err);
    if (dse_cmd->parsed()) return sweep_and_report(o, true, out, err);
    if (cordic_cmd->parsed()) return cmd_cordic_check(o, out);
    if (svd_cmd->parsed()) return cmd_svd_check(o, out);
  } catch (const ConfigError& e) {
    fmt::print(err, "configuration error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace musiclite::cli
