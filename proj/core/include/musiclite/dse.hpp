#pragma once

// Monte-Carlo sweeps over adders x SNR, accuracy aggregation, proxy-cost join,
// Pareto flags and constraint filtering.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "musiclite/adders.hpp"
#include "musiclite/pipeline.hpp"

namespace musiclite {

struct SweepPlan {
  std::vector<std::string> adders;  // adder specs, see adder_spec.hpp
  std::vector<double> snr_db{-5.0, 0.0, 5.0, 10.0, 15.0};
  int runs = 100;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

struct RunRow {
  std::string adder;
  double snr_db = 0.0;
  int run = 0;
  std::uint64_t seed = 0;
  double estimated_range_m = 0.0;
  double abs_error_pct = 0.0;
  bool converged = false;
};

/// Statistics over the converged runs of one (adder, snr) cell. The standard
/// deviation is the sample one (n - 1); mean and std are NaN without data.
struct AggregateRow {
  std::string adder;
  double snr_db = 0.0;
  int runs = 0;
  int converged = 0;
  double mean_abs_error_pct = 0.0;
  double std_abs_error_pct = 0.0;
};

struct SweepResult {
  std::vector<RunRow> rows;              // sorted by (adder order, snr order, run)
  std::vector<AggregateRow> aggregates;  // one per (adder, snr), same order
};

/// The random stream of a run depends only on (seed, snr, run), so every adder
/// sees the same frames and noise.
[[nodiscard]] RngSpec run_rng(std::uint64_t seed, double snr_db, int run);

/// jobs <= 0 means one worker. Rows do not depend on the worker count.
[[nodiscard]] SweepResult run_sweep(const SweepPlan& plan, const Scenario& scenario, int jobs = 1);

[[nodiscard]] std::vector<AggregateRow> aggregate(const std::vector<RunRow>& rows);

struct DsePoint {
  std::string adder;
  AdderFamily family = AdderFamily::RippleExact;
  double mean_error_pct = 0.0;  // over converged runs at SNR > 0
  double area_proxy = 0.0;
  double power_proxy = 0.0;
  double converged_fraction = 0.0;
  std::optional<double> area_saving_pct;   // against the carry-lookahead baseline
  std::optional<double> power_saving_pct;
  bool dominated = false;
};

/// One point per adder in plan order. Savings are filled when a
/// carry-lookahead adder is among them (the first one is the baseline).
[[nodiscard]] std::vector<DsePoint> build_points(const SweepResult& result,
                                                 const std::vector<std::string>& adder_specs);

/// Minimization on (error, area, power); NaN error counts as worst.
void pareto_filter(std::vector<DsePoint>& points);

struct QualityConstraints {
  std::optional<double> max_error_pct;
  std::optional<double> min_area_saving_pct;
  std::optional<double> min_power_saving_pct;

  /// Parses "max_error_pct=1.0,min_area_saving_pct=5". Throws ConfigError.
  static QualityConstraints parse(const std::string& text);
  [[nodiscard]] bool any() const noexcept {
    return max_error_pct || min_area_saving_pct || min_power_saving_pct;
  }
};

/// Throws ConfigError when no bound is set or the baseline is missing.
[[nodiscard]] std::vector<DsePoint> apply_constraints(const std::vector<DsePoint>& points,
                                                      const QualityConstraints& qc);

inline constexpr const char* kRunsHeader =
    "adder,snr_db,run,seed,estimated_range_m,abs_error_pct,converged";
inline constexpr const char* kAggregatesHeader =
    "adder,snr_db,runs,converged,mean_abs_error_pct,std_abs_error_pct";
inline constexpr const char* kDseHeader =
    "adder,mean_error_pct,area_proxy,power_proxy,area_saving_pct,power_saving_pct,dominated";

[[nodiscard]] std::string runs_csv(const std::vector<RunRow>& rows);
[[nodiscard]] std::string aggregates_csv(const std::vector<AggregateRow>& rows);
[[nodiscard]] std::string dse_csv(const std::vector<DsePoint>& points);

/// Writes runs.csv, aggregates.csv and dse.csv into `dir` (created if
/// needed). Throws std::runtime_error naming the path on I/O failure.
void emit_report(const SweepResult& result, const std::vector<DsePoint>& points,
                 const std::filesystem::path& dir);

}  // namespace musiclite
