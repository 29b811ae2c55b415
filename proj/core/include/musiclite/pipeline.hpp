#pragma once

// One end-to-end radar run: frame, channel, reciprocal filter, covariance,
// fixed-point SVD with the configured adder, pseudospectrum, peak search.

#include <optional>
#include <string>

#include "musiclite/adders.hpp"
#include "musiclite/fixed_point.hpp"
#include "musiclite/gk_svd.hpp"
#include "musiclite/music.hpp"
#include "musiclite/ofdm.hpp"

namespace musiclite {

struct Scenario {
  OfdmConfig ofdm;
  RadarScene scene;
  MusicConfig music;
  FixedFormat format{16, 13};
  /// 0 selects the CORDIC default.
  int cordic_iterations = 0;
  ShiftRounding rounding = ShiftRounding::Nearest;
  SvdOptions svd;

  /// Throws ConfigError.
  void validate() const;
};

struct RunResult {
  bool converged = false;
  double estimated_range_m = 0.0;  // first (strongest) peak
  double abs_error_pct = 0.0;      // 100 |est - true| / true
  int sweeps = 0;
  bool delay_exceeds_cp = false;
  bool peak_shortfall = false;
  std::string diagnostic;          // set when the run failed
  std::optional<MusicSpectrum> spectrum;
};

/// SVD non-convergence is reported through RunResult::converged and
/// diagnostic rather than thrown. The adder width must match the format.
[[nodiscard]] RunResult run_pipeline(const Scenario& scenario, const AdderModel& adder,
                                     const RngSpec& rng, bool keep_spectrum = false);

/// Same, with a prebuilt CORDIC configuration for repeated runs.
[[nodiscard]] RunResult run_pipeline(const Scenario& scenario, const CordicConfig& cordic,
                                     const RngSpec& rng, bool keep_spectrum = false);

}  // namespace musiclite
