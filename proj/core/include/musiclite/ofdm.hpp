#pragma once

// Frequency-domain OFDM radar channel: 4-QAM frame, single point target with
// delay and Doppler, complex AWGN, and reciprocal filtering.

#include <cstdint>
#include <optional>
#include <random>

#include "musiclite/cmatrix.hpp"

namespace musiclite {

struct OfdmConfig {
  double carrier_hz = 30e9;
  int n_subcarriers = 32;
  int n_symbols = 16;
  double subcarrier_spacing_hz = 960e3;
  double symbol_duration_s = 1.04e-6;
  double cp_duration_s = 0.26e-6;
  double total_symbol_s = 1.3e-6;

  /// Throws ConfigError. The symbol duration must match 1/df within 1% and
  /// the total must equal symbol + CP to a relative 1e-9.
  void validate() const;
};

struct RadarScene {
  double target_range_m = 50.0;
  double target_velocity_mps = 20.0;
  double amplitude = 1.0;
  /// Unset disables the noise entirely.
  std::optional<double> snr_db;

  void validate(const OfdmConfig& cfg) const;
};

/// A run's random stream: the generator is seeded from (seed, stream) so every
/// Monte-Carlo run draws the same numbers no matter which worker executes it.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  [[nodiscard]] std::uint64_t derived_seed() const noexcept;
  [[nodiscard]] std::mt19937_64 engine() const { return std::mt19937_64(derived_seed()); }
};

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// i.i.d. Gray-mapped 4-QAM symbols (+-1 +-j)/sqrt(2), N x M.
[[nodiscard]] CMatrix build_frame(const OfdmConfig& cfg, std::mt19937_64& rng);

/// 2 * range / c
[[nodiscard]] double round_trip_delay(double range_m);
/// 2 * v * f_c / c
[[nodiscard]] double doppler_shift(double velocity_mps, double carrier_hz);

/// Y[n,m] = b X[n,m] exp(-j2pi n df tau) exp(+j2pi f_D m T) + w[n,m],
/// E|w|^2 = b^2 / 10^(snr/10).
[[nodiscard]] CMatrix channel(const CMatrix& x, const RadarScene& scene, const OfdmConfig& cfg,
                              std::mt19937_64& rng);

/// D = Y ./ X. Throws std::domain_error on a zero transmit symbol.
[[nodiscard]] CMatrix reciprocal_filter(const CMatrix& y, const CMatrix& x);

/// True when the round-trip delay is longer than the cyclic prefix. The
/// frequency-domain model ignores the resulting inter-symbol interference.
[[nodiscard]] bool delay_exceeds_cp(const RadarScene& scene, const OfdmConfig& cfg);

}  // namespace musiclite
