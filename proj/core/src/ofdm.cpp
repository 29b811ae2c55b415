#include "musiclite/ofdm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "musiclite/errors.hpp"
#include "musiclite/music.hpp"

namespace musiclite {

namespace {

bool close_rel(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

void OfdmConfig::validate() const {
  if (n_subcarriers < 2 || n_symbols < 1) {
    throw ConfigError("ofdm needs at least 2 subcarriers and 1 symbol");
  }
  if (!(carrier_hz > 0.0) || !(subcarrier_spacing_hz > 0.0) || !(symbol_duration_s > 0.0) ||
      !(cp_duration_s >= 0.0) || !(total_symbol_s > 0.0)) {
    throw ConfigError("ofdm frequencies and durations must be positive");
  }
  // 1.04 us against 1/960 kHz = 1.0417 us: the usual values are rounded
  if (std::abs(symbol_duration_s * subcarrier_spacing_hz - 1.0) > 1e-2) {
    throw ConfigError("ofdm.symbol_duration_s must equal 1/subcarrier_spacing_hz");
  }
  if (!close_rel(total_symbol_s, symbol_duration_s + cp_duration_s)) {
    throw ConfigError("ofdm.total_symbol_s must equal symbol_duration_s + cp_duration_s");
  }
}

void RadarScene::validate(const OfdmConfig& cfg) const {
  if (!(target_range_m >= 0.0 && target_range_m < unambiguous_range(cfg.subcarrier_spacing_hz))) {
    throw ConfigError("scene.target_range_m must lie in [0, c/(2*df))");
  }
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw ConfigError("scene.amplitude must be positive");
  }
  if (!std::isfinite(target_velocity_mps)) {
    throw ConfigError("scene.target_velocity_mps must be finite");
  }
  if (snr_db && !std::isfinite(*snr_db)) {
    throw ConfigError("scene.snr_db must be finite");
  }
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t RngSpec::derived_seed() const noexcept {
  return splitmix64(splitmix64(seed) ^ stream);
}

CMatrix build_frame(const OfdmConfig& cfg, std::mt19937_64& rng) {
  CMatrix x(cfg.n_subcarriers, cfg.n_symbols);
  const double a = std::numbers::sqrt2 / 2.0;
  for (int n = 0; n < cfg.n_subcarriers; ++n) {
    for (int m = 0; m < cfg.n_symbols; ++m) {
      const std::uint64_t bits = rng() >> 62;
      // Gray mapping: one bit per quadrature sign
      const double re = (bits & 1U) ? -a : a;
      const double im = (bits & 2U) ? -a : a;
      x(n, m) = cdouble(re, im);
    }
  }
  return x;
}

double round_trip_delay(double range_m) {
  return 2.0 * range_m / kSpeedOfLight;
}

double doppler_shift(double velocity_mps, double carrier_hz) {
  return 2.0 * velocity_mps * carrier_hz / kSpeedOfLight;
}

CMatrix channel(const CMatrix& x, const RadarScene& scene, const OfdmConfig& cfg,
                std::mt19937_64& rng) {
  const double tau = round_trip_delay(scene.target_range_m);
  const double fd = doppler_shift(scene.target_velocity_mps, cfg.carrier_hz);
  const double two_pi = 2.0 * std::numbers::pi;
  double sigma = 0.0;
  if (scene.snr_db) {
    const double variance = scene.amplitude * scene.amplitude / std::pow(10.0, *scene.snr_db / 10.0);
    sigma = std::sqrt(variance / 2.0);
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix y(x.rows(), x.cols());
  for (int n = 0; n < x.rows(); ++n) {
    for (int m = 0; m < x.cols(); ++m) {
      const double phase = -two_pi * n * cfg.subcarrier_spacing_hz * tau + two_pi * fd * m * cfg.total_symbol_s;
      y(n, m) = scene.amplitude * x(n, m) * std::polar(1.0, phase);
      if (scene.snr_db) {
        const double wr = gauss(rng);
        const double wi = gauss(rng);
        y(n, m) += cdouble(sigma * wr, sigma * wi);
      }
    }
  }
  return y;
}

CMatrix reciprocal_filter(const CMatrix& y, const CMatrix& x) {
  if (y.rows() != x.rows() || y.cols() != x.cols()) {
    throw std::invalid_argument("received and transmitted grids differ in shape");
  }
  CMatrix d(y.rows(), y.cols());
  for (int n = 0; n < y.rows(); ++n) {
    for (int m = 0; m < y.cols(); ++m) {
      if (x(n, m) == cdouble(0.0, 0.0)) {
        throw std::domain_error("zero transmit symbol at subcarrier " + std::to_string(n) +
                                ", symbol " + std::to_string(m));
      }
      d(n, m) = y(n, m) / x(n, m);
    }
  }
  return d;
}

bool delay_exceeds_cp(const RadarScene& scene, const OfdmConfig& cfg) {
  return round_trip_delay(scene.target_range_m) > cfg.cp_duration_s;
}

}  // namespace musiclite
