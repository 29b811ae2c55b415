#include "musiclite/pipeline.hpp"

#include <cmath>

#include "musiclite/errors.hpp"

namespace musiclite {

void Scenario::validate() const {
  ofdm.validate();
  scene.validate(ofdm);
  music.validate(ofdm.n_subcarriers);
  format.validate();
  if (cordic_iterations < 0) {
    throw ConfigError("cordic.iterations must be >= 0");
  }
}

RunResult run_pipeline(const Scenario& scenario, const AdderModel& adder, const RngSpec& rng,
                       bool keep_spectrum) {
  scenario.validate();
  return run_pipeline(scenario, CordicConfig(scenario.format, adder, scenario.cordic_iterations,
                                    scenario.rounding),
                      rng, keep_spectrum);
}

RunResult run_pipeline(const Scenario& scenario, const CordicConfig& cordic, const RngSpec& rng,
                       bool keep_spectrum) {
  RunResult out;
  out.delay_exceeds_cp = delay_exceeds_cp(scenario.scene, scenario.ofdm);

  std::mt19937_64 engine = rng.engine();
  const CMatrix x = build_frame(scenario.ofdm, engine);
  const CMatrix y = channel(x, scenario.scene, scenario.ofdm, engine);
  const CMatrix d = reciprocal_filter(y, x);
  const CMatrix r = covariance(d, scenario.music.forward_backward);

  NoiseSubspace subspace;
  try {
    subspace = noise_subspace(r, scenario.music.n_targets, cordic, scenario.svd);
  } catch (const NonConvergence& e) {
    out.converged = false;
    out.sweeps = e.sweeps();
    out.diagnostic = e.what();
    return out;
  }
  MusicSpectrum spectrum =
      pseudospectrum(subspace.basis, scenario.music, scenario.ofdm.subcarrier_spacing_hz);
  out.sweeps = subspace.sweeps;
  out.peak_shortfall = spectrum.peaks.shortfall;
  if (spectrum.peaks.ranges_m.empty()) {
    out.converged = false;
    out.diagnostic = "pseudospectrum has no local maximum";
  } else {
    out.converged = true;
    out.estimated_range_m = spectrum.peaks.ranges_m.front();
    const double truth = scenario.scene.target_range_m;
    out.abs_error_pct = truth > 0.0 ? 100.0 * std::abs(out.estimated_range_m - truth) / truth
                                    : 100.0 * std::abs(out.estimated_range_m);
  }
  if (keep_spectrum) {
    out.spectrum = std::move(spectrum);
  }
  return out;
}

}  // namespace musiclite
