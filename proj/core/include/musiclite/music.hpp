#pragma once

// Range-domain MUSIC over OFDM subcarriers. Only the SVD runs in approximate
// fixed point; covariance, steering, pseudospectrum and peak search use host
// double precision.

#include <optional>
#include <vector>

#include "musiclite/cmatrix.hpp"
#include "musiclite/gk_svd.hpp"

namespace musiclite {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Per-subcarrier channel estimates, one column per OFDM symbol.
using SnapshotMatrix = CMatrix;

struct MusicConfig {
  int n_targets = 1;
  int grid_points = 5000;
  /// Upper end of the search grid; unset means the unambiguous range c/(2*df).
  std::optional<double> range_max_m;
  bool forward_backward = false;

  void validate(int n_subcarriers) const;  // throws ConfigError
};

/// c / (2 * df)
[[nodiscard]] double unambiguous_range(double subcarrier_spacing_hz);

/// (1/M) sum_m d_m d_m^H, optionally averaged with J conj(R) J. The result is
/// Hermitian bit-for-bit (the lower triangle mirrors the upper).
[[nodiscard]] CMatrix covariance(const SnapshotMatrix& d, bool forward_backward = false);

struct NoiseSubspace {
  CMatrix basis;                        // N x (N - K), orthonormal columns
  std::vector<double> singular_values;  // all N, descending, in units of R
  int sweeps = 0;
};

/// Columns of U belonging to the N-K smallest singular values of R, from the
/// fixed-point SVD. Throws NonConvergence.
[[nodiscard]] NoiseSubspace noise_subspace(const CMatrix& r, int n_targets, const CordicConfig& cfg,
                                           const SvdOptions& options = {});

/// a(r)[n] = exp(-j 2 pi n df 2r / c). Throws std::out_of_range outside
/// [0, c/(2 df)).
[[nodiscard]] std::vector<cdouble> steering(double range_m, int n_subcarriers,
                                            double subcarrier_spacing_hz);

struct PeakSearch {
  std::vector<double> ranges_m;  // descending by pseudospectrum value
  std::vector<int> indices;
  bool shortfall = false;        // fewer local maxima than requested
};

struct MusicSpectrum {
  std::vector<double> grid_m;
  std::vector<double> p_mu;
  PeakSearch peaks;
};

/// Denominator floor of the pseudospectrum.
inline constexpr double kPseudospectrumFloor = 1e-12;

/// P(r) = 1 / max(||E_N^H a(r)||^2, floor) on grid r_g = g * range_max / grid_points.
[[nodiscard]] MusicSpectrum pseudospectrum(const CMatrix& noise_basis, const MusicConfig& cfg,
                                           double subcarrier_spacing_hz);

/// The K largest local maxima. A maximum is a strict rise followed by a strict
/// fall, with a plateau reported at its first point; endpoints only need to
/// beat their single neighbour. Equal values prefer the smaller range.
[[nodiscard]] PeakSearch peak_search(const std::vector<double>& grid_m,
                                     const std::vector<double>& p_mu, int k);

}  // namespace musiclite
