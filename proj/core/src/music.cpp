#include "musiclite/music.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "musiclite/errors.hpp"

namespace musiclite {

void MusicConfig::validate(int n_subcarriers) const {
  if (n_targets < 1 || n_targets >= n_subcarriers) {
    throw ConfigError("music.n_targets must satisfy 1 <= K < " + std::to_string(n_subcarriers) +
                      ", got " + std::to_string(n_targets));
  }
  if (grid_points < 2) {
    throw ConfigError("music.grid_points must be >= 2");
  }
  if (range_max_m && !(*range_max_m > 0.0 && std::isfinite(*range_max_m))) {
    throw ConfigError("music.range_max_m must be positive");
  }
}

double unambiguous_range(double subcarrier_spacing_hz) {
  return kSpeedOfLight / (2.0 * subcarrier_spacing_hz);
}

CMatrix covariance(const SnapshotMatrix& d, bool forward_backward) {
  const int n = d.rows();
  const int m = d.cols();
  if (n < 1 || m < 1) {
    throw std::invalid_argument("snapshot matrix must be non-empty");
  }
  CMatrix r(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      cdouble acc = 0.0;
      for (int s = 0; s < m; ++s) {
        acc += d(i, s) * std::conj(d(j, s));
      }
      r(i, j) = acc / static_cast<double>(m);
    }
  }
  if (forward_backward) {
    // (J conj(R) J)_ij = conj(R_{n-1-i, n-1-j})
    CMatrix fb(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const int bi = n - 1 - j;
        const int bj = n - 1 - i;
        // upper-triangle element (bi, bj) of R equals conj(R_{n-1-i, n-1-j})
        fb(i, j) = 0.5 * (r(i, j) + r(bi, bj));
      }
    }
    r = fb;
  }
  for (int i = 0; i < n; ++i) {
    r(i, i) = r(i, i).real();
    for (int j = i + 1; j < n; ++j) {
      r(j, i) = std::conj(r(i, j));
    }
  }
  return r;
}

namespace {

// inside [0.5, 1) so the fixed-point prescale is the same for every input
constexpr double kNormalizedFrobenius = 0.9375;

}  // namespace

NoiseSubspace noise_subspace(const CMatrix& r, int n_targets, const CordicConfig& cfg,
                             const SvdOptions& options) {
  const int n = r.rows();
  if (r.cols() != n) {
    throw std::invalid_argument("covariance must be square");
  }
  if (n_targets < 1 || n_targets >= n) {
    throw ConfigError("number of targets must satisfy 1 <= K < N");
  }
  // Normalizing first makes the quantized input independent of the overall
  // scale of R, so scaling R cannot move the estimate.
  const double norm = r.frobenius_norm();
  CMatrix scaled = r;
  if (norm > 0.0) {
    const double k = kNormalizedFrobenius / norm;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        scaled(i, j) *= k;
      }
    }
  }
  SvdOptions opts = options;
  opts.compute_u = true;
  opts.compute_v = false;
  const SvdResult res = svd(FixedMatrix::from_complex(scaled, cfg.format()), cfg, opts);

  NoiseSubspace out;
  out.basis = res.u.to_complex_unscaled().columns(n_targets, n - n_targets);
  out.singular_values = res.singular_values();
  if (norm > 0.0) {
    for (double& s : out.singular_values) {
      s *= norm / kNormalizedFrobenius;
    }
  }
  out.sweeps = res.sweeps;
  return out;
}

std::vector<cdouble> steering(double range_m, int n_subcarriers, double subcarrier_spacing_hz) {
  if (!(range_m >= 0.0 && range_m < unambiguous_range(subcarrier_spacing_hz))) {
    throw std::out_of_range("steering range " + std::to_string(range_m) +
                            " m outside [0, c/(2*df))");
  }
  std::vector<cdouble> a(static_cast<std::size_t>(n_subcarriers));
  const double step = -2.0 * std::numbers::pi * subcarrier_spacing_hz * 2.0 * range_m / kSpeedOfLight;
  for (int i = 0; i < n_subcarriers; ++i) {
    a[static_cast<std::size_t>(i)] = std::polar(1.0, step * i);
  }
  return a;
}

MusicSpectrum pseudospectrum(const CMatrix& noise_basis, const MusicConfig& cfg,
                             double subcarrier_spacing_hz) {
  const int n = noise_basis.rows();
  const int p = noise_basis.cols();
  const double range_max = cfg.range_max_m.value_or(unambiguous_range(subcarrier_spacing_hz));
  if (cfg.grid_points < 2) {
    throw ConfigError("music.grid_points must be >= 2");
  }
  MusicSpectrum out;
  out.grid_m.resize(static_cast<std::size_t>(cfg.grid_points));
  out.p_mu.resize(static_cast<std::size_t>(cfg.grid_points));
  const double step = range_max / cfg.grid_points;
  std::vector<cdouble> a(static_cast<std::size_t>(n));
  for (int g = 0; g < cfg.grid_points; ++g) {
    const double r = g * step;
    const double phase = -2.0 * std::numbers::pi * subcarrier_spacing_hz * 2.0 * r / kSpeedOfLight;
    for (int i = 0; i < n; ++i) {
      a[static_cast<std::size_t>(i)] = std::polar(1.0, phase * i);
    }
    double denom = 0.0;
    for (int c = 0; c < p; ++c) {
      cdouble proj = 0.0;
      for (int i = 0; i < n; ++i) {
        proj += std::conj(noise_basis(i, c)) * a[static_cast<std::size_t>(i)];
      }
      denom += std::norm(proj);
    }
    out.grid_m[static_cast<std::size_t>(g)] = r;
    out.p_mu[static_cast<std::size_t>(g)] = 1.0 / std::max(denom, kPseudospectrumFloor);
  }
  out.peaks = peak_search(out.grid_m, out.p_mu, cfg.n_targets);
  return out;
}

PeakSearch peak_search(const std::vector<double>& grid_m, const std::vector<double>& p_mu, int k) {
  if (k < 1) {
    throw std::invalid_argument("peak search needs k >= 1");
  }
  if (grid_m.size() != p_mu.size()) {
    throw std::invalid_argument("grid and spectrum sizes differ");
  }
  const int n = static_cast<int>(p_mu.size());
  std::vector<int> candidates;
  if (n == 1) {
    candidates.push_back(0);
  }
  for (int i = 0; i < n && n > 1; ++i) {
    const double v = p_mu[static_cast<std::size_t>(i)];
    if (i == 0) {
      if (v > p_mu[1]) candidates.push_back(i);
      continue;
    }
    if (i == n - 1) {
      if (v > p_mu[static_cast<std::size_t>(i - 1)]) candidates.push_back(i);
      continue;
    }
    const double left = p_mu[static_cast<std::size_t>(i - 1)];
    if (v < left || (v == left)) {
      continue;  // not rising into i, or inside a plateau that started earlier
    }
    // walk across a plateau to see whether it falls on the right
    int j = i + 1;
    while (j < n && p_mu[static_cast<std::size_t>(j)] == v) {
      ++j;
    }
    if (j == n || p_mu[static_cast<std::size_t>(j)] < v) {
      candidates.push_back(i);
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    return p_mu[static_cast<std::size_t>(a)] > p_mu[static_cast<std::size_t>(b)];
  });
  PeakSearch out;
  out.shortfall = static_cast<int>(candidates.size()) < k;
  for (int i = 0; i < std::min<int>(k, static_cast<int>(candidates.size())); ++i) {
    out.indices.push_back(candidates[static_cast<std::size_t>(i)]);
    out.ranges_m.push_back(grid_m[static_cast<std::size_t>(candidates[static_cast<std::size_t>(i)])]);
  }
  return out;
}

}  // namespace musiclite
