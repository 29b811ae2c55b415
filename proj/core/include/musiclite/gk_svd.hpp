#pragma once

// Golub-Kahan SVD of complex fixed-point matrices. Every rotation, including
// the phase rotations that keep the bidiagonal real, is a CORDIC rotation whose
// additions go through the configured adder.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "musiclite/cordic.hpp"
#include "musiclite/fixed_matrix.hpp"

namespace musiclite {

/// Raised when the diagonalization sweep cap fires before every superdiagonal
/// entry is negligible.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(double residual, int sweeps);

  /// Largest remaining |superdiagonal| in prescaled units.
  [[nodiscard]] double residual() const noexcept { return residual_; }
  [[nodiscard]] int sweeps() const noexcept { return sweeps_; }

 private:
  double residual_;
  int sweeps_;
};

struct SvdOptions {
  bool compute_u = true;
  bool compute_v = true;
  /// Sweep cap is this times min(M, N).
  int sweeps_per_dimension = 30;
  /// Relative superdiagonal threshold tau_d = 2^(-F + threshold_shift):
  /// |e_i| <= tau_d * (|d_i| + |d_i+1|) counts as converged.
  int threshold_shift = 2;
  /// Absolute threshold in LSB below which a bidiagonal entry is
  /// indistinguishable from CORDIC noise. 0 selects the rounding bound of a
  /// single rotation, 2 * iterations LSB (= I * 2^(1-F)). The angle
  /// resolution term max|B| * 2^(2-I) is always added.
  int noise_floor_lsb = 0;
};

/// Rotation by -angle maps (keep, zero) to (magnitude, 0).
struct GivensRotation {
  FixedWord magnitude;
  FixedWord angle;
};

[[nodiscard]] GivensRotation givens_from(const FixedWord& keep, const FixedWord& zero,
                                         const CordicConfig& cfg);

/// Rotates (x, y) by -rotation.angle.
[[nodiscard]] std::pair<FixedWord, FixedWord> apply_givens(const GivensRotation& rotation,
                                                           const FixedWord& x, const FixedWord& y,
                                                           const CordicConfig& cfg);

/// Multiplying the entry by exp(-j*phase) leaves it real, equal to magnitude.
struct PhaseNormalization {
  FixedWord magnitude;
  FixedWord phase;
};

[[nodiscard]] PhaseNormalization phase_normalize(const ComplexFixed& entry, const CordicConfig& cfg);

struct Bidiagonal {
  FixedFormat format;
  std::vector<std::int64_t> diag;   // n entries
  std::vector<std::int64_t> super;  // n-1 entries
};

/// left_h * A * right = [B; 0]. left_h is M x M (the conjugate transpose of
/// the left factor), right is N x N.
struct BidiagonalForm {
  FixedMatrix left_h;
  Bidiagonal b;
  FixedMatrix right;
};

/// Requires M >= N. Throws std::invalid_argument otherwise.
[[nodiscard]] BidiagonalForm bidiagonalize(const FixedMatrix& a, const CordicConfig& cfg);

/// p_h * B * q = diag(s). Values are sign-fixed (>= 0) but not sorted.
struct DiagonalForm {
  FixedMatrix p_h;
  std::vector<std::int64_t> s;
  FixedMatrix q;
  int sweeps = 0;
};

[[nodiscard]] DiagonalForm diagonalize(const Bidiagonal& b, const CordicConfig& cfg,
                                       const SvdOptions& options = {});

/// A = U diag(S) V^H with S scaled by 2^scale_exponent.
struct SvdResult {
  FixedMatrix u;             // M x M (identity when not computed)
  std::vector<FixedWord> s;  // min(M, N), descending, >= 0
  FixedMatrix v;             // N x N (identity when not computed)
  int scale_exponent = 0;
  int sweeps = 0;

  [[nodiscard]] std::vector<double> singular_values() const;
  /// U diag(S) V^H in host precision, including the prescale.
  [[nodiscard]] CMatrix reconstruct() const;
};

[[nodiscard]] SvdResult svd(const FixedMatrix& a, const CordicConfig& cfg,
                            const SvdOptions& options = {});

}  // namespace musiclite
