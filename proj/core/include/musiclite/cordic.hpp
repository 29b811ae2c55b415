#pragma once

// Circular CORDIC in rotation and vectoring mode. Every addition of the x, y
// and z datapaths, and of the gain-compensation multiplier, goes through the
// configured adder; shifts are exact arithmetic shifts, optionally rounded
// through the adder's carry-in.

#include <cstdint>
#include <utility>
#include <vector>

#include "musiclite/fixed_point.hpp"

namespace musiclite {

struct RotationRaw {
  std::int64_t x = 0;
  std::int64_t y = 0;
};

struct VectorRaw {
  std::int64_t magnitude = 0;
  std::int64_t angle = 0;
};

/// A rotation angle already reduced into the CORDIC convergence range by an
/// exact quarter-turn pre-rotation, with the micro-rotation directions the
/// angle datapath produces for it. Reused when one angle rotates many pairs.
struct PreparedRotation {
  int quarter_turns = 0;  // -1, 0 or +1
  std::int64_t residual = 0;
  std::uint64_t directions = 0;  // bit i set: iteration i rotates counter-clockwise
};

/// How the shifted operand of each x/y micro-rotation and of the gain
/// multiplier loses its low bits.
///   Truncate: plain arithmetic shift (floor).
///   Nearest:  round half to even. The rounding increment enters the adder
///             as carry-in (add) or suppresses the carry-in of the two's
///             complement (subtract), so no extra adder is needed. Removes
///             the -1/2 LSB per-operation drift of truncation.
enum class ShiftRounding { Truncate, Nearest };

class CordicConfig {
 public:
  /// iterations == 0 selects min(W, F+1): the longest run whose quantized
  /// angle table is still strictly decreasing. Later iterations would rotate
  /// by angles the z datapath cannot represent.
  CordicConfig(FixedFormat format, AdderModel adder, int iterations = 0,
               ShiftRounding rounding = ShiftRounding::Nearest);

  [[nodiscard]] const FixedFormat& format() const noexcept { return arith_.format(); }
  [[nodiscard]] const AdderModel& adder() const noexcept { return arith_.adder(); }
  [[nodiscard]] const FixedAdder& arith() const noexcept { return arith_; }
  [[nodiscard]] int iterations() const noexcept { return iterations_; }
  [[nodiscard]] ShiftRounding rounding() const noexcept { return rounding_; }
  /// round(atan(2^-i) * 2^F), i = 0..I-1
  [[nodiscard]] const std::vector<std::int64_t>& angle_table() const noexcept { return angles_; }
  /// prod sqrt(1 + 2^-2i)
  [[nodiscard]] double gain() const noexcept { return gain_; }
  /// Fraction bits of the inverse-gain constant: min(2F, 62). The constant is
  /// wider than the datapath because its rounding error compounds once per
  /// rotation; the multiplier itself only ever holds W-bit partial sums.
  [[nodiscard]] int inverse_gain_bits() const noexcept { return inverse_gain_bits_; }
  /// round(2^inverse_gain_bits / gain)
  [[nodiscard]] std::int64_t inverse_gain_raw() const noexcept { return inverse_gain_raw_; }
  /// Sum of the angle table: the largest |theta| rotation mode converges for.
  [[nodiscard]] std::int64_t angle_limit_raw() const noexcept { return angle_limit_raw_; }
  [[nodiscard]] std::int64_t half_pi_raw() const noexcept { return half_pi_raw_; }

  /// Rotation mode. Throws std::domain_error when |theta| exceeds the limit.
  [[nodiscard]] RotationRaw rotate_raw(std::int64_t x, std::int64_t y, std::int64_t theta) const;

  /// Splits any angle in [-pi, pi] into a quarter turn plus an in-range residual.
  [[nodiscard]] PreparedRotation prepare(std::int64_t theta) const noexcept;
  [[nodiscard]] RotationRaw apply(const PreparedRotation& rotation, std::int64_t x,
                                  std::int64_t y) const noexcept;

  /// Vectoring mode with quadrant folding; (0, 0) maps to magnitude 0, angle 0.
  [[nodiscard]] VectorRaw vector_raw(std::int64_t x, std::int64_t y) const noexcept;

  /// v * inverse_gain_raw * 2^-inverse_gain_bits as a shift-add Horner chain
  /// (error below 1 LSB under the exact adder).
  [[nodiscard]] std::int64_t compensate_raw(std::int64_t v) const noexcept;

 private:
  [[nodiscard]] std::uint64_t directions_for(std::int64_t theta) const noexcept;
  [[nodiscard]] RotationRaw rotate_with(std::int64_t x, std::int64_t y,
                                        std::uint64_t directions) const noexcept;
  /// x + (y >> i) and x - (y >> i) under the configured rounding
  [[nodiscard]] std::int64_t add_shifted(std::int64_t x, std::int64_t y, int i) const noexcept;
  [[nodiscard]] std::int64_t sub_shifted(std::int64_t x, std::int64_t y, int i) const noexcept;

  FixedAdder arith_;
  int iterations_;
  ShiftRounding rounding_;
  std::vector<std::int64_t> angles_;
  double gain_ = 1.0;
  int inverse_gain_bits_ = 0;
  std::int64_t inverse_gain_raw_ = 0;
  std::int64_t angle_limit_raw_ = 0;
  std::int64_t half_pi_raw_ = 0;
};

struct CordicVectorResult {
  FixedWord magnitude;
  FixedWord angle;
};

[[nodiscard]] std::pair<FixedWord, FixedWord> cordic_rotate(const FixedWord& x0, const FixedWord& y0,
                                                            const FixedWord& theta,
                                                            const CordicConfig& cfg);

[[nodiscard]] CordicVectorResult cordic_vector(const FixedWord& x0, const FixedWord& y0,
                                               const CordicConfig& cfg);

[[nodiscard]] FixedWord gain_compensate(const FixedWord& v, const CordicConfig& cfg);

}  // namespace musiclite
