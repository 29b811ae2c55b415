#pragma once

// Signed fixed-point words whose additions run through a pluggable AdderModel.

#include <cstdint>

#include "musiclite/adders.hpp"

namespace musiclite {

/// W-bit two's-complement word with F fraction bits. Requires 2 <= F <= W-2.
struct FixedFormat {
  int width = 16;
  int frac = 13;

  void validate() const;  // throws ConfigError
  [[nodiscard]] std::int64_t raw_max() const noexcept { return (std::int64_t{1} << (width - 1)) - 1; }
  [[nodiscard]] std::int64_t raw_min() const noexcept { return -(std::int64_t{1} << (width - 1)); }
  [[nodiscard]] double lsb() const noexcept;
  /// Reduces an arbitrary integer to the W-bit two's-complement range (wraparound).
  [[nodiscard]] std::int64_t wrap(std::int64_t raw) const noexcept;
  /// Round-to-nearest quantization, saturating at the representable range.
  [[nodiscard]] std::int64_t quantize(double value) const noexcept;
  [[nodiscard]] double to_double(std::int64_t raw) const noexcept;

  friend bool operator==(const FixedFormat&, const FixedFormat&) = default;
};

struct FixedWord {
  FixedFormat format;
  std::int64_t raw = 0;

  [[nodiscard]] static FixedWord from_double(double value, FixedFormat format);
  [[nodiscard]] double to_double() const noexcept { return format.to_double(raw); }

  friend bool operator==(const FixedWord&, const FixedWord&) = default;
};

/// A format bound to an adder of the same width. add/sub wrap; carry-out is
/// dropped. Subtraction is exact negation followed by the (approximate) add.
class FixedAdder {
 public:
  FixedAdder(FixedFormat format, AdderModel adder);

  [[nodiscard]] const FixedFormat& format() const noexcept { return format_; }
  [[nodiscard]] const AdderModel& adder() const noexcept { return adder_; }

  [[nodiscard]] std::int64_t add(std::int64_t a, std::int64_t b, bool cin = false) const noexcept {
    const AddResult r = adder_.add(static_cast<std::uint64_t>(a) & mask_,
                                   static_cast<std::uint64_t>(b) & mask_, cin);
    return sign_extend(r.sum);
  }
  [[nodiscard]] std::int64_t sub(std::int64_t a, std::int64_t b) const noexcept {
    return add(a, negate(b));
  }
  [[nodiscard]] std::int64_t negate(std::int64_t a) const noexcept { return format_.wrap(-a); }
  /// Bitwise complement, -a - 1.
  [[nodiscard]] std::int64_t invert(std::int64_t a) const noexcept { return format_.wrap(~a); }

 private:
  [[nodiscard]] std::int64_t sign_extend(std::uint64_t bits) const noexcept {
    return static_cast<std::int64_t>(bits ^ sign_) - static_cast<std::int64_t>(sign_);
  }

  FixedFormat format_;
  AdderModel adder_;
  std::uint64_t mask_;
  std::uint64_t sign_;
};

/// Arithmetic right shift (truncates toward -infinity).
[[nodiscard]] constexpr std::int64_t shift_right(std::int64_t value, int amount) noexcept {
  return value >> amount;
}

[[nodiscard]] FixedWord fx_add(const FixedWord& a, const FixedWord& b, const AdderModel& adder);
[[nodiscard]] FixedWord fx_sub(const FixedWord& a, const FixedWord& b, const AdderModel& adder);

}  // namespace musiclite
