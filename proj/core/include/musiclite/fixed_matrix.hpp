#pragma once

#include <cstdint>
#include <vector>

#include "musiclite/cmatrix.hpp"
#include "musiclite/fixed_point.hpp"

namespace musiclite {

struct ComplexFixed {
  FixedWord re;
  FixedWord im;
};

/// Complex fixed-point matrix. Real value of entry = raw * 2^-F * 2^scale_exponent.
class FixedMatrix {
 public:
  FixedMatrix(int rows, int cols, FixedFormat format, int scale_exponent = 0);

  static FixedMatrix identity(int n, FixedFormat format);

  /// Quantizes `m` after a power-of-two prescale that brings its Frobenius
  /// norm into [2^(h-1), 2^h) with h = prescale_headroom_bits(format). Every
  /// pair a unitary rotation touches then has norm r below 2^h. The largest
  /// CORDIC intermediate is the gain-compensation sum, below 2 * 1.65 * r,
  /// which stays under the format limit 2^(W-F-1).
  static FixedMatrix from_complex(const CMatrix& m, FixedFormat format);

  /// max(0, W - F - 3)
  static int prescale_headroom_bits(const FixedFormat& format) noexcept;

  /// Quantizes `m` as-is (scale exponent 0, saturating).
  static FixedMatrix quantize(const CMatrix& m, FixedFormat format);

  [[nodiscard]] int rows() const noexcept { return rows_; }
  [[nodiscard]] int cols() const noexcept { return cols_; }
  [[nodiscard]] const FixedFormat& format() const noexcept { return format_; }
  [[nodiscard]] int scale_exponent() const noexcept { return scale_exponent_; }

  [[nodiscard]] std::int64_t& re(int r, int c) noexcept { return re_[index(r, c)]; }
  [[nodiscard]] std::int64_t& im(int r, int c) noexcept { return im_[index(r, c)]; }
  [[nodiscard]] std::int64_t re(int r, int c) const noexcept { return re_[index(r, c)]; }
  [[nodiscard]] std::int64_t im(int r, int c) const noexcept { return im_[index(r, c)]; }

  [[nodiscard]] ComplexFixed at(int r, int c) const;
  void set(int r, int c, const ComplexFixed& value);

  /// Host-precision copy including the prescale factor.
  [[nodiscard]] CMatrix to_complex() const;
  /// Host-precision copy of the stored (prescaled) values.
  [[nodiscard]] CMatrix to_complex_unscaled() const;

  [[nodiscard]] FixedMatrix conj_transpose() const;

  friend bool operator==(const FixedMatrix&, const FixedMatrix&) = default;

 private:
  [[nodiscard]] std::size_t index(int r, int c) const noexcept {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
  }

  int rows_;
  int cols_;
  FixedFormat format_;
  int scale_exponent_;
  std::vector<std::int64_t> re_;
  std::vector<std::int64_t> im_;
};

}  // namespace musiclite
