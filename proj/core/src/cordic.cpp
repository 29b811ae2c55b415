#include "musiclite/cordic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "musiclite/errors.hpp"

namespace musiclite {

CordicConfig::CordicConfig(FixedFormat format, AdderModel adder, int iterations,
                           ShiftRounding rounding)
    : arith_(format, std::move(adder)),
      iterations_(iterations == 0 ? std::min(format.width, format.frac + 1) : iterations),
      rounding_(rounding) {
  if (iterations_ < 1 || iterations_ > 62) {
    throw ConfigError("CORDIC iteration count must be in [1, 62], got " + std::to_string(iterations_));
  }
  const FixedFormat& f = arith_.format();
  angles_.reserve(static_cast<std::size_t>(iterations_));
  for (int i = 0; i < iterations_; ++i) {
    angles_.push_back(f.quantize(std::atan(std::ldexp(1.0, -i))));
    gain_ *= std::sqrt(1.0 + std::ldexp(1.0, -2 * i));
    angle_limit_raw_ += angles_.back();
  }
  inverse_gain_bits_ = std::min(2 * f.frac, 62);
  inverse_gain_raw_ = std::llround(std::ldexp(1.0 / gain_, inverse_gain_bits_));
  half_pi_raw_ = f.quantize(std::numbers::pi / 2.0);
}

std::uint64_t CordicConfig::directions_for(std::int64_t z) const noexcept {
  std::uint64_t directions = 0;
  for (int i = 0; i < iterations_; ++i) {
    if (z >= 0) {
      directions |= std::uint64_t{1} << i;
      z = arith_.sub(z, angles_[static_cast<std::size_t>(i)]);
    } else {
      z = arith_.add(z, angles_[static_cast<std::size_t>(i)]);
    }
  }
  return directions;
}

namespace {

// round-half-even increment for y >> i (i >= 1): the last dropped bit, unless
// it is an exact tie and the kept LSB is already even
bool round_bit(std::int64_t y, int i) noexcept {
  const bool half = ((y >> (i - 1)) & 1) != 0;
  const bool sticky = (y & ((std::int64_t{1} << (i - 1)) - 1)) != 0;
  const bool odd = ((y >> i) & 1) != 0;
  return half && (sticky || odd);
}

}  // namespace

std::int64_t CordicConfig::add_shifted(std::int64_t x, std::int64_t y, int i) const noexcept {
  const std::int64_t ys = shift_right(y, i);
  if (rounding_ == ShiftRounding::Truncate || i == 0) {
    return arith_.add(x, ys);
  }
  return arith_.add(x, ys, round_bit(y, i));
}

std::int64_t CordicConfig::sub_shifted(std::int64_t x, std::int64_t y, int i) const noexcept {
  const std::int64_t ys = shift_right(y, i);
  if (rounding_ == ShiftRounding::Truncate || i == 0) {
    return arith_.sub(x, ys);
  }
  // x - (ys + r) = x + ~ys + (1 - r)
  return arith_.add(x, arith_.invert(ys), !round_bit(y, i));
}

RotationRaw CordicConfig::rotate_with(std::int64_t x, std::int64_t y,
                                      std::uint64_t directions) const noexcept {
  for (int i = 0; i < iterations_; ++i) {
    const std::int64_t x0 = x;
    if (((directions >> i) & 1U) != 0) {
      x = sub_shifted(x, y, i);
      y = add_shifted(y, x0, i);
    } else {
      x = add_shifted(x, y, i);
      y = sub_shifted(y, x0, i);
    }
  }
  return {compensate_raw(x), compensate_raw(y)};
}

RotationRaw CordicConfig::rotate_raw(std::int64_t x, std::int64_t y, std::int64_t theta) const {
  if (theta > angle_limit_raw_ || theta < -angle_limit_raw_) {
    throw std::domain_error("CORDIC rotation angle " + std::to_string(format().to_double(theta)) +
                            " rad is outside the convergence range +-" +
                            std::to_string(format().to_double(angle_limit_raw_)) + " rad");
  }
  return rotate_with(x, y, directions_for(theta));
}

PreparedRotation CordicConfig::prepare(std::int64_t theta) const noexcept {
  PreparedRotation r{0, theta, 0};
  if (theta > half_pi_raw_) {
    r = {1, arith_.sub(theta, half_pi_raw_), 0};
  } else if (theta < -half_pi_raw_) {
    r = {-1, arith_.add(theta, half_pi_raw_), 0};
  }
  r.directions = directions_for(r.residual);
  return r;
}

RotationRaw CordicConfig::apply(const PreparedRotation& rotation, std::int64_t x,
                                std::int64_t y) const noexcept {
  const FixedFormat& f = format();
  if (rotation.quarter_turns > 0) {
    const std::int64_t t = x;
    x = f.wrap(-y);
    y = t;
  } else if (rotation.quarter_turns < 0) {
    const std::int64_t t = x;
    x = y;
    y = f.wrap(-t);
  }
  return rotate_with(x, y, rotation.directions);
}

VectorRaw CordicConfig::vector_raw(std::int64_t x, std::int64_t y) const noexcept {
  if (x == 0 && y == 0) {
    return {0, 0};
  }
  const FixedFormat& f = format();
  std::int64_t z = 0;
  if (x < 0) {
    // fold into the right half-plane with an exact quarter turn
    const std::int64_t t = x;
    if (y >= 0) {
      x = y;
      y = f.wrap(-t);
      z = half_pi_raw_;
    } else {
      x = f.wrap(-y);
      y = t;
      z = -half_pi_raw_;
    }
  }
  for (int i = 0; i < iterations_; ++i) {
    const std::int64_t x0 = x;
    if (y >= 0) {
      x = add_shifted(x, y, i);
      y = sub_shifted(y, x0, i);
      z = arith_.add(z, angles_[static_cast<std::size_t>(i)]);
    } else {
      x = sub_shifted(x, y, i);
      y = add_shifted(y, x0, i);
      z = arith_.sub(z, angles_[static_cast<std::size_t>(i)]);
    }
  }
  return {compensate_raw(x), z};
}

std::int64_t CordicConfig::compensate_raw(std::int64_t v) const noexcept {
  std::int64_t acc = 0;
  if (rounding_ == ShiftRounding::Truncate) {
    for (int j = 0; j < inverse_gain_bits_; ++j) {
      if (((inverse_gain_raw_ >> j) & 1) != 0) {
        acc = arith_.add(acc, v);
      }
      acc = shift_right(acc, 1);
    }
    return acc;
  }
  // the bit dropped by each halving is carried into the next addition
  bool carry = false;
  for (int j = 0; j < inverse_gain_bits_; ++j) {
    if (((inverse_gain_raw_ >> j) & 1) != 0) {
      acc = arith_.add(acc, v, carry);
    } else if (carry) {
      acc = arith_.add(acc, 0, true);
    }
    carry = round_bit(acc, 1);
    acc = shift_right(acc, 1);
  }
  return carry ? arith_.add(acc, 0, true) : acc;
}

namespace {

void check_same(const FixedWord& w, const CordicConfig& cfg) {
  if (!(w.format == cfg.format())) {
    throw ConfigError("operand format does not match the CORDIC configuration");
  }
}

}  // namespace

std::pair<FixedWord, FixedWord> cordic_rotate(const FixedWord& x0, const FixedWord& y0,
                                              const FixedWord& theta, const CordicConfig& cfg) {
  check_same(x0, cfg);
  check_same(y0, cfg);
  check_same(theta, cfg);
  const RotationRaw r = cfg.rotate_raw(x0.raw, y0.raw, theta.raw);
  return {FixedWord{cfg.format(), r.x}, FixedWord{cfg.format(), r.y}};
}

CordicVectorResult cordic_vector(const FixedWord& x0, const FixedWord& y0, const CordicConfig& cfg) {
  check_same(x0, cfg);
  check_same(y0, cfg);
  const VectorRaw v = cfg.vector_raw(x0.raw, y0.raw);
  return {FixedWord{cfg.format(), v.magnitude}, FixedWord{cfg.format(), v.angle}};
}

FixedWord gain_compensate(const FixedWord& v, const CordicConfig& cfg) {
  check_same(v, cfg);
  return {cfg.format(), cfg.compensate_raw(v.raw)};
}

}  // namespace musiclite
