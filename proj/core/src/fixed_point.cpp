#include "musiclite/fixed_point.hpp"

#include <cmath>
#include <string>

#include "musiclite/errors.hpp"

namespace musiclite {

void FixedFormat::validate() const {
  if (width < 4 || width > kMaxAdderWidth) {
    throw ConfigError("fixed-point width must be in [4, " + std::to_string(kMaxAdderWidth) +
                      "], got " + std::to_string(width));
  }
  if (frac < 2 || frac > width - 2) {
    throw ConfigError("fixed-point fraction bits must satisfy 2 <= F <= W-2 (W=" +
                      std::to_string(width) + ", F=" + std::to_string(frac) + ")");
  }
}

double FixedFormat::lsb() const noexcept {
  return std::ldexp(1.0, -frac);
}

std::int64_t FixedFormat::wrap(std::int64_t raw) const noexcept {
  const std::uint64_t mask = (std::uint64_t{1} << width) - 1;
  const std::uint64_t sign = std::uint64_t{1} << (width - 1);
  const std::uint64_t bits = static_cast<std::uint64_t>(raw) & mask;
  return static_cast<std::int64_t>(bits ^ sign) - static_cast<std::int64_t>(sign);
}

std::int64_t FixedFormat::quantize(double value) const noexcept {
  const double scaled = std::nearbyint(std::ldexp(value, frac));
  if (!(scaled < static_cast<double>(raw_max()))) {
    return std::isnan(scaled) ? 0 : raw_max();
  }
  if (scaled < static_cast<double>(raw_min())) {
    return raw_min();
  }
  return static_cast<std::int64_t>(scaled);
}

double FixedFormat::to_double(std::int64_t raw) const noexcept {
  return std::ldexp(static_cast<double>(raw), -frac);
}

FixedWord FixedWord::from_double(double value, FixedFormat format) {
  format.validate();
  return {format, format.quantize(value)};
}

FixedAdder::FixedAdder(FixedFormat format, AdderModel adder)
    : format_(format), adder_(std::move(adder)), mask_(0), sign_(0) {
  format_.validate();
  if (adder_.width() != format_.width) {
    throw ConfigError("adder '" + adder_.name() + "' is " + std::to_string(adder_.width()) +
                      " bits wide but the fixed-point format is " + std::to_string(format_.width) +
                      " bits");
  }
  mask_ = adder_.mask();
  sign_ = std::uint64_t{1} << (format_.width - 1);
}

namespace {

void check_formats(const FixedWord& a, const FixedWord& b, const AdderModel& adder) {
  if (!(a.format == b.format)) {
    throw ConfigError("fixed-point format mismatch");
  }
  if (adder.width() != a.format.width) {
    throw ConfigError("adder width does not match fixed-point width");
  }
}

}  // namespace

FixedWord fx_add(const FixedWord& a, const FixedWord& b, const AdderModel& adder) {
  check_formats(a, b, adder);
  return {a.format, FixedAdder(a.format, adder).add(a.raw, b.raw)};
}

FixedWord fx_sub(const FixedWord& a, const FixedWord& b, const AdderModel& adder) {
  check_formats(a, b, adder);
  return {a.format, FixedAdder(a.format, adder).sub(a.raw, b.raw)};
}

}  // namespace musiclite
