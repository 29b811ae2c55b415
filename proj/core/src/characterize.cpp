#include "musiclite/characterize.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "musiclite/errors.hpp"

namespace musiclite {

namespace {
// errors of wide adders summed over many samples can overflow 64 bits
__extension__ using u128 = unsigned __int128;


struct Accumulator {
  std::uint64_t count = 0;
  std::uint64_t wrong = 0;
  u128 abs_error_sum = 0;
  std::uint64_t worst = 0;
  long double relative_sum = 0.0L;

  void add(const AdderModel& adder, std::uint64_t a, std::uint64_t b) {
    const AddResult r = adder.add(a, b, false);
    const std::uint64_t approx = r.sum | (static_cast<std::uint64_t>(r.cout) << adder.width());
    const std::uint64_t exact = a + b;
    const std::uint64_t err = approx > exact ? approx - exact : exact - approx;
    ++count;
    if (err != 0) {
      ++wrong;
      abs_error_sum += err;
      worst = std::max(worst, err);
      relative_sum += static_cast<long double>(err) / static_cast<long double>(std::max<std::uint64_t>(exact, 1));
    }
  }

  [[nodiscard]] ErrorMetrics finish() const {
    ErrorMetrics m;
    m.sample_count = count;
    if (count == 0) {
      return m;
    }
    const auto n = static_cast<long double>(count);
    m.error_rate = static_cast<double>(static_cast<long double>(wrong) / n);
    m.mean_absolute_error = static_cast<double>(static_cast<long double>(abs_error_sum) / n);
    m.worst_case_error = worst;
    m.mean_relative_error = static_cast<double>(relative_sum / n);
    m.normalized_error_distance =
        worst == 0 ? 0.0
                   : static_cast<double>(static_cast<long double>(abs_error_sum) / n /
                                         static_cast<long double>(worst));
    return m;
  }
};

}  // namespace

double ErrorMetrics::normalized_mae(int width) const {
  return std::ldexp(mean_absolute_error, -width);
}

ErrorMetrics characterize(const AdderModel& adder, const CharacterizeMode& mode) {
  const int w = adder.width();
  Accumulator acc;
  if (std::holds_alternative<Exhaustive>(mode)) {
    if (2 * w > kMaxExhaustiveInputBits) {
      throw ConfigError("exhaustive characterization of a " + std::to_string(w) +
                        "-bit adder needs 2^" + std::to_string(2 * w) +
                        " evaluations (cap is 2^" + std::to_string(kMaxExhaustiveInputBits) +
                        "); use sampled mode instead");
    }
    const std::uint64_t n = std::uint64_t{1} << w;
    for (std::uint64_t a = 0; a < n; ++a) {
      for (std::uint64_t b = 0; b < n; ++b) {
        acc.add(adder, a, b);
      }
    }
    ErrorMetrics m = acc.finish();
    m.exhaustive = true;
    return m;
  }

  const auto& s = std::get<Sampled>(mode);
  if (s.count == 0) {
    throw ConfigError("sampled characterization needs at least one sample");
  }
  std::mt19937_64 rng(s.seed);
  for (std::uint64_t i = 0; i < s.count; ++i) {
    const std::uint64_t a = rng() & adder.mask();
    const std::uint64_t b = rng() & adder.mask();
    acc.add(adder, a, b);
  }
  ErrorMetrics m = acc.finish();
  m.seed = s.seed;
  return m;
}

std::string characterize_csv_row(const AdderModel& adder, const ErrorMetrics& m) {
  return fmt::format("{},{},{},{},{},{:.9g},{:.9g},{},{:.9g},{:.9g}", adder.name(), adder.width(),
                     m.exhaustive ? "exhaustive" : "sampled", m.sample_count,
                     m.exhaustive ? std::string() : std::to_string(m.seed), m.error_rate,
                     m.mean_absolute_error, m.worst_case_error, m.mean_relative_error,
                     m.normalized_error_distance);
}

}  // namespace musiclite
