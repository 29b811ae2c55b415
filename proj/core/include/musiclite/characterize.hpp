#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>

#include "musiclite/adders.hpp"

namespace musiclite {

/// Exhaustive sweeps are capped at 2^26 operand pairs (2·width <= 26).
inline constexpr int kMaxExhaustiveInputBits = 26;
inline constexpr std::uint64_t kDefaultSampleCount = std::uint64_t{1} << 22;

struct Exhaustive {};
struct Sampled {
  std::uint64_t count = kDefaultSampleCount;
  std::uint64_t seed = 0;
};
using CharacterizeMode = std::variant<Exhaustive, Sampled>;

/// Error statistics against exact addition. Results are compared as
/// (width+1)-bit unsigned values (sum plus carry-out), with carry-in 0.
struct ErrorMetrics {
  double error_rate = 0.0;            // ER
  double mean_absolute_error = 0.0;   // MAE
  std::uint64_t worst_case_error = 0; // WCE
  double mean_relative_error = 0.0;   // MRE, |err| / max(exact, 1)
  double normalized_error_distance = 0.0;  // MAE / WCE, 0 when WCE == 0
  std::uint64_t sample_count = 0;
  bool exhaustive = false;
  std::uint64_t seed = 0;

  [[nodiscard]] double normalized_mae(int width) const;
};

/// Throws ConfigError when an exhaustive sweep exceeds the cap.
[[nodiscard]] ErrorMetrics characterize(const AdderModel& adder, const CharacterizeMode& mode);

inline constexpr const char* kCharacterizeCsvHeader = "adder,width,mode,samples,seed,er,mae,wce,mre,ned";

[[nodiscard]] std::string characterize_csv_row(const AdderModel& adder, const ErrorMetrics& m);

}  // namespace musiclite
