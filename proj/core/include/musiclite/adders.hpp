#pragma once

// Behavioral models of exact and approximate integer adders.
//
// Every adder operates on unsigned bit patterns of a fixed width (2..62 bits).
// Signed consumers reinterpret the pattern as two's complement; carry-out is
// reported separately and never folded into the sum.

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace musiclite {

inline constexpr int kMinAdderWidth = 2;
inline constexpr int kMaxAdderWidth = 62;

/// Fixed-width two's-complement bit pattern. The stored value is always
/// masked to `width` bits.
class BitVector {
 public:
  BitVector(int width, std::uint64_t value);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] std::uint64_t bits() const noexcept { return bits_; }
  [[nodiscard]] std::int64_t as_signed() const noexcept;
  [[nodiscard]] bool bit(int index) const noexcept { return ((bits_ >> index) & 1U) != 0; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  int width_;
  std::uint64_t bits_;
};

struct AddResult {
  std::uint64_t sum = 0;
  bool cout = false;
  friend bool operator==(const AddResult&, const AddResult&) = default;
};

struct BitSum {
  BitVector sum;
  bool cout;
  friend bool operator==(const BitSum&, const BitSum&) = default;
};

enum class AdderFamily { RippleExact, CarryLookaheadExact, Acla, LowerOr, Truncated, Netlist };

[[nodiscard]] std::string_view to_string(AdderFamily family);

enum class GateKind { And, Or, Not, Xor, Nand, Nor, Xnor, Buf };

[[nodiscard]] std::string_view to_string(GateKind kind);
[[nodiscard]] GateKind gate_kind_from_string(std::string_view name);  // throws std::invalid_argument

struct GateCost {
  std::map<GateKind, long> gate_counts;
  double area_units = 0.0;
  double energy_units = 0.0;
};

/// How the carry judge unit gates its lower-bit generate prediction.
///   Standard:       factor · P0 · P1 · ECT
///   PropagateGated: factor · P0 · P1 · P2 · ECT (strictly stricter, since P2 implies ECT)
enum class CjuVariant { Standard, PropagateGated };

struct AclaParams {
  int block_size = 4;
  CjuVariant cju_variant = CjuVariant::Standard;
};

class Netlist;

/// A behavioral n-bit adder: pure function (a, b, cin) -> (sum, cout).
class AdderModel {
 public:
  static AdderModel ripple(int width);
  static AdderModel cla(int width);
  static AdderModel acla(int width, AclaParams params);
  static AdderModel lower_or(int width, int approx_bits);
  static AdderModel truncated(int width, int approx_bits);
  static AdderModel from_netlist(std::shared_ptr<const Netlist> netlist);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] std::uint64_t mask() const noexcept { return mask_; }
  [[nodiscard]] AdderFamily family() const noexcept { return family_; }
  [[nodiscard]] const AclaParams& acla_params() const noexcept { return acla_; }
  [[nodiscard]] int approx_bits() const noexcept { return approx_bits_; }
  [[nodiscard]] const Netlist* netlist() const noexcept { return netlist_.get(); }
  [[nodiscard]] const GateCost& cost() const noexcept { return cost_; }
  [[nodiscard]] bool is_exact() const noexcept {
    return family_ == AdderFamily::RippleExact || family_ == AdderFamily::CarryLookaheadExact;
  }

  /// Hot path: operands must already be masked to width().
  [[nodiscard]] AddResult add(std::uint64_t a, std::uint64_t b, bool cin = false) const noexcept;

  /// Checked path: rejects operands whose width differs from the adder's.
  [[nodiscard]] BitSum add(const BitVector& a, const BitVector& b, bool cin = false) const;

 private:
  AdderModel(AdderFamily family, int width, std::string name);

  AdderFamily family_;
  int width_;
  std::uint64_t mask_;
  std::string name_;
  AclaParams acla_{};
  int approx_bits_ = 0;
  std::shared_ptr<const Netlist> netlist_;
  GateCost cost_;
};

// ---- free-function forms of the individual adders -------------------------

/// True binary addition with carry.
[[nodiscard]] BitSum add_exact(const BitVector& a, const BitVector& b, bool cin = false);

/// Exact carry unit of one ACLA block. Block bits are indexed MSB-first
/// (index 0 = block MSB): C = G0 + P0·G1 + P0·P1·G2.
[[nodiscard]] bool acla_ecu_carry(const BitVector& block_a, const BitVector& block_b);

/// Carry judge unit of one ACLA block: OR of the generates below the top three
/// bits, gated by P0·P1·ECT (ECT = A2|B2), plus P2 for the gated variant.
[[nodiscard]] bool acla_cju_carry(const BitVector& block_a, const BitVector& block_b,
                                  CjuVariant variant = CjuVariant::Standard);

[[nodiscard]] BitSum acla_add(const BitVector& a, const BitVector& b, AclaParams params,
                              bool cin = false);

/// Lower `approx_bits` sum bits are a|b; the rest is added exactly with no carry in.
[[nodiscard]] BitSum lower_or_add(const BitVector& a, const BitVector& b, int approx_bits,
                                  bool cin = false);

/// Lower `approx_bits` sum bits are forced to zero; the rest is added exactly.
[[nodiscard]] BitSum truncated_add(const BitVector& a, const BitVector& b, int approx_bits,
                                   bool cin = false);

/// Probability that a carry generated at MSB-relative index `bit_index` (>= 3)
/// survives the unchecked bits between it and the top three bits: (3/4)^(i-3).
[[nodiscard]] double p_correct(int bit_index);

}  // namespace musiclite
