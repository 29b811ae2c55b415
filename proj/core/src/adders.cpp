#include "musiclite/adders.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "musiclite/cost_model.hpp"
#include "musiclite/errors.hpp"
#include "musiclite/netlist.hpp"

namespace musiclite {

namespace {

constexpr std::uint64_t width_mask(int width) {
  return (std::uint64_t{1} << width) - 1;
}

void check_width(int width) {
  if (width < kMinAdderWidth || width > kMaxAdderWidth) {
    throw std::invalid_argument("adder width must be in [" + std::to_string(kMinAdderWidth) +
                                ", " + std::to_string(kMaxAdderWidth) + "], got " +
                                std::to_string(width));
  }
}

void check_same_width(const BitVector& a, const BitVector& b) {
  if (a.width() != b.width()) {
    throw std::invalid_argument("operand width mismatch: " + std::to_string(a.width()) + " vs " +
                                std::to_string(b.width()));
  }
}

AddResult exact_raw(std::uint64_t a, std::uint64_t b, bool cin, int width) {
  const std::uint64_t full = a + b + (cin ? 1U : 0U);
  return {full & width_mask(width), ((full >> width) & 1U) != 0};
}

// Block-local carry units on a k-bit block held LSB-aligned in a word.
// MSB-first index i corresponds to word bit (k - 1 - i).
inline bool ecu_raw(std::uint64_t a, std::uint64_t b, int k) {
  const std::uint64_t g = a & b;
  const std::uint64_t p = a ^ b;
  const auto at = [k](std::uint64_t v, int i) { return ((v >> (k - 1 - i)) & 1U) != 0; };
  return at(g, 0) || (at(p, 0) && at(g, 1)) || (at(p, 0) && at(p, 1) && at(g, 2));
}

inline bool cju_raw(std::uint64_t a, std::uint64_t b, int k, CjuVariant variant) {
  const std::uint64_t g = a & b;
  const std::uint64_t p = a ^ b;
  const auto at = [k](std::uint64_t v, int i) { return ((v >> (k - 1 - i)) & 1U) != 0; };
  // generates at MSB-first indices 3..k-1 live in word bits 0..k-4
  const bool factor = (g & width_mask(k - 3)) != 0;
  const bool ect = at(a | b, 2);
  bool carry = factor && at(p, 0) && at(p, 1) && ect;
  if (variant == CjuVariant::PropagateGated) {
    carry = carry && at(p, 2);
  }
  return carry;
}

AddResult acla_raw(std::uint64_t a, std::uint64_t b, bool cin, int width, const AclaParams& params) {
  const int k = params.block_size;
  const std::uint64_t block_mask = width_mask(k);
  std::uint64_t sum = 0;
  bool carry_in = cin;
  bool carry_out = false;
  for (int shift = 0; shift < width; shift += k) {
    const std::uint64_t block_a = (a >> shift) & block_mask;
    const std::uint64_t block_b = (b >> shift) & block_mask;
    const std::uint64_t block_sum = (block_a + block_b + (carry_in ? 1U : 0U)) & block_mask;
    sum |= block_sum << shift;
    // the block carry-out never looks at the incoming carry
    carry_out = ecu_raw(block_a, block_b, k) || cju_raw(block_a, block_b, k, params.cju_variant);
    carry_in = carry_out;
  }
  return {sum, carry_out};
}

AddResult lower_part_raw(std::uint64_t a, std::uint64_t b, bool cin, int width, int approx_bits,
                         bool or_lower) {
  if (approx_bits == 0) {
    return exact_raw(a, b, cin, width);
  }
  const std::uint64_t low_mask = width_mask(approx_bits);
  const std::uint64_t low = or_lower ? ((a | b) & low_mask) : 0U;
  const int upper_width = width - approx_bits;
  const std::uint64_t upper = (a >> approx_bits) + (b >> approx_bits);
  const std::uint64_t upper_sum = upper & width_mask(upper_width);
  return {(upper_sum << approx_bits) | low, ((upper >> upper_width) & 1U) != 0};
}

void check_acla_params(int width, const AclaParams& params) {
  if (params.block_size < 4) {
    throw ConfigError("ACLA block size must be >= 4, got " + std::to_string(params.block_size));
  }
  if (width % params.block_size != 0) {
    throw ConfigError("ACLA width " + std::to_string(width) + " is not divisible by block size " +
                      std::to_string(params.block_size));
  }
}

void check_approx_bits(int width, int approx_bits) {
  if (approx_bits < 0 || approx_bits >= width) {
    throw ConfigError("approximated bit count must be in [0, " + std::to_string(width) + "), got " +
                      std::to_string(approx_bits));
  }
}

}  // namespace

// ---- BitVector ---------------------------------------------------------------

BitVector::BitVector(int width, std::uint64_t value) : width_(width), bits_(0) {
  check_width(width);
  bits_ = value & width_mask(width);
}

std::int64_t BitVector::as_signed() const noexcept {
  const std::uint64_t sign = std::uint64_t{1} << (width_ - 1);
  return static_cast<std::int64_t>(bits_ ^ sign) - static_cast<std::int64_t>(sign);
}

// ---- names -------------------------------------------------------------------

std::string_view to_string(AdderFamily family) {
  switch (family) {
    case AdderFamily::RippleExact: return "RippleExact";
    case AdderFamily::CarryLookaheadExact: return "CarryLookaheadExact";
    case AdderFamily::Acla: return "ACLA";
    case AdderFamily::LowerOr: return "LowerOr";
    case AdderFamily::Truncated: return "Truncated";
    case AdderFamily::Netlist: return "Netlist";
  }
  return "?";
}

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::And: return "AND";
    case GateKind::Or: return "OR";
    case GateKind::Not: return "NOT";
    case GateKind::Xor: return "XOR";
    case GateKind::Nand: return "NAND";
    case GateKind::Nor: return "NOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Buf: return "BUF";
  }
  return "?";
}

GateKind gate_kind_from_string(std::string_view name) {
  for (GateKind kind : {GateKind::And, GateKind::Or, GateKind::Not, GateKind::Xor, GateKind::Nand,
                        GateKind::Nor, GateKind::Xnor, GateKind::Buf}) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  throw std::invalid_argument("unknown gate kind '" + std::string(name) + "'");
}

// ---- AdderModel -------------------------------------------------------------

AdderModel::AdderModel(AdderFamily family, int width, std::string name)
    : family_(family), width_(width), mask_(0), name_(std::move(name)) {
  check_width(width);
  mask_ = width_mask(width);
}

AdderModel AdderModel::ripple(int width) {
  AdderModel m(AdderFamily::RippleExact, width, "exact:" + std::to_string(width));
  m.cost_ = cost_model(m);
  return m;
}

AdderModel AdderModel::cla(int width) {
  AdderModel m(AdderFamily::CarryLookaheadExact, width, "cla:" + std::to_string(width));
  m.cost_ = cost_model(m);
  return m;
}

AdderModel AdderModel::acla(int width, AclaParams params) {
  check_acla_params(width, params);
  std::string name = "acla:" + std::to_string(width) + ":" + std::to_string(params.block_size);
  if (params.cju_variant == CjuVariant::PropagateGated) {
    name += ":gated";
  }
  AdderModel m(AdderFamily::Acla, width, std::move(name));
  m.acla_ = params;
  m.cost_ = cost_model(m);
  return m;
}

AdderModel AdderModel::lower_or(int width, int approx_bits) {
  check_width(width);
  check_approx_bits(width, approx_bits);
  AdderModel m(AdderFamily::LowerOr, width,
               "loa:" + std::to_string(width) + ":" + std::to_string(approx_bits));
  m.approx_bits_ = approx_bits;
  m.cost_ = cost_model(m);
  return m;
}

AdderModel AdderModel::truncated(int width, int approx_bits) {
  check_width(width);
  check_approx_bits(width, approx_bits);
  AdderModel m(AdderFamily::Truncated, width,
               "trunc:" + std::to_string(width) + ":" + std::to_string(approx_bits));
  m.approx_bits_ = approx_bits;
  m.cost_ = cost_model(m);
  return m;
}

AdderModel AdderModel::from_netlist(std::shared_ptr<const Netlist> netlist) {
  if (!netlist) {
    throw std::invalid_argument("null netlist");
  }
  AdderModel m(AdderFamily::Netlist, netlist->width(), "netlist:" + netlist->name());
  m.netlist_ = std::move(netlist);
  m.cost_ = cost_model(m);
  return m;
}

AddResult AdderModel::add(std::uint64_t a, std::uint64_t b, bool cin) const noexcept {
  switch (family_) {
    case AdderFamily::RippleExact:
    case AdderFamily::CarryLookaheadExact:
      return exact_raw(a, b, cin, width_);
    case AdderFamily::Acla:
      return acla_raw(a, b, cin, width_, acla_);
    case AdderFamily::LowerOr:
      return lower_part_raw(a, b, cin, width_, approx_bits_, true);
    case AdderFamily::Truncated:
      return lower_part_raw(a, b, cin, width_, approx_bits_, false);
    case AdderFamily::Netlist:
      return netlist_->evaluate(a, b, cin);
  }
  return {};
}

BitSum AdderModel::add(const BitVector& a, const BitVector& b, bool cin) const {
  check_same_width(a, b);
  if (a.width() != width_) {
    throw std::invalid_argument("operand width " + std::to_string(a.width()) +
                                " does not match adder width " + std::to_string(width_));
  }
  const AddResult r = add(a.bits(), b.bits(), cin);
  return {BitVector(width_, r.sum), r.cout};
}

// ---- free functions -----------------------------------------------------------

BitSum add_exact(const BitVector& a, const BitVector& b, bool cin) {
  check_same_width(a, b);
  const AddResult r = exact_raw(a.bits(), b.bits(), cin, a.width());
  return {BitVector(a.width(), r.sum), r.cout};
}

bool acla_ecu_carry(const BitVector& block_a, const BitVector& block_b) {
  check_same_width(block_a, block_b);
  if (block_a.width() < 4) {
    throw std::invalid_argument("ACLA block must have at least 4 bits");
  }
  return ecu_raw(block_a.bits(), block_b.bits(), block_a.width());
}

bool acla_cju_carry(const BitVector& block_a, const BitVector& block_b, CjuVariant variant) {
  check_same_width(block_a, block_b);
  if (block_a.width() < 4) {
    throw std::invalid_argument("ACLA block must have at least 4 bits");
  }
  return cju_raw(block_a.bits(), block_b.bits(), block_a.width(), variant);
}

BitSum acla_add(const BitVector& a, const BitVector& b, AclaParams params, bool cin) {
  check_same_width(a, b);
  check_acla_params(a.width(), params);
  const AddResult r = acla_raw(a.bits(), b.bits(), cin, a.width(), params);
  return {BitVector(a.width(), r.sum), r.cout};
}

BitSum lower_or_add(const BitVector& a, const BitVector& b, int approx_bits, bool cin) {
  check_same_width(a, b);
  check_approx_bits(a.width(), approx_bits);
  const AddResult r = lower_part_raw(a.bits(), b.bits(), cin, a.width(), approx_bits, true);
  return {BitVector(a.width(), r.sum), r.cout};
}

BitSum truncated_add(const BitVector& a, const BitVector& b, int approx_bits, bool cin) {
  check_same_width(a, b);
  check_approx_bits(a.width(), approx_bits);
  const AddResult r = lower_part_raw(a.bits(), b.bits(), cin, a.width(), approx_bits, false);
  return {BitVector(a.width(), r.sum), r.cout};
}

double p_correct(int bit_index) {
  if (bit_index < 3) {
    throw std::invalid_argument("p_correct is defined for bit indices >= 3 (the top three bits "
                                "belong to the exact carry unit), got " +
                                std::to_string(bit_index));
  }
  return std::pow(0.75, bit_index - 3);
}

}  // namespace musiclite
