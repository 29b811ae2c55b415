#pragma once

// Unit-gate area/energy proxy. The numbers are only meaningful relative to
// each other; they are not a synthesis result.

#include <map>

#include "musiclite/adders.hpp"

namespace musiclite {

/// Area weight of one gate of the given kind, in 2-input-gate equivalents.
[[nodiscard]] double unit_gate_area(GateKind kind);

/// Energy per area unit; energy_units = area_units * kSwitchingActivity.
inline constexpr double kSwitchingActivity = 0.5;

[[nodiscard]] GateCost gate_cost_from_counts(std::map<GateKind, long> counts);

/// Structural gate counts for the adder's family:
///   ripple      5 gates per full-adder bit (2 XOR, 2 AND, 1 OR)
///   CLA         per bit P/G/sum gates plus 4-bit-group lookahead carries
///   ACLA        per block: ECU + CJU + ripple sub-adder + the combining OR
///   LowerOr     one OR per approximated bit plus a CLA for the upper part
///   Truncated   CLA for the upper part only
///   Netlist     the literal gate list
[[nodiscard]] GateCost cost_model(const AdderModel& adder);

}  // namespace musiclite
