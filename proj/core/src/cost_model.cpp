#include "musiclite/cost_model.hpp"

#include <algorithm>

#include "musiclite/netlist.hpp"

namespace musiclite {

namespace {

using Counts = std::map<GateKind, long>;

void add_ripple(Counts& c, int bits) {
  c[GateKind::Xor] += 2L * bits;
  c[GateKind::And] += 2L * bits;
  c[GateKind::Or] += bits;
}

// Per-bit propagate/generate/sum gates plus a lookahead unit per 4-bit group.
// Carry i of a group (1-based) is an OR of i+1 product terms holding 0..i
// two-input ANDs each: i(i+1)/2 ANDs and i ORs.
void add_cla(Counts& c, int bits) {
  c[GateKind::Xor] += 2L * bits;
  c[GateKind::And] += bits;
  for (int base = 0; base < bits; base += 4) {
    const int group = std::min(4, bits - base);
    for (int i = 1; i <= group; ++i) {
      c[GateKind::And] += static_cast<long>(i) * (i + 1) / 2;
      c[GateKind::Or] += i;
    }
  }
}

void add_acla_block(Counts& c, int k, CjuVariant variant) {
  add_ripple(c, k);  // exact k-bit sub-adder
  // ECU: P0, P1; G0, G1, G2; P0·G1; P0·P1·G2; two ORs
  c[GateKind::Xor] += 2;
  c[GateKind::And] += 3 + 1 + 2;
  c[GateKind::Or] += 2;
  // CJU: k-3 lower generates, OR-reduced; ECT; product with P0, P1, ECT
  c[GateKind::And] += k - 3;
  c[GateKind::Or] += k - 4;
  c[GateKind::Or] += 1;
  c[GateKind::And] += 3;
  if (variant == CjuVariant::PropagateGated) {
    c[GateKind::Xor] += 1;
    c[GateKind::And] += 1;
  }
  c[GateKind::Or] += 1;  // C_out = ECU | CJU
}

}  // namespace

double unit_gate_area(GateKind kind) {
  switch (kind) {
    case GateKind::And:
    case GateKind::Or:
    case GateKind::Nand:
    case GateKind::Nor:
      return 1.0;
    case GateKind::Xor:
    case GateKind::Xnor:
      return 2.0;
    case GateKind::Not:
    case GateKind::Buf:
      return 0.5;
  }
  return 0.0;
}

GateCost gate_cost_from_counts(std::map<GateKind, long> counts) {
  GateCost cost;
  for (const auto& [kind, n] : counts) {
    cost.area_units += static_cast<double>(n) * unit_gate_area(kind);
  }
  cost.energy_units = cost.area_units * kSwitchingActivity;
  cost.gate_counts = std::move(counts);
  return cost;
}

GateCost cost_model(const AdderModel& adder) {
  Counts c;
  const int w = adder.width();
  switch (adder.family()) {
    case AdderFamily::RippleExact:
      add_ripple(c, w);
      break;
    case AdderFamily::CarryLookaheadExact:
      add_cla(c, w);
      break;
    case AdderFamily::Acla: {
      const AclaParams& p = adder.acla_params();
      for (int block = 0; block < w / p.block_size; ++block) {
        add_acla_block(c, p.block_size, p.cju_variant);
      }
      break;
    }
    case AdderFamily::LowerOr:
      c[GateKind::Or] += adder.approx_bits();
      add_cla(c, w - adder.approx_bits());
      break;
    case AdderFamily::Truncated:
      add_cla(c, w - adder.approx_bits());
      break;
    case AdderFamily::Netlist:
      for (const NetlistGate& g : adder.netlist()->gates()) {
        ++c[g.kind];
      }
      break;
  }
  // drop zero entries so reports only list gates that exist
  std::erase_if(c, [](const auto& kv) { return kv.second == 0; });
  return gate_cost_from_counts(std::move(c));
}

}  // namespace musiclite
