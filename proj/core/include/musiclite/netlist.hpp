#pragma once

// Gate-level adder netlists loaded from JSON:
//
//   {"name": "...", "width": 2, "has_cin": true,
//    "gates": [{"id": "g0", "kind": "XOR", "in": ["a0", "b0"]}, ...],
//    "outputs": {"sum": ["s0", "s1"], "cout": "c1"}}
//
// Primary inputs are named a0..a{w-1}, b0..b{w-1} and (when has_cin) cin.
// Outputs may reference gates or primary inputs directly.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "musiclite/adders.hpp"

namespace musiclite {

enum class NetlistErrorKind {
  Io,
  Parse,
  UnknownSignal,
  DuplicateId,
  BadArity,
  CyclicGraph,
  UndrivenOutput,
  WidthMismatch,
};

[[nodiscard]] std::string_view to_string(NetlistErrorKind kind);

class NetlistError : public std::runtime_error {
 public:
  NetlistError(NetlistErrorKind kind, const std::string& message);
  [[nodiscard]] NetlistErrorKind kind() const noexcept { return kind_; }

 private:
  NetlistErrorKind kind_;
};

struct NetlistGate {
  std::string id;
  GateKind kind;
  std::vector<std::string> inputs;
};

class Netlist {
 public:
  static Netlist parse(std::string_view json_text);
  static Netlist load(const std::filesystem::path& path);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] bool has_cin() const noexcept { return has_cin_; }
  [[nodiscard]] const std::vector<NetlistGate>& gates() const noexcept { return gates_; }

  /// Evaluates the gates in topological order. Operands are masked to width().
  [[nodiscard]] AddResult evaluate(std::uint64_t a, std::uint64_t b, bool cin) const;

 private:
  struct Op {
    GateKind kind;
    std::uint32_t first_input;
    std::uint32_t input_count;
    std::uint32_t output;
  };

  Netlist() = default;
  void compile();

  std::string name_;
  int width_ = 0;
  bool has_cin_ = false;
  std::vector<NetlistGate> gates_;
  std::vector<std::string> sum_outputs_;
  std::string cout_output_;

  std::vector<Op> program_;
  std::vector<std::uint32_t> operand_slots_;
  std::vector<std::uint32_t> sum_slots_;
  std::uint32_t cout_slot_ = 0;
  std::uint32_t slot_count_ = 0;
};

[[nodiscard]] Netlist load_netlist(const std::filesystem::path& path);

/// Rejects operands wider than the netlist.
[[nodiscard]] BitSum netlist_add(const Netlist& netlist, const BitVector& a, const BitVector& b,
                                 bool cin = false);

}  // namespace musiclite
