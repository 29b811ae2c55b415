#include "musiclite/netlist.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace musiclite {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(NetlistErrorKind kind, const std::string& message) {
  throw NetlistError(kind, message);
}

std::string id_string(const json& value, const std::string& where) {
  if (value.is_string()) {
    return value.get<std::string>();
  }
  if (value.is_number_integer()) {
    return std::to_string(value.get<long long>());
  }
  fail(NetlistErrorKind::Parse, where + ": signal ids must be strings or integers");
}

// Parses "a12" / "b3" into (letter, index). Returns false for anything else.
bool parse_operand_pin(const std::string& id, char& letter, int& index) {
  if (id.size() < 2 || (id[0] != 'a' && id[0] != 'b')) {
    return false;
  }
  int value = 0;
  for (std::size_t i = 1; i < id.size(); ++i) {
    if (id[i] < '0' || id[i] > '9' || value > 1000) {
      return false;
    }
    value = value * 10 + (id[i] - '0');
  }
  letter = id[0];
  index = value;
  return true;
}

}  // namespace

std::string_view to_string(NetlistErrorKind kind) {
  switch (kind) {
    case NetlistErrorKind::Io: return "io";
    case NetlistErrorKind::Parse: return "parse";
    case NetlistErrorKind::UnknownSignal: return "unknown-signal";
    case NetlistErrorKind::DuplicateId: return "duplicate-id";
    case NetlistErrorKind::BadArity: return "bad-arity";
    case NetlistErrorKind::CyclicGraph: return "cyclic-graph";
    case NetlistErrorKind::UndrivenOutput: return "undriven-output";
    case NetlistErrorKind::WidthMismatch: return "width-mismatch";
  }
  return "?";
}

NetlistError::NetlistError(NetlistErrorKind kind, const std::string& message)
    : std::runtime_error("netlist " + std::string(to_string(kind)) + " error: " + message),
      kind_(kind) {}

Netlist Netlist::parse(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(NetlistErrorKind::Parse, e.what());
  }
  if (!doc.is_object()) {
    fail(NetlistErrorKind::Parse, "top level must be an object");
  }

  Netlist n;
  try {
    n.name_ = doc.value("name", std::string("unnamed"));
    if (!doc.contains("width") || !doc["width"].is_number_integer()) {
      fail(NetlistErrorKind::Parse, "missing integer field 'width'");
    }
    n.width_ = doc["width"].get<int>();
    n.has_cin_ = doc.value("has_cin", false);
  } catch (const json::type_error& e) {
    fail(NetlistErrorKind::Parse, e.what());
  }
  if (n.width_ < kMinAdderWidth || n.width_ > kMaxAdderWidth) {
    fail(NetlistErrorKind::WidthMismatch, "width " + std::to_string(n.width_) + " out of range");
  }

  if (!doc.contains("gates") || !doc["gates"].is_array()) {
    fail(NetlistErrorKind::Parse, "missing array field 'gates'");
  }
  for (const json& g : doc["gates"]) {
    if (!g.is_object() || !g.contains("id") || !g.contains("kind") || !g.contains("in")) {
      fail(NetlistErrorKind::Parse, "each gate needs 'id', 'kind' and 'in'");
    }
    NetlistGate gate;
    gate.id = id_string(g["id"], "gate id");
    if (!g["kind"].is_string()) {
      fail(NetlistErrorKind::Parse, "gate '" + gate.id + "': kind must be a string");
    }
    try {
      gate.kind = gate_kind_from_string(g["kind"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(NetlistErrorKind::Parse, "gate '" + gate.id + "': " + e.what());
    }
    if (!g["in"].is_array()) {
      fail(NetlistErrorKind::Parse, "gate '" + gate.id + "': 'in' must be an array");
    }
    for (const json& in : g["in"]) {
      gate.inputs.push_back(id_string(in, "gate '" + gate.id + "' input"));
    }
    n.gates_.push_back(std::move(gate));
  }

  const json* outputs = doc.contains("outputs") ? &doc["outputs"] : nullptr;
  if (outputs == nullptr || !outputs->is_object()) {
    fail(NetlistErrorKind::UndrivenOutput, "missing 'outputs' object");
  }
  if (!outputs->contains("sum") || !(*outputs)["sum"].is_array()) {
    fail(NetlistErrorKind::UndrivenOutput, "outputs.sum is not driven");
  }
  for (const json& s : (*outputs)["sum"]) {
    if (s.is_null()) {
      fail(NetlistErrorKind::UndrivenOutput, "outputs.sum has an undriven bit");
    }
    n.sum_outputs_.push_back(id_string(s, "outputs.sum"));
  }
  if (static_cast<int>(n.sum_outputs_.size()) != n.width_) {
    fail(NetlistErrorKind::WidthMismatch, "outputs.sum has " + std::to_string(n.sum_outputs_.size()) +
                                              " bits but width is " + std::to_string(n.width_));
  }
  if (!outputs->contains("cout") || (*outputs)["cout"].is_null()) {
    fail(NetlistErrorKind::UndrivenOutput, "outputs.cout is not driven");
  }
  n.cout_output_ = id_string((*outputs)["cout"], "outputs.cout");

  n.compile();
  return n;
}

Netlist Netlist::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    fail(NetlistErrorKind::Io, "cannot open '" + path.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

void Netlist::compile() {
  // slots: a bits, b bits, cin, then one per gate in topological order
  const auto w = static_cast<std::uint32_t>(width_);
  const std::uint32_t cin_slot = 2 * w;
  std::unordered_map<std::string, std::size_t> gate_index;
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    const NetlistGate& g = gates_[i];
    char letter = 0;
    int bit = 0;
    if (parse_operand_pin(g.id, letter, bit) || g.id == "cin") {
      fail(NetlistErrorKind::DuplicateId, "gate id '" + g.id + "' shadows a primary input");
    }
    if (!gate_index.emplace(g.id, i).second) {
      fail(NetlistErrorKind::DuplicateId, "gate id '" + g.id + "' declared twice");
    }
    const bool unary = g.kind == GateKind::Not || g.kind == GateKind::Buf;
    if ((unary && g.inputs.size() != 1) || (!unary && g.inputs.size() < 2)) {
      fail(NetlistErrorKind::BadArity, "gate '" + g.id + "' (" + std::string(to_string(g.kind)) +
                                           ") has " + std::to_string(g.inputs.size()) + " inputs");
    }
  }

  // resolves a signal to either a primary-input slot or a gate index
  struct Ref {
    bool is_gate;
    std::uint32_t value;
  };
  const auto resolve = [&](const std::string& id, const std::string& context,
                           NetlistErrorKind missing_kind) -> Ref {
    char letter = 0;
    int bit = 0;
    if (parse_operand_pin(id, letter, bit)) {
      if (bit >= width_) {
        fail(NetlistErrorKind::WidthMismatch,
             context + " references '" + id + "' beyond width " + std::to_string(width_));
      }
      return {false, (letter == 'a' ? 0U : w) + static_cast<std::uint32_t>(bit)};
    }
    if (id == "cin") {
      if (!has_cin_) {
        fail(NetlistErrorKind::UnknownSignal, context + " references 'cin' but has_cin is false");
      }
      return {false, cin_slot};
    }
    const auto it = gate_index.find(id);
    if (it == gate_index.end()) {
      fail(missing_kind, context + " references undeclared signal '" + id + "'");
    }
    return {true, static_cast<std::uint32_t>(it->second)};
  };

  std::vector<std::vector<Ref>> fanin(gates_.size());
  std::vector<std::vector<std::uint32_t>> fanout(gates_.size());
  std::vector<std::uint32_t> pending(gates_.size(), 0);
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    for (const std::string& in : gates_[i].inputs) {
      const Ref r = resolve(in, "gate '" + gates_[i].id + "'", NetlistErrorKind::UnknownSignal);
      fanin[i].push_back(r);
      if (r.is_gate) {
        fanout[r.value].push_back(static_cast<std::uint32_t>(i));
        ++pending[i];
      }
    }
  }

  // Kahn's algorithm; ties resolved by declaration order
  std::vector<std::uint32_t> order;
  order.reserve(gates_.size());
  std::vector<std::uint32_t> ready;
  for (std::size_t i = gates_.size(); i-- > 0;) {
    if (pending[i] == 0) {
      ready.push_back(static_cast<std::uint32_t>(i));
    }
  }
  while (!ready.empty()) {
    const std::uint32_t g = ready.back();
    ready.pop_back();
    order.push_back(g);
    for (std::uint32_t succ : fanout[g]) {
      if (--pending[succ] == 0) {
        ready.push_back(succ);
      }
    }
  }
  if (order.size() != gates_.size()) {
    std::string stuck;
    for (std::size_t i = 0; i < gates_.size(); ++i) {
      if (pending[i] != 0) {
        stuck += (stuck.empty() ? "" : ", ") + gates_[i].id;
      }
    }
    fail(NetlistErrorKind::CyclicGraph, "combinational loop through gates: " + stuck);
  }

  const std::uint32_t first_gate_slot = cin_slot + 1;
  std::vector<std::uint32_t> gate_slot(gates_.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    gate_slot[order[pos]] = first_gate_slot + static_cast<std::uint32_t>(pos);
  }
  const auto slot_of = [&](const Ref& r) { return r.is_gate ? gate_slot[r.value] : r.value; };

  program_.clear();
  operand_slots_.clear();
  for (std::uint32_t g : order) {
    Op op{gates_[g].kind, static_cast<std::uint32_t>(operand_slots_.size()),
          static_cast<std::uint32_t>(fanin[g].size()), gate_slot[g]};
    for (const Ref& r : fanin[g]) {
      operand_slots_.push_back(slot_of(r));
    }
    program_.push_back(op);
  }
  sum_slots_.clear();
  for (std::size_t bit = 0; bit < sum_outputs_.size(); ++bit) {
    sum_slots_.push_back(slot_of(resolve(sum_outputs_[bit], "outputs.sum[" + std::to_string(bit) + "]",
                                         NetlistErrorKind::UndrivenOutput)));
  }
  cout_slot_ = slot_of(resolve(cout_output_, "outputs.cout", NetlistErrorKind::UndrivenOutput));
  slot_count_ = first_gate_slot + static_cast<std::uint32_t>(gates_.size());
}

AddResult Netlist::evaluate(std::uint64_t a, std::uint64_t b, bool cin) const {
  thread_local std::vector<std::uint8_t> values;
  values.assign(slot_count_, 0);
  const auto w = static_cast<std::uint32_t>(width_);
  for (std::uint32_t i = 0; i < w; ++i) {
    values[i] = static_cast<std::uint8_t>((a >> i) & 1U);
    values[w + i] = static_cast<std::uint8_t>((b >> i) & 1U);
  }
  values[2 * w] = (has_cin_ && cin) ? 1 : 0;

  for (const Op& op : program_) {
    const std::uint32_t* in = operand_slots_.data() + op.first_input;
    std::uint8_t v = values[in[0]];
    switch (op.kind) {
      case GateKind::Buf: break;
      case GateKind::Not: v ^= 1U; break;
      case GateKind::And:
      case GateKind::Nand:
        for (std::uint32_t i = 1; i < op.input_count; ++i) v &= values[in[i]];
        if (op.kind == GateKind::Nand) v ^= 1U;
        break;
      case GateKind::Or:
      case GateKind::Nor:
        for (std::uint32_t i = 1; i < op.input_count; ++i) v |= values[in[i]];
        if (op.kind == GateKind::Nor) v ^= 1U;
        break;
      case GateKind::Xor:
      case GateKind::Xnor:
        for (std::uint32_t i = 1; i < op.input_count; ++i) v ^= values[in[i]];
        if (op.kind == GateKind::Xnor) v ^= 1U;
        break;
    }
    values[op.output] = v;
  }

  AddResult r;
  for (std::uint32_t bit = 0; bit < w; ++bit) {
    r.sum |= static_cast<std::uint64_t>(values[sum_slots_[bit]]) << bit;
  }
  r.cout = values[cout_slot_] != 0;
  return r;
}

Netlist load_netlist(const std::filesystem::path& path) {
  return Netlist::load(path);
}

BitSum netlist_add(const Netlist& netlist, const BitVector& a, const BitVector& b, bool cin) {
  if (a.width() != netlist.width() || b.width() != netlist.width()) {
    throw NetlistError(NetlistErrorKind::WidthMismatch,
                       "operands of width " + std::to_string(a.width()) + "/" +
                           std::to_string(b.width()) + " for a " + std::to_string(netlist.width()) +
                           "-bit netlist");
  }
  const AddResult r = netlist.evaluate(a.bits(), b.bits(), cin);
  return {BitVector(netlist.width(), r.sum), r.cout};
}

}  // namespace musiclite
