#include <doctest.h>

#include "musiclite/adder_spec.hpp"
#include "musiclite/cost_model.hpp"
#include "musiclite/netlist.hpp"

using namespace musiclite;

namespace {

std::string data(const char* name) {
  return std::string(MUSICLITE_TEST_DIR) + "/data/" + name;
}

NetlistErrorKind parse_error(const std::string& text) {
  try {
    (void)Netlist::parse(text);
  } catch (const NetlistError& e) {
    return e.kind();
  }
  FAIL("netlist parsed");
  return NetlistErrorKind::Io;
}

}  // namespace

TEST_CASE("ripple netlist equals integer addition") {
  const Netlist n = load_netlist(data("rca4.json"));
  CHECK(n.width() == 4);
  CHECK(n.has_cin());
  for (std::uint64_t a = 0; a < 16; ++a) {
    for (std::uint64_t b = 0; b < 16; ++b) {
      for (int cin = 0; cin < 2; ++cin) {
        const AddResult r = n.evaluate(a, b, cin != 0);
        const std::uint64_t full = a + b + static_cast<std::uint64_t>(cin);
        REQUIRE(r.sum == (full & 15U));
        REQUIRE(r.cout == (full > 15U));
      }
    }
  }
}

TEST_CASE("lower-or netlist equals the behavioral lower-or adder") {
  const AdderModel from_file = parse_adder_spec("netlist:" + data("loa8_3.json"));
  const AdderModel behavioral = AdderModel::lower_or(8, 3);
  CHECK(from_file.family() == AdderFamily::Netlist);
  for (std::uint64_t a = 0; a < 256; ++a) {
    for (std::uint64_t b = 0; b < 256; ++b) {
      REQUIRE(from_file.add(a, b) == behavioral.add(a, b));
    }
  }
}

TEST_CASE("netlist cost is the literal gate list") {
  const AdderModel m = parse_adder_spec("netlist:" + data("rca4.json"));
  CHECK(m.cost().gate_counts.at(GateKind::Xor) == 8);
  CHECK(m.cost().gate_counts.at(GateKind::And) == 8);
  CHECK(m.cost().gate_counts.at(GateKind::Or) == 4);
  CHECK(m.cost().area_units == 28.0);
}

TEST_CASE("gates may be listed out of order") {
  const Netlist n = Netlist::parse(R"({"name": "x", "width": 2, "has_cin": false,
    "gates": [{"id": "s1", "kind": "XOR", "in": ["p1", "g0"]},
              {"id": "p1", "kind": "XOR", "in": ["a1", "b1"]},
              {"id": "g0", "kind": "AND", "in": ["a0", "b0"]},
              {"id": "s0", "kind": "XOR", "in": ["a0", "b0"]},
              {"id": "g1", "kind": "AND", "in": ["a1", "b1"]},
              {"id": "t1", "kind": "AND", "in": ["p1", "g0"]},
              {"id": "c2", "kind": "OR", "in": ["g1", "t1"]}],
    "outputs": {"sum": ["s0", "s1"], "cout": "c2"}})");
  for (std::uint64_t a = 0; a < 4; ++a) {
    for (std::uint64_t b = 0; b < 4; ++b) {
      CHECK(n.evaluate(a, b, false).sum == ((a + b) & 3U));
      CHECK(n.evaluate(a, b, false).cout == (a + b > 3U));
    }
  }
}

TEST_CASE("netlist errors") {
  const std::string head = R"({"name": "x", "width": 2, "has_cin": false, "gates": )";
  CHECK(parse_error("{") == NetlistErrorKind::Parse);
  CHECK(parse_error(head + R"([{"id": "s", "kind": "XOR", "in": ["a0", "q"]}],
      "outputs": {"sum": ["s", "s"], "cout": "s"}})") == NetlistErrorKind::UnknownSignal);
  CHECK(parse_error(head + R"([{"id": "s", "kind": "XOR", "in": ["a0", "b0"]},
      {"id": "s", "kind": "AND", "in": ["a0", "b0"]}],
      "outputs": {"sum": ["s", "s"], "cout": "s"}})") == NetlistErrorKind::DuplicateId);
  CHECK(parse_error(head + R"([{"id": "s", "kind": "NOT", "in": ["a0", "b0"]}],
      "outputs": {"sum": ["s", "s"], "cout": "s"}})") == NetlistErrorKind::BadArity);
  CHECK(parse_error(head + R"([{"id": "s", "kind": "AND", "in": ["a0", "t"]},
      {"id": "t", "kind": "OR", "in": ["s", "b0"]}],
      "outputs": {"sum": ["s", "t"], "cout": "t"}})") == NetlistErrorKind::CyclicGraph);
  CHECK(parse_error(head + R"([{"id": "s", "kind": "XOR", "in": ["a0", "b0"]}],
      "outputs": {"sum": ["s", "s"], "cout": "nowhere"}})") == NetlistErrorKind::UndrivenOutput);
  CHECK(parse_error(head + R"([{"id": "s", "kind": "XOR", "in": ["a0", "b0"]}],
      "outputs": {"sum": ["s"], "cout": "s"}})") == NetlistErrorKind::WidthMismatch);
  CHECK_THROWS_AS((void)load_netlist(data("missing.json")), NetlistError);
}

TEST_CASE("netlist_add rejects operands wider than the netlist") {
  const Netlist n = load_netlist(data("rca4.json"));
  CHECK_THROWS_AS((void)netlist_add(n, BitVector(5, 1), BitVector(5, 1)), NetlistError);
  CHECK(netlist_add(n, BitVector(4, 9), BitVector(4, 9), true).sum.bits() == 3U);
}
