#pragma once

// Compact adder names used by configs and the CLI:
//   exact:W | rca:W          ripple-carry exact adder
//   cla:W                    carry-lookahead exact adder (cost baseline)
//   acla:W:K[:gated]         ACLA with block size K
//   loa:W:L                  lower-part OR adder, L approximated bits
//   trunc:W:L                truncated adder, L zeroed bits
//   netlist:PATH             gate-level JSON netlist

#include <string_view>

#include "musiclite/adders.hpp"

namespace musiclite {

/// Throws ConfigError on malformed specs, NetlistError on bad netlist files.
[[nodiscard]] AdderModel parse_adder_spec(std::string_view spec);

}  // namespace musiclite
