#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "hobn/surface.hpp"

namespace hobn {

// Built-in macros available in every program:
//   zero, succ, pred  -- naturals encoded as case analyzers: a numeral is
//                        a thunk expecting a zero-thunk and a
//                        successor-thunk, the successor-thunk receives
//                        the predecessor
//   ifZero            -- \n. \zt. \st. (der n) zt st
//   fix               -- call-by-push-value fixed point combinator
// Numeral literals expand to the same encoding directly.
const std::map<std::string, surface_ptr>& prelude_macros();

surface_ptr numeral_encoding(std::uint64_t n);

}  // namespace hobn
