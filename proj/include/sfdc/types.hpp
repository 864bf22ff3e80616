#pragma once

#include <cstdint>

namespace sfdc {

// Element of an encoded sequence. Byte texts use 0..255, integer sequences
// (e.g. LCP arrays) use the full range.
using Symbol = std::uint32_t;

inline constexpr unsigned kWordBits = 64;

}  // namespace sfdc
