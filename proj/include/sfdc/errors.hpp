#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "sfdc/types.hpp"

namespace sfdc {

// A symbol that the active code table cannot encode.
class MissingSymbolError : public std::runtime_error {
public:
  explicit MissingSymbolError(Symbol c)
      : std::runtime_error("symbol " + std::to_string(c) + " not present in code table"),
        symbol_(c) {}

  Symbol symbol() const noexcept { return symbol_; }

private:
  Symbol symbol_;
};

// Malformed container file or text input; carries the byte (or line) offset
// at which parsing failed.
class FormatError : public std::runtime_error {
public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

private:
  std::uint64_t offset_;
};

}  // namespace sfdc
