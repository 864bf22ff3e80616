#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "sfdc/errors.hpp"
#include "sfdc/gamma.hpp"
#include "sfdc/sfdc.hpp"

namespace sfdc {

// Container file layout, all integers little-endian:
//   magic "SFDC" | version u8 (=1) | variant u8 (0 standard, 1 gamma) |
//   lambda u8 | n u64 | n_dyn u64 | sigma u32 |
//   sigma x (symbol u32, code length u8) in canonical order |
//   per layer: payload bits MSB-first within bytes, padded to 8 bytes.
// Standard containers store lambda-1 fixed layers of n bits then the
// dynamic layer of n_dyn bits; gamma containers store lambda layers of
// n_dyn (= n_gamma) bits each.
struct ContainerHeader {
  std::uint8_t version = 1;
  std::uint8_t variant = 0;
  unsigned lambda = 0;
  std::uint64_t length = 0;
  std::uint64_t dynamic_length = 0;
  std::uint32_t sigma = 0;

  static constexpr std::size_t kBytes = 4 + 1 + 1 + 1 + 8 + 8 + 4;

  std::uint64_t layer_bytes() const {
    auto padded = [](std::uint64_t bits) { return (bits + 63) / 64 * 8; };
    if (variant == 0)
      return std::uint64_t(lambda - 1) * padded(length) + padded(dynamic_length);
    return std::uint64_t(lambda) * padded(dynamic_length);
  }

  // Whole file size implied by the header alone.
  std::uint64_t file_bytes() const { return kBytes + std::uint64_t(sigma) * 5 + layer_bytes(); }
};

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b;
  for (unsigned k = 0; k < 4; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xff);
  os.write(b.data(), b.size());
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b;
  for (unsigned k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xff);
  os.write(b.data(), b.size());
}

// Layer payload: each 64-bit word big-endian, which lays the bits out
// MSB-first byte by byte.
inline void put_layer(std::ostream& os, const BitLayer& layer) {
  for (std::uint64_t w : layer.words()) {
    std::array<char, 8> b;
    for (unsigned k = 0; k < 8; ++k) b[k] = static_cast<char>((w >> (56 - 8 * k)) & 0xff);
    os.write(b.data(), b.size());
  }
}

class Reader {
public:
  explicit Reader(std::istream& is) : is_(is) {}

  std::uint64_t offset() const noexcept { return offset_; }

  std::uint8_t u8(const char* what) {
    std::uint8_t v;
    read(reinterpret_cast<char*>(&v), 1, what);
    return v;
  }

  std::uint32_t u32(const char* what) {
    std::array<unsigned char, 4> b;
    read(reinterpret_cast<char*>(b.data()), 4, what);
    std::uint32_t v = 0;
    for (unsigned k = 0; k < 4; ++k) v |= std::uint32_t(b[k]) << (8 * k);
    return v;
  }

  std::uint64_t u64(const char* what) {
    std::array<unsigned char, 8> b;
    read(reinterpret_cast<char*>(b.data()), 8, what);
    std::uint64_t v = 0;
    for (unsigned k = 0; k < 8; ++k) v |= std::uint64_t(b[k]) << (8 * k);
    return v;
  }

  BitLayer layer(std::uint64_t bits, const std::string& what) {
    std::vector<std::uint64_t> words((bits + 63) / 64, 0);
    for (std::uint64_t& w : words) {
      std::array<unsigned char, 8> b;
      read(reinterpret_cast<char*>(b.data()), 8, what.c_str());
      w = 0;
      for (unsigned k = 0; k < 8; ++k) w |= std::uint64_t(b[k]) << (56 - 8 * k);
    }
    return BitLayer::from_words(std::move(words), bits);
  }

  void read(char* dst, std::size_t count, const char* what) {
    is_.read(dst, static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(is_.gcount()) != count)
      throw FormatError(std::string("truncated input while reading ") + what, offset_);
    offset_ += count;
  }

private:
  std::istream& is_;
  std::uint64_t offset_ = 0;
};

inline void put_header_and_codes(std::ostream& os, std::uint8_t variant, unsigned lambda,
                                 std::uint64_t n, std::uint64_t n_dyn, const CodeTable& codes) {
  if (!codes.is_canonical())
    throw std::invalid_argument("only canonical code tables can be serialized");
  os.write("SFDC", 4);
  os.put(1);
  os.put(static_cast<char>(variant));
  os.put(static_cast<char>(lambda));
  put_u64(os, n);
  put_u64(os, n_dyn);
  put_u32(os, static_cast<std::uint32_t>(codes.sigma()));
  for (const auto& [sym, cw] : codes.entries()) {
    put_u32(os, sym);
    os.put(static_cast<char>(cw.length));
  }
}

inline ContainerHeader read_header_fields(Reader& r) {
  char magic[4];
  r.read(magic, 4, "magic");
  if (std::string(magic, 4) != "SFDC") throw FormatError("bad magic", 0);
  ContainerHeader h;
  h.version = r.u8("version");
  if (h.version != 1) throw FormatError("unsupported version " + std::to_string(h.version), 4);
  h.variant = r.u8("variant");
  if (h.variant > 1) throw FormatError("unknown variant " + std::to_string(h.variant), 5);
  h.lambda = r.u8("lambda");
  if (h.lambda < 2) throw FormatError("layer count must be at least 2", 6);
  h.length = r.u64("length");
  h.dynamic_length = r.u64("dynamic length");
  h.sigma = r.u32("sigma");
  if (h.length == 0) throw FormatError("empty container", 7);
  if (h.dynamic_length < h.length) throw FormatError("dynamic layer shorter than text", 15);
  if (h.sigma == 0) throw FormatError("empty code table", 23);
  return h;
}

}  // namespace detail

inline std::uint64_t serialize(const SfdcContainer& cont, std::ostream& os) {
  detail::put_header_and_codes(os, 0, cont.lambda(), cont.size(), cont.dynamic_size(),
                               cont.codes());
  for (unsigned h = 0; h + 1 < cont.lambda(); ++h) detail::put_layer(os, cont.fixed_layer(h));
  detail::put_layer(os, cont.dynamic_layer());
  if (!os) throw std::runtime_error("container write failed");
  ContainerHeader hdr{1, 0, cont.lambda(), cont.size(), cont.dynamic_size(),
                      static_cast<std::uint32_t>(cont.codes().sigma())};
  return hdr.file_bytes();
}

inline std::uint64_t serialize(const GammaContainer& cont, std::ostream& os) {
  detail::put_header_and_codes(os, 1, cont.lambda(), cont.size(), cont.column_count(),
                               cont.codes());
  for (unsigned h = 0; h < cont.lambda(); ++h) detail::put_layer(os, cont.layer(h));
  if (!os) throw std::runtime_error("container write failed");
  ContainerHeader hdr{1, 1, cont.lambda(), cont.size(), cont.column_count(),
                      static_cast<std::uint32_t>(cont.codes().sigma())};
  return hdr.file_bytes();
}

// Header fields only; enough to derive the file size and bits per symbol.
inline ContainerHeader read_header(std::istream& is) {
  detail::Reader r(is);
  return detail::read_header_fields(r);
}

using AnyContainer = std::variant<SfdcContainer, GammaContainer>;

inline AnyContainer deserialize(std::istream& is) {
  detail::Reader r(is);
  const ContainerHeader h = detail::read_header_fields(r);

  std::vector<std::pair<Symbol, std::uint8_t>> lengths;
  lengths.reserve(h.sigma);
  for (std::uint32_t k = 0; k < h.sigma; ++k) {
    const Symbol sym = r.u32("code table symbol");
    const std::uint8_t len = r.u8("code length");
    lengths.push_back({sym, len});
  }
  CodeTable codes = [&] {
    try {
      return CodeTable::from_lengths(lengths);
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("invalid code table: ") + e.what(), r.offset());
    }
  }();

  if (h.variant == 0) {
    std::vector<BitLayer> fixed;
    fixed.reserve(h.lambda - 1);
    for (unsigned l = 0; l + 1 < h.lambda; ++l)
      fixed.push_back(r.layer(h.length, "fixed layer " + std::to_string(l)));
    BitLayer dynamic = r.layer(h.dynamic_length, "dynamic layer");
    return SfdcContainer::from_parts(h.lambda, h.length, std::move(fixed), std::move(dynamic),
                                     std::move(codes));
  }
  std::vector<BitLayer> layers;
  layers.reserve(h.lambda);
  for (unsigned l = 0; l < h.lambda; ++l)
    layers.push_back(r.layer(h.dynamic_length, "layer " + std::to_string(l)));
  return GammaContainer::from_parts(h.lambda, h.length, std::move(layers), std::move(codes));
}

enum class IngestMode { Bytes, Utf8, IntegerLines };

// Reads a corpus file into a symbol sequence: one symbol per byte, per UTF-8
// code point, or per non-negative integer line (LCP-style sequences).
inline std::vector<Symbol> ingest(std::istream& is, IngestMode mode) {
  std::vector<Symbol> text;
  if (mode == IngestMode::Bytes) {
    char ch;
    while (is.get(ch)) text.push_back(static_cast<std::uint8_t>(ch));
    return text;
  }
  if (mode == IngestMode::Utf8) {
    std::uint64_t offset = 0;
    int ch;
    while ((ch = is.get()) != std::char_traits<char>::eof()) {
      const std::uint8_t lead = static_cast<std::uint8_t>(ch);
      unsigned extra;
      Symbol cp;
      if (lead < 0x80) {
        extra = 0;
        cp = lead;
      } else if ((lead & 0xe0) == 0xc0) {
        extra = 1;
        cp = lead & 0x1f;
      } else if ((lead & 0xf0) == 0xe0) {
        extra = 2;
        cp = lead & 0x0f;
      } else if ((lead & 0xf8) == 0xf0) {
        extra = 3;
        cp = lead & 0x07;
      } else {
        throw FormatError("invalid UTF-8 lead byte", offset);
      }
      for (unsigned k = 0; k < extra; ++k) {
        const int cont = is.get();
        if (cont == std::char_traits<char>::eof() || (cont & 0xc0) != 0x80)
          throw FormatError("invalid UTF-8 continuation byte", offset);
        cp = (cp << 6) | static_cast<Symbol>(cont & 0x3f);
      }
      text.push_back(cp);
      offset += 1 + extra;
    }
    return text;
  }
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::uint64_t value = 0;
    for (char c : line) {
      if (c < '0' || c > '9')
        throw FormatError("malformed integer '" + line + "' on line " + std::to_string(line_no),
                          line_no);
      value = value * 10 + static_cast<std::uint64_t>(c - '0');
      if (value > std::numeric_limits<Symbol>::max())
        throw FormatError("integer out of range on line " + std::to_string(line_no), line_no);
    }
    text.push_back(static_cast<Symbol>(value));
  }
  return text;
}

}  // namespace sfdc
