#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sfdc/types.hpp"

namespace sfdc {

// Fixed-length bit vector with MSB-first addressing: bit i lives at shift
// 63 - (i mod 64) of word i / 64, so a left-aligned block compares equal to
// the lexicographic prefix of the layer. Padding bits past size() stay zero.
class BitLayer {
public:
  BitLayer() = default;

  explicit BitLayer(std::uint64_t len_bits)
      : words_((len_bits + kWordBits - 1) / kWordBits, 0), len_bits_(len_bits) {}

  // Reinterprets raw words as a layer; trailing padding is forced to zero.
  static BitLayer from_words(std::vector<std::uint64_t> words, std::uint64_t len_bits) {
    if (words.size() != (len_bits + kWordBits - 1) / kWordBits)
      throw std::invalid_argument("word count does not match bit length");
    BitLayer layer;
    layer.words_ = std::move(words);
    layer.len_bits_ = len_bits;
    if (const unsigned tail = len_bits % kWordBits; tail != 0 && !layer.words_.empty())
      layer.words_.back() &= ~low_mask(kWordBits - tail);
    return layer;
  }

  std::uint64_t size() const noexcept { return len_bits_; }

  void write_bit(std::uint64_t i, bool b) {
    check_index(i);
    const std::uint64_t m = std::uint64_t{1} << (kWordBits - 1 - (i % kWordBits));
    if (b)
      words_[i / kWordBits] |= m;
    else
      words_[i / kWordBits] &= ~m;
  }

  bool read_bit(std::uint64_t i) const {
    check_index(i);
    return (words_[i / kWordBits] >> (kWordBits - 1 - (i % kWordBits))) & 1;
  }

  // q bits starting at i, right-aligned in a word: 0^{w-q} S[i..i+q-1].
  // Positions at or past size() read as zero, so i may run past the end.
  std::uint64_t rblock(std::uint64_t i, unsigned q) const {
    check_width(q);
    const std::uint64_t wi = i / kWordBits;
    const unsigned s = static_cast<unsigned>(i % kWordBits);
    const unsigned head = kWordBits - s;  // bits of the first word from position i on
    if (q <= head) {
      return (word(wi) >> (head - q)) & low_mask(q);
    }
    const unsigned rest = q - head;  // straddles into the next word
    return ((word(wi) & low_mask(head)) << rest) | (word(wi + 1) >> (kWordBits - rest));
  }

  // Same block left-aligned: S[i..i+q-1] 0^{w-q}.
  std::uint64_t lblock(std::uint64_t i, unsigned q) const {
    return rblock(i, q) << (kWordBits - q);
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const BitLayer&, const BitLayer&) = default;

private:
  static std::uint64_t low_mask(unsigned n) noexcept {
    return n >= kWordBits ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  }

  std::uint64_t word(std::uint64_t wi) const noexcept {
    return wi < words_.size() ? words_[wi] : 0;
  }

  void check_index(std::uint64_t i) const {
    if (i >= len_bits_) throw std::out_of_range("bit index " + std::to_string(i) +
                                                " out of range [0, " + std::to_string(len_bits_) + ")");
  }

  static void check_width(unsigned q) {
    if (q < 1 || q > kWordBits) throw std::invalid_argument("block width must be in [1, 64]");
  }

  std::vector<std::uint64_t> words_;
  std::uint64_t len_bits_ = 0;
};

}  // namespace sfdc
