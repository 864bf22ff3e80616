#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sfdc/bit_layer.hpp"
#include "sfdc/huffman.hpp"

namespace sfdc {

namespace detail {

// Per-symbol code lookup for the encoder hot paths: a dense table when the
// alphabet is packed into a small range, otherwise the table's hash map.
class CodeLookup {
public:
  explicit CodeLookup(const CodeTable& codes) : codes_(&codes) {
    Symbol max_sym = 0;
    for (const auto& [sym, cw] : codes.entries()) max_sym = std::max(max_sym, sym);
    if (max_sym < kDenseLimit) {
      dense_.assign(std::size_t{max_sym} + 1, CodeWord{});
      for (const auto& [sym, cw] : codes.entries()) dense_[sym] = cw;
    }
  }

  const CodeWord& at(Symbol c) const {
    if (!dense_.empty()) {
      if (c < dense_.size() && dense_[c].length != 0) return dense_[c];
      throw MissingSymbolError(c);
    }
    return codes_->at(c);
  }

private:
  static constexpr Symbol kDenseLimit = 1u << 22;

  const CodeTable* codes_;
  std::vector<CodeWord> dense_;
};

}  // namespace detail

// Decoding-delay and space accounting for one (text, codes, lambda) triple.
struct DelayStats {
  double mean_delay = 0.0;
  double bits_per_char = 0.0;
  double idle_bits_per_char = 0.0;
  std::uint64_t length = 0;          // n
  std::uint64_t dynamic_length = 0;  // n_D (n_gamma for the gamma variant)
  std::uint64_t code_bits = 0;       // N, total encoded bits
  std::vector<std::uint64_t> delays; // per position, only when requested
};

// One pending bit routed to the dynamic layer.
struct Placement {
  std::uint64_t text_pos;
  std::uint32_t bit_index;  // absolute index within the code word
  std::uint64_t dyn_pos;
};
using PlacementLog = std::vector<Placement>;

// Standard SFDC representation: lambda-1 fixed layers of length n plus a
// dynamic layer of length n_D >= n holding the pending bits under the stack
// discipline. Immutable once built.
class SfdcContainer {
public:
  static SfdcContainer encode(std::span<const Symbol> text, const CodeTable& codes,
                              unsigned lambda, PlacementLog* log = nullptr);

  // Decodes the single character at i; returns it with its decoding delay
  // (dynamic-layer index of its last pending bit minus i, 0 if none).
  std::pair<Symbol, std::uint64_t> access(std::uint64_t i) const {
    check_position(i);
    std::vector<std::uint64_t> delay;
    const std::vector<Symbol> out = decode_core(i, i, &delay);
    return {out[0], delay[0]};
  }

  std::vector<Symbol> decode_window(std::uint64_t i, std::uint64_t j) const {
    check_position(i);
    check_position(j);
    if (i > j) throw std::out_of_range("window start exceeds window end");
    return decode_core(i, j, nullptr);
  }

  std::vector<Symbol> decode_all() const { return decode_window(0, n_ - 1); }

  DelayStats stats() const;

  std::uint64_t size() const noexcept { return n_; }
  unsigned lambda() const noexcept { return lambda_; }
  std::uint64_t dynamic_size() const noexcept { return dynamic_.size(); }

  const BitLayer& fixed_layer(unsigned h) const {
    if (h + 1 >= lambda_) throw std::out_of_range("fixed layer index out of range");
    return fixed_[h];
  }
  const BitLayer& dynamic_layer() const noexcept { return dynamic_; }
  const CodeTable& codes() const noexcept { return codes_; }
  const DecodeTree& tree() const noexcept { return tree_; }

  // Assembles a container from deserialized parts.
  static SfdcContainer from_parts(unsigned lambda, std::uint64_t n, std::vector<BitLayer> fixed,
                                  BitLayer dynamic, CodeTable codes) {
    if (lambda < 2) throw std::invalid_argument("layer count must be at least 2");
    if (fixed.size() != lambda - 1) throw std::invalid_argument("fixed layer count mismatch");
    for (const BitLayer& l : fixed)
      if (l.size() != n) throw std::invalid_argument("fixed layer length mismatch");
    if (dynamic.size() < n) throw std::invalid_argument("dynamic layer shorter than text");
    SfdcContainer c(std::move(codes));
    c.lambda_ = lambda;
    c.n_ = n;
    c.fixed_ = std::move(fixed);
    c.dynamic_ = std::move(dynamic);
    return c;
  }

private:
  explicit SfdcContainer(CodeTable codes)
      : codes_(std::move(codes)), tree_(DecodeTree::build(codes_)) {}

  void check_position(std::uint64_t i) const {
    if (i >= n_) throw std::out_of_range("position " + std::to_string(i) + " out of range [0, " +
                                         std::to_string(n_) + ")");
  }

  // Column walk shared by access and decode_window: positions k from i
  // onward, fixed-layer descent first, then one dynamic bit for the node on
  // top of the stack (mirrors the encoder). delays, when requested, receives
  // one entry per window position.
  std::vector<Symbol> decode_core(std::uint64_t i, std::uint64_t j,
                                  std::vector<std::uint64_t>* delays) const;

  unsigned lambda_ = 0;
  std::uint64_t n_ = 0;
  std::vector<BitLayer> fixed_;
  BitLayer dynamic_;
  CodeTable codes_;
  DecodeTree tree_;

  // Filled by encode; stats() recomputes them for loaded containers.
  std::uint64_t cached_code_bits_ = 0;
  double cached_mean_delay_ = -1.0;
};

inline SfdcContainer SfdcContainer::encode(std::span<const Symbol> text, const CodeTable& codes,
                                           unsigned lambda, PlacementLog* log) {
  if (lambda < 2) throw std::invalid_argument("layer count must be at least 2");
  if (text.empty()) throw std::invalid_argument("cannot encode an empty text");
  const std::uint64_t n = text.size();
  const detail::CodeLookup lookup(codes);

  // First pass sizes the dynamic layer: one pending bit leaves the stack per
  // position, the rest flush past n.
  std::uint64_t backlog = 0;
  std::uint64_t code_bits = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const CodeWord& cw = lookup.at(text[i]);
    code_bits += cw.length;
    if (cw.length > lambda - 1) backlog += cw.length - (lambda - 1);
    if (backlog > 0) --backlog;
  }
  const std::uint64_t n_dyn = n + backlog;

  SfdcContainer out{CodeTable(codes)};
  out.lambda_ = lambda;
  out.n_ = n;
  out.cached_code_bits_ = code_bits;
  out.fixed_.assign(lambda - 1, BitLayer(n));
  out.dynamic_ = BitLayer(n_dyn);

  struct PendingCode {
    std::uint64_t pos;
    const CodeWord* code;
    std::uint32_t next_bit;
  };
  std::vector<PendingCode> stack;
  std::uint64_t delay_sum = 0;

  auto pop_one = [&](std::uint64_t dyn_pos) {
    PendingCode& top = stack.back();
    out.dynamic_.write_bit(dyn_pos, top.code->bit(top.next_bit));
    if (log) log->push_back({top.pos, top.next_bit, dyn_pos});
    if (++top.next_bit == top.code->length) {
      delay_sum += dyn_pos - top.pos;
      stack.pop_back();
    }
  };

  for (std::uint64_t i = 0; i < n; ++i) {
    const CodeWord& cw = lookup.at(text[i]);
    const unsigned fixed_bits = std::min<unsigned>(cw.length, lambda - 1);
    for (unsigned h = 0; h < fixed_bits; ++h) out.fixed_[h].write_bit(i, cw.bit(h));
    if (cw.length > lambda - 1) stack.push_back({i, &cw, lambda - 1});
    if (!stack.empty()) pop_one(i);
  }
  for (std::uint64_t i = n; !stack.empty(); ++i) pop_one(i);

  out.cached_mean_delay_ = static_cast<double>(delay_sum) / static_cast<double>(n);
  return out;
}

inline std::vector<Symbol> SfdcContainer::decode_core(std::uint64_t i, std::uint64_t j,
                                                      std::vector<std::uint64_t>* delays) const {
  std::vector<Symbol> out(j - i + 1, 0);
  if (delays) delays->assign(j - i + 1, 0);
  struct PendingNode {
    DecodeTree::NodeRef node;
    std::uint64_t pos;
  };
  std::vector<PendingNode> stack;
  bool last_done = false;
  const std::uint64_t limit = std::max(n_, dynamic_.size());

  for (std::uint64_t k = i; !(last_done && stack.empty()); ++k) {
    if (k > limit) throw std::runtime_error("container is corrupt: decoding ran past the layers");
    if (k < n_) {
      // Longest-match walk down the fixed layers: a leaf that prefixes a
      // longer code only ends the walk once the observed bit has no
      // continuation (equivalent to the plain walk on prefix-free tables).
      DecodeTree::NodeRef x = tree_.root();
      bool extendable = true;
      for (unsigned h = 0; h + 1 < lambda_; ++h) {
        const std::int32_t next = tree_.child(x, fixed_[h].read_bit(k));
        if (next == DecodeTree::kNone) {
          extendable = false;
          break;
        }
        x = static_cast<DecodeTree::NodeRef>(next);
      }
      if (!extendable || tree_.is_leaf(x)) {
        if (!tree_.is_leaf(x)) throw std::runtime_error("container is corrupt: no code matches");
        if (k <= j) out[k - i] = tree_.symbol(x);
        if (k == j) last_done = true;
      } else {
        stack.push_back({x, k});
      }
    }
    if (!stack.empty()) {
      PendingNode top = stack.back();
      stack.pop_back();
      const bool bit = k < dynamic_.size() && dynamic_.read_bit(k);
      top.node = tree_.step(top.node, bit);
      if (tree_.is_leaf(top.node)) {
        if (top.pos <= j) {
          out[top.pos - i] = tree_.symbol(top.node);
          if (delays) (*delays)[top.pos - i] = k - top.pos;
        }
        if (top.pos == j) last_done = true;
      } else {
        stack.push_back(top);
      }
    }
  }
  return out;
}

// Simulates the encoder without materializing layers and reports the mean
// decoding delay together with the space accounting.
inline DelayStats compute_delay(std::span<const Symbol> text, const CodeTable& codes,
                                unsigned lambda, bool keep_delays = false) {
  if (lambda < 2) throw std::invalid_argument("layer count must be at least 2");
  if (text.empty()) throw std::invalid_argument("cannot simulate an empty text");
  const std::uint64_t n = text.size();
  const detail::CodeLookup lookup(codes);

  struct PendingRun {
    std::uint64_t pos;
    std::uint32_t remaining;
  };
  std::vector<PendingRun> stack;
  DelayStats st;
  st.length = n;
  if (keep_delays) st.delays.assign(n, 0);

  std::uint64_t delay_sum = 0;
  std::uint64_t code_bits = 0;
  auto pop_one = [&](std::uint64_t dyn_pos) {
    PendingRun& top = stack.back();
    if (--top.remaining == 0) {
      delay_sum += dyn_pos - top.pos;
      if (keep_delays) st.delays[top.pos] = dyn_pos - top.pos;
      stack.pop_back();
    }
  };

  for (std::uint64_t i = 0; i < n; ++i) {
    const CodeWord& cw = lookup.at(text[i]);
    code_bits += cw.length;
    if (cw.length > lambda - 1) stack.push_back({i, cw.length - (lambda - 1u)});
    if (!stack.empty()) pop_one(i);
  }
  std::uint64_t end = n;
  while (!stack.empty()) pop_one(end++);

  st.dynamic_length = end;
  st.code_bits = code_bits;
  st.mean_delay = static_cast<double>(delay_sum) / static_cast<double>(n);
  st.bits_per_char =
      static_cast<double>((lambda - 1) * n + st.dynamic_length) / static_cast<double>(n);
  st.idle_bits_per_char = st.bits_per_char - static_cast<double>(code_bits) / static_cast<double>(n);
  return st;
}

inline DelayStats SfdcContainer::stats() const {
  std::uint64_t code_bits = cached_code_bits_;
  double mean = cached_mean_delay_;
  if (mean < 0.0) {  // loaded container: rebuild the accounting from the text
    const std::vector<Symbol> text = decode_all();
    const DelayStats sim = compute_delay(text, codes_, lambda_);
    code_bits = sim.code_bits;
    mean = sim.mean_delay;
  }
  DelayStats st;
  st.length = n_;
  st.dynamic_length = dynamic_.size();
  st.code_bits = code_bits;
  st.mean_delay = mean;
  st.bits_per_char =
      static_cast<double>((lambda_ - 1) * n_ + st.dynamic_length) / static_cast<double>(n_);
  st.idle_bits_per_char =
      st.bits_per_char - static_cast<double>(code_bits) / static_cast<double>(n_);
  return st;
}

}  // namespace sfdc
