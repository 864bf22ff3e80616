#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sfdc/sfdc.hpp"

namespace sfdc {

// One code bit routed into the gamma layer grid.
struct GammaPlacement {
  std::uint64_t text_pos;
  std::uint32_t bit_index;
  std::uint64_t column;
  std::uint32_t layer;
};
using GammaPlacementLog = std::vector<GammaPlacement>;

// Gamma variant: lambda uniform layers of common length n_gamma >= n, every
// code bit flows through one stack and fills columns top to bottom, so
// pending bits reuse idle slots in any layer. No fixed/dynamic distinction.
class GammaContainer {
public:
  static GammaContainer encode(std::span<const Symbol> text, const CodeTable& codes,
                               unsigned lambda, GammaPlacementLog* log = nullptr);

  // Decodes the character at i with its delay in columns: the column holding
  // the last bit of its code minus i (0 when the code ends in column i).
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
  std::uint64_t column_count() const noexcept { return layers_.empty() ? 0 : layers_[0].size(); }

  const BitLayer& layer(unsigned h) const {
    if (h >= lambda_) throw std::out_of_range("layer index out of range");
    return layers_[h];
  }
  const CodeTable& codes() const noexcept { return codes_; }
  const DecodeTree& tree() const noexcept { return tree_; }

  static GammaContainer from_parts(unsigned lambda, std::uint64_t n, std::vector<BitLayer> layers,
                                   CodeTable codes) {
    if (lambda < 2) throw std::invalid_argument("layer count must be at least 2");
    if (layers.size() != lambda) throw std::invalid_argument("layer count mismatch");
    for (const BitLayer& l : layers) {
      if (l.size() != layers[0].size()) throw std::invalid_argument("layer length mismatch");
      if (l.size() < n) throw std::invalid_argument("layer shorter than text");
    }
    GammaContainer c(std::move(codes));
    c.lambda_ = lambda;
    c.n_ = n;
    c.layers_ = std::move(layers);
    return c;
  }

private:
  explicit GammaContainer(CodeTable codes)
      : codes_(std::move(codes)), tree_(DecodeTree::build(codes_)) {}

  void check_position(std::uint64_t i) const {
    if (i >= n_) throw std::out_of_range("position " + std::to_string(i) + " out of range [0, " +
                                         std::to_string(n_) + ")");
  }

  std::vector<Symbol> decode_core(std::uint64_t i, std::uint64_t j,
                                  std::vector<std::uint64_t>* delays) const;

  unsigned lambda_ = 0;
  std::uint64_t n_ = 0;
  std::vector<BitLayer> layers_;
  CodeTable codes_;
  DecodeTree tree_;

  std::uint64_t cached_code_bits_ = 0;
  double cached_mean_delay_ = -1.0;
};

inline GammaContainer GammaContainer::encode(std::span<const Symbol> text, const CodeTable& codes,
                                             unsigned lambda, GammaPlacementLog* log) {
  if (lambda < 2) throw std::invalid_argument("layer count must be at least 2");
  if (text.empty()) throw std::invalid_argument("cannot encode an empty text");
  const std::uint64_t n = text.size();
  const detail::CodeLookup lookup(codes);

  // Column count first: each column drains up to lambda stacked bits.
  std::uint64_t backlog = 0;
  std::uint64_t code_bits = 0;
  std::uint64_t columns = n;
  for (std::uint64_t i = 0; i < n; ++i) {
    const CodeWord& cw = lookup.at(text[i]);
    code_bits += cw.length;
    backlog += cw.length;
    backlog -= std::min<std::uint64_t>(backlog, lambda);
  }
  for (std::uint64_t i = n; backlog > 0; ++i) {
    backlog -= std::min<std::uint64_t>(backlog, lambda);
    columns = i + 1;
  }

  GammaContainer out{CodeTable(codes)};
  out.lambda_ = lambda;
  out.n_ = n;
  out.cached_code_bits_ = code_bits;
  out.layers_.assign(lambda, BitLayer(columns));

  struct PendingCode {
    std::uint64_t pos;
    const CodeWord* code;
    std::uint32_t next_bit;
  };
  std::vector<PendingCode> stack;
  std::uint64_t delay_sum = 0;

  for (std::uint64_t i = 0; i < columns; ++i) {
    if (i < n) stack.push_back({i, &lookup.at(text[i]), 0});
    for (unsigned h = 0; h < lambda && !stack.empty(); ++h) {
      PendingCode& top = stack.back();
      out.layers_[h].write_bit(i, top.code->bit(top.next_bit));
      if (log) log->push_back({top.pos, top.next_bit, i, h});
      if (++top.next_bit == top.code->length) {
        delay_sum += i - top.pos;
        stack.pop_back();
      }
    }
  }
  if (!stack.empty()) throw std::logic_error("gamma column sizing failed to drain the stack");

  out.cached_mean_delay_ = static_cast<double>(delay_sum) / static_cast<double>(n);
  return out;
}

inline std::vector<Symbol> GammaContainer::decode_core(std::uint64_t i, std::uint64_t j,
                                                       std::vector<std::uint64_t>* delays) const {
  std::vector<Symbol> out(j - i + 1, 0);
  if (delays) delays->assign(j - i + 1, 0);
  struct PendingNode {
    DecodeTree::NodeRef node;
    std::uint64_t pos;
  };
  std::vector<PendingNode> stack;
  bool last_done = false;
  const std::uint64_t limit = column_count();

  for (std::uint64_t k = i; !(last_done && stack.empty()); ++k) {
    if (k > limit) throw std::runtime_error("container is corrupt: decoding ran past the layers");
    if (k < n_) stack.push_back({tree_.root(), k});
    for (unsigned h = 0; h < lambda_ && !stack.empty(); ++h) {
      PendingNode top = stack.back();
      stack.pop_back();
      const bool bit = k < limit && layers_[h].read_bit(k);
      top.node = tree_.step(top.node, bit);
      if (tree_.is_leaf(top.node)) {
        if (top.pos >= i && top.pos <= j) {
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

// Mean gamma decoding delay without materializing layers; also reports the
// column count and space accounting.
inline DelayStats gamma_compute_delay(std::span<const Symbol> text, const CodeTable& codes,
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
  std::uint64_t columns = n;
  for (std::uint64_t i = 0; i < n || !stack.empty(); ++i) {
    if (i < n) {
      const CodeWord& cw = lookup.at(text[i]);
      code_bits += cw.length;
      stack.push_back({i, cw.length});
    }
    for (unsigned h = 0; h < lambda && !stack.empty(); ++h) {
      PendingRun& top = stack.back();
      if (--top.remaining == 0) {
        delay_sum += i - top.pos;
        if (keep_delays) st.delays[top.pos] = i - top.pos;
        stack.pop_back();
      }
    }
    if (i >= n) columns = i + 1;
  }

  st.dynamic_length = columns;
  st.code_bits = code_bits;
  st.mean_delay = static_cast<double>(delay_sum) / static_cast<double>(n);
  st.bits_per_char = static_cast<double>(lambda * columns) / static_cast<double>(n);
  st.idle_bits_per_char = st.bits_per_char - static_cast<double>(code_bits) / static_cast<double>(n);
  return st;
}

inline DelayStats GammaContainer::stats() const {
  std::uint64_t code_bits = cached_code_bits_;
  double mean = cached_mean_delay_;
  if (mean < 0.0) {
    const std::vector<Symbol> text = decode_all();
    const DelayStats sim = gamma_compute_delay(text, codes_, lambda_);
    code_bits = sim.code_bits;
    mean = sim.mean_delay;
  }
  DelayStats st;
  st.length = n_;
  st.dynamic_length = column_count();
  st.code_bits = code_bits;
  st.mean_delay = mean;
  st.bits_per_char = static_cast<double>(lambda_ * column_count()) / static_cast<double>(n_);
  st.idle_bits_per_char =
      st.bits_per_char - static_cast<double>(code_bits) / static_cast<double>(n_);
  return st;
}

}  // namespace sfdc
