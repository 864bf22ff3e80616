#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sfdc/errors.hpp"
#include "sfdc/types.hpp"

namespace sfdc {

// One prefix-free code word, at most 64 bits. Bit k (0 = first transmitted
// bit) sits at shift length-1-k of the value.
struct CodeWord {
  std::uint64_t value = 0;
  std::uint8_t length = 0;

  bool bit(unsigned k) const noexcept { return (value >> (length - 1 - k)) & 1; }

  std::string to_string() const {
    std::string s(length, '0');
    for (unsigned k = 0; k < length; ++k)
      if (bit(k)) s[k] = '1';
    return s;
  }

  friend bool operator==(const CodeWord&, const CodeWord&) = default;
};

class FrequencyTable {
public:
  static FrequencyTable from_text(std::span<const Symbol> text) {
    if (text.empty()) throw std::invalid_argument("cannot count frequencies of an empty text");
    std::unordered_map<Symbol, std::uint64_t> counts;
    for (Symbol c : text) ++counts[c];
    std::vector<std::pair<Symbol, std::uint64_t>> items(counts.begin(), counts.end());
    std::sort(items.begin(), items.end());
    return FrequencyTable(std::move(items), text.size());
  }

  static FrequencyTable from_counts(std::vector<std::pair<Symbol, std::uint64_t>> counts) {
    if (counts.empty()) throw std::invalid_argument("empty frequency table");
    std::sort(counts.begin(), counts.end());
    std::uint64_t total = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (counts[k].second == 0) throw std::invalid_argument("zero count in frequency table");
      if (k > 0 && counts[k].first == counts[k - 1].first)
        throw std::invalid_argument("duplicate symbol in frequency table");
      total += counts[k].second;
    }
    return FrequencyTable(std::move(counts), total);
  }

  std::uint64_t total() const noexcept { return total_; }
  std::size_t sigma() const noexcept { return items_.size(); }

  std::uint64_t count(Symbol c) const noexcept {
    auto it = std::lower_bound(items_.begin(), items_.end(), c,
                               [](const auto& kv, Symbol s) { return kv.first < s; });
    return (it != items_.end() && it->first == c) ? it->second : 0;
  }

  // (symbol, count) pairs in ascending symbol order.
  const std::vector<std::pair<Symbol, std::uint64_t>>& items() const noexcept { return items_; }

private:
  FrequencyTable(std::vector<std::pair<Symbol, std::uint64_t>> items, std::uint64_t total)
      : items_(std::move(items)), total_(total) {}

  std::vector<std::pair<Symbol, std::uint64_t>> items_;
  std::uint64_t total_ = 0;
};

// Prefix-free code map. Entries are kept in the table's defining order:
// canonical (length, then frequency descending, then symbol) for built
// tables, input order for externally supplied ones.
class CodeTable {
public:
  // Huffman lengths for the given frequencies, canonical code assignment.
  // Ties in the merge prefer the most recently created composite node, which
  // keeps Fibonacci-like frequency profiles fully degenerate.
  static CodeTable build(const FrequencyTable& freq) {
    const std::size_t sigma = freq.sigma();
    if (sigma == 0) throw std::invalid_argument("empty frequency table");

    // Leaves in canonical tie order: count ascending, then symbol.
    std::vector<std::pair<Symbol, std::uint64_t>> leaves = freq.items();
    std::stable_sort(leaves.begin(), leaves.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });

    if (sigma == 1) {
      std::vector<Entry> single{{leaves[0].first, CodeWord{0, 1}}};
      return CodeTable(std::move(single));
    }

    struct Node {
      std::uint64_t weight;
      std::int32_t left, right;  // -1 for leaves
    };
    std::vector<Node> nodes;
    nodes.reserve(2 * sigma - 1);
    for (const auto& [sym, cnt] : leaves) nodes.push_back({cnt, -1, -1});

    // Min-heap over (weight, composite-before-leaf, newer-composite-first,
    // earlier-leaf-first).
    auto heap_after = [&](std::uint32_t a, std::uint32_t b) {
      const Node &na = nodes[a], &nb = nodes[b];
      if (na.weight != nb.weight) return na.weight > nb.weight;
      const bool ca = na.left >= 0, cb = nb.left >= 0;
      if (ca != cb) return cb;       // composites win ties
      if (ca) return a < b;          // most recent composite first
      return a > b;                  // leaves in canonical order
    };
    std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, decltype(heap_after)> heap(
        heap_after);
    for (std::uint32_t k = 0; k < sigma; ++k) heap.push(k);

    while (heap.size() > 1) {
      const std::uint32_t a = heap.top();
      heap.pop();
      const std::uint32_t b = heap.top();
      heap.pop();
      nodes.push_back({nodes[a].weight + nodes[b].weight, static_cast<std::int32_t>(a),
                       static_cast<std::int32_t>(b)});
      heap.push(static_cast<std::uint32_t>(nodes.size() - 1));
    }

    // Depth of each leaf = code length.
    std::vector<std::uint8_t> depth(nodes.size(), 0);
    for (std::size_t k = nodes.size(); k-- > 0;) {
      const Node& nd = nodes[k];
      if (nd.left < 0) continue;
      if (depth[k] == 64) throw std::invalid_argument("code length exceeds 64 bits");
      depth[nd.left] = depth[nd.right] = static_cast<std::uint8_t>(depth[k] + 1);
    }

    std::vector<LengthEntry> lens(sigma);
    for (std::size_t k = 0; k < sigma; ++k)
      lens[k] = {leaves[k].first, depth[k], leaves[k].second};
    return CodeTable(assign_canonical(std::move(lens)));
  }

  // Externally supplied code words ("0"/"1" strings). Duplicate code words
  // are rejected; a code that is a proper prefix of another is tolerated
  // (the decoder resolves those longest-match), since published example
  // tables are not always prefix-free.
  static CodeTable from_codes(const std::vector<std::pair<Symbol, std::string>>& codes) {
    if (codes.empty()) throw std::invalid_argument("empty code table");
    std::vector<Entry> entries;
    entries.reserve(codes.size());
    for (const auto& [sym, text] : codes) {
      if (text.empty() || text.size() > 64)
        throw std::invalid_argument("code length must be in [1, 64]");
      CodeWord cw{0, static_cast<std::uint8_t>(text.size())};
      for (char ch : text) {
        if (ch != '0' && ch != '1') throw std::invalid_argument("code must be binary");
        cw.value = (cw.value << 1) | static_cast<std::uint64_t>(ch == '1');
      }
      entries.push_back({sym, cw});
    }
    return CodeTable(std::move(entries));
  }

  // Canonical code words reconstructed from lengths alone. The input order
  // becomes the canonical order and must be sorted by length.
  static CodeTable from_lengths(const std::vector<std::pair<Symbol, std::uint8_t>>& lengths) {
    if (lengths.empty()) throw std::invalid_argument("empty code table");
    std::vector<Entry> entries;
    entries.reserve(lengths.size());
    std::uint64_t next = 0;
    std::uint8_t prev_len = 0;
    for (const auto& [sym, len] : lengths) {
      if (len < 1 || len > 64) throw std::invalid_argument("code length must be in [1, 64]");
      if (len < prev_len) throw std::invalid_argument("lengths not sorted for canonical assignment");
      if (prev_len != 0) next = (next + 1) << (len - prev_len);
      if (len < 64 && next >= (std::uint64_t{1} << len))
        throw std::invalid_argument("lengths violate the Kraft inequality");
      entries.push_back({sym, CodeWord{next, len}});
      prev_len = len;
    }
    return CodeTable(std::move(entries));
  }

  const CodeWord* find(Symbol c) const noexcept {
    auto it = index_.find(c);
    return it == index_.end() ? nullptr : &entries_[it->second].second;
  }

  const CodeWord& at(Symbol c) const {
    const CodeWord* cw = find(c);
    if (!cw) throw MissingSymbolError(c);
    return *cw;
  }

  std::size_t sigma() const noexcept { return entries_.size(); }
  unsigned max_length() const noexcept { return max_length_; }

  double average_length(const FrequencyTable& freq) const {
    std::uint64_t bits = 0;
    for (const auto& [sym, cnt] : freq.items()) bits += cnt * at(sym).length;
    return static_cast<double>(bits) / static_cast<double>(freq.total());
  }

  bool is_prefix_free() const {
    auto aligned = [](const CodeWord& c) { return c.value << (64 - c.length); };
    std::vector<CodeWord> sorted;
    sorted.reserve(entries_.size());
    for (const auto& [sym, cw] : entries_) sorted.push_back(cw);
    std::sort(sorted.begin(), sorted.end(), [&](const CodeWord& a, const CodeWord& b) {
      return aligned(a) != aligned(b) ? aligned(a) < aligned(b) : a.length < b.length;
    });
    for (std::size_t k = 1; k < sorted.size(); ++k) {
      const CodeWord &a = sorted[k - 1], &b = sorted[k];
      if (a.length <= b.length && aligned(a) == (aligned(b) >> (64 - a.length) << (64 - a.length)))
        return false;
    }
    return true;
  }

  using Entry = std::pair<Symbol, CodeWord>;
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  // True when every code word equals the canonical reconstruction from its
  // length; only such tables survive serialization bit-exactly.
  bool is_canonical() const {
    std::vector<std::pair<Symbol, std::uint8_t>> lens;
    lens.reserve(entries_.size());
    for (const auto& [sym, cw] : entries_) {
      if (!lens.empty() && cw.length < lens.back().second) return false;
      lens.push_back({sym, cw.length});
    }
    try {
      return from_lengths(lens).entries() == entries_;
    } catch (const std::invalid_argument&) {
      return false;
    }
  }

  friend bool operator==(const CodeTable& a, const CodeTable& b) {
    return a.entries_ == b.entries_;
  }

private:
  struct LengthEntry {
    Symbol symbol;
    std::uint8_t length;
    std::uint64_t count;
  };

  static std::vector<Entry> assign_canonical(std::vector<LengthEntry> lens) {
    std::sort(lens.begin(), lens.end(), [](const LengthEntry& a, const LengthEntry& b) {
      if (a.length != b.length) return a.length < b.length;
      if (a.count != b.count) return a.count > b.count;
      return a.symbol < b.symbol;
    });
    std::vector<std::pair<Symbol, std::uint8_t>> pairs;
    pairs.reserve(lens.size());
    for (const auto& e : lens) pairs.push_back({e.symbol, e.length});
    return from_lengths(pairs).entries_;
  }

  explicit CodeTable(std::vector<Entry> entries) : entries_(std::move(entries)) {
    index_.reserve(entries_.size());
    for (std::uint32_t k = 0; k < entries_.size(); ++k) {
      if (!index_.emplace(entries_[k].first, k).second)
        throw std::invalid_argument("duplicate symbol in code table");
      max_length_ = std::max<unsigned>(max_length_, entries_[k].second.length);
    }
  }

  std::vector<Entry> entries_;
  std::unordered_map<Symbol, std::uint32_t> index_;
  unsigned max_length_ = 0;
};

// Binary code tree for bit-by-bit decoding. Nodes are indices into a flat
// pool. A leaf may carry children when one code word prefixes another
// (tolerated for externally supplied tables); decoders resolve such leaves
// longest-match. Two identical code words are not decodable and rejected.
class DecodeTree {
public:
  using NodeRef = std::uint32_t;
  static constexpr std::int32_t kNone = -1;

  static DecodeTree build(const CodeTable& codes) {
    DecodeTree tree;
    tree.nodes_.push_back({});  // root
    for (const auto& [sym, cw] : codes.entries()) {
      NodeRef x = 0;
      for (unsigned k = 0; k < cw.length; ++k) {
        const bool b = cw.bit(k);
        std::int32_t child = tree.nodes_[x].child[b];
        if (child == kNone) {
          child = static_cast<std::int32_t>(tree.nodes_.size());
          tree.nodes_.push_back({});
          tree.nodes_[x].child[b] = child;
        }
        x = static_cast<NodeRef>(child);
      }
      Node& nd = tree.nodes_[x];
      if (nd.leaf) throw std::invalid_argument("duplicate code word in table");
      nd.leaf = true;
      nd.symbol = sym;
    }
    return tree;
  }

  NodeRef root() const noexcept { return 0; }
  bool is_leaf(NodeRef x) const noexcept { return nodes_[x].leaf; }
  Symbol symbol(NodeRef x) const noexcept { return nodes_[x].symbol; }

  // kNone when the observed bit has no continuation.
  std::int32_t child(NodeRef x, bool bit) const noexcept { return nodes_[x].child[bit]; }

  NodeRef step(NodeRef x, bool bit) const {
    const std::int32_t c = nodes_[x].child[bit];
    if (c == kNone) throw std::runtime_error("bit sequence leaves the code tree");
    return static_cast<NodeRef>(c);
  }

  std::size_t node_count() const noexcept { return nodes_.size(); }

  // Full walk of one code word; used by tests and sanity checks.
  Symbol decode_bits(const CodeWord& cw) const {
    NodeRef x = root();
    for (unsigned k = 0; k < cw.length; ++k) x = step(x, cw.bit(k));
    if (!is_leaf(x)) throw std::runtime_error("code word does not reach a leaf");
    return symbol(x);
  }

private:
  struct Node {
    std::int32_t child[2] = {kNone, kNone};
    Symbol symbol = 0;
    bool leaf = false;
  };

  std::vector<Node> nodes_;
};

}  // namespace sfdc
