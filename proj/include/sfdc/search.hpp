#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <vector>

#include "sfdc/sfdc.hpp"

namespace sfdc {

// A pattern compiled against a text's code table: its standalone layered
// encoding plus the blind-match mask, which is 1 exactly at the dynamic
// positions carrying a real pattern bit.
class BlindPattern {
public:
  // Empty when the pattern uses a symbol outside the code table; such a
  // pattern cannot occur in any text encoded with that table.
  static std::optional<BlindPattern> compile(std::span<const Symbol> x, const CodeTable& codes,
                                             unsigned lambda) {
    if (lambda < 2) throw std::invalid_argument("layer count must be at least 2");
    if (x.empty()) throw std::invalid_argument("pattern must be nonempty");
    for (Symbol c : x)
      if (!codes.find(c)) return std::nullopt;

    BlindPattern pat;
    pat.symbols_.assign(x.begin(), x.end());
    pat.lambda_ = lambda;
    PlacementLog log;
    SfdcContainer enc = SfdcContainer::encode(x, codes, lambda, &log);
    pat.fixed_.reserve(lambda - 1);
    for (unsigned h = 0; h + 1 < lambda; ++h) pat.fixed_.push_back(enc.fixed_layer(h));
    pat.dynamic_ = enc.dynamic_layer();
    pat.mask_ = BitLayer(pat.dynamic_.size());
    for (const Placement& p : log) pat.mask_.write_bit(p.dyn_pos, true);
    return pat;
  }

  std::uint64_t length() const noexcept { return symbols_.size(); }           // m
  std::uint64_t dynamic_length() const noexcept { return dynamic_.size(); }   // m'
  unsigned lambda() const noexcept { return lambda_; }
  const BitLayer& fixed_layer(unsigned h) const { return fixed_.at(h); }
  const BitLayer& dynamic_layer() const noexcept { return dynamic_; }
  const BitLayer& blind_mask() const noexcept { return mask_; }
  const std::vector<Symbol>& symbols() const noexcept { return symbols_; }

private:
  BlindPattern() = default;

  std::vector<Symbol> symbols_;
  unsigned lambda_ = 0;
  std::vector<BitLayer> fixed_;
  BitLayer dynamic_;
  BitLayer mask_;
};

// Occurrence check at text position i without decoding: block-wise equality
// of the fixed layers, then the masked dynamic prefix. Pattern bits that
// flush past position m-1 in the standalone encoding interleave with later
// text characters, so that tail is confirmed by decoding the window instead
// of comparing it blind.
inline bool verify(const SfdcContainer& text, const BlindPattern& pat, std::uint64_t i) {
  const std::uint64_t m = pat.length();
  if (text.lambda() != pat.lambda())
    throw std::invalid_argument("pattern was compiled for a different layer count");
  if (m > text.size() || i > text.size() - m)
    throw std::out_of_range("window start out of range");

  for (unsigned h = 0; h + 1 < pat.lambda(); ++h) {
    const BitLayer& xl = pat.fixed_layer(h);
    const BitLayer& yl = text.fixed_layer(h);
    for (std::uint64_t j = 0; j < m; j += kWordBits) {
      const unsigned s = static_cast<unsigned>(std::min<std::uint64_t>(kWordBits, m - j));
      if (xl.lblock(j, s) != yl.lblock(i + j, s)) return false;
    }
  }

  const std::uint64_t m_dyn = std::min<std::uint64_t>(pat.dynamic_length(), m);
  for (std::uint64_t j = 0; j < m_dyn; j += kWordBits) {
    const unsigned s = static_cast<unsigned>(std::min<std::uint64_t>(kWordBits, m_dyn - j));
    const std::uint64_t want = pat.dynamic_layer().lblock(j, s);
    const std::uint64_t got =
        text.dynamic_layer().lblock(i + j, s) & pat.blind_mask().lblock(j, s);
    if (want != got) return false;
  }

  if (pat.dynamic_length() > m)
    return text.decode_window(i, i + m - 1) == pat.symbols();
  return true;
}

// Bucket table over the pattern's first fixed layer: bucket C holds the
// probe offsets m-q-i of every position i where block X_0[i..i+q-1] = C.
class BucketTable {
public:
  BucketTable(const BlindPattern& pat, unsigned q) : q_(q) {
    const std::uint64_t m = pat.length();
    if (q < 1 || q > 16 || q > m)
      throw std::invalid_argument("block width must be in [1, min(m, 16)]");
    buckets_.assign(std::size_t{1} << q, {});
    const BitLayer& x0 = pat.fixed_layer(0);
    for (std::uint64_t i = 0; i + q <= m; ++i)
      buckets_[x0.rblock(i, q)].push_back(m - q - i);
  }

  unsigned block_width() const noexcept { return q_; }

  std::span<const std::uint64_t> candidates(std::uint64_t block) const {
    return buckets_[block];
  }

private:
  unsigned q_;
  std::vector<std::vector<std::uint64_t>> buckets_;
};

namespace detail {

inline void probe_range(const SfdcContainer& text, const BlindPattern& pat,
                        const BucketTable& buckets, std::uint64_t first_probe,
                        std::uint64_t step, std::vector<std::uint64_t>& out) {
  const std::uint64_t n = text.size();
  const std::uint64_t m = pat.length();
  const unsigned q = buckets.block_width();
  for (std::uint64_t j = first_probe; j < n; j += step) {
    const std::uint64_t block = text.fixed_layer(0).rblock(j, q);
    for (std::uint64_t k : buckets.candidates(block)) {
      // Bucket offset k = m-q-i marks a pattern block at position i; the
      // probe block then aligns the window start at j-i.
      const std::uint64_t h = j - (m - q) + k;
      if (h <= n - m && verify(text, pat, h)) out.push_back(h);
    }
  }
}

}  // namespace detail

// All occurrences of the compiled pattern, ascending. Probes the first fixed
// layer in steps of m-q+1 and verifies the bucket candidates; with threads
// > 1 the probe positions are partitioned round-robin across workers.
inline std::vector<std::uint64_t> skip_search(const SfdcContainer& text, const BlindPattern& pat,
                                              unsigned q = 0, unsigned threads = 1) {
  const std::uint64_t n = text.size();
  const std::uint64_t m = pat.length();
  if (m > n) return {};
  if (q == 0) q = static_cast<unsigned>(std::min<std::uint64_t>(8, m));
  const BucketTable buckets(pat, q);
  const std::uint64_t step = m - q + 1;

  std::vector<std::uint64_t> result;
  if (threads <= 1) {
    detail::probe_range(text, pat, buckets, m - q, step, result);
  } else {
    std::vector<std::vector<std::uint64_t>> partial(threads);
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
      workers.emplace_back([&, t] {
        detail::probe_range(text, pat, buckets, m - q + t * step, step * threads, partial[t]);
      });
    for (std::thread& w : workers) w.join();
    for (const auto& part : partial) result.insert(result.end(), part.begin(), part.end());
  }
  std::sort(result.begin(), result.end());
  result.erase(std::unique(result.begin(), result.end()), result.end());
  return result;
}

// Convenience overload: compiles the pattern first; symbols outside the
// text's alphabet yield no occurrences.
inline std::vector<std::uint64_t> skip_search_text(const SfdcContainer& text,
                                                   std::span<const Symbol> pattern, unsigned q = 0,
                                                   unsigned threads = 1) {
  const std::optional<BlindPattern> pat = BlindPattern::compile(pattern, text.codes(), text.lambda());
  if (!pat) return {};
  return skip_search(text, *pat, q, threads);
}

// Classic Skip-Search on plain symbol sequences; correctness baseline and
// benchmark reference.
inline std::vector<std::uint64_t> plain_skip_search(std::span<const Symbol> text,
                                                    std::span<const Symbol> pattern) {
  const std::uint64_t n = text.size();
  const std::uint64_t m = pattern.size();
  if (m == 0 || m > n) return {};
  std::unordered_map<Symbol, std::vector<std::uint64_t>> buckets;
  for (std::uint64_t i = 0; i < m; ++i) buckets[pattern[i]].push_back(i);

  std::vector<std::uint64_t> result;
  for (std::uint64_t j = m - 1; j < n; j += m) {
    const auto it = buckets.find(text[j]);
    if (it == buckets.end()) continue;
    for (std::uint64_t k : it->second) {
      const std::uint64_t h = j - k;
      if (h > n - m) continue;
      if (std::equal(pattern.begin(), pattern.end(), text.begin() + h)) result.push_back(h);
    }
  }
  std::sort(result.begin(), result.end());
  result.erase(std::unique(result.begin(), result.end()), result.end());
  return result;
}

}  // namespace sfdc
