#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace excat {

/// Fixed-width dynamic bitset with value semantics and a total order, used for
/// sieves (subsets of morphisms) and span-sets (subsets of a span universe).
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t width) : width_(width), words_((width + 63) / 64, 0) {}

  std::size_t width() const { return width_; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i) { words_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  void set_all() {
    std::fill(words_.begin(), words_.end(), ~std::uint64_t{0});
    trim();
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  bool none() const {
    return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
  }
  bool any() const { return !none(); }
  bool all() const { return count() == width_; }

  bool is_subset_of(const Bitset& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }

  Bitset& operator|=(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  Bitset& operator&=(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }
  friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }

  /// Indices of set bits in increasing order.
  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      auto bits = words_[w];
      while (bits) {
        out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
    return out;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      auto bits = words_[w];
      while (bits) {
        fn(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

  std::size_t hash() const {
    std::size_t h = width_;
    for (auto w : words_) h = h * 1099511628211ULL ^ std::hash<std::uint64_t>{}(w);
    return h;
  }

  friend bool operator==(const Bitset&, const Bitset&) = default;

  // Orders by width, then lexicographically by bit index (lowest index most
  // significant), so enumerations sorted with it are stable across runs.
  friend std::strong_ordering operator<=>(const Bitset& a, const Bitset& b) {
    if (auto c = a.width_ <=> b.width_; c != 0) return c;
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
      if (a.words_[i] == b.words_[i]) continue;
      auto diff = a.words_[i] ^ b.words_[i];
      auto low = diff & (~diff + 1);
      return (a.words_[i] & low) ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
  }

 private:
  void trim() {
    if (width_ % 64 != 0 && !words_.empty())
      words_.back() &= (std::uint64_t{1} << (width_ % 64)) - 1;
  }

  std::size_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

struct BitsetHash {
  std::size_t operator()(const Bitset& b) const { return b.hash(); }
};

}  // namespace excat
