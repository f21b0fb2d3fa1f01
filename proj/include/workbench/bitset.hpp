// Minimal dynamic bitset used by the refinement tables.
#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace wb {

class Bitset {
public:
  Bitset() = default;
  explicit Bitset(std::size_t n, bool fill = false)
      : size_(n), words_((n + 63) / 64, fill ? ~0ull : 0ull) {
    trim();
  }

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
  void set(std::size_t i) { words_[i >> 6] |= 1ull << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(1ull << (i & 63)); }

  Bitset& operator&=(const Bitset& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
    return *this;
  }

  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }

  // True when every set bit of this is set in o.
  bool subsetOf(const Bitset& o) const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] & ~o.words_[w]) return false;
    return true;
  }

  int firstSet() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w])
        return static_cast<int>(w * 64 +
                                static_cast<std::size_t>(__builtin_ctzll(words_[w])));
    return -1;
  }

  bool operator==(const Bitset& o) const {
    return size_ == o.size_ && words_ == o.words_;
  }

private:
  void trim() {
    if (size_ & 63 && !words_.empty())
      words_.back() &= (1ull << (size_ & 63)) - 1;
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace wb
