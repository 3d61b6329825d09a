#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace paymine {

/// Fixed-width bit-vector fingerprint. Bit i lives in word i/64, bit i%64,
/// which matches a little-endian byte layout (bit i = byte i/8, bit i%8,
/// LSB-first) on disk.
class BitFingerprint {
 public:
  BitFingerprint() = default;

  explicit BitFingerprint(std::uint32_t width)
      : width_(width), words_((static_cast<std::size_t>(width) + 63) / 64, 0) {}

  std::uint32_t width() const noexcept { return width_; }
  bool empty_width() const noexcept { return width_ == 0; }

  void set(std::uint32_t i) {
    check_index(i);
    words_[i >> 6] |= std::uint64_t{1} << (i & 63);
  }

  void clear(std::uint32_t i) {
    check_index(i);
    words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }

  bool test(std::uint32_t i) const {
    check_index(i);
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }

  std::uint64_t popcount() const noexcept {
    std::uint64_t n = 0;
    for (std::uint64_t w : words_) n += std::popcount(w);
    return n;
  }

  bool any() const noexcept {
    for (std::uint64_t w : words_) {
      if (w != 0) return true;
    }
    return false;
  }

  /// Sorted indices of all set bits.
  std::vector<std::uint32_t> set_bits() const {
    std::vector<std::uint32_t> out;
    out.reserve(popcount());
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w != 0) {
        unsigned b = std::countr_zero(w);
        out.push_back(static_cast<std::uint32_t>(wi * 64 + b));
        w &= w - 1;
      }
    }
    return out;
  }

  template <class Fn>
  void for_each_set_bit(Fn&& fn) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w != 0) {
        unsigned b = std::countr_zero(w);
        fn(static_cast<std::uint32_t>(wi * 64 + b));
        w &= w - 1;
      }
    }
  }

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }
  std::vector<std::uint64_t>& words() noexcept { return words_; }

  friend bool operator==(const BitFingerprint& a, const BitFingerprint& b) {
    return a.width_ == b.width_ && a.words_ == b.words_;
  }

  friend BitFingerprint intersect(const BitFingerprint& a, const BitFingerprint& b) {
    check_widths(a, b);
    BitFingerprint out(a.width_);
    for (std::size_t i = 0; i < a.words_.size(); ++i)
      out.words_[i] = a.words_[i] & b.words_[i];
    return out;
  }

  friend BitFingerprint unite(const BitFingerprint& a, const BitFingerprint& b) {
    check_widths(a, b);
    BitFingerprint out(a.width_);
    for (std::size_t i = 0; i < a.words_.size(); ++i)
      out.words_[i] = a.words_[i] | b.words_[i];
    return out;
  }

  /// Clears in `a` every bit set in `b` (a AND NOT b); the masking primitive.
  friend BitFingerprint and_not(const BitFingerprint& a, const BitFingerprint& b) {
    check_widths(a, b);
    BitFingerprint out(a.width_);
    for (std::size_t i = 0; i < a.words_.size(); ++i)
      out.words_[i] = a.words_[i] & ~b.words_[i];
    return out;
  }

  /// In-place variants; avoid a temporary when stripping many libraries.
  void intersect_with(const BitFingerprint& b) {
    check_widths(*this, b);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= b.words_[i];
  }

  void unite_with(const BitFingerprint& b) {
    check_widths(*this, b);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= b.words_[i];
  }

  void and_not_with(const BitFingerprint& b) {
    check_widths(*this, b);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~b.words_[i];
  }

  /// Popcounts of a&b and a|b in one pass, without materializing either.
  friend void popcount_and_or(const BitFingerprint& a, const BitFingerprint& b,
                              std::uint64_t& n_and, std::uint64_t& n_or) {
    check_widths(a, b);
    std::uint64_t na = 0, no = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
      na += std::popcount(a.words_[i] & b.words_[i]);
      no += std::popcount(a.words_[i] | b.words_[i]);
    }
    n_and = na;
    n_or = no;
  }

 private:
  static void check_widths(const BitFingerprint& a, const BitFingerprint& b) {
    if (a.width_ != b.width_) {
      throw std::invalid_argument("fingerprint width mismatch: " +
                                  std::to_string(a.width_) + " vs " +
                                  std::to_string(b.width_));
    }
  }

  void check_index(std::uint32_t i) const {
    if (i >= width_) {
      throw std::out_of_range("bit index " + std::to_string(i) +
                              " out of range for width " + std::to_string(width_));
    }
  }

  std::uint32_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

inline std::uint64_t popcount(const BitFingerprint& fp) noexcept { return fp.popcount(); }

/// Jaccard similarity S(a AND b) / S(a OR b). Two all-zero fingerprints
/// compare as 1.0 so degenerate inputs group together instead of erroring.
inline double jaccard(const BitFingerprint& a, const BitFingerprint& b) {
  std::uint64_t n_and = 0, n_or = 0;
  popcount_and_or(a, b, n_and, n_or);
  if (n_or == 0) return 1.0;
  return static_cast<double>(n_and) / static_cast<double>(n_or);
}

/// Containment S(a AND b) / S(a): how much of a lies inside b.
inline double containment(const BitFingerprint& a, const BitFingerprint& b) {
  std::uint64_t n_and = 0, n_or = 0;
  popcount_and_or(a, b, n_and, n_or);
  std::uint64_t n_a = a.popcount();
  if (n_a == 0) {
    throw std::domain_error("containment undefined for an all-zero first operand");
  }
  return static_cast<double>(n_and) / static_cast<double>(n_a);
}

}  // namespace paymine
