#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include <boost/container/small_vector.hpp>

#include "stegogame/errors.hpp"
#include "stegogame/random.hpp"

namespace stegogame {

enum class BitFormat { binary, hex };

// Fixed-length word over {0,1}. Index 0 is the leftmost symbol. Bits are packed
// most-significant-first into 64-bit words; bits past size() are always zero.
class BitString {
 public:
  using Storage = boost::container::small_vector<std::uint64_t, 4>;

  BitString() = default;

  static BitString zeros(std::size_t length) {
    BitString b;
    b.size_ = length;
    b.words_.assign(word_count(length), 0);
    return b;
  }

  static BitString ones(std::size_t length) {
    BitString b;
    b.size_ = length;
    b.words_.assign(word_count(length), ~std::uint64_t{0});
    b.clear_tail();
    return b;
  }

  // The `length` low bits of `value`, leftmost symbol = most significant bit.
  static BitString from_uint(std::uint64_t value, std::size_t length) {
    if (length > 64) throw InvalidParameter("from_uint supports at most 64 bits");
    if (length < 64 && (value >> length) != 0) {
      throw InvalidParameter("value does not fit in " + std::to_string(length) + " bits");
    }
    BitString b;
    b.size_ = length;
    if (length > 0) b.words_.push_back(value << (64 - length));
    return b;
  }

  // Packed MSB-first words; bits past `length` are cleared.
  static BitString from_words(std::span<const std::uint64_t> words, std::size_t length) {
    if (words.size() != word_count(length)) throw InvalidParameter("word count does not match length");
    BitString b;
    b.size_ = length;
    b.words_.assign(words.begin(), words.end());
    b.clear_tail();
    return b;
  }

  template <typename Pred>
  static BitString generate(std::size_t length, Pred&& bit_at) {
    BitString b = zeros(length);
    for (std::size_t i = 0; i < length; ++i) {
      if (bit_at(i)) b.set(i);
    }
    return b;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool operator[](std::size_t i) const noexcept {
    return ((words_[i >> 6] >> (63 - (i & 63))) & 1U) != 0;
  }

  bool at(std::size_t i) const {
    if (i >= size_) throw InvalidParameter("bit index out of range");
    return (*this)[i];
  }

  std::uint64_t to_uint() const {
    if (size_ > 64) throw InvalidParameter("to_uint supports at most 64 bits");
    return size_ == 0 ? 0 : words_[0] >> (64 - size_);
  }

  std::size_t popcount() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  BitString slice(std::size_t pos, std::size_t len) const {
    if (pos > size_ || len > size_ - pos) throw InvalidParameter("slice out of range");
    BitString out;
    out.size_ = len;
    const std::size_t n = word_count(len);
    out.words_.resize(n);
    const std::size_t nw = words_.size();
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t start = pos + 64 * k;
      const std::size_t q = start >> 6;
      const unsigned r = static_cast<unsigned>(start & 63);
      std::uint64_t w = words_[q] << r;
      if (r != 0 && q + 1 < nw) w |= words_[q + 1] >> (64 - r);
      out.words_[k] = w;
    }
    out.clear_tail();
    return out;
  }

  BitString prefix(std::size_t len) const { return slice(0, len); }
  BitString suffix_from(std::size_t pos) const { return slice(pos, size_ - pos); }

  const Storage& words() const noexcept { return words_; }

  friend bool operator==(const BitString& a, const BitString& b) noexcept {
    return a.size_ == b.size_ && std::equal(a.words_.begin(), a.words_.end(), b.words_.begin());
  }

  // Shorter words first, then lexicographic.
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) noexcept {
    if (auto c = a.size_ <=> b.size_; c != 0) return c;
    return std::lexicographical_compare_three_way(a.words_.begin(), a.words_.end(),
                                                  b.words_.begin(), b.words_.end());
  }

  friend BitString xor_bits(const BitString& a, const BitString& b) {
    if (a.size_ != b.size_) {
      throw LengthMismatch("xor of lengths " + std::to_string(a.size_) + " and " +
                           std::to_string(b.size_));
    }
    BitString out = a;
    for (std::size_t k = 0; k < out.words_.size(); ++k) out.words_[k] ^= b.words_[k];
    return out;
  }

  friend BitString concat(const BitString& a, const BitString& b) {
    BitString out = a;
    out.append(b);
    return out;
  }

  static BitString random(std::size_t length, RandomSource& rng) {
    BitString b;
    b.size_ = length;
    b.words_.resize(word_count(length));
    for (auto& w : b.words_) w = rng.next_u64();
    b.clear_tail();
    return b;
  }

 private:
  static constexpr std::size_t word_count(std::size_t bits) noexcept { return (bits + 63) / 64; }

  void set(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (63 - (i & 63)); }

  void clear_tail() noexcept {
    const unsigned used = static_cast<unsigned>(size_ & 63);
    if (used != 0) words_.back() &= ~std::uint64_t{0} << (64 - used);
  }

  void append(const BitString& o) {
    if (o.size_ == 0) return;
    const unsigned off = static_cast<unsigned>(size_ & 63);
    if (off == 0) {
      words_.insert(words_.end(), o.words_.begin(), o.words_.end());
    } else {
      for (auto w : o.words_) {
        words_.back() |= w >> off;
        words_.push_back(w << (64 - off));
      }
    }
    size_ += o.size_;
    words_.resize(word_count(size_));
  }

  Storage words_;
  std::size_t size_ = 0;
};

inline BitString operator^(const BitString& a, const BitString& b) { return xor_bits(a, b); }

// Each of the 2^length words equally likely under an ideal source.
inline BitString sample_uniform(std::size_t length, RandomSource& rng) {
  return BitString::random(length, rng);
}

inline BitString parse(std::string_view text, BitFormat format = BitFormat::binary) {
  if (format == BitFormat::binary) {
    for (char c : text) {
      if (c != '0' && c != '1') {
        throw ParseError(std::string("illegal binary symbol '") + c + "'");
      }
    }
    return BitString::generate(text.size(), [&](std::size_t i) { return text[i] == '1'; });
  }
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ParseError(std::string("illegal hexadecimal symbol '") + c + "'");
  };
  for (char c : text) nibble(c);
  return BitString::generate(text.size() * 4, [&](std::size_t i) {
    return ((nibble(text[i / 4]) >> (3 - i % 4)) & 1) != 0;
  });
}

inline std::string render(const BitString& b, BitFormat format = BitFormat::binary) {
  std::string out;
  if (format == BitFormat::binary) {
    out.reserve(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) out.push_back(b[i] ? '1' : '0');
    return out;
  }
  if (b.size() % 4 != 0) {
    throw FormatError("hexadecimal rendering needs a length divisible by 4, got " +
                      std::to_string(b.size()));
  }
  static constexpr char digits[] = "0123456789abcdef";
  out.reserve(b.size() / 4);
  for (std::size_t i = 0; i < b.size(); i += 4) {
    const int v = (b[i] << 3) | (b[i + 1] << 2) | (b[i + 2] << 1) | int{b[i + 3]};
    out.push_back(digits[v]);
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const BitString& b) {
  return os << (b.empty() ? std::string("ε") : render(b));
}

}  // namespace stegogame

template <>
struct std::hash<stegogame::BitString> {
  std::size_t operator()(const stegogame::BitString& b) const noexcept {
    std::uint64_t h = stegogame::mix64(b.size());
    for (auto w : b.words()) h = stegogame::mix64(h ^ w);
    return static_cast<std::size_t>(h);
  }
};
