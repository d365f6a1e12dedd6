#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "stegogame/bitstring.hpp"
#include "stegogame/errors.hpp"

namespace stegogame {

// Deterministic expander G: seed -> bits. Outputs are prefix-consistent:
// generate(k, L1) is a prefix of generate(k, L2) for L1 <= L2.
class Generator {
 public:
  virtual ~Generator() = default;

  virtual std::string name() const = 0;
  virtual std::size_t min_seed_length() const { return 0; }
  virtual std::size_t max_seed_length() const { return std::numeric_limits<std::size_t>::max(); }
  virtual std::size_t max_output_length() const { return std::numeric_limits<std::size_t>::max(); }

  // l_G for a seed length and requested output; every construction here
  // produces exactly the requested length.
  std::size_t output_length(std::size_t /*seed_length*/, std::size_t requested) const {
    return requested;
  }

  void check_seed(const BitString& seed) const {
    if (seed.size() < min_seed_length()) {
      throw SeedTooShort(name() + " needs at least " + std::to_string(min_seed_length()) +
                         " seed bits, got " + std::to_string(seed.size()));
    }
    if (seed.size() > max_seed_length()) {
      throw InvalidParameter(name() + " accepts at most " + std::to_string(max_seed_length()) +
                             " seed bits, got " + std::to_string(seed.size()));
    }
  }

  BitString generate(const BitString& seed, std::size_t out_len) const {
    check_seed(seed);
    if (out_len < 1 || out_len > max_output_length()) {
      throw UnsupportedLength(name() + " cannot produce " + std::to_string(out_len) + " bits");
    }
    return do_generate(seed, out_len);
  }

 protected:
  virtual BitString do_generate(const BitString& seed, std::size_t out_len) const = 0;
};

using GeneratorPtr = std::shared_ptr<const Generator>;

namespace detail {

// Seed bits fill consecutive Word-sized chunks most-significant-first; the
// last chunk is zero-padded.
template <typename Word>
Word seed_chunk(const BitString& seed, std::size_t index) {
  constexpr std::size_t width = sizeof(Word) * 8;
  Word w = 0;
  for (std::size_t j = 0; j < width; ++j) {
    const std::size_t bit = index * width + j;
    if (bit < seed.size() && seed[bit]) w |= Word{1} << (width - 1 - j);
  }
  return w;
}

// Appends whole bytes MSB-first, stopping once `out_len` bits are collected.
class BitSink {
 public:
  explicit BitSink(std::size_t out_len) : out_len_(out_len), words_((out_len + 63) / 64, 0) {}

  bool full() const noexcept { return filled_ >= out_len_; }

  void push_byte(std::uint8_t byte) {
    for (int j = 7; j >= 0 && !full(); --j) {
      if ((byte >> j) & 1U) words_[filled_ >> 6] |= std::uint64_t{1} << (63 - (filled_ & 63));
      ++filled_;
    }
  }

  void push_bit(bool bit) {
    if (full()) return;
    if (bit) words_[filled_ >> 6] |= std::uint64_t{1} << (63 - (filled_ & 63));
    ++filled_;
  }

  BitString finish() const { return BitString::from_words(words_, out_len_); }

 private:
  std::size_t out_len_;
  std::size_t filled_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace detail

class ZeroGenerator final : public Generator {
 public:
  std::string name() const override { return "zero"; }

 protected:
  BitString do_generate(const BitString&, std::size_t out_len) const override {
    return BitString::zeros(out_len);
  }
};

// i-th output bit = least-significant bit of the LCG state after i+1 steps of
// x <- a*x + c (mod 2^64). Seed chunks of 64 bits are XOR-folded into x_0.
class LcgLsbGenerator final : public Generator {
 public:
  LcgLsbGenerator(std::uint64_t multiplier, std::uint64_t increment)
      : multiplier_(multiplier), increment_(increment) {
    if ((multiplier & 1U) == 0) throw InvalidParameter("LCG multiplier must be odd");
  }

  std::string name() const override { return "lcg-lsb"; }
  std::size_t min_seed_length() const override { return 1; }
  std::uint64_t multiplier() const noexcept { return multiplier_; }
  std::uint64_t increment() const noexcept { return increment_; }

  static std::uint64_t initial_state(const BitString& seed) {
    std::uint64_t x = 0;
    for (std::size_t k = 0; k * 64 < seed.size(); ++k) x ^= detail::seed_chunk<std::uint64_t>(seed, k);
    return x;
  }

 protected:
  BitString do_generate(const BitString& seed, std::size_t out_len) const override {
    std::uint64_t x = initial_state(seed);
    detail::BitSink sink(out_len);
    while (!sink.full()) {
      x = multiplier_ * x + increment_;
      sink.push_bit((x & 1U) != 0);
    }
    return sink.finish();
  }

 private:
  std::uint64_t multiplier_;
  std::uint64_t increment_;
};

// 20-round add-rotate-xor stream construction (the ChaCha20 block function).
class ArxStreamGenerator final : public Generator {
 public:
  using Key = std::array<std::uint32_t, 8>;
  using Nonce = std::array<std::uint32_t, 3>;
  using Block = std::array<std::uint8_t, 64>;

  std::string name() const override { return "arx-stream"; }
  std::size_t min_seed_length() const override { return 1; }
  std::size_t max_seed_length() const override { return 256; }
  std::size_t max_output_length() const override {
    return static_cast<std::size_t>(std::uint64_t{1} << 32) * 512;
  }

  static Block block(const Key& key, std::uint32_t counter, const Nonce& nonce) {
    std::array<std::uint32_t, 16> state = {0x61707865, 0x3320646e, 0x79622d32, 0x6b206574,
                                           key[0],     key[1],     key[2],     key[3],
                                           key[4],     key[5],     key[6],     key[7],
                                           counter,    nonce[0],   nonce[1],   nonce[2]};
    auto x = state;
    auto quarter = [&x](int a, int b, int c, int d) {
      x[a] += x[b]; x[d] = std::rotl(x[d] ^ x[a], 16);
      x[c] += x[d]; x[b] = std::rotl(x[b] ^ x[c], 12);
      x[a] += x[b]; x[d] = std::rotl(x[d] ^ x[a], 8);
      x[c] += x[d]; x[b] = std::rotl(x[b] ^ x[c], 7);
    };
    for (int round = 0; round < 10; ++round) {
      quarter(0, 4, 8, 12);
      quarter(1, 5, 9, 13);
      quarter(2, 6, 10, 14);
      quarter(3, 7, 11, 15);
      quarter(0, 5, 10, 15);
      quarter(1, 6, 11, 12);
      quarter(2, 7, 8, 13);
      quarter(3, 4, 9, 14);
    }
    Block out{};
    for (std::size_t i = 0; i < 16; ++i) {
      const std::uint32_t v = x[i] + state[i];
      for (std::size_t b = 0; b < 4; ++b) out[4 * i + b] = static_cast<std::uint8_t>(v >> (8 * b));
    }
    return out;
  }

  // Key words from seed bits (MSB-first, zero-padded); the seed length goes in
  // the first nonce word so seeds of different lengths never share a stream.
  static Key key_from_seed(const BitString& seed) {
    Key key{};
    for (std::size_t j = 0; j < key.size(); ++j) key[j] = detail::seed_chunk<std::uint32_t>(seed, j);
    return key;
  }

  static Nonce nonce_from_seed(const BitString& seed) {
    return {static_cast<std::uint32_t>(seed.size()), 0, 0};
  }

 protected:
  BitString do_generate(const BitString& seed, std::size_t out_len) const override {
    const Key key = key_from_seed(seed);
    const Nonce nonce = nonce_from_seed(seed);
    detail::BitSink sink(out_len);
    for (std::uint32_t counter = 0; !sink.full(); ++counter) {
      for (std::uint8_t byte : block(key, counter, nonce)) {
        if (sink.full()) break;
        sink.push_byte(byte);
      }
    }
    return sink.finish();
  }
};

inline GeneratorPtr make_zero_generator() { return std::make_shared<const ZeroGenerator>(); }

inline GeneratorPtr make_lcg_lsb_generator(std::uint64_t multiplier = 6364136223846793005ULL,
                                           std::uint64_t increment = 1442695040888963407ULL) {
  return std::make_shared<const LcgLsbGenerator>(multiplier, increment);
}

inline GeneratorPtr make_arx_stream_generator() {
  return std::make_shared<const ArxStreamGenerator>();
}

}  // namespace stegogame
