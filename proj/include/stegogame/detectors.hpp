#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stegogame/bitstring.hpp"
#include "stegogame/errors.hpp"
#include "stegogame/probsets.hpp"
#include "stegogame/random.hpp"

namespace stegogame {

// A decision procedure word -> {0,1}, the adversary of both games.
class Distinguisher {
 public:
  virtual ~Distinguisher() = default;

  virtual std::string name() const = 0;
  // Deterministic detectors never touch the coin source.
  virtual bool deterministic() const { return true; }
  // Set when the detector is only meaningful on words of one length.
  virtual std::optional<std::size_t> word_length() const { return std::nullopt; }
  virtual bool decide(const BitString& word, RandomSource& coins) const = 0;
};

using DistinguisherPtr = std::shared_ptr<const Distinguisher>;

namespace detail {

inline std::string format_real(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Number of adjacent positions i, i+1 holding different bits.
inline std::size_t count_transitions(const BitString& word) {
  if (word.size() < 2) return 0;
  const auto& w = word.words();
  std::size_t count = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const std::uint64_t next = k + 1 < w.size() ? w[k + 1] >> 63 : 0;
    std::uint64_t diff = w[k] ^ ((w[k] << 1) | next);
    const std::size_t valid = word.size() - 1 - 64 * k;
    if (valid < 64) diff &= valid == 0 ? 0 : ~std::uint64_t{0} << (64 - valid);
    count += static_cast<std::size_t>(std::popcount(diff));
  }
  return count;
}

inline constexpr std::array<double, 5> kQuantiles = {0.9, 0.95, 0.99, 0.995, 0.999};

// Upper quantiles of chi-square with 2^b - 1 degrees of freedom, b = 1..8.
inline constexpr std::array<std::array<double, 5>, 8> kChiSquareTable = {{
    {2.70554, 3.84146, 6.63490, 7.87944, 10.8276},   // df 1
    {6.25139, 7.81473, 11.3449, 12.8382, 16.2662},   // df 3
    {12.0170, 14.0671, 18.4753, 20.2777, 24.3219},   // df 7
    {22.3071, 24.9958, 30.5779, 32.8013, 37.6973},   // df 15
    {41.4217, 44.9853, 52.1914, 55.0027, 61.0983},   // df 31
    {77.7454, 82.5287, 92.0100, 95.6493, 103.442},   // df 63
    {147.805, 154.302, 166.987, 171.796, 181.993},   // df 127
    {284.336, 293.248, 310.457, 316.919, 330.520},   // df 255
}};

// Two-sided standard normal critical values z_{(1+q)/2}.
inline constexpr std::array<double, 5> kNormalTwoSided = {1.64485, 1.95996, 2.57583, 2.80703,
                                                          3.29053};

inline std::size_t quantile_index(double quantile) {
  for (std::size_t i = 0; i < kQuantiles.size(); ++i) {
    if (std::abs(kQuantiles[i] - quantile) < 1e-12) return i;
  }
  throw InvalidParameter("quantile " + format_real(quantile) +
                         " not tabulated (use 0.9, 0.95, 0.99, 0.995 or 0.999)");
}

}  // namespace detail

class ConstantDistinguisher final : public Distinguisher {
 public:
  explicit ConstantDistinguisher(bool bit) : bit_(bit) {}
  std::string name() const override { return bit_ ? "constant-1" : "constant-0"; }
  bool decide(const BitString&, RandomSource&) const override { return bit_; }

 private:
  bool bit_;
};

// 1 iff the bits after position alpha equal the target.
class SuffixMatchDistinguisher final : public Distinguisher {
 public:
  SuffixMatchDistinguisher(BitString target, std::size_t alpha)
      : target_(std::move(target)), alpha_(alpha) {}

  std::string name() const override { return "suffix-match"; }
  std::optional<std::size_t> word_length() const override { return alpha_ + target_.size(); }
  const BitString& target() const noexcept { return target_; }

  bool decide(const BitString& word, RandomSource&) const override {
    return word.size() == alpha_ + target_.size() && word.suffix_from(alpha_) == target_;
  }

 private:
  BitString target_;
  std::size_t alpha_;
};

// 1 iff the word starts with s_n.
class PrefixMemberDistinguisher final : public Distinguisher {
 public:
  PrefixMemberDistinguisher(BitString prefix, std::size_t length)
      : prefix_(std::move(prefix)), length_(length) {}

  std::string name() const override { return "prefix-member"; }
  std::optional<std::size_t> word_length() const override { return length_; }

  bool decide(const BitString& word, RandomSource&) const override {
    return word.size() >= prefix_.size() && word.prefix(prefix_.size()) == prefix_;
  }

 private:
  BitString prefix_;
  std::size_t length_;
};

// Frequency test over non-overlapping blocks; trailing bits that do not fill
// a block are ignored.
class ChiSquareDistinguisher final : public Distinguisher {
 public:
  ChiSquareDistinguisher(std::size_t block, double quantile) : block_(block), quantile_(quantile) {
    if (block < 1 || block > 8) throw InvalidParameter("chi-square block must be in 1..8");
    critical_ = detail::kChiSquareTable[block - 1][detail::quantile_index(quantile)];
  }

  std::string name() const override {
    return "chi-square(block=" + std::to_string(block_) + ",q=" + detail::format_real(quantile_) +
           ")";
  }
  double critical_value() const noexcept { return critical_; }

  double statistic(const BitString& word) const {
    const std::size_t blocks = word.size() / block_;
    if (blocks == 0) return 0.0;
    const std::size_t cells = std::size_t{1} << block_;
    std::array<std::size_t, 256> counts{};
    for (std::size_t b = 0; b < blocks; ++b) {
      std::size_t v = 0;
      for (std::size_t j = 0; j < block_; ++j) v = (v << 1) | word[b * block_ + j];
      ++counts[v];
    }
    const double expected = static_cast<double>(blocks) / static_cast<double>(cells);
    double stat = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      const double d = static_cast<double>(counts[c]) - expected;
      stat += d * d / expected;
    }
    return stat;
  }

  bool decide(const BitString& word, RandomSource&) const override {
    return statistic(word) > critical_;
  }

 private:
  std::size_t block_;
  double quantile_;
  double critical_ = 0.0;
};

// Wald-Wolfowitz runs test, two-sided normal approximation. Words made of a
// single repeated symbol (length >= 2) are rejected outright.
class RunsDistinguisher final : public Distinguisher {
 public:
  explicit RunsDistinguisher(double quantile)
      : quantile_(quantile), critical_(detail::kNormalTwoSided[detail::quantile_index(quantile)]) {}

  std::string name() const override { return "runs(q=" + detail::format_real(quantile_) + ")"; }

  bool decide(const BitString& word, RandomSource&) const override {
    const double n = static_cast<double>(word.size());
    if (word.size() < 2) return false;
    const double ones = static_cast<double>(word.popcount());
    const double zeros = n - ones;
    if (ones == 0 || zeros == 0) return true;
    const double runs = 1.0 + static_cast<double>(detail::count_transitions(word));
    const double product = 2.0 * ones * zeros;
    const double mean = product / n + 1.0;
    const double variance = product * (product - n) / (n * n * (n - 1.0));
    if (variance <= 0.0) return false;
    return std::abs(runs - mean) / std::sqrt(variance) > critical_;
  }

 private:
  double quantile_;
  double critical_;
};

// 1 iff the fraction of adjacent positions holding different bits reaches the
// threshold.
class AlternationDistinguisher final : public Distinguisher {
 public:
  explicit AlternationDistinguisher(double threshold) : threshold_(threshold) {
    if (!(threshold > 0.5 && threshold <= 1.0)) {
      throw InvalidParameter("alternation threshold must lie in (0.5, 1]");
    }
  }

  std::string name() const override {
    return "alternation(t=" + detail::format_real(threshold_) + ")";
  }

  bool decide(const BitString& word, RandomSource&) const override {
    if (word.size() < 2) return false;
    const double fraction = static_cast<double>(detail::count_transitions(word)) /
                            static_cast<double>(word.size() - 1);
    return fraction >= threshold_;
  }

 private:
  double threshold_;
};

// 1 iff the last bit differs from the XOR of all preceding bits.
class ParityDistinguisher final : public Distinguisher {
 public:
  std::string name() const override { return "parity"; }
  bool decide(const BitString& word, RandomSource&) const override {
    return !word.empty() && (word.popcount() & 1U) != 0;
  }
};

// Ignores the word and flips a fair coin.
class CoinDistinguisher final : public Distinguisher {
 public:
  std::string name() const override { return "coin"; }
  bool deterministic() const override { return false; }
  bool decide(const BitString&, RandomSource& coins) const override { return coins.next_bit(); }
};

inline DistinguisherPtr make_constant(bool bit) {
  return std::make_shared<const ConstantDistinguisher>(bit);
}

inline DistinguisherPtr make_suffix_match(BitString target, std::size_t alpha) {
  return std::make_shared<const SuffixMatchDistinguisher>(std::move(target), alpha);
}

inline DistinguisherPtr make_prefix_member(const PrefixUniformFamily& family, std::size_t n) {
  return std::make_shared<const PrefixMemberDistinguisher>(family.prefix(n),
                                                           family.support_length(n));
}

inline DistinguisherPtr make_chi_square(std::size_t block, double quantile) {
  return std::make_shared<const ChiSquareDistinguisher>(block, quantile);
}

inline DistinguisherPtr make_runs_test(double quantile) {
  return std::make_shared<const RunsDistinguisher>(quantile);
}

inline DistinguisherPtr make_alternation(double threshold) {
  return std::make_shared<const AlternationDistinguisher>(threshold);
}

inline DistinguisherPtr make_parity_check() { return std::make_shared<const ParityDistinguisher>(); }

inline DistinguisherPtr make_coin() { return std::make_shared<const CoinDistinguisher>(); }

}  // namespace stegogame
