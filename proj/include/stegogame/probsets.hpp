#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stegogame/bitstring.hpp"
#include "stegogame/errors.hpp"
#include "stegogame/math.hpp"
#include "stegogame/random.hpp"

namespace stegogame {

struct WeightedWord {
  BitString word;
  Rational probability;
};

// Enumerated distribution over a common denominator: Pr[word] = weight / denominator.
struct WeightedSupport {
  std::uint64_t denominator = 1;
  std::vector<std::pair<BitString, std::uint64_t>> items;
};

inline constexpr std::uint64_t kDefaultEnumerableLimit = std::uint64_t{1} << 20;
// Largest common denominator the exact engine multiplies without overflow
// (three factors must fit in 128 bits).
inline constexpr std::uint64_t kMaxDenominator = std::uint64_t{1} << 40;

// Affine support-length rule l(n) = a*n + b with a >= 0.
struct LengthRule {
  std::int64_t a = 1;
  std::int64_t b = 0;

  static LengthRule identity() { return {1, 0}; }

  std::int64_t operator()(std::size_t n) const { return a * static_cast<std::int64_t>(n) + b; }

  std::optional<std::size_t> inverse(std::size_t length) const {
    const auto l = static_cast<std::int64_t>(length);
    if (a == 0) return std::nullopt;
    if ((l - b) < 0 || (l - b) % a != 0) return std::nullopt;
    return static_cast<std::size_t>((l - b) / a);
  }

  Polynomial as_polynomial() const { return Polynomial({b, a}); }
};

// Indexed family {(S_n, P_n)} of equal-length finite supports with their
// distributions, defined for n in [n_min, n_max].
class ProbabilitySetFamily {
 public:
  ProbabilitySetFamily(std::size_t n_min, std::size_t n_max, Polynomial poly_bound,
                       std::uint64_t enumerable_limit)
      : n_min_(n_min),
        n_max_(n_max),
        poly_bound_(std::move(poly_bound)),
        enumerable_limit_(enumerable_limit) {
    if (n_min > n_max) throw InvalidParameter("empty family domain");
  }
  virtual ~ProbabilitySetFamily() = default;

  virtual std::string name() const = 0;
  virtual std::size_t support_length(std::size_t n) const = 0;
  // |S_n|, possibly astronomically large.
  virtual BigInt support_size(std::size_t n) const = 0;
  virtual BitString sample(std::size_t n, RandomSource& rng) const = 0;

  std::size_t n_min() const noexcept { return n_min_; }
  std::size_t n_max() const noexcept { return n_max_; }
  bool in_domain(std::size_t n) const noexcept { return n >= n_min_ && n <= n_max_; }
  const Polynomial& poly_bound() const noexcept { return poly_bound_; }
  std::uint64_t enumerable_limit() const noexcept { return enumerable_limit_; }

  bool enumerable(std::size_t n) const {
    return in_domain(n) && support_size(n) <= enumerable_limit_;
  }

  std::vector<WeightedWord> enumerate(std::size_t n) const {
    require_enumerable(n);
    return do_enumerate(n);
  }

  // Same distribution as enumerate(), as integer weights over one denominator.
  virtual WeightedSupport weighted_support(std::size_t n) const {
    return to_weighted(enumerate(n));
  }

  static WeightedSupport to_weighted(const std::vector<WeightedWord>& words) {
    BigInt lcm = 1;
    for (const auto& w : words) {
      if (w.probability <= 0) throw InvalidParameter("non-positive probability");
      lcm = boost::multiprecision::lcm(lcm, boost::multiprecision::denominator(w.probability));
    }
    if (lcm > kMaxDenominator) throw TooLarge("probability denominators exceed 2^40");
    WeightedSupport out;
    out.denominator = lcm.convert_to<std::uint64_t>();
    out.items.reserve(words.size());
    for (const auto& w : words) {
      BigInt scaled = boost::multiprecision::numerator(w.probability) *
                      (lcm / boost::multiprecision::denominator(w.probability));
      out.items.emplace_back(w.word, scaled.convert_to<std::uint64_t>());
    }
    return out;
  }

 protected:
  virtual std::vector<WeightedWord> do_enumerate(std::size_t n) const = 0;

  void require_domain(std::size_t n) const {
    if (!in_domain(n)) {
      throw DomainError("index " + std::to_string(n) + " outside [" + std::to_string(n_min_) +
                        ", " + std::to_string(n_max_) + "]");
    }
  }

  void require_enumerable(std::size_t n) const {
    require_domain(n);
    if (support_size(n) > enumerable_limit_) {
      throw TooLarge("support at n=" + std::to_string(n) + " has " + support_size(n).str() +
                     " elements, limit " + std::to_string(enumerable_limit_));
    }
  }

 private:
  std::size_t n_min_;
  std::size_t n_max_;
  Polynomial poly_bound_;
  std::uint64_t enumerable_limit_;
};

using FamilyPtr = std::shared_ptr<const ProbabilitySetFamily>;

// S_n = { s_n . w : w in {0,1}^(l(S_n) - alpha) }, uniform.
class PrefixUniformFamily final : public ProbabilitySetFamily {
 public:
  using PrefixRule = std::function<BitString(std::size_t)>;

  PrefixUniformFamily(std::size_t alpha, PrefixRule prefix_rule, LengthRule length_rule,
                      std::size_t n_min, std::size_t n_max,
                      std::uint64_t enumerable_limit = kDefaultEnumerableLimit)
      : ProbabilitySetFamily(n_min, n_max, length_rule.as_polynomial(), enumerable_limit),
        alpha_(alpha),
        prefix_rule_(std::move(prefix_rule)),
        length_rule_(length_rule) {
    if (alpha_ < 1) throw InvalidParameter("alpha must be at least 1");
    if (length_rule_.a < 0) throw InvalidParameter("length rule must be non-decreasing");
    // Non-decreasing rule: the smallest support length sits at n_min.
    if (length_rule_(n_min) <= static_cast<std::int64_t>(alpha_)) {
      throw InvalidParameter("support length " + std::to_string(length_rule_(n_min)) +
                             " leaves no message room after a prefix of " +
                             std::to_string(alpha_) + " bits");
    }
    if (prefix(n_min).size() != alpha_) {
      throw InvalidParameter("prefix rule must produce words of length alpha");
    }
  }

  std::string name() const override { return "prefix-uniform"; }

  std::size_t alpha() const noexcept { return alpha_; }
  const LengthRule& length_rule() const noexcept { return length_rule_; }

  BitString prefix(std::size_t n) const {
    BitString p = prefix_rule_(n);
    if (p.size() != alpha_) throw InvalidParameter("prefix rule must produce words of length alpha");
    return p;
  }

  std::size_t support_length(std::size_t n) const override {
    require_domain(n);
    return static_cast<std::size_t>(length_rule_(n));
  }

  std::size_t free_bits(std::size_t n) const { return support_length(n) - alpha_; }

  BigInt support_size(std::size_t n) const override { return BigInt(1) << free_bits(n); }

  // The index whose supports have this length, if any.
  std::optional<std::size_t> index_for_length(std::size_t length) const {
    auto n = length_rule_.inverse(length);
    if (!n || !in_domain(*n)) {
      // Constant rules: every index shares one length; take the first.
      if (length_rule_.a == 0 && length_rule_(n_min()) == static_cast<std::int64_t>(length)) {
        return n_min();
      }
      return std::nullopt;
    }
    return n;
  }

  BitString sample(std::size_t n, RandomSource& rng) const override {
    return concat(prefix(n), sample_uniform(free_bits(n), rng));
  }

  WeightedSupport weighted_support(std::size_t n) const override {
    require_enumerable(n);
    const std::size_t free = free_bits(n);
    const BitString head = prefix(n);
    WeightedSupport out;
    out.denominator = std::uint64_t{1} << free;
    out.items.reserve(out.denominator);
    for (std::uint64_t w = 0; w < out.denominator; ++w) {
      out.items.emplace_back(concat(head, BitString::from_uint(w, free)), 1);
    }
    return out;
  }

 protected:
  std::vector<WeightedWord> do_enumerate(std::size_t n) const override {
    const auto weighted = weighted_support(n);
    const Rational p(1, weighted.denominator);
    std::vector<WeightedWord> out;
    out.reserve(weighted.items.size());
    for (const auto& [word, weight] : weighted.items) out.push_back({word, p});
    return out;
  }

 private:
  std::size_t alpha_;
  PrefixRule prefix_rule_;
  LengthRule length_rule_;
};

inline std::shared_ptr<const PrefixUniformFamily> make_prefix_uniform(
    std::size_t alpha, PrefixUniformFamily::PrefixRule prefix_rule, LengthRule length_rule,
    std::size_t n_min, std::size_t n_max,
    std::uint64_t enumerable_limit = kDefaultEnumerableLimit) {
  return std::make_shared<const PrefixUniformFamily>(alpha, std::move(prefix_rule), length_rule,
                                                     n_min, n_max, enumerable_limit);
}

// Same prefix for every index.
inline std::shared_ptr<const PrefixUniformFamily> make_prefix_uniform(
    const BitString& prefix, LengthRule length_rule, std::size_t n_min, std::size_t n_max,
    std::uint64_t enumerable_limit = kDefaultEnumerableLimit) {
  return make_prefix_uniform(
      prefix.size(), [prefix](std::size_t) { return prefix; }, length_rule, n_min, n_max,
      enumerable_limit);
}

// alpha = 16, l(S_n) = n, s_n = 0x243f (leading fraction bits of pi), n in [24, 1024].
inline std::shared_ptr<const PrefixUniformFamily> flagship_family() {
  return make_prefix_uniform(parse("243f", BitFormat::hex), LengthRule::identity(), 24, 1024);
}

// Words of length l whose last bit equals the XOR of all preceding bits,
// uniform over the 2^(l-1) such words.
class ParityFamily final : public ProbabilitySetFamily {
 public:
  ParityFamily(LengthRule length_rule, std::size_t n_min, std::size_t n_max,
               std::uint64_t enumerable_limit = kDefaultEnumerableLimit)
      : ProbabilitySetFamily(n_min, n_max, length_rule.as_polynomial(), enumerable_limit),
        length_rule_(length_rule) {
    if (length_rule_.a < 0 || length_rule_(n_min) < 1) {
      throw InvalidParameter("parity family needs support length >= 1");
    }
  }

  std::string name() const override { return "parity"; }
  const LengthRule& length_rule() const noexcept { return length_rule_; }

  std::size_t support_length(std::size_t n) const override {
    require_domain(n);
    return static_cast<std::size_t>(length_rule_(n));
  }

  BigInt support_size(std::size_t n) const override {
    return BigInt(1) << (support_length(n) - 1);
  }

  BitString sample(std::size_t n, RandomSource& rng) const override {
    return close_parity(sample_uniform(support_length(n) - 1, rng));
  }

  WeightedSupport weighted_support(std::size_t n) const override {
    require_enumerable(n);
    const std::size_t free = support_length(n) - 1;
    WeightedSupport out;
    out.denominator = std::uint64_t{1} << free;
    out.items.reserve(out.denominator);
    for (std::uint64_t w = 0; w < out.denominator; ++w) {
      out.items.emplace_back(close_parity(BitString::from_uint(w, free)), 1);
    }
    return out;
  }

  static BitString close_parity(const BitString& body) {
    return concat(body, BitString::from_uint(body.popcount() & 1U, 1));
  }

 protected:
  std::vector<WeightedWord> do_enumerate(std::size_t n) const override {
    const auto weighted = weighted_support(n);
    const Rational p(1, weighted.denominator);
    std::vector<WeightedWord> out;
    out.reserve(weighted.items.size());
    for (const auto& [word, weight] : weighted.items) out.push_back({word, p});
    return out;
  }

 private:
  LengthRule length_rule_;
};

// Family given directly by its enumeration. Nothing is validated at
// construction; validate_family() reports defects.
class ExplicitFamily final : public ProbabilitySetFamily {
 public:
  using Enumerator = std::function<std::vector<WeightedWord>(std::size_t)>;
  using LengthFn = std::function<std::size_t(std::size_t)>;

  ExplicitFamily(Enumerator enumerator, LengthFn length, std::size_t n_min, std::size_t n_max,
                 Polynomial poly_bound, std::uint64_t enumerable_limit = kDefaultEnumerableLimit)
      : ProbabilitySetFamily(n_min, n_max, std::move(poly_bound), enumerable_limit),
        enumerator_(std::move(enumerator)),
        length_(std::move(length)) {}

  std::string name() const override { return "explicit"; }

  std::size_t support_length(std::size_t n) const override {
    require_domain(n);
    return length_(n);
  }

  BigInt support_size(std::size_t n) const override {
    require_domain(n);
    return BigInt(enumerator_(n).size());
  }

  // Exact inverse-CDF draw over the common denominator.
  BitString sample(std::size_t n, RandomSource& rng) const override {
    const auto weighted = weighted_support(n);
    std::uint64_t u = rng.below(weighted.denominator);
    for (const auto& [word, weight] : weighted.items) {
      if (u < weight) return word;
      u -= weight;
    }
    throw InvalidParameter("probabilities sum to less than 1");
  }

 protected:
  std::vector<WeightedWord> do_enumerate(std::size_t n) const override { return enumerator_(n); }

 private:
  Enumerator enumerator_;
  LengthFn length_;
};

struct CheckResult {
  bool passed = true;
  std::optional<std::size_t> first_violation;
  std::string detail;
};

struct ValidationReport {
  std::size_t n_from = 0;
  std::size_t n_to = 0;
  std::size_t enumerated = 0;  // indices whose supports were enumerated
  CheckResult equal_length;
  CheckResult probability_sum;
  CheckResult poly_bound;

  bool ok() const { return equal_length.passed && probability_sum.passed && poly_bound.passed; }
};

// Checks every domain index up to n_max. Length and probability checks run
// only where the support is enumerable.
inline ValidationReport validate_family(const ProbabilitySetFamily& family, std::size_t n_max) {
  ValidationReport report;
  report.n_from = family.n_min();
  report.n_to = std::min(n_max, family.n_max());
  auto flag = [](CheckResult& check, std::size_t n, std::string detail) {
    if (!check.passed) return;
    check.passed = false;
    check.first_violation = n;
    check.detail = std::move(detail);
  };
  for (std::size_t n = report.n_from; n <= report.n_to; ++n) {
    const std::size_t length = family.support_length(n);
    const BigInt bound = family.poly_bound()(n);
    if (BigInt(length) > bound) {
      flag(report.poly_bound, n,
           "l(S_n)=" + std::to_string(length) + " exceeds bound " + bound.str());
    }
    if (!family.enumerable(n)) continue;
    ++report.enumerated;
    WeightedSupport support;
    try {
      support = family.weighted_support(n);
    } catch (const InvalidParameter& e) {
      flag(report.probability_sum, n, e.what());
      continue;
    }
    Weight total = 0;
    for (const auto& [word, weight] : support.items) {
      total += weight;
      if (word.size() != length) {
        flag(report.equal_length, n,
             "element of length " + std::to_string(word.size()) + ", expected " +
                 std::to_string(length));
      }
    }
    if (total != support.denominator) {
      flag(report.probability_sum, n,
           "probabilities sum to " +
               to_string(Rational(to_bigint(total), to_bigint(support.denominator))));
    }
  }
  return report;
}

}  // namespace stegogame
