#include <array>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "stegogame/probsets.hpp"

using namespace stegogame;

namespace {

std::shared_ptr<const PrefixUniformFamily> tiny_family() {
  // alpha = 2, s_n = 10, l(S_n) = 4 at n = 4.
  return make_prefix_uniform(parse("10"), LengthRule::identity(), 4, 4);
}

// Single-element family, optionally with a defect injected.
std::shared_ptr<const ExplicitFamily> explicit_family(
    std::function<std::vector<WeightedWord>(std::size_t)> enumerate,
    std::function<std::size_t(std::size_t)> length, std::size_t n_min, std::size_t n_max,
    Polynomial bound) {
  return std::make_shared<const ExplicitFamily>(std::move(enumerate), std::move(length), n_min,
                                                n_max, std::move(bound));
}

}  // namespace

TEST(PrefixUniform, DirectConstruction) {
  const auto family = tiny_family();
  const auto support = family->enumerate(4);
  ASSERT_EQ(support.size(), 4U);
  std::set<std::string> words;
  for (const auto& w : support) {
    words.insert(render(w.word));
    EXPECT_EQ(w.probability, Rational(1, 4));
  }
  EXPECT_EQ(words, (std::set<std::string>{"1000", "1001", "1010", "1011"}));
}

TEST(PrefixUniform, NoMessageRoomIsRejected) {
  EXPECT_THROW(make_prefix_uniform(parse("1"), LengthRule{0, 1}, 1, 8), InvalidParameter);
  EXPECT_THROW(make_prefix_uniform(parse("10"), LengthRule::identity(), 2, 8), InvalidParameter);
}

TEST(PrefixUniform, Cardinality) {
  const auto family = make_prefix_uniform(parse("10"), LengthRule::identity(), 3, 20);
  EXPECT_EQ(family->support_size(10), 256);
  for (std::size_t n = 3; n <= 16; ++n) {
    const auto support = family->enumerate(n);
    EXPECT_EQ(support.size(), std::size_t{1} << (n - 2));
    for (const auto& w : support) ASSERT_EQ(w.word.size(), n);
  }
}

TEST(PrefixUniform, SamplesCarryPrefixAndMatchUniform) {
  const auto family = tiny_family();
  RandomSource rng(3);
  std::map<std::string, int> counts;
  constexpr int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const BitString s = family->sample(4, rng);
    ASSERT_EQ(s.prefix(2), parse("10"));
    ++counts[render(s)];
  }
  ASSERT_EQ(counts.size(), 4U);
  for (const auto& [word, c] : counts) EXPECT_NEAR(c / double(draws), 0.25, 0.01);
}

// Goodness of fit at 99.9%: chi-square(63) quantile 103.442.
TEST(PrefixUniform, SamplingMatchesEnumeration) {
  const auto family = make_prefix_uniform(parse("01"), LengthRule::identity(), 8, 8);
  RandomSource rng(8);
  std::map<BitString, int> counts;
  constexpr int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[family->sample(8, rng)];
  const auto support = family->enumerate(8);
  double stat = 0;
  for (const auto& w : support) {
    const double expected = draws * to_double(w.probability);
    const double d = counts[w.word] - expected;
    stat += d * d / expected;
  }
  EXPECT_EQ(counts.size(), support.size());
  EXPECT_LT(stat, 103.442);
}

TEST(PrefixUniform, EnumerationSumsToOneExactly) {
  const auto family = make_prefix_uniform(parse("110"), LengthRule{2, 1}, 2, 9);
  for (std::size_t n = 2; n <= 9; ++n) {
    Rational total = 0;
    for (const auto& w : family->enumerate(n)) total += w.probability;
    EXPECT_EQ(total, 1);
  }
}

TEST(PrefixUniform, EnumerationGuard) {
  const auto family = make_prefix_uniform(parse("10"), LengthRule::identity(), 3, 40);
  EXPECT_THROW(family->enumerate(30), TooLarge);
  EXPECT_NO_THROW(family->enumerate(22));  // exactly 2^20 elements
  EXPECT_THROW(family->enumerate(41), DomainError);
}

TEST(PrefixUniform, SampleOutsideDomain) {
  RandomSource rng(1);
  EXPECT_THROW(tiny_family()->sample(5, rng), DomainError);
}

TEST(PrefixUniform, IndexForLength) {
  const auto family = make_prefix_uniform(parse("10"), LengthRule{2, 3}, 1, 10);
  EXPECT_EQ(family->index_for_length(9), 3U);
  EXPECT_FALSE(family->index_for_length(10).has_value());
  EXPECT_FALSE(family->index_for_length(25).has_value());
}

TEST(ExplicitFamily, PointMass) {
  const BitString only = parse("0110");
  const auto family = explicit_family(
      [only](std::size_t) { return std::vector<WeightedWord>{{only, Rational(1)}}; },
      [](std::size_t) { return 4; }, 1, 5, Polynomial({4}));
  RandomSource rng(4);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(family->sample(2, rng), only);
}

TEST(Validate, ValidFamilyPasses) {
  const auto report = validate_family(*make_prefix_uniform(parse("10"), LengthRule::identity(), 3, 64), 40);
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.enumerated, 20U);  // n = 3..22
  EXPECT_TRUE(validate_family(*flagship_family(), 1024).ok());
}

TEST(Validate, WrongLengthElementIsFlagged) {
  const auto family = explicit_family(
      [](std::size_t n) {
        std::vector<WeightedWord> words = {{BitString::zeros(n), Rational(1, 2)},
                                           {BitString::ones(n), Rational(1, 2)}};
        if (n == 5) words[1].word = BitString::ones(n + 1);
        return words;
      },
      [](std::size_t n) { return n; }, 1, 10, Polynomial::identity());
  const auto report = validate_family(*family, 10);
  EXPECT_FALSE(report.equal_length.passed);
  EXPECT_EQ(report.equal_length.first_violation, 5U);
  EXPECT_TRUE(report.probability_sum.passed);
  EXPECT_TRUE(report.poly_bound.passed);
}

TEST(Validate, ProbabilitySumViolation) {
  const auto family = explicit_family(
      [](std::size_t n) {
        return std::vector<WeightedWord>{{BitString::zeros(n), n == 3 ? Rational(1, 3) : Rational(1)}};
      },
      [](std::size_t n) { return n; }, 1, 6, Polynomial::identity());
  const auto report = validate_family(*family, 6);
  EXPECT_FALSE(report.probability_sum.passed);
  EXPECT_EQ(report.probability_sum.first_violation, 3U);
}

TEST(Validate, ExponentialLengthBreaksLinearBound) {
  const Polynomial declared({1, 3});  // 3n + 1
  // Oracle: first n with 2^n > 3n + 1.
  std::size_t expected = 0;
  while ((std::uint64_t{1} << expected) <= 3 * expected + 1) ++expected;
  ASSERT_EQ(expected, 4U);

  const auto family = explicit_family(
      [](std::size_t n) {
        return std::vector<WeightedWord>{{BitString::zeros(std::size_t{1} << n), Rational(1)}};
      },
      [](std::size_t n) { return std::size_t{1} << n; }, 0, 12, declared);
  const auto report = validate_family(*family, 12);
  EXPECT_FALSE(report.poly_bound.passed);
  EXPECT_EQ(report.poly_bound.first_violation, expected);
  EXPECT_TRUE(report.equal_length.passed);
}

TEST(ParityFamily, SupportsSatisfyConstraint) {
  const ParityFamily family(LengthRule::identity(), 2, 12);
  for (std::size_t n = 2; n <= 12; ++n) {
    const auto support = family.enumerate(n);
    EXPECT_EQ(support.size(), std::size_t{1} << (n - 1));
    for (const auto& w : support) ASSERT_EQ(w.word.popcount() % 2, 0U);
  }
  RandomSource rng(6);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(family.sample(9, rng).popcount() % 2, 0U);
  EXPECT_TRUE(validate_family(family, 12).ok());
}
