#include <algorithm>
#include <chrono>
#include <vector>

#include <gtest/gtest.h>

#include "stegogame/detectors.hpp"

using namespace stegogame;

namespace {

std::vector<DistinguisherPtr> shipped() {
  const auto family = make_prefix_uniform(parse("10"), LengthRule::identity(), 3, 1 << 14);
  return {make_constant(false),       make_constant(true),        make_suffix_match(parse("10"), 2),
          make_prefix_member(*family, 64), make_chi_square(1, 0.999), make_chi_square(4, 0.99),
          make_runs_test(0.999),      make_alternation(0.9),      make_parity_check()};
}

}  // namespace

TEST(Constant, AlwaysItsBit) {
  RandomSource rng(1);
  const auto one = make_constant(true);
  const auto zero = make_constant(false);
  for (int i = 0; i < 50; ++i) {
    const BitString w = sample_uniform(rng.below(100), rng);
    EXPECT_TRUE(one->decide(w, rng));
    EXPECT_FALSE(zero->decide(w, rng));
  }
  EXPECT_EQ(one->name(), "constant-1");
}

TEST(SuffixMatch, Example) {
  const auto d = make_suffix_match(parse("10"), 2);
  RandomSource rng(1);
  EXPECT_TRUE(d->decide(parse("1010"), rng));
  EXPECT_FALSE(d->decide(parse("1011"), rng));
  EXPECT_TRUE(d->decide(parse("0110"), rng));
  EXPECT_EQ(d->word_length(), 4U);
}

TEST(PrefixMember, AcceptsEverySupportElement) {
  const auto family = make_prefix_uniform(parse("10"), LengthRule::identity(), 3, 16);
  const auto d = make_prefix_member(*family, 12);
  RandomSource rng(2);
  for (const auto& w : family->enumerate(12)) ASSERT_TRUE(d->decide(w.word, rng));
  EXPECT_FALSE(d->decide(parse("011111111111"), rng));
}

TEST(ChiSquare, AllZeroWordStatistic) {
  const ChiSquareDistinguisher d(1, 0.999);
  RandomSource rng(3);
  EXPECT_DOUBLE_EQ(d.statistic(BitString::zeros(64)), 64.0);
  EXPECT_NEAR(d.critical_value(), 10.83, 0.005);
  EXPECT_TRUE(d.decide(BitString::zeros(64), rng));
}

TEST(ChiSquare, BalancedWordFitsPerfectly) {
  const ChiSquareDistinguisher d(1, 0.999);
  RandomSource rng(3);
  const BitString w = concat(BitString::ones(32), BitString::zeros(32));
  EXPECT_DOUBLE_EQ(d.statistic(w), 0.0);
  EXPECT_FALSE(d.decide(w, rng));
}

// Nominal rate 0.001; up to 5x slack for the approximation.
TEST(ChiSquare, FalsePositiveRateOnUniformWords) {
  const auto d = make_chi_square(2, 0.999);
  RandomSource rng(4);
  constexpr int words = 10000;
  int hits = 0;
  for (int i = 0; i < words; ++i) hits += d->decide(sample_uniform(256, rng), rng) ? 1 : 0;
  EXPECT_LE(hits / double(words), 0.005);
}

TEST(ChiSquare, Parameters) {
  EXPECT_THROW(make_chi_square(0, 0.999), InvalidParameter);
  EXPECT_THROW(make_chi_square(9, 0.999), InvalidParameter);
  EXPECT_THROW(make_chi_square(2, 0.5), InvalidParameter);
  EXPECT_THROW(make_chi_square(2, 1.0), InvalidParameter);
  EXPECT_EQ(make_chi_square(2, 0.99)->name(), "chi-square(block=2,q=0.99)");
  // df = 255 at 0.999.
  EXPECT_NEAR(ChiSquareDistinguisher(8, 0.999).critical_value(), 330.52, 0.01);
}

TEST(Runs, FlagsStructuredWords) {
  const auto d = make_runs_test(0.999);
  RandomSource rng(5);
  EXPECT_TRUE(d->decide(BitString::zeros(64), rng));
  EXPECT_TRUE(d->decide(parse(std::string(32, '0') + std::string(32, '1')), rng));
  BitString alternating = BitString::generate(64, [](std::size_t i) { return i % 2 == 1; });
  EXPECT_TRUE(d->decide(alternating, rng));
  int hits = 0;
  for (int i = 0; i < 10000; ++i) hits += d->decide(sample_uniform(256, rng), rng) ? 1 : 0;
  EXPECT_LE(hits / 10000.0, 0.005);
  EXPECT_THROW(make_runs_test(0.97), InvalidParameter);
}

TEST(Alternation, Examples) {
  const auto d = make_alternation(0.9);
  RandomSource rng(6);
  const BitString w = BitString::generate(64, [](std::size_t i) { return i % 2 == 1; });
  EXPECT_EQ(render(w).substr(0, 6), "010101");
  EXPECT_TRUE(d->decide(w, rng));
  EXPECT_FALSE(d->decide(BitString::zeros(64), rng));
  EXPECT_FALSE(d->decide(parse("1"), rng));
  EXPECT_THROW(make_alternation(0.5), InvalidParameter);
  EXPECT_THROW(make_alternation(1.5), InvalidParameter);
}

TEST(Parity, CoversPassAndDefinition) {
  const ParityFamily family(LengthRule::identity(), 2, 10);
  const auto d = make_parity_check();
  RandomSource rng(7);
  for (const auto& w : family.enumerate(10)) ASSERT_FALSE(d->decide(w.word, rng));
  // last bit differs from XOR of the rest
  EXPECT_TRUE(d->decide(parse("1100001"), rng));
  EXPECT_FALSE(d->decide(parse("1100000"), rng));
  EXPECT_TRUE(d->decide(parse("1"), rng));
}

TEST(Detectors, DeterministicOnRepeatedCalls) {
  RandomSource rng(8);
  for (const auto& d : shipped()) {
    ASSERT_TRUE(d->deterministic()) << d->name();
    for (int i = 0; i < 100; ++i) {
      const BitString w = sample_uniform(64, rng);
      RandomSource c1(i);
      RandomSource c2(i + 1000);
      ASSERT_EQ(d->decide(w, c1), d->decide(w, c2)) << d->name();
    }
  }
  EXPECT_FALSE(make_coin()->deterministic());
}

TEST(Detectors, LinearTimeSmoke) {
  RandomSource rng(9);
  const BitString small = sample_uniform(1 << 10, rng);
  const BitString large = sample_uniform(1 << 14, rng);
  auto median = [&](const Distinguisher& d, const BitString& w) {
    std::vector<double> times;
    for (int r = 0; r < 15; ++r) {
      const auto start = std::chrono::steady_clock::now();
      int sink = 0;
      for (int i = 0; i < 50; ++i) sink += d.decide(w, rng) ? 1 : 0;
      times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() +
                      sink * 0.0);
    }
    std::nth_element(times.begin(), times.begin() + 7, times.end());
    return times[7];
  };
  for (const auto& d : shipped()) {
    const double a = median(*d, small);
    const double b = median(*d, large);
    // Constant-time detectors can measure as zero.
    if (a < 1e-6) continue;
    EXPECT_LE(b / a, 32.0) << d->name();
  }
}
