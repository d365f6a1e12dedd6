#include <algorithm>
#include <chrono>
#include <set>
#include <unordered_set>
#include <vector>

#include <gtest/gtest.h>

#include "stegogame/schemes.hpp"

using namespace stegogame;

namespace {

std::shared_ptr<const PrefixUniformFamily> family_10(std::size_t n_max = 64) {
  // alpha = 2, s_n = 10, l(S_n) = n.
  return make_prefix_uniform(parse("10"), LengthRule::identity(), 3, n_max);
}

// Smallest 8-bit seed whose arx keystream starts with `want`.
BitString seed_with_keystream(const Generator& g, const BitString& want) {
  for (std::uint64_t v = 0; v < 256; ++v) {
    const BitString seed = BitString::from_uint(v, 8);
    if (g.generate(seed, want.size()) == want) return seed;
  }
  throw std::runtime_error("no seed found");
}

std::vector<GeneratorPtr> all_generators() {
  return {make_zero_generator(), make_lcg_lsb_generator(), make_arx_stream_generator()};
}

}  // namespace

TEST(XorPrefix, InsertExample) {
  const auto g = make_arx_stream_generator();
  const BitString k = seed_with_keystream(*g, parse("11"));
  const auto scheme = make_xor_prefix_scheme(family_10(), g);
  EXPECT_EQ(scheme->insert(parse("1011"), parse("01"), k), parse("1010"));
  EXPECT_EQ(scheme->extract(parse("1010"), k), parse("01"));
}

TEST(XorPrefix, ZeroKeystreamIsIdentityOnMessage) {
  const auto scheme = make_xor_prefix_scheme(family_10(), make_zero_generator());
  RandomSource rng(1);
  for (int i = 0; i < 16; ++i) {
    EXPECT_EQ(scheme->insert(sample_uniform(4, rng), parse("01"), sample_uniform(8, rng)),
              parse("1001"));
  }
}

TEST(XorPrefix, MessageLengthGuard) {
  const auto scheme = make_xor_prefix_scheme(family_10(), make_zero_generator());
  EXPECT_THROW(scheme->insert(parse("1011"), parse("011"), parse("0")), MessageLengthMismatch);
  EXPECT_EQ(scheme->message_length(4), 2U);
  EXPECT_THROW(scheme->message_length(200), SupportError);
}

TEST(XorPrefix, KeyErrors) {
  const auto scheme = make_xor_prefix_scheme(family_10(), make_arx_stream_generator());
  EXPECT_THROW(scheme->insert(parse("1011"), parse("01"), BitString{}), KeyError);
  EXPECT_THROW(scheme->extract(parse("1011"), BitString::zeros(300)), KeyError);
  EXPECT_THROW(scheme->inv_key(BitString{}), KeyError);
}

TEST(XorPrefix, StrictModeChecksPrefix) {
  const auto lax = make_xor_prefix_scheme(family_10(), make_zero_generator());
  const auto strict = make_xor_prefix_scheme(family_10(), make_zero_generator(), true);
  EXPECT_EQ(lax->extract(parse("0010"), parse("1")), parse("10"));
  EXPECT_THROW(strict->extract(parse("0010"), parse("1")), SupportError);
  EXPECT_THROW(strict->insert(parse("0110"), parse("10"), parse("1")), SupportError);
  EXPECT_EQ(strict->extract(parse("1010"), parse("1")), parse("10"));
}

TEST(XorPrefix, RoundTripAndMembershipForEveryGenerator) {
  const auto family = family_10();
  RandomSource rng(2);
  for (const auto& g : all_generators()) {
    const auto scheme = make_xor_prefix_scheme(family, g);
    for (int i = 0; i < 1000; ++i) {
      const std::size_t n = 3 + rng.below(62);
      const BitString s = family->sample(n, rng);
      const BitString m = sample_uniform(n - 2, rng);
      const BitString k = sample_uniform(1 + rng.below(256), rng);
      const BitString stego = scheme->insert(s, m, k);
      ASSERT_EQ(stego.size(), s.size());
      ASSERT_EQ(stego.prefix(2), family->prefix(n));
      ASSERT_EQ(scheme->extract(stego, scheme->inv_key(k)), m) << g->name();
    }
  }
}

TEST(XorPrefix, SymmetricKeyInversion) {
  const auto scheme = make_xor_prefix_scheme(family_10(), make_arx_stream_generator());
  EXPECT_TRUE(scheme->symmetric());
  RandomSource rng(3);
  for (int i = 0; i < 100; ++i) {
    const BitString k = sample_uniform(1 + rng.below(256), rng);
    EXPECT_EQ(scheme->inv_key(k), k);
  }
}

TEST(XorPrefix, BoundInsertMatchesInsert) {
  const auto scheme = make_xor_prefix_scheme(family_10(), make_arx_stream_generator());
  RandomSource rng(4);
  const BitString k = sample_uniform(64, rng);
  const auto bound = scheme->bind(k, 20);
  for (int i = 0; i < 100; ++i) {
    const BitString s = sample_uniform(20, rng);
    const BitString m = sample_uniform(18, rng);
    EXPECT_EQ(bound(s, m), scheme->insert(s, m, k));
  }
  EXPECT_THROW(bound(sample_uniform(21, rng), sample_uniform(19, rng)), SupportError);
  EXPECT_THROW(bound(sample_uniform(20, rng), sample_uniform(17, rng)), MessageLengthMismatch);
}

// m -> insert(s, m, k) is injective over {0,1}^(l - alpha), checked at l - alpha = 16.
TEST(XorPrefix, InsertIsInjectiveInTheMessage) {
  const auto family = family_10();
  const auto scheme = make_xor_prefix_scheme(family, make_arx_stream_generator());
  RandomSource rng(5);
  const BitString k = sample_uniform(128, rng);
  const BitString s = family->sample(18, rng);
  std::unordered_set<BitString> images;
  for (std::uint64_t v = 0; v < (1U << 16); ++v) {
    const BitString y = scheme->insert(s, BitString::from_uint(v, 16), k);
    ASSERT_EQ(y.prefix(2), parse("10"));
    images.insert(y);
  }
  EXPECT_EQ(images.size(), std::size_t{1} << 16);
}

TEST(Lsb, InsertExample) {
  const auto scheme = make_lsb_scheme(2);
  EXPECT_EQ(scheme->insert(parse("1110"), parse("01"), BitString{}), parse("1011"));
  EXPECT_EQ(scheme->extract(parse("1011"), BitString{}), parse("01"));
  EXPECT_EQ(scheme->message_length(9), 4U);
  EXPECT_THROW(make_lsb_scheme(1), InvalidParameter);
  EXPECT_THROW(scheme->insert(parse("1110"), parse("011"), BitString{}), MessageLengthMismatch);
}

TEST(Lsb, RoundTrip) {
  RandomSource rng(6);
  for (int i = 0; i < 1000; ++i) {
    const auto scheme = make_lsb_scheme(2 + rng.below(9));
    const BitString s = sample_uniform(rng.below(200), rng);
    const BitString m = sample_uniform(scheme->message_length(s.size()), rng);
    const BitString k = sample_uniform(rng.below(16), rng);
    ASSERT_EQ(scheme->extract(scheme->insert(s, m, k), scheme->inv_key(k)), m);
    ASSERT_EQ(scheme->inv_key(k), k);
  }
}

// Enumerate every parity-structured cover of length 8 and both message bits.
TEST(Lsb, BreaksParityWithProbabilityOneHalf) {
  const ParityFamily family(LengthRule::identity(), 8, 8);
  const auto scheme = make_lsb_scheme(8);
  std::size_t broken = 0;
  std::size_t total = 0;
  for (const auto& cover : family.enumerate(8)) {
    for (std::uint64_t bit = 0; bit < 2; ++bit) {
      const BitString stego = scheme->insert(cover.word, BitString::from_uint(bit, 1), BitString{});
      bool parity = false;
      for (std::size_t i = 0; i + 1 < stego.size(); ++i) parity ^= stego[i];
      broken += parity != stego[7] ? 1 : 0;
      ++total;
    }
  }
  EXPECT_EQ(total, 256U);
  EXPECT_EQ(2 * broken, total);
}

TEST(PadAdapter, InsertPadsWithZeros) {
  const auto family = family_10();
  const auto base = make_xor_prefix_scheme(family, make_arx_stream_generator());
  const std::vector<std::size_t> lengths = {10, 20, 30};
  const auto padded = pad_adapter(base, [](std::size_t l) { return std::int64_t(l) - 2 - 4; }, lengths);
  RandomSource rng(7);
  for (int i = 0; i < 50; ++i) {
    const BitString s = family->sample(10, rng);
    const BitString m = sample_uniform(4, rng);
    const BitString k = sample_uniform(64, rng);
    EXPECT_EQ(padded->insert(s, m, k), base->insert(s, concat(m, parse("0000")), k));
  }
  EXPECT_EQ(padded->message_length(10), 4U);
  EXPECT_THROW(padded->insert(family->sample(10, rng), sample_uniform(8, rng), parse("1")),
               MessageLengthMismatch);
}

TEST(PadAdapter, RoundTrip) {
  const auto family = family_10();
  RandomSource rng(8);
  for (const auto& g : all_generators()) {
    const std::vector<std::size_t> lengths = {12};
    const auto padded = pad_adapter(make_xor_prefix_scheme(family, g),
                                    [](std::size_t l) { return std::int64_t(l) / 2; }, lengths);
    for (int i = 0; i < 1000; ++i) {
      const std::size_t n = 3 + rng.below(62);
      const BitString s = family->sample(n, rng);
      const BitString m = sample_uniform(n / 2, rng);
      const BitString k = sample_uniform(1 + rng.below(200), rng);
      ASSERT_EQ(padded->extract(padded->insert(s, m, k), padded->inv_key(k)), m);
    }
  }
}

TEST(PadAdapter, BoundViolation) {
  const auto base = make_xor_prefix_scheme(family_10(), make_zero_generator());
  const std::vector<std::size_t> lengths = {8, 16};
  EXPECT_THROW(pad_adapter(base, [](std::size_t l) { return std::int64_t(l) - 1; }, lengths),
               BoundViolation);
  EXPECT_THROW(pad_adapter(base, [](std::size_t) { return std::int64_t{-1}; }, lengths),
               BoundViolation);
}

TEST(FBounded, Examples) {
  const auto xor_scheme = make_xor_prefix_scheme(family_10(), make_arx_stream_generator());
  const auto lsb = make_lsb_scheme(2);
  const std::vector<std::size_t> lengths = {4, 8, 16, 33, 64};
  RandomSource rng(9);
  const BitString key = parse("1011");
  EXPECT_TRUE(check_f_bounded(*xor_scheme, [](std::size_t l) { return std::int64_t(l) - 2; },
                              lengths, key, rng));
  EXPECT_FALSE(check_f_bounded(*xor_scheme, [](std::size_t l) { return std::int64_t(l) - 3; },
                               lengths, key, rng));
  EXPECT_TRUE(check_f_bounded(*lsb, [](std::size_t l) { return std::int64_t(l); }, lengths, key,
                              rng));
  EXPECT_FALSE(check_f_bounded(*lsb, [](std::size_t l) { return std::int64_t(l) / 3; }, lengths,
                               key, rng));
}

namespace {

// A scheme that accepts any message length, so it is not f-bounded.
class LooseScheme final : public Scheme {
 public:
  std::string name() const override { return "loose"; }
  bool symmetric() const override { return true; }
  std::size_t message_length(std::size_t) const override { return 0; }
  BitString insert(const BitString& s, const BitString&, const BitString&) const override { return s; }
  BitString extract(const BitString&, const BitString&) const override { return {}; }
  BitString inv_key(const BitString& k) const override { return k; }
};

}  // namespace

TEST(FBounded, AcceptingWrongLengthsFails) {
  LooseScheme loose;
  RandomSource rng(10);
  const std::vector<std::size_t> lengths = {8};
  EXPECT_FALSE(check_f_bounded(loose, [](std::size_t l) { return std::int64_t(l); }, lengths,
                               parse("1"), rng));
}

namespace {

double median_seconds(const std::function<void()>& body, int reps) {
  std::vector<double> times;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    body();
    times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::nth_element(times.begin(), times.begin() + reps / 2, times.end());
  return times[reps / 2];
}

}  // namespace

// 16x longer supports may cost at most 32x the time.
TEST(Complexity, InsertAndExtractScaleLinearly) {
  const auto family = family_10(1 << 14);
  const auto scheme = make_xor_prefix_scheme(family, make_arx_stream_generator());
  RandomSource rng(11);
  const BitString k = sample_uniform(128, rng);
  auto timing = [&](std::size_t l) {
    const BitString s = family->sample(l, rng);
    const BitString m = sample_uniform(l - 2, rng);
    return median_seconds(
        [&] {
          for (int i = 0; i < 20; ++i) {
            const BitString y = scheme->insert(s, m, k);
            if (scheme->extract(y, k) != m) throw std::runtime_error("round trip");
          }
        },
        15);
  };
  const double small = timing(1 << 10);
  const double large = timing(1 << 14);
  EXPECT_LE(large / small, 32.0) << small << " " << large;
}
