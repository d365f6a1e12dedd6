#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "stegogame/bitstring.hpp"
#include "stegogame/detectors.hpp"
#include "stegogame/errors.hpp"
#include "stegogame/math.hpp"
#include "stegogame/prng.hpp"
#include "stegogame/probsets.hpp"
#include "stegogame/random.hpp"
#include "stegogame/schemes.hpp"

namespace stegogame {

struct UniformMessage {};
struct FixedMessage {
  BitString value;
};
using MessageMode = std::variant<UniformMessage, FixedMessage>;

struct UniformKey {
  std::size_t seed_length = 128;
};
struct FixedKey {
  BitString value;
};
using KeyMode = std::variant<UniformKey, FixedKey>;

inline constexpr std::size_t kMinTrials = 100;
// Largest message or key space the exact engine enumerates.
inline constexpr std::size_t kMaxEnumeratedBits = 20;

// One instance of the hiding game at index n.
struct GameConfig {
  FamilyPtr family;
  SchemePtr scheme;
  std::size_t index = 0;
  MessageMode message = UniformMessage{};
  KeyMode key = UniformKey{};
  std::size_t trials = 10000;
  double delta = 0.01;

  std::size_t support_length() const { return family->support_length(index); }
  std::size_t message_length() const { return scheme->message_length(support_length()); }

  std::size_t key_length() const {
    if (const auto* fixed = std::get_if<FixedKey>(&key)) return fixed->value.size();
    return std::get<UniformKey>(key).seed_length;
  }

  // Monte Carlo settings are only checked when the game is sampled.
  void validate(bool sampled = true) const {
    if (!family || !scheme) throw ConfigError("game needs a family and a scheme");
    if (!family->in_domain(index)) {
      throw ConfigError("index " + std::to_string(index) + " outside the family domain");
    }
    if (sampled && trials < kMinTrials) throw ConfigError("trials must be at least 100");
    if (sampled && !(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    std::size_t expected = 0;
    try {
      expected = message_length();
    } catch (const StegoError& e) {
      throw ConfigError(std::string("scheme rejects the family's supports: ") + e.what());
    }
    if (const auto* fixed = std::get_if<FixedMessage>(&message)) {
      if (fixed->value.size() != expected) {
        throw ConfigError("fixed message length " + std::to_string(fixed->value.size()) +
                          " but the scheme carries " + std::to_string(expected) + " bits");
      }
    }
  }
};

struct AdvantageReport {
  double p_stego = 0.0;
  double p_cover = 0.0;
  double advantage = 0.0;
  double half_width = 0.0;
  std::size_t trials = 0;
  bool exact = false;
  std::optional<Rational> exact_stego;
  std::optional<Rational> exact_cover;
  std::optional<Rational> exact_advantage;
};

// Two-sided Hoeffding half-width for two estimates under a union bound.
inline double hoeffding_half_width(std::size_t trials, double delta) {
  return std::sqrt(std::log(4.0 / delta) / (2.0 * static_cast<double>(trials)));
}

inline AdvantageReport make_estimate(std::size_t stego_ones, std::size_t cover_ones,
                                     std::size_t trials, double delta) {
  AdvantageReport r;
  r.trials = trials;
  r.p_stego = static_cast<double>(stego_ones) / static_cast<double>(trials);
  r.p_cover = static_cast<double>(cover_ones) / static_cast<double>(trials);
  r.advantage = std::abs(r.p_stego - r.p_cover);
  r.half_width = hoeffding_half_width(trials, delta);
  return r;
}

inline AdvantageReport make_exact(Rational stego, Rational cover) {
  AdvantageReport r;
  r.exact = true;
  Rational diff = stego - cover;
  if (diff < 0) diff = -diff;
  r.p_stego = to_double(stego);
  r.p_cover = to_double(cover);
  r.advantage = to_double(diff);
  r.exact_stego = std::move(stego);
  r.exact_cover = std::move(cover);
  r.exact_advantage = std::move(diff);
  return r;
}

// Runs trial(t) for t in [0, trials) over up to `threads` workers and counts
// the trials returning true. The count does not depend on the thread count.
template <typename Trial>
std::size_t count_accepting(std::size_t trials, unsigned threads, Trial&& trial) {
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(trials / 64 + 1)));
  if (threads == 1) {
    std::size_t ones = 0;
    for (std::size_t t = 0; t < trials; ++t) ones += trial(t) ? 1 : 0;
    return ones;
  }
  std::vector<std::size_t> partial(threads, 0);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      const std::size_t begin = trials * w / threads;
      const std::size_t end = trials * (w + 1) / threads;
      try {
        std::size_t ones = 0;
        for (std::size_t t = begin; t < end; ++t) ones += trial(t) ? 1 : 0;
        partial[w] = ones;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) worker.join();
  if (failure) std::rethrow_exception(failure);
  std::size_t total = 0;
  for (auto p : partial) total += p;
  return total;
}

namespace stream {
inline constexpr std::uint64_t cover = 1;
inline constexpr std::uint64_t stego = 2;
inline constexpr std::uint64_t generator = 3;
inline constexpr std::uint64_t uniform = 4;
}  // namespace stream

inline void require_word_length(const Distinguisher& d, std::size_t length) {
  if (auto expected = d.word_length(); expected && *expected != length) {
    throw LengthMismatch(d.name() + " reads words of length " + std::to_string(*expected) +
                         ", game produces " + std::to_string(length));
  }
}

// Monte Carlo estimate of |Pr[D(I(S_n, m, k)) = 1] - Pr[D(S_n) = 1]|, with
// `trials` independent rounds per arm seeded from (master_seed, arm, trial).
inline AdvantageReport estimate_advantage(const GameConfig& cfg, const Distinguisher& d,
                                          std::uint64_t master_seed, unsigned threads = 1) {
  cfg.validate();
  const std::size_t n = cfg.index;
  const std::size_t length = cfg.support_length();
  const std::size_t message_length = cfg.message_length();
  require_word_length(d, length);
  const auto& family = *cfg.family;
  const auto& scheme = *cfg.scheme;

  std::optional<Scheme::BoundInsert> bound;
  if (const auto* fixed = std::get_if<FixedKey>(&cfg.key)) bound = scheme.bind(fixed->value, length);

  const std::size_t cover_ones = count_accepting(cfg.trials, threads, [&](std::size_t t) {
    RandomSource rng(derive_seed(master_seed, stream::cover, t));
    return d.decide(family.sample(n, rng), rng);
  });
  const std::size_t stego_ones = count_accepting(cfg.trials, threads, [&](std::size_t t) {
    RandomSource rng(derive_seed(master_seed, stream::stego, t));
    const BitString support = family.sample(n, rng);
    const auto* fixed_message = std::get_if<FixedMessage>(&cfg.message);
    const BitString message =
        fixed_message ? fixed_message->value : sample_uniform(message_length, rng);
    if (bound) return d.decide((*bound)(support, message), rng);
    const BitString key = sample_uniform(std::get<UniformKey>(cfg.key).seed_length, rng);
    return d.decide(scheme.insert(support, message, key), rng);
  });
  return make_estimate(stego_ones, cover_ones, cfg.trials, cfg.delta);
}

// Exact distribution over words: Pr[word] = weight / denominator. Items are
// sorted by word and distinct.
struct ExactDistribution {
  Weight denominator = 1;
  std::vector<std::pair<BitString, Weight>> items;

  Rational probability_of(const std::function<bool(const BitString&)>& accept) const {
    Weight num = 0;
    for (const auto& [word, weight] : items) {
      if (accept(word)) num += weight;
    }
    return Rational(to_bigint(num), to_bigint(denominator));
  }

  friend bool operator==(const ExactDistribution& a, const ExactDistribution& b) {
    if (a.items.size() != b.items.size()) return false;
    const BigInt da = to_bigint(a.denominator);
    const BigInt db = to_bigint(b.denominator);
    for (std::size_t i = 0; i < a.items.size(); ++i) {
      if (a.items[i].first != b.items[i].first) return false;
      if (to_bigint(a.items[i].second) * db != to_bigint(b.items[i].second) * da) return false;
    }
    return true;
  }
};

namespace detail {

// Collects weighted words of one length; dense table for short words.
class WeightAccumulator {
 public:
  explicit WeightAccumulator(std::size_t length) : length_(length) {
    if (length_ <= kDenseBits) dense_.assign(std::size_t{1} << length_, 0);
  }

  void add(const BitString& word, Weight weight) {
    if (word.size() == length_ && !dense_.empty()) {
      dense_[word.to_uint()] += weight;
    } else {
      sparse_[word] += weight;
    }
  }

  std::vector<std::pair<BitString, Weight>> finish() const {
    std::vector<std::pair<BitString, Weight>> out;
    for (std::size_t v = 0; v < dense_.size(); ++v) {
      if (dense_[v] != 0) out.emplace_back(BitString::from_uint(v, length_), dense_[v]);
    }
    for (const auto& [word, weight] : sparse_) {
      if (weight != 0) out.emplace_back(word, weight);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }

 private:
  static constexpr std::size_t kDenseBits = 20;
  std::size_t length_;
  std::vector<Weight> dense_;
  std::unordered_map<BitString, Weight> sparse_;
};

inline std::vector<BitString> all_words(std::size_t length) {
  if (length > kMaxEnumeratedBits) {
    throw TooLarge("cannot enumerate 2^" + std::to_string(length) + " words");
  }
  std::vector<BitString> out;
  out.reserve(std::size_t{1} << length);
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << length); ++v) {
    out.push_back(BitString::from_uint(v, length));
  }
  return out;
}

}  // namespace detail

inline ExactDistribution cover_distribution(const ProbabilitySetFamily& family, std::size_t n) {
  const WeightedSupport support = family.weighted_support(n);
  detail::WeightAccumulator acc(family.support_length(n));
  for (const auto& [word, weight] : support.items) acc.add(word, weight);
  return {support.denominator, acc.finish()};
}

// Distribution of I(S_n, M, K) with S_n ~ P_n, M and K per their modes.
inline ExactDistribution stego_distribution(const ProbabilitySetFamily& family,
                                            const Scheme& scheme, std::size_t n,
                                            const MessageMode& message_mode,
                                            const KeyMode& key_mode) {
  const std::size_t length = family.support_length(n);
  const WeightedSupport support = family.weighted_support(n);

  std::vector<BitString> messages;
  if (const auto* fixed = std::get_if<FixedMessage>(&message_mode)) {
    messages.push_back(fixed->value);
  } else {
    messages = detail::all_words(scheme.message_length(length));
  }
  std::vector<BitString> keys;
  if (const auto* fixed = std::get_if<FixedKey>(&key_mode)) {
    keys.push_back(fixed->value);
  } else {
    keys = detail::all_words(std::get<UniformKey>(key_mode).seed_length);
  }
  const double work = static_cast<double>(support.items.size()) *
                      static_cast<double>(messages.size()) * static_cast<double>(keys.size());
  if (work > 4294967296.0) throw TooLarge("exact game needs more than 2^32 insertions");

  detail::WeightAccumulator acc(length);
  for (const auto& key : keys) {
    const auto insert = scheme.bind(key, length);
    for (const auto& [support_word, weight] : support.items) {
      for (const auto& message : messages) acc.add(insert(support_word, message), weight);
    }
  }
  return {static_cast<Weight>(support.denominator) * messages.size() * keys.size(), acc.finish()};
}

// Both arms of a game, enumerated once and shared by every distinguisher.
class ExactGame {
 public:
  explicit ExactGame(const GameConfig& cfg)
      : length_((cfg.validate(false), cfg.support_length())),
        cover_(cover_distribution(*cfg.family, cfg.index)),
        stego_(stego_distribution(*cfg.family, *cfg.scheme, cfg.index, cfg.message, cfg.key)) {}

  const ExactDistribution& cover() const noexcept { return cover_; }
  const ExactDistribution& stego() const noexcept { return stego_; }

  // Every distinguisher has advantage 0 iff the arms coincide.
  bool indistinguishable() const { return cover_ == stego_; }

  AdvantageReport advantage(const Distinguisher& d) const {
    if (!d.deterministic()) {
      throw NondeterministicDistinguisher(d.name() + " uses coin tosses");
    }
    require_word_length(d, length_);
    RandomSource unused(0);
    auto accept = [&](const BitString& w) { return d.decide(w, unused); };
    return make_exact(stego_.probability_of(accept), cover_.probability_of(accept));
  }

 private:
  std::size_t length_;
  ExactDistribution cover_;
  ExactDistribution stego_;
};

inline AdvantageReport exact_advantage(const GameConfig& cfg, const Distinguisher& d) {
  if (!d.deterministic()) throw NondeterministicDistinguisher(d.name() + " uses coin tosses");
  return ExactGame(cfg).advantage(d);
}

// (1/2) sum_y |p(Y = y | key) - p(X = y)|, exactly.
inline Rational total_variation(const ExactDistribution& a, const ExactDistribution& b) {
  const BigInt da = to_bigint(a.denominator);
  const BigInt db = to_bigint(b.denominator);
  BigInt sum = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  auto term = [&](const Weight& wa, const Weight& wb) {
    BigInt diff = to_bigint(wa) * db - to_bigint(wb) * da;
    sum += diff < 0 ? BigInt(-diff) : diff;
  };
  while (i < a.items.size() || j < b.items.size()) {
    if (j == b.items.size() || (i < a.items.size() && a.items[i].first < b.items[j].first)) {
      term(a.items[i++].second, 0);
    } else if (i == a.items.size() || b.items[j].first < a.items[i].first) {
      term(0, b.items[j++].second);
    } else {
      term(a.items[i++].second, b.items[j++].second);
    }
  }
  return Rational(sum, 2 * da * db);
}

// Zero iff embedding under this key and message distribution is stego-secure at n.
inline Rational stego_security_distance(const ProbabilitySetFamily& family, const Scheme& scheme,
                                        const BitString& key, const MessageMode& message_mode,
                                        std::size_t n) {
  if (!family.enumerable(n)) throw TooLarge("family not enumerable at n=" + std::to_string(n));
  return total_variation(stego_distribution(family, scheme, n, message_mode, FixedKey{key}),
                         cover_distribution(family, n));
}

// Threshold 1/p(i) + 1/p(|k|) for a positive polynomial p.
class ThresholdPolicy {
 public:
  explicit ThresholdPolicy(Polynomial polynomial) : polynomial_(std::move(polynomial)) {
    if (polynomial_.leading() <= 0) {
      throw InvalidParameter("threshold polynomial needs a positive leading coefficient");
    }
    // Past the Cauchy root bound the sign is the leading sign; check below it.
    std::int64_t bound = 1;
    for (auto c : polynomial_.coefficients()) {
      bound = std::max(bound, 1 + std::abs(c) / polynomial_.leading() + 1);
    }
    for (std::int64_t x = 1; x <= bound; ++x) {
      if (polynomial_(static_cast<std::uint64_t>(x)) <= 0) {
        throw InvalidParameter("threshold polynomial must be positive for x >= 1");
      }
    }
  }

  const Polynomial& polynomial() const noexcept { return polynomial_; }

  // p is only guaranteed positive from 1 on, so 0 is evaluated as 1.
  Rational index_term(std::size_t i) const { return Rational(1, polynomial_(std::max<std::size_t>(i, 1))); }
  Rational key_term(std::size_t key_length) const {
    return Rational(1, polynomial_(std::max<std::size_t>(key_length, 1)));
  }
  Rational threshold(std::size_t i, std::size_t key_length) const {
    return index_term(i) + key_term(key_length);
  }

 private:
  Polynomial polynomial_;
};

enum class Verdict { pass, fail, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

inline Verdict verdict_against(const AdvantageReport& report, const Rational& threshold) {
  if (report.exact && report.exact_advantage) {
    if (*report.exact_advantage < threshold) return Verdict::pass;
    if (*report.exact_advantage > threshold) return Verdict::fail;
    return Verdict::inconclusive;
  }
  const double t = to_double(threshold);
  if (report.advantage + report.half_width < t) return Verdict::pass;
  if (report.advantage - report.half_width > t) return Verdict::fail;
  return Verdict::inconclusive;
}

inline Verdict secure_hiding_verdict(const AdvantageReport& report, const ThresholdPolicy& policy,
                                     std::size_t i, std::size_t key_length) {
  return verdict_against(report, policy.threshold(i, key_length));
}

// |Pr[D(G(U_seed_len)) = 1] - Pr[D(U_out_len) = 1]| by Monte Carlo.
inline AdvantageReport prng_advantage(const Generator& g, const Distinguisher& d,
                                      std::size_t seed_length, std::size_t out_length,
                                      std::size_t trials, double delta, std::uint64_t master_seed,
                                      unsigned threads = 1) {
  if (out_length <= seed_length) throw ConfigError("PRNG game needs out_len > seed_len");
  if (trials < kMinTrials) throw ConfigError("trials must be at least 100");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  try {
    g.check_seed(BitString::zeros(seed_length));
  } catch (const StegoError& e) {
    throw ConfigError(e.what());
  }
  require_word_length(d, out_length);

  const std::size_t generated_ones = count_accepting(trials, threads, [&](std::size_t t) {
    RandomSource rng(derive_seed(master_seed, stream::generator, t));
    return d.decide(g.generate(sample_uniform(seed_length, rng), out_length), rng);
  });
  const std::size_t uniform_ones = count_accepting(trials, threads, [&](std::size_t t) {
    RandomSource rng(derive_seed(master_seed, stream::uniform, t));
    return d.decide(sample_uniform(out_length, rng), rng);
  });
  return make_estimate(generated_ones, uniform_ones, trials, delta);
}

}  // namespace stegogame
