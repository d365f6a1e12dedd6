#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stegogame/bitstring.hpp"
#include "stegogame/errors.hpp"
#include "stegogame/prng.hpp"
#include "stegogame/probsets.hpp"

namespace stegogame {

// Maps a support length to a message-length bound. Signed so that affine
// rules can report "no room" as a negative value.
using BoundFn = std::function<std::int64_t(std::size_t)>;

// A stegosystem (insert, extract, inv).
//
// Invariant: extract(insert(s, m, k), inv_key(k)) == m whenever m has length
// message_length(s.size()). insert rejects every other message length, which
// makes each scheme f-bounded for f = message_length.
class Scheme {
 public:
  // Insertion with the key fixed in advance.
  using BoundInsert = std::function<BitString(const BitString& support, const BitString& message)>;

  virtual ~Scheme() = default;

  virtual std::string name() const = 0;
  virtual bool symmetric() const = 0;
  // Throws SupportError when no support of this length is admissible.
  virtual std::size_t message_length(std::size_t support_length) const = 0;
  virtual BitString insert(const BitString& support, const BitString& message,
                           const BitString& key) const = 0;
  virtual BitString extract(const BitString& stego, const BitString& extraction_key) const = 0;
  virtual BitString inv_key(const BitString& key) const = 0;

  // Key schedule hoisted out of the per-call path. Default: plain insert.
  virtual BoundInsert bind(const BitString& key, std::size_t /*support_length*/) const {
    return [this, key](const BitString& s, const BitString& m) { return insert(s, m, key); };
  }

 protected:
  void require_message_length(const BitString& support, const BitString& message) const {
    const std::size_t expected = message_length(support.size());
    if (message.size() != expected) {
      throw MessageLengthMismatch("message length " + std::to_string(message.size()) +
                                  " but supports of length " + std::to_string(support.size()) +
                                  " carry " + std::to_string(expected) + " bits");
    }
  }
};

using SchemePtr = std::shared_ptr<const Scheme>;

// insert(s, m, k) = s_n . (m xor G(k)),  extract(s_n . w, k) = w xor G(k),
// with the keystream generated at length l(S_n) - alpha.
class XorPrefixScheme final : public Scheme {
 public:
  XorPrefixScheme(std::shared_ptr<const PrefixUniformFamily> family, GeneratorPtr generator,
                  bool strict = false)
      : family_(std::move(family)), generator_(std::move(generator)), strict_(strict) {
    if (!family_ || !generator_) throw InvalidParameter("xor-prefix needs a family and a generator");
  }

  std::string name() const override { return "xor-prefix"; }
  bool symmetric() const override { return true; }
  bool strict() const noexcept { return strict_; }
  const PrefixUniformFamily& family() const noexcept { return *family_; }
  const Generator& generator() const noexcept { return *generator_; }

  std::size_t message_length(std::size_t support_length) const override {
    return family_->support_length(index_for(support_length)) - family_->alpha();
  }

  BitString insert(const BitString& s, const BitString& m, const BitString& k) const override {
    const std::size_t n = index_for(s.size());
    require_message_length(s, m);
    const BitString keystream = keystream_for(k, m.size());
    const BitString head = family_->prefix(n);
    if (strict_) require_prefix(s, head);
    return concat(head, m ^ keystream);
  }

  BitString extract(const BitString& stego, const BitString& k) const override {
    const std::size_t n = index_for(stego.size());
    const std::size_t alpha = family_->alpha();
    const BitString keystream = keystream_for(k, stego.size() - alpha);
    if (strict_) require_prefix(stego, family_->prefix(n));
    return stego.suffix_from(alpha) ^ keystream;
  }

  BitString inv_key(const BitString& k) const override {
    check_key(k);
    return k;
  }

  BoundInsert bind(const BitString& k, std::size_t support_length) const override {
    const std::size_t n = index_for(support_length);
    const std::size_t width = support_length - family_->alpha();
    BitString keystream = keystream_for(k, width);
    BitString head = family_->prefix(n);
    return [this, width, keystream = std::move(keystream), head = std::move(head)](
               const BitString& s, const BitString& m) {
      if (s.size() != head.size() + width) {
        throw SupportError("inserter bound to supports of length " +
                           std::to_string(head.size() + width));
      }
      if (m.size() != width) require_message_length(s, m);
      if (strict_) require_prefix(s, head);
      return concat(head, m ^ keystream);
    };
  }

 private:
  std::size_t index_for(std::size_t support_length) const {
    auto n = family_->index_for_length(support_length);
    if (!n) {
      throw SupportError("no index of the family has supports of length " +
                         std::to_string(support_length));
    }
    return *n;
  }

  void check_key(const BitString& k) const {
    try {
      generator_->check_seed(k);
    } catch (const StegoError& e) {
      throw KeyError(e.what());
    }
  }

  BitString keystream_for(const BitString& k, std::size_t width) const {
    check_key(k);
    return generator_->generate(k, width);
  }

  static void require_prefix(const BitString& word, const BitString& head) {
    if (word.prefix(head.size()) != head) throw SupportError("word does not start with s_n");
  }

  std::shared_ptr<const PrefixUniformFamily> family_;
  GeneratorPtr generator_;
  bool strict_;
};

// Overwrites the last bit of each consecutive `block`-bit block with the next
// message bit. Key unused.
class LsbScheme final : public Scheme {
 public:
  explicit LsbScheme(std::size_t block) : block_(block) {
    if (block < 2) throw InvalidParameter("LSB block must be at least 2");
  }

  std::string name() const override { return "lsb"; }
  bool symmetric() const override { return true; }
  std::size_t block() const noexcept { return block_; }

  std::size_t message_length(std::size_t support_length) const override {
    return support_length / block_;
  }

  BitString insert(const BitString& s, const BitString& m, const BitString&) const override {
    require_message_length(s, m);
    return BitString::generate(s.size(), [&](std::size_t j) {
      return (j + 1) % block_ == 0 && (j + 1) / block_ <= m.size() ? m[(j + 1) / block_ - 1] : s[j];
    });
  }

  BitString extract(const BitString& stego, const BitString&) const override {
    const std::size_t count = message_length(stego.size());
    return BitString::generate(count, [&](std::size_t i) { return stego[(i + 1) * block_ - 1]; });
  }

  BitString inv_key(const BitString& k) const override { return k; }

 private:
  std::size_t block_;
};

// Narrows a scheme's message bound to f1 <= f: insert 0-fills the message up
// to the base length, extract truncates back to f1 bits.
class PaddedScheme final : public Scheme {
 public:
  PaddedScheme(SchemePtr base, BoundFn f1) : base_(std::move(base)), f1_(std::move(f1)) {
    if (!base_ || !f1_) throw InvalidParameter("padded scheme needs a base scheme and f1");
  }

  std::string name() const override { return "padded"; }
  bool symmetric() const override { return base_->symmetric(); }
  const Scheme& base() const noexcept { return *base_; }

  std::size_t message_length(std::size_t support_length) const override {
    const std::size_t base_length = base_->message_length(support_length);
    const std::int64_t bound = f1_(support_length);
    if (bound < 0 || static_cast<std::size_t>(bound) > base_length) {
      throw BoundViolation("f1(" + std::to_string(support_length) + ")=" + std::to_string(bound) +
                           " outside [0, " + std::to_string(base_length) + "]");
    }
    return static_cast<std::size_t>(bound);
  }

  BitString pad(const BitString& message, std::size_t support_length) const {
    return concat(message, BitString::zeros(base_->message_length(support_length) - message.size()));
  }

  BitString insert(const BitString& s, const BitString& m, const BitString& k) const override {
    require_message_length(s, m);
    return base_->insert(s, pad(m, s.size()), k);
  }

  BitString extract(const BitString& stego, const BitString& k) const override {
    return base_->extract(stego, k).prefix(message_length(stego.size()));
  }

  BitString inv_key(const BitString& k) const override { return base_->inv_key(k); }

  BoundInsert bind(const BitString& k, std::size_t support_length) const override {
    return [this, inner = base_->bind(k, support_length)](const BitString& s, const BitString& m) {
      require_message_length(s, m);
      return inner(s, pad(m, s.size()));
    };
  }

 private:
  SchemePtr base_;
  BoundFn f1_;
};

inline SchemePtr make_xor_prefix_scheme(std::shared_ptr<const PrefixUniformFamily> family,
                                        GeneratorPtr generator, bool strict = false) {
  return std::make_shared<const XorPrefixScheme>(std::move(family), std::move(generator), strict);
}

inline SchemePtr make_lsb_scheme(std::size_t block) {
  return std::make_shared<const LsbScheme>(block);
}

// BoundViolation if f1 exceeds the base bound at any of `lengths`.
inline SchemePtr pad_adapter(SchemePtr base, BoundFn f1, std::span<const std::size_t> lengths) {
  auto adapted = std::make_shared<const PaddedScheme>(std::move(base), std::move(f1));
  for (std::size_t length : lengths) adapted->message_length(length);
  return adapted;
}

// True iff at every length the scheme's message length is at most f(length)
// and insert refuses randomized wrong-length messages. Lengths with no
// admissible supports are vacuously bounded.
inline bool check_f_bounded(const Scheme& scheme, const BoundFn& f,
                            std::span<const std::size_t> lengths, const BitString& probe_key,
                            RandomSource& rng, int random_probes = 4) {
  for (std::size_t length : lengths) {
    std::size_t expected = 0;
    try {
      expected = scheme.message_length(length);
    } catch (const SupportError&) {
      continue;
    }
    if (static_cast<std::int64_t>(expected) > f(length)) return false;

    std::vector<std::size_t> probes = {expected + 1};
    if (expected > 0) probes.push_back(expected - 1);
    for (int i = 0; i < random_probes; ++i) {
      const std::size_t candidate = rng.below(length + 9);
      if (candidate != expected) probes.push_back(candidate);
    }
    for (std::size_t wrong : probes) {
      const BitString support = sample_uniform(length, rng);
      const BitString message = sample_uniform(wrong, rng);
      try {
        scheme.insert(support, message, probe_key);
        return false;
      } catch (const StegoError&) {
      }
    }
  }
  return true;
}

}  // namespace stegogame
