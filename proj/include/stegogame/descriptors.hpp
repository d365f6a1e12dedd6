#pragma once

// JSON descriptors for families, generators, schemes and distinguishers.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "stegogame/bitstring.hpp"
#include "stegogame/detectors.hpp"
#include "stegogame/errors.hpp"
#include "stegogame/math.hpp"
#include "stegogame/prng.hpp"
#include "stegogame/probsets.hpp"
#include "stegogame/schemes.hpp"

namespace stegogame {

using Json = nlohmann::json;

namespace detail {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return field<T>(j, key);
}

}  // namespace detail

// "0x..." is hexadecimal, "0b..." or bare digits binary-text.
inline BitString bits_from_text(const std::string& text) {
  if (text.rfind("0x", 0) == 0) return parse(std::string_view(text).substr(2), BitFormat::hex);
  if (text.rfind("0b", 0) == 0) return parse(std::string_view(text).substr(2), BitFormat::binary);
  return parse(text, BitFormat::binary);
}

inline LengthRule length_rule_from_json(const Json& j) {
  const auto kind = detail::field<std::string>(j, "kind");
  if (kind == "identity") return LengthRule::identity();
  if (kind == "affine") {
    return {detail::field<std::int64_t>(j, "a"), detail::field<std::int64_t>(j, "b")};
  }
  throw ConfigError("unknown length rule '" + kind + "'");
}

// {kind: identity | affine, a, b} read as f(l) = a*l + b.
inline BoundFn bound_from_json(const Json& j) {
  const LengthRule rule = length_rule_from_json(j);
  return [rule](std::size_t l) { return rule(l); };
}

inline Polynomial polynomial_from_json(const Json& j) {
  try {
    return Polynomial(j.get<std::vector<std::int64_t>>());
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("polynomial must be an array of integer coefficients");
  }
}

inline FamilyPtr family_from_json(const Json& j) {
  const auto type = detail::field<std::string>(j, "type");
  if (type == "flagship") return flagship_family();

  const auto domain = detail::field<std::vector<std::size_t>>(j, "domain");
  if (domain.size() != 2) throw ConfigError("domain must be [n_min, n_max]");
  const auto rule = length_rule_from_json(detail::field<Json>(j, "length_rule"));
  const auto limit = detail::field_or<std::uint64_t>(j, "enumerable_limit", kDefaultEnumerableLimit);

  try {
    if (type == "prefix-uniform") {
      const std::string text = j.contains("prefix_hex_or_binary")
                                   ? detail::field<std::string>(j, "prefix_hex_or_binary")
                                   : detail::field<std::string>(j, "prefix");
      const BitString prefix = bits_from_text(text);
      if (j.contains("alpha") && detail::field<std::size_t>(j, "alpha") != prefix.size()) {
        throw ConfigError("alpha does not match the prefix length");
      }
      return make_prefix_uniform(prefix, rule, domain[0], domain[1], limit);
    }
    if (type == "parity") {
      return std::make_shared<const ParityFamily>(rule, domain[0], domain[1], limit);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const StegoError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown family type '" + type + "'");
}

inline GeneratorPtr generator_from_json(const Json& j) {
  const auto name = j.is_string() ? j.get<std::string>() : detail::field<std::string>(j, "name");
  if (name == "zero") return make_zero_generator();
  if (name == "arx-stream") return make_arx_stream_generator();
  if (name == "lcg-lsb") {
    const auto a = detail::field_or<std::uint64_t>(j, "multiplier", 6364136223846793005ULL);
    const auto c = detail::field_or<std::uint64_t>(j, "increment", 1442695040888963407ULL);
    try {
      return make_lcg_lsb_generator(a, c);
    } catch (const StegoError& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("unknown generator '" + name + "'");
}

// `fallback_family` serves schemes whose descriptor omits "family".
inline SchemePtr scheme_from_json(const Json& j, const FamilyPtr& fallback_family = nullptr) {
  const auto type = detail::field<std::string>(j, "type");
  try {
    if (type == "xor-prefix") {
      FamilyPtr family = j.contains("family") ? family_from_json(j.at("family")) : fallback_family;
      auto prefix_family = std::dynamic_pointer_cast<const PrefixUniformFamily>(family);
      if (!prefix_family) throw ConfigError("xor-prefix needs a prefix-uniform family");
      return make_xor_prefix_scheme(prefix_family,
                                    generator_from_json(detail::field<Json>(j, "generator")),
                                    detail::field_or<bool>(j, "strict", false));
    }
    if (type == "lsb") return make_lsb_scheme(detail::field<std::size_t>(j, "block"));
    if (type == "padded") {
      auto base = scheme_from_json(detail::field<Json>(j, "base"), fallback_family);
      const auto lengths = detail::field_or<std::vector<std::size_t>>(j, "lengths", {});
      return pad_adapter(base, bound_from_json(detail::field<Json>(j, "f1")), lengths);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const StegoError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown scheme type '" + type + "'");
}

// Distinguishers that depend on the game read `family` and the index `n`.
inline DistinguisherPtr distinguisher_from_json(const Json& j,
                                                const ProbabilitySetFamily* family = nullptr,
                                                std::size_t n = 0) {
  const auto name = j.is_string() ? j.get<std::string>() : detail::field<std::string>(j, "name");
  const Json params = j.is_object() ? j : Json::object();
  const auto* prefix_family = dynamic_cast<const PrefixUniformFamily*>(family);
  try {
    if (name == "constant") return make_constant(detail::field_or<int>(params, "bit", 1) != 0);
    if (name == "constant-0") return make_constant(false);
    if (name == "constant-1") return make_constant(true);
    if (name == "suffix-match") {
      const BitString target = bits_from_text(detail::field<std::string>(params, "target"));
      const std::size_t alpha = params.contains("alpha") ? detail::field<std::size_t>(params, "alpha")
                                : prefix_family            ? prefix_family->alpha()
                                                           : 0;
      return make_suffix_match(target, alpha);
    }
    if (name == "prefix-member") {
      if (!prefix_family) throw ConfigError("prefix-member needs a prefix-uniform family");
      return make_prefix_member(*prefix_family, n);
    }
    if (name == "chi-square") {
      return make_chi_square(detail::field_or<std::size_t>(params, "block", 1),
                             detail::field_or<double>(params, "quantile", 0.999));
    }
    if (name == "runs") return make_runs_test(detail::field_or<double>(params, "quantile", 0.999));
    if (name == "alternation") {
      return make_alternation(detail::field_or<double>(params, "threshold", 0.9));
    }
    if (name == "parity") return make_parity_check();
    if (name == "coin") return make_coin();
  } catch (const ConfigError&) {
    throw;
  } catch (const StegoError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown distinguisher '" + name + "'");
}

}  // namespace stegogame
