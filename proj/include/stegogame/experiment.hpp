#pragma once

// Manifest-driven batch runs of the hiding and PRNG games, and their CSV/JSON
// reports.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "stegogame/descriptors.hpp"
#include "stegogame/game.hpp"

namespace stegogame {

inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a, 64 bit.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Digest of the resolved configuration; object keys are serialized sorted.
inline std::string config_digest(const Json& resolved) { return hex64(fnv1a64(resolved.dump())); }

struct ResultRow {
  std::string experiment_id;
  std::size_t n = 0;
  std::string distinguisher;
  AdvantageReport report;
  Verdict verdict = Verdict::inconclusive;
  Rational threshold;
  std::uint64_t master_seed = 0;
};

struct RunOutput {
  std::string experiment_id;
  std::uint64_t master_seed = 0;
  std::string digest;
  std::vector<ResultRow> rows;
};

namespace detail {

inline MessageMode message_mode_from_json(const Json& j) {
  const auto kind = field<std::string>(j, "kind");
  if (kind == "uniform") return UniformMessage{};
  if (kind == "fixed") return FixedMessage{bits_from_text(field<std::string>(j, "value"))};
  throw ConfigError("unknown message mode '" + kind + "'");
}

inline KeyMode key_mode_from_json(const Json& j) {
  const auto kind = field<std::string>(j, "kind");
  if (kind == "uniform") return UniformKey{field<std::size_t>(j, "seed_length")};
  if (kind == "fixed") return FixedKey{bits_from_text(field<std::string>(j, "value"))};
  throw ConfigError("unknown key mode '" + kind + "'");
}

inline std::vector<Json> distinguisher_list(const Json& manifest) {
  auto list = field<std::vector<Json>>(manifest, "distinguishers");
  if (list.empty()) throw ConfigError("no distinguishers given");
  return list;
}

}  // namespace detail

// Overrides from the command line, applied before the configuration digest.
struct RunOverrides {
  std::optional<std::uint64_t> master_seed;
  std::vector<Json> distinguishers;
  std::optional<std::string> generator;
};

// Manifest fields: experiment_id, family, scheme, distinguishers, indices,
// message_mode, key_mode, trials, delta, master_seed, mode (monte-carlo |
// exact), policy.
inline RunOutput run_game_manifest(Json manifest, const RunOverrides& overrides = {},
                                   unsigned threads = 1) {
  if (overrides.master_seed) manifest["master_seed"] = *overrides.master_seed;
  if (!overrides.distinguishers.empty()) manifest["distinguishers"] = overrides.distinguishers;

  RunOutput out;
  out.experiment_id = detail::field_or<std::string>(manifest, "experiment_id", "game");
  out.master_seed = detail::field_or<std::uint64_t>(manifest, "master_seed", 0);
  manifest["master_seed"] = out.master_seed;
  out.digest = config_digest(manifest);

  const FamilyPtr family = family_from_json(detail::field<Json>(manifest, "family"));
  const SchemePtr scheme = scheme_from_json(detail::field<Json>(manifest, "scheme"), family);
  const auto indices = detail::field<std::vector<std::size_t>>(manifest, "indices");
  const auto mode = detail::field_or<std::string>(manifest, "mode", "monte-carlo");
  if (mode != "monte-carlo" && mode != "exact") throw ConfigError("unknown mode '" + mode + "'");
  const ThresholdPolicy policy(
      manifest.contains("policy")
          ? polynomial_from_json(detail::field<Json>(manifest["policy"], "polynomial"))
          : Polynomial::identity());

  GameConfig cfg;
  cfg.family = family;
  cfg.scheme = scheme;
  cfg.message = manifest.contains("message_mode")
                    ? detail::message_mode_from_json(manifest["message_mode"])
                    : MessageMode{UniformMessage{}};
  cfg.key = manifest.contains("key_mode") ? detail::key_mode_from_json(manifest["key_mode"])
                                          : KeyMode{UniformKey{}};
  cfg.trials = detail::field_or<std::size_t>(manifest, "trials", 10000);
  cfg.delta = detail::field_or<double>(manifest, "delta", 0.01);

  const auto descriptors = detail::distinguisher_list(manifest);
  for (std::size_t n : indices) {
    cfg.index = n;
    try {
      cfg.validate(mode == "monte-carlo");
    } catch (const StegoError& e) {
      throw ConfigError(e.what());
    }
    std::optional<ExactGame> exact;
    if (mode == "exact") exact.emplace(cfg);
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
      const auto d = distinguisher_from_json(descriptors[i], family.get(), n);
      ResultRow row;
      row.experiment_id = out.experiment_id;
      row.n = n;
      row.distinguisher = d->name();
      row.master_seed = out.master_seed;
      // Each (index, distinguisher) pair gets its own sub-stream of the master seed.
      row.report = exact ? exact->advantage(*d)
                         : estimate_advantage(cfg, *d, derive_seed(out.master_seed, n, i), threads);
      row.threshold = policy.threshold(n, cfg.key_length());
      row.verdict = verdict_against(row.report, row.threshold);
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

// Manifest fields: experiment_id, generator, distinguishers, seed_length,
// out_lengths, trials, delta, master_seed, policy. p_stego holds the
// generator arm and p_cover the uniform arm.
inline RunOutput run_prng_manifest(Json manifest, const RunOverrides& overrides = {},
                                   unsigned threads = 1) {
  if (overrides.master_seed) manifest["master_seed"] = *overrides.master_seed;
  if (!overrides.distinguishers.empty()) manifest["distinguishers"] = overrides.distinguishers;
  if (overrides.generator) manifest["generator"] = Json{{"name", *overrides.generator}};

  RunOutput out;
  out.experiment_id = detail::field_or<std::string>(manifest, "experiment_id", "prngtest");
  out.master_seed = detail::field_or<std::uint64_t>(manifest, "master_seed", 0);
  manifest["master_seed"] = out.master_seed;
  out.digest = config_digest(manifest);

  const GeneratorPtr generator = generator_from_json(detail::field<Json>(manifest, "generator"));
  const auto seed_length = detail::field<std::size_t>(manifest, "seed_length");
  const auto out_lengths = detail::field<std::vector<std::size_t>>(manifest, "out_lengths");
  const auto trials = detail::field_or<std::size_t>(manifest, "trials", 10000);
  const auto delta = detail::field_or<double>(manifest, "delta", 0.01);
  const ThresholdPolicy policy(
      manifest.contains("policy")
          ? polynomial_from_json(detail::field<Json>(manifest["policy"], "polynomial"))
          : Polynomial::identity());

  const auto descriptors = detail::distinguisher_list(manifest);
  for (std::size_t out_length : out_lengths) {
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
      const auto d = distinguisher_from_json(descriptors[i]);
      ResultRow row;
      row.experiment_id = out.experiment_id;
      row.n = out_length;
      row.distinguisher = d->name();
      row.master_seed = out.master_seed;
      try {
        row.report = prng_advantage(*generator, *d, seed_length, out_length, trials, delta,
                                    derive_seed(out.master_seed, out_length, i), threads);
      } catch (const LengthMismatch& e) {
        throw ConfigError(e.what());
      }
      row.threshold = policy.key_term(seed_length);
      row.verdict = verdict_against(row.report, row.threshold);
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

namespace detail {

inline std::string sig10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace detail

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns = {
      "experiment_id", "n",           "distinguisher", "p_stego",         "p_cover",
      "advantage",     "half_width",  "exact",         "verdict",         "threshold",
      "trials",        "master_seed", "advantage_exact", "tool_version", "config_digest"};
  return columns;
}

// RFC 4180: CRLF line breaks, mandatory header, quoted fields where needed.
inline std::string render_csv(const RunOutput& run) {
  std::string out;
  const auto& columns = csv_columns();
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += "\r\n";
  for (const auto& row : run.rows) {
    const auto& r = row.report;
    const std::vector<std::string> fields = {
        row.experiment_id,
        std::to_string(row.n),
        row.distinguisher,
        detail::sig10(r.p_stego),
        detail::sig10(r.p_cover),
        detail::sig10(r.advantage),
        detail::sig10(r.half_width),
        r.exact ? "true" : "false",
        to_string(row.verdict),
        detail::sig10(to_double(row.threshold)),
        std::to_string(r.trials),
        std::to_string(row.master_seed),
        r.exact_advantage ? to_string(*r.exact_advantage) : "",
        kToolVersion,
        run.digest};
    for (std::size_t c = 0; c < fields.size(); ++c) {
      out += (c ? "," : "") + detail::csv_field(fields[c]);
    }
    out += "\r\n";
  }
  return out;
}

inline Json render_json(const RunOutput& run) {
  Json rows = Json::array();
  for (const auto& row : run.rows) {
    const auto& r = row.report;
    rows.push_back({{"experiment_id", row.experiment_id},
                    {"n", row.n},
                    {"distinguisher", row.distinguisher},
                    {"p_stego", r.p_stego},
                    {"p_cover", r.p_cover},
                    {"advantage", r.advantage},
                    {"half_width", r.half_width},
                    {"exact", r.exact},
                    {"verdict", to_string(row.verdict)},
                    {"threshold", to_double(row.threshold)},
                    {"trials", r.trials},
                    {"master_seed", row.master_seed},
                    {"advantage_exact", r.exact_advantage ? to_string(*r.exact_advantage) : ""}});
  }
  return {{"tool_version", kToolVersion},
          {"experiment_id", run.experiment_id},
          {"master_seed", run.master_seed},
          {"config_digest", run.digest},
          {"rows", rows}};
}

inline Json validation_to_json(const ValidationReport& report) {
  auto check = [](const CheckResult& c) {
    Json j = {{"passed", c.passed}, {"detail", c.detail}};
    j["first_violation"] = c.first_violation ? Json(*c.first_violation) : Json(nullptr);
    return j;
  };
  return {{"tool_version", kToolVersion},
          {"n_from", report.n_from},
          {"n_to", report.n_to},
          {"enumerated", report.enumerated},
          {"ok", report.ok()},
          {"equal_length", check(report.equal_length)},
          {"probability_sum", check(report.probability_sum)},
          {"poly_bound", check(report.poly_bound)}};
}

}  // namespace stegogame
