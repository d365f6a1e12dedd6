// stegogame: embed/extract words and run the hiding and PRNG games from JSON
// manifests.
//
//   stegogame embed   SCHEME SUPPORT MESSAGE KEY OUT
//   stegogame extract SCHEME STEGO KEY OUT
//   stegogame game     MANIFEST [--seed N] [--out DIR] [--format csv|json] [--distinguisher D]...
//   stegogame prngtest MANIFEST [--seed N] [--out DIR] [--format csv|json] [--generator G] [--distinguisher D]...
//   stegogame validate FAMILY [--n-max N]
//
// Exit codes: 0 success, 1 validation found violations, 2 usage/config/length errors.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "stegogame/stegogame.hpp"

namespace fs = std::filesystem;
using namespace stegogame;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One word per file; trailing whitespace (newline) permitted.
BitString read_bits(const fs::path& path) {
  std::string text = read_file(path);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) {
    text.pop_back();
  }
  return parse(text, BitFormat::binary);
}

Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// Writes to a sibling temporary and renames, so readers never see a partial file.
void write_atomically(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
    if (!out.flush()) throw ConfigError("cannot write " + path.string());
  }
  fs::rename(tmp, path);
}

unsigned thread_count() {
  unsigned threads = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("STEGOGAME_THREADS")) {
    try {
      threads = static_cast<unsigned>(std::max(1L, std::stol(env)));
    } catch (const std::exception&) {
      throw ConfigError(std::string("STEGOGAME_THREADS is not a number: ") + env);
    }
  }
  return threads;
}

Json distinguisher_arg(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("--distinguisher: ") + e.what());
    }
  }
  return Json{{"name", text}};
}

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string format = "csv";
};

void emit(const RunOutput& run, const GlobalFlags& flags) {
  const bool json = flags.format == "json";
  const std::string body = json ? render_json(run).dump(2) + "\n" : render_csv(run);
  const fs::path path = fs::path(flags.out_dir) / (run.experiment_id + (json ? ".json" : ".csv"));
  write_atomically(path, body);
  std::cout << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stegosystem security workbench"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--seed", flags.seed, "Master seed (overrides the manifest)");
  app.add_option("--out", flags.out_dir, "Output directory for reports");
  app.add_option("--format", flags.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string scheme_file, support_file, message_file, key_file, out_file, stego_file;
  auto* embed = app.add_subcommand("embed", "Insert a message into a support");
  embed->add_option("scheme", scheme_file)->required();
  embed->add_option("support", support_file)->required();
  embed->add_option("message", message_file)->required();
  embed->add_option("key", key_file)->required();
  embed->add_option("out", out_file)->required();

  auto* extract = app.add_subcommand("extract", "Recover a message from a stego word");
  extract->add_option("scheme", scheme_file)->required();
  extract->add_option("stego", stego_file)->required();
  extract->add_option("key", key_file)->required();
  extract->add_option("out", out_file)->required();

  std::string manifest_file;
  std::vector<std::string> distinguishers;
  std::optional<std::string> generator;
  auto* game = app.add_subcommand("game", "Run the hiding game from a manifest");
  game->add_option("manifest", manifest_file)->required();
  game->add_option("--distinguisher", distinguishers, "Name or JSON descriptor (repeatable)");
  game->fallthrough();

  auto* prngtest = app.add_subcommand("prngtest", "Run the PRNG game from a manifest");
  prngtest->add_option("manifest", manifest_file)->required();
  prngtest->add_option("--distinguisher", distinguishers, "Name or JSON descriptor (repeatable)");
  prngtest->add_option("--generator", generator, "zero | lcg-lsb | arx-stream");
  prngtest->fallthrough();

  std::string family_file;
  std::size_t n_max = 64;
  auto* validate = app.add_subcommand("validate", "Check a family descriptor");
  validate->add_option("family", family_file)->required();
  validate->add_option("--n-max", n_max, "Largest index to check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*embed) {
      const SchemePtr scheme = scheme_from_json(read_json(scheme_file));
      const BitString stego =
          scheme->insert(read_bits(support_file), read_bits(message_file), read_bits(key_file));
      write_atomically(out_file, render(stego) + "\n");
      return 0;
    }
    if (*extract) {
      const SchemePtr scheme = scheme_from_json(read_json(scheme_file));
      const BitString key = read_bits(key_file);
      const BitString message = scheme->extract(read_bits(stego_file), scheme->inv_key(key));
      write_atomically(out_file, render(message) + "\n");
      return 0;
    }
    if (*game || *prngtest) {
      RunOverrides overrides;
      overrides.master_seed = flags.seed;
      for (const auto& d : distinguishers) overrides.distinguishers.push_back(distinguisher_arg(d));
      overrides.generator = generator;
      const Json manifest = read_json(manifest_file);
      const RunOutput run = *game ? run_game_manifest(manifest, overrides, thread_count())
                                  : run_prng_manifest(manifest, overrides, thread_count());
      emit(run, flags);
      return 0;
    }
    if (*validate) {
      const FamilyPtr family = family_from_json(read_json(family_file));
      const ValidationReport report = validate_family(*family, n_max);
      std::cout << validation_to_json(report).dump(2) << "\n";
      return report.ok() ? 0 : 1;
    }
  } catch (const StegoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
