// Runs the hiding game against a keyed XOR embedding and against plain LSB
// replacement, then the generator game against a weak and a strong PRNG.
#include <iostream>
#include <thread>

#include "stegogame/stegogame.hpp"

using namespace stegogame;

namespace {

void print(const std::string& label, const AdvantageReport& r, const Rational& threshold) {
  std::cout << label << ": advantage " << r.advantage;
  if (r.exact) {
    std::cout << " (exact " << to_string(*r.exact_advantage) << ")";
  } else {
    std::cout << " +/- " << r.half_width;
  }
  std::cout << ", threshold " << to_double(threshold) << ", "
            << to_string(verdict_against(r, threshold)) << "\n";
}

}  // namespace

int main() {
  const unsigned threads = std::max(1U, std::thread::hardware_concurrency());
  // p(x) = x^2 + 64 keeps the keyless threshold below 1.
  const ThresholdPolicy policy(Polynomial({64, 0, 1}));

  // Flagship family, 128-bit keys, ARX keystream.
  const auto flagship = flagship_family();
  GameConfig strong;
  strong.family = flagship;
  strong.scheme = make_xor_prefix_scheme(flagship, make_arx_stream_generator());
  strong.index = 256;
  strong.trials = 20000;
  for (const auto& d : {make_chi_square(4, 0.99), make_runs_test(0.999), make_alternation(0.6)}) {
    print("xor-prefix vs " + d->name(), estimate_advantage(strong, *d, 1, threads),
          policy.threshold(256, 128));
  }

  // LSB on parity-structured covers, enumerated exactly.
  GameConfig broken;
  broken.family = std::make_shared<const ParityFamily>(LengthRule::identity(), 2, 64);
  broken.scheme = make_lsb_scheme(8);
  broken.index = 8;
  broken.key = FixedKey{BitString{}};
  print("lsb vs parity", exact_advantage(broken, *make_parity_check()),
        policy.threshold(8, 0));

  // A fixed message under a fixed key is a point mass.
  const auto small = make_prefix_uniform(parse("10"), LengthRule::identity(), 3, 64);
  const auto xor_small = make_xor_prefix_scheme(small, make_arx_stream_generator());
  std::cout << "stego distance, uniform messages: "
            << to_string(stego_security_distance(*small, *xor_small, parse("1011"), UniformMessage{}, 10))
            << "\n";
  std::cout << "stego distance, fixed message: "
            << to_string(stego_security_distance(*small, *xor_small, parse("1011"),
                                                 FixedMessage{parse("01")}, 4))
            << "\n";

  for (const auto& g : {make_lcg_lsb_generator(), make_arx_stream_generator()}) {
    print("prng " + g->name() + " vs alternation",
          prng_advantage(*g, *make_alternation(0.9), 32, 64, 10000, 0.01, 2, threads),
          policy.key_term(32));
  }
  return 0;
}
