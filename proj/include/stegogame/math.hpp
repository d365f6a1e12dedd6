#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "stegogame/errors.hpp"

namespace stegogame {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Weight = unsigned __int128;

inline BigInt to_bigint(Weight w) {
  BigInt hi = static_cast<std::uint64_t>(w >> 64);
  return (hi << 64) + BigInt(static_cast<std::uint64_t>(w));
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// "num/den" in lowest terms; integers print as "num/1".
inline std::string to_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

// Integer polynomial, coefficients in ascending degree order.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<std::int64_t> coefficients)
      : coefficients_(std::move(coefficients)) {
    while (!coefficients_.empty() && coefficients_.back() == 0) coefficients_.pop_back();
  }

  static Polynomial identity() { return Polynomial({0, 1}); }

  BigInt operator()(std::uint64_t x) const {
    BigInt acc = 0;
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
      acc = acc * x + *it;
    }
    return acc;
  }

  const std::vector<std::int64_t>& coefficients() const noexcept { return coefficients_; }
  std::size_t degree() const noexcept {
    return coefficients_.empty() ? 0 : coefficients_.size() - 1;
  }
  std::int64_t leading() const noexcept {
    return coefficients_.empty() ? 0 : coefficients_.back();
  }

 private:
  std::vector<std::int64_t> coefficients_;
};

}  // namespace stegogame
