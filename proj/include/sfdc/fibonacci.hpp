#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sfdc/types.hpp"

namespace sfdc {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<BigInt>;

inline double to_double(const Rational& r) {
  return static_cast<double>(boost::multiprecision::cpp_rational(r.numerator(), r.denominator()));
}

// F_0 = 0, F_1 = 1, F_{k+2} = F_k + F_{k+1}; exact up to F_92.
inline std::uint64_t fibonacci(unsigned k) {
  if (k > 92) throw std::out_of_range("Fibonacci index exceeds the exact 64-bit range (k <= 92)");
  std::uint64_t a = 0, b = 1;
  for (unsigned i = 0; i < k; ++i) {
    const std::uint64_t next = a + b;
    a = b;
    b = next;
  }
  return a;
}

// Mean Huffman code length over a Fibonacci-frequency alphabet of size
// sigma: (F_{sigma+3} - 3) / F_{sigma+1}.
inline Rational expected_code_length(unsigned sigma) {
  if (sigma < 2 || sigma > 89)
    throw std::out_of_range("alphabet size must be in [2, 89] for the exact formula");
  return {BigInt(fibonacci(sigma + 3)) - 3, BigInt(fibonacci(sigma + 1))};
}

// Expected idle bits per character at lambda layers: lambda minus the mean
// code length.
inline Rational expected_idle_bits(unsigned sigma, unsigned lambda) {
  if (lambda < 2) throw std::out_of_range("layer count must be at least 2");
  return Rational(BigInt(lambda)) - expected_code_length(sigma);
}

inline void check_delay_regime(unsigned sigma, unsigned lambda) {
  if (lambda < 4 || lambda + 1 > sigma)
    throw std::out_of_range("delay formulas require 4 <= lambda <= sigma - 1");
}

// Expected decoding delay of the standard variant on the Fibonacci model:
// (F_{sigma-lambda+3} - 3) / F_{sigma+1}, clamped at zero.
inline Rational expected_delay_standard(unsigned sigma, unsigned lambda) {
  check_delay_regime(sigma, lambda);
  BigInt num = BigInt(fibonacci(sigma - lambda + 3)) - 3;
  if (num < 0) num = 0;
  return {std::move(num), BigInt(fibonacci(sigma + 1))};
}

// Bounds on the expected gamma-variant delay: the lower bound is the
// ceiling-free sum, the upper bound adds the total weight of the long-code
// characters, F_{sigma-lambda+1} / F_{sigma+1}.
inline std::pair<Rational, Rational> gamma_delay_bounds(unsigned sigma, unsigned lambda) {
  check_delay_regime(sigma, lambda);
  BigInt num = BigInt(fibonacci(sigma - lambda + 3)) - 3;
  if (num < 0) num = 0;
  const BigInt den =
      BigInt(lambda) * fibonacci(sigma + 1) - BigInt(fibonacci(sigma + 3)) + 3;
  const Rational lower{std::move(num), den};
  const Rational upper =
      lower + Rational(BigInt(fibonacci(sigma - lambda + 1)), BigInt(fibonacci(sigma + 1)));
  return {lower, upper};
}

// The ceiling-weighted delay sum for the gamma variant:
// sum_{i=0}^{sigma-lambda-1} f^r(c_i) * ceil((|rho(c_i)| - lambda) / (lambda - e_rho)).
inline Rational gamma_delay_ceil_sum(unsigned sigma, unsigned lambda) {
  check_delay_regime(sigma, lambda);
  const BigInt f_total(fibonacci(sigma + 1));
  // lambda - e_rho = (lambda*F_{sigma+1} - F_{sigma+3} + 3) / F_{sigma+1}
  const BigInt slack_num = BigInt(lambda) * f_total - BigInt(fibonacci(sigma + 3)) + 3;
  BigInt weighted = 0;
  for (unsigned i = 0; i + lambda < sigma; ++i) {
    const BigInt freq = i == 0 ? BigInt(1) : BigInt(fibonacci(i));
    const unsigned code_len = i == 0 ? sigma - 1 : sigma - i;
    // ceil((code_len - lambda) / slack) with slack = slack_num / F_{sigma+1}
    const BigInt num = BigInt(code_len - lambda) * f_total;
    const BigInt steps = (num + slack_num - 1) / slack_num;
    weighted += freq * steps;
  }
  return {std::move(weighted), f_total};
}

// Random text of length scale * F_{sigma+1} in which symbol 0 occurs scale
// times and symbol i occurs scale * F_i times (1 <= i < sigma); the order is
// a seeded uniform shuffle.
inline std::vector<Symbol> generate_fibonacci_text(unsigned sigma, std::uint64_t scale,
                                                   std::uint64_t seed) {
  if (sigma < 2 || sigma > 91) throw std::out_of_range("alphabet size must be in [2, 91]");
  if (scale < 1) throw std::invalid_argument("scale must be at least 1");
  const unsigned __int128 total =
      static_cast<unsigned __int128>(scale) * fibonacci(sigma + 1);
  if (total > (std::uint64_t{1} << 40))
    throw std::overflow_error("generated text length exceeds the supported range");

  std::vector<Symbol> text;
  text.reserve(static_cast<std::size_t>(total));
  for (unsigned i = 0; i < sigma; ++i) {
    const std::uint64_t count = scale * (i == 0 ? 1 : fibonacci(i));
    text.insert(text.end(), static_cast<std::size_t>(count), static_cast<Symbol>(i));
  }
  std::mt19937_64 rng(seed);
  std::shuffle(text.begin(), text.end(), rng);
  return text;
}

}  // namespace sfdc
