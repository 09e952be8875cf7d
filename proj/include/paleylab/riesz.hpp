#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>

#include "paleylab/combinatorics.hpp"
#include "paleylab/fourier_grid.hpp"

namespace paleylab {

// num / 2^exp, reduced so num is odd unless exp == 0.
struct Dyadic {
  std::int64_t num = 0;
  int exp = 0;

  static Dyadic make(std::int64_t num, int exp);
  double value() const;
  std::strong_ordering operator<=>(const Dyadic& o) const;
  bool operator==(const Dyadic& o) const { return num == o.num && exp == o.exp; }
};

// Exact coefficients of the product over K' of (1 + (z^g + z^-g)/2),
// stored as integer numerators over the common denominator 2^|K'|.
class RieszExpansion {
 public:
  RieszExpansion() = default;
  RieszExpansion(std::map<Freq, std::int64_t> numerators, int exponent)
      : num_(std::move(numerators)), exp_(exponent) {}

  Dyadic coefficient(const Freq& g) const;
  int common_exponent() const { return exp_; }
  const std::map<Freq, std::int64_t>& numerators() const { return num_; }
  double value(const Freq& g) const { return coefficient(g).value(); }

 private:
  std::map<Freq, std::int64_t> num_;
  int exp_ = 0;
};

RieszExpansion riesz_expansion(std::span<const Freq> K, const Caps& caps = {});

struct RieszPolynomial {
  GridFunction samples;
  RieszExpansion expansion;
};

// Sampled product and exact expansion; the support must fit the window.
RieszPolynomial riesz_polynomial(std::span<const Freq> K, const GridSpec& spec, const Caps& caps = {});

}  // namespace paleylab
