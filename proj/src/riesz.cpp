#include "paleylab/riesz.hpp"

#include <cmath>
#include <set>

#include "paleylab/error.hpp"

namespace paleylab {

Dyadic Dyadic::make(std::int64_t num, int exp) {
  if (num == 0) return {0, 0};
  while (exp > 0 && num % 2 == 0) {
    num /= 2;
    --exp;
  }
  return {num, exp};
}

double Dyadic::value() const { return std::ldexp(static_cast<double>(num), -exp); }

std::strong_ordering Dyadic::operator<=>(const Dyadic& o) const {
  // compare num * 2^(e - exp) over the larger exponent e; exponents stay below 62
  int e = std::max(exp, o.exp);
  __int128 a = static_cast<__int128>(num) << (e - exp);
  __int128 b = static_cast<__int128>(o.num) << (e - o.exp);
  return a <=> b;
}

Dyadic RieszExpansion::coefficient(const Freq& g) const {
  auto it = num_.find(g);
  return it == num_.end() ? Dyadic{} : Dyadic::make(it->second, exp_);
}

RieszExpansion riesz_expansion(std::span<const Freq> K, const Caps& caps) {
  std::set<Freq> kp;
  std::size_t d = K.empty() ? 1 : K.front().dim();
  for (const auto& g : K) {
    if (g.dim() != d) throw InvalidInput("mixed frequency dimensions in K");
    if (!g.is_zero()) kp.insert(g);
  }
  if (kp.size() > caps.riesz || kp.size() > 30)
    throw InvalidInput("Riesz expansion exceeds cap of " + std::to_string(std::min<std::size_t>(caps.riesz, 30)));
  // (1 + (z^g + z^-g)/2) = (2 + z^g + z^-g) / 2, one factor at a time
  std::map<Freq, std::int64_t> cur{{Freq::zero(d), 1}};
  for (const auto& g : kp) {
    std::map<Freq, std::int64_t> nxt;
    for (const auto& [x, c] : cur) {
      nxt[x] += 2 * c;
      nxt[x + g] += c;
      nxt[x - g] += c;
    }
    cur = std::move(nxt);
  }
  return RieszExpansion(std::move(cur), static_cast<int>(kp.size()));
}

RieszPolynomial riesz_polynomial(std::span<const Freq> K, const GridSpec& spec, const Caps& caps) {
  spec.validate();
  auto ex = riesz_expansion(K, caps);
  for (const auto& [g, c] : ex.numerators())
    if (!spec.in_window(g)) throw InvalidInput("Riesz support point " + g.to_string() + " exceeds the window");
  auto prod = GridFunction::constant(spec, 1.0);
  std::set<Freq> kp;
  for (const auto& g : K)
    if (!g.is_zero()) kp.insert(g);
  for (const auto& g : kp) {
    auto ch = GridFunction::character(spec, g);
    for (std::size_t i = 0; i < prod.samples.size(); ++i) prod.samples[i] *= 1.0 + ch.samples[i].real();
  }
  return {std::move(prod), std::move(ex)};
}

}  // namespace paleylab
