#include "paleylab/cone.hpp"

#include <algorithm>
#include <set>

#include "paleylab/error.hpp"

namespace paleylab {

namespace {

constexpr std::size_t kMaxReach = 2'000'000;

void require_dim(const Freq& x, std::size_t d) {
  if (x.dim() != d) throw InvalidInput("frequency " + x.to_string() + " does not match cone dimension");
}

}  // namespace

ConeOrder ConeOrder::half_line() { return ConeOrder(); }

ConeOrder ConeOrder::lex_last(std::size_t dim) {
  if (dim == 0) throw InvalidInput("cone dimension must be positive");
  ConeOrder c;
  c.kind_ = Kind::LexLast;
  c.dim_ = dim;
  return c;
}

ConeOrder ConeOrder::generated(std::vector<Freq> gens, int bound) {
  if (gens.empty()) throw InvalidInput("generator cone needs at least one generator");
  if (bound < 1) throw InvalidInput("generator search bound must be positive");
  ConeOrder c;
  c.kind_ = Kind::Generators;
  c.dim_ = gens.front().dim();
  for (const auto& g : gens) require_dim(g, c.dim_);
  c.bound_ = bound;

  // breadth-first closure: layer r holds sums of exactly r generators
  std::set<Freq> seen(gens.begin(), gens.end());
  std::vector<Freq> layer(seen.begin(), seen.end());
  for (int r = 2; r <= bound && !layer.empty(); ++r) {
    std::vector<Freq> next;
    for (const auto& x : layer)
      for (const auto& g : gens) {
        Freq y = x + g;
        if (seen.insert(y).second) next.push_back(std::move(y));
      }
    if (seen.size() > kMaxReach) throw InvalidInput("generator cone search exceeds state cap");
    layer = std::move(next);
  }
  c.axiom_ = !seen.contains(Freq::zero(c.dim_));
  c.gens_ = std::move(gens);
  c.reach_ = std::make_shared<const std::vector<Freq>>(seen.begin(), seen.end());
  return c;
}

bool ConeOrder::in_strict_cone(const Freq& x) const {
  require_dim(x, dim_);
  switch (kind_) {
    case Kind::HalfLine:
      return x[0] > 0;
    case Kind::LexLast:
      for (std::size_t a = dim_; a-- > 0;)
        if (x[a] != 0) return x[a] > 0;
      return false;
    case Kind::Generators:
      return std::binary_search(reach_->begin(), reach_->end(), x);
  }
  return false;
}

int ConeOrder::sign(const Freq& x) const {
  if (x.is_zero()) return 0;
  if (in_strict_cone(x)) return 1;
  if (in_strict_cone(-x)) return -1;
  return 2;
}

bool is_strongly_lacunary(std::span<const std::int64_t> k) {
  for (std::size_t j = 0; j + 1 < k.size(); ++j)
    if (!(k[j + 1] > 2 * k[j])) return false;
  return true;
}

bool is_strongly_lacunary_ordered(std::span<const Freq> K, const ConeOrder& order) {
  if (!order.axiom_holds()) throw InvalidInput("cone axiom P ∩ (−P) = {0} fails");
  for (std::size_t i = 0; i < K.size(); ++i)
    for (std::size_t j = i + 1; j < K.size(); ++j) {
      if (K[i] == K[j]) continue;
      if (!order.in_strict_cone(K[i] - 2 * K[j]) && !order.in_strict_cone(K[j] - 2 * K[i])) return false;
    }
  return true;
}

LacunarityReport is_extremely_lacunary(std::span<const Freq> e, const ConeOrder& order, std::int64_t m_max) {
  if (!order.is_total()) throw InvalidInput("extreme lacunarity needs a total order");
  if (m_max < 1) throw InvalidInput("m_max must be positive");
  auto pair_ok = [&](std::size_t j, std::int64_t m) { return order.in_strict_cone(e[j + 1] - m * e[j]); };

  bool holds = true;
  for (std::size_t j = 0; j + 1 < e.size() && holds; ++j)
    for (std::int64_t m = 1; m <= m_max && holds; ++m) holds = pair_ok(j, m);
  if (!holds) return {false, true};

  // Past m = max|b_c|/|a_c| + 1 every coordinate of b - m a has a fixed sign,
  // so checking m up to that threshold decides all m.
  bool all_m = true;
  for (std::size_t j = 0; j + 1 < e.size() && all_m; ++j) {
    std::int64_t t = 1;
    for (std::size_t c = 0; c < e[j].dim(); ++c)
      if (e[j][c] != 0) t = std::max(t, std::abs(e[j + 1][c]) / std::abs(e[j][c]) + 2);
    for (std::int64_t m = m_max + 1; m <= t && all_m; ++m) all_m = pair_ok(j, m);
  }
  return {true, all_m};
}

}  // namespace paleylab
