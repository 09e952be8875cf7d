#include "paleylab/combinatorics.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "paleylab/error.hpp"

namespace paleylab {

namespace {

constexpr std::size_t kStateCap = 20'000'000;

template <class T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

template <class V>
void require_distinct(std::span<const V> e) {
  std::vector<V> c(e.begin(), e.end());
  sort_unique(c);
  if (c.size() != e.size()) throw InvalidInput("enumeration entries must be distinct");
}

void require_increasing(std::span<const std::int64_t> e, const char* what) {
  if (!strictly_increasing(e)) throw InvalidInput(std::string(what) + " requires increasing enumeration");
}

// Membership bitmap over t in [0, tmax] for sums of coins, grown one coin at a time.
class Knapsack {
 public:
  explicit Knapsack(std::int64_t tmax) : reach_(static_cast<std::size_t>(std::max<std::int64_t>(tmax, -1) + 1), 0) {
    if (!reach_.empty()) reach_[0] = 1;
  }
  void add_coin(std::int64_t c) {
    const auto n = static_cast<std::int64_t>(reach_.size());
    for (std::int64_t t = c; t < n; ++t)
      if (reach_[t - c]) reach_[t] = 1;
  }
  bool at(std::int64_t t) const {
    return t >= 0 && t < static_cast<std::int64_t>(reach_.size()) && reach_[t];
  }
  std::int64_t size() const { return static_cast<std::int64_t>(reach_.size()); }

 private:
  std::vector<char> reach_;
};

// Collects m = base - t for reachable t >= t_min, m inside w.
class Collector {
 public:
  explicit Collector(const Window& w) : w_(w), mark_(w.hi >= w.lo ? w.hi - w.lo + 1 : 0, 0) {}
  void take(const Knapsack& ks, std::int64_t base, std::int64_t t_min) {
    std::int64_t t_lo = std::max(t_min, base - w_.hi);
    std::int64_t t_hi = std::min(ks.size() - 1, base - w_.lo);
    for (std::int64_t t = t_lo; t <= t_hi; ++t)
      if (ks.at(t)) mark_[base - t - w_.lo] = 1;
  }
  SetReport report() const {
    SetReport r;
    for (std::size_t i = 0; i < mark_.size(); ++i)
      if (mark_[i]) r.members.push_back(w_.lo + static_cast<std::int64_t>(i));
    return r;
  }

 private:
  Window w_;
  std::vector<char> mark_;
};

// Dense bitset over T in [0, n).
using Bits = std::vector<std::uint64_t>;

Bits bits_or(const Bits& a, const Bits& b) {
  Bits r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] |= b[i];
  return r;
}

Bits bits_shift_up(const Bits& a, std::int64_t sh, std::size_t nbits) {
  Bits r(a.size(), 0);
  if (sh >= static_cast<std::int64_t>(nbits)) return r;
  const std::size_t w = static_cast<std::size_t>(sh) / 64, b = static_cast<std::size_t>(sh) % 64;
  for (std::size_t i = a.size(); i-- > w;) {
    std::uint64_t v = a[i - w] << b;
    if (b && i - w > 0) v |= a[i - w - 1] >> (64 - b);
    r[i] = v;
  }
  if (nbits % 64) r.back() &= (std::uint64_t{1} << (nbits % 64)) - 1;
  return r;
}

bool bits_any(const Bits& a) {
  return std::any_of(a.begin(), a.end(), [](std::uint64_t x) { return x != 0; });
}

// Partial-sum dynamic program for strictly increasing enumerations.
// State after index i: partial sum s_i, flags, and T_{i-1} = sum_{i'<i} s_i' dk_i'.
// The running value is v_i = s_i k_i - T_{i-1}; the final member is v_J with s_J = 1.
SetReport schur_increasing(std::span<const std::int64_t> k, const Window& w, std::int64_t B) {
  const std::size_t J = k.size();
  SetReport out;
  const std::int64_t tmax = k[J - 1] - w.lo;  // v_J >= lo means T_{J-1} <= tmax
  if (tmax < 0 || J < 2) return out;
  const std::size_t nbits = static_cast<std::size_t>(tmax) + 1;
  const std::size_t words = (nbits + 63) / 64;

  // flags: 0 = nothing positive yet (s = 0), 1 = started with max partial sum 1, 2 = some s > 1
  std::map<std::pair<int, std::int64_t>, Bits> cur;
  Bits zero(words, 0);
  zero[0] = 1;
  cur[{0, 0}] = zero;  // s_0 = 0, T_0 = 0

  for (std::size_t i = 0; i < J; ++i) {
    const bool last = i + 1 == J;
    const std::int64_t dk = last ? 0 : k[i + 1] - k[i];
    const std::int64_t smax = last ? 1 : tmax / dk;
    std::map<std::pair<int, std::int64_t>, Bits> nxt;
    std::size_t states = 0;
    for (int cls = 0; cls <= 2; ++cls) {
      std::vector<std::pair<std::int64_t, const Bits*>> src;
      for (const auto& [key, bits] : cur)
        if (key.first == cls) src.emplace_back(key.second, &bits);
      if (src.empty()) continue;
      const std::int64_t s_lo = src.front().first, s_hi = src.back().first;
      Bits all(words, 0);
      for (auto& [s0, b] : src) all = bits_or(all, *b);
      for (std::int64_t s = std::max<std::int64_t>(cls == 0 ? 0 : 1, s_lo - B); s <= std::min(smax, s_hi + B); ++s) {
        if (last && s != 1) continue;
        const int ncls = cls == 2 || s > 1 ? 2 : (cls == 1 || s == 1 ? 1 : 0);
        Bits acc;
        if (s_lo >= s - B && s_hi <= s + B) {
          acc = all;
        } else {
          acc.assign(words, 0);
          for (auto& [s0, b] : src)
            if (s0 >= s - B && s0 <= s + B) acc = bits_or(acc, *b);
        }
        if (!last) acc = bits_shift_up(acc, s * dk, nbits);
        if (!bits_any(acc)) continue;
        auto [it, fresh] = nxt.try_emplace({ncls, s}, words, 0);
        it->second = bits_or(it->second, acc);
        states += fresh;
      }
    }
    if (states > kStateCap) throw InvalidInput("Schur search exceeds state cap");
    cur = std::move(nxt);
  }
  for (const auto& [key, bits] : cur) {
    if (key.first != 2 || key.second != 1) continue;
    for (std::size_t t = 0; t < nbits; ++t)
      if (bits[t / 64] >> (t % 64) & 1) {
        std::int64_t m = k[J - 1] - static_cast<std::int64_t>(t);
        if (contains(w, m)) out.members.push_back(m);
      }
  }
  sort_unique(out.members);
  return out;
}

template <class V>
bool in_window(const V& v, const BasicWindow<V>& w) {
  return contains(w, v);
}

// Literal search over sign vectors with |eps| <= B, tracking partial values.
template <class V>
std::vector<V> schur_literal(std::span<const V> k, const BasicWindow<V>& w, std::int64_t B) {
  struct Key {
    int cls;
    std::int64_t s;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, std::vector<V>> cur;
  V origin = k.front() - k.front();
  cur[{0, 0}] = {origin};
  const std::size_t J = k.size();
  for (std::size_t i = 0; i < J; ++i) {
    const bool last = i + 1 == J;
    std::map<Key, std::vector<V>> nxt;
    std::size_t total = 0;
    for (const auto& [key, vals] : cur) {
      for (std::int64_t eps = -B; eps <= B; ++eps) {
        std::int64_t s = key.s + eps;
        if (s < 0 || (key.cls > 0 && s == 0)) continue;
        // the remaining steps must be able to bring s back to 1
        if (std::abs(s - 1) > static_cast<std::int64_t>(J - 1 - i) * B) continue;
        if (last && s != 1) continue;
        int ncls = key.cls == 2 || s > 1 ? 2 : (key.cls == 1 || s == 1 ? 1 : 0);
        auto& dst = nxt[{ncls, s}];
        for (const auto& v : vals) dst.push_back(v + eps * k[i]);
      }
    }
    for (auto& [key, vals] : nxt) {
      sort_unique(vals);
      total += vals.size();
    }
    if (total > kStateCap) throw InvalidInput("Schur search exceeds state cap");
    cur = std::move(nxt);
  }
  std::vector<V> out;
  for (const auto& [key, vals] : cur)
    if (key.cls == 2 && key.s == 1)
      for (const auto& v : vals)
        if (in_window(v, w)) out.push_back(v);
  sort_unique(out);
  return out;
}

template <class V>
std::vector<V> s_members(std::span<const V> e, const Caps& caps) {
  if (e.size() > caps.s_set) throw InvalidInput("S-set enumeration exceeds cap of " + std::to_string(caps.s_set));
  require_distinct(e);
  std::vector<V> out;
  for (const auto& eps : admissible_sign_vectors(e.size(), 1)) {
    V m = e.front() - e.front();
    for (std::size_t i = 0; i < e.size(); ++i)
      if (eps[i]) m = m + eps[i] * e[i];
    out.push_back(m);
  }
  sort_unique(out);
  return out;
}

template <class V>
bool is_zero_v(const V& v) {
  if constexpr (std::is_same_v<V, Freq>)
    return v.is_zero();
  else
    return v == 0;
}

template <class V>
std::vector<V> riesz_members(std::span<const V> K, const Caps& caps) {
  std::vector<V> kp;
  for (const auto& g : K)
    if (!is_zero_v(g)) kp.push_back(g);
  sort_unique(kp);
  if (kp.size() > caps.riesz) throw InvalidInput("Riesz support exceeds cap of " + std::to_string(caps.riesz));
  std::vector<V> cur;
  if constexpr (std::is_same_v<V, Freq>)
    cur.push_back(Freq::zero(K.empty() ? 1 : K.front().dim()));
  else
    cur.push_back(0);
  for (const auto& g : kp) {
    std::vector<V> nxt;
    nxt.reserve(cur.size() * 3);
    for (const auto& v : cur) {
      nxt.push_back(v - g);
      nxt.push_back(v);
      nxt.push_back(v + g);
    }
    sort_unique(nxt);
    cur = std::move(nxt);
  }
  return cur;
}

template <class V>
std::vector<V> alt_members(std::span<const V> e, const Caps& caps) {
  if (e.size() > caps.alternating)
    throw InvalidInput("alternating-sum enumeration exceeds cap of " + std::to_string(caps.alternating));
  require_distinct(e);
  // chains ending at index i, keyed by length class: 1, 2, odd >= 3, even >= 4
  const std::size_t J = e.size();
  std::vector<std::vector<std::pair<int, V>>> ends(J);
  std::vector<V> out;
  for (std::size_t i = 0; i < J; ++i) {
    std::vector<std::pair<int, V>> here{{1, e[i]}};
    for (std::size_t p = 0; p < i; ++p)
      for (const auto& [cls, v] : ends[p]) {
        int ncls = cls == 1 ? 2 : cls == 2 ? 3 : cls == 3 ? 4 : 3;
        here.emplace_back(ncls, ncls % 2 == 0 ? v - e[i] : v + e[i]);
      }
    sort_unique(here);
    if (here.size() > kStateCap) throw InvalidInput("alternating-sum enumeration exceeds state cap");
    for (const auto& [cls, v] : here)
      if (cls == 3) out.push_back(v);
    ends[i] = std::move(here);
  }
  sort_unique(out);
  return out;
}

void check_index(std::size_t j, std::size_t lo, std::size_t hi) {
  if (j < lo || j > hi)
    throw InvalidInput("index " + std::to_string(j) + " out of range [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
}

}  // namespace

bool strictly_increasing(std::span<const std::int64_t> e) {
  for (std::size_t i = 0; i + 1 < e.size(); ++i)
    if (e[i + 1] <= e[i]) return false;
  return true;
}

bool admissible_signs(std::span<const std::int64_t> eps) {
  std::int64_t s = 0;
  bool started = false, big = false;
  for (auto x : eps) {
    s += x;
    if (s < 0 || (started && s <= 0)) return false;
    started = started || s > 0;
    big = big || s > 1;
  }
  return s == 1 && big;
}

std::vector<std::vector<std::int64_t>> admissible_sign_vectors(std::size_t J, std::int64_t bound) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> eps(J, 0);
  auto rec = [&](auto&& self, std::size_t i, std::int64_t s, bool started, bool big) -> void {
    if (i == J) {
      if (s == 1 && big) out.push_back(eps);
      return;
    }
    const auto left = static_cast<std::int64_t>(J - i - 1);
    for (std::int64_t x = -bound; x <= bound; ++x) {
      std::int64_t t = s + x;
      if (t < 0 || (started && t == 0) || std::abs(t - 1) > left * bound) continue;
      eps[i] = x;
      self(self, i + 1, t, started || t > 0, big || t > 1);
      if (out.size() > kStateCap) throw InvalidInput("sign-vector enumeration exceeds state cap");
    }
    eps[i] = 0;
  };
  if (J > 0) rec(rec, 0, 0, false, false);
  return out;
}

std::int64_t exact_coeff_bound(std::span<const std::int64_t> e, const Window& w) {
  if (e.size() < 2 || !strictly_increasing(e)) return 1;
  std::int64_t dmin = INT64_MAX;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) dmin = std::min(dmin, e[i + 1] - e[i]);
  return std::max<std::int64_t>(0, (e.back() - w.lo) / dmin) + 1;
}

SetReport schur_set(std::span<const std::int64_t> e, const Window& w, std::int64_t coeff_bound) {
  if (coeff_bound < 1) throw InvalidInput("coefficient bound must be positive");
  if (w.lo > w.hi) throw InvalidInput("window lo exceeds hi");
  SetReport r;
  if (e.empty()) return r;
  require_distinct(e);
  if (strictly_increasing(e)) {
    r = schur_increasing(e, w, coeff_bound);
    r.exact = coeff_bound >= exact_coeff_bound(e, w);
  } else {
    r.members = schur_literal<std::int64_t>(e, w, coeff_bound);
    r.exact = false;
  }
  return r;
}

FreqSetReport schur_set(std::span<const Freq> e, const BoxWindow& w, std::int64_t coeff_bound) {
  if (coeff_bound < 1) throw InvalidInput("coefficient bound must be positive");
  FreqSetReport r;
  if (e.empty()) return r;
  if (e.front().dim() == 1) {
    auto k = to_ints(e);
    auto ir = schur_set(k, Window{w.lo[0], w.hi[0]}, coeff_bound);
    r.members = to_freqs(ir.members);
    r.exact = ir.exact;
    return r;
  }
  require_distinct(e);
  r.members = schur_literal<Freq>(e, w, coeff_bound);
  r.exact = false;
  return r;
}

SetReport schur_set_via_gaps(std::span<const std::int64_t> e, const Window& w) {
  require_increasing(e, "gap representation");
  if (w.lo > w.hi) throw InvalidInput("window lo exceeds hi");
  const std::size_t J = e.size();
  if (J < 2) return {};
  Collector col(w);
  Knapsack ks(e[J - 2] - w.lo);
  for (std::size_t i = J - 1; i-- > 0;) {  // 0-based i is 1-based index i+1
    ks.add_coin(e[i + 1] - e[i]);
    col.take(ks, e[i], 1);
  }
  return col.report();
}

SetReport s_set(std::span<const std::int64_t> e, const Caps& caps) {
  SetReport r;
  if (e.empty()) return r;
  r.members = s_members<std::int64_t>(e, caps);
  return r;
}

FreqSetReport s_set(std::span<const Freq> e, const Caps& caps) {
  FreqSetReport r;
  if (e.empty()) return r;
  r.members = s_members<Freq>(e, caps);
  return r;
}

SetReport riesz_support(std::span<const std::int64_t> K, const Caps& caps) {
  return {riesz_members<std::int64_t>(K, caps), true};
}

FreqSetReport riesz_support(std::span<const Freq> K, const Caps& caps) {
  return {riesz_members<Freq>(K, caps), true};
}

SetReport alt_sum_set(std::span<const std::int64_t> e, const Caps& caps) {
  return {alt_members<std::int64_t>(e, caps), true};
}

FreqSetReport alt_sum_set(std::span<const Freq> e, const Caps& caps) {
  return {alt_members<Freq>(e, caps), true};
}

SetReport g_set(std::size_t j, std::span<const std::int64_t> e, const Window& w) {
  require_increasing(e, "G set");
  const std::size_t J = e.size();
  check_index(j, 1, J >= 2 ? J - 1 : 0);
  Collector col(w);
  Knapsack ks(e[J - 2] - w.lo);
  const std::size_t i_max = std::min(j + 1, J - 1);
  for (std::size_t i = J - 1; i >= 1; --i) {  // 1-based index i, coins dk_i..dk_{J-1}
    ks.add_coin(e[i] - e[i - 1]);
    if (i <= i_max) col.take(ks, e[i - 1], i == j + 1 ? 1 : 0);
  }
  return col.report();
}

SetReport g_set_pre_election(std::size_t j, std::span<const std::int64_t> e, const Window& w) {
  require_increasing(e, "G set");
  const std::size_t J = e.size();
  check_index(j, 1, J >= 2 ? J - 1 : 0);
  Collector col(w);
  const std::size_t i_max = std::min(j + 1, J - 1);
  {
    Knapsack ks(e[J - 2] - w.lo);
    for (std::size_t i = J - 1; i >= 2; --i) {
      ks.add_coin(e[i] - e[i - 1]);
      if (i <= i_max) col.take(ks, e[i - 1], i == j + 1 ? 1 : 0);
    }
  }
  // i = 1, n_1 = 0, block [j+1, b] of ones-or-more, n_2..n_j free
  Knapsack ks(e[0] - w.lo);
  for (std::size_t jp = 2; jp <= j; ++jp) ks.add_coin(e[jp] - e[jp - 1]);
  col.take(ks, e[0], 0);
  for (std::size_t b = j + 1; b <= J - 1; ++b) {
    if (b >= 2) ks.add_coin(e[b] - e[b - 1]);
    col.take(ks, e[0] - (e[b] - e[j]), 0);
  }
  return col.report();
}

SetReport d_set(std::size_t j, std::span<const std::int64_t> e, const Window& w) {
  require_increasing(e, "D set");
  const std::size_t J = e.size();
  check_index(j, 1, J);
  if (j == J) return {};
  // m = -(sum of n dk); nonzero n at indices <= j form a block [a, j], or none
  Collector col(w);
  Knapsack ks(-w.lo);
  for (std::size_t a = J - 1; a >= 1; --a) {
    ks.add_coin(e[a] - e[a - 1]);
    if (a == j + 1) col.take(ks, 0, 1);
    if (a <= j) col.take(ks, -(e[j] - e[a - 1]), 0);
  }
  return col.report();
}

bool preorder_less(std::size_t j, std::int64_t m, std::int64_t n, std::span<const std::int64_t> e,
                   const Window& w) {
  const std::int64_t diff = m - n;
  if (!contains(w, diff)) throw InvalidInput("undecidable within window: m − n = " + std::to_string(diff));
  return !d_set(j, e, Window{diff, diff}).members.empty();
}

InclusionReport check_inclusion_s_in_schur_riesz(std::span<const std::int64_t> e, const Window& w,
                                                 const Caps& caps) {
  InclusionReport r;
  auto s = s_set(e, caps).members;
  std::vector<std::int64_t> inside;
  for (auto m : s)
    if (contains(w, m)) inside.push_back(m);
  if (inside.empty()) return r;
  auto schur = strictly_increasing(e) ? schur_set_via_gaps(e, w) : schur_set(e, w, 2);
  auto riesz = riesz_support(e, caps);
  for (auto m : inside)
    if (!std::binary_search(schur.members.begin(), schur.members.end(), m) ||
        !std::binary_search(riesz.members.begin(), riesz.members.end(), m))
      r.witnesses.push_back(m);
  r.holds = r.witnesses.empty();
  return r;
}

}  // namespace paleylab
