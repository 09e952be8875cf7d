#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "paleylab/combinatorics.hpp"
#include "paleylab/cone.hpp"
#include "paleylab/error.hpp"

using namespace paleylab;
using V = std::vector<std::int64_t>;

namespace {

std::set<std::int64_t> as_set(const SetReport& r) { return {r.members.begin(), r.members.end()}; }

bool sorted_unique(const V& v) {
  return std::adjacent_find(v.begin(), v.end(), [](auto a, auto b) { return a >= b; }) == v.end();
}

}  // namespace

TEST_CASE("strong lacunarity on the integers") {
  CHECK(is_strongly_lacunary(V{1, 3, 7, 15}));
  CHECK_FALSE(is_strongly_lacunary(V{1, 2, 4}));
  CHECK(is_strongly_lacunary(V{5}));
  CHECK(is_strongly_lacunary(V{}));
}

TEST_CASE("ordered lacunarity") {
  auto hl = ConeOrder::half_line();
  CHECK(is_strongly_lacunary_ordered(std::vector<Freq>{1, 3}, hl));
  CHECK_FALSE(is_strongly_lacunary_ordered(std::vector<Freq>{1, 2}, hl));
  auto lex = ConeOrder::lex_last(2);
  CHECK(is_strongly_lacunary_ordered(std::vector<Freq>{Freq{5, 1}, Freq{0, 3}}, lex));
  CHECK(lex.in_strict_cone(Freq{-10, 1}));

  // both directions of the x-axis make P meet -P
  auto bad = ConeOrder::generated({Freq{1, 0}, Freq{-1, 0}}, 8);
  CHECK_FALSE(bad.axiom_holds());
  CHECK_THROWS_AS(is_strongly_lacunary_ordered(std::vector<Freq>{Freq{1, 0}}, bad), InvalidInput);

  auto quad = ConeOrder::generated({Freq{1, 0}, Freq{0, 1}}, 16);
  CHECK(quad.axiom_holds());
  CHECK(quad.in_strict_cone(Freq{3, 4}));
  CHECK_FALSE(quad.in_strict_cone(Freq{-1, 4}));
  CHECK(quad.sign(Freq{-1, 4}) == 2);
  CHECK(quad.sign(Freq{-1, -4}) == -1);
}

TEST_CASE("extreme lacunarity") {
  auto hl = ConeOrder::half_line();
  std::vector<Freq> e{1, 3, 7};
  auto r2 = is_extremely_lacunary(e, hl, 2);
  CHECK(r2.holds);
  CHECK_FALSE(r2.exact);  // fails at m = 3
  auto r3 = is_extremely_lacunary(e, hl, 3);
  CHECK_FALSE(r3.holds);
  CHECK(r3.exact);
  CHECK(is_extremely_lacunary(std::vector<Freq>{1, 10, 1000}, hl, 5).holds);

  for (std::size_t J = 1; J <= 6; ++J) {
    std::vector<Freq> units;
    for (std::size_t a = 0; a < J; ++a) units.push_back(Freq::unit(J, a));
    auto r = is_extremely_lacunary(units, ConeOrder::lex_last(J), 1);
    CHECK(r.holds);
    CHECK(r.exact);
  }
  CHECK_THROWS_AS(is_extremely_lacunary(e, ConeOrder::generated({Freq{1}}, 4), 2), InvalidInput);
}

TEST_CASE("Schur set by sign vectors, worked examples") {
  auto r = schur_set(V{1, 3}, Window{-10, 0}, 16);
  CHECK(r.members == V{-9, -7, -5, -3, -1});
  CHECK(r.exact);
  auto r3 = schur_set(V{1, 3, 7}, Window{-5, 0}, 16);
  CHECK(r3.members == V{-5, -3, -1});
  CHECK(r3.exact);
  CHECK(schur_set(V{4}, Window{-100, 100}, 50).members.empty());
  auto empty = schur_set(V{}, Window{-5, 5}, 3);
  CHECK(empty.members.empty());
  CHECK(empty.exact);
  // a bound too small for the window is flagged
  CHECK_FALSE(schur_set(V{1, 3}, Window{-10, 0}, 2).exact);
  // non-increasing enumerations are bounded searches
  CHECK_FALSE(schur_set(V{3, 1, 7}, Window{-10, 10}, 3).exact);
}

TEST_CASE("Schur set by sign vectors agrees with brute force") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 60; ++t) {
    std::size_t J = 1 + rng() % 4;
    V k;
    std::set<std::int64_t> used;
    while (k.size() < J) {
      std::int64_t x = static_cast<std::int64_t>(rng() % 21) - 10;
      if (used.insert(x).second) k.push_back(x);
    }
    std::int64_t B = 1 + static_cast<std::int64_t>(rng() % 3);
    auto got = schur_set(k, Window{-30, 30}, B);
    CHECK(as_set(got) == oracle::schur_by_eps(k, -30, 30, B));
    CHECK(sorted_unique(got.members));
  }
}

TEST_CASE("Schur set by gaps") {
  CHECK(schur_set_via_gaps(V{1, 3}, Window{-10, 0}).members == V{-9, -7, -5, -3, -1});
  CHECK(schur_set_via_gaps(V{1, 3, 7}, Window{-5, 0}).members == V{-5, -3, -1});
  CHECK_THROWS_AS(schur_set_via_gaps(V{3, 1, 7}, Window{-5, 0}), InvalidInput);
  CHECK(schur_set_via_gaps(V{}, Window{-5, 0}).members.empty());

  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    V k = oracle::random_lacunary(rng, 1 + rng() % 4, 4, 3);
    std::int64_t lo = -3 * k.back();
    auto want = oracle::gap_forms(k, lo, k.back(), 1, k.size() - 1,
                                  [](std::size_t, const V& n) { return std::any_of(n.begin(), n.end(), [](auto x) { return x != 0; }); });
    CHECK(as_set(schur_set_via_gaps(k, Window{lo, k.back()})) == want);
  }
}

TEST_CASE("both Schur routes coincide on increasing enumerations") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    std::size_t J = 1 + rng() % 6;
    V k{static_cast<std::int64_t>(rng() % 5) - 2};
    while (k.size() < J) k.push_back(k.back() + 1 + static_cast<std::int64_t>(rng() % 6));
    Window w{k.back() - 150, k.back()};
    auto eps = schur_set(k, w, exact_coeff_bound(k, w));
    CHECK(eps.exact);
    CHECK(eps.members == schur_set_via_gaps(k, w).members);
  }
}

TEST_CASE("S sets") {
  CHECK(s_set(V{1, 3, 7}).members == V{-3});
  CHECK(s_set(V{1, 3}).members.empty());
  CHECK(s_set(V{3, 1, 7}).members == V{-3});
  CHECK(s_set(V{}).members.empty());
  Caps small;
  small.s_set = 3;
  CHECK_THROWS_AS(s_set(V{1, 3, 7, 15}, small), InvalidInput);

  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    V k = oracle::random_lacunary(rng, 1 + rng() % 6, 5, 4);
    std::shuffle(k.begin(), k.end(), rng);
    CHECK(as_set(s_set(k)) == oracle::schur_by_eps(k, INT64_MIN / 4, INT64_MAX / 4, 1));
  }
}

TEST_CASE("admissible sign vectors") {
  auto v = admissible_sign_vectors(3, 1);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == V{1, 1, -1});
  CHECK(admissible_sign_vectors(2, 1).empty());
  for (const auto& eps : admissible_sign_vectors(6, 2)) CHECK(oracle::four_conditions(eps));
  CHECK(admissible_signs(V{2, -1}));
  CHECK_FALSE(admissible_signs(V{1, -1, 1}));  // partial sum returns to 0
}

TEST_CASE("Riesz support") {
  CHECK(riesz_support(V{1, 3}).members == V{-4, -3, -2, -1, 0, 1, 2, 3, 4});
  CHECK(riesz_support(V{5}).members == V{-5, 0, 5});
  CHECK(riesz_support(V{0, 5}).members == V{-5, 0, 5});
  CHECK(riesz_support(V{}).members == V{0});
  auto two = riesz_support(std::vector<Freq>{Freq{1, 0}, Freq{0, 1}});
  CHECK(two.members.size() == 9);
  CHECK(std::is_sorted(two.members.begin(), two.members.end()));
}

TEST_CASE("alternating sums") {
  CHECK(alt_sum_set(V{1, 3, 7}).members == V{5});
  CHECK(alt_sum_set(V{1, 3, 7, 15}).members == V{5, 9, 11, 13});
  CHECK(alt_sum_set(V{1, 3}).members.empty());
  // five-term sums appear once J >= 5
  CHECK(std::ranges::count(alt_sum_set(V{1, 2, 4, 8, 16}).members, 1 - 2 + 4 - 8 + 16) == 1);
}

TEST_CASE("G sets") {
  V k{1, 3, 7};
  CHECK(g_set(1, k, Window{-9, 3}).members == V{-9, -7, -5, -3, -1, 1});
  auto g2 = g_set(2, k, Window{-9, 3});
  auto want2 = oracle::gap_forms(k, -9, 3, 1, 2, [](std::size_t, const V&) { return true; });
  CHECK(as_set(g2) == want2);
  CHECK(std::ranges::count(g2.members, 3) == 1);
  CHECK_THROWS_AS(g_set(3, k, Window{-9, 3}), InvalidInput);
  CHECK_THROWS_AS(g_set(0, k, Window{-9, 3}), InvalidInput);

  std::mt19937_64 rng(23);
  for (int t = 0; t < 40; ++t) {
    V e = oracle::random_lacunary(rng, 2 + rng() % 4, 4, 3);
    std::size_t J = e.size();
    Window w{-2 * e.back(), e.back()};
    for (std::size_t j = 1; j < J; ++j) {
      auto want = oracle::gap_forms(e, w.lo, w.hi, 1, std::min(j + 1, J - 1), [j](std::size_t i, const V& n) {
        return i != j + 1 || std::any_of(n.begin(), n.end(), [](auto x) { return x != 0; });
      });
      auto got = g_set(j, e, w);
      CHECK(as_set(got) == want);
      CHECK(std::ranges::count(got.members, e[j - 1]) == 1);  // k_j in G_{j+1}
    }
  }
}

TEST_CASE("pre-election G is contained in the elected G") {
  std::mt19937_64 rng(29);
  int equal = 0, total = 0;
  for (int t = 0; t < 60; ++t) {
    V e = oracle::random_lacunary(rng, 2 + rng() % 5, 4, 3);
    Window w{-3 * e.back(), e.back()};
    for (std::size_t j = 1; j < e.size(); ++j) {
      auto pre = as_set(g_set_pre_election(j, e, w));
      auto ele = as_set(g_set(j, e, w));
      CHECK(std::includes(ele.begin(), ele.end(), pre.begin(), pre.end()));
      for (std::size_t i = 1; i <= j; ++i) CHECK(pre.contains(e[i - 1]));
      equal += pre == ele;
      ++total;
    }
  }
  MESSAGE("pre-election equals elected on " << equal << " of " << total << " (j, e) pairs");
}

TEST_CASE("D sets") {
  V k{1, 3, 7};
  CHECK(d_set(3, k, Window{-20, 20}).members.empty());
  // nonzero indices up to j form a block ending at j, so -2 (n_1 = 1 alone) is excluded
  CHECK(d_set(2, k, Window{-9, -1}).members == V{-8, -6, -4});
  CHECK(d_set(1, k, Window{-9, -1}).members == V{-8, -6, -4, -2});
  CHECK_THROWS_AS(d_set(4, k, Window{-9, -1}), InvalidInput);

  std::mt19937_64 rng(31);
  for (int t = 0; t < 40; ++t) {
    V e = oracle::random_lacunary(rng, 2 + rng() % 5, 4, 3);
    std::size_t J = e.size();
    Window w{-3 * e.back(), -1};
    std::vector<std::set<std::int64_t>> D(J + 1);
    for (std::size_t j = 1; j <= J; ++j) D[j] = as_set(d_set(j, e, w));
    for (std::size_t j = 1; j < J; ++j) {
      // D_j = G_{j+1} - k_{j+1}
      auto g = g_set(j, e, Window{w.lo + e[j], w.hi + e[j]});
      std::set<std::int64_t> shifted;
      for (auto m : g.members) shifted.insert(m - e[j]);
      CHECK(D[j] == shifted);
      CHECK(std::includes(D[j].begin(), D[j].end(), D[j + 1].begin(), D[j + 1].end()));
      CHECK(D[j].contains(e[j - 1] - e[j]));
      // additive closure inside the window
      for (auto a : D[j])
        for (auto b : D[j])
          if (a + b >= w.lo) CHECK(D[j].contains(a + b));
    }
  }
}

TEST_CASE("Paley preorders") {
  V k{1, 3, 7};
  Window w{-50, 50};
  CHECK(preorder_less(1, 1, 3, k, w));
  CHECK(preorder_less(2, 3, 7, k, w));
  CHECK_FALSE(preorder_less(2, 0, 0, k, w));
  CHECK_FALSE(preorder_less(1, 3, 1, k, w));
  CHECK_THROWS_AS(preorder_less(1, -100, 0, k, w), InvalidInput);
  for (std::int64_t m = -20; m <= 20; ++m)
    for (std::int64_t n = -20; n <= 20; ++n)
      if (preorder_less(2, m, n, k, w)) CHECK(preorder_less(1, m, n, k, w));
}

TEST_CASE("S inside Schur and Riesz") {
  CHECK(check_inclusion_s_in_schur_riesz(V{1, 3, 7}, Window{-20, 20}).holds);
  CHECK(check_inclusion_s_in_schur_riesz(V{1, 3}, Window{-10, 10}).holds);
  CHECK(check_inclusion_s_in_schur_riesz(V{2, 5, 11, 23}, Window{-40, 40}).holds);
  auto r = check_inclusion_s_in_schur_riesz(V{3, 1, 7, 2}, Window{-40, 40});
  CHECK(r.holds);
  CHECK(r.witnesses.empty());
}

TEST_CASE("Schur sets of lacunary enumerations are negative") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 30; ++t) {
    V e = oracle::random_lacunary(rng, 1 + rng() % 8, 50, 1000);
    auto r = schur_set_via_gaps(e, Window{-e.back(), e.back()});
    CHECK(r.exact);
    CHECK(std::all_of(r.members.begin(), r.members.end(), [](auto m) { return m < 0; }));
  }
}

TEST_CASE("Riesz sets of lacunary K are comparable with 0") {
  auto quad = ConeOrder::generated({Freq{1, 0}, Freq{0, 1}}, 32);
  std::vector<Freq> K{Freq{1, 0}, Freq{3, 1}, Freq{7, 3}};
  REQUIRE(is_strongly_lacunary_ordered(K, quad));
  for (const auto& g : riesz_support(K).members) CHECK(quad.sign(g) != 2);
  // without lacunarity an incomparable element shows up
  std::vector<Freq> flat{Freq{1, 0}, Freq{0, 1}};
  auto r = riesz_support(flat).members;
  CHECK(std::ranges::any_of(r, [&](const Freq& g) { return quad.sign(g) == 2; }));
}

TEST_CASE("set outputs do not depend on input order") {
  V a{1, 3, 7, 15}, b{15, 1, 7, 3};
  CHECK(riesz_support(a).members == riesz_support(b).members);
  auto sa = s_set(V{2, 9, 20});
  CHECK(sorted_unique(sa.members));
}
