#include <cmath>
#include <numbers>

#include "doctest.h"
#include "paleylab/error.hpp"
#include "paleylab/inequality_lab.hpp"

using namespace paleylab;

namespace {

Instance circle_instance(std::vector<Freq> k, std::int64_t M, Selector sel, std::uint64_t seed = 1) {
  Instance inst;
  inst.spec = GridSpec::circle(default_grid_size(M), M);
  inst.k = std::move(k);
  inst.forbidden = sel;
  inst.seed = seed;
  return inst;
}

double max_forbidden_coeff(const Instance& inst, const GridFunction& f) {
  double worst = 0;
  for (const auto& n : forbidden_set(inst).members) worst = std::max(worst, std::abs(coeff(f, n)));
  return worst;
}

}  // namespace

TEST_CASE("forbidden selectors") {
  auto inst = circle_instance({1, 3}, 10, Selector::Schur);
  CHECK(forbidden_set(inst).members == std::vector<Freq>{-9, -7, -5, -3, -1});
  auto f = make_instance(inst);
  auto s = analyze(f);
  for (std::int64_t n = -10; n <= 10; ++n) {
    bool neg_odd = n < 0 && n % 2 != 0;
    if (neg_odd) CHECK(std::abs(s.at(n)) <= 1e-14 * norm_l2(f));
    else CHECK(std::abs(s.at(n)) > 0);
  }

  inst.forbidden = Selector::NegativeHalfline;
  f = make_instance(inst);
  for (std::int64_t n = -10; n < 0; ++n) CHECK(std::abs(coeff(f, n)) <= 1e-14 * norm_l2(f));

  inst.forbidden = Selector::OutsideKPositive;
  CHECK(forbidden_set(inst).members.size() == 8);

  auto three = circle_instance({1, 3, 7}, 10, Selector::S);
  CHECK(forbidden_set(three).members == std::vector<Freq>{-3});
  three.forbidden = Selector::Alternating;
  CHECK(forbidden_set(three).members == std::vector<Freq>{5});

  GridSpec two{{12, 10}, {4, 3}};
  Instance cone{two, {Freq{1, 1}}, Selector::NegativeHalfline, {}, 3, {}};
  for (const auto& n : forbidden_set(cone).members) CHECK((n[1] < 0 || (n[1] == 0 && n[0] < 0)));
}

TEST_CASE("instances are validated") {
  auto inst = circle_instance({1, 3}, 10, Selector::Custom);
  inst.custom = {3, -2};
  CHECK_THROWS_AS(validate(inst), InvalidInput);
  inst.custom = {-2};
  CHECK_NOTHROW(validate(inst));

  auto unordered = circle_instance({3, 1, 7}, 10, Selector::Schur);
  try {
    validate(unordered);
    FAIL("expected rejection");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("cannot certify hypothesis") != std::string::npos);
  }
  CHECK_THROWS_AS(validate(circle_instance({1, 3, 70}, 10, Selector::S)), InvalidInput);

  auto mode = circle_instance({1, 3}, 10, Selector::S);
  mode.mode = ReplayMode::New;
  CHECK_THROWS_AS(validate(mode), InvalidInput);
}

TEST_CASE("seeded instances") {
  auto a = circle_instance({1, 3, 7}, 12, Selector::Schur, 42);
  auto b = a;
  CHECK(make_spectrum(a).values() == make_spectrum(b).values());
  b.seed = 43;
  CHECK(make_spectrum(a).values() != make_spectrum(b).values());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = circle_instance({2, 5, 11}, 15, Selector::Schur, seed);
    auto f = make_instance(inst);
    CHECK(max_forbidden_coeff(inst, f) <= 1e-14 * norm_l2(f));
    for (const auto& k : inst.k) CHECK(std::abs(coeff(f, k)) > 0);
  }
}

TEST_CASE("ratio checks") {
  auto spec = GridSpec::circle(1024, 5);
  auto e3 = GridFunction::character(spec, 3);
  CHECK(check_ratio(e3, std::vector<Freq>{3}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(check_ratio(e3, std::vector<Freq>{1, 4}) < 1e-14);
  auto f = GridFunction::character(spec, 1);
  for (std::size_t i = 0; i < spec.size(); ++i) f.samples[i] += e3.samples[i];
  CHECK(std::abs(check_ratio(f, std::vector<Freq>{1, 3}) - std::numbers::pi * std::sqrt(2.0) / 4) < 1e-3);
  CHECK_THROWS_AS(check_ratio(GridFunction::zeros(spec), std::vector<Freq>{1}), InvalidInput);

  auto inst = circle_instance({1, 3, 7}, 12, Selector::Schur, 5);
  auto g = make_instance(inst);
  double r = check_ratio(g, inst.k);
  for (cplx c : {cplx(2.5, -1.0), cplx(-1e-3, 0.0), cplx(0.0, 7.0)})
    CHECK(std::abs(check_ratio(scale(g, c), inst.k) - r) <= 1e-12 * r);
}

TEST_CASE("campaign over Schur and half-line templates") {
  Template t5;
  t5.name = "schur";
  t5.forbidden = Selector::Schur;
  t5.j_max = 6;
  Template t1;
  t1.name = "half-line";
  t1.forbidden = Selector::NegativeHalfline;
  t1.j_max = 5;
  CampaignConfig cfg{{t5, t1}, 40, 7, 1};
  auto rep = run_campaign(cfg);
  CHECK(rep.instances == 40);
  CHECK(rep.failed == 0);
  CHECK(rep.counterexamples.empty());
  CHECK(rep.max_ratio <= std::sqrt(2.0) + 1e-6);
  CHECK(rep.above_ceiling == 0);
  REQUIRE(rep.per_template.size() == 2);
  CHECK(rep.per_template[0].instances == 20);

  cfg.workers = 3;
  auto again = run_campaign(cfg);
  CHECK(again.max_ratio == rep.max_ratio);
  CHECK(again.passed == rep.passed);
  CHECK(again.per_template[1].max_ratio == rep.per_template[1].max_ratio);
}

TEST_CASE("campaign with replays") {
  Template two;
  two.name = "replay-J2";
  two.forbidden = Selector::Schur;
  two.mode = ReplayMode::New;
  two.j_min = 1;
  two.j_max = 2;
  Template comp;
  comp.name = "complementary";
  comp.forbidden = Selector::OutsideKPositive;
  comp.mode = ReplayMode::Complementary;
  comp.j_max = 5;
  auto rep = run_campaign({{two, comp}, 16, 3, 2});
  CHECK(rep.failed == 0);
  CHECK(rep.per_template[1].max_ratio <= std::sqrt(std::numbers::e) + 1e-6);
  CHECK(rep.worst_residual <= 1e-9);
}

TEST_CASE("failure dumps replay the failure") {
  Template deep;
  deep.name = "replay-J4";
  deep.forbidden = Selector::Schur;
  deep.mode = ReplayMode::New;
  deep.j_min = deep.j_max = 4;
  auto rep = run_campaign({{deep}, 3, 11, 1});
  REQUIRE(rep.failed == 3);
  REQUIRE(rep.counterexamples.size() == 3);
  for (const auto& c : rep.counterexamples) {
    auto trace = replay_instance(c.instance, make_instance(c.instance));
    CHECK(trace.failures == c.failures);
    CHECK(check_ratio(make_instance(c.instance), c.instance.k) == c.ratio);
  }
}

TEST_CASE("optimizer on a single frequency") {
  auto inst = circle_instance({3}, 6, Selector::Custom);
  OptimizerConfig cfg;
  cfg.restarts = 2;
  cfg.iterations = 300;
  auto res = optimize_ratio(inst, cfg);
  CHECK(res.ratio >= 1 - 1e-3);
  CHECK(res.ratio <= 1 + 1e-9);
  CHECK(std::abs(norm_l1(res.best) - 1.0) < 1e-12);
  for (std::size_t i = 1; i < res.log.size(); ++i)
    if (res.log[i].restart == res.log[i - 1].restart) CHECK(res.log[i].ratio >= res.log[i - 1].ratio);
  auto again = optimize_ratio(inst, cfg);
  CHECK(again.ratio == res.ratio);
  cfg.workers = 2;
  CHECK(optimize_ratio(inst, cfg).ratio == res.ratio);
}

TEST_CASE("optimizer respects the constraints and ceilings") {
  auto inst = circle_instance({1, 3, 7}, 10, Selector::Schur, 9);
  inst.spec = GridSpec::circle(4 * default_grid_size(10), 10);
  OptimizerConfig cfg;
  cfg.restarts = 2;
  cfg.iterations = 150;
  auto schur = optimize_ratio(inst, cfg);
  CHECK(schur.ratio <= std::sqrt(2.0) + 1e-6);
  for (const auto& n : forbidden_set(inst).members) CHECK(schur.spectrum.at(n) == cplx(0.0));
  CHECK(check_ratio(schur.best, inst.k) == doctest::Approx(schur.ratio).epsilon(1e-12));

  inst.forbidden = Selector::S;  // S inside Schur: fewer constraints
  auto s = optimize_ratio(inst, cfg);
  MESSAGE("optimized ratios: Schur-forbidden " << schur.ratio << ", S-forbidden " << s.ratio);
  CHECK(schur.ratio <= s.ratio + 1e-3);
}
