#include "paleylab/inequality_lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "paleylab/combinatorics.hpp"
#include "paleylab/cone.hpp"
#include "paleylab/error.hpp"
#include "paleylab/parallel.hpp"

namespace paleylab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Freq> window_members(const GridSpec& spec) {
  Spectrum s(spec.half);
  std::vector<Freq> out;
  for (std::size_t i = 0; i < s.size(); ++i) out.push_back(s.freq_at(i));
  return out;
}

template <class V>
std::vector<Freq> clip(const std::vector<V>& members, const GridSpec& spec) {
  std::vector<Freq> out;
  for (const auto& m : members)
    if (spec.in_window(Freq(m))) out.push_back(Freq(m));
  std::ranges::sort(out);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

cplx gauss(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double re = g(rng);
  double im = g(rng);
  return {re, im};
}

}  // namespace

const char* to_string(Selector s) {
  switch (s) {
    case Selector::Schur: return "schur";
    case Selector::S: return "s";
    case Selector::Alternating: return "alternating";
    case Selector::NegativeHalfline: return "negative-halfline";
    case Selector::OutsideKPositive: return "outside-K-positive";
    case Selector::Custom: return "custom";
  }
  return "custom";
}

Selector parse_selector(const std::string& s) {
  if (s == "schur") return Selector::Schur;
  if (s == "s") return Selector::S;
  if (s == "alternating" || s == "alt") return Selector::Alternating;
  if (s == "negative-halfline") return Selector::NegativeHalfline;
  if (s == "outside-K-positive" || s == "outside-k-positive") return Selector::OutsideKPositive;
  if (s == "custom") return Selector::Custom;
  throw InvalidInput("unknown forbidden-set selector '" + s + "'");
}

double theorem_constant(Selector s) {
  switch (s) {
    case Selector::S: return 4.0;
    case Selector::Custom: return kInf;
    default: return 2.0;
  }
}

double ceiling_constant(Selector s) {
  switch (s) {
    case Selector::Schur:
    case Selector::NegativeHalfline: return std::sqrt(2.0);
    case Selector::OutsideKPositive: return std::sqrt(std::numbers::e);
    case Selector::S: return 2.0 * std::sqrt(2.0);
    case Selector::Alternating: return 2.0;
    case Selector::Custom: return kInf;
  }
  return kInf;
}

FreqSetReport forbidden_set(const Instance& inst) {
  const auto& spec = inst.spec;
  const std::size_t d = spec.dim();
  FreqSetReport r;
  switch (inst.forbidden) {
    case Selector::Schur: {
      if (d == 1) {
        auto k = to_ints(inst.k);
        Window w{-spec.half[0], spec.half[0]};
        if (strictly_increasing(k)) {
          r.members = to_freqs(schur_set_via_gaps(k, w).members);
        } else {
          auto rep = schur_set(k, w, 4);
          r.members = to_freqs(rep.members);
          r.exact = rep.exact;
        }
      } else {
        BoxWindow w{Freq(std::vector<std::int64_t>(spec.half.size())), Freq(spec.half)};
        for (std::size_t a = 0; a < d; ++a) w.lo[a] = -spec.half[a];
        auto rep = schur_set(inst.k, w, 2);
        r.members = rep.members;
        r.exact = rep.exact;
      }
      break;
    }
    case Selector::S: {
      auto rep = s_set(inst.k);
      r.members = clip(rep.members, spec);
      r.exact = rep.exact;
      break;
    }
    case Selector::Alternating: {
      auto rep = alt_sum_set(inst.k);
      r.members = clip(rep.members, spec);
      r.exact = rep.exact;
      break;
    }
    case Selector::NegativeHalfline: {
      auto order = d == 1 ? ConeOrder::half_line() : ConeOrder::lex_last(d);
      for (const auto& n : window_members(spec))
        if (order.sign(n) == -1) r.members.push_back(n);
      break;
    }
    case Selector::OutsideKPositive: {
      if (d != 1) throw InvalidInput("outside-K-positive is defined on the circle only");
      std::set<Freq> ks(inst.k.begin(), inst.k.end());
      for (std::int64_t n = 1; n <= spec.half[0]; ++n)
        if (!ks.count(n)) r.members.push_back(n);
      break;
    }
    case Selector::Custom: r.members = clip(inst.custom, spec); break;
  }
  std::ranges::sort(r.members);
  return r;
}

void validate(const Instance& inst) {
  inst.spec.validate();
  std::set<Freq> seen;
  for (const auto& k : inst.k) {
    if (k.dim() != inst.spec.dim()) throw InvalidInput("frequency " + k.to_string() + " does not match the grid dimension");
    if (!inst.spec.in_window(k)) throw InvalidInput("K member " + k.to_string() + " lies outside the window");
    if (!seen.insert(k).second) throw InvalidInput("enumeration entries must be distinct");
  }
  for (const auto& c : inst.custom)
    if (c.dim() != inst.spec.dim()) throw InvalidInput("custom frequency " + c.to_string() + " does not match the grid");
  auto fs = forbidden_set(inst);
  if (!fs.exact)
    throw InvalidInput(std::string("cannot certify hypothesis: the ") + to_string(inst.forbidden) +
                       " set is not exact for this enumeration");
  for (const auto& n : fs.members)
    if (seen.count(n)) throw InvalidInput("forbidden set meets K at " + n.to_string());
  if (!inst.mode) return;
  switch (*inst.mode) {
    case ReplayMode::New:
      if (inst.forbidden == Selector::NegativeHalfline) return;
      if (inst.forbidden == Selector::Schur && inst.spec.dim() == 1) return;
      break;
    case ReplayMode::Complementary:
      if (inst.forbidden == Selector::OutsideKPositive) return;
      break;
    case ReplayMode::Classic:
      throw InvalidInput("classic mode needs a supplied analytic factorization; generated instances cannot provide one");
  }
  throw InvalidInput(std::string("no ") + to_string(*inst.mode) + " replay is defined for the " +
                     to_string(inst.forbidden) + " selector");
}

Spectrum make_spectrum(const Instance& inst) {
  validate(inst);
  auto fs = forbidden_set(inst).members;
  std::set<Freq> ks(inst.k.begin(), inst.k.end());
  std::mt19937_64 rng(mix_seed(inst.seed, 0));
  Spectrum s(inst.spec.half);
  for (std::size_t i = 0; i < s.size(); ++i) {
    Freq n = s.freq_at(i);
    if (std::binary_search(fs.begin(), fs.end(), n)) continue;
    cplx c = gauss(rng);
    if (c == cplx(0.0) && ks.count(n)) c = 1.0;
    s.values()[i] = c;
  }
  return s;
}

GridFunction make_instance(const Instance& inst) { return synth(make_spectrum(inst), inst.spec); }

double check_ratio(const GridFunction& f, std::span<const Freq> K) {
  double l1 = norm_l1(f);
  if (l1 == 0) throw InvalidInput("ratio undefined: f vanishes identically");
  double s = 0;
  for (const auto& k : K) s += std::norm(coeff(f, k));
  return std::sqrt(s) / l1;
}

ProofTrace replay_instance(const Instance& inst, const GridFunction& f) {
  validate(inst);
  if (!inst.mode) throw InvalidInput("instance has no replay mode");
  ReplayOptions opt;
  opt.mode = *inst.mode;
  if (inst.spec.dim() > 1) return replay_group(f, inst.k, ConeOrder::lex_last(inst.spec.dim()), opt.mode);
  if (inst.forbidden == Selector::Schur) opt.dsets = DSetKind::Schur;
  return replay(f, to_ints(inst.k), opt);
}

Instance instantiate(const Template& t, std::uint64_t seed) {
  Instance inst;
  inst.forbidden = t.forbidden;
  inst.mode = t.mode;
  inst.custom = t.custom;
  inst.seed = seed;
  if (!t.k.empty()) {
    inst.k = t.k;
    if (t.spec) {
      inst.spec = *t.spec;
    } else {
      if (t.k.front().dim() != 1) throw InvalidInput("template with d > 1 needs an explicit grid");
      std::int64_t M = 0;
      for (const auto& k : t.k) M = std::max(M, std::abs(k[0]));
      M += t.margin;
      inst.spec = GridSpec::circle(t.oversample * default_grid_size(M), M);
    }
    return inst;
  }
  if (t.j_min < 1 || t.j_min > t.j_max) throw InvalidInput("template needs 1 <= j_min <= j_max");
  if (t.k1_max < 1 || t.slack < 0 || t.margin < 0 || t.oversample < 1) throw InvalidInput("bad template parameters");
  std::mt19937_64 rng(mix_seed(seed, 1));
  auto uniform = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
  auto J = static_cast<std::size_t>(uniform(static_cast<std::int64_t>(t.j_min), static_cast<std::int64_t>(t.j_max)));
  std::vector<std::int64_t> k{uniform(1, t.k1_max)};
  while (k.size() < J) k.push_back(2 * k.back() + 1 + uniform(0, t.slack));
  const std::int64_t M = k.back() + t.margin;
  if (t.shuffle) std::shuffle(k.begin(), k.end(), rng);
  inst.k = to_freqs(k);
  inst.spec = GridSpec::circle(t.oversample * default_grid_size(M), M);
  return inst;
}

InstanceResult run_one(const Instance& inst) {
  InstanceResult r;
  r.instance = inst;
  validate(inst);
  auto f = make_instance(inst);
  r.ratio = check_ratio(f, inst.k);
  r.constant = theorem_constant(inst.forbidden);
  r.ceiling = ceiling_constant(inst.forbidden);
  r.above_ceiling = r.ratio > r.ceiling + 1e-6;
  if (inst.mode) {
    auto t = replay_instance(inst, f);
    r.failures = t.failures;
    double fn = std::sqrt(t.f_norm2);
    r.worst_residual = std::max({fn > 0 ? t.worst_identity / fn : t.worst_identity, fn > 0 ? t.worst_b / fn : t.worst_b,
                                 t.worst_membership, t.worst_intertwining, t.worst_orthogonality, t.worst_p_nest,
                                 t.worst_q_nest});
  }
  if (r.ratio > r.constant + 1e-9) r.failures.push_back("ratio above theorem constant");
  r.passed = r.failures.empty();
  return r;
}

CampaignReport run_campaign(const CampaignConfig& cfg) {
  if (cfg.templates.empty()) throw InvalidInput("campaign needs at least one template");
  auto start = std::chrono::steady_clock::now();
  const std::size_t T = cfg.templates.size();
  // surface template errors before spawning work
  for (std::size_t t = 0; t < T; ++t) validate(instantiate(cfg.templates[t], mix_seed(cfg.seed, t)));
  auto results = parallel_map<InstanceResult>(cfg.trials, cfg.workers, [&](std::size_t i) {
    auto r = run_one(instantiate(cfg.templates[i % T], mix_seed(cfg.seed, i)));
    r.template_index = i % T;
    return r;
  });

  CampaignReport rep;
  rep.seed = cfg.seed;
  rep.instances = cfg.trials;
  for (const auto& t : cfg.templates) {
    TemplateSummary s;
    s.name = t.name;
    s.forbidden = t.forbidden;
    s.mode = t.mode;
    s.constant = theorem_constant(t.forbidden);
    s.ceiling = ceiling_constant(t.forbidden);
    rep.per_template.push_back(s);
  }
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    auto& s = rep.per_template[r.template_index];
    ++s.instances;
    s.max_ratio = std::max(s.max_ratio, r.ratio);
    s.worst_residual = std::max(s.worst_residual, r.worst_residual);
    rep.max_ratio = std::max(rep.max_ratio, r.ratio);
    rep.worst_residual = std::max(rep.worst_residual, r.worst_residual);
    if (r.above_ceiling) ++s.above_ceiling, ++rep.above_ceiling;
    if (r.passed) {
      ++s.passed, ++rep.passed;
    } else {
      ++s.failed, ++rep.failed;
      rep.counterexamples.push_back({i, r.instance, r.ratio, r.failures});
    }
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

OptimizerResult optimize_ratio(const Instance& inst_in, const OptimizerConfig& cfg) {
  Instance inst = inst_in;
  inst.mode.reset();
  validate(inst);
  if (cfg.restarts == 0) throw InvalidInput("optimizer needs at least one restart");
  if (!(cfg.smoothing > 0) || !(cfg.step > 0)) throw InvalidInput("optimizer smoothing and step must be positive");
  const auto& spec = inst.spec;
  auto fs = forbidden_set(inst).members;
  Spectrum shape(spec.half);
  std::vector<std::size_t> free, kidx;
  for (std::size_t i = 0; i < shape.size(); ++i)
    if (!std::binary_search(fs.begin(), fs.end(), shape.freq_at(i))) free.push_back(i);
  for (const auto& k : inst.k) kidx.push_back(shape.index_of(k));

  struct Run {
    Spectrum c;
    double ratio = 0;
    std::vector<OptimizerLogRow> log;
  };
  auto k_norm = [&](const Spectrum& c) {
    double s = 0;
    for (auto i : kidx) s += std::norm(c.values()[i]);
    return std::sqrt(s);
  };
  auto exact_ratio = [&](const Spectrum& c, GridFunction* out) {
    auto f = synth(c, spec);
    double l1 = norm_l1(f);
    if (out) *out = std::move(f);
    return l1 > 0 ? k_norm(c) / l1 : 0.0;
  };
  auto normalize = [&](Spectrum& c) {
    double l1 = norm_l1(synth(c, spec));
    if (l1 > 0)
      for (auto& v : c.values()) v /= l1;
  };

  auto one = [&](std::size_t r) {
    Run run;
    std::mt19937_64 rng(mix_seed(cfg.seed, r));
    run.c = Spectrum(spec.half);
    for (auto i : free) run.c.values()[i] = gauss(rng);
    normalize(run.c);
    GridFunction f;
    run.ratio = exact_ratio(run.c, &f);
    // ratio of the normalized start is the baseline every accepted step must beat
    double step = cfg.step;
    for (std::size_t it = 0; it < cfg.iterations && step > 1e-14; ++it) {
      double fmax = 0;
      for (auto x : f.samples) fmax = std::max(fmax, std::abs(x));
      const double eps = cfg.smoothing * fmax;
      auto u = f;
      double ls = 0;
      for (auto& x : u.samples) {
        double a = std::sqrt(std::norm(x) + eps * eps);
        ls += a;
        x /= a;
      }
      ls /= static_cast<double>(u.samples.size());
      auto gl = analyze(u);
      const double A = k_norm(run.c);
      Spectrum dir(spec.half);
      for (auto i : free) dir.values()[i] = -gl.values()[i] / ls;
      if (A > 0)
        for (auto i : kidx) dir.values()[i] += run.c.values()[i] / (A * A);
      double dn = 0, cn = 0;
      for (auto i : free) dn += std::norm(dir.values()[i]), cn += std::norm(run.c.values()[i]);
      if (dn == 0) break;
      Spectrum trial = run.c;
      const double scale = step * std::sqrt(cn / dn);
      for (auto i : free) trial.values()[i] += scale * dir.values()[i];
      // compare in normalized form so the logged ratio is the accepted one
      auto tf = synth(trial, spec);
      double l1 = norm_l1(tf);
      if (l1 > 0) {
        for (auto& v : trial.values()) v /= l1;
        for (auto& x : tf.samples) x /= l1;
      }
      double tr = l1 > 0 ? k_norm(trial) / norm_l1(tf) : 0.0;
      if (tr > run.ratio) {
        run.c = std::move(trial);
        f = std::move(tf);
        run.ratio = tr;
        step *= 1.25;
      } else {
        step *= 0.5;
      }
      run.log.push_back({r, it, run.ratio, step});
    }
    return run;
  };
  auto runs = parallel_map<Run>(cfg.restarts, cfg.workers, one);

  OptimizerResult res;
  std::size_t best = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (runs[r].ratio > runs[best].ratio) best = r;
    res.log.insert(res.log.end(), runs[r].log.begin(), runs[r].log.end());
  }
  res.best_restart = best;
  res.spectrum = runs[best].c;
  normalize(res.spectrum);
  res.best = synth(res.spectrum, spec);
  res.ratio = check_ratio(res.best, inst.k);
  return res;
}

}  // namespace paleylab
