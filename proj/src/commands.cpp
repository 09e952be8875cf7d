#include "paleylab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "paleylab/combinatorics.hpp"
#include "paleylab/error.hpp"
#include "paleylab/json_io.hpp"
#include "paleylab/parallel.hpp"

namespace paleylab {

namespace {

constexpr double kMeasureCeiling = 2.8284271247461903;  // 2 sqrt 2

struct Flags {
  std::string k, window, set = "schur", mode, instances, out, format = "json", dsets, hypothesis;
  std::size_t j = 0, trials = 1, workers = 0, restarts = 4, iterations = 200, replay_cap = 4096;
  std::uint64_t seed = 0;
  std::int64_t half = -1, grid = -1;
  bool timing = false, atomic = false, no_replay = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Freq> parse_k(const std::string& s) {
  if (s.empty()) throw InvalidInput("--k is required");
  auto K = parse_freq_list(s);
  if (K.empty()) throw InvalidInput("--k is empty");
  return K;
}

std::int64_t abs_sum(std::span<const Freq> K) {
  std::int64_t s = 0;
  for (const auto& k : K)
    for (auto c : k.coords()) s += std::abs(c);
  return s;
}

Window parse_window(const std::string& s, std::int64_t dflt) {
  if (s.empty()) return {-dflt, dflt};
  auto colon = s.find(':');
  if (colon == std::string::npos) throw InvalidInput("--window is lo:hi");
  auto lo = parse_freq(s.substr(0, colon)), hi = parse_freq(s.substr(colon + 1));
  if (lo.dim() != 1 || hi.dim() != 1 || lo[0] > hi[0]) throw InvalidInput("--window is lo:hi with lo <= hi");
  return {lo[0], hi[0]};
}

BoxWindow parse_box(const std::string& s, std::size_t d, std::int64_t dflt) {
  if (s.empty()) {
    Freq lo = Freq::zero(d), hi = Freq::zero(d);
    for (std::size_t a = 0; a < d; ++a) lo[a] = -dflt, hi[a] = dflt;
    return {lo, hi};
  }
  auto colon = s.find(':');
  if (colon == std::string::npos) throw InvalidInput("--window is lo1,lo2:hi1,hi2 for several axes");
  BoxWindow w{parse_freq(s.substr(0, colon)), parse_freq(s.substr(colon + 1))};
  if (w.lo.dim() != d || w.hi.dim() != d) throw InvalidInput("--window dimension does not match --k");
  return w;
}

CommandResult emit(const Flags& f, const std::string& text, int code) {
  CommandResult r;
  r.code = code;
  if (f.out.empty()) {
    r.out = text + "\n";
    return r;
  }
  std::ofstream o(f.out, std::ios::binary);
  if (!o) throw InvalidInput("cannot write '" + f.out + "'");
  o << text << "\n";
  return r;
}

std::size_t workers_of(const Flags& f, std::size_t session) {
  if (f.workers > 0) return f.workers;
  return session > 0 ? session : default_workers();
}

CommandResult cmd_sets(const Flags& f) {
  auto K = parse_k(f.k);
  const auto R = std::max<std::int64_t>(abs_sum(K), 1);
  if (K.front().dim() > 1) {
    FreqSetReport rep;
    if (f.set == "s") rep = s_set(K);
    else if (f.set == "riesz") rep = riesz_support(K);
    else if (f.set == "alt") rep = alt_sum_set(K);
    else if (f.set == "schur") rep = schur_set(K, parse_box(f.window, K.front().dim(), R), 3);
    else throw InvalidInput("--set " + f.set + " is only defined on the circle");
    return emit(f, dump(to_json(rep)), kExitOk);
  }
  auto k = to_ints(K);
  SetReport rep;
  auto need_j = [&] {
    if (f.j == 0) throw InvalidInput("--set " + f.set + " needs --j");
  };
  if (f.set == "s") {
    rep = s_set(k);
  } else if (f.set == "riesz") {
    rep = riesz_support(k);
  } else if (f.set == "alt") {
    rep = alt_sum_set(k);
  } else if (f.set == "schur") {
    auto w = parse_window(f.window, R);
    rep = strictly_increasing(k) ? schur_set_via_gaps(k, w) : schur_set(k, w, 3);
  } else if (f.set == "dj") {
    need_j();
    rep = d_set(f.j, k, parse_window(f.window, R));
  } else if (f.set == "gj") {
    need_j();
    rep = g_set(f.j, k, parse_window(f.window, R));
  } else {
    throw InvalidInput("unknown --set '" + f.set + "' (expected schur, s, riesz, alt, dj or gj)");
  }
  return emit(f, dump(to_json(rep)), kExitOk);
}

CommandResult cmd_riesz(const Flags& f) {
  auto K = parse_k(f.k);
  return emit(f, dump(to_json(riesz_expansion(K))), kExitOk);
}

Instance instance_from_flags(const Flags& f) {
  Instance inst;
  inst.k = parse_k(f.k);
  if (inst.k.front().dim() != 1) throw InvalidInput("flag-built instances live on the circle; use --instances");
  inst.forbidden = parse_selector(f.set);
  inst.seed = f.seed;
  if (!f.mode.empty()) inst.mode = parse_mode(f.mode);
  std::int64_t M = f.half;
  if (M < 0) {
    M = 0;
    for (const auto& k : inst.k) M = std::max(M, std::abs(k[0]));
    M += 4;
  }
  const std::size_t N = f.grid > 0 ? static_cast<std::size_t>(f.grid) : default_grid_size(M);
  inst.spec = GridSpec::circle(N, M);
  inst.spec.validate();
  return inst;
}

// instances named in a replay input: an instance, a counterexample, or a
// report carrying counterexamples
std::vector<Instance> replay_inputs(const Json& j) {
  if (j.is_object() && j.contains("counterexamples")) {
    std::vector<Instance> out;
    for (const auto& c : j["counterexamples"]) {
      if (!c.is_object() || !c.contains("instance")) throw InvalidInput("counterexample without 'instance'");
      out.push_back(instance_from_json(c["instance"]));
    }
    return out;
  }
  if (j.is_object() && j.contains("instance")) return {instance_from_json(j["instance"])};
  if (j.is_array()) {
    std::vector<Instance> out;
    for (const auto& e : j) out.push_back(instance_from_json(e.contains("instance") ? e["instance"] : e));
    return out;
  }
  return {instance_from_json(j)};
}

CommandResult cmd_replay(const Flags& f) {
  std::vector<Instance> insts;
  if (!f.instances.empty()) {
    insts = replay_inputs(parse_json(read_file(f.instances)));
    if (!f.mode.empty())
      for (auto& i : insts) i.mode = parse_mode(f.mode);
  } else {
    auto inst = instance_from_flags(f);
    if (!inst.mode) inst.mode = ReplayMode::New;
    insts.push_back(inst);
  }
  if (insts.empty()) throw InvalidInput("nothing to replay");
  Json traces = Json::array();
  bool ok = true;
  for (const auto& inst : insts) {
    auto t = replay_instance(inst, make_instance(inst));
    ok = ok && t.ok();
    traces.push_back(to_json(t));
  }
  Json out = insts.size() == 1 ? traces[0] : Json{{"traces", traces}};
  return emit(f, dump(out), ok ? kExitOk : kExitViolation);
}

CommandResult cmd_verify(const Flags& f, std::size_t session_workers, bool trials_set, bool seed_set) {
  if (f.instances.empty()) throw InvalidInput("verify needs --instances <campaign.json>");
  auto cfg = campaign_from_json(parse_json(read_file(f.instances)));
  if (trials_set) cfg.trials = f.trials;
  if (seed_set) cfg.seed = f.seed;
  cfg.workers = workers_of(f, session_workers);
  auto rep = run_campaign(cfg);
  bool ok = rep.failed == 0 && rep.above_ceiling == 0;
  return emit(f, dump(to_json(rep, f.timing)), ok ? kExitOk : kExitViolation);
}

CommandResult cmd_optimize(const Flags& f, std::size_t session_workers) {
  Instance inst = f.instances.empty() ? instance_from_flags(f) : instance_from_json(parse_json(read_file(f.instances)));
  OptimizerConfig cfg;
  cfg.restarts = f.restarts;
  cfg.iterations = f.iterations;
  cfg.seed = f.seed;
  cfg.workers = workers_of(f, session_workers);
  auto res = optimize_ratio(inst, cfg);
  bool ok = res.ratio <= theorem_constant(inst.forbidden) + 1e-9 && res.ratio <= ceiling_constant(inst.forbidden) + 1e-6;
  if (f.format == "csv") return emit(f, optimizer_log_csv(res).substr(0, optimizer_log_csv(res).size() - 1), ok ? kExitOk : kExitViolation);
  if (f.format != "json") throw InvalidInput("--format is json or csv");
  return emit(f, dump(to_json(res)), ok ? kExitOk : kExitViolation);
}

Measure seeded_measure(const Flags& f, std::span<const std::int64_t> k, MeasureHypothesis h, std::uint64_t seed) {
  if (f.atomic) return make_atomic_measure(k, h, seed);
  return make_density_measure(k, h, seed);
}

CommandResult cmd_lift(const Flags& f, bool seed_set) {
  auto g = to_ints(parse_k(f.k));
  if (!seed_set && f.instances.empty()) {
    Json j;
    j["lifted"] = to_json(lift_enumeration(g));
    auto s = check_simple_s(g);
    j["simple_s"] = to_json(s);
    return emit(f, dump(j), s.holds && s.projection_holds ? kExitOk : kExitViolation);
  }
  auto h = parse_hypothesis(f.hypothesis.empty() ? "s" : f.hypothesis);
  Measure mu = f.instances.empty() ? seeded_measure(f, g, h, f.seed) : measure_from_json(parse_json(read_file(f.instances)));
  auto r = lift_pipeline(mu, g, h, f.replay_cap);
  bool ok = r.holds() && r.chain.ratio <= kMeasureCeiling + 1e-6;
  return emit(f, dump(to_json(r)), ok ? kExitOk : kExitViolation);
}

// {"measure":..., "k":[...], "hypothesis":"..."} or, on Z^d,
// {"measure":..., "k":[[..],..], "order":{"generators":[[..],..]}}
CommandResult measures_from_file(const Flags& f) {
  auto j = parse_json(read_file(f.instances));
  if (!j.is_object() || !j.contains("measure") || !j.contains("k"))
    throw InvalidInput("a measures input needs 'measure' and 'k'");
  for (const auto& [key, _] : j.items())
    if (key != "measure" && key != "k" && key != "hypothesis" && key != "order")
      throw InvalidInput("unknown key '" + key + "' in measures input");
  auto mu = measure_from_json(j["measure"]);
  auto K = freqs_from_json(j["k"]);
  ChainReport r;
  if (j.contains("order")) {
    const auto& o = j["order"];
    if (!o.is_object() || !o.contains("generators")) throw InvalidInput("'order' needs 'generators'");
    r = check_measure_bound_ordered(mu, K, ConeOrder::generated(freqs_from_json(o["generators"])));
  } else {
    std::string h = j.contains("hypothesis") && j["hypothesis"].is_string() ? j["hypothesis"].get<std::string>()
                                                                           : (f.hypothesis.empty() ? "schur-riesz" : f.hypothesis);
    r = check_measure_bound(mu, to_ints(K), parse_hypothesis(h), std::nullopt, !f.no_replay);
  }
  bool ok = r.holds() && r.ratio <= kMeasureCeiling + 1e-6;
  return emit(f, dump(to_json(r)), ok ? kExitOk : kExitViolation);
}

CommandResult cmd_measures(const Flags& f, std::size_t session_workers) {
  if (!f.instances.empty()) return measures_from_file(f);
  auto k = to_ints(parse_k(f.k));
  auto h = parse_hypothesis(f.hypothesis.empty() ? "schur-riesz" : f.hypothesis);
  if (f.trials <= 1) {
    auto r = check_measure_bound(seeded_measure(f, k, h, f.seed), k, h, std::nullopt, !f.no_replay);
    bool ok = r.holds() && r.ratio <= kMeasureCeiling + 1e-6;
    return emit(f, dump(to_json(r)), ok ? kExitOk : kExitViolation);
  }
  std::function<ChainReport(std::size_t)> one = [&](std::size_t i) {
    return check_measure_bound(seeded_measure(f, k, h, mix_seed(f.seed, i)), k, h, std::nullopt, !f.no_replay);
  };
  auto reps = parallel_map(f.trials, workers_of(f, session_workers), one);
  Json j;
  std::size_t failed = 0, replay_failed = 0;
  double worst = 0;
  Json bad = Json::array();
  for (std::size_t i = 0; i < reps.size(); ++i) {
    worst = std::max(worst, reps[i].ratio);
    if (!reps[i].replay_failures.empty()) ++replay_failed;
    if (!reps[i].holds() || reps[i].ratio > kMeasureCeiling + 1e-6) {
      ++failed;
      Json c = to_json(reps[i]);
      c["trial"] = i;
      c["seed"] = mix_seed(f.seed, i);
      bad.push_back(std::move(c));
    }
  }
  j["trials"] = reps.size();
  j["hypothesis"] = to_string(h);
  j["kind"] = f.atomic ? "atomic" : "density";
  j["failed"] = failed;
  j["max_ratio"] = worst;
  j["replay_failed"] = replay_failed;
  j["failures"] = std::move(bad);
  return emit(f, dump(j), failed == 0 ? kExitOk : kExitViolation);
}

}  // namespace

CommandResult run_command(const std::vector<std::string>& args, std::size_t session_workers) {
  CommandResult res;
  Flags f;
  CLI::App app{"paley-lab: finite-grid checks of Paley-type inequalities for lacunary sets"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto* sets = app.add_subcommand("sets", "compute a frequency set as JSON");
  auto* riesz = app.add_subcommand("riesz", "exact Riesz product coefficients");
  auto* replay = app.add_subcommand("replay", "replay the proof on an instance or failure dump");
  auto* verify = app.add_subcommand("verify", "run a seeded campaign from a JSON config");
  auto* optimize = app.add_subcommand("optimize", "search for a large ||f^|K|| / ||f||_1");
  auto* lift = app.add_subcommand("lift", "lift an enumeration; with --seed or --instances, run the lifted chain");
  auto* measures = app.add_subcommand("measures", "the inequality chain for measures");

  for (auto* s : {sets, riesz, replay, optimize, lift, measures})
    s->add_option("--k", f.k, "frequencies: 1,3,7 or 5,1;0,3");
  sets->add_option("--window", f.window, "lo:hi (or lo1,lo2:hi1,hi2)");
  sets->add_option("--set", f.set, "schur|s|riesz|alt|dj|gj");
  sets->add_option("--j", f.j, "index for dj and gj");

  for (auto* s : {replay, optimize}) {
    s->add_option("--set", f.set, "forbidden selector for flag-built instances");
    s->add_option("--half", f.half, "window half-width M");
    s->add_option("--grid", f.grid, "grid size N");
  }
  replay->add_option("--mode", f.mode, "new|classic|complementary");
  for (auto* s : {replay, verify, optimize, lift, measures}) s->add_option("--instances", f.instances, "input JSON file");
  CLI::Option* seed_opt[4];
  int si = 0;
  for (auto* s : {replay, verify, optimize, measures}) seed_opt[si++] = s->add_option("--seed", f.seed, "master seed");
  auto* lift_seed = lift->add_option("--seed", f.seed, "seed of a generated measure");
  auto* trials_opt = verify->add_option("--trials", f.trials, "number of instances");
  measures->add_option("--trials", f.trials, "number of seeded measures");
  for (auto* s : {verify, optimize, measures}) s->add_option("--workers", f.workers, "worker threads");
  for (auto* s : {sets, riesz, replay, verify, optimize, lift, measures}) s->add_option("--out", f.out, "write output here");
  optimize->add_option("--format", f.format, "json|csv (csv is the iteration log)");
  optimize->add_option("--restarts", f.restarts);
  optimize->add_option("--iterations", f.iterations);
  verify->add_flag("--timing", f.timing, "include wall time");
  for (auto* s : {lift, measures}) {
    s->add_option("--hypothesis", f.hypothesis, "schur-riesz|schur|s");
    s->add_flag("--atomic", f.atomic, "generate an atomic measure");
  }
  lift->add_option("--replay-cap", f.replay_cap, "largest lifted replay grid");
  measures->add_flag("--no-replay", f.no_replay, "skip the replay on f_K");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    res.out = app.help();
    return res;
  } catch (const CLI::CallForAllHelp&) {
    res.out = app.help("", CLI::AppFormatMode::All);
    return res;
  } catch (const CLI::ParseError& e) {
    res.code = kExitInvalid;
    res.error = e.what();
    return res;
  }

  try {
    if (sets->parsed()) return cmd_sets(f);
    if (riesz->parsed()) return cmd_riesz(f);
    if (replay->parsed()) return cmd_replay(f);
    if (verify->parsed()) return cmd_verify(f, session_workers, trials_opt->count() > 0, seed_opt[1]->count() > 0);
    if (optimize->parsed()) return cmd_optimize(f, session_workers);
    if (lift->parsed()) return cmd_lift(f, lift_seed->count() > 0);
    if (measures->parsed()) return cmd_measures(f, session_workers);
    res.code = kExitInvalid;
    res.error = "no subcommand";
  } catch (const InvalidInput& e) {
    res.code = kExitInvalid;
    res.error = e.what();
  } catch (const std::exception& e) {
    res.code = kExitInternal;
    res.error = std::string("internal error: ") + e.what();
  }
  // one line
  std::replace(res.error.begin(), res.error.end(), '\n', ' ');
  return res;
}

}  // namespace paleylab
