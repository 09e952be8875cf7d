#include "paleylab/json_io.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "paleylab/error.hpp"

namespace paleylab {

namespace {

Json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double to_double(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
  }
  throw InvalidInput(what + " must be a number");
}

Json cnum(cplx c) { return Json::array({num(c.real()), num(c.imag())}); }

cplx to_cplx(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw InvalidInput(what + " must be [re, im]");
  return {to_double(j[0], what), to_double(j[1], what)};
}

Json opt_bool(const std::optional<bool>& b) { return b ? Json(*b) : Json(nullptr); }

void require_object(const Json& j, const std::string& what, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw InvalidInput(what + " must be a JSON object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw InvalidInput("unknown key '" + key + "' in " + what);
}

std::int64_t get_i64(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) throw InvalidInput(what + " must be an integer");
  return j.get<std::int64_t>();
}

std::uint64_t get_u64(const Json& j, const std::string& what) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw InvalidInput(what + " must be a nonnegative integer");
}

std::string get_str(const Json& j, const std::string& what) {
  if (!j.is_string()) throw InvalidInput(what + " must be a string");
  return j.get<std::string>();
}

bool get_bool(const Json& j, const std::string& what) {
  if (!j.is_boolean()) throw InvalidInput(what + " must be true or false");
  return j.get<bool>();
}

std::optional<ReplayMode> get_mode(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return parse_mode(get_str(j, "mode"));
}

Json mode_json(const std::optional<ReplayMode>& m) { return m ? Json(to_string(*m)) : Json(nullptr); }

Json strings(const std::vector<std::string>& v) {
  Json a = Json::array();
  for (const auto& s : v) a.push_back(s);
  return a;
}

}  // namespace

Json to_json(const Freq& n) {
  if (n.dim() == 1) return n[0];
  Json a = Json::array();
  for (auto c : n.coords()) a.push_back(c);
  return a;
}

Freq freq_from_json(const Json& j) {
  if (j.is_number_integer()) return Freq(j.get<std::int64_t>());
  if (j.is_array() && !j.empty()) {
    std::vector<std::int64_t> c;
    for (const auto& e : j) c.push_back(get_i64(e, "frequency component"));
    return Freq(std::move(c));
  }
  throw InvalidInput("a frequency is an integer or a nonempty integer array");
}

Json to_json(std::span<const Freq> list) {
  Json a = Json::array();
  for (const auto& n : list) a.push_back(to_json(n));
  return a;
}

std::vector<Freq> freqs_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidInput("a frequency list must be an array");
  std::vector<Freq> out;
  for (const auto& e : j) out.push_back(freq_from_json(e));
  for (const auto& n : out)
    if (n.dim() != out.front().dim()) throw InvalidInput("frequencies in a list must share a dimension");
  return out;
}

Json to_json(const SetReport& r) {
  Json j;
  j["members"] = r.members;
  j["exact"] = r.exact;
  return j;
}

Json to_json(const FreqSetReport& r) {
  Json j;
  j["members"] = to_json(std::span<const Freq>(r.members));
  j["exact"] = r.exact;
  return j;
}

Json to_json(const GridSpec& s) {
  Json j;
  j["dims"] = s.dims;
  j["half"] = s.half;
  return j;
}

GridSpec grid_from_json(const Json& j) {
  require_object(j, "grid", {"dims", "half"});
  GridSpec s;
  try {
    s.dims = j.at("dims").get<std::vector<std::size_t>>();
    s.half = j.at("half").get<std::vector<std::int64_t>>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput("grid needs integer arrays 'dims' and 'half'");
  }
  s.validate();
  return s;
}

Json to_json(const Spectrum& s) {
  Json j;
  j["half"] = s.half();
  Json c = Json::array();
  for (const auto& [n, v] : s.entries()) c.push_back(Json::array({to_json(n), num(v.real()), num(v.imag())}));
  j["coefficients"] = std::move(c);
  return j;
}

Spectrum spectrum_from_json(const Json& j) {
  require_object(j, "spectrum", {"half", "coefficients"});
  std::vector<std::int64_t> half;
  try {
    half = j.at("half").get<std::vector<std::int64_t>>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput("spectrum needs an integer array 'half'");
  }
  Spectrum s(half);
  if (!j.contains("coefficients") || !j["coefficients"].is_array())
    throw InvalidInput("spectrum needs a 'coefficients' array");
  for (const auto& e : j["coefficients"]) {
    if (!e.is_array() || e.size() != 3) throw InvalidInput("spectrum entries are [n, re, im]");
    Freq n = freq_from_json(e[0]);
    if (n.dim() != half.size() || !s.in_window(n)) throw InvalidInput("spectrum entry " + n.to_string() + " is outside the window");
    s.set(n, {to_double(e[1], "coefficient"), to_double(e[2], "coefficient")});
  }
  return s;
}

Json to_json(const RieszExpansion& e) {
  Json j;
  j["exponent"] = e.common_exponent();
  Json c = Json::array();
  for (const auto& [g, _] : e.numerators()) {
    auto d = e.coefficient(g);
    c.push_back(Json::array({to_json(g), d.num, d.exp}));
  }
  j["coefficients"] = std::move(c);
  return j;
}

Json to_json(const ProofTrace& t) {
  Json j;
  j["mode"] = to_string(t.mode);
  j["dsets"] = to_string(t.dsets);
  j["k"] = to_json(std::span<const Freq>(t.k));
  j["depth"] = t.depth;
  j["basis_from_qr"] = t.basis_from_qr;
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    Json st;
    st["j"] = s.j;
    st["a"] = cnum(s.a);
    st["b"] = cnum(s.b);
    st["target"] = cnum(s.target);
    st["b_two_projection"] = cnum(s.b_two_projection);
    st["identity_residual"] = num(s.identity_residual);
    st["b_residual"] = num(s.b_residual);
    st["membership"] = num(s.membership);
    st["intertwining"] = num(s.intertwining);
    st["orthogonality"] = num(s.orthogonality);
    st["p_nest"] = num(s.p_nest);
    st["q_nest"] = num(s.q_nest);
    st["dim_l"] = s.dim_l;
    steps.push_back(std::move(st));
  }
  j["steps"] = std::move(steps);
  j["sum_a2"] = num(t.sum_a2);
  j["sum_b2"] = num(t.sum_b2);
  j["g_norm2"] = num(t.g_norm2);
  j["h_norm2"] = num(t.h_norm2);
  j["f_norm2"] = num(t.f_norm2);
  j["f_l1"] = num(t.f_l1);
  j["k_norm"] = num(t.k_norm);
  j["ratio"] = num(t.ratio);
  j["certified_constant"] = num(t.certified_constant);
  j["structural"] = {{"membership", opt_bool(t.structural_membership)},
                     {"antinesting", opt_bool(t.structural_antinesting)},
                     {"nesting", opt_bool(t.structural_nesting)}};
  j["worst"] = {{"identity", num(t.worst_identity)},         {"b", num(t.worst_b)},
                {"membership", num(t.worst_membership)},     {"intertwining", num(t.worst_intertwining)},
                {"orthogonality", num(t.worst_orthogonality)}, {"p_nest", num(t.worst_p_nest)},
                {"q_nest", num(t.worst_q_nest)}};
  j["failures"] = strings(t.failures);
  j["ok"] = t.ok();
  return j;
}

Json to_json(const Instance& inst) {
  Json j;
  j["grid"] = to_json(inst.spec);
  j["k"] = to_json(std::span<const Freq>(inst.k));
  j["forbidden"] = to_string(inst.forbidden);
  j["custom"] = to_json(std::span<const Freq>(inst.custom));
  j["seed"] = inst.seed;
  j["mode"] = mode_json(inst.mode);
  return j;
}

Instance instance_from_json(const Json& j) {
  require_object(j, "instance", {"grid", "k", "forbidden", "custom", "seed", "mode"});
  if (!j.contains("grid") || !j.contains("k")) throw InvalidInput("an instance needs 'grid' and 'k'");
  Instance inst;
  inst.spec = grid_from_json(j["grid"]);
  inst.k = freqs_from_json(j["k"]);
  if (j.contains("forbidden")) inst.forbidden = parse_selector(get_str(j["forbidden"], "forbidden"));
  if (j.contains("custom")) inst.custom = freqs_from_json(j["custom"]);
  if (j.contains("seed")) inst.seed = get_u64(j["seed"], "seed");
  if (j.contains("mode")) inst.mode = get_mode(j["mode"]);
  return inst;
}

Json to_json(const Template& t) {
  Json j;
  j["name"] = t.name;
  j["forbidden"] = to_string(t.forbidden);
  j["mode"] = mode_json(t.mode);
  j["k"] = to_json(std::span<const Freq>(t.k));
  j["grid"] = t.spec ? to_json(*t.spec) : Json(nullptr);
  j["custom"] = to_json(std::span<const Freq>(t.custom));
  j["j_min"] = t.j_min;
  j["j_max"] = t.j_max;
  j["k1_max"] = t.k1_max;
  j["slack"] = t.slack;
  j["margin"] = t.margin;
  j["oversample"] = t.oversample;
  j["shuffle"] = t.shuffle;
  return j;
}

Template template_from_json(const Json& j) {
  require_object(j, "template", {"name", "forbidden", "mode", "k", "grid", "custom", "j_min", "j_max", "k1_max",
                                 "slack", "margin", "oversample", "shuffle"});
  Template t;
  if (j.contains("name")) t.name = get_str(j["name"], "name");
  if (j.contains("forbidden")) t.forbidden = parse_selector(get_str(j["forbidden"], "forbidden"));
  if (j.contains("mode")) t.mode = get_mode(j["mode"]);
  if (j.contains("k")) t.k = freqs_from_json(j["k"]);
  if (j.contains("grid") && !j["grid"].is_null()) t.spec = grid_from_json(j["grid"]);
  if (j.contains("custom")) t.custom = freqs_from_json(j["custom"]);
  if (j.contains("j_min")) t.j_min = get_u64(j["j_min"], "j_min");
  if (j.contains("j_max")) t.j_max = get_u64(j["j_max"], "j_max");
  if (j.contains("k1_max")) t.k1_max = get_i64(j["k1_max"], "k1_max");
  if (j.contains("slack")) t.slack = get_i64(j["slack"], "slack");
  if (j.contains("margin")) t.margin = get_i64(j["margin"], "margin");
  if (j.contains("oversample")) t.oversample = get_u64(j["oversample"], "oversample");
  if (j.contains("shuffle")) t.shuffle = get_bool(j["shuffle"], "shuffle");
  if (t.name.empty()) t.name = to_string(t.forbidden);
  return t;
}

Json to_json(const CampaignConfig& c) {
  Json j;
  Json ts = Json::array();
  for (const auto& t : c.templates) ts.push_back(to_json(t));
  j["templates"] = std::move(ts);
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  return j;
}

CampaignConfig campaign_from_json(const Json& j) {
  require_object(j, "campaign", {"templates", "trials", "seed", "workers"});
  CampaignConfig c;
  if (!j.contains("templates") || !j["templates"].is_array() || j["templates"].empty())
    throw InvalidInput("a campaign needs a nonempty 'templates' array");
  for (const auto& t : j["templates"]) c.templates.push_back(template_from_json(t));
  if (j.contains("trials")) c.trials = get_u64(j["trials"], "trials");
  if (j.contains("seed")) c.seed = get_u64(j["seed"], "seed");
  if (j.contains("workers")) c.workers = get_u64(j["workers"], "workers");
  return c;
}

Json to_json(const Counterexample& c) {
  Json j;
  j["index"] = c.index;
  j["instance"] = to_json(c.instance);
  j["ratio"] = num(c.ratio);
  j["failures"] = strings(c.failures);
  return j;
}

Json to_json(const CampaignReport& r, bool timing) {
  Json j;
  j["instances"] = r.instances;
  j["passed"] = r.passed;
  j["failed"] = r.failed;
  j["above_ceiling"] = r.above_ceiling;
  j["seed"] = r.seed;
  j["max_ratio"] = num(r.max_ratio);
  j["worst_residual"] = num(r.worst_residual);
  Json per = Json::array();
  for (const auto& s : r.per_template) {
    Json t;
    t["name"] = s.name;
    t["forbidden"] = to_string(s.forbidden);
    t["mode"] = mode_json(s.mode);
    t["instances"] = s.instances;
    t["passed"] = s.passed;
    t["failed"] = s.failed;
    t["above_ceiling"] = s.above_ceiling;
    t["max_ratio"] = num(s.max_ratio);
    t["worst_residual"] = num(s.worst_residual);
    t["constant"] = num(s.constant);
    t["ceiling"] = num(s.ceiling);
    per.push_back(std::move(t));
  }
  j["per_template"] = std::move(per);
  Json ce = Json::array();
  for (const auto& c : r.counterexamples) ce.push_back(to_json(c));
  j["counterexamples"] = std::move(ce);
  if (timing) j["wall_time"] = num(r.wall_time);
  return j;
}

Json to_json(const OptimizerResult& r) {
  Json j;
  j["ratio"] = num(r.ratio);
  j["best_restart"] = r.best_restart;
  j["iterations_logged"] = r.log.size();
  j["l1"] = num(norm_l1(r.best));
  j["spectrum"] = to_json(r.spectrum);
  return j;
}

std::string optimizer_log_csv(const OptimizerResult& r) {
  std::ostringstream os;
  os << "restart,iteration,ratio,step\n";
  for (const auto& row : r.log)
    os << row.restart << ',' << row.iteration << ',' << num(row.ratio).dump() << ',' << num(row.step).dump() << '\n';
  return os.str();
}

Json to_json(const Measure& m) {
  Json j;
  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    Json atoms = Json::array();
    for (const auto& at : a->atoms) {
      Json e;
      Json t = Json::array();
      for (double x : at.t) t.push_back(num(x));
      e["t"] = std::move(t);
      e["mass"] = cnum(at.mass);
      atoms.push_back(std::move(e));
    }
    j["atoms"] = std::move(atoms);
    return j;
  }
  const auto& f = std::get<DensityMeasure>(m).density;
  j["density"] = {{"grid", to_json(f.spec)}, {"spectrum", to_json(analyze(f))}};
  return j;
}

Measure measure_from_json(const Json& j) {
  require_object(j, "measure", {"atoms", "density"});
  if (j.contains("atoms") == j.contains("density")) throw InvalidInput("a measure has exactly one of 'atoms' and 'density'");
  if (j.contains("atoms")) {
    if (!j["atoms"].is_array()) throw InvalidInput("'atoms' must be an array");
    AtomicMeasure a;
    for (const auto& e : j["atoms"]) {
      require_object(e, "atom", {"t", "mass"});
      if (!e.contains("t") || !e["t"].is_array() || e["t"].empty()) throw InvalidInput("an atom needs a location array 't'");
      Atom at;
      for (const auto& x : e["t"]) {
        double v = to_double(x, "atom location");
        if (!(v > -std::numbers::pi && v <= std::numbers::pi)) throw InvalidInput("atom locations lie in (-pi, pi]");
        at.t.push_back(v);
      }
      if (!a.atoms.empty() && at.t.size() != a.atoms.front().t.size()) throw InvalidInput("atoms must share a dimension");
      at.mass = to_cplx(e.contains("mass") ? e["mass"] : Json(), "atom mass");
      a.atoms.push_back(std::move(at));
    }
    return a;
  }
  const auto& d = j["density"];
  require_object(d, "density", {"grid", "spectrum"});
  if (!d.contains("grid") || !d.contains("spectrum")) throw InvalidInput("a density needs 'grid' and 'spectrum'");
  auto spec = grid_from_json(d["grid"]);
  auto s = spectrum_from_json(d["spectrum"]);
  if (s.half() != spec.half) throw InvalidInput("density spectrum window does not match its grid");
  return DensityMeasure{synth(s, spec)};
}

Json to_json(const ChainReport& r) {
  Json j;
  j["hypothesis"] = r.hypothesis;
  j["k"] = to_json(std::span<const Freq>(r.k));
  j["mu_k"] = num(r.mu_k);
  j["fk_k"] = num(r.fk_k);
  j["fk_l1"] = num(r.fk_l1);
  j["mu_norm"] = num(r.mu_norm);
  j["ratio"] = num(r.ratio);
  j["constant"] = num(r.constant);
  j["hypothesis_residual"] = num(r.hypothesis_residual);
  j["hypothesis_exact"] = r.hypothesis_exact;
  Json links = Json::array();
  for (const auto& l : r.links) links.push_back({{"name", l.name}, {"lhs", num(l.lhs)}, {"rhs", num(l.rhs)}, {"holds", l.holds}});
  j["links"] = std::move(links);
  j["holds"] = r.holds();
  j["replay"] = {{"run", r.replay_run},
                 {"note", r.replay_note},
                 {"split", num(r.replay_split)},
                 {"failures", strings(r.replay_failures)}};
  return j;
}

Json to_json(const LiftedEnumeration& l) {
  Json j;
  j["gamma"] = l.gamma;
  j["pairs"] = to_json(std::span<const Freq>(l.pairs));
  j["extreme"] = {{"holds", l.extreme.holds}, {"exact", l.extreme.exact}};
  return j;
}

Json to_json(const SimpleSReport& r) {
  Json j;
  j["holds"] = r.holds;
  j["projection_holds"] = r.projection_holds;
  j["lifted_s"] = to_json(std::span<const Freq>(r.lifted_s));
  j["eps"] = r.eps;
  j["witnesses"] = strings(r.witnesses);
  return j;
}

Json to_json(const LiftReport& r) {
  Json j;
  j["lifted"] = to_json(r.lifted);
  j["simple_s"] = to_json(r.simple);
  j["hypothesis"] = r.hypothesis;
  j["hypothesis_exact"] = r.hypothesis_exact;
  j["hypothesis_residual"] = num(r.hypothesis_residual);
  j["transferred"] = r.transferred;
  j["mu_norm"] = num(r.mu_norm);
  j["lifted_norm"] = num(r.lifted_norm);
  j["chain"] = to_json(r.chain);
  j["holds"] = r.holds();
  return j;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(); }

}  // namespace paleylab
