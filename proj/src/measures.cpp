#include "paleylab/measures.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "paleylab/combinatorics.hpp"
#include "paleylab/error.hpp"
#include "paleylab/parallel.hpp"
#include "paleylab/riesz.hpp"

namespace paleylab {

namespace {

constexpr double kLinkSlack = 1e-9;
constexpr double kVanishTol = 1e-9;

std::int64_t abs_sum(std::span<const std::int64_t> k) {
  std::int64_t s = 0;
  for (auto x : k) s += std::abs(x);
  return s;
}

cplx gauss(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng)};
}

ChainLink link(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, lhs <= rhs * (1 + kLinkSlack)};
}

// throws naming the smallest n whose coefficient does not vanish
void require_vanishing(const Measure& mu, std::span<const std::int64_t> set, const std::string& what) {
  const double tv = total_variation(mu);
  for (auto n : set)
    if (std::abs(measure_hat(mu, n)) > kVanishTol * tv)
      throw HypothesisViolation("mu^(" + std::to_string(n) + ") does not vanish (" + what + ")", std::to_string(n));
}

void fill_chain(ChainReport& r, double mu_k, double fk_k, double fk_l1, double mu_norm, double C) {
  r.mu_k = mu_k;
  r.fk_k = fk_k;
  r.fk_l1 = fk_l1;
  r.mu_norm = mu_norm;
  r.ratio = mu_k / mu_norm;
  r.constant = 2 * C;
  r.links = {link("mu_K <= 2 fK_K", mu_k, 2 * fk_k), link("2 fK_K <= 2C ||f_K||_1", 2 * fk_k, 2 * C * fk_l1),
             link("2C ||f_K||_1 <= 2C ||mu||", 2 * C * fk_l1, 2 * C * mu_norm)};
}

void record_replay(ChainReport& r, const ProofTrace& t) {
  r.replay_run = true;
  r.replay_split = std::sqrt(t.sum_a2) + std::sqrt(t.sum_b2);
  r.replay_failures = t.failures;
}

double k_norm(const Spectrum& s, std::span<const Freq> K) {
  double a = 0;
  for (const auto& k : K) a += std::norm(s.at(k));
  return std::sqrt(a);
}

double mu_k_norm(const Measure& mu, std::span<const Freq> K) {
  double a = 0;
  for (const auto& k : K) a += std::norm(measure_hat(mu, k));
  return std::sqrt(a);
}

GridSpec default_circle(const Measure& mu, std::int64_t M, const std::optional<GridSpec>& grid) {
  if (const auto* d = std::get_if<DensityMeasure>(&mu)) {
    if (grid && !(*grid == d->density.spec)) throw InvalidInput("a density measure is used on its own grid");
    return d->density.spec;
  }
  return grid ? *grid : GridSpec::circle(default_grid_size(M), M);
}

}  // namespace

std::size_t measure_dim(const Measure& mu) {
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) return a->atoms.empty() ? 1 : a->atoms[0].t.size();
  return std::get<DensityMeasure>(mu).density.spec.dim();
}

double total_variation(const Measure& mu) {
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
    double s = 0;
    for (const auto& at : a->atoms) s += std::abs(at.mass);
    return s;
  }
  return norm_l1(std::get<DensityMeasure>(mu).density);
}

cplx measure_hat(const Measure& mu, const Freq& n) {
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
    cplx s = 0;
    for (const auto& at : a->atoms) {
      if (at.t.size() != n.dim()) throw InvalidInput("frequency dimension does not match the measure");
      double ph = 0;
      for (std::size_t i = 0; i < at.t.size(); ++i) ph += static_cast<double>(n[i]) * at.t[i];
      s += at.mass * std::exp(cplx(0, -ph));
    }
    return s;
  }
  const auto& f = std::get<DensityMeasure>(mu).density;
  if (n.dim() != f.spec.dim()) throw InvalidInput("frequency dimension does not match the measure");
  if (!f.spec.in_window(n)) throw InvalidInput("frequency " + n.to_string() + " lies outside the density's window");
  return coeff(f, n);
}

Spectrum riesz_convolve(const Measure& mu, std::span<const Freq> K, const GridSpec& spec) {
  auto ex = riesz_expansion(K);
  Spectrum s(spec.half);
  for (const auto& [n, num] : ex.numerators()) {
    if (!spec.in_window(n)) throw InvalidInput("Riesz support member " + n.to_string() + " lies outside the window");
    s.set(n, measure_hat(mu, n) * Dyadic::make(num, ex.common_exponent()).value());
  }
  return s;
}

GridFunction riesz_convolve_samples(const Measure& mu, std::span<const Freq> K, const GridSpec& spec) {
  if (const auto* d = std::get_if<DensityMeasure>(&mu)) {
    const auto& g = d->density.spec;
    return synth(riesz_convolve(mu, K, g), g);
  }
  return synth(riesz_convolve(mu, K, spec), spec);
}

const char* to_string(MeasureHypothesis h) {
  switch (h) {
    case MeasureHypothesis::SchurRiesz: return "schur-riesz";
    case MeasureHypothesis::Schur: return "schur";
    case MeasureHypothesis::S: return "s";
  }
  return "schur-riesz";
}

MeasureHypothesis parse_hypothesis(const std::string& s) {
  if (s == "schur-riesz" || s == "schur_riesz") return MeasureHypothesis::SchurRiesz;
  if (s == "schur") return MeasureHypothesis::Schur;
  if (s == "s") return MeasureHypothesis::S;
  throw InvalidInput("unknown hypothesis '" + s + "' (expected schur-riesz, schur or s)");
}

SetReport hypothesis_set(std::span<const std::int64_t> k, MeasureHypothesis h, const Window& w) {
  SetReport out;
  if (k.empty()) return out;
  if (h == MeasureHypothesis::S) {
    for (auto n : s_set(k).members)
      if (contains(w, n)) out.members.push_back(n);
    return out;
  }
  Window sw = w;
  if (h == MeasureHypothesis::SchurRiesz) {
    const auto R = abs_sum(k);
    sw = Window{std::max(w.lo, -R), std::min(w.hi, R)};
    if (sw.lo > sw.hi) return out;
  }
  SetReport schur;
  if (strictly_increasing(k)) {
    schur = schur_set_via_gaps(k, sw);
  } else {
    schur = schur_set(k, sw, 3);
    schur.exact = false;
  }
  out.exact = schur.exact;
  if (h == MeasureHypothesis::Schur) {
    out.members = std::move(schur.members);
    return out;
  }
  auto riesz = riesz_support(k).members;
  std::set_intersection(schur.members.begin(), schur.members.end(), riesz.begin(), riesz.end(),
                        std::back_inserter(out.members));
  return out;
}

double vanishing_residual(const Measure& mu, std::span<const std::int64_t> set) {
  const double tv = total_variation(mu);
  double worst = 0;
  for (auto n : set) worst = std::max(worst, std::abs(measure_hat(mu, n)));
  return tv > 0 ? worst / tv : worst;
}

bool ChainReport::holds() const {
  return !links.empty() && std::ranges::all_of(links, [](const ChainLink& l) { return l.holds; });
}

ChainReport check_measure_bound(const Measure& mu, std::span<const std::int64_t> k, MeasureHypothesis h,
                                const std::optional<GridSpec>& grid, bool replay_on) {
  if (measure_dim(mu) != 1) throw InvalidInput("this chain works on the circle; use the ordered route for several axes");
  if (h == MeasureHypothesis::S) throw InvalidInput("the increasing-K chain needs schur-riesz or schur; use the lift for s");
  if (k.empty()) throw InvalidInput("K must not be empty");
  if (k[0] < 1 || !strictly_increasing(k) || !is_strongly_lacunary(k))
    throw InvalidInput("K must be positive, increasing and strongly lacunary");
  const double tv = total_variation(mu);
  if (!(tv > 0)) throw InvalidInput("the measure is zero");

  const GridSpec spec = default_circle(mu, abs_sum(k), grid);
  if (spec.dim() != 1) throw InvalidInput("grid must be one-dimensional");
  const std::int64_t M = spec.half[0];
  if (M < abs_sum(k)) throw InvalidInput("the window does not hold the Riesz support of K");

  ChainReport r;
  r.hypothesis = to_string(h);
  r.k = to_freqs(k);
  auto H = hypothesis_set(k, h, Window{-M, M});
  r.hypothesis_exact = H.exact;
  require_vanishing(mu, H.members, std::string(to_string(h)) + " set");
  r.hypothesis_residual = vanishing_residual(mu, H.members);

  auto s = riesz_convolve(mu, r.k, spec);
  auto fk = riesz_convolve_samples(mu, r.k, spec);
  fill_chain(r, mu_k_norm(mu, r.k), k_norm(s, r.k), norm_l1(fk), tv, 2.0);

  if (replay_on) {
    try {
      record_replay(r, replay(fk, k, ReplayOptions{ReplayMode::New, DSetKind::Schur, {}, std::nullopt}));
    } catch (const InvalidInput& e) {
      r.replay_note = std::string("replay not run: ") + e.what();
    }
  } else {
    r.replay_note = "replay not requested";
  }
  return r;
}

ChainReport check_measure_bound_ordered(const Measure& mu, std::span<const Freq> K_in, const ConeOrder& order,
                                        const std::optional<GridSpec>& grid) {
  const std::size_t d = measure_dim(mu);
  if (order.dim() != d) throw InvalidInput("order dimension does not match the measure");
  if (K_in.empty()) throw InvalidInput("K must not be empty");
  auto lex = ConeOrder::lex_last(d);
  if (order.kind() == ConeOrder::Kind::Generators) {
    for (const auto& g : order.generators())
      if (!lex.in_strict_cone(g))
        throw InvalidInput("the order does not embed in the lex-last order: generator " + g.to_string());
  }
  std::vector<Freq> K(K_in.begin(), K_in.end());
  for (std::size_t a = 0; a < K.size(); ++a)
    for (std::size_t b = a + 1; b < K.size(); ++b)
      if (order.sign(K[b] - K[a]) == 2)
        throw InvalidInput(K[a].to_string() + " and " + K[b].to_string() + " are not comparable in this order");
  std::ranges::sort(K, [&](const Freq& x, const Freq& y) { return order.less(x, y); });
  if (!is_strongly_lacunary_ordered(K, order)) throw InvalidInput("K is not strongly lacunary in this order");
  const double tv = total_variation(mu);
  if (!(tv > 0)) throw InvalidInput("the measure is zero");

  GridSpec spec;
  if (const auto* dm = std::get_if<DensityMeasure>(&mu)) {
    spec = dm->density.spec;
  } else if (grid) {
    spec = *grid;
  } else {
    for (std::size_t a = 0; a < d; ++a) {
      std::int64_t R = 0;
      for (const auto& k : K) R += std::abs(k[a]);
      spec.half.push_back(std::max<std::int64_t>(R, 1));
      spec.dims.push_back(default_grid_size(spec.half.back()));
    }
  }

  // mu^ vanishes on the strictly negative cone inside the window
  Spectrum probe(spec.half);
  for (std::size_t i = 0; i < probe.size(); ++i) {
    Freq n = probe.freq_at(i);
    if (order.sign(n) != -1) continue;
    if (std::abs(measure_hat(mu, n)) > kVanishTol * tv)
      throw HypothesisViolation("mu^ at " + n.to_string() + " does not vanish (strictly negative cone)", n.to_string());
  }

  ChainReport r;
  r.hypothesis = "negative-cone";
  r.k = K;
  auto s = riesz_convolve(mu, K, spec);
  auto fk = synth(s, spec);
  auto t = replay_group(fk, K, lex, ReplayMode::New);
  fill_chain(r, mu_k_norm(mu, K), k_norm(s, K), norm_l1(fk), tv, t.certified_constant);
  record_replay(r, t);
  return r;
}

DensityMeasure make_density_measure(std::span<const std::int64_t> k, MeasureHypothesis h, std::uint64_t seed,
                                    std::int64_t margin) {
  if (k.empty()) throw InvalidInput("K must not be empty");
  const std::int64_t M = abs_sum(k) + std::max<std::int64_t>(margin, 0);
  auto spec = GridSpec::circle(default_grid_size(M), M);
  auto H = hypothesis_set(k, h, Window{-M, M}).members;
  std::mt19937_64 rng(mix_seed(seed, 2));
  Spectrum s(spec.half);
  for (std::size_t i = 0; i < s.size(); ++i) {
    cplx c = gauss(rng);
    if (!std::binary_search(H.begin(), H.end(), s.freq_at(i)[0])) s.values()[i] = c;
  }
  return {synth(s, spec)};
}

AtomicMeasure make_atomic_measure(std::span<const std::int64_t> k, MeasureHypothesis h, std::uint64_t seed) {
  if (k.empty()) throw InvalidInput("K must not be empty");
  const std::int64_t W = abs_sum(k);
  auto H = hypothesis_set(k, h, Window{-W, W}).members;
  const auto m = static_cast<Eigen::Index>(H.size() + 4);
  std::mt19937_64 rng(mix_seed(seed, 3));
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  std::vector<double> t(static_cast<std::size_t>(m));
  for (auto& x : t) {
    x = u(rng);
    if (x <= -std::numbers::pi) x = std::numbers::pi;
  }
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(H.size()), m);
  for (std::size_t r = 0; r < H.size(); ++r)
    for (Eigen::Index c = 0; c < m; ++c)
      A(static_cast<Eigen::Index>(r), c) = std::exp(cplx(0, -static_cast<double>(H[r]) * t[static_cast<std::size_t>(c)]));

  Eigen::VectorXcd coef(m);
  Eigen::MatrixXcd null;
  if (H.empty()) {
    null = Eigen::MatrixXcd::Identity(m, m);
  } else {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-12 * sv(0)) ++rank;
    null = svd.matrixV().rightCols(m - rank);
  }
  Eigen::VectorXcd z(null.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = gauss(rng);
  coef = null * z;

  AtomicMeasure out;
  double tv = coef.cwiseAbs().sum();
  for (Eigen::Index c = 0; c < m; ++c) out.atoms.push_back({{t[static_cast<std::size_t>(c)]}, coef(c) / tv});
  Measure mu = out;
  if (vanishing_residual(mu, H) > 1e-10)
    throw InvalidInput("atomic instance does not meet its vanishing constraints to 1e-10");
  return out;
}

LiftedEnumeration lift_enumeration(std::span<const std::int64_t> gamma) {
  if (gamma.empty()) throw InvalidInput("the enumeration must not be empty");
  LiftedEnumeration L;
  L.gamma.assign(gamma.begin(), gamma.end());
  const std::size_t J = gamma.size();
  std::vector<Freq> e;
  for (std::size_t j = 0; j < J; ++j) {
    Freq p = Freq::zero(J + 1);
    p[0] = gamma[j];
    p[j + 1] = 1;
    L.pairs.push_back(p);
    e.push_back(Freq::unit(J, j));
  }
  L.extreme = is_extremely_lacunary(e, ConeOrder::lex_last(J), 4);
  return L;
}

bool lifted_less(const Freq& a, const Freq& b) {
  if (a.dim() != b.dim() || a.dim() < 2) throw InvalidInput("lifted frequencies must share a dimension of at least 2");
  for (std::size_t i = a.dim(); i-- > 1;)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

SimpleSReport check_simple_s(std::span<const std::int64_t> gamma) {
  const std::size_t J = gamma.size();
  if (J == 0) throw InvalidInput("the enumeration must not be empty");
  if (J > 8) throw InvalidInput("check_simple_s is capped at J = 8");
  auto L = lift_enumeration(gamma);
  const std::int64_t W = abs_sum(gamma);
  Freq lo = Freq::zero(J + 1), hi = Freq::zero(J + 1);
  lo[0] = -W;
  hi[0] = W;
  for (std::size_t a = 1; a <= J; ++a) lo[a] = -1, hi[a] = 1;
  std::span<const Freq> P(L.pairs);
  auto schur = schur_set(P, BoxWindow{lo, hi}, 2).members;
  auto riesz = riesz_support(P).members;
  std::vector<Freq> sr;
  std::set_intersection(schur.begin(), schur.end(), riesz.begin(), riesz.end(), std::back_inserter(sr));

  SimpleSReport r;
  r.lifted_s = s_set(P).members;
  for (const auto& x : r.lifted_s) {
    std::vector<std::int64_t> eps(x.coords().begin() + 1, x.coords().end());
    r.eps.push_back(std::move(eps));
  }
  std::vector<Freq> only;
  std::set_symmetric_difference(sr.begin(), sr.end(), r.lifted_s.begin(), r.lifted_s.end(), std::back_inserter(only));
  for (const auto& x : only) r.witnesses.push_back(x.to_string() + " lies in exactly one of S and Schur ∩ Riesz");
  r.holds = only.empty();

  auto want = admissible_sign_vectors(J, 1);
  auto got = r.eps;
  std::ranges::sort(got);
  std::ranges::sort(want);
  if (got != want) {
    r.holds = false;
    r.witnesses.push_back("eps list of the lifted S set differs from the admissible sign vectors");
  }

  auto base = s_set(gamma).members;
  for (const auto& x : r.lifted_s)
    if (!std::binary_search(base.begin(), base.end(), x[0])) {
      r.projection_holds = false;
      r.witnesses.push_back(x.to_string() + " projects outside S(gamma)");
    }
  return r;
}

std::vector<std::vector<Freq>> lifted_dsets(const LiftedEnumeration& L, std::int64_t T0) {
  const std::size_t J = L.gamma.size();
  std::int64_t gmax = 0;
  for (auto g : L.gamma) gmax = std::max(gmax, std::abs(g));
  std::vector<std::vector<Freq>> D(J);
  // one box for every j, so truncation keeps D_{j+1} inside D_j. The lifted
  // part of d = -sum n_i (e_{i+1} - e_i) gives n_i as partial sums.
  std::vector<std::int64_t> y(J, -2);
  while (true) {
    std::vector<std::int64_t> n(J > 0 ? J - 1 : 0);  // n[i-1] is n_i
    std::int64_t run = 0;
    bool ok = true, any = false;
    for (std::size_t i = 0; i + 1 < J; ++i) {
      run += y[i];
      n[i] = run;
      ok = ok && run >= 0;
      any = any || run > 0;
    }
    if (ok && any && run + y[J - 1] == 0) {
      std::int64_t first = 0;
      for (std::size_t q = 0; q + 1 < J; ++q) first -= n[q] * (L.gamma[q + 1] - L.gamma[q]);
      if (std::abs(first) <= T0 - gmax) {
        Freq d = Freq::zero(J + 1);
        d[0] = first;
        for (std::size_t a = 0; a < J; ++a) d[a + 1] = y[a];
        for (std::size_t jp = 1; jp < J; ++jp) {
          // nonzero n_i with i <= jp form a block ending at jp, or there are none
          std::size_t lo = jp + 1;
          if (n[jp - 1] > 0) {
            lo = jp;
            while (lo > 1 && n[lo - 2] > 0) --lo;
          }
          bool block = true;
          for (std::size_t q = 1; q < std::min(lo, jp + 1); ++q) block = block && n[q - 1] == 0;
          if (block) D[jp - 1].push_back(d);
        }
      }
    }
    std::size_t a = J;
    while (a-- > 0 && y[a] == 1) y[a] = -2;
    if (a == static_cast<std::size_t>(-1)) break;
    ++y[a];
  }
  for (auto& dj : D) std::ranges::sort(dj);
  return D;
}

LiftReport lift_pipeline(const Measure& mu, std::span<const std::int64_t> gamma, MeasureHypothesis h,
                         std::size_t replay_rows) {
  if (measure_dim(mu) != 1) throw InvalidInput("the lift starts from a measure on the circle");
  std::set<std::int64_t> uniq(gamma.begin(), gamma.end());
  if (uniq.size() != gamma.size()) throw InvalidInput("enumeration entries must be distinct");
  const double tv = total_variation(mu);
  if (!(tv > 0)) throw InvalidInput("the measure is zero");

  LiftReport r;
  r.lifted = lift_enumeration(gamma);
  r.simple = check_simple_s(gamma);
  r.hypothesis = to_string(h);
  const std::size_t J = gamma.size();
  const std::int64_t MR = abs_sum(gamma);

  std::int64_t Mh = MR;
  std::size_t N0 = default_grid_size(MR);
  if (const auto* d = std::get_if<DensityMeasure>(&mu)) {
    Mh = d->density.spec.half[0];
    N0 = d->density.spec.dims[0];
    if (Mh < MR) throw InvalidInput("the density's window does not hold the Riesz support of the enumeration");
  }
  auto H = hypothesis_set(gamma, h, Window{-Mh, Mh});
  r.hypothesis_exact = H.exact;
  require_vanishing(mu, H.members, std::string(to_string(h)) + " set");
  r.hypothesis_residual = vanishing_residual(mu, H.members);

  // the lifted measure sees only mu^(first coordinate) on the lifted S set
  double worst = 0;
  for (const auto& x : r.simple.lifted_s) worst = std::max(worst, std::abs(measure_hat(mu, x[0])));
  r.transferred = worst <= kVanishTol * tv;
  r.mu_norm = tv;
  r.lifted_norm = tv;  // mu~ is mu placed on the slice s = 0

  GridSpec lg;
  lg.dims.push_back(N0);
  lg.half.push_back(MR);
  for (std::size_t a = 0; a < J; ++a) lg.dims.push_back(3), lg.half.push_back(1);
  std::span<const Freq> P(r.lifted.pairs);
  auto ex = riesz_expansion(P);
  Spectrum s(lg.half);
  for (const auto& [x, num] : ex.numerators()) s.set(x, measure_hat(mu, x[0]) * Dyadic::make(num, ex.common_exponent()).value());
  GridFunction ft = synth(s, lg);

  ChainReport& c = r.chain;
  c.hypothesis = r.hypothesis;
  c.hypothesis_exact = r.hypothesis_exact;
  c.hypothesis_residual = r.hypothesis_residual;
  c.k = r.lifted.pairs;
  fill_chain(c, mu_k_norm(mu, to_freqs(gamma)), k_norm(s, P), norm_l1(ft), r.lifted_norm, 2.0);

  std::int64_t gmax = 0;
  for (auto g : gamma) gmax = std::max(gmax, std::abs(g));
  const std::size_t Nr = default_grid_size(std::max(MR, (MR + 3 * gmax + 1) / 2));
  std::size_t rows = Nr;
  for (std::size_t a = 0; a < J; ++a) rows *= 4;
  if (rows > replay_rows) {
    c.replay_note = "lifted replay skipped: " + std::to_string(rows) + " grid points, cap " + std::to_string(replay_rows);
    return r;
  }
  GridSpec rg;
  rg.dims.push_back(Nr);
  rg.half.push_back(MR);
  for (std::size_t a = 0; a < J; ++a) rg.dims.push_back(4), rg.half.push_back(1);
  const auto T0 = static_cast<std::int64_t>(Nr) - MR - 1;
  try {
    record_replay(c, replay_sets(synth(s, rg), P, lifted_dsets(r.lifted, T0), ReplayMode::New));
  } catch (const InvalidInput& e) {
    c.replay_note = std::string("lifted replay not run: ") + e.what();
  }
  return r;
}

}  // namespace paleylab
