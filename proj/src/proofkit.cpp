#include "paleylab/proofkit.hpp"

#include <algorithm>
#include <cmath>
#include <ranges>
#include <set>

#include "paleylab/combinatorics.hpp"
#include "paleylab/error.hpp"

namespace paleylab {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

Vec to_vec(const GridFunction& f) { return Eigen::Map<const Vec>(f.samples.data(), static_cast<Eigen::Index>(f.samples.size())); }

Vec phase(const GridSpec& spec, const Freq& n) { return to_vec(GridFunction::character(spec, n)); }

Mat generators(std::span<const Freq> D, const GridFunction* carrier, const GridSpec& spec) {
  Mat G(static_cast<Eigen::Index>(spec.size()), static_cast<Eigen::Index>(D.size()));
  for (std::size_t c = 0; c < D.size(); ++c) {
    Vec col = phase(spec, D[c]);
    if (carrier) col = col.cwiseProduct(to_vec(*carrier));
    G.col(static_cast<Eigen::Index>(c)) = col;
  }
  return G;
}

Mat svd_basis(const Mat& G) {
  if (G.cols() == 0) return Mat(G.rows(), 0);
  Eigen::BDCSVD<Mat> svd(G, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  if (sv.size() > 0 && sv(0) > 0)
    while (r < sv.size() && sv(r) > 1e-10 * sv(0)) ++r;
  return svd.matrixU().leftCols(r);
}

struct Nest {
  std::vector<Mat> bases;
  bool from_qr = true;
};

// sets[0] ⊆ sets[1] ⊆ ...; one QR over the chain when it really is a chain
Nest nested_bases(const std::vector<std::vector<Freq>>& sets, const GridFunction* carrier, const GridSpec& spec) {
  Nest out;
  const auto N = static_cast<Eigen::Index>(spec.size());
  std::vector<Freq> cols;
  std::set<Freq> seen;
  bool chain = true;
  for (const auto& s : sets) {
    std::set<Freq> cur(s.begin(), s.end());
    if (!std::includes(cur.begin(), cur.end(), seen.begin(), seen.end())) chain = false;
    for (const auto& n : s)
      if (seen.insert(n).second) cols.push_back(n);
  }
  if (chain && static_cast<Eigen::Index>(cols.size()) <= N) {
    Mat G = generators(cols, carrier, spec);
    if (G.cols() == 0) {
      out.bases.assign(sets.size(), Mat(N, 0));
      return out;
    }
    Eigen::HouseholderQR<Mat> qr(G);
    Eigen::VectorXd diag = qr.matrixQR().diagonal().cwiseAbs();
    if (diag.maxCoeff() > 0 && diag.minCoeff() >= 1e-8 * diag.maxCoeff()) {
      Mat Q = qr.householderQ() * Mat::Identity(N, G.cols());
      for (const auto& s : sets) out.bases.push_back(Q.leftCols(static_cast<Eigen::Index>(s.size())));
      return out;
    }
  }
  out.from_qr = false;
  for (const auto& s : sets) out.bases.push_back(svd_basis(generators(s, carrier, spec)));
  return out;
}

// Every residue whose representative is outside the window or flagged by
// `forbidden` must carry a vanishing coefficient.
template <class Pred>
void require_vanishing(const GridFunction& f, Pred forbidden, const std::string& what) {
  const auto& spec = f.spec;
  auto c = dft(f);
  double tol = kIdentityTol * norm_l2(f);
  std::optional<Freq> worst;
  bool outside = false;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (std::abs(c[i]) <= tol) continue;
    Freq r = spec.residue_rep(i);
    bool out_of_window = !spec.in_window(r);
    if (!out_of_window && !forbidden(r)) continue;
    if (!worst || r < *worst) {
      worst = r;
      outside = out_of_window;
    }
  }
  if (!worst) return;
  if (outside)
    throw HypothesisViolation("f is not band-limited to the window: coefficient at " + worst->to_string() +
                                  " does not vanish",
                              worst->to_string());
  throw HypothesisViolation("coefficient at " + worst->to_string() + " does not vanish (" + what + ")",
                            worst->to_string());
}

void require_in_window(std::span<const Freq> K, const GridSpec& spec) {
  for (const auto& k : K) {
    if (k.dim() != spec.dim()) throw InvalidInput("frequency dimension does not match grid");
    if (!spec.in_window(k)) throw InvalidInput("K member " + k.to_string() + " lies outside the window");
  }
  std::set<Freq> uniq(K.begin(), K.end());
  if (uniq.size() != K.size()) throw InvalidInput("enumeration entries must be distinct");
}

// Classic organization: g analytic, conj(h) analytic, both with respect to the order.
void require_analytic(const Factorization& fz, const GridFunction& f, const ConeOrder& order) {
  if (!(fz.g.spec == f.spec) || !(fz.h.spec == f.spec)) throw InvalidInput("factorization grid does not match f");
  auto [mod, prod] = factorization_residuals(fz, f);
  if (mod > kResidualTol || prod > kResidualTol)
    throw InvalidInput("supplied factorization does not satisfy |g| = |h| and g conj(h) = f");
  auto check = [&](const GridFunction& u, int bad_sign, const char* name) {
    auto c = dft(u);
    double tol = kIdentityTol * std::max(norm_l2(u), 1e-300);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (std::abs(c[i]) <= tol) continue;
      Freq r = u.spec.residue_rep(i);
      if (order.sign(r) == bad_sign)
        throw InvalidInput(std::string("classic mode needs an analytic factorization: ") + name + " has a coefficient at " +
                           r.to_string());
    }
  };
  check(fz.g, -1, "g");
  check(fz.h, +1, "h");
}

struct Setup {
  ReplayMode mode = ReplayMode::New;
  DSetKind dsets = DSetKind::HalfLine;
  std::vector<Freq> k;
  // New/Classic: D_1..D_J. Complementary: index sets of M_1..M_J.
  std::vector<std::vector<Freq>> sets;
  std::int64_t depth = 0;
  std::optional<bool> s_membership, s_antinesting, s_nesting;
};

double rel(const Vec& x, double scale) { return scale > 0 ? x.norm() / scale : x.norm(); }

ProofTrace run(const GridFunction& f, const Factorization& fz, const Setup& s) {
  const auto& spec = f.spec;
  const double N = static_cast<double>(spec.size());
  const std::size_t J = s.k.size();
  const bool comp = s.mode == ReplayMode::Complementary;

  ProofTrace t;
  t.mode = s.mode;
  t.dsets = s.dsets;
  t.k = s.k;
  t.depth = s.depth;
  t.structural_membership = s.s_membership;
  t.structural_antinesting = s.s_antinesting;
  t.structural_nesting = s.s_nesting;

  const Vec g = to_vec(fz.g), h = to_vec(fz.h);
  const GridFunction* carrier = s.mode == ReplayMode::Classic ? nullptr : &fz.h;

  std::vector<std::vector<Freq>> chain = s.sets;
  if (!comp) std::reverse(chain.begin(), chain.end());
  Nest nest = nested_bases(chain, carrier, spec);
  if (!comp) std::reverse(nest.bases.begin(), nest.bases.end());
  t.basis_from_qr = nest.from_qr;
  // U[j] spans L_j (or M_j); U[0] is the zero subspace
  std::vector<Mat> U;
  U.emplace_back(static_cast<Eigen::Index>(spec.size()), 0);
  for (auto& b : nest.bases) U.push_back(std::move(b));

  std::vector<Vec> ph{Vec()};
  for (const auto& k : s.k) ph.push_back(phase(spec, k));

  auto ip = [&](const Vec& a, const Vec& b) { return b.dot(a) / N; };
  auto P = [&](std::size_t j, const Vec& v) -> Vec {
    if (U[j].cols() == 0) return Vec::Zero(v.size());
    return U[j] * (U[j].adjoint() * v);
  };
  // New/Classic: Q_j = A_{j+1} P_j A_{j+1}^*, Q_0 = 0, Q_J = I.
  // Complementary: Q_j = A_j P_j A_j^*, Q_0 = 0, Q_{J+1} = I.
  auto Q = [&](std::size_t j, const Vec& v) -> Vec {
    if (j == 0) return Vec::Zero(v.size());
    std::size_t top = comp ? J + 1 : J;
    if (j == top) return v;
    const Vec& p = comp ? ph[j] : ph[j + 1];
    return p.cwiseProduct(P(j, p.conjugate().cwiseProduct(v)));
  };
  // A_i P_j v against an explicitly modulated basis of A_i L_j
  auto intertwining = [&](std::size_t i, std::size_t j, const Vec& v) {
    if (U[j].cols() == 0) return 0.0;
    Vec lhs = ph[i].cwiseProduct(P(j, v));
    Mat Z = ph[i].asDiagonal() * U[j];
    Vec rhs = Z * (Z.adjoint() * ph[i].cwiseProduct(v));
    return rel(lhs - rhs, v.norm());
  };

  auto fhat = analyze(f);
  const double gn = g.norm(), hn = h.norm();
  double k2 = 0;
  for (std::size_t j = 1; j <= J; ++j) {
    ProofStep st;
    st.j = j;
    st.dim_l = static_cast<std::size_t>(U[j].cols());
    const Vec Ah = ph[j].cwiseProduct(h);
    st.target = fhat.at(s.k[j - 1]);
    if (!comp) {
      Vec qg = Q(j, g), qg_prev = Q(j - 1, g);
      st.a = ip(qg - qg_prev, Ah);
      st.b = ip(qg_prev, Ah);
      st.b_two_projection = ip(g, ph[j].cwiseProduct(P(j - 1, h) - P(j, h)));
      if (j < J) {
        Vec w = ph[j + 1].conjugate().cwiseProduct(Ah);
        st.membership = rel(w - P(j, w), hn);
        for (const Vec* v : {&h, &g}) {
          Vec x = P(j + 1, *v);
          st.p_nest = std::max(st.p_nest, rel(P(j, x) - x, v->norm()));
        }
      }
      if (j >= 2) st.intertwining = std::max(intertwining(j, j - 1, h), intertwining(j, j - 1, g));
      if (U[j].cols() > 0) st.orthogonality = (U[j].adjoint() * ph[j].conjugate().cwiseProduct(g)).cwiseAbs().maxCoeff() / gn;
      if (j + 2 <= J) {
        Vec x = Q(j, g);
        st.q_nest = rel(Q(j + 1, x) - x, gn);
      }
    } else {
      Vec qg = Q(j, g);
      st.a = ip(Q(j + 1, g) - qg, Ah);
      st.b = ip(g, ph[j].cwiseProduct(P(j, h) - P(j - 1, h)));
      st.b_two_projection = ip(qg, Ah) - ip(g, ph[j].cwiseProduct(P(j - 1, h)));
      if (j < J) {
        st.membership = rel(Ah - Q(j + 1, Ah), hn);
        for (const Vec* v : {&h, &g}) {
          Vec x = P(j, *v);
          st.p_nest = std::max(st.p_nest, rel(P(j + 1, x) - x, v->norm()));
        }
        st.q_nest = rel(Q(j + 1, qg) - qg, gn);
      }
      st.intertwining = std::max(intertwining(j, j, h), intertwining(j, j, g));
      if (j >= 2 && U[j - 1].cols() > 0)
        st.orthogonality = (U[j - 1].adjoint() * ph[j].conjugate().cwiseProduct(g)).cwiseAbs().maxCoeff() / gn;
    }
    st.identity_residual = std::abs(st.a + st.b - st.target);
    st.b_residual = std::abs(st.b - st.b_two_projection);
    t.sum_a2 += std::norm(st.a);
    t.sum_b2 += std::norm(st.b);
    k2 += std::norm(st.target);
    t.steps.push_back(st);
  }

  t.g_norm2 = gn * gn / N;
  t.h_norm2 = hn * hn / N;
  t.f_norm2 = std::pow(norm_l2(f), 2);
  t.f_l1 = norm_l1(f);
  t.k_norm = std::sqrt(k2);
  t.ratio = t.f_l1 > 0 ? t.k_norm / t.f_l1 : 0.0;

  const double id_tol = kIdentityTol * std::sqrt(t.f_norm2);
  auto fail = [&](const std::string& name, std::size_t j) {
    t.failures.push_back(j ? name + " j=" + std::to_string(j) : name);
  };
  if (s.s_membership == false) fail("structural_membership", 0);
  if (s.s_antinesting == false) fail("structural_antinesting", 0);
  if (s.s_nesting == false) fail("structural_nesting", 0);
  for (const auto& st : t.steps) {
    t.worst_identity = std::max(t.worst_identity, st.identity_residual);
    t.worst_b = std::max(t.worst_b, st.b_residual);
    t.worst_membership = std::max(t.worst_membership, st.membership);
    t.worst_intertwining = std::max(t.worst_intertwining, st.intertwining);
    t.worst_orthogonality = std::max(t.worst_orthogonality, st.orthogonality);
    t.worst_p_nest = std::max(t.worst_p_nest, st.p_nest);
    t.worst_q_nest = std::max(t.worst_q_nest, st.q_nest);
    if (st.identity_residual > id_tol) fail("identity", st.j);
    if (st.b_residual > id_tol) fail("b_projection", st.j);
    if (st.membership > kResidualTol) fail("membership", st.j);
    if (st.intertwining > kResidualTol) fail("intertwining", st.j);
    if (st.orthogonality > kResidualTol) fail("orthogonality", st.j);
    if (st.p_nest > kResidualTol) fail("p_nest", st.j);
    if (st.q_nest > kResidualTol) fail("q_nest", st.j);
  }
  const double gh = t.g_norm2 * t.h_norm2;
  if (t.sum_a2 > gh * (1 + kSlack)) fail("sum_a2", 0);
  if (t.sum_b2 > gh * (1 + kSlack)) fail("sum_b2", 0);
  const double split = std::sqrt(t.sum_a2) + std::sqrt(t.sum_b2);
  if (t.k_norm > split * (1 + kSlack) + id_tol * std::sqrt(static_cast<double>(J))) fail("split", 0);
  if (split > t.certified_constant * t.f_l1 * (1 + kSlack)) fail("certified_bound", 0);
  if (t.ratio > t.certified_constant + kSlack) fail("ratio", 0);
  return t;
}

bool subset(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  std::set<std::int64_t> sb(b.begin(), b.end());
  return std::ranges::all_of(a, [&](auto x) { return sb.count(x) > 0; });
}

}  // namespace

Factorization factorize(const GridFunction& f) {
  Factorization fz{f, f};
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    double r = std::abs(f.samples[i]);
    if (r == 0) {
      fz.g.samples[i] = fz.h.samples[i] = 0;
      continue;
    }
    double s = std::sqrt(r);
    fz.h.samples[i] = s;
    fz.g.samples[i] = f.samples[i] / s;
  }
  return fz;
}

std::pair<double, double> factorization_residuals(const Factorization& fz, const GridFunction& f) {
  double mod = 0, prod = 0, scale = 0;
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    scale = std::max(scale, std::abs(f.samples[i]));
    mod = std::max(mod, std::abs(std::abs(fz.g.samples[i]) - std::abs(fz.h.samples[i])));
    prod = std::max(prod, std::abs(fz.g.samples[i] * std::conj(fz.h.samples[i]) - f.samples[i]));
  }
  if (scale == 0) return {mod, prod};
  // |g| and |h| scale like sqrt|f|
  return {mod / std::sqrt(scale), prod / scale};
}

Subspace span_subspace(std::span<const Freq> D, const GridFunction* carrier, const GridSpec& spec) {
  if (carrier && !(carrier->spec == spec)) throw InvalidInput("grid spec mismatch");
  Subspace s;
  s.basis = svd_basis(generators(D, carrier, spec));
  s.source.assign(D.begin(), D.end());
  s.bare = carrier == nullptr;
  return s;
}

GridFunction project(const GridFunction& v, const Subspace& S) {
  if (static_cast<std::size_t>(S.basis.rows()) != v.samples.size()) throw InvalidInput("grid spec mismatch");
  GridFunction out = v;
  if (S.rank() == 0) {
    std::fill(out.samples.begin(), out.samples.end(), cplx(0.0));
    return out;
  }
  Vec p = S.basis * (S.basis.adjoint() * to_vec(v));
  std::copy(p.data(), p.data() + p.size(), out.samples.begin());
  return out;
}

const char* to_string(ReplayMode m) {
  switch (m) {
    case ReplayMode::New: return "new";
    case ReplayMode::Classic: return "classic";
    case ReplayMode::Complementary: return "complementary";
  }
  return "new";
}

ReplayMode parse_mode(const std::string& s) {
  if (s == "new") return ReplayMode::New;
  if (s == "classic") return ReplayMode::Classic;
  if (s == "complementary") return ReplayMode::Complementary;
  throw InvalidInput("unknown replay mode '" + s + "' (expected new, classic or complementary)");
}

const char* to_string(DSetKind k) {
  switch (k) {
    case DSetKind::HalfLine: return "half-line";
    case DSetKind::Schur: return "schur";
    case DSetKind::Explicit: return "explicit";
  }
  return "half-line";
}

DSetKind parse_dsets(const std::string& s) {
  if (s == "half-line" || s == "halfline") return DSetKind::HalfLine;
  if (s == "schur") return DSetKind::Schur;
  if (s == "explicit") return DSetKind::Explicit;
  throw InvalidInput("unknown index-set family '" + s + "' (expected half-line, schur or explicit)");
}

ProofTrace replay(const GridFunction& f, std::span<const std::int64_t> k, const ReplayOptions& opt) {
  const auto& spec = f.spec;
  spec.validate();
  if (spec.dim() != 1) throw InvalidInput("replay works on the circle; use replay_group for several axes");
  auto K = to_freqs(k);
  require_in_window(K, spec);
  const std::size_t J = k.size();
  const auto N = static_cast<std::int64_t>(spec.dims[0]);
  const std::int64_t M = spec.half[0];
  const std::int64_t T = N - M - 1;  // |n| <= T never aliases into the window

  Setup s;
  s.mode = opt.mode;
  s.dsets = opt.dsets;
  s.k = K;

  if (opt.mode == ReplayMode::Complementary) {
    if (opt.dsets != DSetKind::HalfLine) throw InvalidInput("complementary mode uses its own index sets");
    if (!std::ranges::all_of(k, [](auto x) { return x > 0; }) || !strictly_increasing(k) || !is_strongly_lacunary(k))
      throw InvalidInput("complementary mode needs positive, increasing, strongly lacunary K");
    std::set<std::int64_t> ks(k.begin(), k.end());
    require_vanishing(f, [&](const Freq& n) { return n[0] > 0 && !ks.count(n[0]); }, "positive frequency outside K");
    for (std::size_t j = 0; j < J; ++j) {
      std::vector<Freq> m;
      for (std::int64_t n = -1; n >= -k[j]; --n) m.push_back(n);
      s.sets.push_back(std::move(m));
    }
    s.depth = J ? k.back() : 0;
    return run(f, factorize(f), s);
  }

  Factorization fz;
  if (opt.mode == ReplayMode::Classic) {
    if (!opt.factorization) throw InvalidInput("classic mode needs a supplied factorization with g and conj(h) analytic");
    require_analytic(*opt.factorization, f, ConeOrder::half_line());
    fz = *opt.factorization;
  } else {
    fz = opt.factorization ? *opt.factorization : factorize(f);
    if (opt.factorization) {
      auto [mod, prod] = factorization_residuals(fz, f);
      if (mod > kResidualTol || prod > kResidualTol)
        throw InvalidInput("supplied factorization does not satisfy |g| = |h| and g conj(h) = f");
    }
  }

  const std::int64_t kmin = J ? *std::ranges::min_element(k) : 0;
  const std::int64_t B = T + kmin;
  s.depth = B;
  switch (opt.dsets) {
    case DSetKind::HalfLine: {
      if (!std::ranges::all_of(k, [](auto x) { return x >= 0; }) || !strictly_increasing(k) || !is_strongly_lacunary(k))
        throw InvalidInput("K must be nonnegative, increasing and strongly lacunary");
      require_vanishing(f, [](const Freq& n) { return n[0] < 0; }, "negative frequency");
      for (std::size_t j = 0; j < J; ++j) {
        std::vector<Freq> d;
        for (std::int64_t n = -k[j] - 1; n >= -B; --n) d.push_back(n);
        s.sets.push_back(std::move(d));
      }
      // untruncated sets (-inf, -k_j - 1]: conditions reduce to inequalities
      bool mem = true, nest = true;
      for (std::size_t j = 0; j + 1 < J; ++j) mem = mem && k[j] - k[j + 1] <= -k[j] - 1;
      for (std::size_t j = 0; j + 2 < J; ++j) nest = nest && k[j + 1] - k[j] <= k[j + 2] - k[j + 1];
      s.s_membership = mem;
      s.s_antinesting = true;
      s.s_nesting = nest;
      break;
    }
    case DSetKind::Schur: {
      if (!strictly_increasing(k)) throw InvalidInput("Schur-derived index sets need an increasing enumeration");
      auto schur = schur_set_via_gaps(k, Window{-M, M}).members;
      require_vanishing(f, [&](const Freq& n) { return std::binary_search(schur.begin(), schur.end(), n[0]); },
                        "Schur set");
      std::vector<std::vector<std::int64_t>> D;
      for (std::size_t j = 1; j <= J; ++j) D.push_back(d_set(j, k, Window{-B, -1}).members);
      bool mem = true, anti = true, nest = true;
      for (std::size_t j = 0; j + 1 < J; ++j) {
        mem = mem && std::binary_search(D[j].begin(), D[j].end(), k[j] - k[j + 1]);
        anti = anti && subset(D[j + 1], D[j]);
      }
      // D_j + k_{j+1} = G_{j+1}: nesting G_{j+1} ⊆ G_{j+2}, on a window wide enough for the trace
      Window gw{-B, J ? k.back() : 0};
      for (std::size_t j = 1; j + 2 <= J; ++j) nest = nest && subset(g_set(j, k, gw).members, g_set(j + 1, k, gw).members);
      s.s_membership = mem;
      s.s_antinesting = anti;
      s.s_nesting = nest;
      for (auto& d : D) {
        std::vector<Freq> v(d.rbegin(), d.rend());
        s.sets.push_back(std::move(v));
      }
      break;
    }
    case DSetKind::Explicit: {
      if (opt.explicit_dsets.size() != J) throw InvalidInput("explicit index sets must list D_1..D_J");
      std::set<std::int64_t> forbidden;
      std::vector<std::vector<std::int64_t>> D;
      for (std::size_t j = 0; j < J; ++j) {
        std::set<std::int64_t> d(opt.explicit_dsets[j].begin(), opt.explicit_dsets[j].end());
        for (auto n : d) {
          if (std::abs(n + k[j]) > T)
            throw InvalidInput("index set D_" + std::to_string(j + 1) + " reaches frequency " + std::to_string(n + k[j]) +
                               ", which aliases into the window on this grid");
          forbidden.insert(n + k[j]);
        }
        D.emplace_back(d.begin(), d.end());
      }
      require_vanishing(f, [&](const Freq& n) { return forbidden.count(n[0]) > 0; }, "union of D_j + k_j");
      bool mem = true, anti = true, nest = true;
      for (std::size_t j = 0; j + 1 < J; ++j) {
        mem = mem && std::binary_search(D[j].begin(), D[j].end(), k[j] - k[j + 1]);
        anti = anti && subset(D[j + 1], D[j]);
      }
      for (std::size_t j = 0; j + 2 < J; ++j) {
        std::vector<std::int64_t> a, b;
        for (auto n : D[j]) a.push_back(n + k[j + 1]);
        for (auto n : D[j + 1]) b.push_back(n + k[j + 2]);
        nest = nest && subset(a, b);
      }
      s.s_membership = mem;
      s.s_antinesting = anti;
      s.s_nesting = nest;
      for (auto& d : D) s.sets.push_back(to_freqs(d));
      break;
    }
  }
  return run(f, fz, s);
}

ProofTrace replay_group(const GridFunction& f, std::span<const Freq> K_in, const ConeOrder& order, ReplayMode mode,
                        const std::optional<Factorization>& fz_in) {
  const auto& spec = f.spec;
  spec.validate();
  if (order.dim() != spec.dim()) throw InvalidInput("order dimension does not match grid");
  if (mode == ReplayMode::Complementary) throw InvalidInput("complementary mode is only defined on the circle");
  require_in_window(K_in, spec);
  std::vector<Freq> K(K_in.begin(), K_in.end());
  for (std::size_t a = 0; a < K.size(); ++a)
    for (std::size_t b = a + 1; b < K.size(); ++b)
      if (order.sign(K[b] - K[a]) == 2)
        throw InvalidInput(K[a].to_string() + " and " + K[b].to_string() + " are not comparable in this order");
  std::ranges::sort(K, [&](const Freq& x, const Freq& y) { return order.less(x, y); });
  if (!is_strongly_lacunary_ordered(K, order)) throw InvalidInput("K is not strongly lacunary in this order");
  require_vanishing(f, [&](const Freq& n) { return order.sign(n) == -1; }, "strictly negative cone");

  Factorization fz;
  if (mode == ReplayMode::Classic) {
    if (!fz_in) throw InvalidInput("classic mode needs a supplied factorization with g and conj(h) analytic");
    require_analytic(*fz_in, f, order);
    fz = *fz_in;
  } else {
    fz = fz_in ? *fz_in : factorize(f);
  }

  // candidate box: gamma + gamma_j stays within the non-aliasing box for every j
  const std::size_t d = spec.dim();
  std::vector<std::int64_t> lo(d), hi(d);
  std::int64_t depth = 0;
  for (std::size_t a = 0; a < d; ++a) {
    const auto Na = static_cast<std::int64_t>(spec.dims[a]);
    const std::int64_t T = Na - spec.half[a] - 1;
    std::int64_t mn = 0, mx = 0;
    if (!K.empty()) {
      mn = mx = K[0][a];
      for (const auto& k : K) mn = std::min(mn, k[a]), mx = std::max(mx, k[a]);
    }
    lo[a] = -T - mn;
    hi[a] = T - mx;
    if (hi[a] - lo[a] + 1 > Na) {
      // keep Na values, as centred on 0 as the range allows
      std::int64_t l = std::clamp<std::int64_t>(-(Na - 1) / 2, lo[a], hi[a] - Na + 1);
      lo[a] = l;
      hi[a] = l + Na - 1;
    }
    depth = std::max(depth, -lo[a]);
  }
  std::vector<Freq> box;
  if (std::ranges::all_of(std::views::iota(std::size_t{0}, d), [&](std::size_t a) { return lo[a] <= hi[a]; })) {
    Freq cur(lo);
    while (true) {
      box.push_back(cur);
      std::size_t a = d;
      while (a-- > 0) {
        if (cur[a] < hi[a]) {
          ++cur[a];
          break;
        }
        cur[a] = lo[a];
      }
      if (a == static_cast<std::size_t>(-1)) break;
    }
  }

  Setup s;
  s.mode = mode;
  s.dsets = DSetKind::HalfLine;
  s.k = K;
  s.depth = depth;
  const std::size_t J = K.size();
  for (std::size_t j = 0; j < J; ++j) {
    std::vector<Freq> D;
    for (const auto& c : box)
      if (order.less(c, -K[j])) D.push_back(c);
    s.sets.push_back(std::move(D));
  }
  bool mem = true, nest = true;
  for (std::size_t j = 0; j + 1 < J; ++j) mem = mem && order.less(K[j] - K[j + 1], -K[j]);
  for (std::size_t j = 0; j + 2 < J; ++j) nest = nest && order.in_cone((K[j + 2] - K[j + 1]) - (K[j + 1] - K[j]));
  s.s_membership = mem;
  s.s_antinesting = true;
  s.s_nesting = nest;
  return run(f, fz, s);
}

}  // namespace paleylab

namespace paleylab {

ProofTrace replay_sets(const GridFunction& f, std::span<const Freq> K, const std::vector<std::vector<Freq>>& D_in,
                       ReplayMode mode, const std::optional<Factorization>& fz_in, std::optional<bool> nesting) {
  const auto& spec = f.spec;
  spec.validate();
  if (mode == ReplayMode::Complementary) throw InvalidInput("complementary mode uses its own index sets");
  require_in_window(K, spec);
  const std::size_t J = K.size();
  if (D_in.size() != J) throw InvalidInput("index sets must list D_1..D_J");
  const std::size_t d = spec.dim();

  std::set<Freq> forbidden;
  std::vector<std::set<Freq>> D;
  std::int64_t depth = 0;
  for (std::size_t j = 0; j < J; ++j) {
    D.emplace_back(D_in[j].begin(), D_in[j].end());
    for (const auto& n : D[j]) {
      if (n.dim() != d) throw InvalidInput("frequency dimension does not match grid");
      Freq m = n + K[j];
      for (std::size_t a = 0; a < d; ++a) {
        const auto T = static_cast<std::int64_t>(spec.dims[a]) - spec.half[a] - 1;
        if (std::abs(m[a]) > T)
          throw InvalidInput("index set D_" + std::to_string(j + 1) + " reaches frequency " + m.to_string() +
                             ", which aliases into the window on this grid");
        depth = std::max(depth, -n[a]);
      }
      forbidden.insert(m);
    }
  }
  require_vanishing(f, [&](const Freq& n) { return forbidden.count(n) > 0; }, "union of D_j + k_j");

  Factorization fz;
  if (mode == ReplayMode::Classic) {
    if (!fz_in) throw InvalidInput("classic mode needs a supplied factorization");
    fz = *fz_in;
  } else {
    fz = fz_in ? *fz_in : factorize(f);
  }
  if (fz_in) {
    if (!(fz.g.spec == spec) || !(fz.h.spec == spec)) throw InvalidInput("factorization grid does not match f");
    auto [mod, prod] = factorization_residuals(fz, f);
    if (mod > kResidualTol || prod > kResidualTol)
      throw InvalidInput("supplied factorization does not satisfy |g| = |h| and g conj(h) = f");
  }

  Setup s;
  s.mode = mode;
  s.dsets = DSetKind::Explicit;
  s.k.assign(K.begin(), K.end());
  s.depth = depth;
  bool mem = true, anti = true, nest = true;
  for (std::size_t j = 0; j + 1 < J; ++j) {
    mem = mem && D[j].count(K[j] - K[j + 1]) > 0;
    anti = anti && std::includes(D[j].begin(), D[j].end(), D[j + 1].begin(), D[j + 1].end());
  }
  for (std::size_t j = 0; j + 2 < J; ++j) {
    std::set<Freq> a, b;
    for (const auto& n : D[j]) a.insert(n + K[j + 1]);
    for (const auto& n : D[j + 1]) b.insert(n + K[j + 2]);
    nest = nest && std::includes(b.begin(), b.end(), a.begin(), a.end());
  }
  s.s_membership = mem;
  s.s_antinesting = anti;
  s.s_nesting = nesting ? *nesting : nest;
  for (auto& dj : D) s.sets.emplace_back(dj.begin(), dj.end());
  return run(f, fz, s);
}

}  // namespace paleylab
