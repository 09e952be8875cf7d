#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "paleylab/cone.hpp"
#include "paleylab/fourier_grid.hpp"
#include "paleylab/proofkit.hpp"

namespace paleylab {

struct Atom {
  std::vector<double> t;  // one angle per axis, in (-pi, pi]
  cplx mass;
};

struct AtomicMeasure {
  std::vector<Atom> atoms;
};

// d mu = density * (uniform measure)
struct DensityMeasure {
  GridFunction density;
};

using Measure = std::variant<AtomicMeasure, DensityMeasure>;

std::size_t measure_dim(const Measure& mu);
double total_variation(const Measure& mu);
// Atomic: sum c_i e^{-i n.x_i}. Density: coeff(density, n), inside its window.
cplx measure_hat(const Measure& mu, const Freq& n);

// f_K = mu * R_K as a spectrum on spec's window: n -> mu^(n) c(n).
Spectrum riesz_convolve(const Measure& mu, std::span<const Freq> K, const GridSpec& spec);
// Samples of f_K. Density: on the density's own grid. Atomic: on `spec`.
GridFunction riesz_convolve_samples(const Measure& mu, std::span<const Freq> K, const GridSpec& spec);

// What mu^ must vanish on. SchurRiesz: Schur set intersected with the Riesz
// support (increasing K). Schur: the whole Schur set. S: the S set, which is
// all the lifted argument uses.
enum class MeasureHypothesis { SchurRiesz, Schur, S };
const char* to_string(MeasureHypothesis h);
MeasureHypothesis parse_hypothesis(const std::string& s);

// Hypothesis set inside w. Exact for S, and for Schur-based selectors on
// increasing enumerations; bounded coefficient search otherwise.
SetReport hypothesis_set(std::span<const std::int64_t> k, MeasureHypothesis h, const Window& w);

struct ChainLink {
  std::string name;
  double lhs = 0, rhs = 0;
  bool holds = true;
};

struct ChainReport {
  std::string hypothesis;
  std::vector<Freq> k;
  double mu_k = 0;    // ||mu^|K||_2
  double fk_k = 0;    // ||f_K^|K||_2
  double fk_l1 = 0;
  double mu_norm = 0;
  double ratio = 0;   // mu_k / mu_norm
  double constant = 4;
  double hypothesis_residual = 0;  // max |mu^| on the hypothesis set, relative to ||mu||
  bool hypothesis_exact = true;
  std::vector<ChainLink> links;
  bool replay_run = false;
  std::string replay_note;
  double replay_split = 0;
  std::vector<std::string> replay_failures;

  bool holds() const;
};

// mu_k <= 2 fk_k <= 4 fk_l1 <= 4 ||mu||, link by link with 1e-9 slack. K must be
// increasing and strongly lacunary; mu^ must vanish on the hypothesis set
// within the window of f_K's grid (SchurRiesz or Schur). The grid defaults to
// the density's own grid, or the smallest one holding the Riesz support.
// With `replay`, the new-mode replay with Schur-derived index sets runs on f_K.
ChainReport check_measure_bound(const Measure& mu, std::span<const std::int64_t> k, MeasureHypothesis h,
                                const std::optional<GridSpec>& grid = std::nullopt, bool replay = true);

// Total-order route on Z^d: the order's positive cone must sit inside the
// lex-last one, mu^ must vanish on the strictly negative cone, and the middle
// step is the group replay in the lex-last order with its certified C.
// Constant 2C.
ChainReport check_measure_bound_ordered(const Measure& mu, std::span<const Freq> K, const ConeOrder& order,
                                        const std::optional<GridSpec>& grid = std::nullopt);

// Seeded instances. Density: Gaussian spectrum on [-M, M], M = sum|k| + margin,
// zero on the hypothesis set (which may meet K). Atomic: (#constraints + 4)
// atoms at uniform positions, masses in the null space of the vanishing
// constraints on [-sum|k|, sum|k|]; throws if the residual exceeds 1e-10 ||mu||.
DensityMeasure make_density_measure(std::span<const std::int64_t> k, MeasureHypothesis h, std::uint64_t seed,
                                    std::int64_t margin = 2);
AtomicMeasure make_atomic_measure(std::span<const std::int64_t> k, MeasureHypothesis h, std::uint64_t seed);

// max |mu^(n)| over n in the set, relative to ||mu||
double vanishing_residual(const Measure& mu, std::span<const std::int64_t> set);

struct LiftedEnumeration {
  std::vector<std::int64_t> gamma;
  std::vector<Freq> pairs;  // (gamma_j, e_j) in Z x Z^J
  LacunarityReport extreme; // of the e_j under lex-last
};

LiftedEnumeration lift_enumeration(std::span<const std::int64_t> gamma);
// Order on Z x Z^J that looks only at the Z^J part, lex-last.
bool lifted_less(const Freq& a, const Freq& b);

struct SimpleSReport {
  bool holds = true;
  bool projection_holds = true;
  std::vector<Freq> lifted_s;                    // S of the lifted enumeration
  std::vector<std::vector<std::int64_t>> eps;    // its eps vectors
  std::vector<std::string> witnesses;
};

// S = Schur ∩ Riesz for the lifted enumeration, and every lifted S member
// projects into S(gamma). Throws past J = 8.
SimpleSReport check_simple_s(std::span<const std::int64_t> gamma);

struct LiftReport {
  LiftedEnumeration lifted;
  SimpleSReport simple;
  std::string hypothesis;
  bool hypothesis_exact = true;
  double hypothesis_residual = 0;
  bool transferred = false;  // mu^ vanishes on the projection of the lifted S
  double mu_norm = 0, lifted_norm = 0;
  ChainReport chain;         // on the lifted group, K = lifted pairs

  bool holds() const { return simple.holds && simple.projection_holds && transferred && chain.holds(); }
};

// Lift, check the reduction, run the chain on Z_N x Z_3^J and pull it back.
// The lifted replay runs on Z_N x Z_4^J when that grid has at most
// `replay_rows` points, and is skipped (with a note) otherwise.
LiftReport lift_pipeline(const Measure& mu, std::span<const std::int64_t> gamma, MeasureHypothesis h,
                         std::size_t replay_rows = 4096);

// D_j of the lifted enumeration, truncated to the box with lifted
// coordinates in [-2, 1] and |first coordinate| <= T0 - max|gamma|.
std::vector<std::vector<Freq>> lifted_dsets(const LiftedEnumeration& L, std::int64_t T0);

}  // namespace paleylab
