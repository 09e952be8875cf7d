#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paleylab/fourier_grid.hpp"
#include "paleylab/proofkit.hpp"

namespace paleylab {

// Which coefficients an instance forces to vanish.
enum class Selector { Schur, S, Alternating, NegativeHalfline, OutsideKPositive, Custom };
const char* to_string(Selector s);
Selector parse_selector(const std::string& s);

// Constant of the theorem in force, and the best known constant below it.
// Custom sets carry no theorem: both are +inf.
double theorem_constant(Selector s);
double ceiling_constant(Selector s);

struct Instance {
  GridSpec spec;
  std::vector<Freq> k;
  Selector forbidden = Selector::Schur;
  std::vector<Freq> custom;
  std::uint64_t seed = 0;
  std::optional<ReplayMode> mode;
};

// Forbidden frequencies inside the window, sorted. For d > 1 the half-line
// selector means the strictly negative cone of the lex-last order.
FreqSetReport forbidden_set(const Instance& inst);

// Rejects K outside the window, K meeting the forbidden set, an inexact
// forbidden set, and replay modes the selector does not support.
void validate(const Instance& inst);

// Seeded complex Gaussian spectrum on window \ forbidden, nonzero on K.
Spectrum make_spectrum(const Instance& inst);
GridFunction make_instance(const Instance& inst);

// ||f^|K||_2 / ||f||_1
double check_ratio(const GridFunction& f, std::span<const Freq> K);

// Runs the replay the instance's mode asks for on f.
ProofTrace replay_instance(const Instance& inst, const GridFunction& f);

// A family of instances. With k empty, each trial draws a strongly lacunary
// enumeration: k_1 in [1, k1_max], k_{j+1} = 2 k_j + 1 + U{0..slack},
// M = k_J + margin, N = oversample * default_grid_size(M).
struct Template {
  std::string name;
  Selector forbidden = Selector::Schur;
  std::optional<ReplayMode> mode;
  std::vector<Freq> k;
  std::optional<GridSpec> spec;
  std::vector<Freq> custom;
  std::size_t j_min = 1, j_max = 8;
  std::int64_t k1_max = 3, slack = 2, margin = 4;
  std::size_t oversample = 1;
  // present the drawn enumeration in a random order (for order-free selectors)
  bool shuffle = false;
};

Instance instantiate(const Template& t, std::uint64_t seed);

struct CampaignConfig {
  std::vector<Template> templates;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

struct InstanceResult {
  Instance instance;
  std::size_t template_index = 0;
  double ratio = 0, constant = 0, ceiling = 0;
  double worst_residual = 0;  // largest trace residual, 0 without a replay
  bool passed = true;
  bool above_ceiling = false;
  std::vector<std::string> failures;
};

struct TemplateSummary {
  std::string name;
  Selector forbidden = Selector::Schur;
  std::optional<ReplayMode> mode;
  std::size_t instances = 0, passed = 0, failed = 0, above_ceiling = 0;
  double max_ratio = 0, worst_residual = 0, constant = 0, ceiling = 0;
};

struct Counterexample {
  std::size_t index = 0;
  Instance instance;
  double ratio = 0;
  std::vector<std::string> failures;
};

struct CampaignReport {
  std::size_t instances = 0, passed = 0, failed = 0, above_ceiling = 0;
  std::uint64_t seed = 0;
  double max_ratio = 0, worst_residual = 0;
  std::vector<TemplateSummary> per_template;
  std::vector<Counterexample> counterexamples;
  double wall_time = 0;  // seconds; not part of the deterministic content
};

// Trial i uses template i mod |templates| and seed mix_seed(seed, i).
CampaignReport run_campaign(const CampaignConfig& cfg);
InstanceResult run_one(const Instance& inst);

struct OptimizerConfig {
  std::size_t restarts = 4;
  std::size_t iterations = 200;
  double smoothing = 1e-6;  // relative to max |f|
  double step = 0.05;       // initial step, relative to the coefficient norm
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

struct OptimizerLogRow {
  std::size_t restart = 0, iteration = 0;
  double ratio = 0, step = 0;
};

struct OptimizerResult {
  Spectrum spectrum;    // rescaled to ||f||_1 = 1
  GridFunction best;
  double ratio = 0;     // recomputed without smoothing
  std::size_t best_restart = 0;
  std::vector<OptimizerLogRow> log;
};

// Projected ascent on log ||f^|K||_2 - log ||f||_1 (smoothed), with steps
// accepted only when the exact ratio improves.
OptimizerResult optimize_ratio(const Instance& inst, const OptimizerConfig& cfg);

}  // namespace paleylab
