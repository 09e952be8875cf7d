#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "paleylab/cone.hpp"
#include "paleylab/fourier_grid.hpp"

namespace paleylab {

inline constexpr double kIdentityTol = 1e-9;  // relative to ||f||_2
inline constexpr double kResidualTol = 1e-9;  // dimensionless residuals
inline constexpr double kSlack = 1e-9;        // inequality slack

// f = g conj(h) with |g| = |h|
struct Factorization {
  GridFunction g;
  GridFunction h;
};

Factorization factorize(const GridFunction& f);
// max pointwise ||g| - |h|| and max |g conj(h) - f| relative to max |f|
std::pair<double, double> factorization_residuals(const Factorization& fz, const GridFunction& f);

struct Subspace {
  Eigen::MatrixXcd basis;  // orthonormal columns in C^N
  std::vector<Freq> source;
  bool bare = false;  // generators are bare characters
  std::size_t rank() const { return static_cast<std::size_t>(basis.cols()); }
};

// Orthonormal basis of span{z^n carrier : n in D}; carrier == nullptr means 1.
// Rank from singular values above 1e-10 of the largest.
Subspace span_subspace(std::span<const Freq> D, const GridFunction* carrier, const GridSpec& spec);
GridFunction project(const GridFunction& v, const Subspace& S);

enum class ReplayMode { New, Classic, Complementary };
const char* to_string(ReplayMode m);
ReplayMode parse_mode(const std::string& s);

enum class DSetKind { HalfLine, Schur, Explicit };
const char* to_string(DSetKind k);
DSetKind parse_dsets(const std::string& s);

struct ReplayOptions {
  ReplayMode mode = ReplayMode::New;
  DSetKind dsets = DSetKind::HalfLine;
  std::vector<std::vector<std::int64_t>> explicit_dsets;  // D_1..D_J when dsets == Explicit
  std::optional<Factorization> factorization;
};

struct ProofStep {
  std::size_t j = 0;
  cplx a, b, target;
  double identity_residual = 0;
  cplx b_two_projection;
  double b_residual = 0;
  double membership = 0;    // 0 when not applicable
  double intertwining = 0;  // worst over the tested vectors
  double orthogonality = 0;
  double p_nest = 0;
  double q_nest = 0;
  std::size_t dim_l = 0;
};

struct ProofTrace {
  ReplayMode mode = ReplayMode::New;
  DSetKind dsets = DSetKind::HalfLine;
  std::vector<Freq> k;
  std::vector<ProofStep> steps;
  double sum_a2 = 0, sum_b2 = 0, g_norm2 = 0, h_norm2 = 0, f_norm2 = 0, f_l1 = 0;
  double k_norm = 0;  // ||f^ restricted to K||_2
  double ratio = 0;   // k_norm / f_l1
  double certified_constant = 2.0;
  std::int64_t depth = 0;  // truncation depth of the infinite index sets
  bool basis_from_qr = true;
  // combinatorial structure of the index sets before truncation, when checkable
  std::optional<bool> structural_membership, structural_antinesting, structural_nesting;
  double worst_identity = 0, worst_b = 0, worst_membership = 0, worst_intertwining = 0;
  double worst_orthogonality = 0, worst_p_nest = 0, worst_q_nest = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

// Circle replay. mode New/Classic: increasing strongly lacunary k unless dsets are
// Schur-derived or explicit. Complementary: increasing strongly lacunary positive k.
ProofTrace replay(const GridFunction& f, std::span<const std::int64_t> k, const ReplayOptions& opt);

// Replay on a d-axis grid with subspaces from the cone order; mode New or Classic.
ProofTrace replay_group(const GridFunction& f, std::span<const Freq> K, const ConeOrder& order, ReplayMode mode,
                        const std::optional<Factorization>& fz = std::nullopt);

// Replay with caller-supplied index sets D_1..D_J on any grid, K taken in the
// given order, mode New or Classic. Every d in D_j must keep d + k_j clear of
// aliasing; f^ must vanish on the union of D_j + k_j. `nesting` records the
// nesting condition of the untruncated family when the caller knows it;
// otherwise it is read off the finite sets.
ProofTrace replay_sets(const GridFunction& f, std::span<const Freq> K, const std::vector<std::vector<Freq>>& D,
                       ReplayMode mode = ReplayMode::New, const std::optional<Factorization>& fz = std::nullopt,
                       std::optional<bool> nesting = std::nullopt);

}  // namespace paleylab
