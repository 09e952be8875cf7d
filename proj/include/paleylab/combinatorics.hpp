#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "paleylab/freq.hpp"

namespace paleylab {

struct Caps {
  std::size_t s_set = 16;       // 3^J sign vectors
  std::size_t riesz = 16;       // 3^|K'| signed sums
  std::size_t alternating = 24; // 2^J subsequences
};

// Partial sums s_i = eps_1 + ... + eps_i. Full sum 1, all s_i >= 0,
// positive after the first positive one, some s_i > 1.
bool admissible_signs(std::span<const std::int64_t> eps);

// All admissible eps with |eps_i| <= bound, lexicographic order.
std::vector<std::vector<std::int64_t>> admissible_sign_vectors(std::size_t J, std::int64_t bound);

// Epsilon route. Integer windows only prune for increasing enumerations.
SetReport schur_set(std::span<const std::int64_t> e, const Window& w, std::int64_t coeff_bound);
FreqSetReport schur_set(std::span<const Freq> e, const BoxWindow& w, std::int64_t coeff_bound);

// Coefficient bound that makes schur_set exact on w for an increasing enumeration.
std::int64_t exact_coeff_bound(std::span<const std::int64_t> e, const Window& w);

// Gap route: k_i - sum_{j'>=i} n_j' dk_j', 1 <= i <= J-1, n not all zero.
SetReport schur_set_via_gaps(std::span<const std::int64_t> e, const Window& w);

SetReport s_set(std::span<const std::int64_t> e, const Caps& caps = {});
FreqSetReport s_set(std::span<const Freq> e, const Caps& caps = {});

SetReport riesz_support(std::span<const std::int64_t> K, const Caps& caps = {});
FreqSetReport riesz_support(std::span<const Freq> K, const Caps& caps = {});

SetReport alt_sum_set(std::span<const std::int64_t> e, const Caps& caps = {});
FreqSetReport alt_sum_set(std::span<const Freq> e, const Caps& caps = {});

// Index j is 1-based throughout, as in the text: 1 <= j < J.
SetReport g_set(std::size_t j, std::span<const std::int64_t> e, const Window& w);
// Older description: i > 1 terms, plus i = 1 terms with n_1 = 0 whose nonzero
// indices >= j+1 form a gap-free block starting at j+1 (or none).
SetReport g_set_pre_election(std::size_t j, std::span<const std::int64_t> e, const Window& w);
// 1 <= j <= J; D_J is empty. Built from its own block representation.
SetReport d_set(std::size_t j, std::span<const std::int64_t> e, const Window& w);
// m <_j^* n iff m - n in D_j. Throws when m - n falls outside w.
bool preorder_less(std::size_t j, std::int64_t m, std::int64_t n, std::span<const std::int64_t> e, const Window& w);

struct InclusionReport {
  bool holds = true;
  std::vector<std::int64_t> witnesses;
};

// S(e) ∩ w inside Schur(e) ∩ Riesz(e) ∩ w.
InclusionReport check_inclusion_s_in_schur_riesz(std::span<const std::int64_t> e, const Window& w,
                                                 const Caps& caps = {});

bool strictly_increasing(std::span<const std::int64_t> e);

}  // namespace paleylab
