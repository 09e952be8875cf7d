#pragma once

#include <memory>
#include <span>
#include <vector>

#include "paleylab/freq.hpp"

namespace paleylab {

// Semigroup P' of strictly positive elements on Z^d.
class ConeOrder {
 public:
  enum class Kind { HalfLine, LexLast, Generators };

  static ConeOrder half_line();
  static ConeOrder lex_last(std::size_t dim);
  // P' = sums of 1..bound generators. Membership beyond that is unknown.
  static ConeOrder generated(std::vector<Freq> gens, int bound = 64);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  bool is_total() const { return kind_ != Kind::Generators; }
  // P and -P meet only in 0. For generator cones: verified up to the bound.
  bool axiom_holds() const { return axiom_; }
  int bound() const { return bound_; }
  const std::vector<Freq>& generators() const { return gens_; }

  bool in_strict_cone(const Freq& x) const;
  bool in_cone(const Freq& x) const { return x.is_zero() || in_strict_cone(x); }
  bool less(const Freq& a, const Freq& b) const { return in_strict_cone(b - a); }
  // -1, 0, +1, or 2 when neither x nor -x is in P.
  int sign(const Freq& x) const;

 private:
  ConeOrder() = default;
  Kind kind_ = Kind::HalfLine;
  std::size_t dim_ = 1;
  std::vector<Freq> gens_;
  int bound_ = 0;
  bool axiom_ = true;
  std::shared_ptr<const std::vector<Freq>> reach_;  // sorted, for generator cones
};

bool is_strongly_lacunary(std::span<const std::int64_t> k);
bool is_strongly_lacunary_ordered(std::span<const Freq> K, const ConeOrder& order);

struct LacunarityReport {
  bool holds = false;
  // the bounded answer is the answer for every positive m
  bool exact = false;
};

// k_{j+1} > m k_j for 1 <= m <= m_max and every consecutive pair.
LacunarityReport is_extremely_lacunary(std::span<const Freq> e, const ConeOrder& order, std::int64_t m_max);

}  // namespace paleylab
