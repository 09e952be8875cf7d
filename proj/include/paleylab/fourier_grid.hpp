#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "paleylab/freq.hpp"

namespace paleylab {

using cplx = std::complex<double>;

// Axis sizes N_a and window half-widths M_a, with N_a >= 2 M_a + 1.
struct GridSpec {
  std::vector<std::size_t> dims;
  std::vector<std::int64_t> half;

  static GridSpec circle(std::size_t N, std::int64_t M);
  std::size_t dim() const { return dims.size(); }
  std::size_t size() const;
  void validate() const;
  bool in_window(const Freq& n) const;
  // flat sample/residue index of n mod N, row-major with axis 0 slowest
  std::size_t residue_index(const Freq& n) const;
  // representative of a flat residue index in (-N/2, N/2] per axis
  Freq residue_rep(std::size_t idx) const;
  bool operator==(const GridSpec&) const = default;
};

// Smallest 2^a 3^b 5^c that is >= 2M + 2.
std::size_t default_grid_size(std::int64_t M);

struct GridFunction {
  GridSpec spec;
  std::vector<cplx> samples;

  static GridFunction zeros(const GridSpec& spec);
  static GridFunction constant(const GridSpec& spec, cplx c);
  // samples of e^{i n.t}
  static GridFunction character(const GridSpec& spec, const Freq& n);
};

// Dense coefficients on the window box |n_a| <= M_a.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(std::vector<std::int64_t> half);

  const std::vector<std::int64_t>& half() const { return half_; }
  std::size_t dim() const { return half_.size(); }
  bool in_window(const Freq& n) const;
  cplx at(const Freq& n) const;
  void set(const Freq& n, cplx c);
  std::size_t size() const { return values_.size(); }
  Freq freq_at(std::size_t idx) const;
  std::size_t index_of(const Freq& n) const;
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }
  // (n, c) for every entry with |c| > tol, in lexicographic order of n
  std::vector<std::pair<Freq, cplx>> entries(double tol = 0.0) const;

 private:
  std::vector<std::int64_t> half_;
  std::vector<cplx> values_;
};

// (1/N) sum f(t) e^{-i n.t}, evaluated directly.
cplx coeff(const GridFunction& f, const Freq& n);
// All windowed coefficients at once through the FFT.
Spectrum analyze(const GridFunction& f);
// All N discrete coefficients, indexed by residue.
std::vector<cplx> dft(const GridFunction& f);
GridFunction synth(const Spectrum& s, const GridSpec& spec);
GridFunction from_dft(const std::vector<cplx>& c, const GridSpec& spec);

double norm_l1(const GridFunction& f);
double norm_l2(const GridFunction& f);
cplx inner(const GridFunction& f, const GridFunction& g);
GridFunction modulate(const GridFunction& f, const Freq& k);
GridFunction multiply(const GridFunction& f, const GridFunction& g);
GridFunction conjugate(const GridFunction& f);
GridFunction scale(const GridFunction& f, cplx c);
GridFunction subtract(const GridFunction& f, const GridFunction& g);

// Sample point t_i of a flat index, one angle per axis.
std::vector<double> grid_point(const GridSpec& spec, std::size_t idx);

}  // namespace paleylab
