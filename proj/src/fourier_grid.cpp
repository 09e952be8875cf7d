#include "paleylab/fourier_grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "paleylab/error.hpp"

namespace paleylab {

namespace {

// FFTW's planner is not thread safe; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class PlanCache {
 public:
  ~PlanCache() {
    std::lock_guard lock(planner_mutex());
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const std::vector<std::size_t>& dims, int sign) {
    auto key = std::make_pair(dims, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<int> n(dims.begin(), dims.end());
    std::size_t total = 1;
    for (auto d : dims) total *= d;
    std::lock_guard lock(planner_mutex());
    auto* in = fftw_alloc_complex(total);
    auto* out = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(static_cast<int>(n.size()), n.data(), in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::map<std::pair<std::vector<std::size_t>, int>, fftw_plan> plans_;
};

std::vector<cplx> run_fft(const GridSpec& spec, const std::vector<cplx>& in, int sign) {
  thread_local PlanCache cache;
  std::vector<cplx> out(in.size());
  auto plan = cache.get(spec.dims, sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

void require_same(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw InvalidInput("grid spec mismatch");
}

std::int64_t floor_mod(std::int64_t a, std::int64_t n) {
  std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

GridSpec GridSpec::circle(std::size_t N, std::int64_t M) { return GridSpec{{N}, {M}}; }

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

void GridSpec::validate() const {
  if (dims.empty() || dims.size() != half.size()) throw InvalidInput("grid spec needs one size and half-width per axis");
  for (std::size_t a = 0; a < dims.size(); ++a) {
    if (half[a] < 0) throw InvalidInput("negative window half-width");
    if (dims[a] < static_cast<std::size_t>(2 * half[a] + 1))
      throw InvalidInput("grid size " + std::to_string(dims[a]) + " below 2M+1 for M = " + std::to_string(half[a]));
  }
}

bool GridSpec::in_window(const Freq& n) const {
  if (n.dim() != dim()) return false;
  for (std::size_t a = 0; a < dim(); ++a)
    if (std::abs(n[a]) > half[a]) return false;
  return true;
}

std::size_t GridSpec::residue_index(const Freq& n) const {
  if (n.dim() != dim()) throw InvalidInput("frequency dimension does not match grid");
  std::size_t idx = 0;
  for (std::size_t a = 0; a < dim(); ++a)
    idx = idx * dims[a] + static_cast<std::size_t>(floor_mod(n[a], static_cast<std::int64_t>(dims[a])));
  return idx;
}

Freq GridSpec::residue_rep(std::size_t idx) const {
  std::vector<std::int64_t> c(dim());
  for (std::size_t a = dim(); a-- > 0;) {
    auto N = static_cast<std::int64_t>(dims[a]);
    auto r = static_cast<std::int64_t>(idx % dims[a]);
    idx /= dims[a];
    c[a] = 2 * r > N ? r - N : r;
  }
  return Freq(std::move(c));
}

std::size_t default_grid_size(std::int64_t M) {
  const std::size_t need = static_cast<std::size_t>(2 * std::max<std::int64_t>(M, 0) + 2);
  std::size_t best = SIZE_MAX;
  for (std::size_t a = 1; a < 2 * need; a *= 2)
    for (std::size_t b = a; b < 2 * need; b *= 3)
      for (std::size_t c = b; c < 2 * need; c *= 5)
        if (c >= need) best = std::min(best, c);
  return best;
}

GridFunction GridFunction::zeros(const GridSpec& spec) {
  spec.validate();
  return GridFunction{spec, std::vector<cplx>(spec.size(), 0.0)};
}

GridFunction GridFunction::constant(const GridSpec& spec, cplx c) {
  auto f = zeros(spec);
  std::fill(f.samples.begin(), f.samples.end(), c);
  return f;
}

GridFunction GridFunction::character(const GridSpec& spec, const Freq& n) {
  return modulate(constant(spec, 1.0), n);
}

Spectrum::Spectrum(std::vector<std::int64_t> half) : half_(std::move(half)) {
  std::size_t n = 1;
  for (auto m : half_) {
    if (m < 0) throw InvalidInput("negative window half-width");
    n *= static_cast<std::size_t>(2 * m + 1);
  }
  values_.assign(n, 0.0);
}

bool Spectrum::in_window(const Freq& n) const {
  if (n.dim() != dim()) return false;
  for (std::size_t a = 0; a < dim(); ++a)
    if (std::abs(n[a]) > half_[a]) return false;
  return true;
}

std::size_t Spectrum::index_of(const Freq& n) const {
  if (!in_window(n)) throw InvalidInput("frequency " + n.to_string() + " outside window");
  std::size_t idx = 0;
  for (std::size_t a = 0; a < dim(); ++a)
    idx = idx * static_cast<std::size_t>(2 * half_[a] + 1) + static_cast<std::size_t>(n[a] + half_[a]);
  return idx;
}

Freq Spectrum::freq_at(std::size_t idx) const {
  std::vector<std::int64_t> c(dim());
  for (std::size_t a = dim(); a-- > 0;) {
    auto w = static_cast<std::size_t>(2 * half_[a] + 1);
    c[a] = static_cast<std::int64_t>(idx % w) - half_[a];
    idx /= w;
  }
  return Freq(std::move(c));
}

cplx Spectrum::at(const Freq& n) const { return values_[index_of(n)]; }

void Spectrum::set(const Freq& n, cplx c) { values_[index_of(n)] = c; }

std::vector<std::pair<Freq, cplx>> Spectrum::entries(double tol) const {
  std::vector<std::pair<Freq, cplx>> out;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (tol == 0.0 || std::abs(values_[i]) > tol) out.emplace_back(freq_at(i), values_[i]);
  return out;
}

std::vector<double> grid_point(const GridSpec& spec, std::size_t idx) {
  std::vector<double> t(spec.dim());
  for (std::size_t a = spec.dim(); a-- > 0;) {
    t[a] = 2.0 * std::numbers::pi * static_cast<double>(idx % spec.dims[a]) / static_cast<double>(spec.dims[a]);
    idx /= spec.dims[a];
  }
  return t;
}

cplx coeff(const GridFunction& f, const Freq& n) {
  if (!f.spec.in_window(n)) throw InvalidInput("frequency " + n.to_string() + " outside window");
  // exact phases from integer residues avoid drift in n.t for large indices
  const std::size_t d = f.spec.dim();
  std::vector<std::vector<cplx>> phase(d);
  for (std::size_t a = 0; a < d; ++a) {
    auto N = static_cast<std::int64_t>(f.spec.dims[a]);
    phase[a].resize(f.spec.dims[a]);
    for (std::int64_t i = 0; i < N; ++i)
      phase[a][i] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(floor_mod(n[a] * i, N)) / N);
  }
  cplx acc = 0;
  std::vector<std::size_t> pos(d, 0);
  for (std::size_t idx = 0; idx < f.samples.size(); ++idx) {
    cplx p = 1.0;
    for (std::size_t a = 0; a < d; ++a) p *= phase[a][pos[a]];
    acc += f.samples[idx] * p;
    for (std::size_t a = d; a-- > 0;) {
      if (++pos[a] < f.spec.dims[a]) break;
      pos[a] = 0;
    }
  }
  return acc / static_cast<double>(f.samples.size());
}

std::vector<cplx> dft(const GridFunction& f) {
  auto out = run_fft(f.spec, f.samples, FFTW_FORWARD);
  const double inv = 1.0 / static_cast<double>(out.size());
  for (auto& x : out) x *= inv;
  return out;
}

GridFunction from_dft(const std::vector<cplx>& c, const GridSpec& spec) {
  spec.validate();
  if (c.size() != spec.size()) throw InvalidInput("coefficient count does not match grid");
  return GridFunction{spec, run_fft(spec, c, FFTW_BACKWARD)};
}

Spectrum analyze(const GridFunction& f) {
  auto full = dft(f);
  Spectrum s(f.spec.half);
  for (std::size_t i = 0; i < s.size(); ++i) s.values()[i] = full[f.spec.residue_index(s.freq_at(i))];
  return s;
}

GridFunction synth(const Spectrum& s, const GridSpec& spec) {
  spec.validate();
  if (s.dim() != spec.dim()) throw InvalidInput("spectrum dimension does not match grid");
  for (std::size_t a = 0; a < spec.dim(); ++a)
    if (s.half()[a] > spec.half[a]) throw InvalidInput("spectrum window exceeds grid window");
  std::vector<cplx> c(spec.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) c[spec.residue_index(s.freq_at(i))] += s.values()[i];
  return from_dft(c, spec);
}

double norm_l1(const GridFunction& f) {
  double acc = 0;
  for (auto x : f.samples) acc += std::abs(x);
  return f.samples.empty() ? 0.0 : acc / static_cast<double>(f.samples.size());
}

double norm_l2(const GridFunction& f) { return std::sqrt(std::max(0.0, inner(f, f).real())); }

cplx inner(const GridFunction& f, const GridFunction& g) {
  require_same(f.spec, g.spec);
  cplx acc = 0;
  for (std::size_t i = 0; i < f.samples.size(); ++i) acc += f.samples[i] * std::conj(g.samples[i]);
  return f.samples.empty() ? acc : acc / static_cast<double>(f.samples.size());
}

GridFunction modulate(const GridFunction& f, const Freq& k) {
  if (k.dim() != f.spec.dim()) throw InvalidInput("modulation frequency dimension does not match grid");
  const std::size_t d = f.spec.dim();
  std::vector<std::vector<cplx>> phase(d);
  for (std::size_t a = 0; a < d; ++a) {
    auto N = static_cast<std::int64_t>(f.spec.dims[a]);
    phase[a].resize(f.spec.dims[a]);
    for (std::int64_t i = 0; i < N; ++i)
      phase[a][i] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(floor_mod(k[a] * i, N)) / N);
  }
  GridFunction g = f;
  std::vector<std::size_t> pos(d, 0);
  for (std::size_t idx = 0; idx < g.samples.size(); ++idx) {
    cplx p = 1.0;
    for (std::size_t a = 0; a < d; ++a) p *= phase[a][pos[a]];
    g.samples[idx] *= p;
    for (std::size_t a = d; a-- > 0;) {
      if (++pos[a] < f.spec.dims[a]) break;
      pos[a] = 0;
    }
  }
  return g;
}

GridFunction multiply(const GridFunction& f, const GridFunction& g) {
  require_same(f.spec, g.spec);
  GridFunction r = f;
  for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i] *= g.samples[i];
  return r;
}

GridFunction conjugate(const GridFunction& f) {
  GridFunction r = f;
  for (auto& x : r.samples) x = std::conj(x);
  return r;
}

GridFunction scale(const GridFunction& f, cplx c) {
  GridFunction r = f;
  for (auto& x : r.samples) x *= c;
  return r;
}

GridFunction subtract(const GridFunction& f, const GridFunction& g) {
  require_same(f.spec, g.spec);
  GridFunction r = f;
  for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i] -= g.samples[i];
  return r;
}

}  // namespace paleylab
