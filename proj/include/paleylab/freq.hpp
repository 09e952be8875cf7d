#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace paleylab {

// Integer frequency vector. d = 1 is the circle case.
class Freq {
 public:
  Freq() = default;
  Freq(std::int64_t n) : c_{n} {}  // NOLINT: implicit on purpose
  Freq(std::initializer_list<std::int64_t> c) : c_(c) {}
  explicit Freq(std::vector<std::int64_t> c) : c_(std::move(c)) {}

  static Freq zero(std::size_t d) { return Freq(std::vector<std::int64_t>(d, 0)); }
  static Freq unit(std::size_t d, std::size_t axis);

  std::size_t dim() const { return c_.size(); }
  std::int64_t operator[](std::size_t a) const { return c_[a]; }
  std::int64_t& operator[](std::size_t a) { return c_[a]; }
  std::span<const std::int64_t> coords() const { return c_; }
  bool is_zero() const;

  Freq& operator+=(const Freq& o);
  Freq& operator-=(const Freq& o);
  friend Freq operator+(Freq a, const Freq& b) { return a += b; }
  friend Freq operator-(Freq a, const Freq& b) { return a -= b; }
  Freq operator-() const;
  friend Freq operator*(std::int64_t s, Freq a);

  auto operator<=>(const Freq&) const = default;
  bool operator==(const Freq&) const = default;

  // "5" for d = 1, "(5,1)" otherwise
  std::string to_string() const;

 private:
  std::vector<std::int64_t> c_;
};

// Parses "5" or "5,1" as one frequency.
Freq parse_freq(const std::string& s);
// Parses "1,3,7" (d = 1) or "5,1;0,3" (d > 1) into a list.
std::vector<Freq> parse_freq_list(const std::string& s);

// Closed componentwise box [lo, hi]. For d = 1 an integer interval.
template <class V>
struct BasicWindow {
  V lo{};
  V hi{};
};

using Window = BasicWindow<std::int64_t>;
using BoxWindow = BasicWindow<Freq>;

inline bool contains(const Window& w, std::int64_t n) { return w.lo <= n && n <= w.hi; }
bool contains(const BoxWindow& w, const Freq& n);

// Members sorted ascending, lexicographic for d > 1.
template <class V>
struct BasicSetReport {
  std::vector<V> members;
  bool exact = true;
};

using SetReport = BasicSetReport<std::int64_t>;
using FreqSetReport = BasicSetReport<Freq>;

std::vector<std::int64_t> to_ints(std::span<const Freq> e);
std::vector<Freq> to_freqs(std::span<const std::int64_t> e);

}  // namespace paleylab
