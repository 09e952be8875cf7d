#include "paleylab/freq.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "paleylab/error.hpp"

namespace paleylab {

Freq Freq::unit(std::size_t d, std::size_t axis) {
  Freq f = zero(d);
  f.c_.at(axis) = 1;
  return f;
}

bool Freq::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](std::int64_t x) { return x == 0; });
}

Freq& Freq::operator+=(const Freq& o) {
  if (o.dim() != dim()) throw InvalidInput("frequency dimension mismatch");
  for (std::size_t a = 0; a < c_.size(); ++a) c_[a] += o.c_[a];
  return *this;
}

Freq& Freq::operator-=(const Freq& o) {
  if (o.dim() != dim()) throw InvalidInput("frequency dimension mismatch");
  for (std::size_t a = 0; a < c_.size(); ++a) c_[a] -= o.c_[a];
  return *this;
}

Freq Freq::operator-() const {
  Freq r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

Freq operator*(std::int64_t s, Freq a) {
  for (auto& x : a.c_) x *= s;
  return a;
}

std::string Freq::to_string() const {
  if (c_.size() == 1) return std::to_string(c_[0]);
  std::ostringstream os;
  os << '(';
  for (std::size_t a = 0; a < c_.size(); ++a) os << (a ? "," : "") << c_[a];
  os << ')';
  return os.str();
}

namespace {

std::int64_t parse_int(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    throw InvalidInput("malformed integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

Freq parse_freq(const std::string& s) {
  std::vector<std::int64_t> c;
  for (auto part : split(s, ',')) c.push_back(parse_int(part));
  return Freq(std::move(c));
}

std::vector<Freq> parse_freq_list(const std::string& s) {
  std::vector<Freq> out;
  if (s.find_first_not_of(' ') == std::string::npos) return out;
  if (s.find(';') == std::string::npos) {
    for (auto part : split(s, ',')) out.emplace_back(parse_int(part));
    return out;
  }
  for (auto part : split(s, ';'))
    if (part.find_first_not_of(' ') != std::string_view::npos) out.push_back(parse_freq(std::string(part)));
  for (const auto& f : out)
    if (f.dim() != out.front().dim()) throw InvalidInput("mixed frequency dimensions in '" + s + "'");
  return out;
}

bool contains(const BoxWindow& w, const Freq& n) {
  if (n.dim() != w.lo.dim() || n.dim() != w.hi.dim()) throw InvalidInput("window dimension mismatch");
  for (std::size_t a = 0; a < n.dim(); ++a)
    if (n[a] < w.lo[a] || n[a] > w.hi[a]) return false;
  return true;
}

std::vector<std::int64_t> to_ints(std::span<const Freq> e) {
  std::vector<std::int64_t> out;
  out.reserve(e.size());
  for (const auto& f : e) {
    if (f.dim() != 1) throw InvalidInput("expected one-dimensional frequencies, got " + f.to_string());
    out.push_back(f[0]);
  }
  return out;
}

std::vector<Freq> to_freqs(std::span<const std::int64_t> e) {
  return std::vector<Freq>(e.begin(), e.end());
}

}  // namespace paleylab
