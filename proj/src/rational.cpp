#include "tscale/rational.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tscale {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("rational arithmetic overflow");
  return static_cast<std::int64_t>(v);
}

Rational make(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num, b = den;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  const i128 g = a == 0 ? 1 : a;
  return Rational(narrow(num / g), narrow(den / g));
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last)
    throw std::invalid_argument("malformed fraction component '" + std::string(s) + "'");
  return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("zero denominator");
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
}

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text), 1);
  const std::int64_t den = parse_int(text.substr(slash + 1));
  if (den <= 0) throw std::invalid_argument("fraction '" + std::string(text) + "' needs a positive denominator");
  return Rational(parse_int(text.substr(0, slash)), den);
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}
Rational operator-(const Rational& a, const Rational& b) {
  return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}
Rational operator*(const Rational& a, const Rational& b) {
  return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
}
Rational operator/(const Rational& a, const Rational& b) {
  return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
}
std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const i128 l = i128(a.num_) * b.den_, r = i128(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational rationalize(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot rationalize a non-finite value");
  // Convergents h/k of the continued fraction; stop before k exceeds max_den.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    if (std::abs(a) > 9e15) break;
    const auto ai = static_cast<std::int64_t>(a);
    const i128 h2 = i128(ai) * h1 + h0, k2 = i128(ai) * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    k0 = k1;
    h1 = narrow(h2);
    k1 = narrow(k2);
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  if (k1 == 0) return Rational(static_cast<std::int64_t>(std::llround(x)), 1);
  return Rational(h1, k1);
}

int bit_length(std::int64_t v) {
  const std::uint64_t u = v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v);
  int bits = 0;
  for (std::uint64_t t = u; t != 0; t >>= 1) ++bits;
  return std::max(bits, 1);
}

TargetSpectrum::TargetSpectrum(std::vector<std::vector<Rational>> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw std::invalid_argument("target spectrum needs at least one factor");
  ell_ = 1;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const auto& p = parts_[i];
    const std::string where = "target part " + std::to_string(i + 1);
    if (p.empty()) throw std::invalid_argument(where + " is empty");
    Rational sum(0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] < Rational(0) || p[j] > Rational(1))
        throw std::invalid_argument(where + ", entry " + std::to_string(j + 1) + " outside [0,1]");
      if (j > 0 && p[j] > p[j - 1])
        throw std::invalid_argument(where + " is not nonincreasing at entry " + std::to_string(j + 1));
      sum = sum + p[j];
      ell_ = std::lcm(ell_, p[j].den());
    }
    if (sum != Rational(1)) throw std::invalid_argument(where + " sums to " + sum.str() + ", not 1");
  }
}

TargetSpectrum TargetSpectrum::uniform(std::span<const Index> dims) {
  std::vector<std::vector<Rational>> parts;
  for (Index n : dims) parts.emplace_back(static_cast<std::size_t>(n), Rational(1, n));
  return TargetSpectrum(std::move(parts));
}

std::vector<Index> TargetSpectrum::dims() const {
  std::vector<Index> out;
  for (const auto& p : parts_) out.push_back(static_cast<Index>(p.size()));
  return out;
}

Eigen::VectorXd TargetSpectrum::ascending(int factor) const {
  const auto& p = part(factor);
  const auto n = static_cast<Index>(p.size());
  Eigen::VectorXd out(n);
  for (Index j = 0; j < n; ++j) out(j) = p[n - 1 - j].value();
  return out;
}

std::vector<Index> TargetSpectrum::ascending_blocks(int factor) const {
  const auto& p = part(factor);
  std::vector<Index> blocks;
  for (std::size_t j = p.size(); j-- > 0;) {
    if (j + 1 < p.size() && p[j] == p[j + 1])
      ++blocks.back();
    else
      blocks.push_back(1);
  }
  return blocks;
}

MatrixXc TargetSpectrum::target_marginal(int factor) const {
  return ascending(factor).cast<Complex>().asDiagonal();
}

bool TargetSpectrum::has_zeros() const {
  for (const auto& p : parts_)
    if (p.back() == Rational(0)) return true;
  return false;
}

bool TargetSpectrum::is_uniform() const {
  for (const auto& p : parts_)
    if (p.front() != p.back()) return false;
  return true;
}

Index TargetSpectrum::rank(int factor) const {
  const auto& p = part(factor);
  return static_cast<Index>(std::count_if(p.begin(), p.end(), [](const Rational& r) { return r != Rational(0); }));
}

int TargetSpectrum::bitsize() const {
  int b = 1;
  for (const auto& p : parts_)
    for (const auto& r : p) b = std::max({b, bit_length(r.num()), bit_length(r.den())});
  return b;
}

}  // namespace tscale
