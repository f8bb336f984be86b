#include "tscale/bounds.hpp"

#include <boost/random/independent_bits.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tscale {

namespace {

std::uint64_t saturating_ceil(double v) {
  if (!(v > 1.0)) return 1;
  if (v >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::ceil(v));
}

double sum_log2(std::span<const Index> all_dims) {
  double s = 0.0;
  for (Index n : all_dims) s += std::log2(static_cast<double>(n));
  return s;
}

int bits_of(double v) {
  const double a = std::abs(v);
  if (a < 1.0) return 1;
  return static_cast<int>(std::floor(std::log2(a))) + 1;
}

}  // namespace

RandomizationBounds randomization_bounds(std::int64_t ell, std::span<const Index> dims, int degree) {
  if (ell < 1 || degree < 1 || dims.empty()) throw std::invalid_argument("randomization_bounds: bad arguments");
  Index nmax = 0;
  for (Index n : dims) nmax = std::max(nmax, n);
  const auto d = static_cast<unsigned>(dims.size());
  const BigInt base = BigInt(ell) * d * nmax;
  const auto exponent = static_cast<unsigned>(d * nmax * nmax);
  RandomizationBounds out;
  out.K = boost::multiprecision::pow(base, exponent);
  out.M = 2 * degree * out.K;
  out.log2M = log2_big(out.M);
  return out;
}

double log2_big(const BigInt& v) {
  if (v <= 0) throw std::domain_error("log2_big: nonpositive argument");
  const std::size_t msb = boost::multiprecision::msb(v);
  if (msb < 60) return std::log2(v.convert_to<double>());
  const std::size_t shift = msb - 60;
  const BigInt top = v >> shift;
  return std::log2(top.convert_to<double>()) + static_cast<double>(shift);
}

std::vector<double> sample_big_uniform(std::size_t count, const BigInt& M, std::uint64_t seed) {
  if (M < 1) throw std::invalid_argument("sample range must be at least 1");
  boost::random::independent_bits_engine<boost::random::mt19937_64, 256, BigInt> gen(seed);
  boost::random::uniform_int_distribution<BigInt> dist(BigInt(1), M);
  std::vector<BigInt> draws(count);
  std::size_t top = 0;
  for (auto& v : draws) {
    v = dist(gen);
    top = std::max(top, static_cast<std::size_t>(boost::multiprecision::msb(v)));
  }
  const std::size_t shift = top > 60 ? top - 60 : 0;
  std::vector<double> out;
  out.reserve(count);
  for (const auto& v : draws) out.push_back(static_cast<BigInt>(v >> shift).convert_to<double>());
  return out;
}

std::uint64_t iteration_budget(std::span<const Index> all_dims, int bitsize, double eps, double log2M) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const auto d = static_cast<double>(all_dims.size() - 1);
  const double inner = 3.0 * sum_log2(all_dims) + bitsize + d * log2M;
  return saturating_ceil(32.0 * std::log(2.0) / (eps * eps) * inner);
}

std::uint64_t general_iteration_budget(std::span<const Index> all_dims, int bitsize, double eps,
                                       int degree, Index paramDim, double log2M) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const double inner = sum_log2(all_dims) + bitsize +
                       degree * (std::log2(static_cast<double>(paramDim)) + log2M);
  return saturating_ceil(16.0 * std::log(2.0) / (eps * eps) * inner);
}

bool has_integer_entries(const Tensor& X) {
  for (Index k = 0; k < X.entries().size(); ++k) {
    const Complex z = X.entries()[k];
    if (z.real() != std::round(z.real()) || z.imag() != std::round(z.imag())) return false;
  }
  return true;
}

int input_bitsize(const Tensor& X, const TargetSpectrum& p) {
  int b = p.bitsize();
  for (Index k = 0; k < X.entries().size(); ++k) {
    const Complex z = X.entries()[k];
    b = std::max({b, bits_of(z.real()), bits_of(z.imag())});
  }
  return b;
}

}  // namespace tscale
