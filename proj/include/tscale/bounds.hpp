// Randomization ranges, iteration budgets and input bit sizes.
#pragma once

#include "tscale/rational.hpp"
#include "tscale/tensor.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace tscale {

using BigInt = boost::multiprecision::cpp_int;

struct RandomizationBounds {
  BigInt K;  ///< (ell * d * max n)^(d * max n^2)
  BigInt M;  ///< 2 * degree * K
  double log2M = 0.0;
};

/// Exact K and M for lcm `ell`, local dimensions `dims` and a parametrization
/// of degree `degree` (d for the group action itself).
RandomizationBounds randomization_bounds(std::int64_t ell, std::span<const Index> dims, int degree);
inline RandomizationBounds randomization_bounds(std::int64_t ell, std::span<const Index> dims) {
  return randomization_bounds(ell, dims, static_cast<int>(dims.size()));
}

double log2_big(const BigInt& v);

/// `count` integers uniform in {1..M}, all divided by one common power of two
/// so that the largest fits in 61 bits, converted to double.
std::vector<double> sample_big_uniform(std::size_t count, const BigInt& M, std::uint64_t seed);

/// ceil((32 ln2 / eps^2) (3 sum_{i=0}^d log2 n_i + b + d log2 M)), at least 1.
std::uint64_t iteration_budget(std::span<const Index> all_dims, int bitsize, double eps, double log2M);

/// ceil((16 ln2 / eps^2) (sum_{i=0}^d log2 n_i + b + deg (log2 p + log2 M))), at least 1.
std::uint64_t general_iteration_budget(std::span<const Index> all_dims, int bitsize, double eps,
                                       int degree, Index paramDim, double log2M);

/// Largest bit length over the real and imaginary parts of X (which must be
/// Gaussian integers) and over the entries of p.
int input_bitsize(const Tensor& X, const TargetSpectrum& p);

/// True when every entry of X has integral real and imaginary parts.
bool has_integer_entries(const Tensor& X);

}  // namespace tscale
