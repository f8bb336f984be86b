// Exact rationals and target spectra p = (p^(1), ..., p^(d)).
#pragma once

#include "tscale/tensor.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tscale {

/// Fraction in lowest terms with positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Parses "a/b" or "a" (optional leading minus, no decimals).
  static Rational parse(std::string_view text);
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Best continued-fraction approximation of x with denominator <= max_den.
Rational rationalize(double x, std::int64_t max_den = 1'000'000);

/// Tuple of nonincreasing rational probability vectors, one per factor 1..d.
class TargetSpectrum {
 public:
  TargetSpectrum() = default;
  /// Validates monotonicity, range [0,1] and exact unit sums.
  explicit TargetSpectrum(std::vector<std::vector<Rational>> parts);

  static TargetSpectrum uniform(std::span<const Index> dims);

  int d() const { return static_cast<int>(parts_.size()); }
  const std::vector<std::vector<Rational>>& parts() const { return parts_; }
  /// p^(i) for factor i in 1..d.
  const std::vector<Rational>& part(int factor) const { return parts_.at(factor - 1); }
  std::vector<Index> dims() const;

  /// Least common multiple of all denominators.
  std::int64_t ell() const { return ell_; }

  /// p_up^(i) = (p_n, ..., p_1) as doubles.
  Eigen::VectorXd ascending(int factor) const;
  /// Sizes of the runs of equal entries in p_up^(i), from exact comparison.
  std::vector<Index> ascending_blocks(int factor) const;
  /// diag(p_up^(i)).
  MatrixXc target_marginal(int factor) const;

  bool has_zeros() const;
  bool is_uniform() const;
  /// Number of nonzero entries of p^(i).
  Index rank(int factor) const;
  /// Largest bit length among numerators and denominators.
  int bitsize() const;

  bool operator==(const TargetSpectrum&) const = default;

 private:
  std::vector<std::vector<Rational>> parts_;
  std::int64_t ell_ = 1;
};

/// Bit length of |v| (at least 1).
int bit_length(std::int64_t v);

}  // namespace tscale
