// Promise decision procedures built on repeated scaling runs, and classical
// matrix scaling.
#pragma once

#include "tscale/parametrization.hpp"
#include "tscale/partition.hpp"
#include "tscale/scaling.hpp"

#include <optional>

namespace tscale {

enum class Answer { In, EpsFar };
std::string to_string(Answer a);

struct OracleConfig {
  ScalingConfig scaling;  ///< epsilon and seed of the first repetition
  int repeats = 6;
  bool parallel = true;
};

struct MembershipVerdict {
  Answer answer = Answer::EpsFar;
  double epsilon = 0.0;
  std::optional<GroupTuple> witness;
  std::optional<std::uint64_t> witnessSeed;
  ScalingReport evidence;        ///< the witnessing run, or the last run if none succeeded
  std::optional<Tensor> sample;  ///< the sampled tensor for parametrized queries
  int runs = 0;                  ///< repetitions up to and including the witnessing one
};

/// IN when one of `repeats` seeded runs scales X epsilon-close to p (checked
/// again on the witness), EPS_FAR otherwise. Seeds are seed, seed+1, ...; the
/// witness comes from the smallest successful seed.
MembershipVerdict membership(const Tensor& X, const TargetSpectrum& p, const OracleConfig& cfg);

/// Existence of a tensor in Ten(1; dims) with marginal spectra p, decided by
/// scaling random tensors.
MembershipVerdict qmp(const TargetSpectrum& p, std::span<const Index> dims, const OracleConfig& cfg);

struct KroneckerQuery {
  Partition lambda, mu, nu;
  Index n = 0;  ///< 0 selects the largest number of nonzero parts

  Index effective_n() const;
  /// (lambda, mu, nu) / k padded to length n; throws on unequal sizes.
  TargetSpectrum normalized() const;
};

MembershipVerdict kronecker_support(const KroneckerQuery& q, const OracleConfig& cfg);

/// exp(-C (n1 + ... + nd) ln(ell max n)); a heuristic threshold for a
/// caller-chosen constant C.
double gap_constant(std::span<const Index> dims, std::int64_t ell, double C);

struct SinkhornResult {
  Eigen::MatrixXd scaled;
  Eigen::VectorXd rowScale;
  Eigen::VectorXd colScale;
  bool converged = false;
  bool nonScalable = false;
  std::uint64_t iterations = 0;  ///< number of row or column normalizations
  double error = 0.0;            ///< l1 distance of row and column sums to the targets
  std::string reason;
};

/// Alternating row and column normalization of diag(x) A diag(y) toward row
/// sums r and column sums c, stopping once the combined l1 error is <= eps.
SinkhornResult sinkhorn(const Eigen::MatrixXd& A, const Eigen::VectorXd& r, const Eigen::VectorXd& c, double eps,
                        std::uint64_t maxIter);

/// Tensor in Ten(n1 n2; n1, n2) with entry sqrt(A_jk) at ((j,k), j, k); its
/// marginals are diag(row sums) and diag(column sums).
Tensor matrix_scaling_tensor(const Eigen::MatrixXd& A);

}  // namespace tscale
