// Highest weight vector polynomials on tensors, characters of triangular
// tuples, the capacity objective and the entropy inequalities that bound
// progress of a scaling step.
#pragma once

#include "tscale/partition.hpp"
#include "tscale/rational.hpp"
#include "tscale/tensor.hpp"

#include <optional>
#include <vector>

namespace tscale {

/// One highest weight vector of degree k: weights lambda^(1..d) (partitions
/// of k), a sequence of k indices into factor 0 and d permutations of {0..k-1}
/// in one-line notation. Slot s of the determinant product for factor i reads
/// the tensor copy perms[i-1][s].
struct HWVSpec {
  std::vector<Partition> weight;
  int degree = 0;
  std::vector<Index> indexSeq;
  std::vector<std::vector<int>> perms;

  int d() const { return static_cast<int>(weight.size()); }
  /// Throws std::invalid_argument if the spec does not fit the format.
  void validate(const TensorFormat& f) const;
};

struct EvalBudget {
  int maxDegree = 6;
  Index maxLocalDim = 16;
};

/// det[(v_r)_{n-1-j}]_{r,j}: determinant of the bottom rows of [v_1 .. v_l],
/// read bottom-up.
Complex det_l(std::span<const VectorXc> vectors);

/// P(X) for the spec. Throws BudgetExceededError outside the budget.
Complex eval_hwv(const HWVSpec& spec, const Tensor& X, const EvalBudget& budget = {});

/// Integer weight per factor; entries may be negative.
using Weight = std::vector<std::vector<int>>;

/// (-lambda_n, ..., -lambda_1) for every factor.
Weight dual_weight(const std::vector<Partition>& lambda, std::span<const Index> dims);

/// prod_i prod_j (R^(i)_{jj})^{w^(i)_j}. Throws std::domain_error on a zero
/// diagonal entry with negative exponent.
Complex chi(const Weight& w, const GroupTuple& R);
/// Block version: w must be constant on the diagonal blocks, which enter
/// through their determinants.
Complex chi(const Weight& w, const GroupTuple& R, const std::vector<std::vector<Index>>& blocks);

struct TransformCheck {
  bool ok = false;
  Complex lhs;  ///< P(R.X)
  Complex rhs;  ///< chi_{lambda*}(R^{-1}) P(X)
  double error = 0.0;
};

/// Checks P(R.X) = chi_{lambda*}(R^{-1}) P(X) to relative tolerance `tol`.
TransformCheck hwv_transform_check(const HWVSpec& spec, const Tensor& X, const GroupTuple& R, double tol = 1e-8,
                                   const EvalBudget& budget = {});

/// ||R.X|| |chi_{p*}(R)| with block determinants for the blocks of equal p.
double capacity_value(const Tensor& X, const TargetSpectrum& p, const GroupTuple& R);

/// sum_j p_j log2(p_j / q_j) with 0 log 0 = 0; +infinity when q_j = 0 < p_j.
double kl_divergence(std::span<const double> p, std::span<const double> q);

struct PinskerGap {
  double lhs = 0.0;  ///< KL(p || q), q_j = |R_jj|^2
  double rhs = 0.0;  ///< ||diag(p) - rho||_tr^2 / (16 ln 2)
};
PinskerGap pinsker_gap(std::span<const double> p, const MatrixXc& rho, const MatrixXc& R);

/// |P(Y')| >= 2^{k eps^2 / (32 ln 2)} |P(Y)| up to a multiplicative slack.
bool verify_progress(const HWVSpec& spec, const Tensor& Y, const Tensor& Yprime, double eps, double slack = 1e-6,
                     const EvalBudget& budget = {});

/// First spec (ordered by degree, index sequence, then permutations) of
/// weight k p with k <= maxDegree that does not vanish on X.
std::optional<HWVSpec> find_nonvanishing_spec(const Tensor& X, const TargetSpectrum& p, int maxDegree = 4,
                                              const EvalBudget& budget = {});

/// Largest |P(X)| allowed for unit-norm X: (n1 ... nd)^k.
double hwv_bound(const TensorFormat& f, int k);

}  // namespace tscale
