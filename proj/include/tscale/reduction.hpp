// Embedding of Borel scaling toward weight lambda into uniform scaling of a
// larger tensor, via the block maps tau_j and the expansion L.
#pragma once

#include "tscale/partition.hpp"
#include "tscale/tensor.hpp"

#include <vector>

namespace tscale {

/// A partition lambda of ell with exactly n nonzero parts and its conjugate mu.
struct ReductionData {
  Partition lambda;
  Partition mu;
  int ell = 0;
  Index n = 0;

  /// Throws if lambda has a zero part; n is the number of parts.
  explicit ReductionData(const Partition& lambda);

  /// Lambda = diag(lambda_n, ..., lambda_1).
  Eigen::VectorXd lambda_ascending() const;
  /// Row offset of block j (1-based) inside C^ell.
  Index block_offset(int j) const;
};

Partition conjugate_partition(const Partition& lambda);

/// ell x n matrix placing the last mu_j coordinates into block j (1-based).
MatrixXc tau(const ReductionData& rd, int j);

/// sum_j tau_j X tau_j^dagger.
MatrixXc T_underline(const ReductionData& rd, const MatrixXc& X);
/// sum_j tau_j^dagger Y tau_j.
MatrixXc T_underline_adjoint(const ReductionData& rd, const MatrixXc& Y);
/// T_underline(Lambda^{-1/2} X Lambda^{-1/2}).
MatrixXc T_map(const ReductionData& rd, const MatrixXc& X);
MatrixXc T_map_adjoint(const ReductionData& rd, const MatrixXc& Y);
/// T_underline(Lambda^{-1/2} b Lambda^{1/2}); multiplicative on upper triangular b.
MatrixXc h_hom(const ReductionData& rd, const MatrixXc& b);

/// (lambda_1 ell) x n matrix of v |-> sum_j e_j (x) tau_j v.
MatrixXc L_matrix(const ReductionData& rd);

/// L(Y) in Ten(n0 lambda^(1)_1 ... lambda^(d)_1; ell, ..., ell); the new
/// factor 0 enumerates (i0, j1, ..., jd) row-major.
Tensor reduce_tensor(const Tensor& Y, const std::vector<Partition>& lambdas);

/// (Lambda^(1)^{-1/2}, ..., Lambda^(d)^{-1/2}).
GroupTuple lambda_inverse_sqrt(const std::vector<Partition>& lambdas);

}  // namespace tscale
