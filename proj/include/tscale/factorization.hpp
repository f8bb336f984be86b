// Triangular and block-triangular square roots of positive definite matrices.
#pragma once

#include "tscale/tensor.hpp"

#include <span>

namespace tscale {

/// Upper triangular R with positive diagonal and R R^dagger = rho.
/// Throws SingularMatrixError if rho is not numerically positive definite.
MatrixXc upper_cholesky(const MatrixXc& rho);

/// Block upper triangular R with R R^dagger = rho, where the diagonal blocks
/// have sizes `blocks` (top to bottom) and are Hermitian positive definite.
MatrixXc block_cholesky(const MatrixXc& rho, std::span<const Index> blocks);

}  // namespace tscale
