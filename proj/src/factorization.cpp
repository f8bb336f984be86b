#include "tscale/factorization.hpp"

#include "tscale/errors.hpp"

#include <numeric>

namespace tscale {

namespace {

void require_positive_definite(const MatrixXc& rho, const char* who) {
  if (rho.rows() != rho.cols() || rho.rows() == 0)
    throw std::invalid_argument(std::string(who) + ": matrix must be square and nonempty");
  if (!is_hermitian(rho, 1e-10)) throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian");
  if (is_singular(rho)) throw SingularMatrixError(std::string(who) + ": matrix is singular");
}

}  // namespace

MatrixXc upper_cholesky(const MatrixXc& rho) {
  require_positive_definite(rho, "upper_cholesky");
  const Index n = rho.rows();
  // Reversing rows and columns turns the lower factor into an upper one.
  const MatrixXc flipped = rho.reverse();
  Eigen::LLT<MatrixXc> llt(0.5 * (flipped + flipped.adjoint()));
  if (llt.info() != Eigen::Success) throw SingularMatrixError("upper_cholesky: factorization failed");
  MatrixXc L = llt.matrixL();
  MatrixXc R = L.reverse();
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) R(i, j) = 0.0;
  return R;
}

MatrixXc block_cholesky(const MatrixXc& rho, std::span<const Index> blocks) {
  require_positive_definite(rho, "block_cholesky");
  const Index n = rho.rows();
  if (std::accumulate(blocks.begin(), blocks.end(), Index{0}) != n)
    throw std::invalid_argument("block_cholesky: block sizes do not add up to the dimension");
  MatrixXc R = MatrixXc::Zero(n, n);
  MatrixXc S = 0.5 * (rho + rho.adjoint());
  Index end = n;
  for (std::size_t b = blocks.size(); b-- > 0;) {
    const Index m = blocks[b];
    const Index start = end - m;
    const MatrixXc Smm = S.block(start, start, m, m);
    if (is_singular(Smm)) throw SingularMatrixError("block_cholesky: Schur complement is singular");
    const MatrixXc Rmm = hermitian_sqrt(Smm);
    R.block(start, start, m, m) = Rmm;
    if (start > 0) {
      // R_{top,m} = S_{top,m} Rmm^{-dagger}; Rmm is Hermitian so solve with Rmm.
      const MatrixXc Rtop = Rmm.ldlt().solve(S.block(0, start, start, m).adjoint()).adjoint();
      R.block(0, start, start, m) = Rtop;
      S.topLeftCorner(start, start) -= Rtop * Rtop.adjoint();
    }
    end = start;
  }
  return R;
}

}  // namespace tscale
