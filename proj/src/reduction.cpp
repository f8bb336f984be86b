#include "tscale/reduction.hpp"

#include <stdexcept>

namespace tscale {

ReductionData::ReductionData(const Partition& lam) : lambda(lam.trimmed()), mu(lam.conjugate()) {
  if (lam.height() != static_cast<int>(lam.length()))
    throw std::invalid_argument("reduction needs a partition without zero parts, got " + lam.str());
  if (lambda.length() == 0) throw std::invalid_argument("reduction needs a nonempty partition");
  ell = lambda.size();
  n = static_cast<Index>(lambda.length());
}

Eigen::VectorXd ReductionData::lambda_ascending() const {
  Eigen::VectorXd v(n);
  for (Index c = 0; c < n; ++c) v(c) = lambda[static_cast<std::size_t>(n - 1 - c)];
  return v;
}

Index ReductionData::block_offset(int j) const {
  Index off = 0;
  for (int c = 1; c < j; ++c) off += mu[static_cast<std::size_t>(c - 1)];
  return off;
}

Partition conjugate_partition(const Partition& lambda) { return lambda.conjugate(); }

MatrixXc tau(const ReductionData& rd, int j) {
  if (j < 1 || j > rd.lambda.largest())
    throw std::out_of_range("tau: block index " + std::to_string(j) + " outside 1.." + std::to_string(rd.lambda.largest()));
  const Index m = rd.mu[static_cast<std::size_t>(j - 1)];
  MatrixXc t = MatrixXc::Zero(rd.ell, rd.n);
  const Index off = rd.block_offset(j);
  for (Index r = 0; r < m; ++r) t(off + r, rd.n - m + r) = 1.0;
  return t;
}

namespace {

void require_shape(const MatrixXc& M, Index rows, Index cols, const char* who) {
  if (M.rows() != rows || M.cols() != cols)
    throw std::invalid_argument(std::string(who) + ": expected a " + std::to_string(rows) + "x" + std::to_string(cols) +
                                " matrix");
}

}  // namespace

MatrixXc T_underline(const ReductionData& rd, const MatrixXc& X) {
  require_shape(X, rd.n, rd.n, "T_underline");
  MatrixXc out = MatrixXc::Zero(rd.ell, rd.ell);
  for (int j = 1; j <= rd.lambda.largest(); ++j) {
    const MatrixXc t = tau(rd, j);
    out += t * X * t.adjoint();
  }
  return out;
}

MatrixXc T_underline_adjoint(const ReductionData& rd, const MatrixXc& Y) {
  require_shape(Y, rd.ell, rd.ell, "T_underline_adjoint");
  MatrixXc out = MatrixXc::Zero(rd.n, rd.n);
  for (int j = 1; j <= rd.lambda.largest(); ++j) {
    const MatrixXc t = tau(rd, j);
    out += t.adjoint() * Y * t;
  }
  return out;
}

MatrixXc T_map(const ReductionData& rd, const MatrixXc& X) {
  const Eigen::VectorXd s = rd.lambda_ascending().cwiseSqrt().cwiseInverse();
  return T_underline(rd, s.cast<Complex>().asDiagonal() * X * s.cast<Complex>().asDiagonal());
}

MatrixXc T_map_adjoint(const ReductionData& rd, const MatrixXc& Y) {
  const Eigen::VectorXd s = rd.lambda_ascending().cwiseSqrt().cwiseInverse();
  return s.cast<Complex>().asDiagonal() * T_underline_adjoint(rd, Y) * s.cast<Complex>().asDiagonal();
}

MatrixXc h_hom(const ReductionData& rd, const MatrixXc& b) {
  const Eigen::VectorXd s = rd.lambda_ascending().cwiseSqrt();
  return T_underline(rd, s.cwiseInverse().cast<Complex>().asDiagonal() * b * s.cast<Complex>().asDiagonal());
}

MatrixXc L_matrix(const ReductionData& rd) {
  const Index width = rd.lambda.largest();
  MatrixXc L = MatrixXc::Zero(width * rd.ell, rd.n);
  for (int j = 1; j <= width; ++j) L.middleRows((j - 1) * rd.ell, rd.ell) = tau(rd, j);
  return L;
}

Tensor reduce_tensor(const Tensor& Y, const std::vector<Partition>& lambdas) {
  const TensorFormat& f = Y.format();
  const int d = f.d();
  if (static_cast<int>(lambdas.size()) != d) throw std::invalid_argument("reduce_tensor: need one partition per factor");
  std::vector<ReductionData> rds;
  for (int i = 1; i <= d; ++i) {
    rds.emplace_back(lambdas[static_cast<std::size_t>(i - 1)]);
    if (rds.back().n != f.dim(i))
      throw std::invalid_argument("reduce_tensor: partition " + std::to_string(i) + " has " +
                                  std::to_string(rds.back().n) + " parts but factor " + std::to_string(i) +
                                  " has dimension " + std::to_string(f.dim(i)));
    if (rds.back().ell != rds.front().ell) throw std::invalid_argument("reduce_tensor: partitions of different sizes");
  }
  const int ell = rds.front().ell;

  // For each factor and each row r of C^ell: its block j and source coordinate.
  std::vector<std::vector<std::pair<Index, Index>>> rows(static_cast<std::size_t>(d));
  Index n0 = f.n0();
  for (int i = 0; i < d; ++i) {
    const auto& rd = rds[static_cast<std::size_t>(i)];
    n0 *= rd.lambda.largest();
    for (int j = 1; j <= rd.lambda.largest(); ++j) {
      const Index m = rd.mu[static_cast<std::size_t>(j - 1)];
      for (Index r = 0; r < m; ++r) rows[static_cast<std::size_t>(i)].emplace_back(j - 1, rd.n - m + r);
    }
  }

  Tensor out(TensorFormat(n0, std::vector<Index>(static_cast<std::size_t>(d), ell)));
  std::vector<Index> src(static_cast<std::size_t>(d) + 1);
  for (Index off = 0; off < out.format().size(); ++off) {
    const auto idx = out.unravel(off);
    // Split the new factor-0 index into (i0, j1, ..., jd).
    Index rest = idx[0];
    std::vector<Index> blocks(static_cast<std::size_t>(d));
    for (int i = d - 1; i >= 0; --i) {
      const Index w = rds[static_cast<std::size_t>(i)].lambda.largest();
      blocks[static_cast<std::size_t>(i)] = rest % w;
      rest /= w;
    }
    src[0] = rest;
    bool nonzero = true;
    for (int i = 0; i < d && nonzero; ++i) {
      const auto [block, coord] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx[static_cast<std::size_t>(i) + 1])];
      nonzero = block == blocks[static_cast<std::size_t>(i)];
      src[static_cast<std::size_t>(i) + 1] = coord;
    }
    if (nonzero) out.entries()[off] = Y(src);
  }
  return out;
}

GroupTuple lambda_inverse_sqrt(const std::vector<Partition>& lambdas) {
  GroupTuple g;
  for (const auto& lam : lambdas) {
    const ReductionData rd(lam);
    g.factors.push_back(rd.lambda_ascending().cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal());
  }
  return g;
}

}  // namespace tscale
