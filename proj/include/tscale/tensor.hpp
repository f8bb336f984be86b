// Dense complex tensors of format (n0; n1, ..., nd), their flattenings,
// one-body marginals and the action of tuples of matrices on factors 1..d.
//
// Factor numbering follows the format: factor 0 is the distinguished factor
// of size n0 that the group never touches, factors 1..d carry the action.
// Entries are stored row-major over (index0, index1, ..., indexd).
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <complex>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tscale {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

class TensorFormat {
 public:
  TensorFormat() = default;
  TensorFormat(Index n0, std::vector<Index> dims);

  /// Builds a format from [n0, n1, ..., nd].
  static TensorFormat from_all(std::span<const Index> all);

  Index n0() const { return n0_; }
  const std::vector<Index>& dims() const { return dims_; }
  int d() const { return static_cast<int>(dims_.size()); }
  /// Dimension of factor 0..d.
  Index dim(int factor) const;
  Index size() const;
  std::vector<Index> all_dims() const;
  /// Product n1 * ... * nd.
  Index local_size() const;

  bool operator==(const TensorFormat&) const = default;
  std::string str() const;

 private:
  Index n0_ = 1;
  std::vector<Index> dims_{1};
};

template <typename Scalar>
class BasicTensor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicTensor() : entries_(Vector::Zero(1)) {}
  explicit BasicTensor(TensorFormat format)
      : format_(std::move(format)), entries_(Vector::Zero(format_.size())) {}
  BasicTensor(TensorFormat format, Vector entries)
      : format_(std::move(format)), entries_(std::move(entries)) {
    if (entries_.size() != format_.size())
      throw std::invalid_argument("tensor entry count " + std::to_string(entries_.size()) +
                                  " does not match format " + format_.str());
  }

  const TensorFormat& format() const { return format_; }
  int d() const { return format_.d(); }
  const Vector& entries() const { return entries_; }
  Vector& entries() { return entries_; }
  const Scalar* data() const { return entries_.data(); }
  Scalar* data() { return entries_.data(); }

  Index offset(std::span<const Index> idx) const {
    if (static_cast<int>(idx.size()) != format_.d() + 1)
      throw std::invalid_argument("multi-index has wrong length");
    Index off = 0;
    for (int k = 0; k <= format_.d(); ++k) {
      const Index n = format_.dim(k);
      if (idx[k] < 0 || idx[k] >= n) throw std::out_of_range("multi-index out of range");
      off = off * n + idx[k];
    }
    return off;
  }

  Scalar& operator()(std::span<const Index> idx) { return entries_[offset(idx)]; }
  const Scalar& operator()(std::span<const Index> idx) const { return entries_[offset(idx)]; }
  Scalar& operator()(std::initializer_list<Index> idx) {
    return (*this)(std::span<const Index>(idx.begin(), idx.size()));
  }
  const Scalar& operator()(std::initializer_list<Index> idx) const {
    return (*this)(std::span<const Index>(idx.begin(), idx.size()));
  }

  /// Multi-index of the entry at a row-major offset.
  std::vector<Index> unravel(Index offset) const {
    std::vector<Index> idx(format_.d() + 1);
    for (int k = format_.d(); k >= 0; --k) {
      const Index n = format_.dim(k);
      idx[k] = offset % n;
      offset /= n;
    }
    return idx;
  }

  double norm() const { return entries_.norm(); }
  bool is_zero() const { return entries_.isZero(0.0); }

  BasicTensor& operator*=(const Scalar& s) {
    entries_ *= s;
    return *this;
  }
  BasicTensor& operator/=(const Scalar& s) {
    entries_ /= s;
    return *this;
  }
  friend BasicTensor operator*(const Scalar& s, BasicTensor X) { return X *= s; }

  template <typename Other>
  BasicTensor<Other> cast() const {
    return BasicTensor<Other>(format_, entries_.template cast<Other>());
  }

 private:
  TensorFormat format_;
  Vector entries_;
};

using Tensor = BasicTensor<Complex>;

/// A tuple (g^(1), ..., g^(d)); factors[i-1] acts on tensor factor i.
struct GroupTuple {
  std::vector<MatrixXc> factors;

  static GroupTuple identity(std::span<const Index> dims);
  int d() const { return static_cast<int>(factors.size()); }
  std::vector<Index> dims() const;
  MatrixXc& operator[](int factor) { return factors.at(factor - 1); }
  const MatrixXc& operator[](int factor) const { return factors.at(factor - 1); }
};

/// Factorwise product (g*h)^(i) = g^(i) h^(i).
GroupTuple operator*(const GroupTuple& g, const GroupTuple& h);
GroupTuple inverse(const GroupTuple& g);

namespace detail {
inline void check_factor(const TensorFormat& f, int factor) {
  if (factor < 1 || factor > f.d())
    throw std::invalid_argument("factor index " + std::to_string(factor) + " outside 1.." +
                                std::to_string(f.d()));
}
// Sizes (left, mid, right) of the reshaping X -> [left x n_factor x right].
inline std::array<Index, 3> split_at(const TensorFormat& f, int factor) {
  Index left = 1, right = 1;
  for (int k = 0; k < factor; ++k) left *= f.dim(k);
  for (int k = factor + 1; k <= f.d(); ++k) right *= f.dim(k);
  return {left, f.dim(factor), right};
}
}  // namespace detail

/// Flattening of X with rows indexed by the factors in `subset` (taken in
/// increasing order) and columns by the complement, both row-major.
template <typename Scalar>
Matrix<Scalar> flatten(const BasicTensor<Scalar>& X, std::vector<int> subset) {
  const TensorFormat& f = X.format();
  const int d = f.d();
  std::sort(subset.begin(), subset.end());
  if (subset.empty() || static_cast<int>(subset.size()) > d ||
      std::adjacent_find(subset.begin(), subset.end()) != subset.end() || subset.front() < 0 ||
      subset.back() > d)
    throw std::invalid_argument("flatten: subset must be a nonempty proper subset of {0..d}");
  std::vector<bool> in_rows(d + 1, false);
  for (int k : subset) in_rows[k] = true;
  Index rows = 1, cols = 1;
  for (int k = 0; k <= d; ++k) (in_rows[k] ? rows : cols) *= f.dim(k);

  Matrix<Scalar> M(rows, cols);
  std::vector<Index> idx(d + 1, 0);
  for (Index off = 0; off < f.size(); ++off) {
    Index r = 0, c = 0;
    for (int k = 0; k <= d; ++k) {
      if (in_rows[k])
        r = r * f.dim(k) + idx[k];
      else
        c = c * f.dim(k) + idx[k];
    }
    M(r, c) = X.entries()[off];
    for (int k = d; k >= 0; --k) {
      if (++idx[k] < f.dim(k)) break;
      idx[k] = 0;
    }
  }
  return M;
}

/// One-body marginal rho^(i) = M M^dagger with M = flatten(X, {i}).
template <typename Scalar>
Matrix<Scalar> marginal(const BasicTensor<Scalar>& X, int factor) {
  detail::check_factor(X.format(), factor);
  const auto [left, mid, right] = detail::split_at(X.format(), factor);
  using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Matrix<Scalar> rho = Matrix<Scalar>::Zero(mid, mid);
  for (Index a = 0; a < left; ++a) {
    Eigen::Map<const Block> slab(X.data() + a * mid * right, mid, right);
    rho.noalias() += slab * slab.adjoint();
  }
  return rho;
}

/// Contracts tensor factor `factor` with the square matrix g.
template <typename Scalar, typename Derived>
BasicTensor<Scalar> apply_factor(const Eigen::MatrixBase<Derived>& g, int factor,
                                 const BasicTensor<Scalar>& X) {
  detail::check_factor(X.format(), factor);
  const auto [left, mid, right] = detail::split_at(X.format(), factor);
  if (g.rows() != mid || g.cols() != mid)
    throw std::invalid_argument("apply_factor: matrix shape does not match factor " +
                                std::to_string(factor));
  using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  BasicTensor<Scalar> Y(X.format());
  const Matrix<Scalar> gs = g.template cast<Scalar>();
  for (Index a = 0; a < left; ++a) {
    Eigen::Map<const Block> in(X.data() + a * mid * right, mid, right);
    Eigen::Map<Block> out(Y.data() + a * mid * right, mid, right);
    out.noalias() = gs * in;
  }
  return Y;
}

/// (I_{n0} (x) g^(1) (x) ... (x) g^(d)) X.
template <typename Scalar>
BasicTensor<Scalar> apply_group(const GroupTuple& g, BasicTensor<Scalar> X) {
  if (g.d() != X.d()) throw std::invalid_argument("apply_group: tuple length does not match d");
  for (int i = 1; i <= X.d(); ++i) X = apply_factor(g[i], i, X);
  return X;
}

/// Conjugate-symmetry check relative to the Frobenius norm.
bool is_hermitian(const MatrixXc& A, double rel_tol = 1e-12);

/// Eigenvalues sorted nonincreasingly.
Eigen::VectorXd spectrum(const MatrixXc& rho);

/// Sum of the absolute eigenvalues of A - B.
double trace_distance(const MatrixXc& A, const MatrixXc& B);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const MatrixXc& rho);

/// Numerical singularity test: smallest eigenvalue <= rel_tol * trace.
bool is_singular(const MatrixXc& rho, double rel_tol = 1e-12);

/// Hermitian PSD square root; negative rounding eigenvalues are clipped.
MatrixXc hermitian_sqrt(const MatrixXc& rho);

/// Numerical rank of a matrix via its singular values.
Index numerical_rank(const MatrixXc& M, double rel_tol = 1e-10);

}  // namespace tscale
