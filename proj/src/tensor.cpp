#include "tscale/tensor.hpp"

#include <sstream>

namespace tscale {

TensorFormat::TensorFormat(Index n0, std::vector<Index> dims) : n0_(n0), dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("tensor format needs d >= 1");
  if (n0_ < 1) throw std::invalid_argument("tensor format: n0 must be positive");
  for (Index n : dims_)
    if (n < 1) throw std::invalid_argument("tensor format: dimensions must be positive");
}

TensorFormat TensorFormat::from_all(std::span<const Index> all) {
  if (all.size() < 2) throw std::invalid_argument("tensor format needs [n0, n1, ..., nd], d >= 1");
  return TensorFormat(all[0], std::vector<Index>(all.begin() + 1, all.end()));
}

Index TensorFormat::dim(int factor) const {
  if (factor == 0) return n0_;
  return dims_.at(factor - 1);
}

Index TensorFormat::size() const { return n0_ * local_size(); }

Index TensorFormat::local_size() const {
  return std::accumulate(dims_.begin(), dims_.end(), Index{1}, std::multiplies<>());
}

std::vector<Index> TensorFormat::all_dims() const {
  std::vector<Index> all{n0_};
  all.insert(all.end(), dims_.begin(), dims_.end());
  return all;
}

std::string TensorFormat::str() const {
  std::ostringstream os;
  os << "(" << n0_ << ";";
  for (std::size_t k = 0; k < dims_.size(); ++k) os << (k ? "," : "") << dims_[k];
  os << ")";
  return os.str();
}

GroupTuple GroupTuple::identity(std::span<const Index> dims) {
  GroupTuple g;
  for (Index n : dims) g.factors.push_back(MatrixXc::Identity(n, n));
  return g;
}

std::vector<Index> GroupTuple::dims() const {
  std::vector<Index> out;
  for (const auto& f : factors) out.push_back(f.rows());
  return out;
}

GroupTuple operator*(const GroupTuple& g, const GroupTuple& h) {
  if (g.d() != h.d()) throw std::invalid_argument("group tuples of different length");
  GroupTuple out;
  for (int k = 0; k < g.d(); ++k) {
    if (g.factors[k].cols() != h.factors[k].rows())
      throw std::invalid_argument("group tuple factor shapes differ");
    out.factors.push_back(g.factors[k] * h.factors[k]);
  }
  return out;
}

GroupTuple inverse(const GroupTuple& g) {
  GroupTuple out;
  for (const auto& f : g.factors) out.factors.push_back(f.inverse());
  return out;
}

bool is_hermitian(const MatrixXc& A, double rel_tol) {
  if (A.rows() != A.cols()) return false;
  const double scale = std::max(A.norm(), 1e-300);
  return (A - A.adjoint()).norm() <= rel_tol * scale;
}

Eigen::VectorXd spectrum(const MatrixXc& rho) {
  if (!is_hermitian(rho)) throw std::invalid_argument("spectrum: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

double trace_distance(const MatrixXc& A, const MatrixXc& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols() || A.rows() != A.cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  const MatrixXc D = A - B;
  const MatrixXc H = 0.5 * (D + D.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double min_eigenvalue(const MatrixXc& rho) {
  const MatrixXc H = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool is_singular(const MatrixXc& rho, double rel_tol) {
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) return true;
  return min_eigenvalue(rho) <= rel_tol * tr;
}

MatrixXc hermitian_sqrt(const MatrixXc& rho) {
  const MatrixXc H = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(H);
  const Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

Index numerical_rank(const MatrixXc& M, double rel_tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXc> svd(M);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Index r = 0;
  for (Index k = 0; k < s.size(); ++k)
    if (s(k) > rel_tol * s(0)) ++r;
  return r;
}

}  // namespace tscale
