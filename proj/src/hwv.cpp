#include "tscale/hwv.hpp"

#include "tscale/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tscale {

namespace {

int permutation_sign(const std::vector<int>& sigma) {
  int inversions = 0;
  for (std::size_t a = 0; a < sigma.size(); ++a)
    for (std::size_t b = a + 1; b < sigma.size(); ++b)
      if (sigma[a] > sigma[b]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

bool is_permutation_of_range(const std::vector<int>& perm, int k) {
  if (static_cast<int>(perm.size()) != k) return false;
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int s = 0; s < k; ++s)
    if (sorted[static_cast<std::size_t>(s)] != s) return false;
  return true;
}

Complex ipow(Complex base, int e) {
  if (e == 0) return 1.0;
  if (e < 0) {
    if (base == Complex(0.0)) throw std::domain_error("character: zero diagonal entry raised to a negative power");
    base = 1.0 / base;
    e = -e;
  }
  Complex acc = 1.0;
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

// Index maps J: slots -> [n] on which the permuted determinant product of
// weight lambda* does not vanish, with the value (+1 or -1) it takes.
struct IndexMap {
  std::vector<Index> J;
  int sign;
};

std::vector<IndexMap> nonzero_maps(const Partition& lambda, const std::vector<int>& perm, Index n) {
  const Partition heights = lambda.conjugate();
  const int k = lambda.size();
  std::vector<IndexMap> maps{{std::vector<Index>(static_cast<std::size_t>(k), 0), 1}};
  int start = 0;
  for (int h : heights.parts()) {
    std::vector<int> sigma(static_cast<std::size_t>(h));
    std::iota(sigma.begin(), sigma.end(), 0);
    std::vector<IndexMap> next;
    do {
      const int s = permutation_sign(sigma);
      for (const auto& m : maps) {
        IndexMap e = m;
        for (int r = 0; r < h; ++r)
          e.J[static_cast<std::size_t>(perm[static_cast<std::size_t>(start + r)])] = n - 1 - sigma[static_cast<std::size_t>(r)];
        e.sign *= s;
        next.push_back(std::move(e));
      }
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    maps = std::move(next);
    start += h;
  }
  return maps;
}

void check_budget(const HWVSpec& spec, const TensorFormat& f, const EvalBudget& budget) {
  if (spec.degree > budget.maxDegree || f.local_size() > budget.maxLocalDim)
    throw BudgetExceededError("highest weight vector evaluation of degree " + std::to_string(spec.degree) +
                              " on local dimension " + std::to_string(f.local_size()) +
                              " exceeds the configured budget (degree <= " + std::to_string(budget.maxDegree) +
                              ", local dimension <= " + std::to_string(budget.maxLocalDim) + ")");
}

Complex eval_unchecked(const HWVSpec& spec, const Tensor& X) {
  const TensorFormat& f = X.format();
  const int d = f.d();
  const auto k = static_cast<std::size_t>(spec.degree);
  std::vector<Index> stride(static_cast<std::size_t>(d) + 1, 1);
  for (int i = d - 1; i >= 0; --i) stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i) + 1] * f.dim(i + 1);

  std::vector<std::vector<IndexMap>> maps;
  for (int i = 1; i <= d; ++i)
    maps.push_back(nonzero_maps(spec.weight[static_cast<std::size_t>(i - 1)],
                                spec.perms[static_cast<std::size_t>(i - 1)], f.dim(i)));

  std::vector<Index> offsets(k);
  for (std::size_t a = 0; a < k; ++a) offsets[a] = spec.indexSeq[a] * stride[0];

  const Complex* x = X.data();
  Complex total = 0.0;
  auto rec = [&](auto&& self, int i, int sign) -> void {
    if (i > d) {
      Complex prod = static_cast<double>(sign);
      for (std::size_t a = 0; a < k; ++a) prod *= x[offsets[a]];
      total += prod;
      return;
    }
    const Index s = stride[static_cast<std::size_t>(i)];
    for (const auto& m : maps[static_cast<std::size_t>(i - 1)]) {
      for (std::size_t a = 0; a < k; ++a) offsets[a] += m.J[a] * s;
      self(self, i + 1, sign * m.sign);
      for (std::size_t a = 0; a < k; ++a) offsets[a] -= m.J[a] * s;
    }
  };
  rec(rec, 1, 1);
  return total;
}

}  // namespace

void HWVSpec::validate(const TensorFormat& f) const {
  if (degree < 1) throw std::invalid_argument("hwv spec: degree must be positive");
  if (d() != f.d()) throw std::invalid_argument("hwv spec: weight count does not match the number of factors");
  if (static_cast<int>(perms.size()) != d()) throw std::invalid_argument("hwv spec: need one permutation per factor");
  if (static_cast<int>(indexSeq.size()) != degree) throw std::invalid_argument("hwv spec: index sequence must have length k");
  for (Index v : indexSeq)
    if (v < 0 || v >= f.n0()) throw std::invalid_argument("hwv spec: index sequence entry outside [0, n0)");
  for (int i = 1; i <= d(); ++i) {
    const auto& w = weight[static_cast<std::size_t>(i - 1)];
    if (w.size() != degree) throw std::invalid_argument("hwv spec: weight " + std::to_string(i) + " is not a partition of k");
    if (w.height() > f.dim(i)) throw std::invalid_argument("hwv spec: weight " + std::to_string(i) + " has too many parts");
    if (!is_permutation_of_range(perms[static_cast<std::size_t>(i - 1)], degree))
      throw std::invalid_argument("hwv spec: entry " + std::to_string(i) + " is not a permutation of 0..k-1");
  }
}

Complex det_l(std::span<const VectorXc> vectors) {
  const auto l = static_cast<Index>(vectors.size());
  if (l == 0) return 1.0;
  const Index n = vectors.front().size();
  if (l > n) throw std::invalid_argument("det_l: more vectors than coordinates");
  MatrixXc M(l, l);
  for (Index r = 0; r < l; ++r) {
    if (vectors[static_cast<std::size_t>(r)].size() != n) throw std::invalid_argument("det_l: vectors of different length");
    for (Index j = 0; j < l; ++j) M(r, j) = vectors[static_cast<std::size_t>(r)](n - 1 - j);
  }
  return M.determinant();
}

Complex eval_hwv(const HWVSpec& spec, const Tensor& X, const EvalBudget& budget) {
  spec.validate(X.format());
  check_budget(spec, X.format(), budget);
  return eval_unchecked(spec, X);
}

Weight dual_weight(const std::vector<Partition>& lambda, std::span<const Index> dims) {
  if (lambda.size() != dims.size()) throw std::invalid_argument("dual_weight: length mismatch");
  Weight w;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const Partition padded = lambda[i].padded(static_cast<std::size_t>(dims[i]));
    std::vector<int> v(padded.parts().rbegin(), padded.parts().rend());
    for (int& x : v) x = -x;
    w.push_back(std::move(v));
  }
  return w;
}

Complex chi(const Weight& w, const GroupTuple& R) {
  if (static_cast<int>(w.size()) != R.d()) throw std::invalid_argument("chi: weight and tuple lengths differ");
  Complex acc = 1.0;
  for (int i = 1; i <= R.d(); ++i) {
    const auto& wi = w[static_cast<std::size_t>(i - 1)];
    if (static_cast<Index>(wi.size()) != R[i].rows()) throw std::invalid_argument("chi: weight length does not match factor");
    for (Index j = 0; j < R[i].rows(); ++j) acc *= ipow(R[i](j, j), wi[static_cast<std::size_t>(j)]);
  }
  return acc;
}

Complex chi(const Weight& w, const GroupTuple& R, const std::vector<std::vector<Index>>& blocks) {
  if (static_cast<int>(w.size()) != R.d() || static_cast<int>(blocks.size()) != R.d())
    throw std::invalid_argument("chi: weight, block and tuple lengths differ");
  Complex acc = 1.0;
  for (int i = 1; i <= R.d(); ++i) {
    const auto& wi = w[static_cast<std::size_t>(i - 1)];
    Index start = 0;
    for (Index m : blocks[static_cast<std::size_t>(i - 1)]) {
      for (Index j = start + 1; j < start + m; ++j)
        if (wi[static_cast<std::size_t>(j)] != wi[static_cast<std::size_t>(start)])
          throw std::invalid_argument("chi: weight is not constant on a diagonal block");
      acc *= ipow(R[i].block(start, start, m, m).determinant(), wi[static_cast<std::size_t>(start)]);
      start += m;
    }
    if (start != R[i].rows()) throw std::invalid_argument("chi: block sizes do not cover the factor");
  }
  return acc;
}

double hwv_bound(const TensorFormat& f, int k) { return std::pow(static_cast<double>(f.local_size()), k); }

TransformCheck hwv_transform_check(const HWVSpec& spec, const Tensor& X, const GroupTuple& R, double tol,
                                   const EvalBudget& budget) {
  TransformCheck out;
  const Tensor RX = apply_group(R, X);
  out.lhs = eval_hwv(spec, RX, budget);
  const Complex c = chi(dual_weight(spec.weight, X.format().dims()), inverse(R));
  out.rhs = c * eval_hwv(spec, X, budget);
  const double bound = hwv_bound(X.format(), spec.degree);
  const double scale = std::max(bound * std::pow(RX.norm(), spec.degree),
                                std::abs(c) * bound * std::pow(X.norm(), spec.degree));
  const double denom = std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-7 * scale});
  out.error = denom > 0.0 ? std::abs(out.lhs - out.rhs) / denom : 0.0;
  out.ok = out.error <= tol;
  return out;
}

double capacity_value(const Tensor& X, const TargetSpectrum& p, const GroupTuple& R) {
  if (p.dims() != X.format().dims() || R.dims() != X.format().dims())
    throw std::invalid_argument("capacity_value: dimension mismatch");
  double log_chi = 0.0;
  for (int i = 1; i <= R.d(); ++i) {
    const Eigen::VectorXd up = p.ascending(i);
    Index start = 0;
    for (Index m : p.ascending_blocks(i)) {
      const double weight = up(start);
      if (weight != 0.0) {
        const double det = std::abs(R[i].block(start, start, m, m).determinant());
        if (det == 0.0) return std::numeric_limits<double>::infinity();
        log_chi -= weight * std::log(det);
      }
      start += m;
    }
  }
  return apply_group(R, X).norm() * std::exp(log_chi);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: length mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;
    if (q[j] == 0.0) return std::numeric_limits<double>::infinity();
    acc += p[j] * std::log2(p[j] / q[j]);
  }
  return acc;
}

PinskerGap pinsker_gap(std::span<const double> p, const MatrixXc& rho, const MatrixXc& R) {
  const auto n = static_cast<Index>(p.size());
  if (rho.rows() != n || R.rows() != n) throw std::invalid_argument("pinsker_gap: dimension mismatch");
  std::vector<double> q(p.size());
  for (Index j = 0; j < n; ++j) q[static_cast<std::size_t>(j)] = std::norm(R(j, j));
  const Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(p.data(), n);
  const double td = trace_distance(pv.cast<Complex>().asDiagonal(), rho);
  return {kl_divergence(p, q), td * td / (16.0 * std::log(2.0))};
}

bool verify_progress(const HWVSpec& spec, const Tensor& Y, const Tensor& Yprime, double eps, double slack,
                     const EvalBudget& budget) {
  const double before = std::abs(eval_hwv(spec, Y, budget));
  const double after = std::abs(eval_hwv(spec, Yprime, budget));
  const double factor = std::exp2(spec.degree * eps * eps / (32.0 * std::log(2.0)));
  return after >= factor * before * (1.0 - slack);
}

std::optional<HWVSpec> find_nonvanishing_spec(const Tensor& X, const TargetSpectrum& p, int maxDegree,
                                              const EvalBudget& budget) {
  const TensorFormat& f = X.format();
  if (p.dims() != f.dims()) throw std::invalid_argument("find_nonvanishing_spec: dimension mismatch");
  const std::int64_t ell = p.ell();
  for (std::int64_t k = ell; k <= maxDegree; k += ell) {
    HWVSpec spec;
    spec.degree = static_cast<int>(k);
    for (int i = 1; i <= f.d(); ++i) {
      std::vector<int> parts;
      for (const auto& r : p.part(i)) parts.push_back(static_cast<int>((r * Rational(k)).num()));
      spec.weight.emplace_back(std::move(parts));
    }
    check_budget(spec, f, budget);
    const double tol = 1e-9 * hwv_bound(f, spec.degree) * std::pow(X.norm(), spec.degree);

    std::vector<int> identity(static_cast<std::size_t>(k));
    std::iota(identity.begin(), identity.end(), 0);
    spec.indexSeq.assign(static_cast<std::size_t>(k), 0);
    while (true) {
      spec.perms.assign(static_cast<std::size_t>(f.d()), identity);
      while (true) {
        if (std::abs(eval_unchecked(spec, X)) > tol) return spec;
        // Advance the tuple of permutations, last factor fastest.
        int i = f.d() - 1;
        for (; i >= 0; --i) {
          auto& perm = spec.perms[static_cast<std::size_t>(i)];
          if (std::next_permutation(perm.begin(), perm.end())) break;
        }
        if (i < 0) break;
      }
      int pos = static_cast<int>(k) - 1;
      for (; pos >= 0; --pos) {
        if (++spec.indexSeq[static_cast<std::size_t>(pos)] < f.n0()) break;
        spec.indexSeq[static_cast<std::size_t>(pos)] = 0;
      }
      if (pos < 0) break;
    }
  }
  return std::nullopt;
}

}  // namespace tscale
