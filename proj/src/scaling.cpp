#include "tscale/scaling.hpp"

#include "tscale/errors.hpp"
#include "tscale/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace tscale {

std::string to_string(ScalingMode m) { return m == ScalingMode::Borel ? "BOREL" : "PARABOLIC"; }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Scaled: return "SCALED";
    case Verdict::NotInPolytope: return "NOT_IN_POLYTOPE";
    case Verdict::BudgetExhausted: return "BUDGET_EXHAUSTED";
  }
  return "?";
}

void ScalingConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be a positive number");
  if (!randRange.theoretical && randRange.value < 1) throw std::invalid_argument("random range must be at least 1");
  if (maxItersOverride && *maxItersOverride == 0) throw std::invalid_argument("max iterations must be positive");
}

GroupTuple random_group(std::span<const Index> dims, std::uint64_t range, std::uint64_t seed) {
  if (range < 1) throw std::invalid_argument("random_group: range must be at least 1");
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::uint64_t> dist(1, range);
  GroupTuple g;
  for (Index n : dims) {
    MatrixXc m(n, n);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) m(r, c) = static_cast<double>(dist(gen));
    g.factors.push_back(std::move(m));
  }
  return g;
}

GroupTuple random_group(std::span<const Index> dims, const BigInt& M, std::uint64_t seed) {
  std::size_t count = 0;
  for (Index n : dims) count += static_cast<std::size_t>(n * n);
  const std::vector<double> draws = sample_big_uniform(count, M, seed);
  GroupTuple g;
  std::size_t pos = 0;
  for (Index n : dims) {
    MatrixXc m(n, n);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) m(r, c) = draws[pos++];
    g.factors.push_back(std::move(m));
  }
  return g;
}

std::vector<double> marginal_distances(const Tensor& Y, const TargetSpectrum& p) {
  if (p.dims() != Y.format().dims()) throw std::invalid_argument("target dimensions do not match the tensor format");
  std::vector<double> out;
  for (int i = 1; i <= Y.d(); ++i) out.push_back(trace_distance(marginal(Y, i), p.target_marginal(i)));
  return out;
}

MatrixXc step_matrix(const MatrixXc& rho, const TargetSpectrum& p, int factor, ScalingMode mode) {
  const Index n = rho.rows();
  MatrixXc R;
  if (mode == ScalingMode::Borel) {
    R = upper_cholesky(rho);
    const MatrixXc Rinv = R.triangularView<Eigen::Upper>().solve(MatrixXc::Identity(n, n));
    return p.ascending(factor).cwiseSqrt().cast<Complex>().asDiagonal() * Rinv;
  }
  const auto blocks = p.ascending_blocks(factor);
  R = block_cholesky(rho, blocks);
  return p.ascending(factor).cwiseSqrt().cast<Complex>().asDiagonal() * R.partialPivLu().inverse();
}

namespace {

int argmax_first(const std::vector<double>& v) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(v.size()); ++k)
    if (v[k] > v[best]) best = k;
  return best + 1;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

// log |chi_{p*}(b)| = -sum over blocks of p_block * log |det b_block|.
double log_dual_character(const GroupTuple& b, const TargetSpectrum& p) {
  double acc = 0.0;
  for (int i = 1; i <= b.d(); ++i) {
    const Eigen::VectorXd up = p.ascending(i);
    Index start = 0;
    for (Index m : p.ascending_blocks(i)) {
      const Complex det = b[i].block(start, start, m, m).determinant();
      acc -= up(start) * std::log(std::abs(det));
      start += m;
    }
  }
  return acc;
}

bool any_singular(const Tensor& Y, int* which) {
  for (int i = 1; i <= Y.d(); ++i)
    if (is_singular(marginal(Y, i))) {
      if (which) *which = i;
      return true;
    }
  return false;
}

// Scales X0 (already randomized) from the identity; all p entries positive.
ScalingReport scale_from(const Tensor& X0, const TargetSpectrum& p, const ScalingConfig& cfg,
                         double eps, std::uint64_t budgetT, const RunHooks& hooks) {
  ScalingReport rep;
  rep.budgetT = budgetT;
  rep.maxIters = cfg.maxItersOverride.value_or(budgetT);
  const auto dims = X0.format().dims();
  GroupTuple b = GroupTuple::identity(dims);

  int bad = 0;
  if (X0.is_zero() || any_singular(X0, &bad)) {
    rep.verdict = Verdict::NotInPolytope;
    rep.reason = X0.is_zero() ? "randomized tensor is zero" : "marginal " + std::to_string(bad) + " is singular";
    rep.group = b;
    return rep;
  }

  const double n0 = X0.norm();
  b[1] /= n0;
  Tensor Y = X0;
  Y /= n0;

  for (std::uint64_t t = 0;; ++t) {
    if (hooks.cancelled && hooks.cancelled->load(std::memory_order_relaxed)) {
      rep.verdict = Verdict::BudgetExhausted;
      rep.reason = "cancelled";
      rep.iterations = t;
      break;
    }
    std::vector<MatrixXc> rhos;
    std::vector<double> dist;
    const auto measure = [&] {
      rhos.clear();
      dist.clear();
      for (int i = 1; i <= Y.d(); ++i) {
        rhos.push_back(marginal(Y, i));
        dist.push_back(trace_distance(rhos.back(), p.target_marginal(i)));
      }
    };
    measure();
    if (max_of(dist) <= eps) {
      // Confirm on a freshly recomputed tensor before accepting.
      Y = apply_group(b, X0);
      const double fresh = Y.norm();
      if (std::isfinite(fresh) && fresh > 0.0) {
        Y /= fresh;
        b[1] /= fresh;
      }
      measure();
    }
    const double worst = max_of(dist);
    rep.finalEps = worst;
    if (!std::all_of(dist.begin(), dist.end(), [](double x) { return std::isfinite(x); })) {
      rep.verdict = Verdict::NotInPolytope;
      rep.iterations = t;
      rep.reason = "marginals lost finite precision at iteration " + std::to_string(t);
      break;
    }

    IterationRecord rec;
    rec.index = t;
    rec.eps = dist;
    rec.norm = Y.norm();
    rec.capacity = rec.norm * std::exp(log_dual_character(b, p));
    if (std::abs(rec.norm - 1.0) > 1e-12) {
      b[1] /= rec.norm;
      Y /= rec.norm;
    }

    if (worst <= eps) {
      rep.verdict = Verdict::Scaled;
      rep.iterations = t;
      if (rep.trace.size() < cfg.maxTraceRecords) rep.trace.push_back(std::move(rec));
      break;
    }
    if (t >= rep.maxIters) {
      rep.verdict = Verdict::BudgetExhausted;
      rep.iterations = t;
      rep.reason = "iteration budget of " + std::to_string(rep.maxIters) + " exhausted";
      if (rep.trace.size() < cfg.maxTraceRecords) rep.trace.push_back(std::move(rec));
      break;
    }

    const int i = argmax_first(dist);
    rec.chosen = i;
    MatrixXc A;
    try {
      A = step_matrix(rhos[i - 1], p, i, cfg.mode);
    } catch (const SingularMatrixError&) {
      rep.verdict = Verdict::NotInPolytope;
      rep.iterations = t;
      rep.reason = "marginal " + std::to_string(i) + " became numerically singular at iteration " + std::to_string(t);
      if (rep.trace.size() < cfg.maxTraceRecords) rep.trace.push_back(std::move(rec));
      break;
    }
    Tensor next = apply_factor(A, i, Y);
    const double nn = next.norm();
    if (!std::isfinite(nn) || nn == 0.0) throw NumericError("tensor norm degenerated at iteration " + std::to_string(t));
    next /= nn;
    A /= nn;
    b[i] = A * b[i];

    if (hooks.onStep) hooks.onStep(StepView{t, i, dist[i - 1], Y, next, A});
    Y = std::move(next);
    if (rep.trace.size() < cfg.maxTraceRecords)
      rep.trace.push_back(std::move(rec));
    else if (rep.trace.size() == cfg.maxTraceRecords && rep.warnings.empty())
      rep.warnings.push_back("trace truncated after " + std::to_string(cfg.maxTraceRecords) + " records");
  }
  rep.group = std::move(b);
  return rep;
}

GroupTuple start_group(std::span<const Index> dims, const TargetSpectrum& p, const ScalingConfig& cfg,
                       RandomizationBounds& bounds) {
  bounds = randomization_bounds(p.ell(), dims);
  if (cfg.start == StartMode::Identity) return GroupTuple::identity(dims);
  if (cfg.randRange.theoretical) return random_group(dims, bounds.M, cfg.seed);
  return random_group(dims, cfg.randRange.value, cfg.seed);
}

double used_log2M(const ScalingConfig& cfg, const RandomizationBounds& bounds) {
  if (cfg.randRange.theoretical) return bounds.log2M;
  return std::log2(static_cast<double>(std::max<std::uint64_t>(cfg.randRange.value, 1)));
}

}  // namespace

StepResult scaling_step(const GroupTuple& g, const Tensor& X, const TargetSpectrum& p, ScalingMode mode) {
  const Tensor Y = apply_group(g, X);
  StepResult out;
  out.distances = marginal_distances(Y, p);
  out.chosen = argmax_first(out.distances);
  out.group = g;
  const MatrixXc A = step_matrix(marginal(Y, out.chosen), p, out.chosen, mode);
  out.group[out.chosen] = A * g[out.chosen];
  return out;
}

Restriction restrict_positive(const Tensor& X, const TargetSpectrum& p) {
  const TensorFormat& f = X.format();
  if (p.dims() != f.dims()) throw std::invalid_argument("target dimensions do not match the tensor format");
  Restriction out;
  std::vector<std::vector<Rational>> parts;
  std::vector<Index> rdims;
  for (int i = 1; i <= f.d(); ++i) {
    const Index r = p.rank(i);
    if (r == 0) throw std::invalid_argument("target part " + std::to_string(i) + " is identically zero");
    out.ranks.push_back(r);
    rdims.push_back(r);
    parts.emplace_back(p.part(i).begin(), p.part(i).begin() + r);
  }
  out.target = TargetSpectrum(std::move(parts));
  out.tensor = Tensor(TensorFormat(f.n0(), rdims));
  for (Index off = 0; off < out.tensor.format().size(); ++off) {
    auto idx = out.tensor.unravel(off);
    for (int i = 1; i <= f.d(); ++i) idx[i] += f.dim(i) - rdims[i - 1];
    out.tensor.entries()[off] = X(idx);
  }
  return out;
}

Tensor embed_positive(const Tensor& Xplus, const TensorFormat& full) {
  const TensorFormat& f = Xplus.format();
  if (f.d() != full.d() || f.n0() != full.n0()) throw std::invalid_argument("embed_positive: format mismatch");
  Tensor out(full);
  for (Index off = 0; off < f.size(); ++off) {
    auto idx = Xplus.unravel(off);
    for (int i = 1; i <= f.d(); ++i) {
      if (f.dim(i) > full.dim(i)) throw std::invalid_argument("embed_positive: restriction larger than target format");
      idx[i] += full.dim(i) - f.dim(i);
    }
    out(idx) = Xplus.entries()[off];
  }
  return out;
}

double pad_delta(double eps, int d, double normX) {
  return std::min(std::pow(eps, 1.0 / d) / (4.0 * normX), 1e-3);
}

GroupTuple pad_scaling(const GroupTuple& bplus, std::span<const Index> dims, double delta) {
  if (static_cast<int>(dims.size()) != bplus.d()) throw std::invalid_argument("pad_scaling: length mismatch");
  GroupTuple out;
  for (int i = 1; i <= bplus.d(); ++i) {
    const Index n = dims[i - 1], r = bplus[i].rows();
    if (r > n) throw std::invalid_argument("pad_scaling: block larger than factor");
    MatrixXc m = MatrixXc::Zero(n, n);
    m.topLeftCorner(n - r, n - r) = delta * MatrixXc::Identity(n - r, n - r);
    m.bottomRightCorner(r, r) = bplus[i];
    out.factors.push_back(std::move(m));
  }
  return out;
}

ScalingReport run_scaling(const Tensor& X, const TargetSpectrum& p, const ScalingConfig& cfg, const RunHooks& hooks) {
  cfg.validate();
  const TensorFormat& f = X.format();
  if (p.dims() != f.dims()) throw std::invalid_argument("target dimensions do not match the tensor format");
  if (X.is_zero()) throw std::invalid_argument("tensor must be nonzero");

  RandomizationBounds bounds;
  const GroupTuple g0 = start_group(f.dims(), p, cfg, bounds);
  const double log2M = used_log2M(cfg, bounds);
  const int bits = input_bitsize(X, p);
  const std::uint64_t T = iteration_budget(f.all_dims(), bits, cfg.epsilon, log2M);
  return run_scaling_from(X, g0, p, cfg, T, log2M, hooks);
}

ScalingReport run_scaling_from(const Tensor& X, const GroupTuple& g0, const TargetSpectrum& p,
                               const ScalingConfig& cfg, std::uint64_t T, double log2M, const RunHooks& hooks) {
  cfg.validate();
  const TensorFormat& f = X.format();
  if (p.dims() != f.dims()) throw std::invalid_argument("target dimensions do not match the tensor format");
  const Tensor X0 = apply_group(g0, X);

  if (!p.has_zeros()) {
    ScalingReport rep = scale_from(X0, p, cfg, cfg.epsilon, T, hooks);
    rep.log2M = log2M;
    rep.group = rep.group * g0;
    return rep;
  }

  const Restriction res = restrict_positive(X0, p);
  ScalingReport rep;
  if (res.tensor.is_zero()) {
    rep.verdict = Verdict::NotInPolytope;
    rep.reason = "restriction to the support of the target is zero";
    rep.budgetT = T;
    rep.log2M = log2M;
    rep.group = GroupTuple::identity(f.dims());
    return rep;
  }
  rep = scale_from(res.tensor, res.target, cfg, cfg.epsilon / 2.0, T, hooks);
  rep.log2M = log2M;
  if (rep.verdict != Verdict::Scaled) {
    if (rep.verdict == Verdict::NotInPolytope) rep.reason = "restricted tensor: " + rep.reason;
    rep.group = pad_scaling(rep.group, f.dims(), 1.0) * g0;
    return rep;
  }

  double delta = pad_delta(cfg.epsilon, f.d(), X0.norm());
  for (int attempt = 0; attempt < 20; ++attempt, delta /= 10.0) {
    const GroupTuple g = pad_scaling(rep.group, f.dims(), delta) * g0;
    const double e = max_of(marginal_distances(apply_group(g, X), p));
    if (e <= cfg.epsilon) {
      rep.group = g;
      rep.finalEps = e;
      return rep;
    }
  }
  rep.verdict = Verdict::BudgetExhausted;
  rep.reason = "padded scaling of the restriction is not epsilon-close";
  rep.group = pad_scaling(rep.group, f.dims(), delta) * g0;
  return rep;
}

}  // namespace tscale
