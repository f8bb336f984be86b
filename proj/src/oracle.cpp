#include "tscale/oracle.hpp"

#include <cmath>
#include <future>
#include <memory>
#include <stdexcept>

namespace tscale {

std::string to_string(Answer a) { return a == Answer::In ? "IN" : "EPS_FAR"; }

namespace {

struct RunOutcome {
  ScalingReport report;
  std::optional<Tensor> sample;
  bool success = false;
};

double max_distance(const Tensor& X, const GroupTuple& g, const TargetSpectrum& p) {
  double m = 0.0;
  for (double e : marginal_distances(apply_group(g, X), p)) m = std::max(m, e);
  return m;
}

// Runs `one(seed, hooks)` for every repetition and aggregates deterministically.
template <typename Run>
MembershipVerdict repeat_runs(const OracleConfig& cfg, Run one) {
  if (cfg.repeats < 1) throw std::invalid_argument("repeats must be at least 1");
  cfg.scaling.validate();
  const auto R = static_cast<std::size_t>(cfg.repeats);
  std::vector<RunOutcome> outcomes(R);

  if (cfg.parallel && R > 1) {
    // A success cancels only larger seeds, so the smallest successful seed
    // always runs to completion.
    auto flags = std::make_unique<std::atomic<bool>[]>(R);
    for (std::size_t r = 0; r < R; ++r) flags[r] = false;
    std::vector<std::future<void>> jobs;
    for (std::size_t r = 0; r < R; ++r) {
      jobs.push_back(std::async(std::launch::async, [&, r] {
        RunHooks hooks;
        hooks.cancelled = &flags[r];
        outcomes[r] = one(cfg.scaling.seed + r, hooks);
        if (outcomes[r].success)
          for (std::size_t s = r + 1; s < R; ++s) flags[s] = true;
      }));
    }
    for (auto& j : jobs) j.get();
  } else {
    for (std::size_t r = 0; r < R; ++r) {
      outcomes[r] = one(cfg.scaling.seed + r, RunHooks{});
      if (outcomes[r].success) {
        outcomes.resize(r + 1);
        break;
      }
    }
  }

  MembershipVerdict v;
  v.epsilon = cfg.scaling.epsilon;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (outcomes[r].success && !v.witness) {
      v.runs = static_cast<int>(r + 1);
      v.answer = Answer::In;
      v.witness = outcomes[r].report.group;
      v.witnessSeed = cfg.scaling.seed + r;
      v.evidence = outcomes[r].report;
      v.sample = outcomes[r].sample;
    }
  }
  if (!v.witness) {
    v.runs = cfg.repeats;
    v.answer = Answer::EpsFar;
    v.evidence = outcomes.back().report;
    v.sample = outcomes.back().sample;
  }
  return v;
}

}  // namespace

MembershipVerdict membership(const Tensor& X, const TargetSpectrum& p, const OracleConfig& cfg) {
  return repeat_runs(cfg, [&](std::uint64_t seed, const RunHooks& hooks) {
    ScalingConfig sc = cfg.scaling;
    sc.seed = seed;
    RunOutcome o;
    o.report = run_scaling(X, p, sc, hooks);
    o.success = o.report.verdict == Verdict::Scaled && max_distance(X, o.report.group, p) <= sc.epsilon;
    return o;
  });
}

MembershipVerdict qmp(const TargetSpectrum& p, std::span<const Index> dims, const OracleConfig& cfg) {
  const TensorFormat f(1, std::vector<Index>(dims.begin(), dims.end()));
  if (p.dims() != f.dims()) throw std::invalid_argument("target dimensions do not match the requested format");
  const Parametrization phi = Parametrization::identity(f);
  return repeat_runs(cfg, [&](std::uint64_t seed, const RunHooks& hooks) {
    ScalingConfig sc = cfg.scaling;
    sc.seed = seed;
    GeneralScalingResult g = run_general_scaling(phi, p, sc, hooks);
    RunOutcome o;
    o.success = g.report.verdict == Verdict::Scaled && max_distance(g.sample, g.report.group, p) <= sc.epsilon;
    o.report = std::move(g.report);
    o.sample = std::move(g.sample);
    return o;
  });
}

Index KroneckerQuery::effective_n() const {
  if (n > 0) return n;
  return std::max({lambda.height(), mu.height(), nu.height()});
}

TargetSpectrum KroneckerQuery::normalized() const {
  const int k = lambda.size();
  if (k == 0 || mu.size() != k || nu.size() != k)
    throw std::invalid_argument("Kronecker query needs three nonempty partitions of the same size");
  const auto len = static_cast<std::size_t>(effective_n());
  std::vector<std::vector<Rational>> parts;
  for (const Partition* part : {&lambda, &mu, &nu}) {
    const Partition padded = part->padded(len);
    std::vector<Rational> v;
    for (int x : padded.parts()) v.emplace_back(x, k);
    parts.push_back(std::move(v));
  }
  return TargetSpectrum(std::move(parts));
}

MembershipVerdict kronecker_support(const KroneckerQuery& q, const OracleConfig& cfg) {
  const TargetSpectrum p = q.normalized();
  const Index n = q.effective_n();
  const std::vector<Index> dims{n, n, n};
  return qmp(p, dims, cfg);
}

double gap_constant(std::span<const Index> dims, std::int64_t ell, double C) {
  if (dims.empty() || ell < 1 || !(C > 0.0)) throw std::invalid_argument("gap_constant: need dims, ell >= 1 and C > 0");
  Index sum = 0, nmax = 0;
  for (Index n : dims) {
    sum += n;
    nmax = std::max(nmax, n);
  }
  return std::exp(-C * static_cast<double>(sum) * std::log(static_cast<double>(ell * nmax)));
}

SinkhornResult sinkhorn(const Eigen::MatrixXd& A, const Eigen::VectorXd& r, const Eigen::VectorXd& c, double eps,
                        std::uint64_t maxIter) {
  if (A.rows() != r.size() || A.cols() != c.size()) throw std::invalid_argument("sinkhorn: target lengths do not match");
  if ((A.array() < 0.0).any() || (r.array() < 0.0).any() || (c.array() < 0.0).any())
    throw std::invalid_argument("sinkhorn: matrix and targets must be nonnegative");
  if (std::abs(r.sum() - c.sum()) > 1e-12 * std::max(1.0, r.sum()))
    throw std::invalid_argument("sinkhorn: row and column targets must have equal sums");

  SinkhornResult out;
  out.rowScale = Eigen::VectorXd::Ones(A.rows());
  out.colScale = Eigen::VectorXd::Ones(A.cols());
  for (Index j = 0; j < A.rows(); ++j)
    if (A.row(j).sum() == 0.0 && r(j) > 0.0) {
      out.nonScalable = true;
      out.reason = "row " + std::to_string(j + 1) + " is zero but has a positive target";
    }
  for (Index k = 0; k < A.cols(); ++k)
    if (A.col(k).sum() == 0.0 && c(k) > 0.0) {
      out.nonScalable = true;
      out.reason = "column " + std::to_string(k + 1) + " is zero but has a positive target";
    }
  out.scaled = A;
  if (out.nonScalable) return out;

  bool rows_next = true;
  for (;;) {
    out.scaled = out.rowScale.asDiagonal() * A * out.colScale.asDiagonal();
    const Eigen::VectorXd rs = out.scaled.rowwise().sum();
    const Eigen::VectorXd cs = out.scaled.colwise().sum().transpose();
    out.error = (rs - r).lpNorm<1>() + (cs - c).lpNorm<1>();
    if (out.error <= eps) {
      out.converged = true;
      break;
    }
    if (out.iterations >= maxIter) break;
    if (rows_next) {
      for (Index j = 0; j < A.rows(); ++j)
        if (rs(j) > 0.0) out.rowScale(j) *= r(j) / rs(j);
    } else {
      for (Index k = 0; k < A.cols(); ++k)
        if (cs(k) > 0.0) out.colScale(k) *= c(k) / cs(k);
    }
    rows_next = !rows_next;
    ++out.iterations;
  }
  return out;
}

Tensor matrix_scaling_tensor(const Eigen::MatrixXd& A) {
  if ((A.array() < 0.0).any()) throw std::invalid_argument("matrix_scaling_tensor: entries must be nonnegative");
  const Index n1 = A.rows(), n2 = A.cols();
  Tensor X(TensorFormat(n1 * n2, {n1, n2}));
  for (Index j = 0; j < n1; ++j)
    for (Index k = 0; k < n2; ++k) X({j * n2 + k, j, k}) = std::sqrt(A(j, k));
  return X;
}

}  // namespace tscale
