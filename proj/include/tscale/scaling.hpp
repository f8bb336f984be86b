// Alternating triangular scaling of tensors toward prescribed marginal spectra.
#pragma once

#include "tscale/bounds.hpp"
#include "tscale/rational.hpp"
#include "tscale/tensor.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tscale {

enum class ScalingMode { Borel, Parabolic };
enum class StartMode { Randomized, Identity };
enum class Verdict { Scaled, NotInPolytope, BudgetExhausted };

std::string to_string(ScalingMode m);
std::string to_string(Verdict v);

/// Range {1..value} for the random starting point, or the exact theoretical M.
struct RandRange {
  bool theoretical = false;
  std::uint64_t value = 65536;

  static RandRange practical(std::uint64_t v) { return {false, v}; }
  static RandRange exact() { return {true, 0}; }
};

struct ScalingConfig {
  double epsilon = 1e-3;
  std::uint64_t seed = 0;
  RandRange randRange;
  std::optional<std::uint64_t> maxItersOverride;
  ScalingMode mode = ScalingMode::Borel;
  StartMode start = StartMode::Randomized;
  std::size_t maxTraceRecords = 100000;

  void validate() const;
};

struct IterationRecord {
  std::uint64_t index = 0;
  int chosen = 0;            ///< factor scaled in this iteration (1-based), 0 if none
  std::vector<double> eps;   ///< distances before the step
  double norm = 1.0;         ///< norm of the current tensor before renormalization
  double capacity = 0.0;     ///< ||b X0|| |chi_{p*}(b)| for the accumulated scaling b
};

struct ScalingReport {
  Verdict verdict = Verdict::NotInPolytope;
  GroupTuple group;  ///< g with g.X epsilon-close when verdict is Scaled
  std::uint64_t iterations = 0;
  std::vector<IterationRecord> trace;
  std::uint64_t budgetT = 0;
  std::uint64_t maxIters = 0;
  double finalEps = 0.0;
  double log2M = 0.0;
  std::string reason;
  std::vector<std::string> warnings;
};

/// Snapshot passed to instrumentation after every step.
struct StepView {
  std::uint64_t index;
  int chosen;
  double epsChosen;
  const Tensor& before;  ///< unit-norm tensor before the step
  const Tensor& after;   ///< unit-norm tensor after the step and renormalization
  const MatrixXc& factor;  ///< matrix applied to the chosen factor
};

struct RunHooks {
  std::function<void(const StepView&)> onStep;
  const std::atomic<bool>* cancelled = nullptr;
};

/// Tuple of matrices with entries uniform in {1..range}; deterministic per seed.
GroupTuple random_group(std::span<const Index> dims, std::uint64_t range, std::uint64_t seed);
/// Same with entries uniform in {1..M} for an arbitrary-precision M, rescaled
/// by a common power of two so that they fit a double.
GroupTuple random_group(std::span<const Index> dims, const BigInt& M, std::uint64_t seed);

/// epsilon^(i) = ||rho_Y^(i) - diag(p_up^(i))||_tr for i = 1..d.
std::vector<double> marginal_distances(const Tensor& Y, const TargetSpectrum& p);

struct StepResult {
  GroupTuple group;
  int chosen = 0;
  std::vector<double> distances;
};

/// One scaling step on Y = g.X (assumed unit norm): picks the worst factor
/// (ties to the smallest index) and left-multiplies its group element by
/// diag(p_up)^{1/2} R^{-1}.
StepResult scaling_step(const GroupTuple& g, const Tensor& X, const TargetSpectrum& p, ScalingMode mode);

/// Matrix diag(p_up)^{1/2} R^{-1} with R the (block) triangular factor of rho.
MatrixXc step_matrix(const MatrixXc& rho, const TargetSpectrum& p, int factor, ScalingMode mode);

ScalingReport run_scaling(const Tensor& X, const TargetSpectrum& p, const ScalingConfig& cfg,
                          const RunHooks& hooks = {});

/// Continues from a chosen starting element g0 with iteration budget T; the
/// part of run_scaling after the random start has been drawn.
ScalingReport run_scaling_from(const Tensor& X, const GroupTuple& g0, const TargetSpectrum& p,
                               const ScalingConfig& cfg, std::uint64_t T, double log2M,
                               const RunHooks& hooks = {});

struct Restriction {
  Tensor tensor;
  TargetSpectrum target;
  std::vector<Index> ranks;
};

/// Keeps the last r_i coordinates of every factor, r_i the support size of p^(i).
Restriction restrict_positive(const Tensor& X, const TargetSpectrum& p);
/// Inverse of the restriction: zero-pads back to the full format.
Tensor embed_positive(const Tensor& Xplus, const TensorFormat& full);

/// Block-diagonal (delta I (+) b_plus^(i)) padding of a scaling of the restriction.
GroupTuple pad_scaling(const GroupTuple& bplus, std::span<const Index> dims, double delta);
/// delta = min(eps^{1/d} / (4 normX), 1e-3).
double pad_delta(double eps, int d, double normX);

}  // namespace tscale
