// Homogeneous polynomial parametrizations of tensor families and the scaling
// run that starts from a random point of their image.
#pragma once

#include "tscale/scaling.hpp"

#include <functional>
#include <string>

namespace tscale {

struct Parametrization {
  Index paramDim = 0;
  int degree = 1;
  TensorFormat format;
  std::function<Tensor(std::span<const Complex>)> evaluate;
  std::string description;
  /// Bit size of the integer coefficients of the defining polynomials.
  int coefficientBits = 1;

  Tensor operator()(std::span<const Complex> z) const;

  /// Z |-> Z reshaped into a tensor of the given format.
  static Parametrization identity(const TensorFormat& format);
  /// (A^(1), ..., A^(d)) |-> (A^(1) (x) ... (x) A^(d)) X; requires integer X.
  static Parametrization orbit(const Tensor& X);
  /// Site matrices (M_1, ..., M_n), each bond x bond, |-> matrix product state of length d.
  static Parametrization mps(Index n, Index bond, int d);
};

/// X_{j1..jd} = tr[M_{j1} ... M_{jd}] in Ten(1; n, ..., n), n = matrices.size().
Tensor mps_tensor(std::span<const MatrixXc> matrices, int d);

struct GeneralScalingResult {
  ScalingReport report;
  Tensor sample;           ///< X = Phi(Z)
  std::vector<Complex> z;  ///< the parameter point Z
};

/// Samples Z uniformly from {1..M}^paramDim, sets X = Phi(Z) and scales X
/// from the identity with the budget for parametrized families.
GeneralScalingResult run_general_scaling(const Parametrization& phi, const TargetSpectrum& p,
                                         const ScalingConfig& cfg, const RunHooks& hooks = {});

}  // namespace tscale
