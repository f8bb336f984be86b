#include "tscale/parametrization.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace tscale {

Tensor Parametrization::operator()(std::span<const Complex> z) const {
  if (static_cast<Index>(z.size()) != paramDim)
    throw std::invalid_argument("parameter vector has length " + std::to_string(z.size()) + ", expected " +
                                std::to_string(paramDim));
  return evaluate(z);
}

Parametrization Parametrization::identity(const TensorFormat& format) {
  Parametrization phi;
  phi.paramDim = format.size();
  phi.degree = 1;
  phi.format = format;
  phi.description = "identity on Ten" + format.str();
  phi.evaluate = [format](std::span<const Complex> z) {
    VectorXc v = Eigen::Map<const VectorXc>(z.data(), static_cast<Index>(z.size()));
    return Tensor(format, std::move(v));
  };
  return phi;
}

Parametrization Parametrization::orbit(const Tensor& X) {
  if (!has_integer_entries(X)) throw std::invalid_argument("orbit parametrization needs a tensor with integer entries");
  Parametrization phi;
  const TensorFormat f = X.format();
  phi.format = f;
  phi.degree = f.d();
  for (Index n : f.dims()) phi.paramDim += n * n;
  phi.description = "orbit map of a fixed tensor in Ten" + f.str();
  int bits = 1;
  for (Index k = 0; k < X.entries().size(); ++k) {
    const double a = std::max(std::abs(X.entries()[k].real()), std::abs(X.entries()[k].imag()));
    if (a >= 1.0) bits = std::max(bits, static_cast<int>(std::floor(std::log2(a))) + 1);
  }
  phi.coefficientBits = bits;
  phi.evaluate = [X](std::span<const Complex> z) {
    GroupTuple g;
    std::size_t pos = 0;
    for (Index n : X.format().dims()) {
      MatrixXc m(n, n);
      for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c) m(r, c) = z[pos++];
      g.factors.push_back(std::move(m));
    }
    return apply_group(g, X);
  };
  return phi;
}

Parametrization Parametrization::mps(Index n, Index bond, int d) {
  if (n < 1 || bond < 1 || d < 2) throw std::invalid_argument("mps parametrization needs n >= 1, bond >= 1, d >= 2");
  Parametrization phi;
  phi.format = TensorFormat(1, std::vector<Index>(static_cast<std::size_t>(d), n));
  phi.degree = d;
  phi.paramDim = n * bond * bond;
  phi.description = "matrix product states, bond dimension " + std::to_string(bond) + ", length " + std::to_string(d);
  phi.evaluate = [n, bond, d](std::span<const Complex> z) {
    std::vector<MatrixXc> mats;
    for (Index j = 0; j < n; ++j) {
      MatrixXc m(bond, bond);
      for (Index r = 0; r < bond; ++r)
        for (Index c = 0; c < bond; ++c) m(r, c) = z[static_cast<std::size_t>((j * bond + r) * bond + c)];
      mats.push_back(std::move(m));
    }
    return mps_tensor(mats, d);
  };
  return phi;
}

Tensor mps_tensor(std::span<const MatrixXc> matrices, int d) {
  if (matrices.empty() || d < 2) throw std::invalid_argument("mps_tensor needs at least one matrix and d >= 2");
  const Index n = static_cast<Index>(matrices.size());
  const Index bond = matrices.front().rows();
  for (const auto& m : matrices)
    if (m.rows() != bond || m.cols() != bond) throw std::invalid_argument("mps_tensor: matrices must share a square shape");
  Tensor X(TensorFormat(1, std::vector<Index>(static_cast<std::size_t>(d), n)));
  for (Index off = 0; off < X.format().size(); ++off) {
    const auto idx = X.unravel(off);
    MatrixXc acc = matrices[static_cast<std::size_t>(idx[1])];
    for (int k = 2; k <= d; ++k) acc = acc * matrices[static_cast<std::size_t>(idx[k])];
    X.entries()[off] = acc.trace();
  }
  return X;
}

namespace {

std::vector<Complex> sample_parameters(Index count, const RandRange& range, const BigInt& M, std::uint64_t seed) {
  std::vector<Complex> z(static_cast<std::size_t>(count));
  if (range.theoretical) {
    const std::vector<double> draws = sample_big_uniform(z.size(), M, seed);
    std::copy(draws.begin(), draws.end(), z.begin());
    return z;
  }
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::uint64_t> dist(1, range.value);
  for (auto& v : z) v = static_cast<double>(dist(gen));
  return z;
}

}  // namespace

GeneralScalingResult run_general_scaling(const Parametrization& phi, const TargetSpectrum& p,
                                         const ScalingConfig& cfg, const RunHooks& hooks) {
  cfg.validate();
  if (p.dims() != phi.format.dims()) throw std::invalid_argument("target dimensions do not match the parametrization");
  const RandomizationBounds bounds = randomization_bounds(p.ell(), phi.format.dims(), phi.degree);
  const double log2M = cfg.randRange.theoretical ? bounds.log2M : std::log2(static_cast<double>(cfg.randRange.value));

  GeneralScalingResult out;
  std::vector<std::string> warnings;
  out.z = sample_parameters(phi.paramDim, cfg.randRange, bounds.M, cfg.seed);
  out.sample = phi(out.z);
  if (out.sample.is_zero()) {
    warnings.push_back("Phi(Z) vanished for the first sample; resampled once");
    out.z = sample_parameters(phi.paramDim, cfg.randRange, bounds.M, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    out.sample = phi(out.z);
  }
  if (out.sample.is_zero()) {
    warnings.push_back("Phi(Z) vanished for two samples");
    out.report.verdict = Verdict::NotInPolytope;
    out.report.reason = "parametrization evaluated to zero twice";
    out.report.group = GroupTuple::identity(phi.format.dims());
    out.report.log2M = log2M;
    out.report.warnings = std::move(warnings);
    return out;
  }

  const int bits = std::max(phi.coefficientBits, p.bitsize());
  const std::uint64_t T = general_iteration_budget(phi.format.all_dims(), bits, cfg.epsilon, phi.degree,
                                                   phi.paramDim, log2M);
  out.report = run_scaling_from(out.sample, GroupTuple::identity(phi.format.dims()), p, cfg, T, log2M, hooks);
  out.report.warnings.insert(out.report.warnings.begin(), warnings.begin(), warnings.end());
  return out;
}

}  // namespace tscale
