#include "tscale/cli.hpp"

#include "tscale/errors.hpp"
#include "tscale/hwv.hpp"
#include "tscale/io.hpp"
#include "tscale/oracle.hpp"
#include "tscale/parametrization.hpp"
#include "tscale/reduction.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <random>
#include <sstream>

namespace tscale {

namespace {

using io::json;

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kNumeric = 3;

struct Options {
  std::string tensor;
  std::string target;
  double epsilon = 1e-3;
  std::uint64_t seed = 0;
  std::string randRange = "65536";
  std::string mode = "borel";
  std::string start = "random";
  int repeats = 6;
  std::optional<std::uint64_t> maxIters;
  std::string out;
  std::string mps;
  std::optional<double> gapC;
  std::vector<Index> dims;
  std::vector<int> lambda, mu, nu;
  Index n = 0;
  std::string hwv;
  std::string matrix;
  int samples = 200;
  bool sequential = false;
};

RandRange parse_rand_range(const std::string& s) {
  if (s == "theoretical") return RandRange::exact();
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 1)
    throw std::invalid_argument("--rand-range: expected a positive integer or \"theoretical\", got \"" + s + "\"");
  return RandRange::practical(v);
}

ScalingConfig scaling_config(const Options& o) {
  ScalingConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.seed = o.seed;
  cfg.randRange = parse_rand_range(o.randRange);
  cfg.maxItersOverride = o.maxIters;
  cfg.mode = o.mode == "parabolic" ? ScalingMode::Parabolic : ScalingMode::Borel;
  cfg.start = o.start == "identity" ? StartMode::Identity : StartMode::Randomized;
  cfg.validate();
  return cfg;
}

OracleConfig oracle_config(const Options& o) {
  OracleConfig cfg;
  cfg.scaling = scaling_config(o);
  cfg.repeats = o.repeats;
  cfg.parallel = !o.sequential;
  return cfg;
}

TargetSpectrum target_for(const std::string& arg, std::span<const Index> dims) {
  if (arg == "uniform") return TargetSpectrum::uniform(dims);
  TargetSpectrum p = io::load_spectrum(arg);
  if (p.dims() != std::vector<Index>(dims.begin(), dims.end()))
    throw std::invalid_argument("target dimensions do not match the tensor format");
  return p;
}

void emit(const Options& o, const json& j, std::ostream& out) {
  if (o.out.empty())
    out << io::dump(j);
  else
    io::save_json(o.out, j);
}

int verdict_code(Verdict v) { return v == Verdict::Scaled ? kOk : kNegative; }
int answer_code(Answer a) { return a == Answer::In ? kOk : kNegative; }

json with_gap(json j, const Options& o, std::span<const Index> dims, std::int64_t ell) {
  if (o.gapC) j["gapConstant"] = io::round12(gap_constant(dims, ell, *o.gapC));
  return j;
}

int cmd_scale(const Options& o, std::ostream& out) {
  const Tensor X = io::load_tensor(o.tensor);
  const TargetSpectrum p = target_for(o.target, X.format().dims());
  const ScalingReport r = run_scaling(X, p, scaling_config(o));
  emit(o, io::report_to_json(r), out);
  return verdict_code(r.verdict);
}

Parametrization parametrization_for(const Options& o) {
  const int given = !o.tensor.empty() + !o.mps.empty() + !o.dims.empty();
  if (given != 1) throw std::invalid_argument("general-scale needs exactly one of --tensor, --mps and --dims");
  if (!o.tensor.empty()) return Parametrization::orbit(io::load_tensor(o.tensor));
  if (!o.dims.empty()) return Parametrization::identity(TensorFormat(1, o.dims));
  const json j = io::read_json(o.mps);
  for (const char* key : {"sites", "bond", "length"})
    if (!j.contains(key) || !j.at(key).is_number_integer())
      throw std::invalid_argument(o.mps + ": missing integer \"" + key + "\"");
  return Parametrization::mps(j.at("sites").get<Index>(), j.at("bond").get<Index>(), j.at("length").get<int>());
}

int cmd_general_scale(const Options& o, std::ostream& out) {
  const Parametrization phi = parametrization_for(o);
  const TargetSpectrum p = target_for(o.target, phi.format.dims());
  const GeneralScalingResult g = run_general_scaling(phi, p, scaling_config(o));
  json z = json::array();
  for (const Complex& c : g.z) z.push_back(io::complex_to_json(c));
  emit(o,
       {{"parametrization", phi.description},
        {"report", io::report_to_json(g.report)},
        {"sample", io::tensor_to_json(g.sample)},
        {"z", std::move(z)}},
       out);
  return verdict_code(g.report.verdict);
}

int cmd_membership(const Options& o, std::ostream& out) {
  const Tensor X = io::load_tensor(o.tensor);
  const TargetSpectrum p = target_for(o.target, X.format().dims());
  const MembershipVerdict v = membership(X, p, oracle_config(o));
  emit(o, with_gap(io::verdict_to_json(v), o, X.format().dims(), p.ell()), out);
  return answer_code(v.answer);
}

int cmd_qmp(const Options& o, std::ostream& out) {
  if (o.dims.empty()) throw std::invalid_argument("qmp needs --dims");
  const TargetSpectrum p = target_for(o.target, o.dims);
  const MembershipVerdict v = qmp(p, o.dims, oracle_config(o));
  emit(o, with_gap(io::verdict_to_json(v), o, o.dims, p.ell()), out);
  return answer_code(v.answer);
}

int cmd_kronecker(const Options& o, std::ostream& out) {
  const KroneckerQuery q{Partition(o.lambda), Partition(o.mu), Partition(o.nu), o.n};
  const TargetSpectrum p = q.normalized();
  const MembershipVerdict v = kronecker_support(q, oracle_config(o));
  const Index n = q.effective_n();
  const std::vector<Index> dims{n, n, n};
  json j = with_gap(io::verdict_to_json(v), o, dims, p.ell());
  j["point"] = io::spectrum_to_json(p);
  emit(o, j, out);
  return answer_code(v.answer);
}

int cmd_reduce(const Options& o, std::ostream& out) {
  const Tensor Y = io::load_tensor(o.tensor);
  const TargetSpectrum p = target_for(o.target, Y.format().dims());
  std::vector<Partition> lambdas;
  for (int i = 1; i <= p.d(); ++i) {
    std::vector<int> parts;
    for (const Rational& r : p.part(i)) parts.push_back(static_cast<int>((r * Rational(p.ell())).num()));
    lambdas.emplace_back(std::move(parts));
  }
  emit(o, io::tensor_to_json(reduce_tensor(Y, lambdas)), out);
  return kOk;
}

GroupTuple random_triangular(std::span<const Index> dims, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> entry(-1.0, 1.0), modulus(0.5, 2.0), phase(0.0, 6.283185307179586);
  GroupTuple R;
  for (Index n : dims) {
    MatrixXc m = MatrixXc::Zero(n, n);
    for (Index r = 0; r < n; ++r) {
      m(r, r) = std::polar(modulus(rng), phase(rng));
      for (Index c = r + 1; c < n; ++c) m(r, c) = Complex(entry(rng), entry(rng));
    }
    R.factors.push_back(std::move(m));
  }
  return R;
}

int cmd_verify_hwv(const Options& o, std::ostream& out) {
  const Tensor X = io::load_tensor(o.tensor);
  HWVSpec spec;
  if (!o.hwv.empty()) {
    spec = io::hwv_spec_from_json(io::read_json(o.hwv));
  } else if (!o.target.empty()) {
    const TargetSpectrum p = target_for(o.target, X.format().dims());
    auto found = find_nonvanishing_spec(X, p);
    if (!found) {
      emit(o, {{"found", false}}, out);
      return kNegative;
    }
    spec = *found;
  } else {
    throw std::invalid_argument("verify-hwv needs --hwv or --target");
  }
  if (o.samples < 0) throw std::invalid_argument("--samples must be nonnegative");

  const Complex value = eval_hwv(spec, X);
  const double bound = hwv_bound(X.format(), spec.degree) * std::pow(X.norm(), spec.degree);
  const bool within = std::abs(value) <= bound * (1.0 + 1e-12);
  std::mt19937_64 rng(o.seed);
  double worst = 0.0;
  int failures = 0;
  for (int s = 0; s < o.samples; ++s) {
    const TransformCheck c = hwv_transform_check(spec, X, random_triangular(X.format().dims(), rng));
    worst = std::max(worst, c.error);
    failures += !c.ok;
  }
  emit(o,
       {{"spec", io::hwv_spec_to_json(spec)},
        {"value", io::complex_to_json(value)},
        {"bound", io::round12(bound)},
        {"withinBound", within},
        {"transformSamples", o.samples},
        {"transformFailures", failures},
        {"transformMaxError", io::round12(worst)}},
       out);
  return within && failures == 0 ? kOk : kNegative;
}

Eigen::VectorXd vector_from(const json& j, const std::string& where) {
  if (!j.is_array()) throw std::invalid_argument(where + ": expected an array of numbers");
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw std::invalid_argument(where + "[" + std::to_string(k) + "]: expected a number");
    v(static_cast<Index>(k)) = j[k].get<double>();
  }
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (double x : v) a.push_back(io::round12(x));
  return a;
}

int cmd_sinkhorn(const Options& o, std::ostream& out) {
  const json j = io::read_json(o.matrix);
  if (!j.contains("matrix") || !j.at("matrix").is_array() || j.at("matrix").empty())
    throw std::invalid_argument(o.matrix + ": missing nonempty \"matrix\"");
  const json& rows = j.at("matrix");
  const auto cols = vector_from(rows[0], "matrix[0]").size();
  Eigen::MatrixXd A(static_cast<Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto row = vector_from(rows[r], "matrix[" + std::to_string(r) + "]");
    if (row.size() != cols) throw std::invalid_argument("matrix[" + std::to_string(r) + "]: ragged row");
    A.row(static_cast<Index>(r)) = row.transpose();
  }
  const Eigen::VectorXd rt = j.contains("rows") ? vector_from(j.at("rows"), "rows") : Eigen::VectorXd::Ones(A.rows());
  const Eigen::VectorXd ct = j.contains("cols") ? vector_from(j.at("cols"), "cols") : Eigen::VectorXd::Ones(A.cols());
  if (!(o.epsilon > 0.0)) throw std::invalid_argument("--epsilon must be positive");
  const SinkhornResult s = sinkhorn(A, rt, ct, o.epsilon, o.maxIters.value_or(1'000'000));
  json scaled = json::array();
  for (Index r = 0; r < s.scaled.rows(); ++r) scaled.push_back(vector_to_json(s.scaled.row(r).transpose()));
  json res = {{"converged", s.converged},
              {"nonScalable", s.nonScalable},
              {"iterations", s.iterations},
              {"error", io::round12(s.error)},
              {"scaled", std::move(scaled)},
              {"rowScale", vector_to_json(s.rowScale)},
              {"colScale", vector_to_json(s.colScale)}};
  if (!s.reason.empty()) res["reason"] = s.reason;
  emit(o, res, out);
  return s.converged ? kOk : kNegative;
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scaling of tensors to prescribed marginal spectra", "tscale"};
  app.require_subcommand(1);
  Options o;

  const auto add_tensor = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--tensor", o.tensor, "tensor JSON file");
    if (required) opt->required();
  };
  const auto add_target = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--target", o.target, "spectrum JSON file or 'uniform'");
    if (required) opt->required();
  };
  const auto add_scaling = [&](CLI::App* c) {
    c->add_option("--epsilon", o.epsilon, "marginal accuracy in trace distance");
    c->add_option("--seed", o.seed, "seed of the random start");
    c->add_option("--rand-range", o.randRange, "random start range: integer or 'theoretical'");
    c->add_option("--mode", o.mode, "borel or parabolic")->check(CLI::IsMember({"borel", "parabolic"}));
    c->add_option("--start", o.start, "random or identity")->check(CLI::IsMember({"random", "identity"}));
    c->add_option("--max-iters", o.maxIters, "override the iteration budget");
    c->add_option("--out", o.out, "write the JSON result here instead of standard output");
  };
  const auto add_oracle = [&](CLI::App* c) {
    add_scaling(c);
    c->add_option("--repeats", o.repeats, "independent seeded runs")->check(CLI::PositiveNumber);
    c->add_option("--gap-constant-c", o.gapC, "report the heuristic gap constant for this C")
        ->check(CLI::PositiveNumber);
    c->add_flag("--sequential", o.sequential, "run repetitions one after another");
  };

  auto* scale = app.add_subcommand("scale", "scale a tensor toward target marginal spectra");
  add_tensor(scale, true);
  add_target(scale, true);
  add_scaling(scale);

  auto* general = app.add_subcommand("general-scale", "scale a random point of a parametrized family");
  add_tensor(general, false);
  add_target(general, true);
  add_scaling(general);
  general->add_option("--mps", o.mps, "matrix product state family: JSON {sites, bond, length}");
  general->add_option("--dims", o.dims, "all tensors of format (1; dims)")->delimiter(',');

  auto* member = app.add_subcommand("membership", "promise membership of the target in the moment polytope");
  add_tensor(member, true);
  add_target(member, true);
  add_oracle(member);

  auto* q = app.add_subcommand("qmp", "one-body quantum marginal problem");
  add_target(q, true);
  add_oracle(q);
  q->add_option("--dims", o.dims, "local dimensions n1,...,nd")->delimiter(',')->required();

  auto* kron = app.add_subcommand("kronecker", "asymptotic support of Kronecker coefficients");
  add_oracle(kron);
  kron->add_option("--lambda", o.lambda, "first partition")->delimiter(',')->required();
  kron->add_option("--mu", o.mu, "second partition")->delimiter(',')->required();
  kron->add_option("--nu", o.nu, "third partition")->delimiter(',')->required();
  kron->add_option("--n", o.n, "local dimension (default: longest partition)")->check(CLI::NonNegativeNumber);

  auto* reduce = app.add_subcommand("reduce", "expanded tensor of the reduction to uniform targets");
  add_tensor(reduce, true);
  add_target(reduce, true);
  reduce->add_option("--out", o.out, "write the JSON result here instead of standard output");

  auto* verify = app.add_subcommand("verify-hwv", "evaluate a highest weight vector and check its laws");
  add_tensor(verify, true);
  add_target(verify, false);
  verify->add_option("--hwv", o.hwv, "HWV spec JSON file");
  verify->add_option("--seed", o.seed, "seed of the random triangular elements");
  verify->add_option("--samples", o.samples, "random triangular elements to test");
  verify->add_option("--out", o.out, "write the JSON result here instead of standard output");

  auto* sink = app.add_subcommand("sinkhorn", "classical matrix scaling");
  sink->add_option("--matrix", o.matrix, "JSON {matrix, rows, cols}")->required();
  sink->add_option("--epsilon", o.epsilon, "l1 accuracy of row and column sums");
  sink->add_option("--max-iters", o.maxIters, "maximum number of half steps");
  sink->add_option("--out", o.out, "write the JSON result here instead of standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (scale->parsed()) return cmd_scale(o, out);
    if (general->parsed()) return cmd_general_scale(o, out);
    if (member->parsed()) return cmd_membership(o, out);
    if (q->parsed()) return cmd_qmp(o, out);
    if (kron->parsed()) return cmd_kronecker(o, out);
    if (reduce->parsed()) return cmd_reduce(o, out);
    if (verify->parsed()) return cmd_verify_hwv(o, out);
    if (sink->parsed()) return cmd_sinkhorn(o, out);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const SingularMatrixError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const BudgetExceededError& e) {
    err << "refused: " << e.what() << '\n';
    return kUsage;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace tscale
