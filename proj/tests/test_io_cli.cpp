#include "tscale/cli.hpp"
#include "tscale/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tscale;
using io::json;

namespace {

const std::filesystem::path data_dir = TSCALE_EXAMPLES_DIR;

std::string data(const char* name) { return (data_dir / name).string(); }

struct CliRun {
  int code;
  std::string out;
  std::string err;
  json result() const { return json::parse(out); }
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tscale");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string error_of(const json& j) {
  try {
    io::tensor_from_json(j);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("tscale_test_" + name);
}

}  // namespace

TEST_CASE("tensor encodings") {
  const Tensor sparse = io::load_tensor(data("ghz.json"));
  const Tensor dense = io::load_tensor(data("ghz_dense.json"));
  CHECK(sparse.format() == TensorFormat(1, {2, 2, 2}));
  CHECK(sparse.entries() == dense.entries());
  CHECK(sparse({0, 1, 1, 1}) == Complex(1.0));

  const json complex = json::parse(R"({"dims": [1, 2], "dense": [[{"re": 1, "im": -2}, 3]]})");
  const Tensor c = io::tensor_from_json(complex);
  CHECK(c({0, 0}) == Complex(1.0, -2.0));
  CHECK(c({0, 1}) == Complex(3.0));
}

TEST_CASE("tensor validation has positional messages") {
  CHECK(error_of(json::parse(R"({"dims": [1, 2]})")).find("entries") != std::string::npos);
  CHECK(error_of(json::parse(R"({"dims": [1, 2], "dense": [[1, 2]], "entries": []})")) != "");
  CHECK(error_of(json::parse(R"({"dims": [1, 0], "dense": []})")).find("dims[1]") != std::string::npos);
  CHECK(error_of(json::parse(R"({"dims": [1, 2], "dense": [[1]]})")).find("dense[0]") != std::string::npos);
  CHECK(error_of(json::parse(R"({"dims": [1, 2], "dense": [[1, 0.5]]})")).find("dense[0][1]") != std::string::npos);
  const std::string out_of_range =
      error_of(json::parse(R"({"dims": [1, 2], "entries": [{"idx": [0, 0], "re": 1}, {"idx": [0, 2], "re": 1}]})"));
  CHECK(out_of_range.find("entries[1]") != std::string::npos);
  const std::string dup =
      error_of(json::parse(R"({"dims": [1, 2], "entries": [{"idx": [0, 1], "re": 1}, {"idx": [0, 1], "re": 2}]})"));
  CHECK(dup.find("entries[1]") != std::string::npos);
  CHECK(error_of(json::parse(R"({"dims": [1, 2], "dense": [[1, 2]], "extra": 1})")).find("extra") != std::string::npos);
  CHECK(error_of(json::parse(R"({"dims": [1, 2], "dense": [[0, 0]]})")) == "");

  const auto missing = data("does_not_exist.json");
  CHECK_THROWS_WITH(io::load_tensor(missing), doctest::Contains("does_not_exist.json"));
}

TEST_CASE("spectrum encodings") {
  const json j = json::parse(R"({"parts": [["2/6", "4/6"]]})");
  CHECK_THROWS_AS(io::spectrum_from_json(j), std::invalid_argument);
  const TargetSpectrum p = io::spectrum_from_json(json::parse(R"({"parts": [["4/6", "2/6"], ["1/2", "1/2"]]})"));
  CHECK(p.part(1)[1] == Rational(1, 3));
  CHECK(p.ell() == 6);
  const TargetSpectrum q = io::spectrum_from_json(json::parse(R"({"parts": [["2/4", "2/4"]]})"));
  CHECK(q.ell() == 2);
  const TargetSpectrum r = io::spectrum_from_json(json::parse(R"({"parts": [[0.75, 0.25], [1, 0]]})"));
  CHECK(r.part(1)[0] == Rational(3, 4));
  CHECK(r.part(2)[1] == Rational(0));
  try {
    io::spectrum_from_json(json::parse(R"({"parts": [["1/2", "1/2"], ["1/3", "2/3"]]})"));
    FAIL("non-monotone spectrum accepted");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("parts") != std::string::npos);
  }
  CHECK_THROWS_AS(io::spectrum_from_json(json::parse(R"({"parts": [["1/2", "1/3"]]})")), std::invalid_argument);
  CHECK_THROWS_AS(io::spectrum_from_json(json::parse(R"({"parts": [["a", "1/3"]]})")), std::invalid_argument);
  CHECK_THROWS_AS(io::spectrum_from_json(json::parse(R"({"parts": [["1/0", "1"]]})")), std::invalid_argument);
}

TEST_CASE("round trips are byte-identical") {
  for (const char* name : {"ghz.json", "bell.json"}) {
    const json original = io::read_json(data(name));
    const std::string once = io::dump(io::tensor_to_json(io::tensor_from_json(original)));
    const std::string twice = io::dump(io::tensor_to_json(io::tensor_from_json(json::parse(once))));
    CHECK(once == twice);
    CHECK(once == io::dump(original));
  }
  const Tensor dense = io::load_tensor(data("generic222.json"));
  const auto path = temp_path("roundtrip.json");
  io::save_json(path, io::tensor_to_json(dense));
  std::ifstream in(path);
  const std::string saved((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(saved == io::dump(io::tensor_to_json(io::load_tensor(path))));
  CHECK(io::load_tensor(path).entries() == dense.entries());
  std::filesystem::remove(path);

  const json spec = io::read_json(data("skewed222.json"));
  CHECK(io::dump(io::spectrum_to_json(io::spectrum_from_json(spec))) == io::dump(spec));
  const json hwv = io::read_json(data("det_hwv.json"));
  CHECK(io::dump(io::hwv_spec_to_json(io::hwv_spec_from_json(hwv))) == io::dump(hwv));
}

TEST_CASE("number formatting") {
  CHECK(io::round12(1.0 / 3.0) == 0.333333333333);
  CHECK(io::round12(123456789.123456789) == 123456789.123);
  CHECK(io::round12(0.0) == 0.0);
  const json z = io::complex_to_json(Complex(1.0 / 3.0, 2.0));
  CHECK(z.at("re").get<double>() == 0.333333333333);
  CHECK(z.at("im").get<double>() == 2.0);
}

TEST_CASE("cli: scale") {
  const CliRun r = cli({"scale", "--tensor", data("ghz.json"), "--target", data("uniform222.json"), "--epsilon",
                        "1e-3", "--seed", "7"});
  CHECK(r.code == 0);
  const json j = r.result();
  CHECK(j.at("verdict") == "SCALED");
  CHECK(j.at("iterations").get<int>() < 50);
  CHECK(j.at("finalEps").get<double>() <= 1e-3);
  CHECK(j.at("group").size() == 3);
  CHECK(j.at("trace").front().contains("eps"));
  CHECK(j.at("trace").front().contains("norm"));

  const CliRun shorthand =
      cli({"scale", "--tensor", data("ghz.json"), "--target", "uniform", "--epsilon", "1e-3", "--seed", "7"});
  CHECK(shorthand.code == 0);
  CHECK(shorthand.out == r.out);

  const CliRun again = cli({"scale", "--tensor", data("ghz.json"), "--target", data("uniform222.json"), "--epsilon",
                            "1e-3", "--seed", "7"});
  CHECK(again.out == r.out);

  const auto path = temp_path("report.json");
  const CliRun to_file = cli({"scale", "--tensor", data("ghz.json"), "--target", data("uniform222.json"),
                              "--epsilon", "1e-3", "--seed", "7", "--out", path.string()});
  CHECK(to_file.code == 0);
  CHECK(to_file.out.empty());
  std::ifstream in(path);
  const std::string saved((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(saved == r.out);
  std::filesystem::remove(path);
}

TEST_CASE("cli: verdict exit codes") {
  const CliRun out = cli({"scale", "--tensor", data("generic222.json"), "--target", data("bad.json"), "--seed", "1"});
  CHECK(out.code == 1);
  CHECK(out.result().at("verdict") == "NOT_IN_POLYTOPE");

  const CliRun far = cli({"qmp", "--dims", "2,2,2", "--target", data("bad.json"), "--epsilon", "0.05"});
  CHECK(far.code == 1);
  CHECK(far.result().at("answer") == "EPS_FAR");
  CHECK(far.result().at("witness").is_null());

  const CliRun in = cli({"membership", "--tensor", data("generic222.json"), "--target", data("skewed222.json"),
                         "--epsilon", "1e-2", "--gap-constant-c", "1"});
  CHECK(in.code == 0);
  const json v = in.result();
  CHECK(v.at("answer") == "IN");
  CHECK(v.at("gapConstant").get<double>() > 0.0);
  CHECK(v.at("runs").get<int>() >= 1);

  const CliRun seq = cli({"membership", "--tensor", data("generic222.json"), "--target", data("skewed222.json"),
                          "--epsilon", "1e-2", "--gap-constant-c", "1", "--sequential"});
  CHECK(seq.out == in.out);
}

TEST_CASE("cli: usage errors") {
  CHECK(cli({"scale", "--tensor", data("ghz.json"), "--target", "uniform", "--epsilon", "-1"}).code == 2);
  CHECK(cli({"scale", "--tensor", data("ghz.json"), "--target", "uniform", "--bogus"}).code == 2);
  CHECK(cli({"scale", "--tensor", data("ghz.json")}).code == 2);
  CHECK(cli({"scale", "--tensor", data("missing.json"), "--target", "uniform"}).code == 2);
  CHECK(cli({"scale", "--tensor", data("ghz.json"), "--target", data("skewed222.json"), "--mode", "diagonal"}).code == 2);
  CHECK(cli({"scale", "--tensor", data("ghz.json"), "--target", "uniform", "--rand-range", "zero"}).code == 2);
  CHECK(cli({"scale", "--tensor", data("bell.json"), "--target", data("uniform222.json")}).code == 2);
  CHECK(cli({"membership", "--tensor", data("ghz.json"), "--target", "uniform", "--repeats", "0"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({}).code == 2);
  const CliRun bad_tensor = cli({"scale", "--tensor", data("uniform222.json"), "--target", "uniform"});
  CHECK(bad_tensor.code == 2);
  CHECK(bad_tensor.err.find("uniform222.json") != std::string::npos);

  const CliRun help = cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("scale") != std::string::npos);
  CHECK(cli({"scale", "--help"}).code == 0);
}

TEST_CASE("cli: other commands") {
  SUBCASE("general-scale") {
    const CliRun dims = cli({"general-scale", "--dims", "2,2,2", "--target", data("uniform222.json"), "--epsilon", "1e-2"});
    CHECK(dims.code == 0);
    CHECK(dims.result().at("report").at("verdict") == "SCALED");
    CHECK(dims.result().contains("sample"));
    const CliRun mps = cli({"general-scale", "--mps", data("mps.json"), "--target", data("uniform222.json"), "--epsilon", "1e-2"});
    CHECK(mps.code == 0);
    const CliRun orbit = cli({"general-scale", "--tensor", data("ghz.json"), "--target", "uniform", "--epsilon", "1e-2"});
    CHECK(orbit.code == 0);
    CHECK(cli({"general-scale", "--dims", "2,2,2", "--tensor", data("ghz.json"), "--target", "uniform"}).code == 2);
  }
  SUBCASE("kronecker") {
    const CliRun k = cli({"kronecker", "--lambda", "2", "--mu", "1,1", "--nu", "1,1", "--epsilon", "1e-2"});
    CHECK(k.code == 0);
    CHECK(k.result().at("answer") == "IN");
    CHECK(cli({"kronecker", "--lambda", "2", "--mu", "1", "--nu", "1,1"}).code == 2);
  }
  SUBCASE("reduce") {
    const CliRun r = cli({"reduce", "--tensor", data("bell.json"), "--target", R"(2/3)"});
    CHECK(r.code == 2);
    const auto target = temp_path("target21.json");
    io::save_json(target, json::parse(R"({"parts": [["2/3", "1/3"], ["2/3", "1/3"]]})"));
    const CliRun ok = cli({"reduce", "--tensor", data("bell.json"), "--target", target.string()});
    CHECK(ok.code == 0);
    const Tensor L = io::tensor_from_json(ok.result());
    CHECK(L.format() == TensorFormat(4, {3, 3}));
    std::filesystem::remove(target);
  }
  SUBCASE("verify-hwv") {
    const CliRun v = cli({"verify-hwv", "--tensor", data("bell.json"), "--hwv", data("det_hwv.json"), "--samples", "50"});
    CHECK(v.code == 0);
    const json j = v.result();
    CHECK(j.at("withinBound") == true);
    CHECK(j.at("transformFailures") == 0);
    CHECK(std::abs(j.at("value").at("re").get<double>()) == doctest::Approx(2.0));
    const CliRun search = cli({"verify-hwv", "--tensor", data("ghz.json"), "--target", "uniform", "--samples", "20"});
    CHECK(search.code == 0);
    CHECK(search.result().at("spec").at("weight").front() == json::parse("[2, 2]"));
  }
  SUBCASE("sinkhorn") {
    const CliRun s = cli({"sinkhorn", "--matrix", data("sinkhorn.json"), "--epsilon", "1e-3", "--max-iters", "100000"});
    CHECK(s.code == 0);
    CHECK(s.result().at("converged") == true);
    const auto zero = temp_path("zero.json");
    io::save_json(zero, json::parse(R"({"matrix": [[1, 0], [1, 0]]})"));
    const CliRun z = cli({"sinkhorn", "--matrix", zero.string()});
    CHECK(z.code == 1);
    CHECK(z.result().at("nonScalable") == true);
    std::filesystem::remove(zero);
  }
}
