#include "tscale/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tscale::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

std::int64_t integer_at(const json& j, const std::string& where) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && v == std::round(v) && std::abs(v) < 9e15) return static_cast<std::int64_t>(v);
    fail(where, "expected an integer, got " + j.dump());
  }
  fail(where, "expected an integer, got " + j.dump());
}

std::vector<Index> dims_from(const json& j) {
  if (!j.contains("dims")) fail("tensor", "missing \"dims\"");
  const json& d = j.at("dims");
  if (!d.is_array() || d.size() < 2) fail("dims", "expected an array [n0, n1, ..., nd] with d >= 1");
  std::vector<Index> out;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const auto v = integer_at(d[k], "dims[" + std::to_string(k) + "]");
    if (v < 1) fail("dims[" + std::to_string(k) + "]", "dimension must be positive");
    out.push_back(v);
  }
  return out;
}

Complex gaussian_at(const json& j, const std::string& where) {
  if (j.is_number()) return Complex(static_cast<double>(integer_at(j, where)), 0.0);
  if (!j.is_object()) fail(where, "expected an integer or {\"re\", \"im\"}");
  for (const auto& [key, _] : j.items())
    if (key != "re" && key != "im") fail(where, "unexpected key \"" + key + "\"");
  const double re = j.contains("re") ? static_cast<double>(integer_at(j.at("re"), where + ".re")) : 0.0;
  const double im = j.contains("im") ? static_cast<double>(integer_at(j.at("im"), where + ".im")) : 0.0;
  return {re, im};
}

void fill_dense(const json& node, Tensor& X, std::vector<Index>& idx, int depth, const std::string& where) {
  const TensorFormat& f = X.format();
  if (depth > f.d()) {
    X(idx) = gaussian_at(node, where);
    return;
  }
  if (!node.is_array() || static_cast<Index>(node.size()) != f.dim(depth))
    fail(where, "expected an array of length " + std::to_string(f.dim(depth)));
  for (Index k = 0; k < f.dim(depth); ++k) {
    idx[static_cast<std::size_t>(depth)] = k;
    fill_dense(node[static_cast<std::size_t>(k)], X, idx, depth + 1, where + "[" + std::to_string(k) + "]");
  }
}

json number_json(double x) {
  if (x == std::round(x) && std::abs(x) < 9e15) return static_cast<std::int64_t>(x);
  return round12(x);
}

}  // namespace

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

Tensor tensor_from_json(const json& j) {
  if (!j.is_object()) fail("tensor", "expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "dims" && key != "entries" && key != "dense") fail("tensor", "unexpected key \"" + key + "\"");
  const auto all = dims_from(j);
  Tensor X(TensorFormat::from_all(all));
  const bool sparse = j.contains("entries"), dense = j.contains("dense");
  if (sparse == dense) fail("tensor", "exactly one of \"entries\" and \"dense\" is required");

  if (dense) {
    std::vector<Index> idx(all.size(), 0);
    fill_dense(j.at("dense"), X, idx, 0, "dense");
    return X;
  }
  const json& entries = j.at("entries");
  if (!entries.is_array()) fail("entries", "expected an array");
  std::set<Index> seen;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const std::string where = "entries[" + std::to_string(e) + "]";
    const json& item = entries[e];
    if (!item.is_object() || !item.contains("idx")) fail(where, "expected an object with \"idx\"");
    for (const auto& [key, _] : item.items())
      if (key != "idx" && key != "re" && key != "im") fail(where, "unexpected key \"" + key + "\"");
    const json& jidx = item.at("idx");
    if (!jidx.is_array() || jidx.size() != all.size())
      fail(where + ".idx", "expected " + std::to_string(all.size()) + " indices");
    std::vector<Index> idx;
    for (std::size_t k = 0; k < jidx.size(); ++k) {
      const auto v = integer_at(jidx[k], where + ".idx[" + std::to_string(k) + "]");
      if (v < 0 || v >= all[k])
        fail(where + ".idx[" + std::to_string(k) + "]",
             "index " + std::to_string(v) + " outside [0, " + std::to_string(all[k]) + ")");
      idx.push_back(v);
    }
    if (!seen.insert(X.offset(idx)).second) fail(where, "duplicate index");
    json value = json::object();
    if (item.contains("re")) value["re"] = item.at("re");
    if (item.contains("im")) value["im"] = item.at("im");
    X(idx) = gaussian_at(value, where);
  }
  return X;
}

json tensor_to_json(const Tensor& X) {
  json entries = json::array();
  for (Index off = 0; off < X.format().size(); ++off) {
    const Complex z = X.entries()[off];
    if (z == Complex(0.0)) continue;
    entries.push_back({{"idx", X.unravel(off)}, {"re", number_json(z.real())}, {"im", number_json(z.imag())}});
  }
  return {{"dims", X.format().all_dims()}, {"entries", std::move(entries)}};
}

TargetSpectrum spectrum_from_json(const json& j) {
  if (!j.is_object() || !j.contains("parts")) fail("spectrum", "expected an object with \"parts\"");
  for (const auto& [key, _] : j.items())
    if (key != "parts") fail("spectrum", "unexpected key \"" + key + "\"");
  const json& parts = j.at("parts");
  if (!parts.is_array() || parts.empty()) fail("parts", "expected a nonempty array of arrays");
  std::vector<std::vector<Rational>> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string where = "parts[" + std::to_string(i) + "]";
    if (!parts[i].is_array() || parts[i].empty()) fail(where, "expected a nonempty array");
    std::vector<Rational> v;
    for (std::size_t k = 0; k < parts[i].size(); ++k) {
      const json& e = parts[i][k];
      const std::string at = where + "[" + std::to_string(k) + "]";
      try {
        if (e.is_string())
          v.push_back(Rational::parse(e.get<std::string>()));
        else if (e.is_number_integer())
          v.emplace_back(e.get<std::int64_t>());
        else if (e.is_number_float())
          v.push_back(rationalize(e.get<double>()));
        else
          fail(at, "expected a fraction string or a number");
      } catch (const std::domain_error& err) {
        fail(at, err.what());
      } catch (const std::overflow_error& err) {
        fail(at, err.what());
      }
    }
    out.push_back(std::move(v));
  }
  try {
    return TargetSpectrum(std::move(out));
  } catch (const std::invalid_argument& err) {
    fail("parts", err.what());
  }
}

json spectrum_to_json(const TargetSpectrum& p) {
  json parts = json::array();
  for (const auto& part : p.parts()) {
    json v = json::array();
    for (const auto& r : part) v.push_back(r.str());
    parts.push_back(std::move(v));
  }
  return {{"parts", std::move(parts)}};
}

HWVSpec hwv_spec_from_json(const json& j) {
  if (!j.is_object()) fail("hwv", "expected a JSON object");
  for (const char* key : {"weight", "indexSeq", "perms"})
    if (!j.contains(key) || !j.at(key).is_array()) fail("hwv", std::string("missing array \"") + key + "\"");
  HWVSpec spec;
  const json& w = j.at("weight");
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::string where = "weight[" + std::to_string(i) + "]";
    if (!w[i].is_array()) fail(where, "expected an array");
    std::vector<int> parts;
    for (std::size_t k = 0; k < w[i].size(); ++k)
      parts.push_back(static_cast<int>(integer_at(w[i][k], where + "[" + std::to_string(k) + "]")));
    try {
      spec.weight.emplace_back(std::move(parts));
    } catch (const std::invalid_argument& err) {
      fail(where, err.what());
    }
  }
  spec.degree = spec.weight.empty() ? 0 : spec.weight.front().size();
  const json& seq = j.at("indexSeq");
  for (std::size_t k = 0; k < seq.size(); ++k)
    spec.indexSeq.push_back(integer_at(seq[k], "indexSeq[" + std::to_string(k) + "]"));
  const json& perms = j.at("perms");
  for (std::size_t i = 0; i < perms.size(); ++i) {
    const std::string where = "perms[" + std::to_string(i) + "]";
    if (!perms[i].is_array()) fail(where, "expected an array");
    std::vector<int> perm;
    for (std::size_t k = 0; k < perms[i].size(); ++k)
      perm.push_back(static_cast<int>(integer_at(perms[i][k], where + "[" + std::to_string(k) + "]")));
    spec.perms.push_back(std::move(perm));
  }
  return spec;
}

json hwv_spec_to_json(const HWVSpec& spec) {
  json w = json::array();
  for (const auto& p : spec.weight) w.push_back(p.parts());
  return {{"weight", std::move(w)}, {"indexSeq", spec.indexSeq}, {"perms", spec.perms}};
}

json complex_to_json(Complex z) { return {{"re", round12(z.real())}, {"im", round12(z.imag())}}; }

json group_to_json(const GroupTuple& g) {
  json out = json::array();
  for (const auto& m : g.factors) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
      rows.push_back(std::move(row));
    }
    out.push_back(std::move(rows));
  }
  return out;
}

json report_to_json(const ScalingReport& r) {
  json trace = json::array();
  for (const auto& rec : r.trace) {
    json e = json::array();
    for (double x : rec.eps) e.push_back(round12(x));
    json item = {{"i", rec.index}, {"eps", std::move(e)}, {"norm", round12(rec.norm)}, {"capacity", round12(rec.capacity)}};
    if (rec.chosen > 0) item["factor"] = rec.chosen;
    trace.push_back(std::move(item));
  }
  json out = {{"verdict", to_string(r.verdict)},
              {"iterations", r.iterations},
              {"budgetT", r.budgetT},
              {"maxIters", r.maxIters},
              {"finalEps", round12(r.finalEps)},
              {"log2M", round12(r.log2M)},
              {"trace", std::move(trace)},
              {"group", group_to_json(r.group)},
              {"warnings", r.warnings}};
  if (!r.reason.empty()) out["reason"] = r.reason;
  return out;
}

json verdict_to_json(const MembershipVerdict& v) {
  json out = {{"answer", to_string(v.answer)},
              {"epsilon", round12(v.epsilon)},
              {"runs", v.runs},
              {"witness", v.witness ? group_to_json(*v.witness) : json(nullptr)},
              {"witnessSeed", v.witnessSeed ? json(*v.witnessSeed) : json(nullptr)},
              {"evidence", report_to_json(v.evidence)}};
  if (v.sample) out["sample"] = tensor_to_json(*v.sample);
  return out;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

Tensor load_tensor(const std::filesystem::path& path) {
  try {
    return tensor_from_json(read_json(path));
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    if (msg.rfind(path.string(), 0) == 0) throw;
    throw std::invalid_argument(path.string() + ": " + msg);
  }
}

TargetSpectrum load_spectrum(const std::filesystem::path& path) {
  try {
    return spectrum_from_json(read_json(path));
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    if (msg.rfind(path.string(), 0) == 0) throw;
    throw std::invalid_argument(path.string() + ": " + msg);
  }
}

std::string dump(const json& j) { return j.dump() + "\n"; }

void save_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << dump(j);
}

}  // namespace tscale::io
