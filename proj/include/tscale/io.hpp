// JSON encodings of tensors, spectra, highest weight vector specs and reports.
#pragma once

#include "tscale/hwv.hpp"
#include "tscale/oracle.hpp"
#include "tscale/scaling.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace tscale::io {

using nlohmann::json;

/// Sparse {"dims", "entries": [{"idx", "re", "im"}]} or dense {"dims", "dense"}.
/// Entries must be Gaussian integers.
Tensor tensor_from_json(const json& j);
/// Canonical sparse encoding: nonzero entries in row-major order.
json tensor_to_json(const Tensor& X);

/// {"parts": [["2/3", "1/3"], ...]}; plain numbers are rationalized.
TargetSpectrum spectrum_from_json(const json& j);
json spectrum_to_json(const TargetSpectrum& p);

HWVSpec hwv_spec_from_json(const json& j);
json hwv_spec_to_json(const HWVSpec& spec);

json complex_to_json(Complex z);
json group_to_json(const GroupTuple& g);
json report_to_json(const ScalingReport& r);
json verdict_to_json(const MembershipVerdict& v);

/// Value rounded to 12 significant digits.
double round12(double x);

json read_json(const std::filesystem::path& path);
Tensor load_tensor(const std::filesystem::path& path);
TargetSpectrum load_spectrum(const std::filesystem::path& path);

/// Compact dump followed by a newline; the form used for every file written.
std::string dump(const json& j);
void save_json(const std::filesystem::path& path, const json& j);

}  // namespace tscale::io
