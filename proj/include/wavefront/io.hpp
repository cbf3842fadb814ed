#pragma once

// Model files (JSON) and result serialization.

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "wavefront/asymptotics.hpp"
#include "wavefront/charfun.hpp"
#include "wavefront/models.hpp"
#include "wavefront/verify.hpp"
#include "wavefront/wavesolver.hpp"

namespace wavefront::io {

using json = nlohmann::json;

std::string_view version() noexcept;

/// Throws Error(Schema) with a path such as "model.g.rate" on bad input.
/// Relative "file" entries of tabulated kernels resolve against `base_dir`.
ModelSpec model_from_json(const json& j, const std::filesystem::path& base_dir = {});
/// Throws Error(Io) when unreadable and Error(Schema) on parse failure.
ModelSpec load_model(const std::filesystem::path& path);
json read_json_file(const std::filesystem::path& path);

KernelComponent kernel_from_json(const json& j, const std::string& where,
                                 const std::filesystem::path& base_dir = {});
Nonlinearity nonlinearity_from_json(const json& j, const std::string& where);

json to_json(const SpectralData& sd);
json to_json(const MinSpeed& ms);
json to_json(const ScanReport& r);
json to_json(const WaveProfile& p);  ///< metadata only, no samples
json to_json(const DecayFit& f);
json to_json(const RepresentationReport& r);
json to_json(const Check& c);
json to_json(const VerifyReport& r);
json to_json(const Alignment& a);

/// Serializes with every float printed with 17 significant digits and
/// infinities as the strings "inf" / "-inf". Keys are sorted.
std::string dump(const json& j, int indent = 2);
std::string format_double(double x);

/// FNV-1a 64-bit hash as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

void write_text(const std::filesystem::path& path, const std::string& text);
/// "t,phi" CSV.
void write_profile_csv(const std::filesystem::path& path, const WaveProfile& p);

}  // namespace wavefront::io
