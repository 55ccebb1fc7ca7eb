#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcbayes/audit.hpp"

namespace lcb::io {

inline constexpr const char* kVersion = "0.1.0";

// %.17g: round-trip exact, locale-independent ('.' decimal point)
std::string format_double(double v);
// semicolon-joined vector for single-field CSV embedding
std::string format_vector(std::span<const double> v);

// write-temp-then-rename so partial files never appear under the output name
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string sha256_hex(const std::string& bytes);
std::string sha256_of_file(const std::filesystem::path& path);

// audit CSV: the fixed 9-column row set
std::string audit_csv(const std::vector<audit::AuditReport>& reports);
nlohmann::json audit_json(const std::vector<audit::AuditReport>& reports);

// long-format plot data: one row per (check, n, eps, estimate, bound)
std::string plot_csv(const std::vector<audit::AuditReport>& reports);

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

nlohmann::json manifest_json(const std::string& config_sha, std::uint64_t seed,
                             double wall_ms, const std::vector<ManifestEntry>& files);

}  // namespace lcb::io
