#include "lcbayes/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lcb::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_vector(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += format_double(v[i]);
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_of_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return sha256_hex(ss.str());
}

std::string audit_csv(const std::vector<audit::AuditReport>& reports) {
  std::string out = "check,model,n,N,estimate,reference_or_bound,slack,pass,seed\n";
  for (const auto& r : reports) {
    out += r.check;
    out += ',';
    out += r.model;
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += std::to_string(r.N);
    out += ',';
    out += format_double(r.estimate);
    out += ',';
    out += format_double(r.reference);
    out += ',';
    out += format_double(r.slack);
    out += ',';
    out += r.pass ? "true" : "false";
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

nlohmann::json audit_json(const std::vector<audit::AuditReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j{{"check", r.check},         {"model", r.model},
                     {"n", r.n},                 {"N", r.N},
                     {"estimate", r.estimate},   {"reference_or_bound", r.reference},
                     {"slack", r.slack},         {"pass", r.pass},
                     {"seed", r.seed},           {"is_bound", r.is_bound},
                     {"degenerate_flat", r.degenerate_flat}};
    if (!r.note.empty()) j["note"] = r.note;
    if (!r.estimate_vec.empty()) j["estimate_vec"] = r.estimate_vec;
    if (!r.metrics.empty()) j["metrics"] = r.metrics;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string plot_csv(const std::vector<audit::AuditReport>& reports) {
  std::string out = "check,n,eps,estimate,bound\n";
  for (const auto& r : reports) {
    out += r.check;
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    const auto it = r.metrics.find("eps");
    if (it != r.metrics.end()) out += format_double(it->second);
    out += ',';
    out += format_double(r.estimate);
    out += ',';
    out += format_double(r.reference);
    out += '\n';
  }
  return out;
}

nlohmann::json manifest_json(const std::string& config_sha, std::uint64_t seed,
                             double wall_ms, const std::vector<ManifestEntry>& files) {
  nlohmann::json j{{"version", kVersion},
                   {"config_sha256", config_sha},
                   {"seed", seed},
                   {"wall_ms", wall_ms}};
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& f : files)
    arr.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  j["files"] = arr;
  return j;
}

}  // namespace lcb::io
