#include "mixtime/report_io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <ctime>
#include <fstream>

#include "mixtime/errors.hpp"

namespace mixtime {

const char* const kToolVersion = "0.1.0";
const int kCsvHeaderVersion = 1;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw Error("sha256: context allocation failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0x0f]);
  }
  return out;
}

std::string canonical_json(const nlohmann::json& j) {
  // nlohmann objects are std::map-backed, so dump() already emits sorted keys.
  return j.dump();
}

std::string config_hash(const nlohmann::json& config) {
  return sha256_hex(canonical_json(config));
}

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunManifest make_manifest(const std::string& subcommand, const nlohmann::json& config,
                          nlohmann::json parameters) {
  RunManifest m;
  m.tool_version = kToolVersion;
  m.config_sha256 = config_hash(config);
  m.subcommand = subcommand;
  m.parameters = std::move(parameters);
  m.timestamp = utc_now();
  return m;
}

nlohmann::json manifest_json(const RunManifest& m) {
  return nlohmann::json{{"tool_version", m.tool_version},
                        {"config_sha256", m.config_sha256},
                        {"subcommand", m.subcommand},
                        {"parameters", m.parameters},
                        {"timestamp", m.timestamp}};
}

std::string csv_header(const RunManifest& m, const std::vector<std::string>& columns) {
  std::string out;
  out += "# csv_version = " + std::to_string(kCsvHeaderVersion) + "\n";
  out += "# tool_version = " + std::string(kToolVersion) + "\n";
  out += "# config_sha256 = " + m.config_sha256 + "\n";
  out += "# subcommand = " + m.subcommand + "\n";
  out += "# parameters = " + canonical_json(m.parameters) + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i > 0) out += ",";
    out += columns[i];
  }
  out += "\n";
  return out;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw Error("write to " + tmp + " failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error("rename to " + path + " failed");
  }
}

}  // namespace mixtime
