#include "fqz/report.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fqz {

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("row width does not match the table header");
  rows.push_back(std::move(row));
}

std::string format_double(double x, int precision) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, x);
  return buf;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

namespace {

nlohmann::json manifest_object(const RunManifest& m) {
  nlohmann::json j;
  j["config_source"] = m.config_source;
  j["config_hash"] = m.config_hash;
  j["subcommand"] = m.subcommand;
  j["flags"] = m.flags;
  j["seed"] = m.seed;
  j["tool_version"] = m.tool_version;
  return j;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::optional<double> as_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> as_integer(const std::string& s) {
  if (s.empty()) return std::nullopt;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string RunManifest::canonical_json() const { return manifest_object(*this).dump(); }

std::string RunManifest::json() const {
  auto j = manifest_object(*this);
  if (wall_seconds) j["wall_seconds"] = *wall_seconds;
  j["hash"] = hash();
  return j.dump();
}

std::string RunManifest::hash() const { return hex64(fnv1a(canonical_json())); }

std::string to_csv(const Table& table, const RunManifest* manifest) {
  std::ostringstream out;
  if (manifest) out << "# manifest " << manifest->json() << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << csv_cell(table.columns[c]);
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_cell(row[c]);
    out << '\n';
  }
  return out.str();
}

std::string to_jsonl(const Table& table, const RunManifest* manifest) {
  std::ostringstream out;
  std::string hash;
  if (manifest) {
    hash = manifest->hash();
    out << nlohmann::json{{"manifest", nlohmann::json::parse(manifest->json())}}.dump() << '\n';
  }
  for (const auto& row : table.rows) {
    nlohmann::ordered_json j;
    if (manifest) j["manifest_hash"] = hash;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& name = table.columns[c];
      if (table.textual.contains(name)) j[name] = row[c];
      else if (auto i = as_integer(row[c])) j[name] = *i;
      else if (auto v = as_number(row[c])) j[name] = *v;
      else j[name] = row[c];
    }
    out << j.dump() << '\n';
  }
  return out.str();
}

ResultCache::ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path ResultCache::default_dir() {
  if (const char* env = std::getenv("FQZ_CACHE_DIR"); env && *env) return env;
  if (const char* home = std::getenv("HOME"); home && *home) return std::filesystem::path(home) / ".cache" / "fqz";
  return ".fqz-cache";
}

std::optional<std::string> ResultCache::load(const std::string& key, const std::string& extension) const {
  std::ifstream in(dir_ / (key + extension), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void ResultCache::store(const std::string& key, const std::string& extension, const std::string& body,
                        const std::string& manifest_json) const {
  std::filesystem::create_directories(dir_);
  {
    std::ofstream out(dir_ / (key + ".manifest.json"), std::ios::binary);
    out << manifest_json << '\n';
  }
  const auto tmp = dir_ / (key + extension + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    out << body;
    if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
  }
  std::filesystem::rename(tmp, dir_ / (key + extension));
}

}  // namespace fqz
