#pragma once

// Report emission: CSV and JSON-lines tables, run manifests, content hashes
// and the on-disk result cache.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fqz {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  // Columns always emitted as JSON strings.
  std::set<std::string> textual;

  void add(std::vector<std::string> row);
};

// "%.*g" with "inf", "-inf" and "nan" spelled out.
std::string format_double(double x, int precision = 12);

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

struct RunManifest {
  std::string config_source;
  std::string config_hash;  // FNV-1a of the config text
  std::string subcommand;
  std::map<std::string, std::string> flags;
  std::uint64_t seed = 0;
  std::string tool_version{kToolVersion};
  std::optional<double> wall_seconds;  // recorded only for timed runs

  // Canonical JSON with sorted keys, excluding wall time.
  std::string canonical_json() const;
  std::string json() const;
  std::string hash() const;
};

// CSV with a leading "# manifest {...}" line, ',' separators and LF newlines.
std::string to_csv(const Table& table, const RunManifest* manifest = nullptr);
// One manifest line, then one object per row tagged with the manifest hash.
// Cells that parse as numbers are emitted as JSON numbers unless their column is textual; whole numbers stay integers.
std::string to_jsonl(const Table& table, const RunManifest* manifest = nullptr);

class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path dir);
  // FQZ_CACHE_DIR, else $HOME/.cache/fqz, else ./.fqz-cache.
  static std::filesystem::path default_dir();

  const std::filesystem::path& dir() const { return dir_; }
  std::optional<std::string> load(const std::string& key, const std::string& extension) const;
  void store(const std::string& key, const std::string& extension, const std::string& body,
             const std::string& manifest_json) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace fqz
