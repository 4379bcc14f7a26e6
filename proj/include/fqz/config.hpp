#pragma once

// JSON system configs: parsing, the shipped example systems and seeded random systems.

#include "fqz/systems.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fqz {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct LoadedConfig {
  std::string name;
  std::string source;  // file path or "builtin:NAME"
  std::string text;    // document as read; hashed into run manifests
  CondensationSystem system;
  std::size_t family_cap = std::size_t{1} << 24;
  std::vector<std::string> notes;
};

LoadedConfig parse_config(std::string_view text, const std::string& source);
// A built-in name (case-insensitive) or a path to a JSON document.
LoadedConfig load_config(const std::string& name_or_path);

const std::vector<std::string>& builtin_config_names();
std::string builtin_config_text(std::string_view name);

// Seeded 1-D systems with separated pieces and moderate weights.
std::string random_config_text(std::uint64_t seed, CaseTag tag);
CondensationSystem random_system(std::uint64_t seed, CaseTag tag);

}  // namespace fqz
