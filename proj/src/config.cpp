#include "fqz/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>
#include <utility>

namespace fqz {

namespace detail {
extern const std::array<std::pair<std::string_view, std::string_view>, 4> kBuiltinConfigs;
}

namespace {

using nlohmann::json;

Rational number_at(const json& node, const std::string& field) {
  try {
    if (node.is_string()) return parse_rational(node.get<std::string>());
    if (node.is_number_integer()) return Rational(node.get<long>());
    if (node.is_number()) return rational_from_double(node.get<double>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
  throw ConfigError(field, "expected a number or an \"a/b\" string");
}

const json& require(const json& node, const char* key, const std::string& path) {
  if (!node.is_object() || !node.contains(key)) throw ConfigError(path + "." + key, "missing");
  return node.at(key);
}

std::vector<Rational> number_list(const json& node, const std::string& field) {
  if (node.is_number() || node.is_string()) return {number_at(node, field)};
  if (!node.is_array()) throw ConfigError(field, "expected an array of numbers");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(number_at(node[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Vec to_vec(const std::vector<Rational>& xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<Eigen::Index>(i)) = to_double(xs[i]);
  return v;
}

// Probability vectors within 1e-12 of summing to one are rescaled exactly.
std::vector<Rational> probability_list(const json& node, const std::string& field, std::vector<std::string>& notes) {
  auto xs = number_list(node, field);
  Rational total(0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= 0) throw ConfigError(field + "[" + std::to_string(i) + "]", "must be positive");
    total += xs[i];
  }
  if (total != 1) {
    if (std::abs(to_double(total) - 1.0) > 1e-12)
      throw ConfigError(field, "entries must sum to 1 (sum = " + std::to_string(to_double(total)) + ")");
    for (auto& x : xs) x /= total;
    notes.push_back(field + ": sum " + to_string(total) + " renormalized to 1");
  }
  return xs;
}

struct ParsedMaps {
  std::vector<Similitude> maps;
  std::vector<Rational> ratios;
};

ParsedMaps parse_maps(const json& node, const std::string& path, int q) {
  if (!node.is_array() || node.empty()) throw ConfigError(path, "expected a nonempty array of maps");
  ParsedMaps out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string here = path + "[" + std::to_string(i) + "]";
    const json& m = node[i];
    Rational r = number_at(require(m, "ratio", here), here + ".ratio");
    if (r <= 0 || r >= 1) throw ConfigError(here + ".ratio", "must lie in (0,1)");
    auto b = number_list(require(m, "translation", here), here + ".translation");
    if (static_cast<int>(b.size()) != q) throw ConfigError(here + ".translation", "expected " + std::to_string(q) + " entries");
    std::optional<Mat> rotation;
    if (m.contains("rotation")) {
      const json& rows = m.at("rotation");
      if (!rows.is_array() || static_cast<int>(rows.size()) != q) throw ConfigError(here + ".rotation", "expected a q×q matrix");
      Mat rot(q, q);
      for (int a = 0; a < q; ++a) {
        auto row = number_list(rows[static_cast<std::size_t>(a)], here + ".rotation[" + std::to_string(a) + "]");
        if (static_cast<int>(row.size()) != q) throw ConfigError(here + ".rotation", "expected a q×q matrix");
        for (int c = 0; c < q; ++c) rot(a, c) = to_double(row[static_cast<std::size_t>(c)]);
      }
      rotation = rot;
    }
    try {
      out.maps.emplace_back(to_double(r), to_vec(b), rotation);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(here, e.what());
    }
    out.ratios.push_back(r);
  }
  return out;
}

std::optional<Box> parse_box(const json& node, const std::string& key, const std::string& path, int q) {
  if (!node.contains(key)) return std::nullopt;
  const std::string here = path + "." + key;
  const json& b = node.at(key);
  if (!b.is_array() || b.size() != 2) throw ConfigError(here, "expected [[lo..],[hi..]]");
  auto lo = number_list(b[0], here + "[0]");
  auto hi = number_list(b[1], here + "[1]");
  if (static_cast<int>(lo.size()) != q || static_cast<int>(hi.size()) != q)
    throw ConfigError(here, "expected " + std::to_string(q) + " coordinates per corner");
  for (int k = 0; k < q; ++k)
    if (!(lo[static_cast<std::size_t>(k)] < hi[static_cast<std::size_t>(k)])) throw ConfigError(here, "lo must be < hi");
  return Box{to_vec(lo), to_vec(hi)};
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

}  // namespace

LoadedConfig parse_config(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!doc.is_object()) throw ConfigError("<document>", "expected a JSON object");
  std::vector<std::string> notes;

  int q = 1;
  if (doc.contains("dimension")) {
    if (!doc.at("dimension").is_number_integer()) throw ConfigError("dimension", "expected an integer");
    q = doc.at("dimension").get<int>();
  }
  if (q < 1 || q > kMaxDim) throw ConfigError("dimension", "must be in [1," + std::to_string(kMaxDim) + "]");

  std::string case_name = upper(require(doc, "case", "").get<std::string>());
  if (case_name != "I" && case_name != "II") throw ConfigError("case", "expected \"I\" or \"II\"");

  const json& outer = require(doc, "outer", "");
  auto outer_maps = parse_maps(require(outer, "maps", "outer"), "outer.maps", q);
  auto p = probability_list(require(outer, "p", "outer"), "p", notes);
  if (p.size() != outer_maps.maps.size() + 1)
    throw ConfigError("p", "expected " + std::to_string(outer_maps.maps.size() + 1) + " entries (p0..pN)");
  auto witness = parse_box(outer, "witness_box", "outer", q);

  const json& inner = require(doc, "inner", "");
  auto t = probability_list(require(inner, "t", "inner"), "inner.t", notes);

  auto build = [&]() -> CondensationSystem {
    try {
      if (case_name == "I") {
        if (t.size() != outer_maps.maps.size()) throw ConfigError("inner.t", "Case I needs one weight per outer map");
        return CondensationSystem(outer_maps.maps, outer_maps.ratios, p, t, witness);
      }
      auto inner_maps = parse_maps(require(inner, "maps", "inner"), "inner.maps", q);
      if (t.size() != inner_maps.maps.size()) throw ConfigError("inner.t", "expected one weight per inner map");
      auto inner_witness = parse_box(inner, "witness_box", "inner", q);
      SimilitudeSystem nu(inner_maps.maps, inner_maps.ratios, t, inner_witness);
      return CondensationSystem(outer_maps.maps, outer_maps.ratios, p, std::move(nu), witness);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("<system>", e.what());
    }
  };

  LoadedConfig cfg{doc.value("name", std::string("unnamed")), source, std::string(text), build(),
                   std::size_t{1} << 24, std::move(notes)};
  if (doc.contains("family_cap")) {
    if (!doc.at("family_cap").is_number_unsigned()) throw ConfigError("family_cap", "expected a positive integer");
    cfg.family_cap = doc.at("family_cap").get<std::size_t>();
  }
  return cfg;
}

const std::vector<std::string>& builtin_config_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, text] : detail::kBuiltinConfigs) out.emplace_back(name);
    return out;
  }();
  return names;
}

std::string builtin_config_text(std::string_view name) {
  const std::string key = upper(name);
  for (const auto& [n, text] : detail::kBuiltinConfigs)
    if (n == key) return std::string(text);
  throw ConfigError("<config>", "unknown built-in system " + std::string(name));
}

LoadedConfig load_config(const std::string& name_or_path) {
  const std::string key = upper(name_or_path);
  for (const auto& [n, text] : detail::kBuiltinConfigs)
    if (n == key) return parse_config(text, "builtin:" + std::string(n));
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) throw ConfigError("<config>", "cannot open " + name_or_path + " (and it is not a built-in name)");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), name_or_path);
}

namespace {

json map_json(const Rational& ratio, const Rational& shift) {
  return json{{"ratio", to_string(ratio)}, {"translation", json::array({to_string(shift)})}};
}

json weights_json(const std::vector<int>& w) {
  int total = 0;
  for (int x : w) total += x;
  json out = json::array();
  for (int x : w) out.push_back(to_string(Rational(x, total)));
  return out;
}

// Maps with the given ratios laid out left to right in [0,1] with equal gaps.
json spread_maps(const std::vector<Rational>& ratios) {
  Rational used(0);
  for (const auto& r : ratios) used += r;
  Rational gap = ratios.size() > 1 ? (1 - used) / Rational(static_cast<long>(ratios.size() - 1)) : Rational(0);
  json maps = json::array();
  Rational at(0);
  for (const auto& r : ratios) {
    maps.push_back(map_json(r, at));
    at += r + gap;
  }
  return maps;
}

}  // namespace

std::string random_config_text(std::uint64_t seed, CaseTag tag) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  json doc;
  doc["name"] = "RANDOM-" + to_string(tag) + "-" + std::to_string(seed);
  doc["dimension"] = 1;
  doc["case"] = to_string(tag);
  if (tag == CaseTag::CaseI) {
    const int n = pick(2, 3);
    std::vector<Rational> ratios;
    std::vector<int> p{pick(2, 4)}, t;
    for (int i = 0; i < n; ++i) {
      ratios.emplace_back(n == 2 ? pick(2, 4) : pick(3, 5), n == 2 ? 10 : 20);
      p.push_back(pick(3, 5));
      t.push_back(n == 2 ? pick(2, 3) : pick(4, 6));
    }
    doc["outer"] = {{"maps", spread_maps(ratios)}, {"p", weights_json(p)}, {"witness_box", {{"0"}, {"1"}}}};
    doc["inner"] = {{"t", weights_json(t)}};
  } else {
    std::vector<Rational> ratios{Rational(pick(2, 3), 10), Rational(pick(2, 3), 10)};
    json outer_maps = json::array({map_json(ratios[0], 0), map_json(ratios[1], 1 - ratios[1])});
    std::vector<Rational> c{Rational(pick(1, 2), 20), Rational(pick(1, 2), 20)};
    json inner_maps = json::array({map_json(c[0], Rational(2, 5)), map_json(c[1], Rational(3, 5) - c[1])});
    doc["outer"] = {{"maps", outer_maps},
                    {"p", weights_json({pick(2, 4), pick(3, 5), pick(3, 5)})},
                    {"witness_box", {{"0"}, {"1"}}}};
    doc["inner"] = {{"maps", inner_maps}, {"t", weights_json({pick(2, 3), pick(2, 3)})}, {"witness_box", {{"0"}, {"1"}}}};
  }
  return doc.dump(2);
}

CondensationSystem random_system(std::uint64_t seed, CaseTag tag) {
  return parse_config(random_config_text(seed, tag), "random:" + std::to_string(seed)).system;
}

}  // namespace fqz
