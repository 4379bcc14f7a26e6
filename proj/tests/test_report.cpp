#include "fqz/report.hpp"

#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <sstream>

using namespace fqz;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

RunManifest sample_manifest() {
  RunManifest m;
  m.config_source = "builtin:CANTOR-I";
  m.config_hash = hex64(fnv1a("{}"));
  m.subcommand = "quantize";
  m.flags = {{"method", "antichain"}, {"j-range", "1..2"}};
  m.seed = 7;
  return m;
}

}  // namespace

TEST_CASE("FNV-1a reference vectors") {
  CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
  CHECK(hex64(fnv1a("foobar")) == "85944171f73967e8");
}

TEST_CASE("double formatting") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0 / 3, 4) == "0.3333");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("CSV quoting and row widths") {
  Table t{{"a", "b"}, {}, {}};
  t.add({"1", "x,y"});
  t.add({"say \"hi\"", ""});
  CHECK(to_csv(t) == "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",\n");
  CHECK_THROWS_AS(t.add({"only one"}), std::invalid_argument);
}

TEST_CASE("manifest hash ignores wall time") {
  auto m = sample_manifest();
  const auto h = m.hash();
  m.wall_seconds = 1.5;
  CHECK(m.hash() == h);
  const auto j = nlohmann::json::parse(m.json());
  CHECK(j["hash"] == h);
  CHECK(j["wall_seconds"] == 1.5);
  CHECK(j["seed"] == 7);
  CHECK(nlohmann::json::parse(sample_manifest().json()).contains("wall_seconds") == false);
  m.seed = 8;
  CHECK(m.hash() != h);
}

TEST_CASE("CSV carries the manifest as a comment line") {
  const auto m = sample_manifest();
  Table t{{"n", "value"}, {}, {}};
  t.add({"4", "0.25"});
  const auto ls = lines(to_csv(t, &m));
  REQUIRE(ls.size() == 3);
  CHECK(ls[0] == "# manifest " + m.json());
  CHECK(ls[1] == "n,value");
}

TEST_CASE("JSON lines type numbers and keep textual columns") {
  const auto m = sample_manifest();
  Table t{{"word", "mass", "note"}, {}, {"word"}};
  t.add({"12", "0.25", "abc"});
  t.add({"1", "inf", "7"});
  const auto ls = lines(to_jsonl(t, &m));
  REQUIRE(ls.size() == 3);
  const auto head = nlohmann::json::parse(ls[0]);
  CHECK(head["manifest"]["hash"] == m.hash());
  const auto r0 = nlohmann::json::parse(ls[1]);
  CHECK(r0["manifest_hash"] == m.hash());
  CHECK(r0["word"] == "12");
  CHECK(r0["mass"] == 0.25);
  CHECK(r0["note"] == "abc");
  const auto r1 = nlohmann::json::parse(ls[2]);
  CHECK(r1["word"] == "1");
  CHECK(r1["mass"] == "inf");
  CHECK(r1["note"] == 7);
  CHECK(r1["note"].is_number_integer());
  CHECK(r0["mass"].is_number_float());
  CHECK(to_jsonl(t).find("manifest") == std::string::npos);
}

TEST_CASE("result cache round trip") {
  const auto dir = std::filesystem::temp_directory_path() / ("fqz-test-cache-" + hex64(fnv1a(__FILE__)));
  std::filesystem::remove_all(dir);
  const ResultCache cache(dir);
  CHECK_FALSE(cache.load("k1", ".csv").has_value());
  cache.store("k1", ".csv", "a,b\n1,2\n", "{\"x\":1}");
  REQUIRE(cache.load("k1", ".csv").has_value());
  CHECK(*cache.load("k1", ".csv") == "a,b\n1,2\n");
  CHECK(std::filesystem::exists(dir / "k1.manifest.json"));
  CHECK_FALSE(std::filesystem::exists(dir / "k1.csv.tmp"));
  cache.store("k1", ".csv", "changed\n", "{}");
  CHECK(*cache.load("k1", ".csv") == "changed\n");
  std::filesystem::remove_all(dir);
}
