#include "fqz/config.hpp"

#include <doctest.h>

#include <json.hpp>

#include <string>

using namespace fqz;

namespace {

std::string field_of(const std::string& text) {
  try {
    parse_config(text, "test");
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

std::string with(const std::string& base, const std::string& pointer, nlohmann::json value) {
  auto doc = nlohmann::json::parse(base);
  doc[nlohmann::json::json_pointer(pointer)] = std::move(value);
  return doc.dump();
}

}  // namespace

TEST_CASE("built-in systems load by case-insensitive name") {
  for (const auto& name : builtin_config_names()) {
    const auto cfg = load_config(name);
    CHECK(cfg.source == "builtin:" + name);
    CHECK(cfg.notes.empty());
  }
  CHECK(load_config("Cantor-I").name == "CANTOR-I");
  CHECK(load_config("cantor-ii").system.case_tag() == CaseTag::CaseII);
  CHECK_THROWS_AS(load_config("no-such-system"), ConfigError);
}

TEST_CASE("invalid fields are named") {
  const std::string base = builtin_config_text("CANTOR-I");
  CHECK(field_of(with(base, "/outer/p", {"1/2", "1/4", "1/3"})) == "p");
  CHECK(field_of(with(base, "/outer/p", {"1/2", "1/2"})) == "p");
  CHECK(field_of(with(base, "/outer/p", {"1/2", "-1/4", "3/4"})) == "p[1]");
  CHECK(field_of(with(base, "/outer/maps/0/ratio", "3/2")) == "outer.maps[0].ratio");
  CHECK(field_of(with(base, "/outer/maps/1/translation", {"0", "1"})) == "outer.maps[1].translation");
  CHECK(field_of(with(base, "/case", "III")) == "case");
  CHECK(field_of(with(base, "/dimension", 7)) == "dimension");
  CHECK(field_of(with(base, "/inner/t", {"1/3", "1/3", "1/3"})) == "inner.t");
  CHECK(field_of(with(base, "/outer/p/0", "abc")) == "p[0]");
  CHECK(field_of("{not json") == "<document>");
}

TEST_CASE("near-unit probability sums are renormalized with a note") {
  const std::string base = builtin_config_text("CANTOR-I");
  const auto cfg = parse_config(with(base, "/inner/t", {"0.333333333333333", "0.666666666666666"}), "test");
  REQUIRE(cfg.notes.size() == 1);
  CHECK(cfg.notes.front().rfind("inner.t", 0) == 0);
  CHECK(cfg.system.exact_t()[0] + cfg.system.exact_t()[1] == Rational(1));
}

TEST_CASE("decimal literals are read exactly") {
  CHECK(load_config("asym-i").system.exact_p0() == Rational(1, 5));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-1.5e-3") == Rational(-3, 2000));
  CHECK(parse_rational("6/8") == Rational(3, 4));
  CHECK_THROWS(parse_rational("1/0"));
}

TEST_CASE("family cap is read") {
  const auto cfg = parse_config(with(builtin_config_text("CANTOR-I"), "/family_cap", 1000), "test");
  CHECK(cfg.family_cap == 1000);
  CHECK(field_of(with(builtin_config_text("CANTOR-I"), "/family_cap", -3)) == "family_cap");
}

TEST_CASE("random systems are seeded and valid") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (const auto tag : {CaseTag::CaseI, CaseTag::CaseII}) {
      CHECK(random_config_text(seed, tag) == random_config_text(seed, tag));
      const auto cs = random_system(seed, tag);
      CHECK(cs.case_tag() == tag);
      CHECK(validate_osc(cs.outer()).passed());
      if (tag == CaseTag::CaseII) CHECK(validate_iosc(cs).passed());
    }
  }
  CHECK(random_config_text(1, CaseTag::CaseI) != random_config_text(2, CaseTag::CaseI));
}
