#include "fqz/symbolic.hpp"

#include <doctest.h>

#include <set>

using namespace fqz;

namespace {

Word w(const char* s, int n = 2) { return Word::parse(s, n); }

std::set<std::string> strings(const Antichain& a) {
  std::set<std::string> out;
  for (const auto& m : a.members()) out.insert(m.str());
  return out;
}

// Every word of length ≤ depth with w(σ⁻) ≥ ε > w(σ), by exhaustive enumeration.
std::set<std::string> brute_threshold(const std::vector<Rational>& weights, const Rational& eps, int depth) {
  std::set<std::string> out;
  const int n = static_cast<int>(weights.size());
  for (int len = 1; len <= depth; ++len)
    for (const auto& word : all_words(n, len)) {
      const Rational self = word_weight(weights, word);
      const Rational parent = word_weight(weights, word.parent());
      if (parent >= eps && eps > self) out.insert(word.str());
    }
  return out;
}

}  // namespace

TEST_CASE("word concatenation, truncation and suffixes") {
  CHECK(concat(w("12"), w("1")) == w("121"));
  CHECK(concat(Word(2), w("22")) == w("22"));
  CHECK(concat(w("1"), Word(2)) == w("1"));
  CHECK(truncate(w("121"), 2) == w("12"));
  CHECK(suffix(w("121"), 1) == w("21"));
  CHECK(suffix(w("121"), 0) == w("121"));
  CHECK(w("121").parent() == w("12"));
  CHECK_THROWS(Word(2).parent());
  CHECK(w("12").child(2) == w("122"));
  CHECK(Word(2).str().empty());
}

TEST_CASE("word parsing rejects symbols outside the alphabet") {
  CHECK_THROWS(Word::parse("13", 2));
  CHECK(Word::parse("1-10-2", 10).size() == 3);
  CHECK(Word::parse("1-10-2", 10)[1] == 10);
}

TEST_CASE("prefix relation") {
  CHECK(relate(w("1"), w("12")) == Relation::PredecessorOf);
  CHECK(relate(w("12"), w("1")) == Relation::DescendantOf);
  CHECK(relate(w("12"), w("21")) == Relation::Incomparable);
  CHECK(relate(w("12"), w("12")) == Relation::Equal);
  CHECK(relate(Word(2), w("2")) == Relation::PredecessorOf);
}

TEST_CASE("descendant sets") {
  const auto g = descendants(w("1"), 1);
  REQUIRE(g.size() == 2);
  CHECK(g[0] == w("11"));
  CHECK(g[1] == w("12"));
  CHECK(descendants(w("1"), 3).size() == 8);
  CHECK(all_words(3, 2).size() == 9);
}

TEST_CASE("antichains reject comparable members and detect maximality") {
  CHECK_THROWS_AS(Antichain(2, {w("1"), w("12")}), std::invalid_argument);
  CHECK(Antichain(2, {w("1"), w("21"), w("22")}).is_maximal());
  CHECK_FALSE(Antichain(2, {w("1"), w("21")}).is_maximal());
  const Antichain a(2, {w("1"), w("21"), w("22")});
  CHECK(a.predecessor_of(w("2111")) == w("21"));
  CHECK_FALSE(a.predecessor_of(w("2")).has_value());
  CHECK(a.min_length() == 1);
  CHECK(a.max_length() == 2);
}

TEST_CASE("Lambda-star of a full level is empty") {
  const Antichain level(2, all_words(2, 2));
  CHECK(lambda_star(level).empty());
  CHECK(proper_prefixes(level).size() == 3);
  const Antichain mixed(2, {w("1"), w("21"), w("221"), w("222")});
  const auto star = lambda_star(mixed);
  REQUIRE(star.size() == 2);
  CHECK(star[0] == w("2"));
  CHECK(star[1] == w("22"));
}

TEST_CASE("threshold antichain, uniform weights") {
  const std::vector<Rational> half{Rational(1, 2), Rational(1, 2)};
  CHECK(strings(threshold_antichain(half, Rational(1, 2))) == std::set<std::string>{"11", "12", "21", "22"});
  CHECK(strings(threshold_antichain(half, Rational(1, 2) + Rational(1, 1000000))) == std::set<std::string>{"1", "2"});
}

TEST_CASE("threshold antichain matches brute force to depth 6") {
  const std::vector<Rational> t{Rational(1, 3), Rational(2, 3)};
  const auto got = strings(threshold_antichain(t, Rational(1, 3)));
  CHECK(got == brute_threshold(t, Rational(1, 3), 6));
  CHECK(got == std::set<std::string>{"11", "12", "21", "221", "222"});
  for (const Rational eps : {Rational(1, 5), Rational(1, 9), Rational(2, 27), Rational(1, 20)}) {
    const auto a = threshold_antichain(t, eps);
    CHECK(a.is_maximal());
    CHECK(strings(a) == brute_threshold(t, eps, 12));
  }
  const std::vector<Rational> three{Rational(1, 5), Rational(3, 10), Rational(1, 2)};
  CHECK(strings(threshold_antichain(three, Rational(1, 30))) == brute_threshold(three, Rational(1, 30), 8));
}

TEST_CASE("threshold antichain with double weights agrees with exact weights") {
  const auto exact = threshold_antichain(std::vector<Rational>{Rational(1, 3), Rational(2, 3)}, Rational(1, 27));
  const auto approx = threshold_antichain(std::vector<double>{1.0 / 3, 2.0 / 3}, 1.0 / 27);
  CHECK(strings(exact) == strings(approx));
}

TEST_CASE("threshold antichain rejects bad inputs and honours the cap") {
  CHECK_THROWS_AS(threshold_antichain(std::vector<Rational>{Rational(1), Rational(1, 2)}, Rational(1, 2)), std::invalid_argument);
  CHECK_THROWS_AS(threshold_antichain(std::vector<Rational>{Rational(1, 2), Rational(1, 2)}, Rational(0)), std::invalid_argument);
  CHECK_THROWS_AS(threshold_antichain(std::vector<Rational>{Rational(1, 2), Rational(1, 2)}, Rational(1, 1 << 20), 1000),
                  std::length_error);
}

TEST_CASE("random maximal antichains are maximal and seeded") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto a = random_maximal_antichain(3, seed, 15);
    CHECK(a.is_maximal());
    CHECK(strings(a) == strings(random_maximal_antichain(3, seed, 15)));
  }
  CHECK(random_maximal_antichain(2, 1, 0).members() == std::vector<Word>{Word(2)});
}
