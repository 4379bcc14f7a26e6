#include "fqz/config.hpp"
#include "fqz/systems.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace fqz;

namespace {

Word w(const char* s, int n = 2) { return Word::parse(s, n); }

SimilitudeSystem cantor() {
  return SimilitudeSystem({Similitude(1.0 / 3, make_vec({0.0})), Similitude(1.0 / 3, make_vec({2.0 / 3}))},
                          {Rational(1, 3), Rational(1, 3)}, {Rational(1, 2), Rational(1, 2)},
                          Box{make_vec({0.0}), make_vec({1.0})});
}

}  // namespace

TEST_CASE("composition follows f_sigma = f_s1 o f_s2") {
  const auto sys = cantor();
  const auto f = sys.compose(w("12"));
  CHECK(f.ratio() == doctest::Approx(1.0 / 9));
  CHECK(f.translation()(0) == doctest::Approx(2.0 / 9));
  CHECK(sys.compose(Word(2)).ratio() == 1.0);
  const auto pts = sys.attractor_points(2);
  REQUIRE(pts.size() == 4);
  const double expected[] = {0.0, 2.0 / 9, 2.0 / 3, 8.0 / 9};
  for (int i = 0; i < 4; ++i) CHECK(pts[static_cast<std::size_t>(i)](0) == doctest::Approx(expected[i]));
}

TEST_CASE("fixed points, inverses and rotations") {
  const Similitude f(0.5, make_vec({1.0}));
  CHECK(f.fixed_point()(0) == doctest::Approx(2.0));
  CHECK(f.apply_inverse(f.apply(make_vec({0.3})))(0) == doctest::Approx(0.3));
  Mat rot(2, 2);
  rot << 0, -1, 1, 0;
  const Similitude g(0.5, make_vec({1.0, 0.0}), rot);
  const Vec x = make_vec({0.2, 0.7});
  CHECK((g.apply_inverse(g.apply(x)) - x).norm() < 1e-14);
  Mat bad(2, 2);
  bad << 1, 1, 0, 1;
  CHECK_THROWS_AS(Similitude(0.5, make_vec({0.0, 0.0}), bad), std::invalid_argument);
}

TEST_CASE("attractor box encloses the attractor") {
  const auto sys = cantor();
  const Box box = sys.attractor_box();
  CHECK(box.lo(0) <= 0.0);
  CHECK(box.hi(0) >= 1.0);
  CHECK(box.hi(0) - box.lo(0) < 1.0 + 1e-6);
  for (const auto& p : sys.attractor_points(6)) CHECK(box.contains(p));
}

TEST_CASE("box geometry") {
  const Box a{make_vec({0.0, 0.0}), make_vec({1.0, 1.0})};
  const Box b{make_vec({2.0, 0.0}), make_vec({3.0, 1.0})};
  CHECK(a.distance(b) == doctest::Approx(1.0));
  CHECK(a.distance(make_vec({4.0, 5.0})) == doctest::Approx(5.0));
  CHECK(a.farthest(make_vec({0.0, 0.0})) == doctest::Approx(std::sqrt(2.0)));
  CHECK(a.diameter() == doctest::Approx(std::sqrt(2.0)));
  CHECK(a.hull(b).contains(b));
  CHECK(a.interior_contains(make_vec({0.5, 0.5})));
  CHECK_FALSE(a.interior_contains(make_vec({0.0, 0.5})));
}

TEST_CASE("closed-form dimensions of the shipped systems") {
  CHECK(dimension_d0(load_config("cantor-i").system) == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-14));
  CHECK(dimension_d0(load_config("asym-i").system) == doctest::Approx(0.579380164285695).epsilon(1e-13));
  CHECK(dimension_d0(load_config("cantor-ii").system) == doctest::Approx(std::log(2.0) / std::log(10.0)).epsilon(1e-14));
  CHECK(load_config("cantor-i").system.outer().similarity_dimension() ==
        doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("k_r interpolates the entropy dimension and the uniform case") {
  const std::vector<double> half{0.5, 0.5}, third{1.0 / 3, 1.0 / 3};
  const double d = std::log(2.0) / std::log(3.0);
  CHECK(dimension_kr(half, third, 0.0) == doctest::Approx(d));
  CHECK(dimension_kr(half, third, 1.0) == doctest::Approx(d).epsilon(1e-10));
  CHECK(dimension_kr(half, third, 2.0) == doctest::Approx(d).epsilon(1e-10));
  const std::vector<double> q{1.0 / 3, 2.0 / 3};
  const double k0 = dimension_kr(q, third, 0.0);
  CHECK(k0 == doctest::Approx(0.579380164285695));
  CHECK(dimension_kr(q, third, 1e-3) == doctest::Approx(k0).epsilon(1e-3));
  // r = 1 root of Σ (q_i s_i)^x = 1 with x = k/(k+1): (1/9)^x + (2/9)^x = 1.
  const double k1 = dimension_kr(q, third, 1.0);
  const double x = k1 / (k1 + 1.0);
  CHECK(std::pow(1.0 / 9, x) + std::pow(2.0 / 9, x) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("open set condition") {
  CHECK(validate_osc(cantor()).passed());
  const SimilitudeSystem overlapping({Similitude(0.6, make_vec({0.0})), Similitude(0.6, make_vec({0.4}))},
                                     {Rational(3, 5), Rational(3, 5)}, {Rational(1, 2), Rational(1, 2)},
                                     Box{make_vec({0.0}), make_vec({1.0})});
  CHECK_FALSE(validate_osc(overlapping).passed());
}

TEST_CASE("IOSC on the shipped Case II system") {
  const auto cs = load_config("cantor-ii").system;
  const auto report = validate_iosc(cs);
  CHECK(report.passed());
  for (const auto& c : report.checks) CHECK(c.status == CheckStatus::Pass);
  const auto case1 = validate_iosc(load_config("cantor-i").system);
  REQUIRE(!case1.checks.empty());
  CHECK(case1.checks.front().status == CheckStatus::Unverified);
}

TEST_CASE("condensation system structure") {
  const auto cs = load_config("asym-i").system;
  CHECK(cs.case_tag() == CaseTag::CaseI);
  CHECK(cs.exact_p0() == Rational(1, 5));
  CHECK(cs.exact_p()[0] == Rational(2, 5));
  CHECK(cs.exact_t()[1] == Rational(2, 3));
  CHECK(cs.outer().exact_probabilities()[0] == Rational(1, 2));
  CHECK(u0(cs) == doctest::Approx(std::log(1.0 / 3) / 3 + 2 * std::log(2.0 / 3) / 3));
  CHECK(l0(cs) == doctest::Approx(std::log(1.0 / 3)));
  const auto c2 = load_config("cantor-ii").system;
  CHECK(c2.inner_box().lo(0) >= 0.4 - 1e-12);
  CHECK(c2.inner_box().hi(0) <= 0.6 + 1e-6);
}

TEST_CASE("rescaling scales boxes and translations") {
  const auto cs = load_config("cantor-i").system;
  const auto big = cs.rescaled(2.0);
  CHECK(big.support_box().diameter() == doctest::Approx(2 * cs.support_box().diameter()));
  CHECK(big.outer().map(2).translation()(0) == doctest::Approx(4.0 / 3));
  CHECK(dimension_d0(big) == doctest::Approx(dimension_d0(cs)));
}
