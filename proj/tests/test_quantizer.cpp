#include "fqz/asymptotics.hpp"
#include "fqz/config.hpp"
#include "fqz/quantizer.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace fqz;

namespace {

Codebook points_1d(std::initializer_list<double> xs) {
  std::vector<Vec> pts;
  for (double x : xs) pts.push_back(make_vec({x}));
  return Codebook(pts);
}

// Draws from a 1-D Case I measure by choosing, at each step, ν with
// probability p₀ (then following t-digits) or map i with probability p_i.
struct Estimate {
  double mean;
  double stderr_mc;
};

Estimate independent_mc(const CondensationSystem& cs, const Codebook& book, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& maps = cs.outer().maps();
  double sum = 0, sum2 = 0;
  for (std::size_t k = 0; k < count; ++k) {
    double scale = 1, shift = 0;
    bool in_nu = false;
    while (scale > 1e-14) {
      double r = u(rng);
      if (!in_nu && r < cs.p0()) {
        in_nu = true;
        continue;
      }
      if (!in_nu) r = (r - cs.p0()) / (1 - cs.p0());
      const auto& weights = in_nu ? cs.t() : cs.outer().probabilities();
      std::size_t i = 0;
      for (double acc = weights[0]; r >= acc && i + 1 < weights.size(); acc += weights[++i]) {}
      shift += scale * maps[i].translation()(0);
      scale *= maps[i].ratio();
    }
    const double v = std::log(book.distance(make_vec({shift})));
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(count);
  const double mean = sum / n;
  return {mean, std::sqrt((sum2 / n - mean * mean) / n)};
}

}  // namespace

TEST_CASE("codebooks drop exact duplicates and keep order") {
  const auto book = points_1d({0.5, 0.25, 0.5, 0.75, 0.25});
  REQUIRE(book.size() == 3);
  CHECK(book.points()[0](0) == 0.5);
  CHECK(book.points()[1](0) == 0.25);
  CHECK(book.points()[2](0) == 0.75);
  CHECK(book.distance(make_vec({0.3})) == doctest::Approx(0.05));
}

TEST_CASE("antichain codebook at j = 1") {
  const auto cantor = load_config("cantor-i").system;
  const auto book = codebook_from_antichain(cantor, 1);
  REQUIRE(book.size() == 4);
  std::vector<double> xs;
  for (const auto& p : book.points()) xs.push_back(p(0));
  std::sort(xs.begin(), xs.end());
  const double expected[] = {1.0 / 18, 5.0 / 18, 13.0 / 18, 17.0 / 18};
  for (int i = 0; i < 4; ++i) CHECK(xs[static_cast<std::size_t>(i)] == doctest::Approx(expected[i]).epsilon(1e-9));
  const auto c2 = load_config("cantor-ii").system;
  CHECK(codebook_from_antichain(c2, 1).size() == 16);
  CHECK(codebook_from_antichain(c2, 2).size() == level_family(c2, 2).count.get_ui());
  CHECK_THROWS_AS(codebook_from_antichain(cantor, 0), std::invalid_argument);
}

TEST_CASE("construction bound dominates the antichain codebook error") {
  const auto cantor = load_config("cantor-i").system;
  CHECK(antichain_codebook_bound(cantor, 1) == doctest::Approx(std::log(1.0 / 9)).epsilon(1e-10));
  for (const char* name : {"cantor-i", "asym-i", "cantor-ii"}) {
    const auto cs = load_config(name).system;
    for (int j = 1; j <= 3; ++j) {
      const auto bracket = log_dist_integral(cs, codebook_from_antichain(cs, j));
      INFO(name << " j=" << j);
      CHECK(bracket.converged);
      CHECK(bracket.upper <= antichain_codebook_bound(cs, j));
    }
  }
}

TEST_CASE("rigorous bracket agrees with an independent sampler") {
  for (const char* name : {"cantor-i", "asym-i"}) {
    const auto cs = load_config(name).system;
    for (const auto& book : {points_1d({0.25}), points_1d({0.1, 0.6}), codebook_from_antichain(cs, 2)}) {
      const auto bracket = log_dist_integral(cs, book);
      const auto mc = independent_mc(cs, book, 200000, 11);
      INFO(name << " n=" << book.size() << " mc=" << mc.mean << "±" << mc.stderr_mc);
      CHECK(bracket.width() <= 1e-3);
      CHECK(mc.mean >= bracket.lower - 4 * mc.stderr_mc);
      CHECK(mc.mean <= bracket.upper + 4 * mc.stderr_mc);
      const auto lib = monte_carlo_integral(cs, book, 100000, 5);
      CHECK(lib.mid() >= bracket.lower - 4 * lib.stderr_mc);
      CHECK(lib.mid() <= bracket.upper + 4 * lib.stderr_mc);
    }
  }
}

TEST_CASE("sampler reproduces cylinder masses and seeds") {
  const auto cs = load_config("cantor-i").system;
  const auto xs = sample_ism(cs, 3, 100000);
  std::size_t left = 0, e12 = 0;
  for (const auto& x : xs) {
    if (x(0) <= 1.0 / 3) ++left;
    if (x(0) >= 2.0 / 9 && x(0) <= 1.0 / 3) ++e12;
  }
  CHECK(left / 1e5 == doctest::Approx(0.5).epsilon(0.02));
  CHECK(e12 / 1e5 == doctest::Approx(0.25).epsilon(0.03));
  CHECK(sample_ism(cs, 3, 10)[7] == xs[7]);
  const auto book = points_1d({0.5});
  const auto a = monte_carlo_integral(cs, book, 20000, 1);
  const auto b = monte_carlo_integral(cs, book, 40000, 1);
  CHECK(b.stderr_mc / a.stderr_mc == doctest::Approx(1 / std::sqrt(2.0)).epsilon(0.1));
}

TEST_CASE("one-point optimum on CANTOR-I sits at 1/4 or 3/4") {
  const auto cs = load_config("cantor-i").system;
  const auto at_quarter = log_dist_integral(cs, points_1d({0.25}));
  CHECK(at_quarter.lower <= -1.6586270);
  CHECK(at_quarter.upper >= -1.6586270);
  const auto at_half = log_dist_integral(cs, points_1d({0.5}));
  CHECK(at_half.mid() == doctest::Approx(-1.16746).epsilon(1e-3));
  CHECK(at_quarter.upper < at_half.lower);
  const auto oracle = oracle_optimal_1d(cs, 1, 1.0 / 128);
  const double a = oracle.codebook.points()[0](0);
  CHECK(std::min(std::abs(a - 0.25), std::abs(a - 0.75)) <= 1.0 / 128);
  CHECK(oracle.bracket.mid() == doctest::Approx(-1.65863).epsilon(1e-3));
  CHECK(oracle.certified_lower <= oracle.bracket.upper);
}

TEST_CASE("a codebook point on the attractor gives a finite bracket") {
  const auto cs = load_config("cantor-i").system;
  const auto bracket = log_dist_integral(cs, points_1d({0.0}));
  CHECK(std::isfinite(bracket.lower));
  CHECK(std::isfinite(bracket.upper));
  CHECK(bracket.converged);
}

TEST_CASE("adding a point never increases the error") {
  const auto cs = load_config("asym-i").system;
  const auto one = log_dist_integral(cs, points_1d({0.4}));
  const auto two = log_dist_integral(cs, points_1d({0.4, 0.8}));
  const auto three = log_dist_integral(cs, points_1d({0.4, 0.8, 0.1}));
  CHECK(two.lower <= one.upper);
  CHECK(three.lower <= two.upper);
  CHECK(three.upper < one.lower);
}

TEST_CASE("scaling the measure shifts the error by log lambda") {
  const auto cs = load_config("asym-i").system;
  const auto big = cs.rescaled(2.0);
  const auto a = log_dist_integral(cs, points_1d({0.2, 0.7}));
  const auto b = log_dist_integral(big, points_1d({0.4, 1.4}));
  CHECK(b.mid() == doctest::Approx(a.mid() + std::log(2.0)).epsilon(2e-3));
}

TEST_CASE("lloyd improves on the antichain codebook and matches the oracle") {
  const auto cs = load_config("cantor-i").system;
  for (int j = 1; j <= 2; ++j) {
    const auto init = codebook_from_antichain(cs, j);
    const auto start = log_dist_integral(cs, init);
    const auto result = lloyd0(cs, init.size(), init);
    CHECK(result.codebook.size() == init.size());
    CHECK(result.bracket.upper <= start.upper);
  }
  for (const char* name : {"cantor-i", "asym-i"}) {
    const auto sys = load_config(name).system;
    const auto oracle = oracle_optimal_1d(sys, 2, 1.0 / 128);
    const auto lloyd = lloyd0(sys, 2, quantile_codebook(sys, 2));
    INFO(name << " oracle=" << oracle.bracket.mid() << " lloyd=" << lloyd.bracket.mid() << " slack=" << oracle.grid_slack);
    CHECK(std::abs(oracle.bracket.mid() - lloyd.bracket.mid()) <= oracle.grid_slack + 2e-3);
  }
}

TEST_CASE("two-point oracle on CANTOR-I is symmetric") {
  const auto cs = load_config("cantor-i").system;
  const auto oracle = oracle_optimal_1d(cs, 2, 1.0 / 128);
  REQUIRE(oracle.codebook.size() == 2);
  const double a = oracle.codebook.points()[0](0), b = oracle.codebook.points()[1](0);
  CHECK(a + b == doctest::Approx(1.0).epsilon(1.0 / 64));
  CHECK(oracle.certified_lower <= oracle.bracket.upper);
}

TEST_CASE("certified lower bound is below every codebook") {
  const auto cs = load_config("asym-i").system;
  for (std::size_t n : {1u, 2u, 4u, 8u}) {
    const double lower = certified_lower_bound(cs, n);
    const auto book = quantile_codebook(cs, n);
    CHECK(book.size() == n);
    CHECK(lower <= log_dist_integral(cs, book).upper);
  }
  CHECK(certified_lower_bound(cs, 8) <= certified_lower_bound(cs, 2) + 1e-12);
}

TEST_CASE("sandwich inequalities") {
  const auto cs = load_config("cantor-i").system;
  for (const auto& row : sandwich_check(cs, {4, 8, 16})) {
    INFO("n=" << row.n);
    CHECK(row.m == row.n / 3);
    CHECK(row.lower_holds);
    CHECK(row.upper_holds);
  }
}

TEST_CASE("coefficient table rows") {
  const auto cs = load_config("cantor-i").system;
  CHECK(coefficient_csv_header() == "n,method,e_lower,e_upper,coef_lower,coef_upper,seconds");
  const auto rows = coefficient_table(cs, 1, 2, QuantizeMethod::Antichain);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n == 4);
  CHECK(rows[1].n == 8);
  CHECK(rows[0].e_lower <= rows[0].e_upper);
  CHECK(rows[0].coef_lower <= rows[0].coef_upper);
  const double d0 = dimension_d0(cs);
  CHECK(rows[0].coef_upper == doctest::Approx(std::pow(4.0, 1 / d0) * rows[0].e_upper));
  CHECK(rows[0].e_upper == doctest::Approx(std::exp(log_dist_integral(cs, codebook_from_antichain(cs, 1)).upper)));
  CHECK(std::exp(antichain_codebook_bound(cs, 1)) * std::pow(4.0, 1 / d0) == doctest::Approx(1.0).epsilon(1e-9));
  const auto line = coefficient_csv_row(rows[0], false);
  CHECK(line.rfind("4,antichain,", 0) == 0);
  CHECK(line.substr(line.size() - 3) == ",NA");
}
