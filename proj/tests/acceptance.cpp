#include "fqz/asymptotics.hpp"
#include "fqz/config.hpp"
#include "fqz/mass.hpp"
#include "fqz/quantizer.hpp"
#include "fqz/suites.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fqz;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> failures;
  std::string summary;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
};

std::string fmt(double x) { return format_double(x, 6); }

std::vector<std::pair<std::string, CondensationSystem>> shipped() {
  std::vector<std::pair<std::string, CondensationSystem>> out;
  for (const char* name : {"CANTOR-I", "ASYM-I", "CANTOR-II"}) out.emplace_back(name, load_config(name).system);
  return out;
}

void require_rows(Outcome& out, const std::string& subject, const std::vector<CheckRow>& rows) {
  for (const auto& r : rows)
    out.require(r.pass, subject + ": " + r.check + " j=" + std::to_string(r.j) + " " + r.detail);
}

Outcome identities() {
  Outcome out;
  SuiteOptions opts;
  opts.antichains = 50;
  opts.max_word_length = 3;
  opts.max_h = 5;
  std::size_t checks = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto cs = random_system(seed, CaseTag::CaseI);
    const std::string subject = "RANDOM-I-" + std::to_string(seed);
    for (const char* suite : {"mass", "identity"}) {
      const auto rows = run_suite(cs, suite, opts);
      checks += rows.size();
      require_rows(out, subject, rows);
    }
  }
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto rows = mass_suite(random_system(seed, CaseTag::CaseII), opts);
    checks += rows.size();
    require_rows(out, "RANDOM-II-" + std::to_string(seed), rows);
  }
  for (const auto& [name, cs] : shipped()) {
    const auto rows = cs.case_tag() == CaseTag::CaseI ? identity_suite(cs, opts) : mass_suite(cs, opts);
    checks += rows.size();
    require_rows(out, name, rows);
  }
  out.summary = std::to_string(checks) + " checks";
  return out;
}

Outcome bounds() {
  Outcome out;
  SuiteOptions opts;
  opts.jmax = 10;
  std::vector<std::pair<std::string, CondensationSystem>> systems = shipped();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    systems.emplace_back("RANDOM-I-" + std::to_string(seed), random_system(seed, CaseTag::CaseI));
    systems.emplace_back("RANDOM-II-" + std::to_string(seed), random_system(seed, CaseTag::CaseII));
  }
  std::size_t checks = 0;
  for (const auto& [name, cs] : systems) {
    const auto rows = antichain_suite(cs, opts);
    checks += rows.size();
    require_rows(out, name, rows);
  }
  out.summary = std::to_string(systems.size()) + " systems, " + std::to_string(checks) + " checks";
  return out;
}

Outcome convergence() {
  Outcome out;
  std::ostringstream s;
  for (const auto& [name, cs] : shipped()) {
    const bool case1 = cs.case_tag() == CaseTag::CaseI;
    const int jmax = case1 ? 12 : 10;
    for (const std::string kind : case1 ? std::vector<std::string>{"d", "eta"} : std::vector<std::string>{"xi"}) {
      const auto report = convergence_report(cs, kind, jmax);
      const double ratio = report.first_half_max > 0 ? report.second_half_max / report.first_half_max : 0;
      s << name << " " << kind << (report.identically_zero ? " identically zero" : " ratio=" + fmt(ratio)) << "; ";
      out.require(report.pass, name + " " + kind + ": second-half max " + fmt(report.second_half_max) +
                                   " > 1.2 x first-half max " + fmt(report.first_half_max));
      if (name == "CANTOR-I") out.require(report.identically_zero, "CANTOR-I " + kind + " is not identically zero");
    }
  }
  out.summary = s.str();
  return out;
}

struct Tables {
  std::map<std::string, std::vector<CoefficientRow>> antichain;
  std::map<std::string, std::vector<CoefficientRow>> lloyd;
};

Tables& tables() {
  static Tables t;
  return t;
}

const std::vector<CoefficientRow>& antichain_rows(const std::string& name, int jmax) {
  auto& cache = tables().antichain;
  if (!cache.contains(name)) cache[name] = coefficient_table(load_config(name).system, 1, jmax, QuantizeMethod::Antichain);
  return cache[name];
}

Outcome codebook_bounds() {
  Outcome out;
  std::ostringstream s;
  for (const auto& [name, jmax] : std::vector<std::pair<std::string, int>>{{"CANTOR-I", 8}, {"ASYM-I", 8}, {"CANTOR-II", 6}}) {
    const auto cs = load_config(name).system;
    const double d0 = dimension_d0(cs);
    double worst = -1e300;
    for (const auto& row : antichain_rows(name, jmax)) {
      const double upper = std::log(row.e_upper);
      worst = std::max(worst, upper - row.construction_bound);
      out.require(upper <= row.construction_bound + 1e-3,
                  name + " j=" + std::to_string(row.j) + ": " + fmt(upper) + " > " + fmt(row.construction_bound));
      if (name == "CANTOR-I") {
        const double product = std::pow(static_cast<double>(row.n), 1 / d0) * std::exp(row.construction_bound);
        out.require(std::abs(product - 1) <= 1e-6, "CANTOR-I j=" + std::to_string(row.j) + ": product " + fmt(product));
      }
    }
    s << name << " max(upper-bound)=" << fmt(worst) << "; ";
  }
  out.summary = s.str();
  return out;
}

Outcome band() {
  Outcome out;
  std::ostringstream s;
  for (const std::string name : {"CANTOR-I", "ASYM-I"}) {
    const auto cs = load_config(name).system;
    const auto& base = antichain_rows(name, 8);
    const auto rows = coefficient_table(cs, 1, 8, QuantizeMethod::Lloyd);
    double worst = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& row = rows[k];
      const double ratio = row.coef_upper / row.coef_lower;
      worst = std::max(worst, ratio);
      const std::string at = name + " j=" + std::to_string(row.j);
      out.require(std::isfinite(row.coef_upper) && row.coef_lower > 0, at + ": band not finite");
      out.require(ratio <= 50, at + ": coef_upper/coef_lower = " + fmt(ratio));
      out.require(row.coef_upper <= base[k].coef_upper, at + ": lloyd raised coef_upper");
    }
    if (rows.front().n <= 4) {
      const auto oracle = coefficient_table(cs, 1, 1, QuantizeMethod::Oracle);
      out.require(oracle.front().coef_lower <= oracle.front().coef_upper, name + ": oracle band inverted");
    }
    s << name << " max ratio=" << fmt(worst) << "; ";
  }
  out.summary = s.str();
  return out;
}

Codebook random_codebook(const CondensationSystem& cs, std::mt19937_64& rng) {
  const Box box = cs.support_box();
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
  std::uniform_real_distribution<double> u(box.lo(0), box.hi(0));
  std::vector<Vec> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(make_vec({u(rng)}));
  return Codebook(pts);
}

Outcome evaluator() {
  Outcome out;
  std::mt19937_64 rng(20240601);
  std::size_t trials = 0;
  double worst_z = 0;
  for (const auto& [name, cs] : shipped()) {
    for (int k = 0; k < 20; ++k) {
      const auto book = random_codebook(cs, rng);
      const auto bracket = log_dist_integral(cs, book);
      const auto mc = monte_carlo_integral(cs, book, 40000, 1000 + static_cast<std::uint64_t>(k));
      const double excess = std::max(bracket.lower - mc.mid(), mc.mid() - bracket.upper);
      worst_z = std::max(worst_z, excess / mc.stderr_mc);
      const bool inside = mc.mid() >= bracket.lower - 3 * mc.stderr_mc && mc.mid() <= bracket.upper + 3 * mc.stderr_mc;
      std::string what = name + " codebook " + std::to_string(k) + ": MC " + fmt(mc.mid()) + " outside [" +
                         fmt(bracket.lower) + ", " + fmt(bracket.upper) + "] +- 3 x " + fmt(mc.stderr_mc);
      if (!inside) {
        const auto big = monte_carlo_integral(cs, book, 2000000, 77);
        what += "; 50x resample: " + fmt(big.mid()) + " +- " + fmt(big.stderr_mc);
      }
      out.require(inside, what);
      ++trials;
    }
  }
  double worst_gap = 0;
  for (const std::string name : {"CANTOR-I", "ASYM-I"}) {
    const auto cs = load_config(name).system;
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto oracle = oracle_optimal_1d(cs, n, cs.support_box().diameter() / 128);
      const auto lloyd = lloyd0(cs, n, quantile_codebook(cs, n));
      const double slack = oracle.grid_slack + (oracle.bracket.width() + lloyd.bracket.width()) / 2;
      const double gap = std::abs(oracle.bracket.mid() - lloyd.bracket.mid());
      worst_gap = std::max(worst_gap, gap - slack);
      out.require(gap <= slack, name + " n=" + std::to_string(n) + ": |oracle - lloyd| = " + fmt(gap) + " > " + fmt(slack));
    }
  }
  out.summary = std::to_string(trials) + " MC trials, worst excess " + fmt(worst_z) + " sigma; worst lloyd/oracle gap-slack " +
                fmt(worst_gap);
  return out;
}

Outcome ball() {
  Outcome out;
  const auto cs = load_config("CANTOR-II").system;
  const double eta = ball_mass_exponent(cs).eta1;
  const double expected = std::log(0.5) / std::log(0.1);
  out.require(std::abs(eta - expected) <= 1e-12, "eta1 = " + fmt(eta));
  std::vector<double> eps;
  for (int k = 3; k <= 12; ++k) eps.push_back(std::ldexp(1.0, -k));
  const auto fit = fit_ball_bound(cs, eps, 4);
  out.require(fit.holds, "sup exceeds lambda1 eps^eta1");
  out.summary = "eta1=" + format_double(eta, 15) + " lambda1=" + fmt(fit.lambda1);
  return out;
}

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(FQZ_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return "";
  std::string text;
  std::array<char, 4096> buf{};
  while (std::size_t k = fread(buf.data(), 1, buf.size(), pipe)) text.append(buf.data(), k);
  pclose(pipe);
  return text;
}

Outcome determinism() {
  Outcome out;
  const std::vector<std::string> commands{
      "quantize cantor-i --j-range 1..4 --method lloyd --no-cache",
      "quantize asym-i --j-range 1..3 --method oracle --no-cache --format jsonl",
      "quantize cantor-ii --j-range 1..2 --method antichain --no-cache",
      "diagnose asym-i --suite identity --antichains 5",
  };
  for (const auto& c : commands) {
    const auto a = run_cli(c);
    const auto b = run_cli(c);
    out.require(!a.empty(), "no output from: fqz " + c);
    out.require(a == b, "outputs differ: fqz " + c);
  }
  out.summary = std::to_string(commands.size()) + " commands run twice";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"identities", identities}, {"cardinality and depth bounds", bounds}, {"convergence rates", convergence},
      {"antichain codebook bounds", codebook_bounds}, {"coefficient band", band}, {"evaluator soundness", evaluator},
      {"ball mass", ball}, {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu: %s (%.1f s) %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), secs,
                o.summary.c_str());
    const std::size_t shown = std::min<std::size_t>(o.failures.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) std::printf("    %s\n", o.failures[i].c_str());
    if (o.failures.size() > shown) std::printf("    ... %zu more\n", o.failures.size() - shown);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
