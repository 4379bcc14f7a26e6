#include "fqz/suites.hpp"

#include "fqz/asymptotics.hpp"
#include "fqz/mass.hpp"
#include "fqz/symbolic.hpp"

#include <cmath>
#include <stdexcept>

namespace fqz {

namespace {

CheckRow row(std::string check, std::string subject, int j, bool pass, double slack, std::string detail = {}) {
  return CheckRow{std::move(check), std::move(subject), j, pass, slack, std::move(detail)};
}

std::vector<Word> short_words(int alphabet, int max_length) {
  std::vector<Word> out;
  for (int len = 0; len <= max_length; ++len)
    for (auto& w : all_words(alphabet, len)) out.push_back(std::move(w));
  return out;
}

std::string label(const Word& w) { return w.empty() ? "θ" : w.str(); }

// Short content tag so rows from different antichains are distinguishable.
std::string tag(const Antichain& a) {
  std::string text;
  for (const auto& m : a.members()) text += m.str() + ",";
  return hex64(fnv1a(text)).substr(0, 8);
}

double exact_slack(bool ok, double gap) { return ok ? 0.0 : -std::abs(gap); }

Antichain random_antichain(int alphabet, std::uint64_t seed, int k) {
  return random_maximal_antichain(alphabet, seed * 1000003ULL + static_cast<std::uint64_t>(k), 1 + k % 40, 8);
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"mass", "antichain", "identity", "convergence", "ball"};
  return names;
}

std::vector<CheckRow> mass_suite(const CondensationSystem& cs, const SuiteOptions& options) {
  std::vector<CheckRow> rows;
  const int N = cs.outer_size();
  for (int k = 0; k < options.antichains; ++k) {
    const Antichain a = random_antichain(N, options.seed, k);
    Rational total(0);
    if (cs.case_tag() == CaseTag::CaseI) {
      total = antichain_mass_case1(cs, a);
    } else {
      for (const auto& sigma : a.members()) total += mass_case2_exact(cs, sigma);
      for (const auto& tau : proper_prefixes(a)) total += cs.exact_p0() * word_weight(cs.exact_p(), tau);
    }
    rows.push_back(row("mass partition",
                       "antichain #" + std::to_string(k) + " (" + std::to_string(a.size()) + " words, " + tag(a) + ")", 0,
                       total == 1, exact_slack(total == 1, Rational(total - 1).get_d()), "sum=" + total.get_str()));
  }
  if (cs.case_tag() == CaseTag::CaseI) {
    for (const auto& sigma : short_words(N, options.max_word_length))
      for (int h = 1; h <= options.max_h; ++h) {
        const auto id = gamma_sum_mu1(cs, sigma, h);
        rows.push_back(row("mu1 descendant sum", label(sigma) + " h=" + std::to_string(h), 0, id.agree(),
                           id.enumerated ? exact_slack(id.agree(), Rational(*id.enumerated - id.closed_form).get_d()) : 0.0,
                           "closed=" + id.closed_form.get_str()));
      }
  }
  return rows;
}

std::vector<CheckRow> antichain_suite(const CondensationSystem& cs, const SuiteOptions& options) {
  std::vector<CheckRow> rows;
  LevelFamily current = level_family(cs, 1);
  for (int j = 1; j <= options.jmax; ++j) {
    LevelFamily next = level_family(cs, j + 1);
    for (const auto& c : check_count_bounds(cs, current, &next))
      rows.push_back(row(c.name, cs.case_tag() == CaseTag::CaseI ? "Lambda_j" : "Gamma_j", j, c.holds, c.holds ? 0.0 : -1.0,
                         c.detail));
    current = std::move(next);
  }
  return rows;
}

std::vector<CheckRow> identity_suite(const CondensationSystem& cs, const SuiteOptions& options) {
  std::vector<CheckRow> rows;
  if (cs.case_tag() == CaseTag::CaseI) {
    for (const auto& sigma : short_words(cs.outer_size(), options.max_word_length))
      for (int h = 1; h <= options.max_h; ++h)
        for (int which : {1, 2}) {
          const auto id = hereditary_identity(cs, sigma, h, which);
          const double err = id.enumerated ? std::abs(*id.enumerated - id.closed_form()) : 0.0;
          rows.push_back(row(which == 1 ? "Delta1 closed form" : "Delta2 closed form",
                             label(sigma) + " h=" + std::to_string(h), 0, id.agree(1e-10),
                             1e-10 * std::max(1.0, std::abs(id.enumerated.value_or(0.0))) - err,
                             "closed=" + format_double(id.closed_form(), 15)));
        }
  }
  for (int k = 0; k < options.antichains; ++k) {
    const Antichain a = random_antichain(cs.inner_size(), options.seed + 7, k);
    const auto id = antichain_log_identity(cs.t(), cs.c(), a);
    const double err = std::abs(id.lhs - id.rhs);
    const double tol = 1e-10 * std::max(1.0, std::abs(id.lhs));
    rows.push_back(row("antichain log identity", "antichain #" + std::to_string(k), 0, err <= tol, tol - err,
                       "lhs=" + format_double(id.lhs, 15) + " rhs=" + format_double(id.rhs, 15)));
  }
  return rows;
}

std::vector<CheckRow> convergence_suite(const CondensationSystem& cs, const SuiteOptions& options) {
  std::vector<CheckRow> rows;
  const std::vector<std::string> kinds =
      cs.case_tag() == CaseTag::CaseI ? std::vector<std::string>{"d", "eta"} : std::vector<std::string>{"xi"};
  for (const auto& kind : kinds) {
    const auto report = convergence_report(cs, kind, options.jmax);
    for (const auto& r : report.rows)
      rows.push_back(row(kind + " scaled deviation", "count=" + r.count.get_str(), r.j, true, 0.0,
                         "value=" + format_double(r.value, 15) + " j*dev=" + format_double(r.scaled, 8)));
    const double limit = 1.2 * report.first_half_max;
    rows.push_back(row(kind + " stabilization", "jmax=" + std::to_string(options.jmax), options.jmax, report.pass,
                       report.identically_zero ? 0.0 : limit - report.second_half_max,
                       report.identically_zero ? "identically zero"
                                               : "first_half_max=" + format_double(report.first_half_max, 8) +
                                                     " second_half_max=" + format_double(report.second_half_max, 8)));
  }
  return rows;
}

std::vector<CheckRow> ball_suite(const CondensationSystem& cs, const SuiteOptions&) {
  std::vector<CheckRow> rows;
  const auto be = ball_mass_exponent(cs);
  rows.push_back(row("eta1", cs.case_tag() == CaseTag::CaseII ? "log(delta4)/log(delta3)" : "one-step recursion", 0,
                     be.eta1 > 0, be.eta1, "eta1=" + format_double(be.eta1, 15) + " delta3=" + format_double(be.delta3, 15) +
                                               " delta4=" + format_double(be.delta4, 15)));
  std::vector<double> eps;
  for (int k = 3; k <= 12; ++k) eps.push_back(std::ldexp(1.0, -k));
  const auto fit = fit_ball_bound(cs, eps, 4);
  for (std::size_t i = 0; i < fit.eps.size(); ++i) {
    const double bound = fit.lambda1 * std::pow(fit.eps[i], fit.eta1);
    rows.push_back(row("ball mass", "eps=2^-" + std::to_string(i + 3), 0, fit.sup[i] <= bound, bound - fit.sup[i],
                       "sup=" + format_double(fit.sup[i], 10) + " bound=" + format_double(bound, 10) +
                           " lambda1=" + format_double(fit.lambda1, 10)));
  }
  return rows;
}

std::vector<CheckRow> run_suite(const CondensationSystem& cs, const std::string& suite, const SuiteOptions& options) {
  if (suite == "mass") return mass_suite(cs, options);
  if (suite == "antichain") return antichain_suite(cs, options);
  if (suite == "identity") return identity_suite(cs, options);
  if (suite == "convergence") return convergence_suite(cs, options);
  if (suite == "ball") return ball_suite(cs, options);
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

Table check_table(const std::vector<CheckRow>& rows) {
  Table t{{"check", "subject", "j", "status", "slack", "detail"}, {}, {"check", "subject", "detail"}};
  for (const auto& r : rows)
    t.add({r.check, r.subject, std::to_string(r.j), r.pass ? "PASS" : "FAIL", format_double(r.slack, 6), r.detail});
  return t;
}

bool all_pass(const std::vector<CheckRow>& rows) {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

}  // namespace fqz
