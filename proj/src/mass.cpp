#include "fqz/mass.hpp"

#include "fqz/pieces.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fqz {

namespace {

void require_case(const CondensationSystem& cs, CaseTag tag, const char* what) {
  if (cs.case_tag() != tag) throw std::invalid_argument(std::string(what) + " requires a Case " + to_string(tag) + " system");
}

void require_exact_length(const Word& w) {
  if (w.size() > kExactWordLimit) throw std::length_error("exact masses are limited to words of length ≤ 64");
}

void require_alphabet(const Word& w, int n) {
  if (w.alphabet() != n) throw std::invalid_argument("word alphabet does not match the system");
}

double log_add(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

template <class T>
T mu1_generic(const std::vector<T>& p, const std::vector<T>& t, const T& p0, const Word& sigma) {
  T m1(0), ps(1);
  for (auto s : sigma.symbols()) {
    const auto i = static_cast<std::size_t>(s) - 1;
    m1 = m1 * t[i] + p0 * ps * t[i];
    ps *= p[i];
  }
  return m1;
}

}  // namespace

Rational mu1_exact(const CondensationSystem& cs, const Word& sigma) {
  require_case(cs, CaseTag::CaseI, "mu1");
  require_alphabet(sigma, cs.outer_size());
  require_exact_length(sigma);
  return mu1_generic(cs.exact_p(), cs.exact_t(), cs.exact_p0(), sigma);
}

double mu1(const CondensationSystem& cs, const Word& sigma) {
  require_case(cs, CaseTag::CaseI, "mu1");
  require_alphabet(sigma, cs.outer_size());
  return mu1_generic(cs.p(), cs.t(), cs.p0(), sigma);
}

Rational mass_case1_exact(const CondensationSystem& cs, const Word& sigma) {
  return mu1_exact(cs, sigma) + word_weight(cs.exact_p(), sigma);
}

double log_mass_case1(const CondensationSystem& cs, const Word& sigma) {
  require_case(cs, CaseTag::CaseI, "log_mass_case1");
  require_alphabet(sigma, cs.outer_size());
  // log μ⁽¹⁾ and log p_σ carried along the word.
  double log_m1 = -INFINITY, log_ps = 0;
  const double log_p0 = std::log(cs.p0());
  for (auto s : sigma.symbols()) {
    const auto i = static_cast<std::size_t>(s) - 1;
    const double log_t = std::log(cs.t()[i]);
    log_m1 = log_add(log_m1, log_p0 + log_ps) + log_t;
    log_ps += std::log(cs.p()[i]);
  }
  return log_add(log_m1, log_ps);
}

Rational mass_case2_exact(const CondensationSystem& cs, const Word& sigma, const std::optional<Word>& omega) {
  require_case(cs, CaseTag::CaseII, "mass_case2");
  require_alphabet(sigma, cs.outer_size());
  require_exact_length(sigma);
  Rational m = word_weight(cs.exact_p(), sigma);
  if (omega) {
    require_alphabet(*omega, cs.inner_size());
    require_exact_length(*omega);
    m *= cs.exact_p0() * word_weight(cs.exact_t(), *omega);
  }
  return m;
}

double log_mass_case2(const CondensationSystem& cs, const Word& sigma, const std::optional<Word>& omega) {
  require_case(cs, CaseTag::CaseII, "mass_case2");
  require_alphabet(sigma, cs.outer_size());
  double m = 0;
  for (auto s : sigma.symbols()) m += std::log(cs.p()[s - 1u]);
  if (omega) {
    require_alphabet(*omega, cs.inner_size());
    m += std::log(cs.p0());
    for (auto s : omega->symbols()) m += std::log(cs.t()[s - 1u]);
  }
  return m;
}

Rational antichain_mass_case1(const CondensationSystem& cs, const Antichain& a) {
  Rational total(0);
  for (const auto& w : a.members()) total += mass_case1_exact(cs, w);
  return total;
}

namespace {

bool enumerable(int n, int h) {
  double count = std::pow(static_cast<double>(n), h);
  return count <= static_cast<double>(kEnumerationLimit);
}

}  // namespace

ExactIdentity gamma_sum_mu1(const CondensationSystem& cs, const Word& sigma, int h) {
  require_case(cs, CaseTag::CaseI, "gamma_sum_mu1");
  if (h < 1) throw std::invalid_argument("h must be ≥ 1");
  const Rational& p0 = cs.exact_p0();
  const Rational ps = word_weight(cs.exact_p(), sigma);
  ExactIdentity out{mu1_exact(cs, sigma) + ps * (1 - p0) * (1 - pow(1 - p0, h - 1)) + p0 * ps, std::nullopt};
  if (enumerable(cs.outer_size(), h)) {
    Rational total(0);
    for (const auto& w : descendants(sigma, h)) total += mu1_exact(cs, w);
    out.enumerated = total;
  }
  return out;
}

namespace {

double delta_generic(const CondensationSystem& cs, const Word& sigma, int h, int which) {
  require_case(cs, CaseTag::CaseI, "delta");
  if (h < 1) throw std::invalid_argument("h must be ≥ 1");
  const double p0 = cs.p0();
  const double q = 1 - p0;
  const double m1 = mu1(cs, sigma);
  const double ps = word_weight(cs.p(), sigma);
  const auto& logs_of = which == 1 ? cs.t() : cs.s();
  const double k0 = which == 1 ? u0(cs) : l0(cs);
  double log_w = 0;
  for (auto s : sigma.symbols()) log_w += std::log(logs_of[s - 1u]);
  double p_log = 0;
  for (std::size_t i = 0; i < cs.p().size(); ++i) p_log += cs.p()[i] * std::log(logs_of[i]);

  double sum_a = 0, sum_b = 0;
  for (int l = 2; l <= h; ++l) {
    sum_a += m1 + ps * q * (1 - std::pow(q, l - 2)) + p0 * ps;
    sum_b += (l - 1) * std::pow(q, l - 2);
  }
  const double tail = q * (1 - std::pow(q, h - 1));
  return k0 * sum_a + k0 * (m1 + p0 * ps) + ps * log_w * tail + p0 * ps * log_w + p0 * ps * sum_b * p_log +
         k0 * ps * tail;
}

}  // namespace

double delta1(const CondensationSystem& cs, const Word& sigma, int h) { return delta_generic(cs, sigma, h, 1); }
double delta2(const CondensationSystem& cs, const Word& sigma, int h) { return delta_generic(cs, sigma, h, 2); }

bool HereditaryIdentity::agree(double tol) const {
  if (!enumerated) return true;
  return std::abs(*enumerated - closed_form()) <= tol * std::max(1.0, std::abs(*enumerated));
}

HereditaryIdentity hereditary_identity(const CondensationSystem& cs, const Word& sigma, int h, int which) {
  if (which != 1 && which != 2) throw std::invalid_argument("which must be 1 or 2");
  const auto& logs_of = which == 1 ? cs.t() : cs.s();
  auto log_weight = [&](const Word& w) {
    double total = 0;
    for (auto s : w.symbols()) total += std::log(logs_of[s - 1u]);
    return total;
  };
  HereditaryIdentity out{mu1(cs, sigma) * log_weight(sigma), delta_generic(cs, sigma, h, which), std::nullopt};
  if (enumerable(cs.outer_size(), h)) {
    double total = 0;
    for (const auto& w : descendants(sigma, h)) total += mu1(cs, w) * log_weight(w);
    out.enumerated = total;
  }
  return out;
}

BallExponent ball_mass_exponent(const CondensationSystem& cs) {
  const auto& s = cs.s();
  const auto& t = cs.t();
  const auto& p = cs.p();
  double s_min = *std::min_element(s.begin(), s.end());
  if (cs.case_tag() == CaseTag::CaseII) {
    const double d3 = std::min(s_min, *std::min_element(cs.c().begin(), cs.c().end()));
    const double d4 = std::max(*std::max_element(t.begin(), t.end()), *std::max_element(p.begin(), p.end()));
    return {std::log(d4) / std::log(d3), d3, d4};
  }
  double d4 = 0;
  for (std::size_t i = 0; i < p.size(); ++i) d4 = std::max({d4, t[i], p[i] + cs.p0() * t[i]});
  return {std::log(d4) / std::log(s_min), s_min, d4};
}

double empirical_ball_sup(const CondensationSystem& cs, double eps, int resolution) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  if (resolution < 4) throw std::invalid_argument("grid too coarse: piece diameter must be ≤ eps/4");
  PieceFactory factory(cs);
  const double target = eps / resolution;
  auto pieces = partition(factory, factory.root_mu(), [&](const Piece& pc) { return pc.box.diameter() > target; });

  if (cs.dim() == 1) {
    std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.box.lo(0) < b.box.lo(0); });
    std::vector<double> centres;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      centres.push_back(pieces[i].box.center()(0));
      if (i + 1 < pieces.size()) centres.push_back((pieces[i].box.hi(0) + pieces[i + 1].box.lo(0)) / 2);
    }
    std::sort(centres.begin(), centres.end());
    // Sliding window over pieces sorted by left end; box widths are ≤ target.
    double best = 0;
    std::size_t lo = 0;
    double window = 0;
    std::size_t hi = 0;
    for (double x : centres) {
      const double a = x - eps, b = x + eps;
      while (hi < pieces.size() && pieces[hi].box.lo(0) <= b) window += pieces[hi++].mass();
      while (lo < hi && pieces[lo].box.hi(0) < a) window -= pieces[lo++].mass();
      best = std::max(best, window);
    }
    return std::min(best, 1.0);
  }
  double best = 0;
  for (const auto& centre : pieces) {
    const Vec x = centre.box.center();
    double m = 0;
    for (const auto& pc : pieces)
      if (pc.box.distance(x) <= eps) m += pc.mass();
    best = std::max(best, m);
  }
  return std::min(best, 1.0);
}

BallFit fit_ball_bound(const CondensationSystem& cs, const std::vector<double>& eps, std::size_t fit_count, int resolution) {
  if (eps.empty() || fit_count == 0 || fit_count > eps.size()) throw std::invalid_argument("invalid ball-fit schedule");
  BallFit fit{ball_mass_exponent(cs).eta1, 0.0, eps, {}, true};
  for (double e : eps) fit.sup.push_back(empirical_ball_sup(cs, e, resolution));
  for (std::size_t k = 0; k < fit_count; ++k) fit.lambda1 = std::max(fit.lambda1, fit.sup[k] / std::pow(eps[k], fit.eta1));
  for (std::size_t k = 0; k < eps.size(); ++k)
    if (fit.sup[k] > fit.lambda1 * std::pow(eps[k], fit.eta1) * (1 + 1e-12)) fit.holds = false;
  return fit;
}

}  // namespace fqz
