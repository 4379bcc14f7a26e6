#include "fqz/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace fqz {

namespace {

Rational min_of(const std::vector<Rational>& xs) { return *std::min_element(xs.begin(), xs.end()); }
Rational max_of(const std::vector<Rational>& xs) { return *std::max_element(xs.begin(), xs.end()); }

std::vector<double> logs(const std::vector<double>& xs) {
  std::vector<double> out;
  for (double x : xs) out.push_back(std::log(x));
  return out;
}

Rational q_low(const CondensationSystem& cs) { return std::min(min_of(cs.exact_p()), min_of(cs.exact_t())); }

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

// Parent counts of a member class (the counts of σ⁻).
std::vector<int> parent_counts(const CountClass& cls) {
  auto counts = cls.counts;
  if (cls.last > 0) --counts[static_cast<std::size_t>(cls.last - 1)];
  return counts;
}

// Σ over a class of a per-word quantity that depends only on counts, scaled by a coefficient vector.
struct LogLinear {
  Rational weight{0};
  std::vector<Rational> outer;
  std::vector<Rational> inner;

  LogLinear(std::size_t n, std::size_t m) : outer(n), inner(m) {}
  void add(const Rational& mass, std::span<const int> outer_counts, std::span<const int> inner_counts = {}) {
    weight += mass;
    for (std::size_t i = 0; i < outer_counts.size(); ++i)
      if (outer_counts[i]) outer[i] += mass * outer_counts[i];
    for (std::size_t i = 0; i < inner_counts.size(); ++i)
      if (inner_counts[i]) inner[i] += mass * inner_counts[i];
  }
  double eval(double log_const, const std::vector<double>& outer_logs, const std::vector<double>& inner_logs = {}) const {
    double total = weight == 0 ? 0.0 : to_double(weight) * log_const;
    for (std::size_t i = 0; i < outer.size(); ++i) total += to_double(outer[i]) * outer_logs[i];
    for (std::size_t i = 0; i < inner.size(); ++i) total += to_double(inner[i]) * inner_logs[i];
    return total;
  }
};

// Case I: (Σ μ⁽¹⁾, Σ p) over the words of each member class of `profile`.
std::vector<std::pair<Rational, Rational>> case1_member_masses(const CondensationSystem& cs, const ThresholdProfile& profile) {
  const auto& p = cs.exact_p();
  const auto& t = cs.exact_t();
  const Rational& p0 = cs.exact_p0();
  std::map<std::vector<int>, std::pair<Rational, Rational>> table;  // counts → (A, mult·p(c))
  auto class_sums = [&](const std::vector<int>& counts, const mpz_class& mult) {
    Rational a(0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (!counts[i]) continue;
      auto par = counts;
      --par[i];
      const auto& [pa, pp] = table.at(par);
      a += t[i] * (pa + p0 * pp);
    }
    return std::pair<Rational, Rational>(a, Rational(Rational(mult) * class_weight(p, counts)));
  };
  for (const auto& cls : profile.interior) table.emplace(cls.counts, class_sums(cls.counts, cls.multiplicity));

  std::vector<std::pair<Rational, Rational>> out;
  for (const auto& cls : profile.members) {
    if (cls.last == 0) {
      out.push_back(class_sums(cls.counts, cls.multiplicity));
      continue;
    }
    const auto i = static_cast<std::size_t>(cls.last - 1);
    const auto& [pa, pp] = table.at(parent_counts(cls));
    out.emplace_back(t[i] * (pa + p0 * pp), pp * p[i]);
  }
  return out;
}

// Predicted cardinality of the family (upper bound) for the resource guard.
double predicted_count(const CondensationSystem& cs, int j) {
  if (cs.case_tag() == CaseTag::CaseI) return std::pow(to_double(min_of(cs.exact_t())), -(j + 1));
  const double q = to_double(q_low(cs));
  return (2 - cs.p0()) / (cs.p0() * q) * std::pow(q, -j);
}

}  // namespace

LevelFamily level_family(const CondensationSystem& cs, int j, std::size_t cap) {
  if (j < 1) throw std::invalid_argument("level families are defined for j ≥ 1");
  LevelFamily fam{cs.case_tag(), j, {}, {}, {}, {}, {}, {}, {}, 0, 0};
  try {
    if (cs.case_tag() == CaseTag::CaseI) {
      fam.base = min_of(cs.exact_t());
      fam.threshold = pow(fam.base, j);
      fam.outer = threshold_profile(WeightThreshold(cs.exact_t(), fam.threshold), cap);
      fam.count = fam.outer.cardinality;
    } else {
      fam.base = q_low(cs);
      fam.threshold = pow(fam.base, j);
      fam.outer = threshold_profile(WeightThreshold(cs.exact_p(), fam.threshold), cap);
      fam.psi = fam.outer.cardinality;
      fam.count = fam.psi;
      std::map<Rational, std::size_t> memo;
      for (const auto& cls : fam.outer.interior) {
        Rational eps = fam.threshold / class_weight(cs.exact_p(), cls.counts);
        auto it = memo.find(eps);
        if (it == memo.end()) {
          fam.inner.push_back(threshold_profile(WeightThreshold(cs.exact_t(), eps), cap));
          it = memo.emplace(eps, fam.inner.size() - 1).first;
        }
        fam.inner_index.push_back(it->second);
        fam.count += cls.multiplicity * fam.inner[it->second].cardinality;
      }
    }
  } catch (const std::length_error&) {
    throw std::length_error("level family j=" + std::to_string(j) + " exceeds the class cap (predicted cardinality ≤ " +
                            fmt(predicted_count(cs, j)) + ")");
  }
  fam.min_depth = fam.outer.min_length;
  fam.max_depth = fam.outer.max_length;
  return fam;
}

ExplicitFamily explicit_family(const CondensationSystem& cs, int j, std::size_t cap) {
  if (j < 1) throw std::invalid_argument("level families are defined for j ≥ 1");
  const double predicted = predicted_count(cs, j);
  if (predicted > static_cast<double>(cap))
    throw std::length_error("family j=" + std::to_string(j) + " has predicted cardinality up to " + fmt(predicted) +
                            ", above the cap " + std::to_string(cap));
  ExplicitFamily out;
  if (cs.case_tag() == CaseTag::CaseI) {
    out.members = threshold_antichain(cs.exact_t(), pow(min_of(cs.exact_t()), j), cap);
    out.count = out.members.size();
    return out;
  }
  const Rational threshold = pow(q_low(cs), j);
  out.members = threshold_antichain(cs.exact_p(), threshold, cap);
  out.psi = proper_prefixes(out.members);
  out.count = out.members.size();
  for (const auto& sigma : out.psi) {
    out.inner.push_back(threshold_antichain(cs.exact_t(), threshold / word_weight(cs.exact_p(), sigma), cap));
    out.count += out.inner.back().size();
    if (out.count > cap) throw std::length_error("family j=" + std::to_string(j) + " exceeds the cap " + std::to_string(cap));
  }
  return out;
}

double lambda_log_s_sum(const CondensationSystem& cs, const LevelFamily& family) {
  const auto masses = case1_member_masses(cs, family.outer);
  LogLinear acc(static_cast<std::size_t>(cs.outer_size()), 0);
  for (std::size_t k = 0; k < masses.size(); ++k)
    acc.add(masses[k].first + masses[k].second, family.outer.members[k].counts);
  return acc.eval(0.0, logs(cs.s()));
}

Rational lambda_mass_sum(const CondensationSystem& cs, const LevelFamily& family) {
  Rational total(0);
  for (const auto& [m1, ps] : case1_member_masses(cs, family.outer)) total += m1 + ps;
  return total;
}

Rational gamma_mass_closure(const CondensationSystem& cs, const LevelFamily& family) {
  Rational total(0);
  for (const auto& cls : family.outer.members) total += Rational(cls.multiplicity) * class_weight(cs.exact_p(), cls.counts);
  for (std::size_t a = 0; a < family.outer.interior.size(); ++a) {
    const auto& cls = family.outer.interior[a];
    Rational inner_mass(0);
    for (const auto& rho : family.inner_for(a).members) inner_mass += Rational(rho.multiplicity) * class_weight(cs.exact_t(), rho.counts);
    total += cs.exact_p0() * Rational(cls.multiplicity) * class_weight(cs.exact_p(), cls.counts) * inner_mass;
  }
  return total;
}

namespace {

Rational unit_weight_sum(const ThresholdProfile& profile) {
  Rational total(0);
  for (const auto& cls : profile.members) total += Rational(cls.multiplicity) / pow(Rational(profile.alphabet), cls.length());
  return total;
}

BoundCheck check(std::string name, int j, bool holds, std::string detail) {
  return BoundCheck{std::move(name), j, holds, std::move(detail)};
}

}  // namespace

std::vector<BoundCheck> check_count_bounds(const CondensationSystem& cs, const LevelFamily& fam, const LevelFamily* next) {
  std::vector<BoundCheck> out;
  const int j = fam.j;
  const Rational count(fam.count);
  const std::string count_str = fam.count.get_str();
  out.push_back(check("maximal antichain", j, unit_weight_sum(fam.outer) == 1, "Σ N^-|σ| over members"));
  if (cs.case_tag() == CaseTag::CaseI) {
    const Rational& tl = fam.base;
    const Rational th = max_of(cs.exact_t());
    out.push_back(check("phi lower (t^-j <= phi)", j, count * pow(tl, j) >= 1, "phi=" + count_str));
    out.push_back(check("phi upper (phi <= t^-(j+1))", j, count * pow(tl, j + 1) <= 1, "phi=" + count_str));
    const bool depth_order = j <= fam.min_depth && fam.min_depth <= fam.max_depth;
    out.push_back(check("depth (j <= k1 <= k2)", j, depth_order,
                        "k1=" + std::to_string(fam.min_depth) + " k2=" + std::to_string(fam.max_depth)));
    out.push_back(check("depth (k2 <= B1 j)", j, pow(th, fam.max_depth) >= pow(tl, 2 * j),
                        "B1 j=" + fmt(2 * j * std::log(to_double(tl)) / std::log(to_double(th)))));
    Rational p_sum(0);
    for (const auto& cls : fam.outer.members) p_sum += Rational(cls.multiplicity) * class_weight(cs.exact_p(), cls.counts);
    const Rational p_sum_rhs = pow(1 - cs.exact_p0(), fam.min_depth);
    out.push_back(check("sum p over Lambda <= (1-p0)^k1", j, p_sum <= p_sum_rhs,
                        "lhs=" + fmt(to_double(p_sum)) + " rhs=" + fmt(to_double(p_sum_rhs))));
    out.push_back(check("mass partition (sum mu(E) = 1)", j, lambda_mass_sum(cs, fam) == 1, "exact"));
    const double growth = std::abs(lambda_log_s_sum(cs, fam));
    const double s_high = *std::max_element(cs.s().begin(), cs.s().end());
    const double growth_rhs = cs.p0() * j * std::log(1 / s_high);
    out.push_back(check("|sum mu(E) log s| >= p0 j log(1/s_max)", j, growth >= growth_rhs * (1 - 1e-12),
                        "lhs=" + fmt(growth) + " rhs=" + fmt(growth_rhs)));
    if (next) {
      const Rational next_count(next->count);
      out.push_back(check("phi_j <= phi_j+1 <= t^-2 phi_j", j, count <= next_count && next_count * tl * tl <= count,
                          "phi_j+1=" + next->count.get_str()));
    }
    return out;
  }
  const Rational& q = fam.base;
  const Rational p0 = cs.exact_p0();
  Rational p_high = std::max(max_of(cs.exact_p()), max_of(cs.exact_t()));
  const bool depth_order = j <= fam.min_depth && fam.min_depth <= fam.max_depth;
  out.push_back(check("depth (j <= l1 <= l2)", j, depth_order,
                      "l1=" + std::to_string(fam.min_depth) + " l2=" + std::to_string(fam.max_depth)));
  out.push_back(check("depth (l2 <= 2 log q / log p_max j)", j, pow(p_high, fam.max_depth) >= pow(q, 2 * j),
                      "bound=" + fmt(2 * j * std::log(to_double(q)) / std::log(to_double(p_high)))));
  const Rational n1 = (2 - p0) / (p0 * q);
  const Rational n2 = n1 / (p0 * q);
  out.push_back(check("M lower (p0 q^-j <= M)", j, count * pow(q, j) >= p0, "M=" + count_str));
  out.push_back(check("M upper (M <= N1 q^-j)", j, count * pow(q, j) <= n1, "M=" + count_str + " N1=" + to_string(n1)));
  bool psi_ok = true;
  for (const auto& cls : fam.outer.interior)
    if (class_weight(cs.exact_p(), cls.counts) < fam.threshold) psi_ok = false;
  out.push_back(check("p_sigma >= q^j on Psi", j, psi_ok, std::to_string(fam.outer.interior.size()) + " classes"));
  const Rational closure = gamma_mass_closure(cs, fam);
  out.push_back(check("mass closure = 1", j, closure == 1, "exact"));
  out.push_back(check("p0 <= Q_j <= 2-p0", j, p0 <= closure && closure <= 2 - p0, "Q=" + to_string(closure)));
  if (next) {
    const Rational next_count(next->count);
    out.push_back(check("M_j <= M_j+1 <= N2 M_j", j, count <= next_count && next_count <= n2 * count,
                        "M_j+1=" + next->count.get_str() + " N2=" + to_string(n2)));
  }
  return out;
}

double relative_c_diameter(const CondensationSystem& cs) { return cs.inner_box().diameter() / cs.support_box().diameter(); }

RatioValue ratio_dk(const CondensationSystem& cs, int k) {
  if (cs.case_tag() != CaseTag::CaseI) throw std::invalid_argument("d_k is defined for Case I systems");
  if (k < 1) throw std::invalid_argument("k must be ≥ 1");
  const auto profile = level_profile(cs.outer_size(), k);
  const auto masses = case1_member_masses(cs, profile);
  LogLinear acc(static_cast<std::size_t>(cs.outer_size()), 0);
  for (std::size_t i = 0; i < masses.size(); ++i) acc.add(masses[i].first + masses[i].second, profile.members[i].counts);
  RatioValue r{"d", k, acc.eval(0.0, logs(cs.t())), acc.eval(0.0, logs(cs.s())), 0, {}, {}, 0, profile.cardinality, k, k};
  r.value = r.numerator / r.denominator;
  return r;
}

RatioValue ratio_eta(const CondensationSystem& cs, const LevelFamily& fam) {
  if (cs.case_tag() != CaseTag::CaseI) throw std::invalid_argument("eta_j is defined for Case I systems");
  const auto masses = case1_member_masses(cs, fam.outer);
  LogLinear acc(static_cast<std::size_t>(cs.outer_size()), 0);
  for (std::size_t i = 0; i < masses.size(); ++i) acc.add(masses[i].first + masses[i].second, fam.outer.members[i].counts);
  RatioValue r{"eta", fam.j, acc.eval(0.0, logs(cs.t())), acc.eval(0.0, logs(cs.s())), 0, {}, {}, 0, fam.count,
               fam.min_depth, fam.max_depth};
  r.value = r.numerator / r.denominator;
  return r;
}

RatioValue ratio_eta(const CondensationSystem& cs, int j) { return ratio_eta(cs, level_family(cs, j)); }

RatioValue ratio_xi(const CondensationSystem& cs, const LevelFamily& fam) {
  if (cs.case_tag() != CaseTag::CaseII) throw std::invalid_argument("xi_j is defined for Case II systems");
  const auto n = static_cast<std::size_t>(cs.outer_size());
  const auto m = static_cast<std::size_t>(cs.inner_size());
  LogLinear part1(n, m), part2(n, m), part3(n, 0);
  for (std::size_t a = 0; a < fam.outer.interior.size(); ++a) {
    const auto& sigma = fam.outer.interior[a];
    const Rational base = cs.exact_p0() * Rational(sigma.multiplicity) * class_weight(cs.exact_p(), sigma.counts);
    auto& acc = sigma.length() < fam.min_depth ? part1 : part2;
    for (const auto& rho : fam.inner_for(a).members)
      acc.add(base * Rational(rho.multiplicity) * class_weight(cs.exact_t(), rho.counts), sigma.counts, rho.counts);
  }
  for (const auto& cls : fam.outer.members) part3.add(Rational(cls.multiplicity) * class_weight(cs.exact_p(), cls.counts), cls.counts);

  const auto log_p = logs(cs.p()), log_t = logs(cs.t()), log_s = logs(cs.s()), log_c = logs(cs.c());
  const double c_diam = relative_c_diameter(cs);
  const double log_p0 = std::log(cs.p0()), log_cd = std::log(c_diam);
  RatioValue r{"xi", fam.j, 0, 0, 0, {}, {}, c_diam, fam.count, fam.min_depth, fam.max_depth};
  r.t_parts = {part1.eval(log_p0, log_p, log_t), part2.eval(log_p0, log_p, log_t), part3.eval(0.0, log_p)};
  r.r_parts = {part1.eval(log_cd, log_s, log_c), part2.eval(log_cd, log_s, log_c), part3.eval(0.0, log_s)};
  for (int i = 0; i < 3; ++i) {
    r.numerator += r.t_parts[static_cast<std::size_t>(i)];
    r.denominator += r.r_parts[static_cast<std::size_t>(i)];
  }
  r.value = r.numerator / r.denominator;
  return r;
}

RatioValue ratio_xi(const CondensationSystem& cs, int j) { return ratio_xi(cs, level_family(cs, j)); }

LogIdentity antichain_log_identity(const std::vector<double>& t, const std::vector<double>& c, const Antichain& gamma) {
  if (t.size() != c.size() || static_cast<int>(t.size()) != gamma.alphabet())
    throw std::invalid_argument("weights, ratios and antichain alphabet must agree");
  if (!gamma.is_maximal()) throw std::invalid_argument("antichain is not maximal");
  double u = 0, l = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    u += t[i] * std::log(t[i]);
    l += t[i] * std::log(c[i]);
  }
  double st = 0, sc = 0;
  for (const auto& rho : gamma.members()) {
    double w = 1, log_t = 0, log_c = 0;
    for (auto s : rho.symbols()) {
      w *= t[s - 1u];
      log_t += std::log(t[s - 1u]);
      log_c += std::log(c[s - 1u]);
    }
    st += w * log_t;
    sc += w * log_c;
  }
  return {l * st, u * sc};
}

ConvergenceReport convergence_report(const CondensationSystem& cs, const std::string& kind, int jmax) {
  if (jmax < 2) throw std::invalid_argument("jmax must be ≥ 2");
  ConvergenceReport rep{kind, dimension_d0(cs), {}};
  for (int j = 1; j <= jmax; ++j) {
    RatioValue v;
    if (kind == "d") v = ratio_dk(cs, j);
    else if (kind == "eta") v = ratio_eta(cs, j);
    else if (kind == "xi") v = ratio_xi(cs, j);
    else throw std::invalid_argument("unknown sequence kind " + kind);
    const double dev = std::abs(v.value - rep.d0);
    rep.rows.push_back(ConvergenceRow{j, v.count, v.min_depth, v.max_depth, v.value, dev, j * dev});
  }
  const int half = jmax / 2;
  rep.identically_zero = true;
  for (const auto& row : rep.rows) {
    if (row.deviation > 1e-12 * rep.d0) rep.identically_zero = false;
    if (row.j <= half) rep.first_half_max = std::max(rep.first_half_max, row.scaled);
    if (row.j >= half) rep.second_half_max = std::max(rep.second_half_max, row.scaled);
  }
  rep.pass = rep.identically_zero || rep.second_half_max <= 1.2 * rep.first_half_max;
  return rep;
}

std::string convergence_csv_header() { return "kind,j,count,minDepth,maxDepth,value,deviation,scaledDeviation,pass\n"; }

std::string convergence_csv(const ConvergenceReport& rep) {
  std::ostringstream os;
  os << std::setprecision(12);
  for (const auto& row : rep.rows)
    os << rep.kind << ',' << row.j << ',' << row.count.get_str() << ',' << row.min_depth << ',' << row.max_depth << ','
       << row.value << ',' << row.deviation << ',' << row.scaled << ',' << (rep.pass ? "PASS" : "FAIL") << '\n';
  return os.str();
}

CoverFamily cover_family(const CondensationSystem& cs, const Rational& eps, std::size_t cap) {
  if (cs.case_tag() != CaseTag::CaseII) throw std::invalid_argument("cover families are defined for Case II systems");
  if (eps <= 0 || eps > 1) throw std::invalid_argument("eps must lie in (0,1]");
  CoverFamily out{eps, threshold_antichain(cs.exact_s(), eps, cap), {}, {}};
  out.psi = proper_prefixes(out.s_eps);
  for (const auto& sigma : out.psi)
    out.t_eps.push_back(threshold_antichain(cs.inner().exact_ratios(), eps / word_weight(cs.exact_s(), sigma), cap));
  return out;
}

std::vector<BoundCheck> check_cover_family(const CondensationSystem& cs, const CoverFamily& cover) {
  std::vector<BoundCheck> out;
  const auto& s = cs.exact_s();
  const auto& c = cs.inner().exact_ratios();
  const Rational s_low = min_of(s), c_low = min_of(c);
  bool s_ok = cover.s_eps.is_maximal();
  for (const auto& sigma : cover.s_eps.members()) {
    Rational w = word_weight(s, sigma);
    if (!(word_weight(s, sigma.parent()) >= cover.eps && cover.eps > w && w >= cover.eps * s_low)) s_ok = false;
  }
  out.push_back(check("S_eps members: s ∈ [eps s_min, eps)", 0, s_ok, std::to_string(cover.s_eps.size()) + " words"));
  bool t_ok = true;
  for (std::size_t k = 0; k < cover.psi.size(); ++k) {
    const Rational ss = word_weight(s, cover.psi[k]);
    if (ss < cover.eps || !cover.t_eps[k].is_maximal()) t_ok = false;
    for (const auto& rho : cover.t_eps[k].members()) {
      Rational w = ss * word_weight(c, rho);
      if (!(ss * word_weight(c, rho.parent()) >= cover.eps && cover.eps > w && w >= cover.eps * c_low)) t_ok = false;
    }
  }
  out.push_back(check("T_eps members: s c ∈ [eps c_min, eps)", 0, t_ok, std::to_string(cover.psi.size()) + " prefixes"));
  return out;
}

}  // namespace fqz
