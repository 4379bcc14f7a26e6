#include "fqz/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fqz {

Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// ---------------------------------------------------------------------------
// Box

bool Box::contains(const Box& other) const {
  return (other.lo.array() >= lo.array()).all() && (other.hi.array() <= hi.array()).all();
}

bool Box::contains(const Vec& x) const { return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all(); }

bool Box::interior_contains(const Box& other) const {
  return (other.lo.array() > lo.array()).all() && (other.hi.array() < hi.array()).all();
}

bool Box::interior_contains(const Vec& x) const { return (x.array() > lo.array()).all() && (x.array() < hi.array()).all(); }

double Box::distance(const Box& other) const {
  double sq = 0;
  for (int k = 0; k < dim(); ++k) {
    double gap = std::max({0.0, other.lo(k) - hi(k), lo(k) - other.hi(k)});
    sq += gap * gap;
  }
  return std::sqrt(sq);
}

double Box::distance(const Vec& x) const {
  double sq = 0;
  for (int k = 0; k < dim(); ++k) {
    double gap = std::max({0.0, x(k) - hi(k), lo(k) - x(k)});
    sq += gap * gap;
  }
  return std::sqrt(sq);
}

double Box::farthest(const Vec& x) const {
  double sq = 0;
  for (int k = 0; k < dim(); ++k) {
    double d = std::max(std::abs(x(k) - lo(k)), std::abs(x(k) - hi(k)));
    sq += d * d;
  }
  return std::sqrt(sq);
}

Box Box::hull(const Box& other) const { return Box{lo.cwiseMin(other.lo), hi.cwiseMax(other.hi)}; }

Box Box::padded(double amount) const {
  Box b = *this;
  b.lo.array() -= amount;
  b.hi.array() += amount;
  return b;
}

// ---------------------------------------------------------------------------
// Similitude

Similitude::Similitude(double ratio, Vec translation, std::optional<Mat> rotation)
    : ratio_(ratio), translation_(std::move(translation)) {
  const auto q = translation_.size();
  if (q < 1 || q > kMaxDim) throw std::invalid_argument("dimension must be in [1," + std::to_string(kMaxDim) + "]");
  if (!(ratio > 0) || !(ratio < 1)) throw std::invalid_argument("similitude ratio must lie in (0,1)");
  if (rotation) {
    if (rotation->rows() != q || rotation->cols() != q) throw std::invalid_argument("rotation has wrong shape");
    Mat defect = rotation->transpose() * *rotation - Mat::Identity(q, q);
    if (defect.cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("rotation is not orthogonal");
    rotation_ = *rotation;
  } else {
    rotation_ = Mat::Identity(q, q);
  }
}

Similitude Similitude::identity(int dim) {
  Similitude f;
  f.ratio_ = 1.0;
  f.rotation_ = Mat::Identity(dim, dim);
  f.translation_ = Vec::Zero(dim);
  return f;
}

Vec Similitude::apply_inverse(const Vec& y) const { return rotation_.transpose() * (y - translation_) / ratio_; }

Similitude Similitude::compose(const Similitude& inner) const {
  Similitude f;
  f.ratio_ = ratio_ * inner.ratio_;
  f.rotation_ = rotation_ * inner.rotation_;
  f.translation_ = apply(inner.translation_);
  return f;
}

Box Similitude::image(const Box& box) const {
  Vec c = apply(box.center());
  Vec half = ratio_ * (rotation_.cwiseAbs() * ((box.hi - box.lo) / 2));
  return Box{c - half, c + half};
}

Vec Similitude::fixed_point() const {
  if (!(ratio_ < 1)) throw std::domain_error("fixed point of a non-contractive map");
  const auto q = translation_.size();
  Mat a = Mat::Identity(q, q) - ratio_ * rotation_;
  return a.partialPivLu().solve(translation_);
}

Similitude Similitude::rescaled(double lambda) const {
  Similitude f = *this;
  f.translation_ = lambda * translation_;
  return f;
}

// ---------------------------------------------------------------------------
// SimilitudeSystem

namespace {

void check_probability_vector(const std::vector<Rational>& probs, const char* name) {
  Rational total(0);
  for (const auto& p : probs) {
    if (p <= 0) throw std::invalid_argument(std::string(name) + ": entries must be positive");
    total += p;
  }
  if (total != 1) throw std::invalid_argument(std::string(name) + ": entries must sum to 1 (got " + to_string(total) + ")");
}

std::vector<double> to_doubles(const std::vector<Rational>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(to_double(x));
  return out;
}

// Box of a ball about the origin mapped into itself by every map.
Box invariant_seed(const std::vector<Similitude>& maps, double extra_radius) {
  double radius = extra_radius;
  for (const auto& f : maps) radius = std::max(radius, f.translation().norm() / (1 - f.ratio()));
  radius = radius * (1 + 1e-9) + 1e-12;
  const int q = maps.front().dim();
  return Box{Vec::Constant(q, -radius), Vec::Constant(q, radius)};
}

Box intersect(const Box& a, const Box& b) { return Box{a.lo.cwiseMax(b.lo), a.hi.cwiseMin(b.hi)}; }

Box iterate_enclosure(const std::vector<Similitude>& maps, const std::optional<Box>& condensation) {
  double extra = 0;
  if (condensation) extra = std::max(condensation->lo.cwiseAbs().maxCoeff(), condensation->hi.cwiseAbs().maxCoeff()) *
                            std::sqrt(static_cast<double>(condensation->dim()));
  const Box seed = invariant_seed(maps, extra);
  Box box = seed;
  for (int iter = 0; iter < 200; ++iter) {
    Box next = maps.front().image(box);
    for (std::size_t i = 1; i < maps.size(); ++i) next = next.hull(maps[i].image(box));
    if (condensation) next = next.hull(*condensation);
    box = intersect(next, seed);
  }
  return box.padded(1e-12 * (1 + box.diameter()));
}

}  // namespace

SimilitudeSystem::SimilitudeSystem(std::vector<Similitude> maps, std::vector<Rational> exact_ratios,
                                   std::vector<Rational> exact_probabilities, std::optional<Box> witness)
    : maps_(std::move(maps)),
      exact_ratios_(std::move(exact_ratios)),
      exact_probs_(std::move(exact_probabilities)),
      witness_(std::move(witness)) {
  if (maps_.empty()) throw std::invalid_argument("system needs at least one map");
  if (maps_.size() > 255) throw std::invalid_argument("at most 255 maps");
  if (exact_ratios_.size() != maps_.size() || exact_probs_.size() != maps_.size())
    throw std::invalid_argument("ratios/probabilities must match the number of maps");
  check_probability_vector(exact_probs_, "probabilities");
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    if (maps_[i].dim() != maps_.front().dim()) throw std::invalid_argument("maps have different dimensions");
    if (std::abs(to_double(exact_ratios_[i]) - maps_[i].ratio()) > 1e-15)
      throw std::invalid_argument("exact ratio does not match map ratio");
  }
  ratios_ = to_doubles(exact_ratios_);
  probs_ = to_doubles(exact_probs_);
  if (witness_ && witness_->dim() != dim()) throw std::invalid_argument("witness box has wrong dimension");
}

Similitude SimilitudeSystem::compose(const Word& sigma) const {
  if (sigma.alphabet() != size()) throw std::invalid_argument("word alphabet does not match the system");
  Similitude f = Similitude::identity(dim());
  for (auto s : sigma.symbols()) f = f.compose(maps_[s - 1u]);
  return f;
}

std::vector<Vec> SimilitudeSystem::attractor_points(int depth, std::optional<Vec> anchor) const {
  if (depth < 0) throw std::invalid_argument("depth must be ≥ 0");
  Vec a = anchor ? *anchor : maps_.front().fixed_point();
  std::vector<Vec> out;
  for (const auto& w : all_words(size(), depth)) out.push_back(compose(w).apply(a));
  return out;
}

Box SimilitudeSystem::attractor_box() const { return iterate_enclosure(maps_, std::nullopt); }

double SimilitudeSystem::similarity_dimension() const {
  auto moran = [&](double d) {
    double total = 0;
    for (double r : ratios_) total += std::pow(r, d);
    return total - 1;
  };
  double lo = 0, hi = 1;
  while (moran(hi) > 0) hi *= 2;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    double mid = (lo + hi) / 2;
    (moran(mid) > 0 ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

SimilitudeSystem SimilitudeSystem::rescaled(double lambda) const {
  std::vector<Similitude> maps;
  for (const auto& f : maps_) maps.push_back(f.rescaled(lambda));
  std::optional<Box> witness;
  if (witness_) witness = Box{lambda * witness_->lo, lambda * witness_->hi};
  return SimilitudeSystem(std::move(maps), exact_ratios_, exact_probs_, witness);
}

// ---------------------------------------------------------------------------
// CondensationSystem

std::string to_string(CaseTag tag) { return tag == CaseTag::CaseI ? "I" : "II"; }

namespace {

std::vector<Rational> normalized_outer(const std::vector<Rational>& p) {
  Rational rest = 1 - p.front();
  std::vector<Rational> out;
  for (std::size_t i = 1; i < p.size(); ++i) out.push_back(p[i] / rest);
  return out;
}

}  // namespace

CondensationSystem::CondensationSystem(std::vector<Similitude> maps, std::vector<Rational> ratios, std::vector<Rational> p,
                                       std::vector<Rational> t, std::optional<Box> witness)
    : tag_(CaseTag::CaseI), exact_p_(std::move(p)) {
  if (exact_p_.size() != maps.size() + 1) throw std::invalid_argument("p: expected N+1 entries (p0..pN)");
  check_probability_vector(exact_p_, "p");
  if (t.size() != maps.size()) throw std::invalid_argument("t: Case I needs one weight per outer map");
  outer_ = SimilitudeSystem(maps, ratios, normalized_outer(exact_p_), witness);
  inner_ = SimilitudeSystem(std::move(maps), std::move(ratios), std::move(t), std::move(witness));
  finish();
}

CondensationSystem::CondensationSystem(std::vector<Similitude> maps, std::vector<Rational> ratios, std::vector<Rational> p,
                                       SimilitudeSystem inner, std::optional<Box> witness)
    : tag_(CaseTag::CaseII), inner_(std::move(inner)), exact_p_(std::move(p)) {
  if (exact_p_.size() != maps.size() + 1) throw std::invalid_argument("p: expected N+1 entries (p0..pN)");
  check_probability_vector(exact_p_, "p");
  outer_ = SimilitudeSystem(std::move(maps), std::move(ratios), normalized_outer(exact_p_), std::move(witness));
  if (inner_.dim() != outer_.dim()) throw std::invalid_argument("inner and outer dimensions differ");
  finish();
}

void CondensationSystem::finish() {
  p_ = to_doubles(exact_p_);
  exact_p_outer_.assign(exact_p_.begin() + 1, exact_p_.end());
  p_outer_ = to_doubles(exact_p_outer_);
  c_box_ = inner_.attractor_box();
  if (tag_ == CaseTag::CaseI)
    k_box_ = c_box_;
  else
    k_box_ = iterate_enclosure(outer_.maps(), c_box_);
}

CondensationSystem CondensationSystem::rescaled(double lambda) const {
  std::vector<Similitude> maps;
  for (const auto& f : outer_.maps()) maps.push_back(f.rescaled(lambda));
  std::optional<Box> witness;
  if (outer_.witness()) witness = Box{lambda * outer_.witness()->lo, lambda * outer_.witness()->hi};
  if (tag_ == CaseTag::CaseI) return CondensationSystem(maps, outer_.exact_ratios(), exact_p_, exact_t(), witness);
  return CondensationSystem(maps, outer_.exact_ratios(), exact_p_, inner_.rescaled(lambda), witness);
}

double u0(const CondensationSystem& cs) {
  double total = 0;
  for (double t : cs.t()) total += t * std::log(t);
  return total;
}

double l0(const CondensationSystem& cs) {
  double total = 0;
  for (int i = 0; i < cs.inner_size(); ++i) total += cs.t()[i] * std::log(cs.c()[i]);
  return total;
}

double dimension_d0(const CondensationSystem& cs) { return u0(cs) / l0(cs); }

double dimension_kr(const std::vector<double>& q, const std::vector<double>& s, double r) {
  if (q.size() != s.size() || q.empty()) throw std::invalid_argument("weights and ratios must have equal length");
  if (r < 0) throw std::invalid_argument("r must be ≥ 0");
  if (r == 0) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      num += q[i] * std::log(q[i]);
      den += q[i] * std::log(s[i]);
    }
    return num / den;
  }
  // Σ (q_i s_i^r)^x is decreasing in x, equals N at x = 0 and Σ q_i s_i^r < 1 at x = 1.
  auto excess = [&](double x) {
    double total = 0;
    for (std::size_t i = 0; i < q.size(); ++i) total += std::pow(q[i] * std::pow(s[i], r), x);
    return total - 1;
  };
  double lo = 0, hi = 1;
  for (int step = 0; step < 200; ++step) {
    double mid = (lo + hi) / 2;
    double e = excess(mid);
    if (std::abs(e) <= 1e-12 && step > 0) return mid / (1 - mid) * r;
    (e > 0 ? lo : hi) = mid;
  }
  double x = (lo + hi) / 2;
  if (std::abs(excess(x)) > 1e-12) throw std::runtime_error("k_r bisection did not converge");
  return x / (1 - x) * r;
}

// ---------------------------------------------------------------------------
// Separation checks

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Unverified: return "UNVERIFIED";
  }
  return "?";
}

bool ValidationReport::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const auto& c) { return c.status == CheckStatus::Fail; });
}

namespace {

bool interiors_disjoint(const Box& a, const Box& b) {
  for (int k = 0; k < a.dim(); ++k)
    if (a.hi(k) <= b.lo(k) || b.hi(k) <= a.lo(k)) return true;
  return false;
}

std::string box_str(const Box& b) {
  std::ostringstream os;
  os.precision(6);
  os << "[";
  for (int k = 0; k < b.dim(); ++k) os << (k ? "," : "") << b.lo(k);
  os << "]..[";
  for (int k = 0; k < b.dim(); ++k) os << (k ? "," : "") << b.hi(k);
  os << "]";
  return os.str();
}

void add_osc_checks(const std::vector<Similitude>& maps, const Box& u, ValidationReport& report) {
  bool inside = true;
  std::string detail;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    Box img = maps[i].image(u);
    if (!u.contains(img)) {
      inside = false;
      detail += "f" + std::to_string(i + 1) + "(U)=" + box_str(img) + " escapes U; ";
    }
  }
  report.checks.push_back({"(1) f_i(U) ⊂ U", inside ? CheckStatus::Pass : CheckStatus::Fail, detail});
  bool disjoint = true;
  detail.clear();
  for (std::size_t i = 0; i < maps.size(); ++i)
    for (std::size_t j = i + 1; j < maps.size(); ++j)
      if (!interiors_disjoint(maps[i].image(u), maps[j].image(u))) {
        disjoint = false;
        detail += "f" + std::to_string(i + 1) + "(U) ∩ f" + std::to_string(j + 1) + "(U) ≠ ∅; ";
      }
  report.checks.push_back({"(2) f_i(U) pairwise disjoint", disjoint ? CheckStatus::Pass : CheckStatus::Fail, detail});
}

}  // namespace

ValidationReport validate_osc(const SimilitudeSystem& system) {
  ValidationReport report{"OSC", {}};
  if (!system.witness()) {
    report.checks.push_back({"witness", CheckStatus::Unverified, "no witness box configured"});
    return report;
  }
  add_osc_checks(system.maps(), *system.witness(), report);
  return report;
}

ValidationReport validate_iosc(const CondensationSystem& cs) {
  ValidationReport report{"IOSC", {}};
  if (cs.case_tag() != CaseTag::CaseII) {
    report.checks.push_back({"case", CheckStatus::Unverified, "IOSC applies to Case II systems only"});
    return report;
  }
  const auto& witness = cs.outer().witness();
  if (!witness) {
    report.checks.push_back({"witness", CheckStatus::Unverified, "no witness box configured"});
    return report;
  }
  const Box& u = *witness;
  add_osc_checks(cs.outer().maps(), u, report);

  const Box& c = cs.inner_box();
  bool c_inside = u.interior_contains(c);
  report.checks.push_back({"(3) C ⊂ U", c_inside ? CheckStatus::Pass : CheckStatus::Fail, "C ⊆ " + box_str(c)});
  auto sample = cs.outer().attractor_points(std::min(6, std::max(1, 12 / cs.outer_size())));
  bool hits = std::any_of(sample.begin(), sample.end(), [&](const Vec& x) { return u.interior_contains(x); });
  report.checks.push_back({"(3) E ∩ U ≠ ∅", hits ? CheckStatus::Pass : CheckStatus::Fail,
                           std::to_string(sample.size()) + " attractor samples"});
  if (c_inside)
    report.checks.push_back({"(4) ν(∂U) = 0", CheckStatus::Pass, "C-enclosure lies in the interior of U"});
  else
    report.checks.push_back({"(4) ν(∂U) = 0", CheckStatus::Unverified, "declared, not verified"});
  bool separated = true;
  std::string detail;
  for (int i = 1; i <= cs.outer_size(); ++i) {
    double gap = c.distance(cs.outer().map(i).image(u));
    if (!(gap > 0)) {
      separated = false;
      detail += "C meets f" + std::to_string(i) + "(cl U); ";
    }
  }
  report.checks.push_back({"(4) C ∩ f_i(cl U) = ∅", separated ? CheckStatus::Pass : CheckStatus::Fail, detail});
  return report;
}

}  // namespace fqz
