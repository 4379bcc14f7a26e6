#include "fqz/quantizer.hpp"

#include "fqz/asymptotics.hpp"
#include "fqz/mass.hpp"
#include "fqz/pieces.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>
#include <tuple>

namespace fqz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Index-stable nearest-point queries; 1-D uses a sorted copy.
class Nearest {
 public:
  explicit Nearest(const Codebook& codebook) : points_(codebook.points()), one_d_(codebook.dim() == 1) {
    if (one_d_) {
      order_.resize(points_.size());
      std::iota(order_.begin(), order_.end(), std::size_t{0});
      std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return points_[a](0) < points_[b](0); });
      for (auto k : order_) xs_.push_back(points_[k](0));
    }
  }

  // Nearest point index; ties go to the lower index.
  std::size_t nearest(const Vec& x) const {
    if (one_d_) {
      const double v = x(0);
      auto it = std::lower_bound(xs_.begin(), xs_.end(), v);
      std::size_t best = points_.size();
      double best_d = kInf;
      auto consider = [&](std::size_t pos) {
        const double d = std::abs(xs_[pos] - v);
        const std::size_t idx = order_[pos];
        if (d < best_d || (d == best_d && idx < best)) best_d = d, best = idx;
      };
      const std::size_t pos = static_cast<std::size_t>(it - xs_.begin());
      // Equal coordinates are adjacent; scan the run on each side.
      for (std::size_t k = pos; k < xs_.size() && (k == pos || xs_[k] == xs_[pos]); ++k) consider(k);
      if (pos > 0) {
        const double left = xs_[pos - 1];
        for (std::size_t k = pos; k-- > 0 && xs_[k] == left;) consider(k);
      }
      return best;
    }
    std::size_t best = 0;
    double best_d = kInf;
    for (std::size_t k = 0; k < points_.size(); ++k) {
      const double d = (points_[k] - x).norm();
      if (d < best_d) best_d = d, best = k;
    }
    return best;
  }

  double distance(const Vec& x) const { return (points_[nearest(x)] - x).norm(); }

  // inf over the box of the distance to the codebook.
  double min_distance(const Box& box) const {
    if (one_d_) {
      const double lo = box.lo(0), hi = box.hi(0);
      auto it = std::lower_bound(xs_.begin(), xs_.end(), lo);
      double d = kInf;
      if (it != xs_.end()) d = std::max(0.0, *it - hi);
      if (it != xs_.begin()) d = std::min(d, lo - *(it - 1));
      return d;
    }
    double d = kInf;
    for (const auto& a : points_) d = std::min(d, box.distance(a));
    return d;
  }

  // An upper bound for sup over the box of the distance to the codebook
  // (exact in 1-D).
  double max_distance(const Box& box) const {
    if (one_d_) {
      const double lo = box.lo(0), hi = box.hi(0);
      auto dist = [&](double v) {
        auto it = std::lower_bound(xs_.begin(), xs_.end(), v);
        double d = kInf;
        if (it != xs_.end()) d = *it - v;
        if (it != xs_.begin()) d = std::min(d, v - *(it - 1));
        return d;
      };
      double best = std::max(dist(lo), dist(hi));
      auto first = std::lower_bound(xs_.begin(), xs_.end(), lo);
      auto last = std::upper_bound(xs_.begin(), xs_.end(), hi);
      std::size_t a = static_cast<std::size_t>(first - xs_.begin());
      std::size_t b = static_cast<std::size_t>(last - xs_.begin());
      if (a > 0) --a;
      for (std::size_t k = a; k + 1 < xs_.size() && k < b; ++k) {
        const double m = (xs_[k] + xs_[k + 1]) / 2;
        if (m > lo && m < hi) best = std::max(best, (xs_[k + 1] - xs_[k]) / 2);
      }
      return best;
    }
    double best = kInf;
    for (const auto& a : points_) best = std::min(best, box.farthest(a));
    return best;
  }

  // Number of points within distance w of the box.
  std::size_t count_within(const Box& box, double w) const {
    if (one_d_) {
      auto first = std::lower_bound(xs_.begin(), xs_.end(), box.lo(0) - w);
      auto last = std::upper_bound(xs_.begin(), xs_.end(), box.hi(0) + w);
      return static_cast<std::size_t>(last - first);
    }
    std::size_t k = 0;
    for (const auto& a : points_) k += box.distance(a) <= w ? 1 : 0;
    return k;
  }

 private:
  const std::vector<Vec>& points_;
  bool one_d_;
  std::vector<std::size_t> order_;
  std::vector<double> xs_;
};

struct Bound {
  double lower;
  double upper;
};

// Absolute rounding allowance for a box: a few ulps of its position.
double rounding_slack(const Box& box) {
  return 8 * std::numeric_limits<double>::epsilon() * (box.center().cwiseAbs().maxCoeff() + box.diameter());
}

// Boxes already at the resolution of doubles are not split further.
bool splittable(const Piece& piece) { return piece.box.diameter() > 64 * rounding_slack(piece.box); }

// Encloses ∫_P log d(x,α) dμ for one piece P. Near points are handled by the
// piece's log-point bound: with w = diam P, log d ≥ log w + Σ_{a within w} min(0, log(|x−a|/w)).
Bound bound_piece(const Piece& piece, const Nearest& near, const PieceFactory& factory) {
  const double m = piece.mass();
  if (!(m > 0)) return {0, 0};
  const double slack = rounding_slack(piece.box);
  const double diam = piece.box.diameter() + 2 * slack;
  const double dmax = near.max_distance(piece.box) + slack;
  const double upper = m * std::log(dmax);
  const double dmin = near.min_distance(piece.box) - slack;
  double lower = dmin > 0 ? m * std::log(dmin) : -kInf;
  const std::size_t k = near.count_within(piece.box, diam + slack);
  const double point = factory.log_point_bound(piece);
  if (std::isfinite(point)) {
    const double sing = m * std::log(diam) + static_cast<double>(k) * (point - m * std::log(2 * diam));
    lower = std::max(lower, sing);
  }
  return {std::min(lower, upper), upper};
}

Piece root_for(PieceFactory& factory, Target target) {
  return target == Target::Mu ? factory.root_mu() : factory.root_nu();
}

const Box& support_for(const CondensationSystem& cs, Target target) {
  return target == Target::Mu ? cs.support_box() : cs.inner_box();
}

// Pieces with mass ≤ max_mass, in depth-first order.
std::vector<Piece> mass_partition(PieceFactory& factory, Target target, double max_mass, std::size_t cap) {
  return partition(
      factory, root_for(factory, target), [&](const Piece& p) { return p.mass() > max_mass && p.depth < 200; }, cap);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick(const std::vector<double>& cumulative, double u) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::vector<double> cumulative(const std::vector<double>& w) {
  std::vector<double> c(w.size());
  std::partial_sum(w.begin(), w.end(), c.begin());
  for (auto& x : c) x /= c.back();
  return c;
}

// Average of log|x − a| for x uniform on [lo, hi].
double smoothed_log(double lo, double hi, double a) {
  auto F = [](double u) { return u == 0 ? 0.0 : u * std::log(std::abs(u)) - u; };
  if (hi - lo <= 0) return std::log(std::abs(lo - a));
  return (F(hi - a) - F(lo - a)) / (hi - lo);
}

// Discretized μ for the descent heuristics.
struct Cell {
  Vec center;
  double lo;  // 1-D extent, or center ± radius in general dimension
  double hi;
  double radius;
  double mass;
};

std::vector<Cell> discretize(const CondensationSystem& cs, Target target, double max_mass, std::size_t cap) {
  std::vector<Cell> out;
  PieceFactory factory(cs);
  for (const auto& p : mass_partition(factory, target, max_mass, cap)) {
    if (!(p.mass() > 0)) continue;
    const double radius = p.box.diameter() / 2;
    out.push_back(Cell{p.box.center(), p.box.lo(0), p.box.hi(0), radius, p.mass()});
  }
  if (cs.dim() == 1)
    std::stable_sort(out.begin(), out.end(), [](const Cell& a, const Cell& b) { return a.center(0) < b.center(0); });
  return out;
}

double cell_cost(const Cell& c, const Vec& a) {
  if (a.size() == 1) return c.mass * smoothed_log(c.lo, c.hi, a(0));
  const double d = (c.center - a).norm();
  return c.mass * 0.5 * std::log(d * d + c.radius * c.radius / 4);
}

template <class F>
double golden_section(F&& f, double lo, double hi, double tol) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2, x2 = x1, f2 = f1;
      x1 = b - g * (b - a), f1 = f(x1);
    } else {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + g * (b - a), f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

Codebook::Codebook(std::vector<Vec> points) {
  auto less = [&](std::size_t a, std::size_t b) {
    const auto& x = points[a];
    const auto& y = points[b];
    return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
  };
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), less);
  std::vector<char> keep(points.size(), 1);
  for (std::size_t k = 1; k < order.size(); ++k)
    if (points[order[k]] == points[order[k - 1]]) keep[order[k]] = 0;
  for (std::size_t k = 0; k < points.size(); ++k)
    if (keep[k]) points_.push_back(std::move(points[k]));
  if (points_.empty()) throw std::invalid_argument("a codebook needs at least one point");
}

double Codebook::distance(const Vec& x) const { return Nearest(*this).distance(x); }

ErrorBracket log_dist_integral(const CondensationSystem& cs, const Codebook& codebook, const BracketOptions& options) {
  if (!(options.tol > 0)) throw std::invalid_argument("tol must be positive");
  if (codebook.size() == 0) throw std::invalid_argument("empty codebook");
  const Nearest near(codebook);
  PieceFactory factory(cs);

  // Slots hold live pieces only; a split piece's slot is reused by its first child.
  std::vector<Piece> pieces;
  std::vector<Bound> bounds;
  std::vector<std::size_t> free_slots;
  using Entry = std::pair<double, std::uint64_t>;  // (gap, slot)
  auto cmp = [&](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first < b.first;
    return pieces[a.second].id > pieces[b.second].id;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);

  double sum_lower = 0, sum_upper = 0;
  std::size_t infinite = 0, live = 0;
  auto add = [&](Piece piece) {
    const Bound b = bound_piece(piece, near, factory);
    std::size_t slot;
    if (!free_slots.empty()) {
      slot = free_slots.back();
      free_slots.pop_back();
      pieces[slot] = std::move(piece);
      bounds[slot] = b;
    } else {
      slot = pieces.size();
      pieces.push_back(std::move(piece));
      bounds.push_back(b);
    }
    ++live;
    sum_upper += b.upper;
    if (std::isfinite(b.lower)) sum_lower += b.lower; else ++infinite;
    const double gap = b.upper - b.lower;
    if (gap > 0 && splittable(pieces[slot])) queue.push({gap, slot});
  };
  add(root_for(factory, options.target));

  bool converged = false;
  while (true) {
    if (infinite == 0 && sum_upper - sum_lower <= options.tol) {
      converged = true;
      break;
    }
    if (queue.empty() || live >= options.max_pieces) break;
    const std::size_t slot = queue.top().second;
    queue.pop();
    const Bound b = bounds[slot];
    --live;
    sum_upper -= b.upper;
    if (std::isfinite(b.lower)) sum_lower -= b.lower; else --infinite;
    auto children = factory.split(pieces[slot]);
    free_slots.push_back(slot);
    for (auto& child : children) add(std::move(child));
  }

  // Final sums in piece-id order.
  std::vector<char> is_free(pieces.size(), 0);
  for (auto slot : free_slots) is_free[slot] = 1;
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < pieces.size(); ++k)
    if (!is_free[k]) order.push_back(k);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pieces[x].id < pieces[y].id; });
  double lower = 0, upper = 0;
  for (auto k : order) {
    lower += bounds[k].lower;
    upper += bounds[k].upper;
  }
  const std::size_t count = order.size();
  ErrorBracket out{lower, upper};
  out.converged = converged && upper - lower <= options.tol * (1 + 1e-9);
  out.pieces = count;
  return out;
}

std::vector<Vec> sample_ism(const CondensationSystem& cs, std::uint64_t seed, std::size_t count, double truncation_tol,
                            Target target) {
  if (!(truncation_tol > 0)) throw std::invalid_argument("truncationTol must be positive");
  std::mt19937_64 rng(seed);
  const auto outer_c = cumulative(cs.p());
  const auto inner_c = cumulative(cs.t());
  const Vec outer_anchor = cs.outer().map(1).fixed_point();
  const Vec inner_anchor = cs.inner().map(1).fixed_point();
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Similitude F = Similitude::identity(cs.dim());
    bool in_nu = target == Target::Nu;
    while (true) {
      if (F.ratio() < truncation_tol) {
        out.push_back(F.apply(in_nu ? inner_anchor : outer_anchor));
        break;
      }
      if (!in_nu) {
        const double u = uniform01(rng);
        if (u < cs.p0()) {
          in_nu = true;
          continue;
        }
        F = F.compose(cs.outer().map(static_cast<int>(pick(outer_c, uniform01(rng))) + 1));
      } else {
        F = F.compose(cs.inner().map(static_cast<int>(pick(inner_c, uniform01(rng))) + 1));
      }
    }
  }
  return out;
}

ErrorBracket monte_carlo_integral(const CondensationSystem& cs, const Codebook& codebook, std::size_t samples,
                                  std::uint64_t seed, Target target) {
  if (samples < 1) throw std::invalid_argument("samples must be at least 1");
  const Nearest near(codebook);
  double mean = 0, m2 = 0;
  std::size_t k = 0;
  for (const auto& x : sample_ism(cs, seed, samples, 1e-12, target)) {
    const double v = std::log(near.distance(x));
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  const double var = k > 1 ? m2 / static_cast<double>(k - 1) : 0.0;
  const double se = std::sqrt(var / static_cast<double>(k));
  ErrorBracket out{mean - se, mean + se, BracketMethod::MonteCarlo};
  out.stderr_mc = se;
  return out;
}

Codebook codebook_from_antichain(const CondensationSystem& cs, int j, AnchorRule rule, std::size_t cap) {
  if (j < 1) throw std::invalid_argument("antichain codebooks are defined for j ≥ 1");
  const auto family = explicit_family(cs, j, cap);
  std::vector<Vec> points;
  const Vec k_center = cs.support_box().center();
  const Vec c_center = cs.inner_box().center();
  for (const auto& sigma : family.members.members()) {
    const Similitude f = cs.outer().compose(sigma);
    points.push_back(rule == AnchorRule::CylinderCenter ? f.apply(k_center) : f.fixed_point());
  }
  for (std::size_t a = 0; a < family.psi.size(); ++a) {
    const Similitude f = cs.outer().compose(family.psi[a]);
    for (const auto& rho : family.inner[a].members()) {
      const Similitude g = cs.inner().compose(rho);
      points.push_back(f.apply(rule == AnchorRule::CylinderCenter ? g.apply(c_center) : g.fixed_point()));
    }
  }
  return Codebook(std::move(points));
}

double antichain_codebook_bound(const CondensationSystem& cs, int j) {
  const auto family = level_family(cs, j);
  const double log_diam = std::log(cs.support_box().diameter());
  if (cs.case_tag() == CaseTag::CaseI) return lambda_log_s_sum(cs, family) + log_diam;
  const double xi = ratio_xi(cs, family).value;
  const double base = std::log(family.base.get_d());
  return (1 - std::pow(1 - cs.p0(), family.min_depth)) * j * base / xi + log_diam;
}

Codebook quantile_codebook(const CondensationSystem& cs, std::size_t n, Target target) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  const auto cells = discretize(cs, target, 1.0 / (64.0 * static_cast<double>(n)), std::size_t{1} << 22);
  std::vector<Vec> points;
  if (cs.dim() == 1) {
    double acc = 0;
    std::size_t next = 0;
    for (const auto& c : cells) {
      acc += c.mass;
      while (next < n && acc >= (static_cast<double>(next) + 0.5) / static_cast<double>(n)) {
        points.push_back(c.center);
        ++next;
      }
    }
    while (points.size() < n) points.push_back(cells.back().center);
  } else {
    std::vector<std::size_t> order(cells.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cells[a].mass > cells[b].mass; });
    for (std::size_t k = 0; k < std::min(n, order.size()); ++k) points.push_back(cells[order[k]].center);
  }
  // Coincident quantiles are spread over neighbouring cells.
  Codebook book(points);
  if (book.size() < n && cells.size() >= n) {
    std::vector<Vec> extra = book.points();
    for (std::size_t k = 0; extra.size() < n && k < cells.size(); ++k) {
      bool used = false;
      for (const auto& p : extra) used = used || p == cells[k].center;
      if (!used) extra.push_back(cells[k].center);
    }
    book = Codebook(extra);
  }
  return book;
}

QuantizerResult lloyd0(const CondensationSystem& cs, std::size_t n, const Codebook& init, const LloydOptions& options) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (init.size() != n) throw std::invalid_argument("init must have n points");
  const Target target = options.bracket.target;
  const auto cells = discretize(cs, target, 1.0 / (64.0 * static_cast<double>(n)), std::size_t{1} << 22);
  const Box& support = support_for(cs, target);
  const double scale = support.diameter();
  const int q = cs.dim();

  QuantizerResult result{init, log_dist_integral(cs, init, options.bracket), {}};
  std::vector<Vec> current = init.points();
  for (int it = 0; it < options.iterations; ++it) {
    const Codebook book(current);
    const Nearest near(book);
    std::vector<std::vector<std::size_t>> members(current.size());
    for (std::size_t c = 0; c < cells.size(); ++c) members[near.nearest(cells[c].center)].push_back(c);

    std::vector<Vec> next = current;
    for (std::size_t k = 0; k < current.size(); ++k) {
      const auto& idx = members[k];
      if (idx.empty()) {
        // Reseed at the heaviest cell that no point sits on.
        std::size_t best = cells.size();
        for (std::size_t c = 0; c < cells.size(); ++c) {
          if (best != cells.size() && cells[c].mass <= cells[best].mass) continue;
          bool claimed = false;
          for (const auto& p : next) claimed = claimed || (p - cells[c].center).norm() <= cells[c].radius;
          if (!claimed) best = c;
        }
        if (best != cells.size()) {
          next[k] = cells[best].center;
          result.notes.push_back("iteration " + std::to_string(it + 1) + ": empty cell " + std::to_string(k) + " reseeded");
        }
        continue;
      }
      for (int coord = 0; coord < q; ++coord) {
        double lo = kInf, hi = -kInf;
        for (auto c : idx) {
          lo = std::min(lo, cells[c].center(coord) - cells[c].radius);
          hi = std::max(hi, cells[c].center(coord) + cells[c].radius);
        }
        Vec a = next[k];
        auto objective = [&](double v) {
          a(coord) = v;
          double total = 0;
          for (auto c : idx) total += cell_cost(cells[c], a);
          return total;
        };
        const double v = golden_section(objective, lo, hi, options.inner_tol * scale);
        next[k](coord) = v;
      }
    }
    Codebook candidate(next);
    if (candidate.size() != n) {
      result.notes.push_back("iteration " + std::to_string(it + 1) + ": points merged, stopped");
      break;
    }
    const auto bracket = log_dist_integral(cs, candidate, options.bracket);
    if (!(bracket.mid() < result.bracket.mid())) break;
    result.codebook = candidate;
    result.bracket = bracket;
    current = next;
  }
  return result;
}

OracleResult oracle_optimal_1d(const CondensationSystem& cs, std::size_t n, const double grid_step,
                               const BracketOptions& bracket) {
  if (cs.dim() != 1) throw std::invalid_argument("the grid oracle is one-dimensional");
  if (n < 1 || n > 4) throw std::invalid_argument("the grid oracle handles 1 ≤ n ≤ 4");
  if (!(grid_step > 0)) throw std::invalid_argument("gridStep must be positive");
  const Box& support = support_for(cs, bracket.target);
  const auto cells = discretize(cs, bracket.target, 1.0 / 8192, std::size_t{1} << 20);
  const std::size_t P = cells.size();
  std::vector<double> centers(P);
  for (std::size_t c = 0; c < P; ++c) centers[c] = cells[c].center(0);

  const double lo = support.lo(0), hi = support.hi(0);
  const std::size_t G = static_cast<std::size_t>(std::ceil((hi - lo) / grid_step)) + 1;
  std::vector<double> grid(G);
  for (std::size_t g = 0; g < G; ++g) grid[g] = std::min(hi, lo + grid_step * static_cast<double>(g));
  // prefix[g][c] = Σ_{c' < c} cost(c', grid g)
  std::vector<std::vector<double>> prefix(G, std::vector<double>(P + 1, 0.0));
  for (std::size_t g = 0; g < G; ++g)
    for (std::size_t c = 0; c < P; ++c)
      prefix[g][c + 1] = prefix[g][c] + cells[c].mass * smoothed_log(cells[c].lo, cells[c].hi, grid[g]);

  auto split_index = [&](double boundary) {
    return static_cast<std::size_t>(std::lower_bound(centers.begin(), centers.end(), boundary) - centers.begin());
  };
  auto grid_cost = [&](const std::vector<std::size_t>& t) {
    double total = 0;
    std::size_t start = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const std::size_t end = k + 1 < t.size() ? split_index((grid[t[k]] + grid[t[k + 1]]) / 2) : P;
      total += prefix[t[k]][end] - prefix[t[k]][start];
      start = end;
    }
    return total;
  };
  auto free_cost = [&](std::vector<double> a) {
    std::sort(a.begin(), a.end());
    double total = 0;
    std::size_t start = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const std::size_t end = k + 1 < a.size() ? split_index((a[k] + a[k + 1]) / 2) : P;
      for (std::size_t c = start; c < end; ++c) total += cells[c].mass * smoothed_log(cells[c].lo, cells[c].hi, a[k]);
      start = end;
    }
    return total;
  };

  constexpr std::size_t kKeep = 50;
  using Cand = std::pair<double, std::vector<std::size_t>>;
  auto worse = [](const Cand& a, const Cand& b) { return a.first < b.first || (a.first == b.first && a.second < b.second); };
  std::priority_queue<Cand, std::vector<Cand>, decltype(worse)> top(worse);
  std::vector<std::size_t> t(n);
  std::function<void(std::size_t, std::size_t)> enumerate = [&](std::size_t k, std::size_t from) {
    if (k == n) {
      const double v = grid_cost(t);
      if (top.size() < kKeep) top.push({v, t});
      else if (v < top.top().first) {
        top.pop();
        top.push({v, t});
      }
      return;
    }
    for (std::size_t g = from; g + (n - k) <= G; ++g) {
      t[k] = g;
      enumerate(k + 1, g + 1);
    }
  };
  enumerate(0, 0);

  std::vector<Cand> candidates;
  while (!top.empty()) {
    candidates.push_back(top.top());
    top.pop();
  }
  std::reverse(candidates.begin(), candidates.end());

  const double fine = grid_step / 10;
  std::vector<std::pair<ErrorBracket, std::vector<double>>> scored;
  for (const auto& cand : candidates) {
    std::vector<double> a;
    for (auto g : cand.second) a.push_back(grid[g]);
    double value = free_cost(a);
    for (bool improved = true; improved;) {
      improved = false;
      for (std::size_t k = 0; k < n; ++k)
        for (double dir : {-1.0, 1.0}) {
          while (true) {
            auto b = a;
            b[k] = std::clamp(b[k] + dir * fine, lo, hi);
            const double v = free_cost(b);
            if (!(v < value)) break;
            a = std::move(b), value = v, improved = true;
          }
        }
    }
    std::sort(a.begin(), a.end());
    std::vector<Vec> pts;
    for (double x : a) pts.push_back(make_vec({x}));
    Codebook book(pts);
    if (book.size() != n) continue;
    scored.emplace_back(log_dist_integral(cs, book, bracket), a);
  }
  if (scored.empty()) throw std::runtime_error("grid oracle found no admissible codebook");
  std::stable_sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) { return x.first.upper < y.first.upper; });

  // The three best are polished by coordinate descent on the bracket itself.
  auto bracket_of = [&](const std::vector<double>& a) {
    std::vector<Vec> pts;
    for (double x : a) pts.push_back(make_vec({x}));
    Codebook book(pts);
    if (book.size() != n) return ErrorBracket{kInf, kInf};
    return log_dist_integral(cs, book, bracket);
  };
  OracleResult best{Codebook(std::vector<Vec>{make_vec({grid[0]})}), ErrorBracket{kInf, kInf}, -kInf, 0};
  std::vector<double> best_points;
  for (std::size_t c = 0; c < std::min<std::size_t>(3, scored.size()); ++c) {
    auto [br, a] = scored[c];
    for (double step : {fine, fine / 10}) {
      for (bool improved = true; improved;) {
        improved = false;
        for (std::size_t k = 0; k < n; ++k)
          for (double dir : {-1.0, 1.0}) {
            while (true) {
              auto b = a;
              b[k] = std::clamp(b[k] + dir * step, lo, hi);
              const auto nb = bracket_of(b);
              if (!(nb.upper < br.upper)) break;
              a = std::move(b), br = nb, improved = true;
            }
          }
      }
    }
    if (br.upper < best.bracket.upper) {
      std::sort(a.begin(), a.end());
      std::vector<Vec> pts;
      for (double x : a) pts.push_back(make_vec({x}));
      best.codebook = Codebook(pts);
      best.bracket = br;
      best_points = a;
    }
  }
  const double base = free_cost(best_points);
  double slack = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double worst = 0;
    for (double dir : {-0.5, 0.5}) {
      auto b = best_points;
      b[k] = std::clamp(b[k] + dir * grid_step, lo, hi);
      worst = std::max(worst, std::abs(free_cost(b) - base));
    }
    slack += worst;
  }
  best.grid_slack = slack;
  best.certified_lower = certified_lower_bound(cs, n, bracket.target);
  return best;
}

double certified_lower_bound(const CondensationSystem& cs, std::size_t n, Target target) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  PieceFactory factory(cs);
  const std::size_t cap = cs.dim() == 1 ? std::size_t{1} << 21 : std::size_t{1} << 12;
  double best = -kInf;
  for (int shift = -3; shift <= 6; ++shift) {
    const double max_mass = std::ldexp(1.0 / static_cast<double>(n), -shift);
    std::vector<Piece> pieces;
    try {
      pieces = mass_partition(factory, target, max_mass, cap);
    } catch (const std::length_error&) {
      break;
    }
    std::erase_if(pieces, [](const Piece& p) { return !(p.mass() > 0); });
    const std::size_t P = pieces.size();
    // Isolation radius: half the gap to the nearest other piece box.
    std::vector<double> gap(P, kInf);
    if (cs.dim() == 1) {
      std::vector<std::size_t> order(P);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pieces[a].box.lo(0) < pieces[b].box.lo(0); });
      double reach = -kInf;  // largest hi among earlier boxes
      for (std::size_t k = 0; k < P; ++k) {
        const auto& b = pieces[order[k]].box;
        if (k > 0) gap[order[k]] = std::min(gap[order[k]], std::max(0.0, b.lo(0) - reach));
        reach = std::max(reach, b.hi(0));
      }
      double floor = kInf;  // smallest lo among later boxes
      for (std::size_t k = P; k-- > 0;) {
        const auto& b = pieces[order[k]].box;
        if (k + 1 < P) gap[order[k]] = std::min(gap[order[k]], std::max(0.0, floor - b.hi(0)));
        floor = std::min(floor, b.lo(0));
      }
    } else {
      for (std::size_t a = 0; a < P; ++a)
        for (std::size_t b = a + 1; b < P; ++b) {
          const double d = pieces[a].box.distance(pieces[b].box);
          gap[a] = std::min(gap[a], d);
          gap[b] = std::min(gap[b], d);
        }
    }
    double base = 0, worst = 0;
    bool ok = true;
    for (std::size_t k = 0; k < P; ++k) {
      const double m = pieces[k].mass();
      const double diam = pieces[k].box.diameter();
      double rho = std::isfinite(gap[k]) ? gap[k] * (0.5 - 1e-9) : diam + 1;
      if (!(rho > 0)) {
        ok = false;
        break;
      }
      const double point = factory.log_point_bound(pieces[k]);
      if (!std::isfinite(point)) {
        ok = false;
        break;
      }
      base += m * std::log(rho);
      worst = std::min(worst, point - m * std::log(rho + diam));
    }
    if (!ok) continue;
    best = std::max(best, base + static_cast<double>(n) * worst);
  }
  return best;
}

std::string to_string(QuantizeMethod method) {
  switch (method) {
    case QuantizeMethod::Antichain: return "antichain";
    case QuantizeMethod::Lloyd: return "lloyd";
    case QuantizeMethod::Oracle: return "oracle";
  }
  return "?";
}

namespace {

// Σ p_i log s_i / p₀, the shift in ê_n(μ) ≥ ê_n(ν) + p₀⁻¹ Σ p_i log s_i.
double nu_shift(const CondensationSystem& cs) {
  double total = 0;
  for (std::size_t i = 0; i < cs.p().size(); ++i) total += cs.p()[i] * std::log(cs.s()[i]);
  return total / cs.p0();
}

double lower_for(const CondensationSystem& cs, std::size_t n) {
  return std::max(certified_lower_bound(cs, n, Target::Mu), certified_lower_bound(cs, n, Target::Nu) + nu_shift(cs));
}

}  // namespace

std::vector<CoefficientRow> coefficient_table(const CondensationSystem& cs, int j_min, int j_max, QuantizeMethod method,
                                              const CoefficientOptions& options) {
  if (j_min < 1 || j_max < j_min) throw std::invalid_argument("invalid j range");
  const double d0 = dimension_d0(cs);
  std::vector<CoefficientRow> rows;
  for (int j = j_min; j <= j_max; ++j) {
    const auto start = std::chrono::steady_clock::now();
    const Codebook book = codebook_from_antichain(cs, j);
    const std::size_t n = book.size();
    ErrorBracket upper = log_dist_integral(cs, book, options.bracket);
    double lower = lower_for(cs, n);
    if (method == QuantizeMethod::Lloyd) {
      LloydOptions lo = options.lloyd;
      lo.bracket = options.bracket;
      const auto tuned = lloyd0(cs, n, book, lo);
      if (tuned.bracket.upper < upper.upper) upper = tuned.bracket;
    } else if (method == QuantizeMethod::Oracle && n <= 4 && cs.dim() == 1) {
      const auto oracle = oracle_optimal_1d(cs, n, options.oracle_grid_step * cs.support_box().diameter(), options.bracket);
      if (oracle.bracket.upper < upper.upper) upper = oracle.bracket;
      lower = std::max(lower, oracle.certified_lower);
    }
    lower = std::min(lower, upper.upper);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double scale = std::pow(static_cast<double>(n), 1.0 / d0);
    CoefficientRow row;
    row.j = j;
    row.n = n;
    row.method = to_string(method);
    row.e_lower = std::exp(lower);
    row.e_upper = std::exp(upper.upper);
    row.coef_lower = scale * row.e_lower;
    row.coef_upper = scale * row.e_upper;
    row.seconds = seconds;
    row.construction_bound = antichain_codebook_bound(cs, j);
    row.converged = upper.converged;
    rows.push_back(row);
  }
  return rows;
}

std::string coefficient_csv_header() { return "n,method,e_lower,e_upper,coef_lower,coef_upper,seconds"; }

std::string coefficient_csv_row(const CoefficientRow& row, bool timing) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu,%s,%.10e,%.10e,%.10e,%.10e,", row.n, row.method.c_str(), row.e_lower, row.e_upper,
                row.coef_lower, row.coef_upper);
  std::string out = buf;
  if (timing) {
    std::snprintf(buf, sizeof buf, "%.3f", row.seconds);
    out += buf;
  } else {
    out += "NA";
  }
  return out;
}

std::vector<SandwichRow> sandwich_check(const CondensationSystem& cs, const std::vector<std::size_t>& n_list,
                                        const LloydOptions& options) {
  const std::size_t N = static_cast<std::size_t>(cs.outer_size());
  double log_s_sum = 0;
  for (std::size_t i = 0; i < cs.p().size(); ++i) log_s_sum += cs.p()[i] * std::log(cs.s()[i]);
  auto best_upper = [&](std::size_t n, Target target) {
    LloydOptions lo = options;
    lo.bracket.target = target;
    return lloyd0(cs, n, quantile_codebook(cs, n, target), lo).bracket.upper;
  };
  std::vector<SandwichRow> rows;
  for (auto n : n_list) {
    SandwichRow row{};
    row.n = n;
    row.m = n / (N + 1);
    row.lower_lhs = best_upper(n, Target::Mu);
    row.lower_rhs = certified_lower_bound(cs, n, Target::Nu) + log_s_sum / cs.p0();
    row.lower_holds = row.lower_lhs >= row.lower_rhs;
    row.upper_lhs = lower_for(cs, n);
    if (row.m >= 1) {
      row.upper_rhs = cs.p0() * best_upper(row.m, Target::Nu) + (1 - cs.p0()) * best_upper(row.m, Target::Mu) + log_s_sum;
      row.upper_holds = row.upper_lhs <= row.upper_rhs;
    } else {
      row.upper_rhs = kInf;
      row.upper_holds = true;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fqz
