#include "fqz/pieces.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fqz {

double min_gap(const std::vector<Box>& boxes) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < boxes.size(); ++i)
    for (std::size_t j = i + 1; j < boxes.size(); ++j) gap = std::min(gap, boxes[i].distance(boxes[j]));
  return gap;
}

namespace {

constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

// Self-similar measure with weights w, ratios r and first-level gap δ: a point
// is within δ/2 of at most one first-level piece, which gives
// A ≥ min_i [log(δ/2) + w_i log r_i / (1 − w_i)].
double self_similar_constant(const std::vector<double>& w, const std::vector<double>& r, double gap) {
  if (!(gap > 0)) return kMinusInf;
  if (w.size() == 1) return kMinusInf;
  const double far = std::log(gap / 2);
  double best = far;
  for (std::size_t i = 0; i < w.size(); ++i) best = std::min(best, far + w[i] * std::log(r[i]) / (1 - w[i]));
  return best;
}

}  // namespace

PieceFactory::PieceFactory(const CondensationSystem& cs) : cs_(&cs) {
  const auto& outer = cs.outer();
  const auto& inner = cs.inner();
  std::vector<Box> inner_boxes;
  for (const auto& g : inner.maps()) inner_boxes.push_back(g.image(cs.inner_box()));
  a_nu_ = self_similar_constant(inner.probabilities(), inner.ratios(), min_gap(inner_boxes));

  std::vector<Box> outer_boxes;
  for (const auto& f : outer.maps()) outer_boxes.push_back(f.image(cs.support_box()));
  const double p0 = cs.p0();
  const auto& p = cs.p();
  const auto& s = cs.s();
  if (cs.case_tag() == CaseTag::CaseI) {
    const double gap = min_gap(outer_boxes);
    if (!(gap > 0) || !std::isfinite(a_nu_)) {
      a_mu_ = kMinusInf;
    } else {
      const double far = std::log(gap / 2);
      a_mu_ = p0 * a_nu_ + (1 - p0) * far;
      for (std::size_t i = 0; i < p.size(); ++i)
        a_mu_ = std::min(a_mu_, (p0 * a_nu_ + p[i] * std::log(s[i]) + (1 - p0 - p[i]) * far) / (1 - p[i]));
    }
  } else {
    outer_boxes.push_back(cs.inner_box());
    const double gap = min_gap(outer_boxes);
    if (!(gap > 0) || !std::isfinite(a_nu_)) {
      a_mu_ = kMinusInf;
    } else {
      const double far = std::log(gap / 2);
      a_mu_ = std::min(far, p0 * a_nu_ + (1 - p0) * far);
      for (std::size_t i = 0; i < p.size(); ++i) a_mu_ = std::min(a_mu_, far + p[i] * std::log(s[i]) / (1 - p[i]));
    }
  }
  for (int round = 0; round < 3; ++round) {
    if (std::isfinite(a_nu_)) a_nu_ = std::max(a_nu_, refined_constant(root_nu()));
    if (std::isfinite(a_mu_)) a_mu_ = std::max(a_mu_, refined_constant(root_mu()));
  }
  next_id_ = 0;
}

// For a in a cell J of the root box, ∫ log|x−a| ≥ Σ_P max(m_P log d(P, J), point bound of P)
// over a partition into pieces P. Points outside the box do no better than
// their projection onto it, so the minimum over cells is a valid constant.
double PieceFactory::refined_constant(const Piece& root) {
  constexpr double kPieceMass = 1.0 / 512;
  constexpr int kCells = 256;
  const auto pieces = partition(*this, root, [](const Piece& p) { return p.mass() > kPieceMass && p.depth < 60; }, 1u << 16);
  const Box& box = root.box;
  const int q = box.dim();
  const int per_axis = std::max(1, static_cast<int>(std::floor(std::pow(kCells, 1.0 / q))));
  std::vector<double> point(pieces.size());
  for (std::size_t k = 0; k < pieces.size(); ++k) point[k] = log_point_bound(pieces[k]);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<std::size_t>(q), 0);
  while (true) {
    Box cell = box;
    for (int d = 0; d < q; ++d) {
      const double w = (box.hi(d) - box.lo(d)) / per_axis;
      cell.lo(d) = box.lo(d) + w * idx[static_cast<std::size_t>(d)];
      cell.hi(d) = idx[static_cast<std::size_t>(d)] + 1 == per_axis ? box.hi(d) : cell.lo(d) + w;
    }
    double total = 0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const double m = pieces[k].mass();
      if (!(m > 0)) continue;
      const double dist = pieces[k].box.distance(cell);
      total += dist > 0 ? std::max(m * std::log(dist), point[k]) : point[k];
    }
    best = std::min(best, total);
    int d = 0;
    while (d < q && ++idx[static_cast<std::size_t>(d)] == per_axis) idx[static_cast<std::size_t>(d++)] = 0;
    if (d == q) break;
  }
  return best;
}

Piece PieceFactory::root_mu() {
  const int q = cs_->dim();
  PieceKind kind = cs_->case_tag() == CaseTag::CaseI ? PieceKind::Mixed : PieceKind::K;
  return Piece{kind, Similitude::identity(q), 1.0, 0.0, cs_->support_box(), next_id_++, 0};
}

Piece PieceFactory::root_nu() {
  const int q = cs_->dim();
  PieceKind kind = cs_->case_tag() == CaseTag::CaseI ? PieceKind::Mixed : PieceKind::C;
  return Piece{kind, Similitude::identity(q), 0.0, 1.0, cs_->inner_box(), next_id_++, 0};
}

std::vector<Piece> PieceFactory::split(const Piece& piece) {
  std::vector<Piece> out;
  const auto& outer = cs_->outer();
  const auto& inner = cs_->inner();
  switch (piece.kind) {
    case PieceKind::Mixed:
      for (int i = 1; i <= outer.size(); ++i) {
        const double pi = cs_->p()[static_cast<std::size_t>(i - 1)];
        const double ti = cs_->t()[static_cast<std::size_t>(i - 1)];
        Similitude f = piece.map.compose(outer.map(i));
        Box box = f.image(cs_->support_box());
        out.push_back(Piece{PieceKind::Mixed, std::move(f), piece.w_mu * pi, (piece.w_mu * cs_->p0() + piece.w_nu) * ti,
                            box, next_id_++, piece.depth + 1});
      }
      break;
    case PieceKind::K:
      out.push_back(Piece{PieceKind::C, piece.map, 0.0, piece.w_mu * cs_->p0(), piece.map.image(cs_->inner_box()),
                          next_id_++, piece.depth + 1});
      for (int i = 1; i <= outer.size(); ++i) {
        Similitude f = piece.map.compose(outer.map(i));
        Box box = f.image(cs_->support_box());
        out.push_back(Piece{PieceKind::K, std::move(f), piece.w_mu * cs_->p()[static_cast<std::size_t>(i - 1)], 0.0, box,
                            next_id_++, piece.depth + 1});
      }
      break;
    case PieceKind::C:
      for (int i = 1; i <= inner.size(); ++i) {
        Similitude g = piece.map.compose(inner.map(i));
        Box box = g.image(cs_->inner_box());
        out.push_back(Piece{PieceKind::C, std::move(g), 0.0, piece.w_nu * cs_->t()[static_cast<std::size_t>(i - 1)], box,
                            next_id_++, piece.depth + 1});
      }
      break;
  }
  return out;
}

double PieceFactory::log_point_bound(const Piece& piece) const {
  const double log_r = std::log(piece.map.ratio());
  double total = 0;
  if (piece.w_mu > 0) total += piece.w_mu * (log_r + a_mu_);
  if (piece.w_nu > 0) total += piece.w_nu * (log_r + a_nu_);
  return total;
}

std::vector<Piece> partition(PieceFactory& factory, const Piece& root,
                             const std::function<bool(const Piece&)>& needs_split, std::size_t cap) {
  std::vector<Piece> out;
  std::vector<Piece> stack{root};
  while (!stack.empty()) {
    Piece piece = std::move(stack.back());
    stack.pop_back();
    if (!needs_split(piece)) {
      out.push_back(std::move(piece));
      if (out.size() > cap) throw std::length_error("partition exceeds " + std::to_string(cap) + " pieces");
      continue;
    }
    auto children = factory.split(piece);
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(std::move(*it));
  }
  return out;
}

}  // namespace fqz
