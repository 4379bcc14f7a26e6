#pragma once

// Cylinder pieces of μ and ν. A piece is a similitude F with weights on a
// μ-copy and a ν-copy: w_mu·μ∘F⁻¹ + w_nu·ν∘F⁻¹, restricted to a certified box.
//   Case I:  (F, a, b) splits into (F∘f_i, a·p_i, a·p₀t_i + b·t_i).
//   Case II: a K-piece (F, a) splits into the C-piece (F, a·p₀) and the K-pieces
//            (F∘f_i, a·p_i); a C-piece (F, b) splits into (F∘g_i, b·t_i).

#include "fqz/systems.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace fqz {

enum class PieceKind { Mixed, K, C };

struct Piece {
  PieceKind kind;
  Similitude map;
  double w_mu = 0;
  double w_nu = 0;
  Box box;
  std::uint64_t id = 0;
  int depth = 0;

  double mass() const { return w_mu + w_nu; }
};

class PieceFactory {
 public:
  explicit PieceFactory(const CondensationSystem& cs);

  const CondensationSystem& system() const { return *cs_; }
  Piece root_mu();
  Piece root_nu();
  std::vector<Piece> split(const Piece& piece);

  // Lower bounds for inf_b ∫ log|x−b| dμ(x) and dν(x); −∞ when the first-level
  // pieces touch, in which case no certified lower bound is available.
  double log_point_constant_mu() const { return a_mu_; }
  double log_point_constant_nu() const { return a_nu_; }
  // Lower bound for ∫ log|x−a| over a piece, for any point a.
  double log_point_bound(const Piece& piece) const;

 private:
  double refined_constant(const Piece& root);

  const CondensationSystem* cs_;
  std::uint64_t next_id_ = 0;
  double a_mu_;
  double a_nu_;
};

// Splits pieces starting from `root` until `needs_split` is false for all of
// them. Output is in depth-first order. Throws std::length_error past `cap` pieces.
std::vector<Piece> partition(PieceFactory& factory, const Piece& root,
                             const std::function<bool(const Piece&)>& needs_split, std::size_t cap = 1u << 24);

// Smallest distance between any two boxes; 0 if some pair overlaps or touches.
double min_gap(const std::vector<Box>& boxes);

}  // namespace fqz
