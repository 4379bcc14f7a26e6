#pragma once

// Similitudes on ℝ^q, iterated function systems, condensation systems
// μ = p₀ν + Σ p_i μ∘f_i^{-1}, separation checks and closed-form dimensions.

#include "fqz/rational.hpp"
#include "fqz/symbolic.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace fqz {

inline constexpr int kMaxDim = 3;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

Vec make_vec(std::initializer_list<double> xs);

// Closed axis-aligned box.
struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double diameter() const { return (hi - lo).norm(); }
  Vec center() const { return (lo + hi) / 2; }
  bool contains(const Box& other) const;
  bool contains(const Vec& x) const;
  // `other` lies in the open interior of this box.
  bool interior_contains(const Box& other) const;
  bool interior_contains(const Vec& x) const;
  double distance(const Box& other) const;
  double distance(const Vec& x) const;
  // Largest distance from x to a point of the box.
  double farthest(const Vec& x) const;
  Box hull(const Box& other) const;
  Box padded(double amount) const;
};

class Similitude {
 public:
  Similitude() = default;
  // x ↦ ratio·R·x + translation. R defaults to the identity; it must be
  // orthogonal to 1e-12 (max-norm of RᵀR − I).
  Similitude(double ratio, Vec translation, std::optional<Mat> rotation = std::nullopt);
  static Similitude identity(int dim);

  int dim() const { return static_cast<int>(translation_.size()); }
  double ratio() const { return ratio_; }
  const Vec& translation() const { return translation_; }
  const Mat& rotation() const { return rotation_; }

  Vec apply(const Vec& x) const { return ratio_ * (rotation_ * x) + translation_; }
  Vec apply_inverse(const Vec& y) const;
  // (*this ∘ inner)(x) = this(inner(x)).
  Similitude compose(const Similitude& inner) const;
  // Smallest axis-aligned box containing the image of `box`.
  Box image(const Box& box) const;
  // Unique fixed point (I − rR)^{-1} b; requires ratio < 1.
  Vec fixed_point() const;
  // Similitude conjugated by the homothety x ↦ λx.
  Similitude rescaled(double lambda) const;

 private:
  double ratio_ = 1.0;
  Mat rotation_;
  Vec translation_;
};

class SimilitudeSystem {
 public:
  SimilitudeSystem() = default;
  // `exact_ratios` and `exact_probabilities` carry the rational values the
  // maps were configured with; probabilities must be positive and sum to 1.
  SimilitudeSystem(std::vector<Similitude> maps, std::vector<Rational> exact_ratios,
                   std::vector<Rational> exact_probabilities, std::optional<Box> witness = std::nullopt);

  int size() const { return static_cast<int>(maps_.size()); }
  int dim() const { return maps_.front().dim(); }
  const std::vector<Similitude>& maps() const { return maps_; }
  const Similitude& map(int i) const { return maps_[static_cast<std::size_t>(i - 1)]; }
  const std::vector<double>& ratios() const { return ratios_; }
  const std::vector<Rational>& exact_ratios() const { return exact_ratios_; }
  const std::vector<double>& probabilities() const { return probs_; }
  const std::vector<Rational>& exact_probabilities() const { return exact_probs_; }
  const std::optional<Box>& witness() const { return witness_; }

  // f_σ = f_{σ1} ∘ … ∘ f_{σn}; θ gives the identity.
  Similitude compose(const Word& sigma) const;
  // {f_σ(anchor) : σ ∈ Ω_depth}, lexicographic in σ.
  std::vector<Vec> attractor_points(int depth, std::optional<Vec> anchor = std::nullopt) const;
  // Certified box enclosure of the attractor: iterates B ↦ hull ∪ f_i(B)
  // 200 times from an invariant seed box.
  Box attractor_box() const;
  // Root D of Σ s_i^D = 1.
  double similarity_dimension() const;
  SimilitudeSystem rescaled(double lambda) const;

 private:
  std::vector<Similitude> maps_;
  std::vector<double> ratios_;
  std::vector<Rational> exact_ratios_;
  std::vector<double> probs_;
  std::vector<Rational> exact_probs_;
  std::optional<Box> witness_;
};

enum class CaseTag { CaseI, CaseII };

std::string to_string(CaseTag tag);

// ((f_i), (p_i)_{i=0}^N, ν). In Case I ν is the self-similar measure of the
// outer maps with weights t; in Case II it belongs to a separate system (g_i, t_i).
class CondensationSystem {
 public:
  // Case I.
  CondensationSystem(std::vector<Similitude> maps, std::vector<Rational> ratios, std::vector<Rational> p,
                     std::vector<Rational> t, std::optional<Box> witness = std::nullopt);
  // Case II.
  CondensationSystem(std::vector<Similitude> maps, std::vector<Rational> ratios, std::vector<Rational> p,
                     SimilitudeSystem inner, std::optional<Box> witness = std::nullopt);

  CaseTag case_tag() const { return tag_; }
  int outer_size() const { return outer_.size(); }
  int inner_size() const { return inner_.size(); }
  int dim() const { return outer_.dim(); }

  // Outer system; its probability vector is (p_1..p_N)/(1-p₀).
  const SimilitudeSystem& outer() const { return outer_; }
  // System carrying ν (Case I: the outer maps with weights t).
  const SimilitudeSystem& inner() const { return inner_; }

  double p0() const { return p_[0]; }
  const Rational& exact_p0() const { return exact_p_[0]; }
  // (p_1..p_N)
  const std::vector<double>& p() const { return p_outer_; }
  const std::vector<Rational>& exact_p() const { return exact_p_outer_; }
  // (t_i) of ν
  const std::vector<double>& t() const { return inner_.probabilities(); }
  const std::vector<Rational>& exact_t() const { return inner_.exact_probabilities(); }
  // Outer ratios s_i and inner ratios c_i (c = s in Case I).
  const std::vector<double>& s() const { return outer_.ratios(); }
  const std::vector<Rational>& exact_s() const { return outer_.exact_ratios(); }
  const std::vector<double>& c() const { return inner_.ratios(); }

  // Certified enclosures of K = supp μ and C = supp ν.
  const Box& support_box() const { return k_box_; }
  const Box& inner_box() const { return c_box_; }

  // Same measure pushed forward by x ↦ λx.
  CondensationSystem rescaled(double lambda) const;

 private:
  void finish();

  CaseTag tag_;
  SimilitudeSystem outer_;
  SimilitudeSystem inner_;
  std::vector<double> p_;
  std::vector<Rational> exact_p_;
  std::vector<double> p_outer_;
  std::vector<Rational> exact_p_outer_;
  Box k_box_;
  Box c_box_;
};

// u₀ = Σ t_i log t_i, l₀ = Σ t_i log c_i, d₀ = u₀/l₀.
double u0(const CondensationSystem& cs);
double l0(const CondensationSystem& cs);
double dimension_d0(const CondensationSystem& cs);

// k₀ = Σ q log q / Σ q log s for r = 0; otherwise the root of
// Σ (q_i s_i^r)^{k/(k+r)} = 1 found by bisection on x = k/(k+r).
// Throws std::runtime_error if 200 bisection steps do not reach |Σ−1| ≤ 1e-12.
double dimension_kr(const std::vector<double>& q, const std::vector<double>& s, double r);

enum class CheckStatus { Pass, Fail, Unverified };
std::string to_string(CheckStatus status);

struct ConditionCheck {
  std::string name;
  CheckStatus status;
  std::string detail;
};

struct ValidationReport {
  std::string subject;
  std::vector<ConditionCheck> checks;

  bool passed() const;  // no check failed
};

// OSC with the witness box as U: (1) f_i(U) ⊂ U, (2) pairwise disjoint images.
ValidationReport validate_osc(const SimilitudeSystem& system);
// IOSC conditions (1)–(4) for a Case II system, using certified enclosures of C.
ValidationReport validate_iosc(const CondensationSystem& cs);

}  // namespace fqz
