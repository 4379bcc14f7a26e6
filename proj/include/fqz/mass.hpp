#pragma once

// Cylinder masses of μ in both cases, the μ⁽¹⁾ recursion, descendant-sum
// identities, the Δ₁/Δ₂ hereditary terms and the ball-mass exponent.

#include "fqz/systems.hpp"

#include <optional>
#include <vector>

namespace fqz {

// Exact masses are limited to words of this length.
inline constexpr std::size_t kExactWordLimit = 64;
// Identities are cross-checked by enumeration only when N^h is at most this.
inline constexpr std::size_t kEnumerationLimit = 4096;

// μ⁽¹⁾(σ) by the recursion μ⁽¹⁾(σ∗i) = μ⁽¹⁾(σ)t_i + p₀p_σt_i, μ⁽¹⁾(θ) = 0. Case I only.
Rational mu1_exact(const CondensationSystem& cs, const Word& sigma);
double mu1(const CondensationSystem& cs, const Word& sigma);
// μ(E_σ) = μ⁽¹⁾(σ) + p_σ. Case I only.
Rational mass_case1_exact(const CondensationSystem& cs, const Word& sigma);
// log μ(E_σ) accumulated in log space; usable for words of any length.
double log_mass_case1(const CondensationSystem& cs, const Word& sigma);

// μ(f_σ(K)) = p_σ, or μ(f_σ(C_ω)) = p₀p_σt_ω when ω is given. Case II only.
Rational mass_case2_exact(const CondensationSystem& cs, const Word& sigma, const std::optional<Word>& omega = std::nullopt);
double log_mass_case2(const CondensationSystem& cs, const Word& sigma, const std::optional<Word>& omega = std::nullopt);

// Σ_{σ∈A} μ(E_σ), exactly. Case I only.
Rational antichain_mass_case1(const CondensationSystem& cs, const Antichain& a);

struct ExactIdentity {
  Rational closed_form;
  std::optional<Rational> enumerated;  // absent when N^h exceeds kEnumerationLimit
  bool agree() const { return !enumerated || *enumerated == closed_form; }
};

// Σ_{ω∈Γ(σ,h)} μ⁽¹⁾(ω) = μ⁽¹⁾(σ) + p_σ(1−p₀)(1−(1−p₀)^{h−1}) + p₀p_σ.
ExactIdentity gamma_sum_mu1(const CondensationSystem& cs, const Word& sigma, int h);

struct HereditaryIdentity {
  double base;   // μ⁽¹⁾(σ) log t_σ (or log s_σ)
  double delta;  // Δ₁(σ,h) (or Δ₂)
  std::optional<double> enumerated;  // Σ_{τ∈Γ(σ,h)} μ⁽¹⁾(τ) log t_τ
  double closed_form() const { return base + delta; }
  bool agree(double tol = 1e-10) const;
};

double delta1(const CondensationSystem& cs, const Word& sigma, int h);
double delta2(const CondensationSystem& cs, const Word& sigma, int h);
// which = 1: weights log t; which = 2: ratios log s.
HereditaryIdentity hereditary_identity(const CondensationSystem& cs, const Word& sigma, int h, int which);

struct BallExponent {
  double eta1;
  double delta3;  // Case II: min{s̲, c̲}; Case I: s̲
  double delta4;  // Case II: max{t̄, p̄}; Case I: max_i max{t_i, p_i + p₀t_i}
};

// μ(B(x,ε)) ≤ λ₁ε^η₁. Case II uses η₁ = log δ₄ / log δ₃. The Case I exponent
// comes from the one-step mass recursion and is only checked empirically.
BallExponent ball_mass_exponent(const CondensationSystem& cs);

// Largest mass of a ball of radius ε, over centres at piece centres and the
// midpoints between neighbouring pieces, with μ discretized into pieces of
// diameter ≤ ε/resolution. Pieces meeting the ball count in full.
double empirical_ball_sup(const CondensationSystem& cs, double eps, int resolution = 10);

struct BallFit {
  double eta1;
  double lambda1;
  std::vector<double> eps;
  std::vector<double> sup;
  bool holds;  // sup ≤ λ₁ε^η₁ at every ε
};

// λ₁ is the max of sup/ε^η₁ over the first `fit_count` radii; all radii are then checked.
BallFit fit_ball_bound(const CondensationSystem& cs, const std::vector<double>& eps, std::size_t fit_count,
                       int resolution = 10);

}  // namespace fqz
