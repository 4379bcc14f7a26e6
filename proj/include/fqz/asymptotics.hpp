#pragma once

// Level families Λ_j (Case I) and Γ_j, Ψ_j, Γ_j(σ) (Case II), their count and
// depth bounds, the ratio sequences d_k, η_j, ξ_j, the antichain log identity,
// O(1/j) convergence diagnostics and the ε-cover S_ε, T_ε(σ).

#include "fqz/families.hpp"
#include "fqz/systems.hpp"

#include <map>
#include <string>
#include <vector>

namespace fqz {

struct LevelFamily {
  CaseTag tag;
  int j;
  Rational base;       // t̲ (Case I) or q̲ = min{p̲, t̲} (Case II)
  Rational threshold;  // base^j
  // Case I: Λ_j on t. Case II: Γ_j on p, whose interior classes are Ψ_j.
  ThresholdProfile outer;
  // Case II: distinct profiles of Γ_j(σ); inner_index[a] selects the one for
  // interior class a of `outer`.
  std::vector<ThresholdProfile> inner;
  std::vector<std::size_t> inner_index;
  mpz_class count;  // φ_j or M_j
  mpz_class psi;    // ψ_j = card Γ_j (Case II)
  int min_depth;    // k₁ⱼ or l₁ⱼ
  int max_depth;    // k₂ⱼ or l₂ⱼ

  const ThresholdProfile& inner_for(std::size_t interior_class) const { return inner[inner_index[interior_class]]; }
};

// Throws std::length_error naming the predicted cardinality when it exceeds `cap`.
LevelFamily level_family(const CondensationSystem& cs, int j, std::size_t cap = std::size_t{1} << 24);

struct ExplicitFamily {
  Antichain members;                 // Λ_j or Γ_j
  std::vector<Word> psi;             // Ψ_j (Case II), lexicographic
  std::vector<Antichain> inner;      // Γ_j(σ) for σ ∈ psi
  std::size_t count = 0;             // φ_j or M_j
};

ExplicitFamily explicit_family(const CondensationSystem& cs, int j, std::size_t cap = std::size_t{1} << 22);

struct BoundCheck {
  std::string name;
  int j;
  bool holds;
  std::string detail;
};

// Count and depth bounds, Σ p over Λ_j and the Σμ(E_σ)log s_σ growth bound for Case I;
// the M_j bounds, Ψ_j membership and mass closure for Case II. `next` is the
// family at j+1 for the ratio bounds.
std::vector<BoundCheck> check_count_bounds(const CondensationSystem& cs, const LevelFamily& family,
                                           const LevelFamily* next = nullptr);

struct RatioValue {
  std::string kind;  // "d", "eta" or "xi"
  int index;
  double numerator;
  double denominator;
  double value;
  // ξ_j only: T_j(1..3) and R_j(1..3)
  std::vector<double> t_parts;
  std::vector<double> r_parts;
  double c_diameter = 0;  // |C| used in R_j
  mpz_class count;
  int min_depth = 0;
  int max_depth = 0;
};

RatioValue ratio_dk(const CondensationSystem& cs, int k);
RatioValue ratio_eta(const CondensationSystem& cs, int j);
RatioValue ratio_xi(const CondensationSystem& cs, int j);
RatioValue ratio_eta(const CondensationSystem& cs, const LevelFamily& family);
RatioValue ratio_xi(const CondensationSystem& cs, const LevelFamily& family);

// |C| relative to |K|: diameters of the certified enclosures.
double relative_c_diameter(const CondensationSystem& cs);

// Σ_{σ∈Λ_j} μ(E_σ) log s_σ (Case I) and Σ_{σ∈Λ_j} μ(E_σ), exact.
double lambda_log_s_sum(const CondensationSystem& cs, const LevelFamily& family);
Rational lambda_mass_sum(const CondensationSystem& cs, const LevelFamily& family);

// Case II: Σ_{Ψ_j}Σ_{Γ_j(σ)} p₀p_σt_ρ + Σ_{Γ_j} p_σ, exact.
Rational gamma_mass_closure(const CondensationSystem& cs, const LevelFamily& family);

struct LogIdentity {
  double lhs;  // l₀ Σ t_ρ log t_ρ
  double rhs;  // u₀ Σ t_ρ log c_ρ
};

// Requires a maximal antichain; throws std::invalid_argument otherwise.
LogIdentity antichain_log_identity(const std::vector<double>& t, const std::vector<double>& c, const Antichain& gamma);

struct ConvergenceRow {
  int j;
  mpz_class count;
  int min_depth;
  int max_depth;
  double value;
  double deviation;
  double scaled;
};

struct ConvergenceReport {
  std::string kind;
  double d0;
  std::vector<ConvergenceRow> rows;
  double first_half_max = 0;
  double second_half_max = 0;
  bool identically_zero = false;
  bool pass = false;
};

// kind ∈ {"d", "eta", "xi"}; j·|value − d₀| must satisfy
// max over [jmax/2, jmax] ≤ 1.2 × max over [1, jmax/2], or vanish identically.
ConvergenceReport convergence_report(const CondensationSystem& cs, const std::string& kind, int jmax);
std::string convergence_csv_header();
std::string convergence_csv(const ConvergenceReport& report);

struct CoverFamily {
  Rational eps;
  Antichain s_eps;                 // S_ε on the outer ratios
  std::vector<Word> psi;           // Ψ(ε)
  std::vector<Antichain> t_eps;    // T_ε(σ) for σ ∈ psi
};

// Case II; ε ∈ (0, 1].
CoverFamily cover_family(const CondensationSystem& cs, const Rational& eps, std::size_t cap = std::size_t{1} << 22);
// Checks every member against its defining inequality and the diameter sandwich.
std::vector<BoundCheck> check_cover_family(const CondensationSystem& cs, const CoverFamily& cover);

}  // namespace fqz
