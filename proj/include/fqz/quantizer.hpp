#pragma once

// Geometric-mean quantization error of μ: sampling, rigorous bracketing of
// ∫ log d(x,α) dμ(x), antichain codebooks, Lloyd-type descent, a 1-D grid
// oracle, certified lower bounds and coefficient tables.

#include "fqz/systems.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fqz {

enum class Target { Mu, Nu };

class Codebook {
 public:
  Codebook() = default;
  // Exact duplicates are dropped; the first occurrence keeps its position.
  explicit Codebook(std::vector<Vec> points);

  std::size_t size() const { return points_.size(); }
  int dim() const { return points_.empty() ? 0 : static_cast<int>(points_.front().size()); }
  const std::vector<Vec>& points() const { return points_; }
  // Distance from x to the nearest point.
  double distance(const Vec& x) const;

 private:
  std::vector<Vec> points_;
};

enum class BracketMethod { Rigorous, MonteCarlo };

struct ErrorBracket {
  double lower;
  double upper;
  BracketMethod method = BracketMethod::Rigorous;
  double stderr_mc = 0;     // Monte Carlo only
  bool converged = true;    // rigorous: upper − lower ≤ tol was reached
  std::size_t pieces = 0;   // rigorous: pieces in the final partition

  double mid() const { return (lower + upper) / 2; }
  double width() const { return upper - lower; }
};

struct BracketOptions {
  double tol = 1e-3;
  std::size_t max_pieces = std::size_t{1} << 21;
  Target target = Target::Mu;
};

// Encloses ∫ log d(x,α) dμ(x) (or dν). Stops at upper − lower ≤ tol or when the
// piece budget is spent, returning the best bracket with converged = false.
ErrorBracket log_dist_integral(const CondensationSystem& cs, const Codebook& codebook, const BracketOptions& options = {});

// Draws from μ (or ν) by unrolling the self-similarity equations; a draw stops
// once the composed ratio falls below `truncation_tol` and returns the image of
// the first map's fixed point under the composed map.
std::vector<Vec> sample_ism(const CondensationSystem& cs, std::uint64_t seed, std::size_t count,
                            double truncation_tol = 1e-12, Target target = Target::Mu);

// mean ± standard error of log d(x,α) over `samples` draws.
ErrorBracket monte_carlo_integral(const CondensationSystem& cs, const Codebook& codebook, std::size_t samples,
                                  std::uint64_t seed, Target target = Target::Mu);

enum class AnchorRule { CylinderCenter, AttractorFixedPoint };

// Case I: one point in each E_σ, σ ∈ Λ_j. Case II: one point in each f_σ(K),
// σ ∈ Γ_j, and in each f_σ(g_ρ(C)), σ ∈ Ψ_j, ρ ∈ Γ_j(σ).
Codebook codebook_from_antichain(const CondensationSystem& cs, int j, AnchorRule rule = AnchorRule::CylinderCenter,
                                 std::size_t cap = std::size_t{1} << 22);

// Upper bound on ê for the antichain codebook at level j:
// Case I Σ_{Λ_j} μ(E_σ) log s_σ, Case II ξ_j⁻¹(1 − (1−p₀)^{l₁ⱼ}) log q̲^j,
// each shifted by log of the support diameter.
double antichain_codebook_bound(const CondensationSystem& cs, int j);

struct QuantizerResult {
  Codebook codebook;
  ErrorBracket bracket;
  std::vector<std::string> notes;
};

struct LloydOptions {
  int iterations = 30;
  double inner_tol = 1e-7;  // golden-section interval tolerance, relative to the support diameter
  BracketOptions bracket;
};

// Alternates nearest-point assignment of discretization pieces with per-cell
// golden-section minimisation; an iteration is kept only if the bracket
// midpoint decreases.
QuantizerResult lloyd0(const CondensationSystem& cs, std::size_t n, const Codebook& init, const LloydOptions& options = {});

// n points at mass quantiles of a fine partition (1-D) or at the heaviest pieces.
Codebook quantile_codebook(const CondensationSystem& cs, std::size_t n, Target target = Target::Mu);

struct OracleResult {
  Codebook codebook;
  ErrorBracket bracket;
  double certified_lower;  // certified lower bound on ê_n
  double grid_slack;       // heuristic: objective change from moving the points by gridStep/2
};

// q = 1, n ≤ 4: exhaustive search over grid codebooks, then coordinate descent
// at gridStep/10 on the best 50, each scored with the rigorous bracket.
OracleResult oracle_optimal_1d(const CondensationSystem& cs, std::size_t n, double grid_step,
                               const BracketOptions& bracket = {});

// Lower bound on ê_n = inf over n-point codebooks, from partitions into
// isolated pieces: a codebook point can be near at most one piece.
double certified_lower_bound(const CondensationSystem& cs, std::size_t n, Target target = Target::Mu);

enum class QuantizeMethod { Antichain, Lloyd, Oracle };
std::string to_string(QuantizeMethod method);

struct CoefficientRow {
  int j;
  std::size_t n;
  std::string method;
  double e_lower;
  double e_upper;
  double coef_lower;
  double coef_upper;
  double seconds;
  double construction_bound;  // ê bound of the antichain construction
  bool converged;
};

struct CoefficientOptions {
  BracketOptions bracket;
  LloydOptions lloyd;
  double oracle_grid_step = 1.0 / 128;  // relative to the support diameter
  bool timing = false;
};

std::vector<CoefficientRow> coefficient_table(const CondensationSystem& cs, int j_min, int j_max, QuantizeMethod method,
                                              const CoefficientOptions& options = {});
std::string coefficient_csv_header();
std::string coefficient_csv_row(const CoefficientRow& row, bool timing);

struct SandwichRow {
  std::size_t n;
  std::size_t m;            // ⌊n/(N+1)⌋
  double lower_lhs;         // upper(ê_n μ)
  double lower_rhs;         // lower(ê_n ν) + p₀⁻¹ Σ p_i log s_i
  double upper_lhs;         // lower(ê_n μ)
  double upper_rhs;         // p₀ upper(ê_m ν) + (1−p₀) upper(ê_m μ) + Σ p_i log s_i
  bool lower_holds;
  bool upper_holds;         // vacuous (true) when m = 0
};

// Bracket-consistent checks of ê_n(μ) ≥ ê_n(ν) + p₀⁻¹Σ p_i log s_i and
// ê_n(μ) ≤ p₀ê_m(ν) + (1−p₀)ê_m(μ) + Σ p_i log s_i. s_i is the ratio of f_i.
std::vector<SandwichRow> sandwich_check(const CondensationSystem& cs, const std::vector<std::size_t>& n_list,
                                        const LloydOptions& options = {});

}  // namespace fqz
