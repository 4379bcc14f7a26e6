#pragma once

// Diagnostic suites behind `fqz diagnose`: each returns one row per check.

#include "fqz/report.hpp"
#include "fqz/systems.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fqz {

struct CheckRow {
  std::string check;
  std::string subject;
  int j = 0;
  bool pass = false;
  double slack = 0;  // distance to failure; ≥ 0 when the check passes
  std::string detail;
};

struct SuiteOptions {
  int jmax = 10;
  int antichains = 50;     // random maximal antichains per system
  int max_word_length = 3; // identity suite: |σ| ≤ this
  int max_h = 5;           // identity suite: h ≤ this
  std::uint64_t seed = 1;
};

const std::vector<std::string>& suite_names();

// Mass partition over random maximal antichains and the μ⁽¹⁾ descendant sum.
std::vector<CheckRow> mass_suite(const CondensationSystem& cs, const SuiteOptions& options);
// Count and depth bounds for j = 1..jmax.
std::vector<CheckRow> antichain_suite(const CondensationSystem& cs, const SuiteOptions& options);
// Δ₁/Δ₂ closed forms against enumeration and the antichain log identity.
std::vector<CheckRow> identity_suite(const CondensationSystem& cs, const SuiteOptions& options);
// j·|d_j − d₀|, j·|η_j − d₀| (Case I) or j·|ξ_j − d₀| (Case II) up to jmax.
std::vector<CheckRow> convergence_suite(const CondensationSystem& cs, const SuiteOptions& options);
// Ball-mass exponent and the fitted bound over ε = 2^{-k}, k = 3..12.
std::vector<CheckRow> ball_suite(const CondensationSystem& cs, const SuiteOptions& options);

// Throws std::invalid_argument for an unknown suite name.
std::vector<CheckRow> run_suite(const CondensationSystem& cs, const std::string& suite, const SuiteOptions& options);

Table check_table(const std::vector<CheckRow>& rows);
bool all_pass(const std::vector<CheckRow>& rows);

}  // namespace fqz
