#pragma once

// Words grouped by symbol counts. Multiplicative weights are constant on a
// class, and threshold membership {w(σ⁻) ≥ ε > w(σ)} depends only on the
// counts of σ⁻ and the last symbol, so whole families can be counted and
// summed without listing their words.

#include "fqz/symbolic.hpp"

#include <gmpxx.h>

#include <span>
#include <vector>

namespace fqz {

struct CountClass {
  std::vector<int> counts;  // occurrences of each symbol 1..N
  int last = 0;             // last symbol for antichain classes, 0 for prefix classes
  mpz_class multiplicity;   // number of words in the class

  int length() const;
};

mpz_class multinomial(std::span<const int> counts);

struct ThresholdProfile {
  int alphabet = 0;
  // Classes of words with w(σ) ≥ ε, by length then counts. These are exactly
  // the proper prefixes of the antichain members, θ included.
  std::vector<CountClass> interior;
  // Member classes: counts of σ (including the last symbol) and the last symbol.
  std::vector<CountClass> members;
  mpz_class cardinality;
  int min_length = 0;
  int max_length = 0;
};

// Throws std::length_error when more than `class_cap` classes would be produced.
ThresholdProfile threshold_profile(const WeightThreshold& threshold, std::size_t class_cap = std::size_t{1} << 22);

// Ω_k as a profile: interior holds the classes of lengths < k, members those of length k (last = 0).
ThresholdProfile level_profile(int alphabet, int k);

// Σ counts[i]·log w_i
double class_log_weight(const std::vector<double>& log_weights, std::span<const int> counts);
// Π w_i^{counts[i]}
Rational class_weight(const std::vector<Rational>& weights, std::span<const int> counts);

}  // namespace fqz
