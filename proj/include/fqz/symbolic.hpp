#pragma once

// Finite words over {1..N}, prefix order, maximal antichains and the
// threshold construction {σ : w(σ⁻) ≥ ε > w(σ)} for multiplicative weights.

#include "fqz/rational.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fqz {

class Word {
 public:
  Word() = default;
  explicit Word(int alphabet_size);
  Word(int alphabet_size, std::vector<int> symbols);

  int alphabet() const { return alphabet_; }
  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  // Symbol at 0-based position i, in [1, alphabet()].
  int operator[](std::size_t i) const { return symbols_[i]; }
  std::span<const std::uint8_t> symbols() const { return symbols_; }

  // σ⁻; the empty word has no parent.
  Word parent() const;
  // σ∗i
  Word child(int symbol) const;
  void push_back(int symbol);
  void pop_back() { symbols_.pop_back(); }

  // "121" when alphabet() ≤ 9, else "1-2-1". The empty word is "".
  std::string str() const;
  static Word parse(std::string_view text, int alphabet_size);

  // Alphabet first, then lexicographic with prefixes first (depth-first preorder).
  friend auto operator<=>(const Word&, const Word&) = default;
  friend bool operator==(const Word&, const Word&) = default;

 private:
  int alphabet_ = 1;
  std::vector<std::uint8_t> symbols_;
};

enum class Relation { PredecessorOf, DescendantOf, Equal, Incomparable };

Word concat(const Word& a, const Word& b);
// σ|_n
Word truncate(const Word& a, std::size_t n);
// σ^{(l)}_{-h} = (σ_{h+1}, ..., σ_n); requires h < |σ| (h = 0 returns σ).
Word suffix(const Word& a, std::size_t h);
Relation relate(const Word& a, const Word& b);
bool is_prefix(const Word& a, const Word& b);

// Γ(σ,h): all words of length |σ|+h having σ as a prefix, lexicographic.
std::vector<Word> descendants(const Word& sigma, int h);
// All words of length n over {1..alphabet}, lexicographic.
std::vector<Word> all_words(int alphabet_size, int n);

// Finite antichain, members kept in lexicographic order.
class Antichain {
 public:
  Antichain() = default;
  // Throws std::invalid_argument if two members are comparable or alphabets differ.
  Antichain(int alphabet_size, std::vector<Word> members);

  int alphabet() const { return alphabet_; }
  const std::vector<Word>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  int min_length() const { return min_len_; }
  int max_length() const { return max_len_; }

  bool contains(const Word& w) const;
  // Member that is a predecessor of `w`, if any.
  std::optional<Word> predecessor_of(const Word& w) const;
  // Every infinite word has a predecessor in the set; checked exactly via
  // Σ N^{-|σ|} = 1 (valid because members are pairwise incomparable).
  bool is_maximal() const;

 private:
  int alphabet_ = 1;
  std::vector<Word> members_;
  int min_len_ = 0;
  int max_len_ = 0;
};

// Λ*_Υ: descendants of the depth-l(Υ) words that have a proper descendant in Υ,
// i.e. the proper prefixes of members with length ≥ l(Υ). Lexicographic.
std::vector<Word> lambda_star(const Antichain& upsilon);
// All proper prefixes (including θ) of members: (∪_{h<l(Υ)} Ω_h) ∪ Λ*_Υ.
std::vector<Word> proper_prefixes(const Antichain& upsilon);
// True if some member of `upsilon` is a proper descendant of `sigma`.
bool has_proper_descendant_in(const Word& sigma, const Antichain& upsilon);

// Decides Π w_k^{c_k} < ε for multiplicative weights given by a count vector.
// Comparisons run on log-weights; inside a narrow band around the threshold
// they are redone with exact rationals when those are available, so the
// strict/weak boundary is honoured exactly for rational inputs.
class WeightThreshold {
 public:
  WeightThreshold(std::vector<Rational> weights, Rational threshold);
  WeightThreshold(std::vector<double> weights, double threshold);

  std::size_t factors() const { return log_weights_.size(); }
  double log_weight(std::size_t k) const { return log_weights_[k]; }
  double log_threshold() const { return log_threshold_; }
  bool exact() const { return exact_; }

  // `log_weight` must be Σ c_k log w_k (accumulated by the caller).
  bool below(std::span<const int> counts, double log_weight) const;

 private:
  std::vector<double> log_weights_;
  double log_threshold_;
  bool exact_;
  std::vector<Rational> weights_;
  Rational threshold_;
  mutable std::map<std::vector<int>, bool> memo_;
};

// {σ ∈ Ω* : w(σ⁻) ≥ ε > w(σ)}, enumerated depth-first in lexicographic order.
// Weights must lie in (0,1), ε in (0,1]. Throws std::invalid_argument otherwise
// and std::length_error when more than `cap` members would be produced.
Antichain threshold_antichain(const std::vector<Rational>& weights, const Rational& eps,
                              std::size_t cap = std::size_t{1} << 24);
Antichain threshold_antichain(const std::vector<double>& weights, double eps,
                              std::size_t cap = std::size_t{1} << 24);

// Maximal antichain grown from {θ} by `splits` random replacements of a member
// by its children; members deeper than `max_length` are not split.
Antichain random_maximal_antichain(int alphabet_size, std::uint64_t seed, int splits, int max_length = 8);

// Product of per-symbol weights along a word.
template <class T>
T word_weight(const std::vector<T>& weights, const Word& w) {
  T r(1);
  for (auto s : w.symbols()) r *= weights[static_cast<std::size_t>(s) - 1];
  return r;
}

}  // namespace fqz
