#include "fqz/families.hpp"

#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace fqz {

int CountClass::length() const { return std::accumulate(counts.begin(), counts.end(), 0); }

mpz_class multinomial(std::span<const int> counts) {
  mpz_class result = 1;
  unsigned long total = 0;
  for (int c : counts) {
    if (c < 0) throw std::invalid_argument("negative count");
    mpz_class binom;
    total += static_cast<unsigned long>(c);
    mpz_bin_uiui(binom.get_mpz_t(), total, static_cast<unsigned long>(c));
    result *= binom;
  }
  return result;
}

double class_log_weight(const std::vector<double>& log_weights, std::span<const int> counts) {
  double total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i]) total += counts[i] * log_weights[i];
  return total;
}

Rational class_weight(const std::vector<Rational>& weights, std::span<const int> counts) {
  Rational total(1);
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i]) total *= pow(weights[i], counts[i]);
  return total;
}

ThresholdProfile threshold_profile(const WeightThreshold& threshold, std::size_t class_cap) {
  const int n = static_cast<int>(threshold.factors());
  ThresholdProfile out;
  out.alphabet = n;
  out.min_length = std::numeric_limits<int>::max();
  std::vector<double> logs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) logs[static_cast<std::size_t>(i)] = threshold.log_weight(static_cast<std::size_t>(i));

  std::map<std::vector<int>, double> level{{std::vector<int>(static_cast<std::size_t>(n), 0), 0.0}};
  if (threshold.below(level.begin()->first, 0.0)) throw std::invalid_argument("threshold must be ≤ 1");
  while (!level.empty()) {
    std::map<std::vector<int>, double> next;
    for (const auto& [counts, logw] : level) {
      out.interior.push_back(CountClass{counts, 0, multinomial(counts)});
      const mpz_class& mult = out.interior.back().multiplicity;
      for (int i = 0; i < n; ++i) {
        std::vector<int> child = counts;
        ++child[static_cast<std::size_t>(i)];
        double child_log = logw + logs[static_cast<std::size_t>(i)];
        if (threshold.below(child, child_log)) {
          const int len = out.interior.back().length() + 1;
          out.members.push_back(CountClass{std::move(child), i + 1, mult});
          out.cardinality += mult;
          out.min_length = std::min(out.min_length, len);
          out.max_length = std::max(out.max_length, len);
        } else {
          next.emplace(std::move(child), child_log);
        }
      }
      if (out.interior.size() + out.members.size() > class_cap)
        throw std::length_error("threshold family exceeds " + std::to_string(class_cap) + " count classes");
    }
    level = std::move(next);
  }
  return out;
}

ThresholdProfile level_profile(int alphabet, int k) {
  if (alphabet < 1 || k < 0) throw std::invalid_argument("level_profile: invalid arguments");
  ThresholdProfile out;
  out.alphabet = alphabet;
  out.min_length = out.max_length = k;
  std::vector<std::vector<int>> level{std::vector<int>(static_cast<std::size_t>(alphabet), 0)};
  for (int len = 0;; ++len) {
    auto& target = len == k ? out.members : out.interior;
    for (auto& counts : level) {
      mpz_class mult = multinomial(counts);
      if (len == k) out.cardinality += mult;
      target.push_back(CountClass{counts, 0, mult});
    }
    if (len == k) break;
    std::map<std::vector<int>, bool> next;
    for (const auto& counts : level)
      for (int i = 0; i < alphabet; ++i) {
        auto child = counts;
        ++child[static_cast<std::size_t>(i)];
        next.emplace(std::move(child), true);
      }
    level.clear();
    for (auto& [counts, unused] : next) level.push_back(counts);
  }
  return out;
}

}  // namespace fqz
