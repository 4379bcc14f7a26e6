#include "fqz/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

namespace fqz {

namespace {

void check_alphabet(int n) {
  if (n < 1 || n > 255) throw std::invalid_argument("alphabet size must be in [1,255]");
}

void check_same_alphabet(const Word& a, const Word& b) {
  if (a.alphabet() != b.alphabet()) throw std::invalid_argument("alphabet mismatch");
}

}  // namespace

Word::Word(int alphabet_size) : alphabet_(alphabet_size) { check_alphabet(alphabet_size); }

Word::Word(int alphabet_size, std::vector<int> symbols) : alphabet_(alphabet_size) {
  check_alphabet(alphabet_size);
  symbols_.reserve(symbols.size());
  for (int s : symbols) push_back(s);
}

Word Word::parent() const {
  if (empty()) throw std::out_of_range("the empty word has no parent");
  Word w = *this;
  w.symbols_.pop_back();
  return w;
}

Word Word::child(int symbol) const {
  Word w = *this;
  w.push_back(symbol);
  return w;
}

void Word::push_back(int symbol) {
  if (symbol < 1 || symbol > alphabet_)
    throw std::invalid_argument("symbol " + std::to_string(symbol) + " outside [1," +
                                std::to_string(alphabet_) + "]");
  symbols_.push_back(static_cast<std::uint8_t>(symbol));
}

std::string Word::str() const {
  std::string out;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (alphabet_ > 9 && i > 0) out.push_back('-');
    out += std::to_string(symbols_[i]);
  }
  return out;
}

Word Word::parse(std::string_view text, int alphabet_size) {
  Word w(alphabet_size);
  if (text.empty()) return w;
  if (alphabet_size <= 9 && text.find('-') == std::string_view::npos) {
    for (char c : text) {
      if (c < '0' || c > '9') throw std::invalid_argument("bad word '" + std::string(text) + "'");
      w.push_back(c - '0');
    }
    return w;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    auto dash = text.find('-', start);
    auto piece = text.substr(start, dash == std::string_view::npos ? std::string_view::npos : dash - start);
    if (piece.empty()) throw std::invalid_argument("bad word '" + std::string(text) + "'");
    int v = 0;
    for (char c : piece) {
      if (c < '0' || c > '9') throw std::invalid_argument("bad word '" + std::string(text) + "'");
      v = v * 10 + (c - '0');
    }
    w.push_back(v);
    if (dash == std::string_view::npos) break;
    start = dash + 1;
  }
  return w;
}

Word concat(const Word& a, const Word& b) {
  check_same_alphabet(a, b);
  Word w = a;
  for (auto s : b.symbols()) w.push_back(s);
  return w;
}

Word truncate(const Word& a, std::size_t n) {
  if (n > a.size()) throw std::out_of_range("truncate: n exceeds word length");
  Word w(a.alphabet());
  for (std::size_t i = 0; i < n; ++i) w.push_back(a[i]);
  return w;
}

Word suffix(const Word& a, std::size_t h) {
  if (h > 0 && h >= a.size()) throw std::out_of_range("suffix: h must be < |σ|");
  Word w(a.alphabet());
  for (std::size_t i = h; i < a.size(); ++i) w.push_back(a[i]);
  return w;
}

bool is_prefix(const Word& a, const Word& b) {
  check_same_alphabet(a, b);
  if (a.size() > b.size()) return false;
  return std::equal(a.symbols().begin(), a.symbols().end(), b.symbols().begin());
}

Relation relate(const Word& a, const Word& b) {
  check_same_alphabet(a, b);
  if (a == b) return Relation::Equal;
  if (is_prefix(a, b)) return Relation::PredecessorOf;
  if (is_prefix(b, a)) return Relation::DescendantOf;
  return Relation::Incomparable;
}

std::vector<Word> descendants(const Word& sigma, int h) {
  if (h < 1) throw std::invalid_argument("descendants: h must be ≥ 1");
  std::vector<Word> out{sigma};
  for (int level = 0; level < h; ++level) {
    std::vector<Word> next;
    next.reserve(out.size() * static_cast<std::size_t>(sigma.alphabet()));
    for (const auto& w : out)
      for (int i = 1; i <= sigma.alphabet(); ++i) next.push_back(w.child(i));
    out = std::move(next);
  }
  return out;
}

std::vector<Word> all_words(int alphabet_size, int n) {
  if (n == 0) return {Word(alphabet_size)};
  return descendants(Word(alphabet_size), n);
}

Antichain::Antichain(int alphabet_size, std::vector<Word> members)
    : alphabet_(alphabet_size), members_(std::move(members)) {
  check_alphabet(alphabet_size);
  std::sort(members_.begin(), members_.end());
  for (const auto& m : members_)
    if (m.alphabet() != alphabet_) throw std::invalid_argument("antichain: alphabet mismatch");
  // In lexicographic order a comparable pair always has a comparable adjacent pair.
  for (std::size_t i = 1; i < members_.size(); ++i)
    if (is_prefix(members_[i - 1], members_[i]))
      throw std::invalid_argument("not an antichain: " + members_[i - 1].str() + " ⪯ " + members_[i].str());
  if (!members_.empty()) {
    min_len_ = static_cast<int>(members_.front().size());
    max_len_ = min_len_;
    for (const auto& m : members_) {
      min_len_ = std::min(min_len_, static_cast<int>(m.size()));
      max_len_ = std::max(max_len_, static_cast<int>(m.size()));
    }
  }
}

bool Antichain::contains(const Word& w) const {
  return std::binary_search(members_.begin(), members_.end(), w);
}

std::optional<Word> Antichain::predecessor_of(const Word& w) const {
  // The candidate predecessor is the largest member ≤ w in lexicographic order.
  auto it = std::upper_bound(members_.begin(), members_.end(), w);
  if (it == members_.begin()) return std::nullopt;
  --it;
  if (is_prefix(*it, w)) return *it;
  return std::nullopt;
}

bool Antichain::is_maximal() const {
  if (members_.empty()) return false;
  std::vector<unsigned long> per_length(static_cast<std::size_t>(max_len_) + 1, 0);
  for (const auto& m : members_) ++per_length[m.size()];
  mpz_class n(alphabet_), total(0), scale;
  for (int len = 0; len <= max_len_; ++len) {
    mpz_pow_ui(scale.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(max_len_ - len));
    total += scale * per_length[static_cast<std::size_t>(len)];
  }
  mpz_pow_ui(scale.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(max_len_));
  return total == scale;
}

std::vector<Word> proper_prefixes(const Antichain& upsilon) {
  std::vector<Word> out;
  for (const auto& m : upsilon.members())
    for (std::size_t len = 0; len < m.size(); ++len) out.push_back(truncate(m, len));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Word> lambda_star(const Antichain& upsilon) {
  auto all = proper_prefixes(upsilon);
  std::erase_if(all, [&](const Word& w) { return static_cast<int>(w.size()) < upsilon.min_length(); });
  return all;
}

bool has_proper_descendant_in(const Word& sigma, const Antichain& upsilon) {
  auto it = std::upper_bound(upsilon.members().begin(), upsilon.members().end(), sigma);
  return it != upsilon.members().end() && is_prefix(sigma, *it) && *it != sigma;
}

// ---------------------------------------------------------------------------

WeightThreshold::WeightThreshold(std::vector<Rational> weights, Rational threshold)
    : log_threshold_(std::log(to_double(threshold))), exact_(true), weights_(std::move(weights)),
      threshold_(std::move(threshold)) {
  if (threshold_ <= 0) throw std::invalid_argument("threshold must be positive");
  for (const auto& w : weights_) {
    if (w <= 0) throw std::invalid_argument("weights must be positive");
    log_weights_.push_back(std::log(to_double(w)));
  }
}

WeightThreshold::WeightThreshold(std::vector<double> weights, double threshold)
    : log_threshold_(std::log(threshold)), exact_(false) {
  if (!(threshold > 0)) throw std::invalid_argument("threshold must be positive");
  for (double w : weights) {
    if (!(w > 0)) throw std::invalid_argument("weights must be positive");
    log_weights_.push_back(std::log(w));
  }
}

bool WeightThreshold::below(std::span<const int> counts, double log_weight) const {
  const double band = 1e-9 * (1.0 + std::abs(log_threshold_));
  if (!exact_ || std::abs(log_weight - log_threshold_) > band) return log_weight < log_threshold_;
  std::vector<int> key(counts.begin(), counts.end());
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  Rational product(1);
  for (std::size_t k = 0; k < key.size(); ++k) product *= pow(weights_[k], key[k]);
  bool result = product < threshold_;
  memo_.emplace(std::move(key), result);
  return result;
}

namespace {

template <class T>
void check_threshold_inputs(const std::vector<T>& weights, const T& eps) {
  if (weights.empty()) throw std::invalid_argument("threshold_antichain: no weights");
  for (const auto& w : weights)
    if (!(w > 0) || !(w < 1)) throw std::invalid_argument("threshold_antichain: weights must lie in (0,1)");
  if (!(eps > 0) || eps > 1) throw std::invalid_argument("threshold_antichain: eps must lie in (0,1]");
}

Antichain walk_threshold(const WeightThreshold& test, int alphabet, std::size_t cap) {
  std::vector<Word> members;
  std::vector<int> counts(static_cast<std::size_t>(alphabet), 0);
  Word path(alphabet);
  std::function<void(double)> visit = [&](double log_w) {
    for (int i = 1; i <= alphabet; ++i) {
      double child_log = log_w + test.log_weight(static_cast<std::size_t>(i - 1));
      ++counts[static_cast<std::size_t>(i - 1)];
      path.push_back(i);
      if (test.below(counts, child_log)) {
        if (members.size() >= cap)
          throw std::length_error("threshold antichain exceeds cap of " + std::to_string(cap) + " members");
        members.push_back(path);
      } else {
        visit(child_log);
      }
      path.pop_back();
      --counts[static_cast<std::size_t>(i - 1)];
    }
  };
  visit(0.0);
  return Antichain(alphabet, std::move(members));
}

}  // namespace

Antichain threshold_antichain(const std::vector<Rational>& weights, const Rational& eps, std::size_t cap) {
  check_threshold_inputs(weights, eps);
  WeightThreshold test(weights, eps);
  return walk_threshold(test, static_cast<int>(weights.size()), cap);
}

Antichain threshold_antichain(const std::vector<double>& weights, double eps, std::size_t cap) {
  check_threshold_inputs(weights, eps);
  WeightThreshold test(weights, eps);
  return walk_threshold(test, static_cast<int>(weights.size()), cap);
}

Antichain random_maximal_antichain(int alphabet_size, std::uint64_t seed, int splits, int max_length) {
  check_alphabet(alphabet_size);
  std::mt19937_64 rng(seed);
  std::vector<Word> members{Word(alphabet_size)};
  for (int k = 0; k < splits; ++k) {
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < members.size(); ++i)
      if (static_cast<int>(members[i].size()) < max_length) open.push_back(i);
    if (open.empty()) break;
    const std::size_t pick = open[static_cast<std::size_t>(rng() % open.size())];
    const Word parent = members[pick];
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(pick));
    for (int i = 1; i <= alphabet_size; ++i) members.push_back(parent.child(i));
  }
  return Antichain(alphabet_size, std::move(members));
}

}  // namespace fqz
