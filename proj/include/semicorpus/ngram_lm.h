// Copyright 2026 The semicorpus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEMICORPUS_NGRAM_LM_H_
#define SEMICORPUS_NGRAM_LM_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "semicorpus/tokens.h"

namespace semicorpus {

inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr std::string_view kUnk = "<unk>";
// ARPA convention for "probability zero".
inline constexpr double kLog10Zero = -99.0;

using WordId = std::int32_t;
inline constexpr WordId kNoWord = -1;

class Vocabulary {
 public:
  // Always contains <s>, </s> and <unk>.
  Vocabulary();

  WordId Add(std::string_view word);
  WordId Find(std::string_view word) const;  // kNoWord if absent
  // Unknown words resolve to <unk>.
  WordId Map(std::string_view word) const;
  const std::string &Word(WordId id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }

  WordId bos() const { return bos_; }
  WordId eos() const { return eos_; }
  WordId unk() const { return unk_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
  WordId bos_, eos_, unk_;
};

struct NGramKeyHash {
  std::size_t operator()(const std::vector<WordId> &key) const noexcept;
};

struct NGramEntry {
  double log10_prob = 0.0;
  std::optional<double> log10_backoff;

  bool operator==(const NGramEntry &) const = default;
};

// Backoff n-gram model in ARPA form: log10 probabilities for every stored
// n-gram and log10 backoff weights for stored histories.
class NGramModel {
 public:
  using Table = std::unordered_map<std::vector<WordId>, NGramEntry, NGramKeyHash>;

  NGramModel(int order, Vocabulary vocab);

  int order() const { return order_; }
  const Vocabulary &vocab() const { return vocab_; }

  // Table of n-grams of length n, 1 <= n <= order.
  const Table &table(int n) const { return tables_[n - 1]; }
  void Set(std::vector<WordId> ngram, NGramEntry entry);
  const NGramEntry *Find(std::span<const WordId> ngram) const;

  // log10 p(word | history) by the backoff chain. Out-of-vocabulary tokens
  // resolve to <unk>; only the last order-1 history tokens matter.
  double Log10Prob(std::string_view word, const Tokens &history) const;
  double Log10Prob(WordId word, std::span<const WordId> history) const;

  // Every stored n-gram as token strings, each order sorted lexicographically.
  std::vector<std::pair<Tokens, NGramEntry>> SortedEntries(int n) const;

  // Same order and the same n-grams (by spelling) with identical values.
  bool operator==(const NGramModel &other) const;

 private:
  int order_;
  Vocabulary vocab_;
  std::vector<Table> tables_;
};

// Word frequencies, mergeable across shards.
using WordCounts = std::map<std::string, std::uint64_t>;

void CountWords(const Tokens &sentence, WordCounts *counts);

// Keeps the vocab_cap most frequent words (ties by spelling); everything
// else becomes <unk>. nullopt keeps every word.
Vocabulary BuildVocabulary(const WordCounts &counts,
                           std::optional<std::size_t> vocab_cap);

// Raw n-gram counts over <s> w1 .. wn </s>, mergeable across shards built
// over the same vocabulary.
class NGramCounter {
 public:
  NGramCounter(const Vocabulary &vocab, int order);

  void AddSentence(const Tokens &sentence);
  void Merge(const NGramCounter &other);

  int order() const { return order_; }
  const Vocabulary &vocab() const { return *vocab_; }
  const std::map<std::vector<WordId>, std::uint64_t> &counts(int n) const {
    return counts_[n - 1];
  }

 private:
  const Vocabulary *vocab_;
  int order_;
  std::vector<std::map<std::vector<WordId>, std::uint64_t>> counts_;
};

struct TrainOptions {
  int order = 5;
  std::optional<std::size_t> vocab_cap = 125000;
  // Absolute discount for orders >= 2; nullopt derives n1 / (n1 + 2 n2)
  // per order from count-of-counts.
  std::optional<double> discount;
};

// Interpolated Kneser-Ney. The highest order uses raw counts, lower orders
// use continuation counts (n-grams starting with <s> keep raw counts), and
// the unigram level is the undiscounted continuation distribution.
NGramModel Estimate(const NGramCounter &counter, std::optional<double> discount);

// Throws Error(kValidation) on an empty corpus, order < 1 or a discount
// outside (0, 1).
NGramModel TrainModel(const std::vector<Tokens> &corpus,
                      const TrainOptions &options);

// Discounts actually used per order (index 0 is the unigram level, always 0).
std::vector<double> KneserNeyDiscounts(const NGramCounter &counter,
                                       std::optional<double> discount);

struct PerplexityScore {
  std::string utterance_id;
  double ppl = 0.0;
  double log10_prob = 0.0;   // sum over scored events
  std::size_t token_count = 0;  // words, excluding </s>
  std::size_t oov_count = 0;
};

// Scores every token plus </s>, with <s> as context only:
// ppl = 10^(-log10_prob / (token_count + 1)).
PerplexityScore Perplexity(const NGramModel &model, const Tokens &tokens,
                           std::string utterance_id = {});

std::string WriteArpa(const NGramModel &model);
// Throws ParseError on malformed headers, count mismatches and non-numeric
// fields.
NGramModel ReadArpa(std::string_view document);

}  // namespace semicorpus

#endif  // SEMICORPUS_NGRAM_LM_H_
