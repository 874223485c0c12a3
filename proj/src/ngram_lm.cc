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

#include "semicorpus/ngram_lm.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "semicorpus/error.h"

namespace semicorpus {

Vocabulary::Vocabulary() {
  bos_ = Add(kBos);
  eos_ = Add(kEos);
  unk_ = Add(kUnk);
}

WordId Vocabulary::Add(std::string_view word) {
  auto it = index_.find(std::string(word));
  if (it != index_.end()) return it->second;
  WordId id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  index_.emplace(words_.back(), id);
  return id;
}

WordId Vocabulary::Find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kNoWord : it->second;
}

WordId Vocabulary::Map(std::string_view word) const {
  WordId id = Find(word);
  return id == kNoWord ? unk_ : id;
}

std::size_t NGramKeyHash::operator()(
    const std::vector<WordId> &key) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (WordId w : key) {
    h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(w));
    h *= 1099511628211ull;
  }
  return h;
}

NGramModel::NGramModel(int order, Vocabulary vocab)
    : order_(order), vocab_(std::move(vocab)), tables_(order) {}

void NGramModel::Set(std::vector<WordId> ngram, NGramEntry entry) {
  tables_.at(ngram.size() - 1)[std::move(ngram)] = entry;
}

const NGramEntry *NGramModel::Find(std::span<const WordId> ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order_) return nullptr;
  const Table &t = tables_[ngram.size() - 1];
  auto it = t.find(std::vector<WordId>(ngram.begin(), ngram.end()));
  return it == t.end() ? nullptr : &it->second;
}

double NGramModel::Log10Prob(std::string_view word,
                             const Tokens &history) const {
  std::vector<WordId> ids;
  std::size_t keep = std::min<std::size_t>(history.size(), order_ - 1);
  for (std::size_t i = history.size() - keep; i < history.size(); ++i) {
    ids.push_back(vocab_.Map(history[i]));
  }
  return Log10Prob(vocab_.Map(word), ids);
}

double NGramModel::Log10Prob(WordId word,
                             std::span<const WordId> history) const {
  std::size_t keep = std::min<std::size_t>(history.size(), order_ - 1);
  std::vector<WordId> key(history.end() - keep, history.end());
  key.push_back(word);
  double backoff = 0.0;
  for (std::size_t start = 0; start < key.size(); ++start) {
    std::span<const WordId> ngram(key.begin() + start, key.end());
    if (const NGramEntry *e = Find(ngram)) return backoff + e->log10_prob;
    if (ngram.size() > 1) {
      if (const NGramEntry *h = Find(ngram.first(ngram.size() - 1))) {
        backoff += h->log10_backoff.value_or(0.0);
      }
    }
  }
  return backoff + kLog10Zero;
}

std::vector<std::pair<Tokens, NGramEntry>> NGramModel::SortedEntries(
    int n) const {
  std::vector<std::pair<Tokens, NGramEntry>> out;
  out.reserve(tables_[n - 1].size());
  for (const auto &[key, entry] : tables_[n - 1]) {
    Tokens words;
    for (WordId id : key) words.push_back(vocab_.Word(id));
    out.emplace_back(std::move(words), entry);
  }
  std::sort(out.begin(), out.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });
  return out;
}

bool NGramModel::operator==(const NGramModel &other) const {
  if (order_ != other.order_) return false;
  for (int n = 1; n <= order_; ++n) {
    if (SortedEntries(n) != other.SortedEntries(n)) return false;
  }
  return true;
}

void CountWords(const Tokens &sentence, WordCounts *counts) {
  for (const auto &w : sentence) ++(*counts)[w];
}

Vocabulary BuildVocabulary(const WordCounts &counts,
                           std::optional<std::size_t> vocab_cap) {
  std::vector<std::pair<std::string, std::uint64_t>> words;
  for (const auto &[w, c] : counts) {
    if (w == kBos || w == kEos || w == kUnk) continue;
    words.emplace_back(w, c);
  }
  std::stable_sort(words.begin(), words.end(), [](const auto &a, const auto &b) {
    return a.second > b.second;
  });
  if (vocab_cap && words.size() > *vocab_cap) words.resize(*vocab_cap);
  std::sort(words.begin(), words.end());
  Vocabulary v;
  for (const auto &[w, c] : words) v.Add(w);
  return v;
}

NGramCounter::NGramCounter(const Vocabulary &vocab, int order)
    : vocab_(&vocab), order_(order), counts_(order) {}

void NGramCounter::AddSentence(const Tokens &sentence) {
  std::vector<WordId> ids;
  ids.reserve(sentence.size() + 2);
  ids.push_back(vocab_->bos());
  for (const auto &w : sentence) {
    WordId id = vocab_->Map(w);
    // Literal markers inside text carry no sentence-boundary meaning.
    if (id == vocab_->bos() || id == vocab_->eos()) id = vocab_->unk();
    ids.push_back(id);
  }
  ids.push_back(vocab_->eos());
  for (int n = 1; n <= order_; ++n) {
    for (std::size_t i = 0; i + n <= ids.size(); ++i) {
      std::vector<WordId> key(ids.begin() + i, ids.begin() + i + n);
      ++counts_[n - 1][std::move(key)];
    }
  }
}

void NGramCounter::Merge(const NGramCounter &other) {
  if (other.order_ != order_ || other.vocab_ != vocab_) {
    throw Error(ErrorCode::kValidation,
                "n-gram shards must share order and vocabulary");
  }
  for (int n = 0; n < order_; ++n) {
    for (const auto &[key, c] : other.counts_[n]) counts_[n][key] += c;
  }
}

namespace {

using CountTable = std::map<std::vector<WordId>, std::uint64_t>;

// Kneser-Ney adjusted counts: raw counts at the top order and for n-grams
// that begin with <s>, distinct left extensions everywhere else.
std::vector<CountTable> AdjustedCounts(const NGramCounter &counter) {
  const int order = counter.order();
  const WordId bos = counter.vocab().bos();
  std::vector<CountTable> adjusted(order);
  adjusted[order - 1] = counter.counts(order);
  for (int n = order - 1; n >= 1; --n) {
    CountTable &table = adjusted[n - 1];
    for (const auto &[key, c] : counter.counts(n)) {
      if (key.front() == bos) table[key] = c;
    }
    for (const auto &[key, c] : counter.counts(n + 1)) {
      std::vector<WordId> suffix(key.begin() + 1, key.end());
      if (suffix.front() == bos) continue;
      ++table[suffix];
    }
  }
  return adjusted;
}

std::vector<double> Discounts(const std::vector<CountTable> &adjusted,
                              std::optional<double> discount) {
  std::vector<double> d(adjusted.size(), 0.0);
  for (std::size_t n = 1; n < adjusted.size(); ++n) {
    if (discount) {
      d[n] = *discount;
      continue;
    }
    std::uint64_t n1 = 0, n2 = 0;
    for (const auto &[key, c] : adjusted[n]) {
      if (c == 1) ++n1;
      if (c == 2) ++n2;
    }
    d[n] = (n1 == 0 || n2 == 0)
               ? 0.5
               : static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2);
  }
  return d;
}

double ToLog10(double p) { return p > 0.0 ? std::log10(p) : kLog10Zero; }

}  // namespace

std::vector<double> KneserNeyDiscounts(const NGramCounter &counter,
                                       std::optional<double> discount) {
  return Discounts(AdjustedCounts(counter), discount);
}

NGramModel Estimate(const NGramCounter &counter,
                    std::optional<double> discount) {
  const int order = counter.order();
  const Vocabulary &vocab = counter.vocab();
  auto adjusted = AdjustedCounts(counter);
  auto d = Discounts(adjusted, discount);

  // Interpolated probabilities, linear domain, per order.
  std::vector<std::map<std::vector<WordId>, double>> prob(order);

  double total = 0.0;
  for (const auto &[key, c] : adjusted[0]) {
    if (key.front() != vocab.bos()) total += static_cast<double>(c);
  }
  for (WordId w = 0; w < static_cast<WordId>(vocab.size()); ++w) {
    if (w == vocab.bos()) continue;
    auto it = adjusted[0].find({w});
    double c = it == adjusted[0].end() ? 0.0 : static_cast<double>(it->second);
    prob[0][{w}] = total > 0.0 ? c / total : 0.0;
  }

  NGramModel model(order, vocab);
  std::map<std::vector<WordId>, double> backoff;  // linear gamma(h)

  for (int n = 2; n <= order; ++n) {
    struct HistoryStats {
      double sum = 0.0;
      double types = 0.0;
    };
    std::map<std::vector<WordId>, HistoryStats> hist;
    for (const auto &[key, c] : adjusted[n - 1]) {
      auto &h = hist[std::vector<WordId>(key.begin(), key.end() - 1)];
      h.sum += static_cast<double>(c);
      h.types += 1.0;
    }
    for (const auto &[key, c] : adjusted[n - 1]) {
      std::vector<WordId> h(key.begin(), key.end() - 1);
      std::vector<WordId> lower(key.begin() + 1, key.end());
      const HistoryStats &hs = hist[h];
      double gamma = d[n - 1] * hs.types / hs.sum;
      double p = std::max(static_cast<double>(c) - d[n - 1], 0.0) / hs.sum +
                 gamma * prob[n - 2].at(lower);
      prob[n - 1][key] = p;
    }
    for (const auto &[h, hs] : hist) {
      backoff[h] = d[n - 1] * hs.types / hs.sum;
    }
  }

  for (int n = 1; n <= order; ++n) {
    for (const auto &[key, p] : prob[n - 1]) {
      NGramEntry e;
      e.log10_prob = ToLog10(p);
      auto b = backoff.find(key);
      if (b != backoff.end()) e.log10_backoff = std::log10(b->second);
      model.Set(key, e);
    }
  }
  NGramEntry bos;
  bos.log10_prob = kLog10Zero;
  if (auto b = backoff.find({vocab.bos()}); b != backoff.end()) {
    bos.log10_backoff = std::log10(b->second);
  }
  model.Set({vocab.bos()}, bos);
  return model;
}

NGramModel TrainModel(const std::vector<Tokens> &corpus,
                      const TrainOptions &options) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kValidation, "cannot train on an empty corpus");
  }
  if (options.order < 1) {
    throw Error(ErrorCode::kValidation, "n-gram order must be >= 1");
  }
  if (options.discount) {
    double dv = *options.discount;
    bool ok = options.order == 1 ? (dv >= 0.0 && dv < 1.0)
                                 : (dv > 0.0 && dv < 1.0);
    if (!ok) {
      throw Error(ErrorCode::kValidation,
                  "discount must lie in (0, 1), got " + FormatDouble(dv));
    }
  }
  WordCounts words;
  for (const auto &s : corpus) CountWords(s, &words);
  Vocabulary vocab = BuildVocabulary(words, options.vocab_cap);
  NGramCounter counter(vocab, options.order);
  for (const auto &s : corpus) counter.AddSentence(s);
  return Estimate(counter, options.discount);
}

PerplexityScore Perplexity(const NGramModel &model, const Tokens &tokens,
                           std::string utterance_id) {
  const Vocabulary &vocab = model.vocab();
  PerplexityScore score;
  score.utterance_id = std::move(utterance_id);
  score.token_count = tokens.size();

  std::vector<WordId> context{vocab.bos()};
  auto score_word = [&](WordId w) {
    std::size_t keep = std::min<std::size_t>(context.size(),
                                             model.order() - 1);
    score.log10_prob += model.Log10Prob(
        w, std::span<const WordId>(context).last(keep));
    context.push_back(w);
  };
  for (const auto &t : tokens) {
    WordId id = vocab.Find(t);
    if (id == kNoWord || id == vocab.unk()) {
      ++score.oov_count;
      id = vocab.unk();
    }
    score_word(id);
  }
  score_word(vocab.eos());
  score.ppl = std::pow(
      10.0, -score.log10_prob / static_cast<double>(score.token_count + 1));
  return score;
}

std::string WriteArpa(const NGramModel &model) {
  std::string out = "\\data\\\n";
  for (int n = 1; n <= model.order(); ++n) {
    out += "ngram " + std::to_string(n) + "=" +
           std::to_string(model.table(n).size()) + "\n";
  }
  for (int n = 1; n <= model.order(); ++n) {
    out += "\n\\" + std::to_string(n) + "-grams:\n";
    for (const auto &[words, e] : model.SortedEntries(n)) {
      out += FormatDouble(e.log10_prob);
      out += "\t" + Join(words);
      if (e.log10_backoff) out += "\t" + FormatDouble(*e.log10_backoff);
      out += "\n";
    }
  }
  out += "\n\\end\\\n";
  return out;
}

NGramModel ReadArpa(std::string_view document) {
  std::vector<std::string_view> lines;
  {
    std::size_t pos = 0;
    while (pos <= document.size()) {
      std::size_t end = document.find('\n', pos);
      if (end == std::string_view::npos) end = document.size();
      std::string_view line = document.substr(pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      pos = end + 1;
    }
  }
  auto is_blank = [](std::string_view l) { return SplitWhitespace(l).empty(); };

  std::size_t i = 0;
  while (i < lines.size() && is_blank(lines[i])) ++i;
  if (i >= lines.size() || lines[i] != "\\data\\") {
    throw ParseError(i + 1, "missing \\data\\ header");
  }
  ++i;
  std::vector<std::size_t> declared;
  for (; i < lines.size() && !is_blank(lines[i]); ++i) {
    std::string_view l = lines[i];
    std::size_t eq = l.find('=');
    long long n = 0, c = 0;
    if (l.substr(0, 6) != "ngram " || eq == std::string_view::npos ||
        !ParseInt(l.substr(6, eq - 6), &n) || !ParseInt(l.substr(eq + 1), &c) ||
        n != static_cast<long long>(declared.size()) + 1 || c < 0) {
      throw ParseError(i + 1, "malformed count line '" + std::string(l) + "'");
    }
    declared.push_back(static_cast<std::size_t>(c));
  }
  if (declared.empty()) throw ParseError(i + 1, "no ngram counts in header");
  const int order = static_cast<int>(declared.size());

  struct Row {
    std::size_t line;
    double prob;
    Tokens words;
    std::optional<double> bow;
  };
  std::vector<std::vector<Row>> sections(order);
  int current = 0;
  bool ended = false;
  for (; i < lines.size(); ++i) {
    std::string_view l = lines[i];
    if (is_blank(l)) continue;
    if (l == "\\end\\") {
      ended = true;
      break;
    }
    if (l.front() == '\\') {
      std::string expect = "\\" + std::to_string(current + 1) + "-grams:";
      if (l != expect || current >= order) {
        throw ParseError(i + 1, "unexpected section '" + std::string(l) + "'");
      }
      ++current;
      continue;
    }
    if (current == 0) throw ParseError(i + 1, "n-gram outside a section");
    auto f = SplitWhitespace(l);
    const std::size_t n = static_cast<std::size_t>(current);
    if (f.size() != n + 1 && f.size() != n + 2) {
      throw ParseError(i + 1, "expected " + std::to_string(n) +
                                  " words in a " + std::to_string(n) +
                                  "-gram line");
    }
    Row row{i + 1, 0.0, {}, std::nullopt};
    if (!ParseDouble(f[0], &row.prob)) {
      throw ParseError(i + 1, "non-numeric probability '" + std::string(f[0]) + "'");
    }
    for (std::size_t k = 1; k <= n; ++k) row.words.emplace_back(f[k]);
    if (f.size() == n + 2) {
      double b = 0.0;
      if (!ParseDouble(f[n + 1], &b)) {
        throw ParseError(i + 1, "non-numeric backoff '" + std::string(f[n + 1]) + "'");
      }
      row.bow = b;
    }
    sections[current - 1].push_back(std::move(row));
  }
  if (!ended) throw ParseError(lines.size(), "missing \\end\\ marker");
  for (int n = 0; n < order; ++n) {
    if (sections[n].size() != declared[n]) {
      throw ParseError(i + 1, "count mismatch for " + std::to_string(n + 1) +
                                  "-grams: header says " +
                                  std::to_string(declared[n]) + ", body has " +
                                  std::to_string(sections[n].size()));
    }
  }

  Vocabulary vocab;
  for (const auto &row : sections[0]) vocab.Add(row.words[0]);
  NGramModel model(order, vocab);
  for (int n = 0; n < order; ++n) {
    for (const auto &row : sections[n]) {
      std::vector<WordId> key;
      for (const auto &w : row.words) {
        WordId id = vocab.Find(w);
        if (id == kNoWord) {
          throw ParseError(row.line, "word '" + w + "' missing from 1-grams");
        }
        key.push_back(id);
      }
      if (model.Find(key) != nullptr) {
        throw ParseError(row.line, "duplicate n-gram");
      }
      model.Set(std::move(key), NGramEntry{row.prob, row.bow});
    }
  }
  return model;
}

}  // namespace semicorpus
