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

#include "semicorpus/pipeline.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "semicorpus/error.h"

namespace semicorpus {

namespace fs = std::filesystem;

namespace {

fs::path Resolve(const fs::path &base, const std::string &p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

const nlohmann::json &Require(const nlohmann::json &doc, const char *key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) {
    throw Error(ErrorCode::kValidation,
                std::string("config: missing required key '") + key + "'");
  }
  return *it;
}

std::string RequirePath(const nlohmann::json &doc, const char *key) {
  const auto &v = Require(doc, key);
  if (!v.is_string()) {
    throw Error(ErrorCode::kValidation,
                std::string("config: '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

double ReadReal(const nlohmann::json &j, const char *key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (it->is_null()) return std::numeric_limits<double>::infinity();
  if (it->is_string() && it->get<std::string>() == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (!it->is_number()) {
    throw Error(ErrorCode::kValidation,
                std::string("config: '") + key + "' must be a number");
  }
  return it->get<double>();
}

long long ReadInt(const nlohmann::json &j, const char *key, long long fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) {
    throw Error(ErrorCode::kValidation,
                std::string("config: '") + key + "' must be an integer");
  }
  return it->get<long long>();
}

nlohmann::json Real(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

}  // namespace

Thresholds ThresholdsFromJson(const nlohmann::json &j) {
  Thresholds t;
  if (j.is_null()) return t;
  if (!j.is_object()) throw Error(ErrorCode::kValidation, "config: thresholds must be an object");
  t.mbr_max = ReadReal(j, "mbr_max", t.mbr_max);
  t.am_ppl_max = ReadReal(j, "am_ppl_max", t.am_ppl_max);
  t.lm_ppl_min = ReadReal(j, "lm_ppl_min", t.lm_ppl_min);
  t.lm_ppl_max = ReadReal(j, "lm_ppl_max", t.lm_ppl_max);
  t.min_tokens = static_cast<int>(ReadInt(j, "min_tokens", t.min_tokens));
  t.repetition_max = ReadReal(j, "repetition_max", t.repetition_max);
  t.degenerate_ppl_max = ReadReal(j, "degenerate_ppl_max", t.degenerate_ppl_max);
  t.Validate();
  return t;
}

nlohmann::json ThresholdsToJson(const Thresholds &t) {
  return {{"mbr_max", Real(t.mbr_max)},
          {"am_ppl_max", Real(t.am_ppl_max)},
          {"lm_ppl_min", Real(t.lm_ppl_min)},
          {"lm_ppl_max", Real(t.lm_ppl_max)},
          {"min_tokens", t.min_tokens},
          {"repetition_max", Real(t.repetition_max)},
          {"degenerate_ppl_max", Real(t.degenerate_ppl_max)}};
}

PipelineConfig ParseConfig(const nlohmann::json &doc, const fs::path &base) {
  if (!doc.is_object()) throw Error(ErrorCode::kValidation, "config must be a JSON object");
  PipelineConfig c;
  c.raw = doc;
  c.manifest = Resolve(base, RequirePath(doc, "manifest"));
  c.lattice_dir = Resolve(base, RequirePath(doc, "lattice_dir"));
  c.output_dir = Resolve(base, RequirePath(doc, "output_dir"));
  const auto &lm = Require(doc, "lm");
  if (!lm.is_object()) throw Error(ErrorCode::kValidation, "config: 'lm' must be an object");
  if (lm.contains("arpa")) c.lm.arpa = Resolve(base, RequirePath(lm, "arpa"));
  if (lm.contains("train_text")) {
    c.lm.train_text = Resolve(base, RequirePath(lm, "train_text"));
  }
  if (!c.lm.arpa && !c.lm.train_text) {
    throw Error(ErrorCode::kValidation, "config: 'lm' needs 'arpa' or 'train_text'");
  }
  c.lm.train.order = static_cast<int>(ReadInt(lm, "order", c.lm.train.order));
  if (lm.contains("vocab_cap")) {
    if (lm["vocab_cap"].is_null()) {
      c.lm.train.vocab_cap.reset();
    } else {
      c.lm.train.vocab_cap = static_cast<std::size_t>(ReadInt(lm, "vocab_cap", 0));
    }
  }
  if (lm.contains("discount")) c.lm.train.discount = ReadReal(lm, "discount", 0.5);
  if (doc.contains("rule_store")) c.rule_store = Resolve(base, RequirePath(doc, "rule_store"));
  if (doc.contains("lm_base_text")) {
    c.lm_base_text = Resolve(base, RequirePath(doc, "lm_base_text"));
  } else if (c.lm.train_text) {
    c.lm_base_text = c.lm.train_text;
  }
  c.thresholds = ThresholdsFromJson(doc.value("thresholds", nlohmann::json()));
  c.nbest = static_cast<int>(ReadInt(doc, "nbest", c.nbest));
  c.acoustic_scale = ReadReal(doc, "acoustic_scale", c.acoustic_scale);
  c.threads = static_cast<int>(ReadInt(doc, "threads", c.threads));
  if (c.nbest < 1) throw Error(ErrorCode::kValidation, "config: nbest must be >= 1");
  if (!(c.acoustic_scale > 0.0) || std::isinf(c.acoustic_scale)) {
    throw Error(ErrorCode::kValidation, "config: acoustic_scale must be positive");
  }
  if (c.threads < 1) throw Error(ErrorCode::kValidation, "config: threads must be >= 1");
  return c;
}

PipelineConfig LoadConfig(const fs::path &path) {
  auto doc = nlohmann::json::parse(ReadTextFile(path), nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::kParse, "config " + path.string() + " is not valid JSON");
  }
  return ParseConfig(doc, path.parent_path());
}

CorpusStats ComputeCorpusStats(std::span<const UtteranceRecord> records) {
  CorpusStats s;
  std::set<std::string> speakers, calls;
  double seconds = 0.0;
  for (const auto &r : records) {
    seconds += r.duration_seconds;
    speakers.insert(r.speaker_id);
    calls.insert(r.call_id);
    s.words += r.transcript.size();
  }
  s.hours = seconds / 3600.0;
  s.speakers = speakers.size();
  s.conversations = calls.size();
  s.utterances = records.size();
  return s;
}

nlohmann::json CorpusStatsToJson(const CorpusStats &s) {
  return {{"hours", s.hours},
          {"speakers", s.speakers},
          {"utterances", s.utterances},
          {"conversations", s.conversations},
          {"words", s.words}};
}

std::string FormatCorpusStats(const CorpusStats &s) {
  std::string out;
  out += "hours\t" + FormatDouble(s.hours) + "\n";
  out += "speakers\t" + std::to_string(s.speakers) + "\n";
  out += "utterances\t" + std::to_string(s.utterances) + "\n";
  out += "conversations\t" + std::to_string(s.conversations) + "\n";
  out += "words\t" + std::to_string(s.words) + "\n";
  return out;
}

std::map<std::string, Lattice> LoadLatticeDir(const fs::path &dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "lattice directory " + dir.string() + " not found");
  }
  std::vector<fs::path> files;
  for (const auto &e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".lat") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, Lattice> out;
  for (const auto &f : files) {
    std::vector<Lattice> lats;
    try {
      lats = ParseLattices(ReadTextFile(f));
    } catch (const ParseError &e) {
      throw Error(ErrorCode::kParse, f.filename().string() + ": " + e.what());
    }
    for (auto &lat : lats) {
      std::string id = lat.utterance_id();
      if (!out.emplace(id, std::move(lat)).second) {
        throw Error(ErrorCode::kValidation, "lattice '" + id + "' appears twice");
      }
    }
  }
  return out;
}

std::vector<Tokens> ReadSentences(const fs::path &path) {
  std::vector<Tokens> out;
  std::string text = ReadTextFile(path);
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    Tokens t = Tokenize(std::string_view(text).substr(pos, end - pos));
    if (!t.empty()) out.push_back(std::move(t));
    pos = end + 1;
  }
  return out;
}

NGramModel LoadModel(const LmSource &source) {
  if (source.arpa) return ReadArpa(ReadTextFile(*source.arpa));
  if (source.train_text) return TrainModel(ReadSentences(*source.train_text), source.train);
  throw Error(ErrorCode::kValidation, "no language model source");
}

StageVerdicts Classify(const ScoredUtterance &s, const Thresholds &t) {
  StageVerdicts v;
  v.degenerate = IsDegenerate(s, t);
  if (!v.degenerate.accepted()) return v;
  v.am = FilterAm(s, t);
  if (v.am->accepted()) v.lm = FilterLm(s, t);
  return v;
}

nlohmann::json ScoresToJson(const ScoredUtterance &s) {
  nlohmann::json j = {{"mbr_risk", s.mbr_risk},
                      {"mbr_hypothesis", Join(s.mbr_hypothesis)},
                      {"ppl", s.ppl},
                      {"token_count", s.token_count},
                      {"oov_count", s.oov_count}};
  j["lattice_confidence"] =
      s.lattice_confidence ? nlohmann::json(*s.lattice_confidence) : nlohmann::json();
  return j;
}

namespace {

nlohmann::json VerdictJson(const FilterVerdict &v) {
  return {{"accepted", v.accepted()}, {"reasons", v.reasons.names()}};
}

}  // namespace

nlohmann::json VerdictsToJson(const StageVerdicts &v) {
  nlohmann::json j;
  j["degenerate"] = VerdictJson(v.degenerate);
  j["am"] = v.am ? VerdictJson(*v.am) : nlohmann::json();
  j["lm"] = v.lm ? VerdictJson(*v.lm) : nlohmann::json();
  j["am_accepted"] = v.am_accepted();
  j["lm_accepted"] = v.lm_accepted();
  return j;
}

nlohmann::json ScoredLine(const ScoredUtterance &s,
                          const std::optional<StageVerdicts> &v) {
  nlohmann::json j = RecordToJson(s.record);
  j["scores"] = ScoresToJson(s);
  if (v) j["verdict"] = VerdictsToJson(*v);
  return j;
}

ScoredUtterance ScoredFromJson(const nlohmann::json &line, std::size_t line_no) {
  ScoredUtterance s;
  s.record = RecordFromJson(line, line_no);
  auto it = line.find("scores");
  if (it == line.end() || !it->is_object()) {
    throw ParseError(line_no, "missing 'scores' block");
  }
  const auto &sc = *it;
  auto num = [&](const char *key) {
    auto f = sc.find(key);
    if (f == sc.end() || !f->is_number()) {
      throw ParseError(line_no, std::string("scores: missing number '") + key + "'");
    }
    return f->get<double>();
  };
  s.mbr_risk = num("mbr_risk");
  s.ppl = num("ppl");
  s.oov_count = static_cast<std::size_t>(num("oov_count"));
  s.token_count = s.record.transcript.size();
  if (sc.contains("mbr_hypothesis") && sc["mbr_hypothesis"].is_string()) {
    s.mbr_hypothesis = Tokenize(sc["mbr_hypothesis"].get<std::string>());
  }
  if (sc.contains("lattice_confidence") && sc["lattice_confidence"].is_number()) {
    s.lattice_confidence = sc["lattice_confidence"].get<double>();
  }
  return s;
}

std::vector<ScoredUtterance> ParseScoredManifest(std::string_view text) {
  std::vector<ScoredUtterance> out;
  std::set<std::string> ids;
  for (const auto &j : ParseJsonLines(text)) {
    std::size_t line = j.at("__line").get<std::size_t>();
    out.push_back(ScoredFromJson(j, line));
    if (!ids.insert(out.back().record.utterance_id).second) {
      throw Error(ErrorCode::kValidation, "line " + std::to_string(line) +
                                              ": duplicate utterance id");
    }
  }
  return out;
}

std::vector<ScoredUtterance> ScoreCorpus(
    const std::vector<UtteranceRecord> &records,
    const std::map<std::string, Lattice> &lattices, const NGramModel &model,
    int nbest, double acoustic_scale, int threads) {
  std::vector<const UtteranceRecord *> order;
  for (const auto &r : records) {
    if (!lattices.count(r.utterance_id)) {
      throw Error(ErrorCode::kMismatch, "no lattice for utterance '" + r.utterance_id + "'");
    }
    order.push_back(&r);
  }
  if (lattices.size() != records.size()) {
    std::set<std::string> ids;
    for (const auto &r : records) ids.insert(r.utterance_id);
    for (const auto &[id, lat] : lattices) {
      if (!ids.count(id)) {
        throw Error(ErrorCode::kMismatch, "lattice '" + id + "' has no manifest record");
      }
    }
  }
  std::sort(order.begin(), order.end(), [](auto *a, auto *b) {
    return a->utterance_id < b->utterance_id;
  });
  std::vector<ScoredUtterance> out(order.size());
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < order.size(); i += step) {
      out[i] = ScoreUtterance(*order[i], lattices.at(order[i]->utterance_id), model,
                              nbest, acoustic_scale);
    }
  };
  std::size_t n = static_cast<std::size_t>(std::max(1, threads));
  if (n == 1 || order.size() < 2) {
    work(0, 1);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n);
  for (std::size_t t = 0; t < n; ++t) {
    pool.emplace_back([&, t] {
      try {
        work(t, n);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto &th : pool) th.join();
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

nlohmann::json StageCountsToJson(const StageCounts &c) {
  return {{"ingested", c.ingested},
          {"degenerate_removed", c.degenerate_removed},
          {"am_rejected", c.am_rejected},
          {"am_accepted", c.am_accepted},
          {"lm_accepted", c.lm_accepted},
          {"rules_applied", c.rules_applied},
          {"transform_hits", c.transform_hits}};
}

namespace {

nlohmann::json BucketJson(const BucketStats &b) {
  return {{"count", b.count}, {"mean", b.mean}, {"std", b.std},
          {"min", b.min},     {"25%", b.p25},   {"50%", b.p50},
          {"75%", b.p75},     {"90%", b.p90},   {"95%", b.p95},
          {"max", b.max}};
}

}  // namespace

nlohmann::json IterationReport::ToJson() const {
  nlohmann::json j;
  j["counts"] = StageCountsToJson(counts);
  nlohmann::json pc = nlohmann::json::object();
  for (const auto &[ch, c] : per_channel) pc[ch] = StageCountsToJson(c);
  j["per_channel"] = pc;
  j["totals"] = {{"input", CorpusStatsToJson(input_totals)},
                 {"am", CorpusStatsToJson(am_totals)},
                 {"lm", CorpusStatsToJson(lm_totals)}};
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto &[label, b] : wer_by_mbr) {
    buckets.push_back({{"bucket", label}, {"wer", BucketJson(b)}});
  }
  j["wer_by_mbr"] = buckets;
  j["mbr_wer_correlation"] =
      mbr_wer_correlation
          ? nlohmann::json{{"pearson", mbr_wer_correlation->pearson},
                           {"spearman", mbr_wer_correlation->spearman}}
          : nlohmann::json();
  j["transform_targets"] = transform_targets;
  j["lm_growth_percent"] =
      lm_growth_percent ? nlohmann::json(*lm_growth_percent) : nlohmann::json();
  j["rule_hits"] = rule_hits;
  return j;
}

std::vector<std::pair<std::string, BucketStats>> WerByMbrBuckets(
    std::span<const ScoredUtterance> scored, double mbr_max) {
  std::vector<double> zero, low, high;
  for (const auto &s : scored) {
    if (!s.record.reference || s.record.reference->empty()) continue;
    double wer = WordErrorRate(*s.record.reference, s.record.transcript);
    if (s.mbr_risk <= 0.0) {
      zero.push_back(wer);
    } else if (s.mbr_risk <= mbr_max) {
      low.push_back(wer);
    } else {
      high.push_back(wer);
    }
  }
  std::string cap = FormatDouble(mbr_max);
  std::vector<std::pair<std::string, BucketStats>> out;
  if (!zero.empty()) out.emplace_back("mbr=0", ComputeBucketStats(zero));
  if (!low.empty()) out.emplace_back("0<mbr<=" + cap, ComputeBucketStats(low));
  if (!high.empty()) out.emplace_back("mbr>" + cap, ComputeBucketStats(high));
  return out;
}

IterationReport RunIteration(const PipelineConfig &config) {
  config.thresholds.Validate();
  std::vector<UtteranceRecord> records = ReadManifest(config.manifest);
  auto lattices = LoadLatticeDir(config.lattice_dir);
  NGramModel model = LoadModel(config.lm);
  std::vector<TransformRule> rules;
  if (config.rule_store && fs::exists(*config.rule_store)) {
    rules = RuleStore(*config.rule_store).rules();
  }

  IterationReport report;
  report.input_totals = ComputeCorpusStats(records);

  // Corrections first: the perplexity filters see the corrected text.
  RuleMatcher matcher(rules);
  std::map<std::string, Tokens> originals;
  std::map<std::string, std::size_t> hits_by_id;
  for (auto &r : records) {
    ApplyResult a = matcher.Apply(r.transcript, r.channel);
    if (a.hits.empty()) continue;
    for (std::size_t idx : a.hits) ++rules[idx].hit_count;
    hits_by_id[r.utterance_id] = a.hits.size();
    if (a.tokens != r.transcript) originals[r.utterance_id] = r.transcript;
    r.transcript = std::move(a.tokens);
  }
  for (const auto &rule : rules) {
    if (rule.hit_count > 0) {
      report.rule_hits[std::string(ScopeName(rule.scope)) + ":" + Join(rule.pattern)] +=
          rule.hit_count;
    }
  }

  auto scored = ScoreCorpus(records, lattices, model, config.nbest,
                            config.acoustic_scale, config.threads);

  std::string scored_out, am_out, lm_out;
  std::vector<UtteranceRecord> am_records, lm_records;
  auto &totals = report.counts;
  for (const auto &s : scored) {
    StageVerdicts v = Classify(s, config.thresholds);
    StageCounts &ch = report.per_channel[ChannelName(s.record.channel)];
    for (StageCounts *c : {&totals, &ch}) {
      ++c->ingested;
      auto h = hits_by_id.find(s.record.utterance_id);
      if (h != hits_by_id.end()) {
        ++c->rules_applied;
        c->transform_hits += h->second;
      }
      if (!v.degenerate.accepted()) {
        ++c->degenerate_removed;
      } else if (!v.am_accepted()) {
        ++c->am_rejected;
      } else {
        ++c->am_accepted;
        if (v.lm_accepted()) ++c->lm_accepted;
      }
    }
    nlohmann::json line = ScoredLine(s, v);
    auto orig = originals.find(s.record.utterance_id);
    if (orig != originals.end()) line["original_text"] = Join(orig->second);
    scored_out += line.dump() + "\n";
    if (v.am_accepted()) {
      nlohmann::json am = ScoredLine(s, std::nullopt);
      am_out += am.dump() + "\n";
      am_records.push_back(s.record);
      if (v.lm_accepted()) {
        lm_out += Join(s.record.transcript) + "\n";
        lm_records.push_back(s.record);
      }
    }
  }
  report.am_totals = ComputeCorpusStats(am_records);
  report.lm_totals = ComputeCorpusStats(lm_records);

  report.wer_by_mbr = WerByMbrBuckets(scored, config.thresholds.mbr_max);
  std::vector<double> risks, wers;
  for (const auto &s : scored) {
    if (!s.record.reference || s.record.reference->empty()) continue;
    risks.push_back(s.mbr_risk);
    wers.push_back(WordErrorRate(*s.record.reference, s.record.transcript));
  }
  if (risks.size() >= 2) {
    try {
      report.mbr_wer_correlation = Correlate(risks, wers);
    } catch (const Error &) {
      // Constant column: correlation undefined, leave it out.
    }
  }

  auto targets = ExportTargets(rules);
  std::string targets_out;
  for (const auto &t : targets) targets_out += Join(t) + "\n";
  report.transform_targets = targets.size();
  if (config.lm_base_text) {
    std::size_t base = ReadSentences(*config.lm_base_text).size();
    if (base > 0) report.lm_growth_percent = GrowthPercent(targets.size(), base);
  }

  fs::create_directories(config.output_dir);
  WriteTextFile(config.output_dir / "scored_manifest.jsonl", scored_out);
  WriteTextFile(config.output_dir / "am_manifest.jsonl", am_out);
  WriteTextFile(config.output_dir / "lm_text.txt", lm_out);
  WriteTextFile(config.output_dir / "transform_targets.txt", targets_out);
  WriteTextFile(config.output_dir / "report.json", report.ToJson().dump(2) + "\n");
  return report;
}

}  // namespace semicorpus
