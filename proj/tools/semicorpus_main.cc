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

// Command-line driver. Every subcommand exits 0 on success; failures print a
// single JSON line {"code": ..., "message": ...} to stderr and exit 1.

#include <algorithm>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "semicorpus/curation.h"
#include "semicorpus/curation_http.h"
#include "semicorpus/error.h"
#include "semicorpus/fleet_sim.h"
#include "semicorpus/pipeline.h"

namespace fs = std::filesystem;
using namespace semicorpus;

namespace {

CurationServer *g_server = nullptr;

void OnSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

void Emit(const std::string &text, const std::string &out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    WriteTextFile(out, text);
  }
}

std::optional<Channel> ChannelOption(const std::string &name) {
  if (name.empty() || name == "both") return std::nullopt;
  auto c = ParseChannel(name);
  if (!c) throw Error(ErrorCode::kValidation, "channel must be caller, agent or both");
  return c;
}

struct LmArgs {
  std::string arpa, text;
  int order = 5;
  long long vocab_cap = 125000;
  double discount = -1;

  void Add(CLI::App *app) {
    app->add_option("--lm", arpa, "ARPA model");
    app->add_option("--lm-text", text, "train a model from this text instead");
    app->add_option("--order", order, "n-gram order when training");
    app->add_option("--vocab-cap", vocab_cap, "vocabulary cap when training (0 = none)");
    app->add_option("--discount", discount, "fixed KN discount (default: estimated)");
  }
  LmSource Source() const {
    LmSource s;
    if (!arpa.empty()) s.arpa = arpa;
    if (!text.empty()) s.train_text = text;
    s.train.order = order;
    if (vocab_cap > 0) {
      s.train.vocab_cap = static_cast<std::size_t>(vocab_cap);
    } else {
      s.train.vocab_cap.reset();
    }
    if (discount >= 0) s.train.discount = discount;
    if (!s.arpa && !s.train_text) {
      throw Error(ErrorCode::kValidation, "one of --lm or --lm-text is required");
    }
    return s;
  }
};

Thresholds ThresholdsArg(const std::string &config) {
  if (config.empty()) return {};
  return LoadConfig(config).thresholds;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Semi-supervised speech corpus selection and curation"};
  app.require_subcommand(1);

  // score
  auto *score = app.add_subcommand("score", "attach MBR and perplexity scores to a manifest");
  std::string manifest, lattices, out;
  LmArgs lm;
  int nbest = kDefaultNBest, threads = 1;
  double scale = kDefaultAcousticScale;
  score->add_option("--manifest", manifest)->required();
  score->add_option("--lattices", lattices, "directory of *.lat files")->required();
  lm.Add(score);
  score->add_option("--nbest", nbest);
  score->add_option("--acoustic-scale", scale);
  score->add_option("--threads", threads);
  score->add_option("-o,--out", out, "scored manifest (default stdout)");

  // filter
  auto *filter = app.add_subcommand("filter", "apply degenerate, AM and LM filters");
  std::string scored_in, config_path, am_out, lm_out;
  filter->add_option("--scored", scored_in, "scored manifest")->required();
  filter->add_option("--config", config_path, "take thresholds from this config");
  filter->add_option("-o,--out", out, "manifest with verdicts (default stdout)");
  filter->add_option("--am-out", am_out, "AM-accepted manifest");
  filter->add_option("--lm-out", lm_out, "LM-accepted text");

  // transforms
  auto *tr = app.add_subcommand("transforms", "mine, apply and export corrective transforms");
  tr->require_subcommand(1);
  auto *mine = tr->add_subcommand("mine", "rank frequent utterances and n-grams");
  std::string channel;
  MineOptions mopts;
  std::size_t limit = 50;
  mine->add_option("--manifest", manifest)->required();
  mine->add_option("--channel", channel, "caller, agent or both");
  mine->add_option("--n-min", mopts.n_min);
  mine->add_option("--n-max", mopts.n_max);
  mine->add_option("--min-count", mopts.min_count);
  mine->add_option("--threads", mopts.threads);
  mine->add_option("--limit", limit, "rows to print (0 = all)");
  auto *apply = tr->add_subcommand("apply", "rewrite manifest transcripts with a rule store");
  std::string rules;
  apply->add_option("--manifest", manifest)->required();
  apply->add_option("--rules", rules)->required();
  apply->add_option("-o,--out", out);
  auto *exp = tr->add_subcommand("export", "unique rule replacements as LM text");
  std::string base;
  exp->add_option("--rules", rules)->required();
  exp->add_option("--base", base, "LM text to report growth against");
  exp->add_option("-o,--out", out);

  // lm
  auto *lmcmd = app.add_subcommand("lm", "Kneser-Ney language models");
  lmcmd->require_subcommand(1);
  auto *train = lmcmd->add_subcommand("train", "train and write an ARPA model");
  std::string text;
  TrainOptions topts;
  long long cap = 125000;
  double discount = -1;
  train->add_option("--text", text)->required();
  train->add_option("--order", topts.order);
  train->add_option("--vocab-cap", cap, "0 = none");
  train->add_option("--discount", discount);
  train->add_option("-o,--out", out);
  auto *ppl = lmcmd->add_subcommand("ppl", "per-sentence perplexity");
  std::string arpa;
  ppl->add_option("--lm", arpa)->required();
  ppl->add_option("--text", text)->required();
  auto *arpacmd = lmcmd->add_subcommand("arpa", "validate an ARPA file and rewrite it canonically");
  arpacmd->add_option("--lm", arpa)->required();
  arpacmd->add_option("-o,--out", out);

  // stats
  auto *stats = app.add_subcommand("stats", "corpus totals, one column per manifest");
  std::vector<std::string> manifests;
  stats->add_option("manifests", manifests)->required();

  // run
  auto *run = app.add_subcommand("run", "one full iteration from a config file");
  run->add_option("--config", config_path)->required();

  // sim
  auto *sim = app.add_subcommand("sim", "simulate the re-decoding fleet");
  sim->add_option("--config", config_path)->required();
  sim->add_option("--manifest", manifest, "inventory (default: config manifest)");

  // serve
  auto *serve = app.add_subcommand("serve", "curation HTTP service");
  std::string journal, host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--manifest", manifest, "corpus to mine")->required();
  serve->add_option("--rules", rules)->required();
  serve->add_option("--journal", journal, "dismissal journal (default: <rules>.dismissed)");
  serve->add_option("--host", host);
  serve->add_option("--port", port, "0 picks a free port");
  serve->add_option("--n-min", mopts.n_min);
  serve->add_option("--n-max", mopts.n_max);
  serve->add_option("--min-count", mopts.min_count);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    nlohmann::json err = {{"code", "usage_error"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  }

  try {
    if (score->parsed()) {
      auto model = LoadModel(lm.Source());
      auto scored = ScoreCorpus(ReadManifest(manifest), LoadLatticeDir(lattices), model,
                                nbest, scale, threads);
      std::string doc;
      for (const auto &s : scored) doc += ScoredLine(s, std::nullopt).dump() + "\n";
      Emit(doc, out);
    } else if (filter->parsed()) {
      Thresholds t = ThresholdsArg(config_path);
      auto scored = ParseScoredManifest(ReadTextFile(scored_in));
      std::sort(scored.begin(), scored.end(), [](const auto &a, const auto &b) {
        return a.record.utterance_id < b.record.utterance_id;
      });
      std::string doc, am, lmtext;
      StageCounts c;
      for (const auto &s : scored) {
        StageVerdicts v = Classify(s, t);
        ++c.ingested;
        if (!v.degenerate.accepted()) {
          ++c.degenerate_removed;
        } else if (!v.am_accepted()) {
          ++c.am_rejected;
        } else {
          ++c.am_accepted;
          am += ScoredLine(s, std::nullopt).dump() + "\n";
          if (v.lm_accepted()) {
            ++c.lm_accepted;
            lmtext += Join(s.record.transcript) + "\n";
          }
        }
        doc += ScoredLine(s, v).dump() + "\n";
      }
      if (!am_out.empty()) WriteTextFile(am_out, am);
      if (!lm_out.empty()) WriteTextFile(lm_out, lmtext);
      if (!out.empty()) WriteTextFile(out, doc);
      std::cout << StageCountsToJson(c).dump() << "\n";
    } else if (mine->parsed()) {
      auto records = ReadManifest(manifest);
      auto ch = ChannelOption(channel);
      mopts.channel = !ch ? Scope::kBoth : (*ch == Channel::kCaller ? Scope::kCaller : Scope::kAgent);
      auto cands = MineCandidates(records, mopts);
      std::size_t n = limit == 0 ? cands.size() : std::min(limit, cands.size());
      for (std::size_t i = 0; i < n; ++i) {
        const auto &c = cands[i];
        std::string samples;
        for (const auto &id : c.sample_utterance_ids) {
          samples += (samples.empty() ? "" : ",") + id;
        }
        std::cout << c.frequency << '\t' << CandidateKindName(c.kind) << '\t'
                  << Join(c.tokens) << '\t' << samples << '\n';
      }
    } else if (apply->parsed()) {
      auto records = ReadManifest(manifest);
      std::vector<TransformRule> rs = RuleStore(rules).rules();
      RuleMatcher matcher(rs);
      std::size_t changed = 0, hits = 0;
      for (auto &r : records) {
        auto a = matcher.Apply(r.transcript, r.channel);
        if (!a.hits.empty()) ++changed;
        hits += a.hits.size();
        r.transcript = std::move(a.tokens);
      }
      Emit(FormatManifest(records), out);
      std::cerr << nlohmann::json{{"rules_applied", changed}, {"transform_hits", hits}}.dump()
                << "\n";
    } else if (exp->parsed()) {
      auto rs = RuleStore(rules).rules();
      auto targets = ExportTargets(rs);
      std::string doc;
      for (const auto &t : targets) doc += Join(t) + "\n";
      Emit(doc, out);
      nlohmann::json summary = {{"targets", targets.size()}};
      if (!base.empty()) {
        summary["growth_percent"] = GrowthPercent(targets.size(), ReadSentences(base).size());
      }
      std::cerr << summary.dump() << "\n";
    } else if (train->parsed()) {
      if (cap > 0) {
        topts.vocab_cap = static_cast<std::size_t>(cap);
      } else {
        topts.vocab_cap.reset();
      }
      if (discount >= 0) topts.discount = discount;
      Emit(WriteArpa(TrainModel(ReadSentences(text), topts)), out);
    } else if (ppl->parsed()) {
      auto model = ReadArpa(ReadTextFile(arpa));
      double total_lp = 0;
      std::size_t words = 0, sentences = 0, oov = 0;
      for (const auto &s : ReadSentences(text)) {
        auto p = Perplexity(model, s, "");
        std::cout << FormatDouble(p.ppl) << '\t' << FormatDouble(p.log10_prob) << '\t'
                  << p.token_count << '\t' << p.oov_count << '\t' << Join(s) << '\n';
        total_lp += p.log10_prob;
        words += p.token_count;
        oov += p.oov_count;
        ++sentences;
      }
      if (sentences > 0) {
        double corpus_ppl = std::pow(10.0, -total_lp / static_cast<double>(words + sentences));
        std::cerr << nlohmann::json{{"sentences", sentences}, {"words", words},
                                    {"oov", oov}, {"ppl", corpus_ppl}}.dump()
                  << "\n";
      }
    } else if (arpacmd->parsed()) {
      Emit(WriteArpa(ReadArpa(ReadTextFile(arpa))), out);
    } else if (stats->parsed()) {
      std::vector<CorpusStats> cols;
      for (const auto &m : manifests) cols.push_back(ComputeCorpusStats(ReadManifest(m)));
      std::cout << "stat";
      for (const auto &m : manifests) std::cout << '\t' << fs::path(m).filename().string();
      std::cout << '\n';
      auto row = [&](const char *name, auto get) {
        std::cout << name;
        for (const auto &c : cols) std::cout << '\t' << get(c);
        std::cout << '\n';
      };
      row("hours", [](const CorpusStats &c) { return FormatDouble(c.hours); });
      row("speakers", [](const CorpusStats &c) { return c.speakers; });
      row("utterances", [](const CorpusStats &c) { return c.utterances; });
      row("conversations", [](const CorpusStats &c) { return c.conversations; });
      row("words", [](const CorpusStats &c) { return c.words; });
    } else if (run->parsed()) {
      auto report = RunIteration(LoadConfig(config_path));
      std::cout << StageCountsToJson(report.counts).dump() << "\n";
      if (!report.wer_by_mbr.empty()) {
        std::cout << FormatBucketTable("WER by MBR", report.wer_by_mbr);
      }
    } else if (sim->parsed()) {
      auto config = LoadConfig(config_path);
      SimConfig sc = SimConfigFromJson(config.raw.value("sim", nlohmann::json()));
      auto inventory = ReadManifest(manifest.empty() ? config.manifest : fs::path(manifest));
      std::cout << RunSimulation(sc, inventory).ToJson().dump(2) << "\n";
    } else if (serve->parsed()) {
      if (journal.empty()) journal = rules + ".dismissed";
      CurationService svc(rules, journal);
      svc.LoadSnapshot(ReadManifest(manifest), mopts);
      CurationServer server(svc);
      int bound = port == 0 ? server.BindAnyPort(host) : (server.Bind(host, port) ? port : -1);
      if (bound < 0) {
        throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
      }
      std::cout << nlohmann::json{{"listening", host + ":" + std::to_string(bound)}}.dump()
                << std::endl;
      g_server = &server;
      std::signal(SIGINT, OnSignal);
      std::signal(SIGTERM, OnSignal);
      server.Serve();
      g_server = nullptr;
    }
  } catch (const Error &e) {
    std::cerr << nlohmann::json{{"code", ErrorCodeName(e.code())}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << nlohmann::json{{"code", "io_error"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
