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

#ifndef SEMICORPUS_MANIFEST_H_
#define SEMICORPUS_MANIFEST_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "semicorpus/tokens.h"

namespace semicorpus {

enum class Channel { kCaller, kAgent };

const char *ChannelName(Channel channel);
std::optional<Channel> ParseChannel(std::string_view name);

// One post-VAD utterance.
struct UtteranceRecord {
  std::string utterance_id;
  std::string call_id;
  Channel channel = Channel::kCaller;
  std::string speaker_id;
  double duration_seconds = 0.0;
  Tokens transcript;
  // Manual transcript, when one exists; enables WER reporting.
  std::optional<Tokens> reference;
};

// Manifest lines are JSON objects:
//   {"id", "call_id", "channel", "speaker_id", "duration", "text",
//    optional "reference", optional "scores", optional "verdict"}
// Unknown keys are ignored on read. Text fields go through Tokenize.
nlohmann::json RecordToJson(const UtteranceRecord &record);
UtteranceRecord RecordFromJson(const nlohmann::json &object, std::size_t line);

// Parses a JSON-lines manifest, rejecting duplicate ids, non-positive
// durations and unknown channels. Blank lines are skipped.
std::vector<UtteranceRecord> ParseManifest(std::string_view text);
std::vector<nlohmann::json> ParseJsonLines(std::string_view text);
std::vector<UtteranceRecord> ReadManifest(const std::filesystem::path &path);

std::string FormatManifest(const std::vector<UtteranceRecord> &records);

std::string ReadTextFile(const std::filesystem::path &path);
// Writes atomically enough for a single writer: temp file, then rename.
void WriteTextFile(const std::filesystem::path &path, std::string_view text);

}  // namespace semicorpus

#endif  // SEMICORPUS_MANIFEST_H_
