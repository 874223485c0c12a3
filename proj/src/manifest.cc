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

#include "semicorpus/manifest.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "semicorpus/error.h"

namespace semicorpus {

const char *ChannelName(Channel channel) {
  return channel == Channel::kCaller ? "caller" : "agent";
}

std::optional<Channel> ParseChannel(std::string_view name) {
  if (name == "caller") return Channel::kCaller;
  if (name == "agent") return Channel::kAgent;
  return std::nullopt;
}

nlohmann::json RecordToJson(const UtteranceRecord &record) {
  nlohmann::json j;
  j["id"] = record.utterance_id;
  j["call_id"] = record.call_id;
  j["channel"] = ChannelName(record.channel);
  j["speaker_id"] = record.speaker_id;
  j["duration"] = record.duration_seconds;
  j["text"] = Join(record.transcript);
  if (record.reference) j["reference"] = Join(*record.reference);
  return j;
}

namespace {

std::string RequireString(const nlohmann::json &o, const char *key,
                          std::size_t line) {
  auto it = o.find(key);
  if (it == o.end() || !it->is_string()) {
    throw ParseError(line, std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

UtteranceRecord RecordFromJson(const nlohmann::json &o, std::size_t line) {
  if (!o.is_object()) throw ParseError(line, "manifest line is not an object");
  UtteranceRecord r;
  r.utterance_id = RequireString(o, "id", line);
  if (r.utterance_id.empty()) throw ParseError(line, "empty utterance id");
  r.call_id = RequireString(o, "call_id", line);
  r.speaker_id = RequireString(o, "speaker_id", line);
  auto channel = ParseChannel(RequireString(o, "channel", line));
  if (!channel) throw ParseError(line, "channel must be 'caller' or 'agent'");
  r.channel = *channel;
  auto dur = o.find("duration");
  if (dur == o.end() || !dur->is_number()) {
    throw ParseError(line, "missing numeric field 'duration'");
  }
  r.duration_seconds = dur->get<double>();
  if (!(r.duration_seconds > 0.0) || !std::isfinite(r.duration_seconds)) {
    throw Error(ErrorCode::kValidation,
                "line " + std::to_string(line) + ": duration must be positive");
  }
  r.transcript = Tokenize(RequireString(o, "text", line));
  if (o.contains("reference")) {
    r.reference = Tokenize(RequireString(o, "reference", line));
  }
  return r;
}

std::vector<nlohmann::json> ParseJsonLines(std::string_view text) {
  std::vector<nlohmann::json> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (SplitWhitespace(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError(line_no, "invalid JSON");
    j["__line"] = line_no;
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<UtteranceRecord> ParseManifest(std::string_view text) {
  std::vector<UtteranceRecord> out;
  std::set<std::string> ids;
  for (const auto &j : ParseJsonLines(text)) {
    std::size_t line = j.at("__line").get<std::size_t>();
    UtteranceRecord r = RecordFromJson(j, line);
    if (!ids.insert(r.utterance_id).second) {
      throw Error(ErrorCode::kValidation, "line " + std::to_string(line) +
                                              ": duplicate utterance id '" +
                                              r.utterance_id + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<UtteranceRecord> ReadManifest(const std::filesystem::path &path) {
  return ParseManifest(ReadTextFile(path));
}

std::string FormatManifest(const std::vector<UtteranceRecord> &records) {
  std::string out;
  for (const auto &r : records) out += RecordToJson(r).dump() + "\n";
  return out;
}

std::string ReadTextFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::filesystem::path &path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace semicorpus
