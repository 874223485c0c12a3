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

#ifndef SEMICORPUS_TOKENS_H_
#define SEMICORPUS_TOKENS_H_

#include <string>
#include <string_view>
#include <vector>

namespace semicorpus {

using Token = std::string;
using Tokens = std::vector<Token>;

// Lowercases and splits on ASCII whitespace. Bracketed tags such as
// "[noise]" survive as single tokens.
Tokens Tokenize(std::string_view text);

std::string Join(const Tokens &tokens, std::string_view sep = " ");

// Shortest decimal text that reads back to exactly the same double.
std::string FormatDouble(double value);

// Strict decimal parse: the whole field must be consumed. Returns false on
// any trailing garbage, empty input or overflow.
bool ParseDouble(std::string_view text, double *out);
bool ParseInt(std::string_view text, long long *out);

std::vector<std::string_view> SplitFields(std::string_view line, char sep);
std::vector<std::string_view> SplitWhitespace(std::string_view line);

}  // namespace semicorpus

#endif  // SEMICORPUS_TOKENS_H_
