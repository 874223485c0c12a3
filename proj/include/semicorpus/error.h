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

#ifndef SEMICORPUS_ERROR_H_
#define SEMICORPUS_ERROR_H_

#include <stdexcept>
#include <string>

namespace semicorpus {

// Machine-readable category carried by every library error. The CLI and the
// curation service both report it verbatim.
enum class ErrorCode {
  kParse,
  kValidation,
  kNotFound,
  kConflict,
  kMismatch,
  kIo,
  kSimulation,
};

const char *ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Syntax error in a line-oriented document; line numbers are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string &message)
      : Error(ErrorCode::kParse,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace semicorpus

#endif  // SEMICORPUS_ERROR_H_
