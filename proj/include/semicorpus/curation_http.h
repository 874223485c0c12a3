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

#ifndef SEMICORPUS_CURATION_HTTP_H_
#define SEMICORPUS_CURATION_HTTP_H_

#include <memory>
#include <string>

#include "semicorpus/curation.h"
#include "semicorpus/error.h"

namespace semicorpus {

// JSON over HTTP:
//   GET  /candidates?channel=caller|agent&page=N&page_size=N
//   POST /candidates/{id}/accept   {"replacement": "...", "scope": "caller"}
//   POST /candidates/{id}/dismiss  {"note": "..."}
//   GET  /rules/export
//   GET  /stats
// Errors are {"code": ..., "message": ...} with 400 (malformed request),
// 404, 409 or 422 (validation).
class CurationServer {
 public:
  explicit CurationServer(CurationService &service);
  ~CurationServer();
  CurationServer(const CurationServer &) = delete;
  CurationServer &operator=(const CurationServer &) = delete;

  // Returns the bound port, or -1.
  int BindAnyPort(const std::string &host = "127.0.0.1");
  bool Bind(const std::string &host, int port);
  // Blocks until Stop().
  bool Serve();
  void Stop();
  void WaitUntilReady() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

int HttpStatusFor(ErrorCode code);

}  // namespace semicorpus

#endif  // SEMICORPUS_CURATION_HTTP_H_
