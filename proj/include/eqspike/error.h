// Copyright 2026 The EqSpike Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EQSPIKE_ERROR_H_
#define EQSPIKE_ERROR_H_

#include <stdexcept>
#include <string>

namespace eqspike {

enum class ErrorKind {
  kNumericFault,   // NaN/Inf reached the simulator
  kShape,          // vector/matrix size mismatch
  kConfig,         // invalid parameters or configuration
  kParse,          // malformed config or log text
  kIo,             // missing/unreadable/unwritable file
  kUsage,          // bad command line
  kDivision,       // division by a zero nudging strength
  kInstability,    // rate relaxation diverged
  kBadMagic,       // IDX magic number not recognised
  kTruncated,      // IDX file shorter than its header claims
  kCountMismatch,  // IDX image/label counts disagree
};

const char* ErrorKindName(ErrorKind kind);

// Every failure surfaced by the library is an Error carrying its category so
// callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace eqspike

#endif  // EQSPIKE_ERROR_H_
