// Copyright 2026 The genebench Authors.
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

#ifndef GENEBENCH_ERROR_HPP_
#define GENEBENCH_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace genebench {

// Every failure the library reports carries one of these kinds. The CLI maps
// them onto process exit codes (see exit_code()).
enum class ErrorKind {
  // gene_corpus
  kNotFound,
  kRateLimited,
  kMalformedResponse,
  kEmptySummary,
  kProviderError,
  kBiotypeRejected,
  kPolicyViolation,
  kMissingImage,
  kBadTask,
  kLengthMismatch,
  kNonFiniteExpression,
  kNTooLarge,
  // grading
  kEmptyGold,
  kEmptyList,
  // text_metrics
  kReferenceTooShort,
  kConstantColumn,
  // postprocess
  kGeneNotInDb,
  // embed_eval
  kKTooLarge,
  kDegenerateRow,
  kNotSubset,
  kOutOfRange,
  // harness
  kProviderUnreachable,
  kConfigInvalid,
  kMisaligned,
  // generic malformed input file
  kParse,
  kIo,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when the remote catalog answers 429. retry_after is in seconds as
// reported by the server (0 when the header is absent).
class RateLimitedError : public Error {
 public:
  RateLimitedError(const std::string& message, double retry_after)
      : Error(ErrorKind::kRateLimited, message), retry_after_(retry_after) {}

  double retry_after() const noexcept { return retry_after_; }

 private:
  double retry_after_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

// 0 success, 1 config error, 2 data error, 3 provider error.
int exit_code(ErrorKind kind);

}  // namespace genebench

#endif  // GENEBENCH_ERROR_HPP_
