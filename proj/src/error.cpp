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

#include "genebench/error.hpp"

namespace genebench {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound: return "NotFound";
    case ErrorKind::kRateLimited: return "RateLimited";
    case ErrorKind::kMalformedResponse: return "MalformedResponse";
    case ErrorKind::kEmptySummary: return "EmptySummary";
    case ErrorKind::kProviderError: return "ProviderError";
    case ErrorKind::kBiotypeRejected: return "BiotypeRejected";
    case ErrorKind::kPolicyViolation: return "PolicyViolation";
    case ErrorKind::kMissingImage: return "MissingImage";
    case ErrorKind::kBadTask: return "BadTask";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kNonFiniteExpression: return "NonFiniteExpression";
    case ErrorKind::kNTooLarge: return "NTooLarge";
    case ErrorKind::kEmptyGold: return "EmptyGold";
    case ErrorKind::kEmptyList: return "EmptyList";
    case ErrorKind::kReferenceTooShort: return "ReferenceTooShort";
    case ErrorKind::kConstantColumn: return "ConstantColumn";
    case ErrorKind::kGeneNotInDb: return "GeneNotInDb";
    case ErrorKind::kKTooLarge: return "KTooLarge";
    case ErrorKind::kDegenerateRow: return "DegenerateRow";
    case ErrorKind::kNotSubset: return "NotSubset";
    case ErrorKind::kOutOfRange: return "OutOfRange";
    case ErrorKind::kProviderUnreachable: return "ProviderUnreachable";
    case ErrorKind::kConfigInvalid: return "ConfigInvalid";
    case ErrorKind::kMisaligned: return "Misaligned";
    case ErrorKind::kParse: return "Parse";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfigInvalid:
      return 1;
    case ErrorKind::kProviderError:
    case ErrorKind::kProviderUnreachable:
    case ErrorKind::kRateLimited:
      return 3;
    default:
      return 2;
  }
}

}  // namespace genebench
