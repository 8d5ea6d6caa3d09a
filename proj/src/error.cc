// Copyright 2026 The hapredict Authors.
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

#include "hapredict/error.h"

namespace hapredict {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kInsufficientAudiogram: return "insufficient-audiogram";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kEmptySignal: return "empty-signal";
    case ErrorKind::kNumericalConditioning: return "numerical-conditioning";
    case ErrorKind::kJudgeUnavailable: return "judge-unavailable";
    case ErrorKind::kBackend: return "backend";
    case ErrorKind::kScorerUnavailable: return "scorer-unavailable";
    case ErrorKind::kUnparsableReply: return "unparsable-reply";
    case ErrorKind::kScoringFailed: return "scoring-failed";
    case ErrorKind::kUndefinedCorrelation: return "undefined-correlation";
    case ErrorKind::kConfig: return "config";
  }
  return "unknown";
}

}  // namespace hapredict
