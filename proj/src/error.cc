/*
 * Copyright 2026 The driftshap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "driftshap/error.h"

namespace driftshap {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kEmptyData:
      return "EmptyData";
    case ErrorCode::kUnknownCategory:
      return "UnknownCategory";
    case ErrorCode::kNonNumeric:
      return "NonNumeric";
    case ErrorCode::kMissingValue:
      return "MissingValue";
    case ErrorCode::kOutOfRange:
      return "OutOfRange";
    case ErrorCode::kSchemaMismatch:
      return "SchemaMismatch";
    case ErrorCode::kPlanMismatch:
      return "PlanMismatch";
    case ErrorCode::kEnumerationOverflow:
      return "EnumerationOverflow";
    case ErrorCode::kTooManyPlayers:
      return "TooManyPlayers";
    case ErrorCode::kInvalidConcept:
      return "InvalidConcept";
    case ErrorCode::kPerturbCategorical:
      return "PerturbCategorical";
    case ErrorCode::kParse:
      return "Parse";
    case ErrorCode::kIo:
      return "Io";
  }
  return "Unknown";
}

}  // namespace driftshap
