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

#ifndef DRIFTSHAP_ERROR_H_
#define DRIFTSHAP_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace driftshap {

enum class ErrorCode {
  kInvalidArgument,
  kEmptyData,
  kUnknownCategory,
  kNonNumeric,
  kMissingValue,
  kOutOfRange,
  kSchemaMismatch,
  kPlanMismatch,
  kEnumerationOverflow,
  kTooManyPlayers,
  kInvalidConcept,
  kPerturbCategorical,
  kParse,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type; the code
// lets callers (and the CLI exit-code mapping) distinguish failure classes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace driftshap

#endif  // DRIFTSHAP_ERROR_H_
