// Copyright 2026 The Cutremain Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cutremain/error.hpp"

namespace cutremain {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter:
      return "invalid_parameter";
    case ErrorCode::kEmptyRegion:
      return "empty_region";
    case ErrorCode::kEmptyMask:
      return "empty_mask";
    case ErrorCode::kShape:
      return "shape";
    case ErrorCode::kPlacementFailure:
      return "placement_failure";
    case ErrorCode::kParse:
      return "parse";
    case ErrorCode::kUndefinedMetric:
      return "undefined_metric";
    case ErrorCode::kPairing:
      return "pairing";
    case ErrorCode::kIo:
      return "io";
  }
  return "unknown";
}

}  // namespace cutremain
