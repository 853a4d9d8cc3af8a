// Copyright 2026 The plexus-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "plexus/error.hpp"

namespace plexus {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kStrokeOutOfRange: return "StrokeOutOfRange";
    case ErrorCode::kAngleUnreachable: return "AngleUnreachable";
    case ErrorCode::kAngleOutOfRange: return "AngleOutOfRange";
    case ErrorCode::kFourBarAssemblyFailure: return "FourBarAssemblyFailure";
    case ErrorCode::kWidthUnreachable: return "WidthUnreachable";
    case ErrorCode::kInvalidGeometry: return "InvalidGeometry";
    case ErrorCode::kInterpenetration: return "Interpenetration";
    case ErrorCode::kInvalidTrace: return "InvalidTrace";
    case ErrorCode::kNoContactAtPosture: return "NoContactAtPosture";
    case ErrorCode::kInsufficientEntries: return "InsufficientEntries";
    case ErrorCode::kNoStableAngle: return "NoStableAngle";
    case ErrorCode::kNoIntersectionInRange: return "NoIntersectionInRange";
    case ErrorCode::kCalibrationMissing: return "CalibrationMissing";
    case ErrorCode::kMissingWidth: return "MissingWidth";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kSetupFailure: return "SetupFailure";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kCorruptLog: return "CorruptLog";
    case ErrorCode::kIoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace plexus
