/*
 * Copyright 2026 The scenesim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "scene/error.hpp"

namespace scene {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NegativeEnergy: return "NegativeEnergy";
    case ErrorCode::BadCoefficient: return "BadCoefficient";
    case ErrorCode::NonPositiveRho: return "NonPositiveRho";
    case ErrorCode::EmptyActiveSet: return "EmptyActiveSet";
    case ErrorCode::ZeroRho: return "ZeroRho";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::AllNonpositive: return "AllNonpositive";
    case ErrorCode::BadT: return "BadT";
    case ErrorCode::NegativeDelta: return "NegativeDelta";
    case ErrorCode::DivergentACF: return "DivergentACF";
    case ErrorCode::BadBudget: return "BadBudget";
    case ErrorCode::InsufficientSweep: return "InsufficientSweep";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::EmptyBudget: return "EmptyBudget";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

}  // namespace scene
