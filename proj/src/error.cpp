// Copyright 2026 The fuzzydr Authors
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

#include "fuzzydr/error.hpp"

namespace fdr {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::InvalidK: return "InvalidK";
        case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
        case ErrorCode::MalformedLine: return "MalformedLine";
        case ErrorCode::UnknownLabel: return "UnknownLabel";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::MissingDirectory: return "MissingDirectory";
        case ErrorCode::TooFewDocuments: return "TooFewDocuments";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::TooFewPerClass: return "TooFewPerClass";
        case ErrorCode::EmptyMatrix: return "EmptyMatrix";
        case ErrorCode::InsufficientPoints: return "InsufficientPoints";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::IdenticalPrototypes: return "IdenticalPrototypes";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::NonConvergence: return "NonConvergence";
    }
    return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParams:
        case ErrorCode::InvalidK:
            return ErrorCategory::Usage;
        case ErrorCode::IdenticalPrototypes:
        case ErrorCode::ConvergenceFailure:
        case ErrorCode::NonConvergence:
            return ErrorCategory::Numerical;
        default:
            return ErrorCategory::Data;
    }
}

}  // namespace fdr
