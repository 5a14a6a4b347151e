// Copyright 2026 The gthemu Authors
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

#include "gthemu/error.hpp"

namespace gthemu {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kInput: return "input";
        case ErrorKind::kDimension: return "dimension";
        case ErrorKind::kSchema: return "schema";
        case ErrorKind::kIo: return "io";
        case ErrorKind::kCoverage: return "coverage";
        case ErrorKind::kTraining: return "training";
        case ErrorKind::kInternal: return "internal";
    }
    return "unknown";
}

}  // namespace gthemu
