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

#pragma once

#include <ostream>

namespace gthemu::cli {

// Process exit codes. Every library ErrorKind has its own code.
enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kInputError = 3,
    kDimensionError = 4,
    kSchemaError = 5,
    kIoError = 6,
    kCoverageError = 7,
    kTrainingError = 8,
    kInternalError = 9,
    kUnknownError = 10,
};

// Entry point behind the gthemu executable. Failures print a one-line JSON
// error record to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gthemu::cli
