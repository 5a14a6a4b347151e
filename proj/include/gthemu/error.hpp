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

#include <stdexcept>
#include <string>

namespace gthemu {

// Error categories. The CLI maps each one to a distinct exit code.
enum class ErrorKind {
    kInput,      // bad argument: non-finite angle, parameter out of range
    kDimension,  // operand shapes do not match
    kSchema,     // file content does not match the expected layout/version
    kIo,         // file missing or unreadable/unwritable
    kCoverage,   // replayed hardware data does not cover a requested circuit
    kTraining,   // NaN loss or similar during optimisation
    kInternal,   // invariant broken inside the library (e.g. negative probability)
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InputError : Error {
    explicit InputError(const std::string& what) : Error(ErrorKind::kInput, what) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& what) : Error(ErrorKind::kDimension, what) {}
};

struct SchemaError : Error {
    explicit SchemaError(const std::string& what) : Error(ErrorKind::kSchema, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

struct CoverageError : Error {
    explicit CoverageError(const std::string& what) : Error(ErrorKind::kCoverage, what) {}
};

struct InternalError : Error {
    explicit InternalError(const std::string& what) : Error(ErrorKind::kInternal, what) {}
};

class TrainingError : public Error {
public:
    TrainingError(const std::string& what, int epoch)
        : Error(ErrorKind::kTraining, what + " (epoch " + std::to_string(epoch) + ")"),
          epoch_(epoch) {}

    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

}  // namespace gthemu
