// Copyright 2026 The HiSim Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hisim {

/// Every failure the library reports carries one of these kinds so callers
/// (notably the CLI) can map them onto exit codes without string matching.
enum class ErrorKind {
    Syntax,
    UnsupportedGate,
    QubitOutOfRange,
    DuplicateQubitInOp,
    InvalidQubitCount,
    BadParamCount,
    UnknownNode,
    LimitTooSmall,
    TooLargeForOracle,
    QubitCountOutOfRange,
    QubitNotInPart,
    BadFreeBits,
    PartTooWideForLayout,
    LayoutMismatch,
    InvalidPartition,
    Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Syntax: return "SyntaxError";
        case ErrorKind::UnsupportedGate: return "UnsupportedGate";
        case ErrorKind::QubitOutOfRange: return "QubitOutOfRange";
        case ErrorKind::DuplicateQubitInOp: return "DuplicateQubitInOp";
        case ErrorKind::InvalidQubitCount: return "InvalidQubitCount";
        case ErrorKind::BadParamCount: return "BadParamCount";
        case ErrorKind::UnknownNode: return "UnknownNode";
        case ErrorKind::LimitTooSmall: return "LimitTooSmall";
        case ErrorKind::TooLargeForOracle: return "TooLargeForOracle";
        case ErrorKind::QubitCountOutOfRange: return "QubitCountOutOfRange";
        case ErrorKind::QubitNotInPart: return "QubitNotInPart";
        case ErrorKind::BadFreeBits: return "BadFreeBits";
        case ErrorKind::PartTooWideForLayout: return "PartTooWideForLayout";
        case ErrorKind::LayoutMismatch: return "LayoutMismatch";
        case ErrorKind::InvalidPartition: return "InvalidPartition";
        case ErrorKind::Io: return "IoError";
    }
    return "Error";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what),
          kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

/// Parse failure with a 1-based source position.
class SyntaxError : public Error {
  public:
    SyntaxError(std::size_t line, std::size_t col, const std::string &what)
        : Error(ErrorKind::Syntax, std::to_string(line) + ":" +
                                       std::to_string(col) + ": " + what),
          line_(line), col_(col) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t col() const noexcept { return col_; }

  private:
    std::size_t line_;
    std::size_t col_;
};

} // namespace hisim
