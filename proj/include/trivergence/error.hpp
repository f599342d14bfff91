// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trivergence {

enum class ErrorKind {
    InvalidItem,
    InvalidCount,
    EmptyDistribution,
    NotInSupport,
    InvalidContext,
    DivisionByZero,
    NotEvaluable,
    EncodingError,
    ParseError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `line()` is set for errors that come
/// from parsing line-oriented input.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message,
          std::optional<std::size_t> line = std::nullopt);

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> line_;
};

}  // namespace trivergence
