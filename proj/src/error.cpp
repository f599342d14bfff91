// SPDX-License-Identifier: Apache-2.0

#include "trivergence/error.hpp"

namespace trivergence {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidItem: return "InvalidItem";
        case ErrorKind::InvalidCount: return "InvalidCount";
        case ErrorKind::EmptyDistribution: return "EmptyDistribution";
        case ErrorKind::NotInSupport: return "NotInSupport";
        case ErrorKind::InvalidContext: return "InvalidContext";
        case ErrorKind::DivisionByZero: return "DivisionByZero";
        case ErrorKind::NotEvaluable: return "NotEvaluable";
        case ErrorKind::EncodingError: return "EncodingError";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

static std::string format_message(ErrorKind kind, const std::string& message,
                                  std::optional<std::size_t> line) {
    std::string out(to_string(kind));
    if (line) out += " (line " + std::to_string(*line) + ")";
    out += ": ";
    out += message;
    return out;
}

Error::Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(format_message(kind, message, line)), kind_(kind), line_(line) {}

}  // namespace trivergence
