// Copyright (c) 2026 volprim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace volprim {

enum class ErrorCategory {
    Usage = 2,    // bad arguments / preconditions
    Io = 3,       // missing or unreadable files
    Format = 4,   // malformed file contents
    Version = 5,  // container version mismatch
    Numeric = 6,  // NaN/divergence during optimization
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string &msg) : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const { return category_; }
    int exitCode() const { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

inline const char *categoryName(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::Usage: return "usage";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Format: return "format";
    case ErrorCategory::Version: return "version";
    case ErrorCategory::Numeric: return "numeric";
    }
    return "unknown";
}

} // namespace volprim
