// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fgp {

// Invalid scenario or fleet configuration. `field` is a path such as
// "jobs[0].runtime.init_time".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed trace. `line` is 1-based when the trace came from a file, 0 otherwise;
// `sequence` names the offending event when known (-1 otherwise).
class TraceCorruption : public std::runtime_error {
public:
    TraceCorruption(const std::string& message, std::int64_t line = 0, std::int64_t sequence = -1)
        : std::runtime_error(decorate(message, line, sequence)), line_(line), sequence_(sequence) {}
    std::int64_t line() const noexcept { return line_; }
    std::int64_t sequence() const noexcept { return sequence_; }

private:
    static std::string decorate(const std::string& m, std::int64_t line, std::int64_t seq) {
        std::string out = m;
        if (line > 0) out = "line " + std::to_string(line) + ": " + out;
        if (seq >= 0) out += " (event seq " + std::to_string(seq) + ")";
        return out;
    }
    std::int64_t line_;
    std::int64_t sequence_;
};

// A ratio whose denominator is zero, or a product over an undefined component.
class UndefinedMetric : public std::domain_error {
    using std::domain_error::domain_error;
};

class ArithmeticError : public std::overflow_error {
    using std::overflow_error::overflow_error;
};

class PreconditionError : public std::logic_error {
    using std::logic_error::logic_error;
};

// Two traces that differ in more than the declared factor.
class InvalidComparison : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fgp
