// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blobq {

enum class ErrorKind {
    InvalidParameter,
    UnstableLoad,
    NoConvergence,
    InvalidConfig,
    EmptyInput,
    IoError,
    ParseError,
    DuplicateBlock,
    NetworkError,
    RpcError,
    RangeError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind is the
/// machine-readable part; what() carries the human-readable diagnostic.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised by the stationary solver and the adaptive truncation loop. Carries
/// whatever was achieved before giving up.
class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& message, double achieved_residual,
                       double last_delay = 0.0)
        : Error(ErrorKind::NoConvergence, message),
          achieved_residual_(achieved_residual),
          last_delay_(last_delay) {}

    double achieved_residual() const noexcept { return achieved_residual_; }
    double last_delay() const noexcept { return last_delay_; }

private:
    double achieved_residual_;
    double last_delay_;
};

/// Parse failures point at the offending line (1-based) and field.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::string field, const std::string& message)
        : Error(ErrorKind::ParseError,
                "line " + std::to_string(line) + ": " + message + " ('" + field + "')"),
          line_(line),
          field_(std::move(field)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

class RpcError : public Error {
public:
    RpcError(long long code, const std::string& message)
        : Error(ErrorKind::RpcError,
                "rpc error " + std::to_string(code) + ": " + message),
          code_(code) {}

    long long code() const noexcept { return code_; }

private:
    long long code_;
};

}  // namespace blobq
