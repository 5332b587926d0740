// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "blobq/error.hpp"

namespace blobq {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidParameter: return "invalid-parameter";
        case ErrorKind::UnstableLoad: return "unstable-load";
        case ErrorKind::NoConvergence: return "no-convergence";
        case ErrorKind::InvalidConfig: return "invalid-config";
        case ErrorKind::EmptyInput: return "empty-input";
        case ErrorKind::IoError: return "io-error";
        case ErrorKind::ParseError: return "parse-error";
        case ErrorKind::DuplicateBlock: return "duplicate-block";
        case ErrorKind::NetworkError: return "network-error";
        case ErrorKind::RpcError: return "rpc-error";
        case ErrorKind::RangeError: return "range-error";
    }
    return "unknown";
}

}  // namespace blobq
