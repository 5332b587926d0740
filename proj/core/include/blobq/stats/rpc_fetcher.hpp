// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blobq/stats/block_records.hpp"

namespace blobq::stats {

/// Environment variable that overrides the default RPC endpoint.
inline constexpr const char* kRpcEndpointEnv = "BLOBQ_RPC_URL";

struct FetchOptions {
    std::string endpoint;  // http(s)://host[:port][/path]
    std::uint64_t from_block = 0;
    std::uint64_t to_block = 0;
    unsigned max_in_flight = 8;
    std::size_t chunk_size = 64;
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{250};
    std::chrono::milliseconds timeout{30'000};
    // Sidecar file holding the last block written; fetching resumes after it.
    std::optional<std::filesystem::path> checkpoint;
    int max_blobs_per_btx = kDefaultMaxBlobsPerBtx;
};

using ChunkSink = std::function<void(std::span<const BlockRecord>)>;

/// Fetches blocks [from_block, to_block] with eth_getBlockByNumber (full
/// transaction objects). Chunks are requested concurrently, at most
/// `max_in_flight` at a time, and delivered to `sink` strictly in block order;
/// the checkpoint is advanced after each delivered chunk. Returns every record
/// fetched by this call.
///
/// Transport failures and HTTP 429/5xx are retried with exponential backoff
/// and end in Error(NetworkError); JSON-RPC error objects raise RpcError;
/// an inverted range or a block the node does not have raises Error(RangeError).
std::vector<BlockRecord> fetch_blocks(const FetchOptions& options, const ChunkSink& sink = {});

/// Decodes one eth_getBlockByNumber response body. A blob-carrying
/// transaction is one with type 0x3; its blob count is the length of
/// blobVersionedHashes.
BlockRecord parse_block_response(std::string_view body, std::uint64_t block_number,
                                 int max_blobs_per_btx = kDefaultMaxBlobsPerBtx);

/// Reads the checkpoint file; nullopt when it does not exist.
std::optional<std::uint64_t> read_checkpoint(const std::filesystem::path& path);
void write_checkpoint(const std::filesystem::path& path, std::uint64_t last_block);

}  // namespace blobq::stats
