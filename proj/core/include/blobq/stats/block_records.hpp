// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace blobq::stats {

/// Current mainnet per-transaction blob limit.
inline constexpr int kDefaultMaxBlobsPerBtx = 6;

/// Blob counts of the blob-carrying transactions in one block, in block order.
struct BlockRecord {
    std::uint64_t block_number = 0;
    std::vector<int> blob_counts;

    friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
};

/// Header line of the block CSV format.
inline constexpr const char* kBlockCsvHeader = "block_number,blob_counts";

/// Strict reader for `block_number,blob_counts` files, where blob_counts is a
/// ';'-separated list and empty for blocks without blob transactions.
/// Throws ParseError (with line number), Error(DuplicateBlock) or Error(IoError).
std::vector<BlockRecord> parse_block_csv(std::istream& in,
                                         int max_blobs_per_btx = kDefaultMaxBlobsPerBtx);

std::vector<BlockRecord> parse_block_file(const std::filesystem::path& path,
                                          int max_blobs_per_btx = kDefaultMaxBlobsPerBtx);

void write_block_csv(std::ostream& out, std::span<const BlockRecord> records,
                     bool with_header = true);

struct BlobUsageStats {
    std::int64_t blocks_total = 0;
    std::int64_t blocks_empty = 0;
    std::int64_t btx_total = 0;
    std::int64_t blobs_total = 0;
    double blocks_empty_fraction = 0.0;
    double btx_per_block = 0.0;
    // Percent of transactions carrying k + 1 blobs; all zero when has_btx is false.
    std::vector<double> blob_share;
    double mean_blobs_per_btx = 0.0;
    double blobs_per_block = 0.0;
    // False when no block carried a blob transaction, so shares are undefined.
    bool has_btx = false;
};

/// Throws Error(EmptyInput) for an empty record list.
BlobUsageStats compute_usage_stats(std::span<const BlockRecord> records,
                                   int max_blobs_per_btx = kDefaultMaxBlobsPerBtx);

struct ImpliedLoad {
    double rho_blobs = 0.0;   // load if every blob travelled in its own transaction
    double lambda_btx = 0.0;  // transactions per second
};

ImpliedLoad implied_load(const BlobUsageStats& stats, int B, double tau);

}  // namespace blobq::stats
