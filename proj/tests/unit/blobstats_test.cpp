// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "blobq/error.hpp"
#include "blobq/stats/block_records.hpp"

namespace blobq::stats {
namespace {

std::vector<BlockRecord> parse(const std::string& text) {
    std::istringstream in(text);
    return parse_block_csv(in);
}

ErrorKind parse_error_kind(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error for: " << text;
    return ErrorKind::InvalidParameter;
}

std::vector<BlockRecord> random_records(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<int> txs(0, 4), blobs(1, 6);
    std::vector<BlockRecord> out;
    std::uint64_t number = 1000 + rng() % 1000;
    for (int i = 0; i < n; ++i) {
        BlockRecord r{number, {}};
        number += 1 + rng() % 3;
        for (int t = txs(rng); t > 0; --t) r.blob_counts.push_back(blobs(rng));
        out.push_back(r);
    }
    return out;
}

TEST(BlockCsv, ParsesSmallExample) {
    const auto r = parse("block_number,blob_counts\n100,\n101,1\n102,5\n");
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0], (BlockRecord{100, {}}));
    EXPECT_EQ(r[1], (BlockRecord{101, {1}}));
    EXPECT_EQ(r[2], (BlockRecord{102, {5}}));

    const auto s = compute_usage_stats(r);
    EXPECT_EQ(s.blocks_total, 3);
    EXPECT_EQ(s.blocks_empty, 1);
    EXPECT_NEAR(s.blocks_empty_fraction, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(s.btx_per_block, 2.0 / 3.0, 1e-15);
    ASSERT_EQ(s.blob_share.size(), 6u);
    EXPECT_DOUBLE_EQ(s.blob_share[0], 50.0);
    EXPECT_DOUBLE_EQ(s.blob_share[4], 50.0);
    EXPECT_DOUBLE_EQ(s.mean_blobs_per_btx, 3.0);
    EXPECT_DOUBLE_EQ(s.blobs_per_block, 2.0);
}

TEST(BlockCsv, AcceptsCrlfAndTrailingBlankLines) {
    const auto r = parse("block_number,blob_counts\r\n7,2;3\r\n\n\n");
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0], (BlockRecord{7, {2, 3}}));
}

TEST(BlockCsv, RejectsBadInput) {
    EXPECT_EQ(parse_error_kind(""), ErrorKind::ParseError);
    EXPECT_EQ(parse_error_kind("number,counts\n1,1\n"), ErrorKind::ParseError);
    EXPECT_EQ(parse_error_kind("block_number,blob_counts\n1,0\n"), ErrorKind::ParseError);
    EXPECT_EQ(parse_error_kind("block_number,blob_counts\n1,1;;2\n"), ErrorKind::ParseError);
    EXPECT_EQ(parse_error_kind("block_number,blob_counts\nx,1\n"), ErrorKind::ParseError);
    EXPECT_EQ(parse_error_kind("block_number,blob_counts\n1\n"), ErrorKind::ParseError);
    EXPECT_EQ(parse_error_kind("block_number,blob_counts\n1,1\n\n2,1\n"), ErrorKind::ParseError);
    EXPECT_EQ(parse_error_kind("block_number,blob_counts\n1,1\n1,2\n"), ErrorKind::DuplicateBlock);
}

TEST(BlockCsv, OversizedBlobCountNamesLine) {
    try {
        parse("block_number,blob_counts\n1,1\n2,7\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ParseError);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    std::istringstream in("block_number,blob_counts\n2,7\n");
    EXPECT_EQ(parse_block_csv(in, 9).at(0).blob_counts, std::vector<int>{7});
}

TEST(BlockCsv, RoundTripsRandomRecords) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto records = random_records(rng, 1 + trial * 3);
        std::ostringstream out;
        write_block_csv(out, records);
        EXPECT_EQ(parse(out.str()), records);

        std::ostringstream again;
        write_block_csv(again, parse(out.str()));
        EXPECT_EQ(again.str(), out.str());
    }
}

TEST(BlockCsv, MissingFileIsIoError) {
    try {
        parse_block_file("/nonexistent/blocks.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IoError);
    }
}

TEST(UsageStats, InvariantUnderPermutation) {
    std::mt19937_64 rng(5);
    auto records = random_records(rng, 400);
    const auto base = compute_usage_stats(records);
    for (int i = 0; i < 10; ++i) {
        std::shuffle(records.begin(), records.end(), rng);
        for (auto& r : records) std::shuffle(r.blob_counts.begin(), r.blob_counts.end(), rng);
        const auto s = compute_usage_stats(records);
        EXPECT_EQ(s.blocks_empty, base.blocks_empty);
        EXPECT_EQ(s.btx_total, base.btx_total);
        EXPECT_EQ(s.blob_share, base.blob_share);
        EXPECT_DOUBLE_EQ(s.mean_blobs_per_btx, base.mean_blobs_per_btx);
    }
}

TEST(UsageStats, SharesSumToHundred) {
    std::mt19937_64 rng(9);
    const auto s = compute_usage_stats(random_records(rng, 300));
    double total = 0.0;
    for (double v : s.blob_share) total += v;
    EXPECT_NEAR(total, 100.0, 1e-9);
    EXPECT_NEAR(s.blobs_per_block, s.btx_per_block * s.mean_blobs_per_btx, 1e-12);
}

TEST(UsageStats, AllEmptyBlocksHaveNoShares) {
    const std::vector<BlockRecord> records = {{1, {}}, {2, {}}, {3, {}}};
    const auto s = compute_usage_stats(records);
    EXPECT_FALSE(s.has_btx);
    EXPECT_DOUBLE_EQ(s.blocks_empty_fraction, 1.0);
    EXPECT_DOUBLE_EQ(s.btx_per_block, 0.0);
    for (double v : s.blob_share) EXPECT_EQ(v, 0.0);
    EXPECT_DOUBLE_EQ(implied_load(s, 6, 12.0).rho_blobs, 0.0);
}

TEST(UsageStats, EmptyInputAndBadCounts) {
    try {
        compute_usage_stats({});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
    }
    const std::vector<BlockRecord> bad = {{1, {8}}};
    EXPECT_THROW(compute_usage_stats(bad), Error);
}

TEST(UsageStats, FixtureMatchesReferenceSummary) {
    const auto s = compute_usage_stats(parse_block_file(BLOBQ_USAGE_FIXTURE));
    EXPECT_EQ(s.blocks_total, 10000);
    EXPECT_NEAR(s.blocks_empty_fraction, 0.34, 0.005);
    EXPECT_NEAR(s.btx_per_block, 1.33, 0.01);
    const std::vector<double> shares = {71.7, 3.16, 9.49, 0.143, 11.7, 3.77};
    for (std::size_t k = 0; k < shares.size(); ++k) EXPECT_NEAR(s.blob_share[k], shares[k], 0.1);
    EXPECT_NEAR(implied_load(s, 6, 12.0).rho_blobs, 0.42, 0.01);
}

TEST(ImpliedLoad, ScalesBlobsPerBlockByCapacity) {
    BlobUsageStats s;
    s.blobs_per_block = 2.51;
    s.has_btx = true;
    s.mean_blobs_per_btx = 1.9;
    const auto load = implied_load(s, 6, 12.0);
    EXPECT_NEAR(load.rho_blobs, 2.51 / 6, 1e-15);
    EXPECT_NEAR(load.rho_blobs, 0.418, 1e-3);

    s.blobs_per_block = 6.0;
    EXPECT_DOUBLE_EQ(implied_load(s, 6, 12.0).rho_blobs, 1.0);
    EXPECT_THROW(implied_load(s, 0, 12.0), Error);
    EXPECT_THROW(implied_load(s, 6, 0.0), Error);
}

}  // namespace
}  // namespace blobq::stats
