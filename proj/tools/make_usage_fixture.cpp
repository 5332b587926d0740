// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

// Writes a synthetic block CSV whose aggregates match mainnet blob usage for
// blocks 19993250-20651993: 34% of blocks without blob transactions, 1.33 blob
// transactions per block, and transaction shares by blob count of
// 71.73 / 3.16 / 9.49 / 0.14 / 11.71 / 3.77 percent.
//
// 10,000 blocks carry 13,300 transactions; the per-count totals are the shares
// times 13,300 rounded by largest remainder. No block exceeds 6 blobs.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <vector>

#include "blobq/stats/block_records.hpp"

namespace {

constexpr std::uint64_t kFirstBlock = 19'993'250;
constexpr int kBlocks = 10'000;
constexpr int kEmptyBlocks = 3'400;
constexpr std::array<int, 6> kTxByBlobCount{9540, 420, 1262, 19, 1558, 501};
constexpr int kBlockBlobLimit = 6;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::size_t below(std::size_t n) {
        return static_cast<std::size_t>((engine_() >> 11) * 0x1.0p-53 * static_cast<double>(n));
    }

private:
    std::mt19937_64 engine_;
};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_usage_fixture <out.csv>\n";
        return 64;
    }
    Rng rng(20240601);

    std::vector<int> txs;
    for (std::size_t k = 0; k < kTxByBlobCount.size(); ++k) {
        txs.insert(txs.end(), static_cast<std::size_t>(kTxByBlobCount[k]), static_cast<int>(k + 1));
    }
    // Largest first: every busy block gets one of the big transactions (or a
    // single-blob one once those run out) and the remaining single-blob
    // transactions fill spare capacity at random.
    std::sort(txs.begin(), txs.end(), std::greater<>());

    std::vector<std::size_t> order(kBlocks);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order, rng);
    std::vector<std::size_t> busy(order.begin() + kEmptyBlocks, order.end());

    std::vector<blobq::stats::BlockRecord> blocks(kBlocks);
    std::vector<int> load(kBlocks, 0);
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].block_number = kFirstBlock + i;

    std::size_t next = 0;
    for (std::size_t b : busy) {
        blocks[b].blob_counts.push_back(txs[next]);
        load[b] += txs[next++];
    }
    for (; next < txs.size(); ++next) {
        const int blobs = txs[next];
        std::size_t target = blocks.size();
        for (int attempt = 0; attempt < 1000 && target == blocks.size(); ++attempt) {
            const std::size_t b = busy[rng.below(busy.size())];
            if (load[b] + blobs <= kBlockBlobLimit) target = b;
        }
        if (target == blocks.size()) {
            const auto it = std::find_if(busy.begin(), busy.end(),
                                         [&](std::size_t b) { return load[b] + blobs <= kBlockBlobLimit; });
            if (it == busy.end()) {
                std::cerr << "no block can take a " << blobs << "-blob transaction\n";
                return 1;
            }
            target = *it;
        }
        blocks[target].blob_counts.push_back(blobs);
        load[target] += blobs;
    }
    for (auto& block : blocks) shuffle(block.blob_counts, rng);

    std::ofstream out(argv[1], std::ios::binary);
    blobq::stats::write_block_csv(out, blocks);
    return out ? 0 : 1;
}
