// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "blobq/stats/block_records.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>

#include "blobq/error.hpp"

namespace blobq::stats {
namespace {

template <typename Int>
bool parse_int(std::string_view text, Int& value) {
    if (text.empty() || text.front() == '+' || text.front() == '-') return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

BlockRecord parse_row(std::string_view line, std::size_t line_no, int max_blobs) {
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) {
        throw ParseError(line_no, std::string(line), "expected two comma-separated fields");
    }
    const auto number_text = line.substr(0, comma);
    const auto counts_text = line.substr(comma + 1);
    if (counts_text.find(',') != std::string_view::npos) {
        throw ParseError(line_no, std::string(line), "expected two comma-separated fields");
    }

    BlockRecord record;
    if (!parse_int(number_text, record.block_number)) {
        throw ParseError(line_no, std::string(number_text), "invalid block number");
    }
    if (counts_text.empty()) return record;

    std::size_t start = 0;
    for (;;) {
        const auto end = counts_text.find(';', start);
        const auto token = counts_text.substr(start, end == std::string_view::npos
                                                         ? std::string_view::npos
                                                         : end - start);
        int count = 0;
        if (!parse_int(token, count)) {
            throw ParseError(line_no, std::string(token), "invalid blob count");
        }
        if (count < 1 || count > max_blobs) {
            throw ParseError(line_no, std::string(token),
                             "blob count outside [1, " + std::to_string(max_blobs) + "]");
        }
        record.blob_counts.push_back(count);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return record;
}

}  // namespace

std::vector<BlockRecord> parse_block_csv(std::istream& in, int max_blobs_per_btx) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError(1, "", "missing header");
    ++line_no;
    if (strip_cr(line) != kBlockCsvHeader) {
        throw ParseError(1, line, std::string("header must be '") + kBlockCsvHeader + "'");
    }

    std::vector<BlockRecord> records;
    std::unordered_set<std::uint64_t> seen;
    std::size_t blank_line = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = strip_cr(line);
        if (row.empty()) {
            if (blank_line == 0) blank_line = line_no;
            continue;
        }
        if (blank_line != 0) throw ParseError(blank_line, "", "blank line inside data");

        auto record = parse_row(row, line_no, max_blobs_per_btx);
        if (!seen.insert(record.block_number).second) {
            throw Error(ErrorKind::DuplicateBlock, "line " + std::to_string(line_no) +
                                                       ": duplicate block " +
                                                       std::to_string(record.block_number));
        }
        records.push_back(std::move(record));
    }
    if (in.bad()) throw Error(ErrorKind::IoError, "read failure");
    return records;
}

std::vector<BlockRecord> parse_block_file(const std::filesystem::path& path,
                                          int max_blobs_per_btx) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    return parse_block_csv(in, max_blobs_per_btx);
}

void write_block_csv(std::ostream& out, std::span<const BlockRecord> records, bool with_header) {
    if (with_header) out << kBlockCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.block_number << ',';
        for (std::size_t i = 0; i < r.blob_counts.size(); ++i) {
            if (i > 0) out << ';';
            out << r.blob_counts[i];
        }
        out << '\n';
    }
}

BlobUsageStats compute_usage_stats(std::span<const BlockRecord> records, int max_blobs_per_btx) {
    if (records.empty()) throw Error(ErrorKind::EmptyInput, "no block records");

    BlobUsageStats s;
    std::vector<std::int64_t> per_count(static_cast<std::size_t>(max_blobs_per_btx), 0);
    for (const auto& r : records) {
        ++s.blocks_total;
        if (r.blob_counts.empty()) ++s.blocks_empty;
        for (int c : r.blob_counts) {
            if (c < 1 || c > max_blobs_per_btx) {
                throw Error(ErrorKind::InvalidParameter,
                            "block " + std::to_string(r.block_number) + " has a transaction with " +
                                std::to_string(c) + " blobs");
            }
            ++per_count[static_cast<std::size_t>(c - 1)];
            ++s.btx_total;
            s.blobs_total += c;
        }
    }

    const auto blocks = static_cast<double>(s.blocks_total);
    s.blocks_empty_fraction = static_cast<double>(s.blocks_empty) / blocks;
    s.btx_per_block = static_cast<double>(s.btx_total) / blocks;
    s.blobs_per_block = static_cast<double>(s.blobs_total) / blocks;
    s.blob_share.assign(per_count.size(), 0.0);
    s.has_btx = s.btx_total > 0;
    if (s.has_btx) {
        const auto btx = static_cast<double>(s.btx_total);
        for (std::size_t k = 0; k < per_count.size(); ++k) {
            s.blob_share[k] = 100.0 * static_cast<double>(per_count[k]) / btx;
        }
        s.mean_blobs_per_btx = static_cast<double>(s.blobs_total) / btx;
    }
    return s;
}

ImpliedLoad implied_load(const BlobUsageStats& stats, int B, double tau) {
    if (B < 1) throw Error(ErrorKind::InvalidParameter, "B must be >= 1");
    if (!(tau > 0.0)) throw Error(ErrorKind::InvalidParameter, "tau must be > 0");
    return ImpliedLoad{stats.blobs_per_block / static_cast<double>(B), stats.btx_per_block / tau};
}

}  // namespace blobq::stats
