// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#ifdef BLOBQ_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include "blobq/stats/rpc_fetcher.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "blobq/error.hpp"

namespace blobq::stats {
namespace {

using nlohmann::json;

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || url.size() == scheme_end + 3) {
        throw Error(ErrorKind::InvalidParameter, "endpoint must look like http://host[:port][/path]");
    }
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw Error(ErrorKind::InvalidParameter, "unsupported endpoint scheme '" + scheme + "'");
    }
    const auto slash = url.find('/', scheme_end + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

std::string to_hex(std::uint64_t value) {
    std::ostringstream out;
    out << "0x" << std::hex << value;
    return out.str();
}

std::uint64_t parse_hex_quantity(const std::string& text) {
    if (text.size() < 3 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X')) {
        throw Error(ErrorKind::RpcError, "malformed hex quantity '" + text + "'");
    }
    std::size_t used = 0;
    std::uint64_t value = 0;
    try {
        value = std::stoull(text.substr(2), &used, 16);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() - 2) throw Error(ErrorKind::RpcError, "malformed hex quantity '" + text + "'");
    return value;
}

std::unique_ptr<httplib::Client> make_client(const Endpoint& endpoint, const FetchOptions& options) {
    auto client = std::make_unique<httplib::Client>(endpoint.origin);
    client->set_connection_timeout(options.timeout);
    client->set_read_timeout(options.timeout);
    client->set_write_timeout(options.timeout);
    client->set_keep_alive(true);
    return client;
}

BlockRecord fetch_one(httplib::Client& client, const Endpoint& endpoint, std::uint64_t number,
                      const FetchOptions& options) {
    const json request = {{"jsonrpc", "2.0"},
                          {"id", number},
                          {"method", "eth_getBlockByNumber"},
                          {"params", {to_hex(number), true}}};
    const auto body = request.dump();

    std::string last_failure;
    for (int attempt = 0;; ++attempt) {
        auto res = client.Post(endpoint.path, body, "application/json");
        if (res && res->status == 200) {
            return parse_block_response(res->body, number, options.max_blobs_per_btx);
        }
        if (res) {
            last_failure = "HTTP status " + std::to_string(res->status);
            if (res->status != 429 && res->status < 500) break;
        } else {
            last_failure = httplib::to_string(res.error());
        }
        if (attempt >= options.max_retries) break;
        std::this_thread::sleep_for(options.initial_backoff * (1LL << std::min(attempt, 20)));
    }
    throw Error(ErrorKind::NetworkError, "block " + std::to_string(number) + " from " +
                                             endpoint.origin + endpoint.path + ": " + last_failure);
}

}  // namespace

BlockRecord parse_block_response(std::string_view body, std::uint64_t block_number,
                                 int max_blobs_per_btx) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::RpcError, std::string("malformed JSON-RPC response: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::RpcError, "JSON-RPC response is not an object");

    if (auto it = doc.find("error"); it != doc.end() && !it->is_null()) {
        const long long code = it->value("code", 0LL);
        const std::string message = it->value("message", std::string("unknown error"));
        throw RpcError(code, message);
    }
    const auto result = doc.find("result");
    if (result == doc.end() || result->is_null()) {
        throw Error(ErrorKind::RangeError, "block " + std::to_string(block_number) + " not available");
    }
    if (auto number = result->find("number"); number != result->end() && number->is_string()) {
        if (parse_hex_quantity(number->get<std::string>()) != block_number) {
            throw Error(ErrorKind::RpcError, "response is for a different block than " +
                                                 std::to_string(block_number));
        }
    }

    BlockRecord record;
    record.block_number = block_number;
    const auto txs = result->find("transactions");
    if (txs == result->end() || !txs->is_array()) return record;

    for (const auto& tx : *txs) {
        if (!tx.is_object()) {
            throw Error(ErrorKind::RpcError, "block " + std::to_string(block_number) +
                                                 " returned transaction hashes, not objects");
        }
        const auto type = tx.find("type");
        if (type == tx.end() || !type->is_string()) continue;
        if (parse_hex_quantity(type->get<std::string>()) != 3) continue;

        const auto hashes = tx.find("blobVersionedHashes");
        const auto count = (hashes != tx.end() && hashes->is_array()) ? hashes->size() : 0;
        if (count < 1 || count > static_cast<std::size_t>(max_blobs_per_btx)) {
            throw Error(ErrorKind::RpcError, "block " + std::to_string(block_number) +
                                                 " has a type-3 transaction with " +
                                                 std::to_string(count) + " blob hashes");
        }
        record.blob_counts.push_back(static_cast<int>(count));
    }
    return record;
}

std::optional<std::uint64_t> read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::uint64_t value = 0;
    if (!(in >> value)) throw Error(ErrorKind::IoError, "unreadable checkpoint " + path.string());
    return value;
}

void write_checkpoint(const std::filesystem::path& path, std::uint64_t last_block) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!(out << last_block << '\n')) {
            throw Error(ErrorKind::IoError, "cannot write checkpoint " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot write checkpoint " + path.string());
}

std::vector<BlockRecord> fetch_blocks(const FetchOptions& options, const ChunkSink& sink) {
    if (options.endpoint.empty()) throw Error(ErrorKind::InvalidParameter, "no RPC endpoint given");
    if (options.from_block > options.to_block) {
        throw Error(ErrorKind::RangeError, "from block " + std::to_string(options.from_block) +
                                               " is after to block " + std::to_string(options.to_block));
    }
    const auto endpoint = split_endpoint(options.endpoint);
    const unsigned workers = std::max(1u, options.max_in_flight);
    const std::size_t chunk = std::max<std::size_t>(1, options.chunk_size);

    std::uint64_t start = options.from_block;
    if (options.checkpoint) {
        if (const auto done = read_checkpoint(*options.checkpoint)) {
            if (*done >= options.to_block) return {};
            if (*done >= options.from_block) start = *done + 1;
        }
    }

    std::vector<std::unique_ptr<httplib::Client>> clients;
    for (unsigned w = 0; w < workers; ++w) clients.push_back(make_client(endpoint, options));

    std::vector<BlockRecord> all;
    for (std::uint64_t lo = start;;) {
        const std::uint64_t hi = std::min<std::uint64_t>(options.to_block, lo + (chunk - 1));
        const std::size_t count = static_cast<std::size_t>(hi - lo + 1);

        std::vector<BlockRecord> records(count);
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        {
            std::vector<std::jthread> pool;
            const unsigned active = static_cast<unsigned>(std::min<std::size_t>(workers, count));
            for (unsigned w = 0; w < active; ++w) {
                pool.emplace_back([&, w] {
                    for (;;) {
                        const std::size_t i = next.fetch_add(1);
                        if (i >= count) return;
                        try {
                            records[i] = fetch_one(*clients[w], endpoint, lo + i, options);
                        } catch (...) {
                            std::lock_guard lock(failure_mutex);
                            if (!failure) failure = std::current_exception();
                            next.store(count);
                            return;
                        }
                    }
                });
            }
        }
        if (failure) std::rethrow_exception(failure);

        if (sink) sink(records);
        if (options.checkpoint) write_checkpoint(*options.checkpoint, hi);
        all.insert(all.end(), std::make_move_iterator(records.begin()),
                   std::make_move_iterator(records.end()));

        if (hi == options.to_block) break;
        lo = hi + 1;
    }
    return all;
}

}  // namespace blobq::stats
