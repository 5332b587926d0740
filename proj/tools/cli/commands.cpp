// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "blobq/analytic/solver.hpp"
#include "blobq/error.hpp"
#include "blobq/sim/simulator.hpp"
#include "blobq/sim/validation.hpp"
#include "blobq/stats/block_records.hpp"
#include "blobq/stats/rpc_fetcher.hpp"

namespace blobq::cli {
namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto end = text.find(sep, start);
        parts.emplace_back(text.substr(start, end == std::string_view::npos ? end : end - start));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return parts;
}

double parse_double(const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(value)) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    return value;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    for (const auto& part : split(text, ',')) {
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != part.size() || value < 1) {
            throw UsageError("--B expects a comma list of positive integers, got '" + text + "'");
        }
        values.push_back(value);
    }
    return values;
}

std::string format_number(std::optional<double> value) {
    if (!value || !std::isfinite(*value)) return {};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", *value);
    return buf;
}

Json number_or_null(double value) {
    return std::isfinite(value) ? Json(value) : Json(nullptr);
}

void report_error(std::ostream& err, std::string_view kind, std::string_view message) {
    err << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

struct LoadFlags {
    std::optional<double> lambda;
    std::optional<double> rho;
    double tau = 12.0;
    int B = 6;

    void attach(CLI::App& cmd) {
        auto* l = cmd.add_option("--lambda", lambda, "Arrival rate of blob transactions (1/s)");
        auto* r = cmd.add_option("--rho", rho, "Offered load per blob slot; lambda = rho * B / tau");
        l->excludes(r);
        cmd.add_option("--tau", tau, "Block interval in seconds")->capture_default_str()
            ->check(CLI::PositiveNumber);
        cmd.add_option("--B", B, "Blob capacity per block")->capture_default_str()
            ->check(CLI::PositiveNumber);
    }

    double resolve_lambda(double mean_blobs = 1.0) const {
        if (lambda) return *lambda;
        if (rho) return *rho * static_cast<double>(B) / (tau * mean_blobs);
        throw UsageError("one of --lambda or --rho is required");
    }
};

struct SimFlags {
    std::int64_t horizon_blocks = 250'000;
    std::optional<std::int64_t> warmup_blocks;
    std::uint64_t seed = 42;
    int replications = 10;
    std::string packing = "fifo-blocking";
    unsigned threads = 0;

    void attach(CLI::App& cmd) {
        cmd.add_option("--horizon-blocks", horizon_blocks, "Blocks per replication, warmup included")
            ->capture_default_str()->check(CLI::PositiveNumber);
        cmd.add_option("--warmup-blocks", warmup_blocks,
                       "Blocks discarded before measuring (default 10% of horizon, min 1000)");
        cmd.add_option("--seed", seed, "Master seed")->capture_default_str();
        cmd.add_option("--replications", replications, "Independent replications")
            ->capture_default_str()->check(CLI::PositiveNumber);
        cmd.add_option("--packing", packing, "fifo-blocking or first-fit")
            ->capture_default_str()->check(CLI::IsMember({"fifo-blocking", "first-fit"}));
        cmd.add_option("--threads", threads, "Worker threads (0 = all cores)");
    }

    sim::SimConfig config(double lambda, double tau, int B) const {
        sim::SimConfig c;
        c.lambda = lambda;
        c.tau = tau;
        c.B = B;
        c.horizon_blocks = horizon_blocks;
        c.warmup_blocks = warmup_blocks;
        c.seed = seed;
        c.replications = replications;
        c.packing = *sim::parse_packing_policy(packing);
        c.threads = threads;
        return c;
    }
};

Json metrics_json(const analytic::QueueMetrics& m) {
    return Json{{"lambda", m.lambda},
                {"tau", m.tau},
                {"B", m.B},
                {"rho", m.rho},
                {"N", m.N},
                {"T", m.T},
                {"n_max_used", m.n_max_used},
                {"tail_mass", m.tail_mass},
                {"normalization_deficit", m.normalization_deficit}};
}

Json sim_json(const sim::SimConfig& c, const sim::SimResult& r) {
    return Json{{"lambda", c.lambda},
                {"tau", c.tau},
                {"B", c.B},
                {"rho", c.rho()},
                {"seed", c.seed},
                {"replications", c.replications},
                {"packing", sim::to_string(c.packing)},
                {"mean_sojourn", number_or_null(r.mean_sojourn)},
                {"ci95_low", number_or_null(r.ci95.low)},
                {"ci95_high", number_or_null(r.ci95.high)},
                {"mean_queue_length", r.mean_queue_length},
                {"queue_length_ci95_low", r.queue_length_ci95.low},
                {"queue_length_ci95_high", r.queue_length_ci95.high},
                {"empty_block_fraction", r.empty_block_fraction},
                {"blocks_simulated", r.blocks_simulated},
                {"btx_served", r.btx_served},
                {"total_arrivals", r.total_arrivals},
                {"final_queue_length", r.final_queue_length},
                {"overloaded", r.overloaded},
                {"per_replication_means", r.per_replication_means},
                {"time_avg_distribution", r.time_avg_distribution},
                {"arrival_observed_distribution", r.arrival_observed_distribution}};
}

Json stats_json(const stats::BlobUsageStats& s, const stats::ImpliedLoad& load) {
    return Json{{"blocks_total", s.blocks_total},
                {"blocks_empty_fraction", s.blocks_empty_fraction},
                {"btx_total", s.btx_total},
                {"btx_per_block", s.btx_per_block},
                {"blob_share", s.blob_share},
                {"mean_blobs_per_btx", s.has_btx ? Json(s.mean_blobs_per_btx) : Json(nullptr)},
                {"blobs_per_block", s.blobs_per_block},
                {"has_btx", s.has_btx},
                {"rho_blobs", load.rho_blobs},
                {"lambda_btx", load.lambda_btx}};
}

std::string resolve_endpoint(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(stats::kRpcEndpointEnv); env && *env) return env;
    throw UsageError(std::string("no RPC endpoint: pass --rpc or set ") + stats::kRpcEndpointEnv);
}

// Output goes to `out` for "-" and to a file otherwise.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback, std::ios::openmode mode = std::ios::trunc)
        : stream_(&fallback) {
        if (path != "-") {
            file_.open(path, std::ios::out | std::ios::binary | mode);
            if (!file_) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
            stream_ = &file_;
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

int cmd_solve(const LoadFlags& load, int budget, std::ostream& out) {
    analytic::SolveOptions options;
    options.n_max_budget = budget;
    const auto m = analytic::solve_delay(load.resolve_lambda(), load.tau, load.B, options);
    out << metrics_json(m).dump(2) << '\n';
    return kExitOk;
}

int cmd_sweep(const std::string& B_list, double tau, const std::string& rho_text, bool with_sim,
              const SimFlags& sim_flags, const std::string& out_path, std::ostream& out) {
    const auto batches = parse_int_list(B_list);
    std::vector<double> grid;
    try {
        grid = parse_rho_grid(rho_text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    std::vector<SweepCsvRow> rows;
    for (int B : batches) {
        const auto solved = analytic::sweep_load(B, tau, grid);
        for (std::size_t i = 0; i < solved.size(); ++i) {
            const auto& s = solved[i];
            SweepCsvRow row;
            row.B = B;
            row.tau = tau;
            row.rho = s.rho;
            row.lambda = s.lambda;
            if (!s.ok()) {
                row.status = std::string(to_string(*s.error));
                rows.push_back(row);
                continue;
            }
            row.N_analytic = s.N;
            row.T_analytic = s.T;
            row.status = "ok";
            if (with_sim) {
                auto config = sim_flags.config(s.lambda, tau, B);
                config.seed = sim::replication_seed(
                    sim_flags.seed, static_cast<std::uint64_t>(B) * 1'000'003ULL + i);
                const auto r = sim::simulate(config);
                row.T_sim_mean = r.mean_sojourn;
                row.T_sim_ci_low = r.ci95.low;
                row.T_sim_ci_high = r.ci95.high;
            }
            rows.push_back(row);
        }
    }

    Sink sink(out_path, out);
    sink.get() << kSweepCsvHeader << '\n';
    std::size_t failed = 0;
    for (const auto& row : rows) {
        sink.get() << format_sweep_row(row) << '\n';
        if (row.status != "ok") ++failed;
    }
    return (!rows.empty() && failed == rows.size()) ? kExitFailure : kExitOk;
}

std::vector<double> parse_blob_dist(const std::string& text) {
    std::vector<double> dist;
    try {
        for (const auto& part : split(text, ',')) dist.push_back(parse_double(part));
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--blob-dist: ") + e.what());
    }
    return dist;
}

int cmd_simulate(const LoadFlags& load, const SimFlags& flags, const std::string& blob_dist,
                 std::ostream& out) {
    const auto dist = parse_blob_dist(blob_dist);
    double mean_blobs = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) mean_blobs += static_cast<double>(k + 1) * dist[k];
    auto config = flags.config(load.resolve_lambda(mean_blobs > 0.0 ? mean_blobs : 1.0), load.tau,
                               load.B);
    config.blob_size_dist = dist;
    const auto result = sim::simulate(config);
    out << sim_json(config, result).dump(2) << '\n';
    return kExitOk;
}

int cmd_batch_experiment(const LoadFlags& load, const SimFlags& flags, std::ostream& out) {
    const double lambda = load.resolve_lambda();
    const auto base = flags.config(lambda, load.tau, load.B);
    const auto e = sim::effective_batch_experiment(lambda, load.tau, load.B, base);
    const Json doc{{"rho", e.rho},
                   {"lambda", e.lambda},
                   {"tau", e.tau},
                   {"B", e.B},
                   {"single_blob_mean_sojourn", e.single_blob.mean_sojourn},
                   {"single_blob_ci95_low", e.single_blob.ci95.low},
                   {"single_blob_ci95_high", e.single_blob.ci95.high},
                   {"full_batch_mean_sojourn", e.full_batch.mean_sojourn},
                   {"full_batch_ci95_low", e.full_batch.ci95.low},
                   {"full_batch_ci95_high", e.full_batch.ci95.high},
                   {"analytic_single_blob_T", e.analytic_single_blob.T},
                   {"analytic_full_batch_T", e.analytic_full_batch.T},
                   {"full_batch_matches_analytic", e.full_batch_matches_analytic}};
    out << doc.dump(2) << '\n';
    return kExitOk;
}

stats::FetchOptions fetch_options(const std::string& rpc, std::uint64_t from, std::uint64_t to,
                                  unsigned concurrency, int max_blobs) {
    stats::FetchOptions options;
    options.endpoint = resolve_endpoint(rpc);
    options.from_block = from;
    options.to_block = to;
    options.max_in_flight = concurrency;
    options.max_blobs_per_btx = max_blobs;
    return options;
}

}  // namespace

std::vector<double> parse_rho_grid(std::string_view text) {
    const auto fields = split(text, ':');
    if (fields.size() == 3) {
        const double start = parse_double(fields[0]);
        const double stop = parse_double(fields[1]);
        const double step = parse_double(fields[2]);
        if (!(step > 0.0) || stop < start) {
            throw std::invalid_argument("grid needs start <= stop and step > 0");
        }
        const double span = (stop - start) / step;
        auto count = static_cast<std::size_t>(std::floor(span + 1e-9));
        std::vector<double> grid;
        for (std::size_t i = 0; i <= count; ++i) {
            // Round away binary noise so 0.05 * 3 prints as 0.15.
            const double v = start + static_cast<double>(i) * step;
            grid.push_back(std::round(v * 1e12) / 1e12);
        }
        return grid;
    }
    if (fields.size() != 1) throw std::invalid_argument("grid must be start:stop:step or a list");
    std::vector<double> grid;
    for (const auto& part : split(text, ',')) grid.push_back(parse_double(part));
    return grid;
}

std::string format_sweep_row(const SweepCsvRow& row) {
    std::ostringstream line;
    line << row.B << ',' << format_number(row.tau) << ',' << format_number(row.rho) << ','
         << format_number(row.lambda) << ',' << format_number(row.N_analytic) << ','
         << format_number(row.T_analytic) << ',' << format_number(row.T_sim_mean) << ','
         << format_number(row.T_sim_ci_low) << ',' << format_number(row.T_sim_ci_high) << ','
         << row.status;
    return line.str();
}

std::vector<SweepCsvRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kSweepCsvHeader) {
        throw std::invalid_argument("missing sweep CSV header");
    }
    auto optional_number = [](const std::string& s) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        return parse_double(s);
    };
    std::vector<SweepCsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 10) throw std::invalid_argument("sweep row needs 10 fields: " + line);
        SweepCsvRow row;
        row.B = std::stoi(f[0]);
        row.tau = parse_double(f[1]);
        row.rho = parse_double(f[2]);
        row.lambda = parse_double(f[3]);
        row.N_analytic = optional_number(f[4]);
        row.T_analytic = optional_number(f[5]);
        row.T_sim_mean = optional_number(f[6]);
        row.T_sim_ci_low = optional_number(f[7]);
        row.T_sim_ci_high = optional_number(f[8]);
        row.status = f[9];
        rows.push_back(row);
    }
    return rows;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Delay analysis of blob-carrying transactions"};
    app.name("blobq");
    app.require_subcommand(1);

    LoadFlags solve_load;
    int n_max_budget = 4096;
    auto* solve = app.add_subcommand("solve", "Analytic steady-state delay");
    solve_load.attach(*solve);
    solve->add_option("--n-max-budget", n_max_budget, "Largest truncation bound to try")
        ->capture_default_str();

    std::string sweep_B = "6";
    double sweep_tau = 12.0;
    std::string sweep_rho;
    bool with_sim = false;
    SimFlags sweep_sim;
    std::string sweep_out = "-";
    auto* sweep = app.add_subcommand("sweep", "Delay over a grid of loads, as CSV");
    sweep->add_option("--B", sweep_B, "Comma list of blob capacities")->capture_default_str();
    sweep->add_option("--tau", sweep_tau, "Block interval in seconds")->capture_default_str()
        ->check(CLI::PositiveNumber);
    sweep->add_option("--rho", sweep_rho, "start:stop:step, comma list or single load")->required();
    sweep->add_flag("--with-sim", with_sim, "Fill the simulation columns");
    sweep_sim.attach(*sweep);
    sweep->add_option("--out", sweep_out, "Output CSV path ('-' for stdout)")->capture_default_str();

    LoadFlags sim_load;
    SimFlags sim_flags;
    std::string blob_dist = "1";
    auto* simulate = app.add_subcommand("simulate", "Clocked batch-service simulation");
    sim_load.attach(*simulate);
    sim_flags.attach(*simulate);
    simulate->add_option("--blob-dist", blob_dist,
                         "Comma list: probability of 1, 2, ... blobs per transaction")
        ->capture_default_str();

    LoadFlags batch_load;
    SimFlags batch_flags;
    auto* batch = app.add_subcommand("batch-experiment",
                                     "Single-blob vs full-capacity transactions at equal load");
    batch_load.attach(*batch);
    batch_flags.attach(*batch);

    std::string stats_input;
    std::string stats_rpc;
    std::optional<std::uint64_t> stats_from;
    std::optional<std::uint64_t> stats_to;
    int stats_B = 6;
    double stats_tau = 12.0;
    int max_blobs = stats::kDefaultMaxBlobsPerBtx;
    unsigned stats_concurrency = 8;
    auto* stats_cmd = app.add_subcommand("stats", "Blob usage statistics of block data");
    auto* input_opt = stats_cmd->add_option("--input", stats_input, "Block CSV file");
    auto* rpc_opt = stats_cmd->add_option("--rpc", stats_rpc, "JSON-RPC endpoint");
    auto* from_opt = stats_cmd->add_option("--from", stats_from, "First block (with --rpc)");
    auto* to_opt = stats_cmd->add_option("--to", stats_to, "Last block (with --rpc)");
    input_opt->excludes(rpc_opt)->excludes(from_opt)->excludes(to_opt);
    from_opt->needs(to_opt);
    to_opt->needs(from_opt);
    stats_cmd->add_option("--B", stats_B, "Blob capacity for the implied load")
        ->capture_default_str()->check(CLI::PositiveNumber);
    stats_cmd->add_option("--tau", stats_tau, "Block interval in seconds")->capture_default_str()
        ->check(CLI::PositiveNumber);
    stats_cmd->add_option("--max-blobs", max_blobs, "Largest allowed blob count per transaction")
        ->capture_default_str()->check(CLI::PositiveNumber);
    stats_cmd->add_option("--concurrency", stats_concurrency, "Requests in flight (with --rpc)")
        ->capture_default_str();

    std::string fetch_rpc;
    std::uint64_t fetch_from = 0;
    std::uint64_t fetch_to = 0;
    std::string fetch_out;
    std::string fetch_checkpoint;
    unsigned fetch_concurrency = 8;
    std::size_t fetch_chunk = 64;
    int fetch_retries = 3;
    int fetch_backoff_ms = 250;
    auto* fetch = app.add_subcommand("fetch", "Download block blob counts to CSV");
    fetch->add_option("--rpc", fetch_rpc, std::string("JSON-RPC endpoint (or $") +
                                              stats::kRpcEndpointEnv + ")");
    fetch->add_option("--from", fetch_from, "First block")->required();
    fetch->add_option("--to", fetch_to, "Last block")->required();
    fetch->add_option("--out", fetch_out, "Output CSV path")->required();
    fetch->add_option("--checkpoint", fetch_checkpoint,
                      "Resume file holding the last block written");
    fetch->add_option("--concurrency", fetch_concurrency, "Requests in flight")->capture_default_str();
    fetch->add_option("--chunk-size", fetch_chunk, "Blocks per checkpointed chunk")
        ->capture_default_str()->check(CLI::PositiveNumber);
    fetch->add_option("--retries", fetch_retries, "Retries per request")->capture_default_str();
    fetch->add_option("--backoff-ms", fetch_backoff_ms, "Initial retry backoff")
        ->capture_default_str();
    fetch->add_option("--max-blobs", max_blobs, "Largest allowed blob count per transaction")
        ->capture_default_str()->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_load, n_max_budget, out);
        if (sweep->parsed()) {
            return cmd_sweep(sweep_B, sweep_tau, sweep_rho, with_sim, sweep_sim, sweep_out, out);
        }
        if (simulate->parsed()) return cmd_simulate(sim_load, sim_flags, blob_dist, out);
        if (batch->parsed()) return cmd_batch_experiment(batch_load, batch_flags, out);
        if (stats_cmd->parsed()) {
            std::vector<stats::BlockRecord> records;
            if (!stats_input.empty()) {
                records = stats::parse_block_file(stats_input, max_blobs);
            } else if (stats_from) {
                records = stats::fetch_blocks(
                    fetch_options(stats_rpc, *stats_from, *stats_to, stats_concurrency, max_blobs));
            } else {
                throw UsageError("stats needs --input or --from/--to with an RPC endpoint");
            }
            const auto s = stats::compute_usage_stats(records, max_blobs);
            out << stats_json(s, stats::implied_load(s, stats_B, stats_tau)).dump(2) << '\n';
            return kExitOk;
        }
        if (fetch->parsed()) {
            auto options = fetch_options(fetch_rpc, fetch_from, fetch_to, fetch_concurrency, max_blobs);
            options.chunk_size = fetch_chunk;
            options.max_retries = fetch_retries;
            options.initial_backoff = std::chrono::milliseconds(fetch_backoff_ms);
            bool resuming = false;
            if (!fetch_checkpoint.empty()) {
                options.checkpoint = fetch_checkpoint;
                resuming = stats::read_checkpoint(fetch_checkpoint).has_value() &&
                           std::filesystem::exists(fetch_out);
            }
            Sink sink(fetch_out, out, resuming ? std::ios::app : std::ios::trunc);
            if (!resuming) sink.get() << stats::kBlockCsvHeader << '\n';
            std::size_t written = 0;
            stats::fetch_blocks(options, [&](std::span<const stats::BlockRecord> chunk) {
                stats::write_block_csv(sink.get(), chunk, false);
                sink.get().flush();
                written += chunk.size();
            });
            err << Json{{"blocks_written", written}, {"out", fetch_out}}.dump() << '\n';
            return kExitOk;
        }
    } catch (const UsageError& e) {
        report_error(err, "usage", e.what());
        return kExitUsage;
    } catch (const Error& e) {
        report_error(err, to_string(e.kind()), e.what());
        return e.kind() == ErrorKind::UnstableLoad ? kExitUnstable : kExitFailure;
    } catch (const std::exception& e) {
        report_error(err, "internal", e.what());
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace blobq::cli
