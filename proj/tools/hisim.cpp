// Copyright 2026 The HiSim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// hisim: partition, run and evaluate OpenQASM 2.0 circuits.
//
// Exit codes: 0 success, 1 usage, 2 input or partition error,
// 3 verification failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hisim/hisim.hpp"

namespace fs = std::filesystem;
using namespace hisim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitVerify = 3;
constexpr double kVerifyTolerance = 1e-10;
constexpr std::size_t kMaxVerifyQubits = 16;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PartitionArgs {
    std::string strategy = "dagp";
    std::optional<std::size_t> limit;
    std::optional<std::size_t> l1;
    std::optional<std::size_t> l2;
    std::uint64_t seed = 1;
    std::size_t trials = 16;
};

void add_partition_flags(CLI::App *cmd, PartitionArgs &args) {
    cmd->add_option("--strategy", args.strategy, "nat, dfs, dagp or multilevel")
        ->check(CLI::IsMember({"nat", "dfs", "dagp", "multilevel"}));
    cmd->add_option("--limit", args.limit, "qubit limit per part (default ceil(n/2))");
    cmd->add_option("--l1", args.l1, "first-level limit for multilevel (default --limit)");
    cmd->add_option("--l2", args.l2, "second-level limit for multilevel (default ceil(l1/2))");
    cmd->add_option("--seed", args.seed, "seed for dfs orders");
    cmd->add_option("--trials", args.trials, "number of dfs orders tried")->check(CLI::PositiveNumber);
}

std::size_t default_limit(const Circuit &c) {
    return std::max((c.num_qubits + 1) / 2, max_arity(c));
}

struct Partitioned {
    PartitionResult level1;
    std::optional<MultiLevelPartition> multilevel;
};

Partitioned run_partitioner(const GateDag &dag, const Circuit &c, const PartitionArgs &args) {
    const std::size_t limit = args.limit.value_or(default_limit(c));
    if (args.strategy == "nat") {
        return {partition_nat(dag, limit), std::nullopt};
    }
    if (args.strategy == "dfs") {
        return {partition_dfs(dag, limit, args.trials, args.seed), std::nullopt};
    }
    if (args.strategy == "dagp") {
        return {partition_dagp(dag, limit), std::nullopt};
    }
    const std::size_t l1 = args.l1.value_or(limit);
    const std::size_t l2 = args.l2.value_or(std::max((l1 + 1) / 2, max_arity(c)));
    auto ml = partition_multilevel(dag, l1, l2);
    return {ml.level1, ml};
}

void print_parts(const PartitionResult &p) {
    std::printf("%-6s %-6s %-6s %s\n", "part", "width", "gates", "qubits");
    for (const auto &part : p.parts) {
        std::string qs;
        for (const Qubit q : part.qubits) {
            qs += (qs.empty() ? "" : ",") + std::to_string(q);
        }
        std::printf("%-6zu %-6zu %-6zu %s\n", part.id, part.working_set, part.gate_indices.size(),
                    qs.c_str());
    }
}

void write_json(const std::string &path, const nlohmann::json &j) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write " + path);
    }
    out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorKind::InvalidPartition, path + ": " + e.what());
    }
}

// --- partition -----------------------------------------------------------

struct PartitionCmd {
    std::string file;
    PartitionArgs args;
    std::string out;
    std::string dot;
};

int cmd_partition(const PartitionCmd &cmd) {
    const Circuit c = load_qasm_file(cmd.file);
    const GateDag dag = build_dag(c);
    const Partitioned result = run_partitioner(dag, c, cmd.args);
    std::printf("circuit %s: %zu qubits, %zu gates\n", fs::path(cmd.file).stem().c_str(), c.num_qubits,
                c.ops.size());
    std::printf("strategy %s, limit %zu, %zu parts\n", cmd.args.strategy.c_str(), result.level1.limit,
                result.level1.num_parts());
    print_parts(result.level1);
    if (result.multilevel) {
        for (std::size_t i = 0; i < result.multilevel->level2.size(); ++i) {
            std::printf("part %zu, second level (limit %zu): %zu parts\n", i, result.multilevel->limit2,
                        result.multilevel->level2[i].num_parts());
        }
    }
    if (!cmd.out.empty()) {
        write_json(cmd.out, result.multilevel ? multilevel_to_json(dag, *result.multilevel)
                                              : partition_to_json(dag, result.level1));
    }
    if (!cmd.dot.empty()) {
        std::ofstream out(cmd.dot);
        if (!out) {
            throw Error(ErrorKind::Io, "cannot write " + cmd.dot);
        }
        write_dot(out, dag, result.level1.assignment);
    }
    return kExitOk;
}

// --- run -----------------------------------------------------------------

struct RunCmd {
    std::string file;
    std::string mode = "hierarchical";
    PartitionArgs args;
    std::string partition_file;
    std::size_t p = 1;
    bool verify = false;
    double tolerance = kVerifyTolerance;
    std::string report;
    std::string trace;
    std::string dump;
};

int cmd_run(const RunCmd &cmd) {
    const Circuit c = load_qasm_file(cmd.file);
    if (cmd.verify && c.num_qubits > kMaxVerifyQubits) {
        throw UsageError("--verify is limited to " + std::to_string(kMaxVerifyQubits) + " qubits");
    }
    if (c.num_qubits > max_qubits()) {
        throw Error(ErrorKind::QubitCountOutOfRange,
                    std::to_string(c.num_qubits) + " qubits exceed the cap of " +
                        std::to_string(max_qubits()) + " (HISIM_MAX_QUBITS)");
    }
    const GateDag dag = build_dag(c);

    RunReport report;
    report.circuit = fs::path(cmd.file).stem().string();
    report.num_qubits = c.num_qubits;
    report.num_gates = c.ops.size();
    report.mode = cmd.mode;

    Partitioned parts;
    if (cmd.mode != "flat") {
        PartitionArgs args = cmd.args;
        if (cmd.mode == "multilevel") {
            args.strategy = "multilevel";
        }
        if (!cmd.partition_file.empty()) {
            const auto j = read_json(cmd.partition_file);
            if (j.contains("children")) {
                auto ml = multilevel_from_json(dag, j);
                parts = {ml.level1, ml};
            } else {
                parts = {partition_from_json(dag, j), std::nullopt};
            }
        } else {
            parts = run_partitioner(dag, c, args);
        }
        if (cmd.mode == "multilevel" && !parts.multilevel) {
            throw UsageError("multilevel mode needs a multilevel partition");
        }
        report.strategy = parts.level1.strategy;
        report.limit = parts.level1.limit;
        if (parts.multilevel) {
            report.limit2 = parts.multilevel->limit2;
        }
        report.parts = summarize_parts(parts.level1);
    }

    ExecStats stats;
    const auto start = std::chrono::steady_clock::now();
    std::optional<StateVector> result;
    if (cmd.mode == "flat") {
        result = simulate_flat(c);
    } else if (cmd.mode == "hierarchical") {
        result = execute_hierarchical(c, parts.level1, &stats);
    } else if (cmd.mode == "multilevel") {
        result = execute_multilevel(c, *parts.multilevel, &stats);
    } else {
        auto dist = parts.multilevel ? simulate_distributed(c, *parts.multilevel, cmd.p)
                                     : simulate_distributed(c, parts.level1, cmd.p);
        result = std::move(dist.state);
        report.comm = std::move(dist.comm);
        report.process_qubits = cmd.p;
    }
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.footprint_bytes = footprint_bytes(c.num_qubits);
    report.norm = std::sqrt(result->norm_squared());
    report.probabilities = significant_probabilities(*result);

    if (cmd.verify) {
        report.max_abs_diff = max_abs_diff(*result, simulate_flat(c));
    }

    std::printf("circuit %s: %zu qubits, %zu gates, mode %s\n", report.circuit.c_str(), c.num_qubits,
                c.ops.size(), cmd.mode.c_str());
    if (cmd.mode != "flat") {
        std::printf("strategy %s, limit %zu, %zu parts\n", report.strategy->c_str(), *report.limit,
                    report.parts.size());
    }
    if (report.comm) {
        std::printf("ranks %zu, part switches %zu, remote bytes %llu, messages %zu\n",
                    report.comm->num_ranks, report.comm->switches.size(),
                    static_cast<unsigned long long>(report.comm->total_remote()),
                    report.comm->total_messages());
    }
    std::printf("wall time %.6f s, footprint %llu bytes, norm %.15f\n", report.wall_time_s,
                static_cast<unsigned long long>(report.footprint_bytes), report.norm);
    if (report.max_abs_diff) {
        std::printf("max |delta| vs flat %.3e\n", *report.max_abs_diff);
    }

    if (!cmd.report.empty()) {
        write_json(cmd.report, report_to_json(report));
    }
    if (!cmd.trace.empty()) {
        std::ofstream out(cmd.trace);
        if (!out) {
            throw Error(ErrorKind::Io, "cannot write " + cmd.trace);
        }
        write_trace(out, stats);
    }
    if (!cmd.dump.empty()) {
        dump_state(*result, cmd.dump);
    }
    if (report.max_abs_diff && !(*report.max_abs_diff < cmd.tolerance)) {
        std::fprintf(stderr, "verification failed: max |delta| %.3e\n", *report.max_abs_diff);
        return kExitVerify;
    }
    return kExitOk;
}

// --- oracle-gap ------------------------------------------------------------

struct GapCmd {
    std::vector<std::string> inputs;
    std::vector<std::size_t> limits{3, 4, 5, 6};
    std::size_t truncate = kOracleMaxGates;
    std::string out;
};

std::vector<fs::path> expand_inputs(const std::vector<std::string> &inputs) {
    std::vector<fs::path> files;
    for (const auto &in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<fs::path> found;
            for (const auto &entry : fs::directory_iterator(in)) {
                if (entry.path().extension() == ".qasm") {
                    found.push_back(entry.path());
                }
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.emplace_back(in);
        }
    }
    return files;
}

int cmd_oracle_gap(const GapCmd &cmd) {
    nlohmann::json rows = nlohmann::json::array();
    std::size_t total = 0, optimal = 0, max_gap = 0;
    std::printf("%-14s %-6s %-6s %-8s %-4s\n", "circuit", "limit", "dagp", "optimal", "gap");
    for (const auto &path : expand_inputs(cmd.inputs)) {
        Circuit c = load_qasm_file(path.string());
        if (c.ops.size() > cmd.truncate) {
            c.ops.resize(cmd.truncate);
        }
        const GateDag dag = build_dag(c);
        const std::string name = path.stem().string();
        for (const std::size_t limit : cmd.limits) {
            nlohmann::json row{{"circuit", name}, {"limit", limit}, {"gates", c.ops.size()}};
            try {
                const std::size_t k = partition_dagp(dag, limit).num_parts();
                const std::size_t opt = optimal_parts_bruteforce(dag, limit);
                row["dagp"] = k;
                row["optimal"] = opt;
                row["gap"] = k - opt;
                ++total;
                optimal += k == opt ? 1 : 0;
                max_gap = std::max(max_gap, k - opt);
                std::printf("%-14s %-6zu %-6zu %-8zu %-4zu\n", name.c_str(), limit, k, opt, k - opt);
            } catch (const Error &e) {
                row["error"] = e.what();
                std::printf("%-14s %-6zu %s\n", name.c_str(), limit, e.what());
            }
            rows.push_back(std::move(row));
        }
    }
    std::printf("optimal in %zu of %zu cases, max gap %zu\n", optimal, total, max_gap);
    if (!cmd.out.empty()) {
        write_json(cmd.out, {{"rows", rows},
                             {"cases", total},
                             {"optimal", optimal},
                             {"max_gap", max_gap}});
    }
    return kExitOk;
}

// --- dag -------------------------------------------------------------------

struct DagCmd {
    std::string file;
    std::string out;
    std::string dot;
};

int cmd_dag(const DagCmd &cmd) {
    const GateDag dag = build_dag(load_qasm_file(cmd.file));
    const auto j = dag_to_json(dag);
    if (cmd.out.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json(cmd.out, j);
    }
    if (!cmd.dot.empty()) {
        std::ofstream out(cmd.dot);
        if (!out) {
            throw Error(ErrorKind::Io, "cannot write " + cmd.dot);
        }
        write_dot(out, dag);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Hierarchical state-vector simulation of OpenQASM 2.0 circuits"};
    app.require_subcommand(1);

    PartitionCmd partition;
    auto *p = app.add_subcommand("partition", "partition a circuit and print the parts");
    p->add_option("file", partition.file, "OpenQASM 2.0 file")->required();
    add_partition_flags(p, partition.args);
    p->add_option("--out", partition.out, "write partition JSON");
    p->add_option("--dot", partition.dot, "write a Graphviz view of the parts");

    RunCmd run;
    auto *r = app.add_subcommand("run", "simulate a circuit");
    r->add_option("file", run.file, "OpenQASM 2.0 file")->required();
    r->add_option("--mode", run.mode, "flat, hierarchical, multilevel or distributed")
        ->check(CLI::IsMember({"flat", "hierarchical", "multilevel", "distributed"}));
    add_partition_flags(r, run.args);
    r->add_option("--partition", run.partition_file, "replay a partition JSON file");
    r->add_option("--p", run.p, "process qubits for distributed mode (2^p ranks)");
    r->add_flag("--verify", run.verify, "compare against flat simulation (n <= 16)");
    r->add_option("--tolerance", run.tolerance, "verification passes when max |delta| is below this")
        ->check(CLI::NonNegativeNumber);
    r->add_option("--report", run.report, "write the run report JSON");
    r->add_option("--trace", run.trace, "write a per-part JSON-lines trace");
    r->add_option("--dump", run.dump, "write the final state (binary plus JSON sidecar)");

    GapCmd gap;
    auto *g = app.add_subcommand("oracle-gap", "compare dagp part counts with the exact optimum");
    g->add_option("inputs", gap.inputs, "circuit files or directories")->required();
    g->add_option("--limits", gap.limits, "qubit limits")->delimiter(',');
    g->add_option("--truncate", gap.truncate, "keep only the first N gates")
        ->check(CLI::Range(std::size_t{1}, kOracleMaxGates));
    g->add_option("--out", gap.out, "write the table as JSON");

    DagCmd dag;
    auto *d = app.add_subcommand("dag", "export the circuit DAG");
    d->add_option("file", dag.file, "OpenQASM 2.0 file")->required();
    d->add_option("--out", dag.out, "write JSON here instead of stdout");
    d->add_option("--dot", dag.dot, "write Graphviz");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (p->parsed()) return cmd_partition(partition);
        if (r->parsed()) return cmd_run(run);
        if (g->parsed()) return cmd_oracle_gap(gap);
        if (d->parsed()) return cmd_dag(dag);
    } catch (const UsageError &e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const Error &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return kExitUsage;
}
