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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

namespace hisim {
namespace {

constexpr std::size_t kCorpusSize = 200;
constexpr std::uint64_t kCorpusSeed = 20260101;
constexpr double kStateTolerance = 1e-10;

struct Outcome {
    bool pass{true};
    std::string detail;
};

// Worst norm drift over every simulation run by the criteria below.
double g_worst_norm_error = 0.0;

void track_norm(const StateVector &sv) {
    g_worst_norm_error = std::max(g_worst_norm_error, std::abs(sv.norm_squared() - 1.0));
}

std::size_t min_limit(const Circuit &c) { return std::max<std::size_t>(2, max_arity(c)); }

const std::vector<Circuit> &corpus() {
    static const std::vector<Circuit> c = testing::random_corpus(kCorpusSize, kCorpusSeed);
    return c;
}

std::vector<PartitionResult> all_strategies(const GateDag &dag, std::size_t limit) {
    return {partition_nat(dag, limit), partition_dfs(dag, limit, 16, 1), partition_dagp(dag, limit)};
}

Outcome criterion1() {
    std::size_t runs = 0;
    double worst = 0.0;
    for (const auto &c : corpus()) {
        const GateDag dag = build_dag(c);
        const StateVector flat = simulate_flat(c);
        track_norm(flat);
        for (std::size_t limit = min_limit(c); limit <= c.num_qubits; ++limit) {
            for (const auto &p : all_strategies(dag, limit)) {
                const StateVector sv = execute_hierarchical(c, p);
                track_norm(sv);
                worst = std::max(worst, max_abs_diff(sv, flat));
                ++runs;
            }
        }
    }
    std::ostringstream d;
    d << runs << " runs over " << corpus().size() << " circuits, max |delta| " << worst;
    return {worst < kStateTolerance && runs > 0, d.str()};
}

Outcome criterion2() {
    std::size_t runs = 0, plans = 0, bad_plans = 0;
    double worst = 0.0;
    for (const auto &c : corpus()) {
        const StateVector flat = simulate_flat(c);
        const GateDag dag = build_dag(c);
        for (std::size_t p = 0; p <= 3; ++p) {
            if (c.num_qubits < p + min_limit(c)) continue;
            const std::size_t limit = c.num_qubits - p;
            for (const auto &part : all_strategies(dag, limit)) {
                const DistributedResult r = simulate_distributed(c, part, p);
                track_norm(r.state);
                worst = std::max(worst, max_abs_diff(r.state, flat));
                ++runs;
                for (std::size_t k = 0; k + 1 < part.parts.size(); ++k) {
                    const RankLayout a = choose_layout(part.parts[k], c.num_qubits, p);
                    const RankLayout b = choose_layout(part.parts[k + 1], c.num_qubits, p);
                    const RankBuffers start = distribute(flat.amplitudes(), a);
                    const RankBuffers moved = apply_redistribution(plan_redistribution(a, b), start);
                    const bool forward = collect(moved, b) == flat;
                    const bool back = apply_redistribution(plan_redistribution(b, a), moved) == start;
                    bad_plans += (forward && back) ? 0 : 1;
                    ++plans;
                }
            }
        }
    }
    std::ostringstream d;
    d << runs << " distributed runs, max |delta| " << worst << "; " << plans << " plans, " << bad_plans
      << " round-trip failures";
    return {worst < kStateTolerance && bad_plans == 0 && runs > 0 && plans > 0, d.str()};
}

Outcome criterion3() {
    std::size_t checked = 0, violations = 0;
    std::string first;
    auto record = [&](const std::vector<std::string> &problems, const std::string &what) {
        ++checked;
        violations += problems.size();
        if (!problems.empty() && first.empty()) first = what + ": " + problems.front();
    };
    for (std::size_t i = 0; i < corpus().size(); ++i) {
        const Circuit &c = corpus()[i];
        const GateDag dag = build_dag(c);
        for (std::size_t limit = min_limit(c); limit <= c.num_qubits; ++limit) {
            for (const auto &p : all_strategies(dag, limit)) {
                record(partition_violations(dag, p, limit), "circuit " + std::to_string(i) + " " + p.strategy);
            }
            const std::size_t l2 = std::max(min_limit(c), (limit + 1) / 2);
            const MultiLevelPartition ml = partition_multilevel(dag, limit, l2);
            record(multilevel_violations(dag, ml, limit), "circuit " + std::to_string(i) + " multilevel");
        }
    }
    std::ostringstream d;
    d << checked << " partitions checked, " << violations << " violations";
    if (!first.empty()) d << " (first: " << first << ")";
    return {violations == 0 && checked > 0, d.str()};
}

Outcome criterion4() {
    const char *names[] = {"cat_state", "bv", "qaoa", "cc", "ising", "qft_12", "qnn",
                           "grover", "qpe", "bv_16", "ising_14", "cc_16", "adder"};
    std::size_t cases = 0, optimal = 0, out_of_range = 0;
    std::ostringstream misses;
    for (const char *name : names) {
        const GateDag dag = build_dag(testing::truncated(testing::bundled(name), kOracleMaxGates));
        for (const std::size_t limit : {3, 4, 5, 6}) {
            const auto k = static_cast<long>(partition_dagp(dag, limit).num_parts());
            const auto opt = static_cast<long>(optimal_parts_bruteforce(dag, limit));
            const long gap = k - opt;
            ++cases;
            if (gap == 0) {
                ++optimal;
            } else {
                misses << " " << name << "@" << limit << "=" << k << "/" << opt;
            }
            if (gap < 0 || gap > 2) ++out_of_range;
        }
    }
    std::ostringstream d;
    d << cases << " cases, " << optimal << " optimal, " << out_of_range << " outside gap 0..2";
    if (!misses.str().empty()) d << ";" << misses.str();
    return {cases >= 52 && out_of_range == 0 && optimal * 100 >= cases * 85, d.str()};
}

Outcome criterion5() {
    const Circuit c = testing::bundled("qaoa");
    const GateDag dag = build_dag(c);
    bool pass = true;
    std::ostringstream d;
    d << "qaoa n=" << c.num_qubits << ", " << c.ops.size() << " gates; dagp/dfs/nat:";
    for (std::size_t limit = 4; limit <= 8; ++limit) {
        const auto nat = partition_nat(dag, limit);
        const auto dfs = partition_dfs(dag, limit, 16, 1);
        const auto dagp = partition_dagp(dag, limit);
        d << " L" << limit << "=" << dagp.num_parts() << "/" << dfs.num_parts() << "/" << nat.num_parts();
        pass = pass && dagp.num_parts() <= dfs.num_parts() && dfs.num_parts() <= nat.num_parts();
        for (const auto *p : {&nat, &dfs, &dagp}) {
            std::size_t sum = 0;
            for (const auto &part : p->parts) sum += part.gate_indices.size();
            pass = pass && sum == c.ops.size();
        }
    }
    return {pass, d.str()};
}

Outcome criterion6() {
    double unitarity = 0.0, inverse_error = 0.0;
    Rng rng(6, 0);
    for (int trial = 0; trial < 50; ++trial) {
        for (const auto &info : kGateTable) {
            std::vector<double> params;
            for (std::size_t i = 0; i < info.num_params; ++i) params.push_back((rng.uniform() * 2 - 1) * 10.0);
            unitarity = std::max(unitarity, unitarity_error(gate_matrix(info.kind, params)));
        }
    }
    for (std::uint64_t s = 0; s < 500; ++s) {
        Rng r(61, s);
        const std::size_t n = 3 + r.below(6);
        const GateOp op = testing::random_gate(r, n);
        StateVector sv = simulate_flat(testing::random_circuit(r, n, 20));
        const StateVector before = sv;
        sv.apply(op);
        track_norm(sv);
        sv.apply(inverse(op));
        inverse_error = std::max(inverse_error, max_abs_diff(sv, before));
    }
    std::ostringstream d;
    d << "max norm drift " << g_worst_norm_error << ", max unitarity error " << unitarity
      << ", max G.G^-1 error " << inverse_error;
    return {g_worst_norm_error < 1e-10 && unitarity < 1e-12 && inverse_error < 1e-12, d.str()};
}

Outcome criterion7() {
    bool strides = true, tiling = true, counts = true;
    for (std::size_t n = 1; n <= 10; ++n) {
        for (Qubit i = 0; i < n; ++i) {
            std::vector<Amplitude> v(std::size_t{1} << n);
            for (std::size_t j = 0; j < v.size(); ++j) v[j] = static_cast<double>(j);
            apply_gate(std::span<Amplitude>(v), n, GateOp{GateKind::X, {i}, {}});
            std::set<std::pair<std::size_t, std::size_t>> pairs;
            for (std::size_t j = 0; j < v.size(); ++j) {
                const auto src = static_cast<std::size_t>(v[j].real());
                strides = strides && (src ^ j) == (std::size_t{1} << i);
                pairs.insert({std::min(j, src), std::max(j, src)});
            }
            strides = strides && pairs.size() == (std::size_t{1} << (n - 1));
        }
    }
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng(71, s);
        const std::size_t n = 2 + rng.below(9);
        std::vector<Qubit> q(n);
        for (std::size_t i = 0; i < n; ++i) q[i] = i;
        rng.shuffle(std::span<Qubit>(q));
        const QubitSlotMap map(std::vector<Qubit>(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(1 + rng.below(n))));
        std::vector<Amplitude> outer(std::size_t{1} << n);
        for (std::size_t j = 0; j < outer.size(); ++j) outer[j] = static_cast<double>(j);
        std::vector<int> hits(outer.size(), 0);
        for (std::size_t f = 0; f < (std::size_t{1} << (n - map.width())); ++f) {
            for (const auto &a : gather(outer, n, f, map)) ++hits[static_cast<std::size_t>(a.real())];
        }
        for (const int h : hits) tiling = tiling && h == 1;
    }
    for (std::size_t i = 0; i < 50; ++i) {
        const Circuit &c = corpus()[i];
        const PartitionResult p = partition_dagp(build_dag(c), std::max(min_limit(c), c.num_qubits / 2));
        ExecStats stats;
        track_norm(execute_hierarchical(c, p, &stats));
        std::uint64_t total = 0;
        for (const auto &t : stats.parts) {
            counts = counts && t.iterations == (std::uint64_t{1} << (c.num_qubits - t.width));
            total += t.iterations;
        }
        counts = counts && stats.parts.size() == p.parts.size() && stats.gathers == total;
    }
    std::ostringstream d;
    d << "stride pairs " << (strides ? "ok" : "wrong") << ", gather tiling " << (tiling ? "ok" : "wrong")
      << ", gathers per part " << (counts ? "ok" : "wrong");
    return {strides && tiling && counts, d.str()};
}

Outcome criterion8() {
    bool pass = true;
    for (std::size_t n = 1; n <= 16; ++n) {
        pass = pass && StateVector(n).footprint() == (std::uint64_t{1} << (n + 4));
        pass = pass && StateVector(n).size() * sizeof(Amplitude) == footprint_bytes(n);
    }
    const Circuit bv30 = testing::bundled("bv_30");
    const std::uint64_t bytes = footprint_bytes(bv30.num_qubits);
    pass = pass && bv30.num_qubits == 30 && bytes == 17179869184ull;
    std::ostringstream d;
    d << "n=" << bv30.num_qubits << " -> " << bytes << " bytes (" << (bytes >> 30) << " GiB)";
    return {pass, d.str()};
}

} // namespace
} // namespace hisim

int main() {
    using Clock = std::chrono::steady_clock;
    const std::vector<std::pair<const char *, std::function<hisim::Outcome()>>> criteria = {
        {"hierarchical equals flat", hisim::criterion1},
        {"distributed equals flat", hisim::criterion2},
        {"partition validity", hisim::criterion3},
        {"dagp optimality gap", hisim::criterion4},
        {"strategy ordering on qaoa", hisim::criterion5},
        {"numerical hygiene", hisim::criterion6},
        {"stride and tiling", hisim::criterion7},
        {"memory footprint", hisim::criterion8},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = Clock::now();
        hisim::Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        std::printf("%s criterion %zu (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first, o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
