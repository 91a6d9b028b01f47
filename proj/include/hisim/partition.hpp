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

/**
 * @file
 * Acyclic partitioning of the gate DAG under a working-set limit.
 *
 * A partition splits the gate nodes into parts so that every part touches at
 * most `limit` distinct qubits and the graph obtained by contracting each
 * part is acyclic; the objective is the number of parts. Entry nodes follow
 * the part of their first gate and Exit nodes the part of their last gate,
 * so they never add to a part's working set. A qubit no gate touches has its
 * Entry/Exit pair attached to part 0.
 *
 * Strategies:
 *  - nat:  cut the program order greedily whenever the next gate would push
 *          the running working set over the limit.
 *  - dfs:  the same cutoff over several randomized DFS topological orders,
 *          keeping the order with the fewest parts.
 *  - dagp: recursive bisection of the node set into acyclic halves until
 *          each piece fits, then greedy merging of parts over the part graph.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hisim/circuit.hpp"
#include "hisim/dag.hpp"
#include "hisim/error.hpp"
#include "hisim/random.hpp"

namespace hisim {

struct Part {
    std::size_t id{0};
    /// Op indices of the part's gates, ascending (program order).
    std::vector<std::size_t> gate_indices;
    /// Qubits the part executes on, ascending. Equal to the qubits its gates
    /// touch except for padded second-level parts.
    std::vector<Qubit> qubits;
    /// Distinct qubits touched by the part's gates.
    std::size_t working_set{0};

    friend bool operator==(const Part &, const Part &) = default;
};

struct PartitionResult {
    std::string strategy;
    std::size_t limit{0};
    /// Node id -> part id, covering every node of the DAG.
    std::vector<std::size_t> assignment;
    /// Parts in a topological order of the part graph.
    std::vector<Part> parts;

    [[nodiscard]] std::size_t num_parts() const noexcept { return parts.size(); }

    friend bool operator==(const PartitionResult &, const PartitionResult &) = default;
};

/// A first-level partition plus one partition per first-level part. Each
/// `level2[i]` is expressed in the coordinates of parent part i: its
/// gate_indices index into `level1.parts[i].gate_indices` and its qubits are
/// slots of the parent (positions in `level1.parts[i].qubits`).
struct MultiLevelPartition {
    PartitionResult level1;
    std::vector<PartitionResult> level2;
    std::size_t limit2{0};
};

namespace detail {

using QubitList = std::vector<Qubit>;

inline QubitList union_qubits(const QubitList &a, const QubitList &b) {
    QubitList out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline std::size_t intersection_size(const QubitList &a, const QubitList &b) {
    std::size_t count = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

inline QubitList qubits_of_ops(const GateDag &dag, std::span<const std::size_t> ops) {
    std::vector<char> seen(dag.num_qubits(), 0);
    for (const std::size_t i : ops) {
        for (const Qubit q : dag.op(i).qubits) {
            seen[q] = 1;
        }
    }
    QubitList out;
    for (Qubit q = 0; q < seen.size(); ++q) {
        if (seen[q]) {
            out.push_back(q);
        }
    }
    return out;
}

/// Gate-to-gate successor lists (by op index), deduplicated.
inline std::vector<std::vector<std::size_t>> gate_successors(const GateDag &dag) {
    std::vector<std::vector<std::size_t>> succ(dag.num_gates());
    for (const auto &e : dag.edges()) {
        if (dag.is_gate(e.src) && dag.is_gate(e.dst)) {
            succ[dag.op_index(e.src)].push_back(dag.op_index(e.dst));
        }
    }
    for (auto &s : succ) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return succ;
}

inline std::vector<std::vector<std::size_t>> gate_predecessors(const GateDag &dag) {
    std::vector<std::vector<std::size_t>> pred(dag.num_gates());
    for (const auto &e : dag.edges()) {
        if (dag.is_gate(e.src) && dag.is_gate(e.dst)) {
            pred[dag.op_index(e.dst)].push_back(dag.op_index(e.src));
        }
    }
    for (auto &p : pred) {
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
    }
    return pred;
}

inline void check_limit(const GateDag &dag, std::size_t limit) {
    std::size_t widest = 1;
    for (const auto &op : dag.ops()) {
        widest = std::max(widest, op.qubits.size());
    }
    if (limit < widest) {
        throw Error(ErrorKind::LimitTooSmall, "limit " + std::to_string(limit) +
                                                  " is below the widest gate (" +
                                                  std::to_string(widest) + " qubits)");
    }
}

} // namespace detail

/**
 * Builds a PartitionResult from an arbitrary part label per op. Labels are
 * renumbered in a topological order of the part graph (ties broken by the
 * smallest op index a part holds), Entry/Exit nodes are attached, and
 * per-part qubit sets are computed. Throws InvalidPartition when the labels
 * induce a cyclic part graph.
 */
inline PartitionResult make_partition(const GateDag &dag, std::span<const std::size_t> op_labels,
                                      std::string strategy, std::size_t limit) {
    const std::size_t m = dag.num_gates();
    if (op_labels.size() != m) {
        throw Error(ErrorKind::InvalidPartition, "one label per gate required");
    }
    PartitionResult result;
    result.strategy = std::move(strategy);
    result.limit = limit;
    result.assignment.assign(dag.num_nodes(), 0);
    if (m == 0) {
        return result;
    }

    // Compact labels in order of first appearance.
    std::map<std::size_t, std::size_t> dense;
    std::vector<std::size_t> label(m);
    for (std::size_t i = 0; i < m; ++i) {
        label[i] = dense.try_emplace(op_labels[i], dense.size()).first->second;
    }
    const std::size_t k = dense.size();

    std::vector<std::vector<std::size_t>> succ(k);
    std::vector<std::size_t> indeg(k, 0);
    std::vector<std::size_t> first_op(k, SIZE_MAX);
    for (std::size_t i = 0; i < m; ++i) {
        first_op[label[i]] = std::min(first_op[label[i]], i);
    }
    for (const auto &e : dag.edges()) {
        if (!dag.is_gate(e.src) || !dag.is_gate(e.dst)) {
            continue;
        }
        const std::size_t a = label[dag.op_index(e.src)];
        const std::size_t b = label[dag.op_index(e.dst)];
        if (a != b) {
            succ[a].push_back(b);
        }
    }
    for (auto &s : succ) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        for (const std::size_t v : s) {
            ++indeg[v];
        }
    }
    using Item = std::pair<std::size_t, std::size_t>; // (first op, label)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
    for (std::size_t p = 0; p < k; ++p) {
        if (indeg[p] == 0) {
            ready.emplace(first_op[p], p);
        }
    }
    std::vector<std::size_t> renumber(k, SIZE_MAX);
    std::size_t next = 0;
    while (!ready.empty()) {
        const std::size_t p = ready.top().second;
        ready.pop();
        renumber[p] = next++;
        for (const std::size_t v : succ[p]) {
            if (--indeg[v] == 0) {
                ready.emplace(first_op[v], v);
            }
        }
    }
    if (next != k) {
        throw Error(ErrorKind::InvalidPartition, "part graph has a cycle");
    }

    result.parts.resize(k);
    for (std::size_t p = 0; p < k; ++p) {
        result.parts[p].id = p;
    }
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t p = renumber[label[i]];
        result.parts[p].gate_indices.push_back(i);
        result.assignment[dag.gate_node(i)] = p;
    }
    for (auto &part : result.parts) {
        part.qubits = detail::qubits_of_ops(dag, part.gate_indices);
        part.working_set = part.qubits.size();
    }
    for (Qubit q = 0; q < dag.num_qubits(); ++q) {
        const NodeId entry = dag.entry_node(q);
        const NodeId first = dag.edges()[dag.out_edges(entry)[0]].dst;
        result.assignment[entry] = dag.is_gate(first) ? result.assignment[first] : 0;
        const NodeId exit = dag.exit_node(q);
        const NodeId last = dag.edges()[dag.in_edges(exit)[0]].src;
        result.assignment[exit] = dag.is_gate(last) ? result.assignment[last] : 0;
    }
    return result;
}

/// Distinct part-graph edges (from, to), sorted.
inline std::vector<std::pair<std::size_t, std::size_t>> part_edges(const GateDag &dag,
                                                                   const PartitionResult &result) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto &e : dag.edges()) {
        const std::size_t a = result.assignment.at(e.src);
        const std::size_t b = result.assignment.at(e.dst);
        if (a != b) {
            out.emplace_back(a, b);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Every violated PartitionResult invariant, as readable messages. Empty
/// means the partition is valid for `dag` under `limit`.
inline std::vector<std::string> partition_violations(const GateDag &dag,
                                                     const PartitionResult &result,
                                                     std::size_t limit) {
    std::vector<std::string> problems;
    if (result.assignment.size() != dag.num_nodes()) {
        problems.push_back("assignment size " + std::to_string(result.assignment.size()) +
                           " != node count " + std::to_string(dag.num_nodes()));
        return problems;
    }
    std::vector<std::size_t> owner(dag.num_gates(), SIZE_MAX);
    for (std::size_t p = 0; p < result.parts.size(); ++p) {
        const auto &part = result.parts[p];
        if (part.id != p) {
            problems.push_back("part at position " + std::to_string(p) + " has id " +
                               std::to_string(part.id));
        }
        if (part.gate_indices.empty()) {
            problems.push_back("part " + std::to_string(p) + " is empty");
        }
        if (!std::is_sorted(part.gate_indices.begin(), part.gate_indices.end())) {
            problems.push_back("part " + std::to_string(p) + " gates not in program order");
        }
        for (const std::size_t g : part.gate_indices) {
            if (g >= dag.num_gates()) {
                problems.push_back("part " + std::to_string(p) + " names unknown gate " +
                                   std::to_string(g));
                continue;
            }
            if (owner[g] != SIZE_MAX) {
                problems.push_back("gate " + std::to_string(g) + " in parts " +
                                   std::to_string(owner[g]) + " and " + std::to_string(p));
            }
            owner[g] = p;
            if (result.assignment[dag.gate_node(g)] != p) {
                problems.push_back("assignment of gate " + std::to_string(g) +
                                   " disagrees with part list");
            }
        }
        std::vector<NodeId> nodes;
        for (const std::size_t g : part.gate_indices) {
            if (g < dag.num_gates()) {
                nodes.push_back(dag.gate_node(g));
            }
        }
        const std::size_t ws = working_set(dag, nodes);
        if (ws > limit) {
            problems.push_back("part " + std::to_string(p) + " working set " +
                               std::to_string(ws) + " exceeds limit " + std::to_string(limit));
        }
        if (ws != part.working_set) {
            problems.push_back("part " + std::to_string(p) + " reports working set " +
                               std::to_string(part.working_set) + ", actual " +
                               std::to_string(ws));
        }
        const auto touched = detail::qubits_of_ops(dag, part.gate_indices);
        if (!std::includes(part.qubits.begin(), part.qubits.end(), touched.begin(),
                           touched.end())) {
            problems.push_back("part " + std::to_string(p) + " qubit list misses touched qubits");
        }
    }
    for (std::size_t g = 0; g < dag.num_gates(); ++g) {
        if (owner[g] == SIZE_MAX) {
            problems.push_back("gate " + std::to_string(g) + " is in no part");
        }
    }
    for (const std::size_t p : result.assignment) {
        if (p >= std::max<std::size_t>(result.parts.size(), 1)) {
            problems.push_back("assignment names unknown part " + std::to_string(p));
            break;
        }
    }
    if (!quotient_is_acyclic(dag, result.assignment)) {
        problems.emplace_back("part graph has a cycle");
    }
    for (const auto &[a, b] : part_edges(dag, result)) {
        if (a > b) {
            problems.push_back("part order is not topological: edge " + std::to_string(a) +
                               " -> " + std::to_string(b));
        }
    }
    return problems;
}

/// Greedy cutoff over a topological order of op indices.
inline std::vector<std::size_t> cutoff_labels(const GateDag &dag, std::span<const std::size_t> op_order,
                                              std::size_t limit) {
    std::vector<std::size_t> labels(dag.num_gates(), 0);
    std::vector<char> in_part(dag.num_qubits(), 0);
    std::vector<Qubit> current;
    std::size_t part = 0;
    for (const std::size_t i : op_order) {
        std::size_t fresh = 0;
        for (const Qubit q : dag.op(i).qubits) {
            fresh += in_part[q] ? 0 : 1;
        }
        if (current.size() + fresh > limit) {
            for (const Qubit q : current) {
                in_part[q] = 0;
            }
            current.clear();
            ++part;
        }
        for (const Qubit q : dag.op(i).qubits) {
            if (!in_part[q]) {
                in_part[q] = 1;
                current.push_back(q);
            }
        }
        labels[i] = part;
    }
    return labels;
}

inline PartitionResult partition_nat(const GateDag &dag, std::size_t limit) {
    detail::check_limit(dag, limit);
    std::vector<std::size_t> order(dag.num_gates());
    std::iota(order.begin(), order.end(), 0);
    return make_partition(dag, cutoff_labels(dag, order, limit), "nat", limit);
}

/// Gate op indices in the order they appear in dfs_topo_order(dag, seed, stream).
inline std::vector<std::size_t> dfs_gate_order(const GateDag &dag, std::uint64_t seed,
                                               std::uint64_t stream) {
    std::vector<std::size_t> order;
    order.reserve(dag.num_gates());
    for (const NodeId v : dfs_topo_order(dag, seed, stream)) {
        if (dag.is_gate(v)) {
            order.push_back(dag.op_index(v));
        }
    }
    return order;
}

/// Best of `trials` randomized DFS orders; trial t uses stream t of `seed`.
/// Ties keep the lowest trial index.
inline PartitionResult partition_dfs(const GateDag &dag, std::size_t limit, std::size_t trials,
                                     std::uint64_t seed) {
    detail::check_limit(dag, limit);
    if (trials == 0) {
        throw Error(ErrorKind::InvalidPartition, "dfs needs at least one trial");
    }
    std::vector<std::size_t> best;
    std::size_t best_parts = SIZE_MAX;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto order = dfs_gate_order(dag, seed, t);
        auto labels = cutoff_labels(dag, order, limit);
        const std::size_t parts = labels.empty() ? 0 : labels[order.back()] + 1;
        if (parts < best_parts) {
            best_parts = parts;
            best = std::move(labels);
        }
    }
    return make_partition(dag, best, "dfs", limit);
}

struct DagpOptions {
    /// Allowed node-count imbalance of a bisection: the larger half may hold
    /// at most imbalance * |S| / 2 nodes.
    double imbalance = 1.5;
    /// Randomized DFS orders tried per bisection in addition to program order.
    std::size_t extra_orders = 4;
    /// Independent runs with different order seeds; the run with the fewest
    /// parts wins, ties going to the earliest run.
    std::size_t restarts = 8;
    std::uint64_t seed = 0x5eed;
};

namespace detail {

class DagpPartitioner {
  public:
    DagpPartitioner(const GateDag &dag, std::size_t limit, const DagpOptions &options)
        : dag_(dag), limit_(limit), options_(options), succ_(gate_successors(dag)),
          pred_(gate_predecessors(dag)) {
        orders_.emplace_back(dag.num_gates());
        std::iota(orders_[0].begin(), orders_[0].end(), 0);
        for (std::size_t t = 0; t < options.extra_orders; ++t) {
            orders_.push_back(dfs_gate_order(dag, options.seed, t));
        }
        rank_.resize(orders_.size(), std::vector<std::size_t>(dag.num_gates()));
        for (std::size_t o = 0; o < orders_.size(); ++o) {
            for (std::size_t i = 0; i < orders_[o].size(); ++i) {
                rank_[o][orders_[o][i]] = i;
            }
        }
    }

    std::vector<std::size_t> run() {
        std::vector<std::size_t> all(dag_.num_gates());
        std::iota(all.begin(), all.end(), 0);
        std::vector<std::vector<std::size_t>> leaves;
        if (!all.empty()) {
            bisect(std::move(all), leaves);
        }
        std::vector<std::size_t> label = merge(leaves);
        while (refine_parts(label)) {
            label = merge(groups_of(label));
        }
        return label;
    }

    /// Recursive bisection only, before merging. Exposed for tests.
    std::vector<std::vector<std::size_t>> leaves() {
        std::vector<std::size_t> all(dag_.num_gates());
        std::iota(all.begin(), all.end(), 0);
        std::vector<std::vector<std::size_t>> out;
        if (!all.empty()) {
            bisect(std::move(all), out);
        }
        return out;
    }

    std::vector<std::size_t> merge(const std::vector<std::vector<std::size_t>> &leaves) const;

    /// Local search on a finished partition: moves single gates into a
    /// neighbouring part that is at least as large, keeping the limit and an
    /// acyclic part graph. Returns true if some part became empty (labels
    /// are then compacted).
    bool refine_parts(std::vector<std::size_t> &label) const;

  private:
    static std::vector<std::vector<std::size_t>> groups_of(const std::vector<std::size_t> &label) {
        std::vector<std::vector<std::size_t>> groups;
        for (std::size_t g = 0; g < label.size(); ++g) {
            if (label[g] >= groups.size()) {
                groups.resize(label[g] + 1);
            }
            groups[label[g]].push_back(g);
        }
        std::erase_if(groups, [](const auto &v) { return v.empty(); });
        return groups;
    }

    bool labels_acyclic(const std::vector<std::size_t> &label, std::size_t k) const {
        std::vector<std::vector<std::size_t>> succ(k);
        for (std::size_t g = 0; g < label.size(); ++g) {
            for (const std::size_t v : succ_[g]) {
                if (label[g] != label[v]) {
                    succ[label[g]].push_back(label[v]);
                }
            }
        }
        return is_acyclic(succ);
    }

    struct Split {
        std::vector<std::size_t> first;
        std::vector<std::size_t> second;
    };

    struct Score {
        std::size_t oversized{0}; // halves that still exceed the limit
        std::size_t cut{0};       // qubits used on both sides
        std::size_t widest{0};    // larger of the two working sets
        friend auto operator<=>(const Score &, const Score &) = default;
    };

    void bisect(std::vector<std::size_t> nodes, std::vector<std::vector<std::size_t>> &leaves) {
        if (qubits_of_ops(dag_, nodes).size() <= limit_ || nodes.size() == 1) {
            leaves.push_back(std::move(nodes));
            return;
        }
        Split split = best_split(nodes);
        refine(split);
        std::sort(split.first.begin(), split.first.end());
        std::sort(split.second.begin(), split.second.end());
        bisect(std::move(split.first), leaves);
        bisect(std::move(split.second), leaves);
    }

    Score score(const std::vector<std::size_t> &count_a,
                const std::vector<std::size_t> &count_b) const {
        Score s;
        std::size_t ws_a = 0, ws_b = 0;
        for (Qubit q = 0; q < count_a.size(); ++q) {
            ws_a += count_a[q] ? 1 : 0;
            ws_b += count_b[q] ? 1 : 0;
            s.cut += (count_a[q] && count_b[q]) ? 1 : 0;
        }
        s.oversized = (ws_a > limit_ ? 1 : 0) + (ws_b > limit_ ? 1 : 0);
        s.widest = std::max(ws_a, ws_b);
        return s;
    }

    std::pair<std::size_t, std::size_t> balance_window(std::size_t size) const {
        const auto max_side = static_cast<std::size_t>(options_.imbalance * static_cast<double>(size) / 2.0);
        const std::size_t hi = std::min(size - 1, std::max<std::size_t>(max_side, 1));
        const std::size_t lo = size - hi;
        return {std::max<std::size_t>(lo, 1), std::max(hi, std::max<std::size_t>(lo, 1))};
    }

    /// Best prefix split of `nodes` over every candidate topological order.
    Split best_split(const std::vector<std::size_t> &nodes) {
        const auto [lo, hi] = balance_window(nodes.size());
        Score best_score{SIZE_MAX, SIZE_MAX, SIZE_MAX};
        std::size_t best_order = 0, best_k = lo;
        std::vector<std::size_t> seq(nodes);
        for (std::size_t o = 0; o < orders_.size(); ++o) {
            const auto &rank = rank_[o];
            std::sort(seq.begin(), seq.end(),
                      [&rank](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
            std::vector<std::size_t> count_a(dag_.num_qubits(), 0), count_b(dag_.num_qubits(), 0);
            for (const std::size_t g : seq) {
                for (const Qubit q : dag_.op(g).qubits) {
                    ++count_b[q];
                }
            }
            for (std::size_t k = 1; k < seq.size(); ++k) {
                for (const Qubit q : dag_.op(seq[k - 1]).qubits) {
                    ++count_a[q];
                    --count_b[q];
                }
                if (k < lo || k > hi) {
                    continue;
                }
                const Score s = score(count_a, count_b);
                if (s < best_score) {
                    best_score = s;
                    best_order = o;
                    best_k = k;
                }
            }
        }
        const auto &rank = rank_[best_order];
        std::sort(seq.begin(), seq.end(),
                  [&rank](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
        return {{seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(best_k)},
                {seq.begin() + static_cast<std::ptrdiff_t>(best_k), seq.end()}};
    }

    /// Moves single boundary nodes across the cut while that strictly
    /// improves the split score and keeps both sides within the balance
    /// window. Only sinks of the first half and sources of the second half
    /// may move, so every edge still points from first to second.
    void refine(Split &split) const {
        const std::size_t total = split.first.size() + split.second.size();
        const auto [lo, hi] = balance_window(total);
        std::vector<char> side(dag_.num_gates(), 2); // 0 first, 1 second, 2 outside
        std::vector<std::size_t> count_a(dag_.num_qubits(), 0), count_b(dag_.num_qubits(), 0);
        for (const std::size_t g : split.first) {
            side[g] = 0;
            for (const Qubit q : dag_.op(g).qubits) ++count_a[q];
        }
        for (const std::size_t g : split.second) {
            side[g] = 1;
            for (const Qubit q : dag_.op(g).qubits) ++count_b[q];
        }
        auto move = [&](std::size_t g, int to) {
            for (const Qubit q : dag_.op(g).qubits) {
                if (to == 1) {
                    --count_a[q];
                    ++count_b[q];
                } else {
                    ++count_a[q];
                    --count_b[q];
                }
            }
            side[g] = static_cast<char>(to);
        };
        Score current = score(count_a, count_b);
        std::size_t size_a = split.first.size();
        for (std::size_t pass = 0; pass < total; ++pass) {
            bool improved = false;
            for (std::size_t g = 0; g < dag_.num_gates(); ++g) {
                if (side[g] == 0 && size_a - 1 >= lo) {
                    const bool sink = std::none_of(succ_[g].begin(), succ_[g].end(),
                                                   [&side](std::size_t v) { return side[v] == 0; });
                    if (!sink) continue;
                    move(g, 1);
                    const Score s = score(count_a, count_b);
                    if (s < current) {
                        current = s;
                        --size_a;
                        improved = true;
                    } else {
                        move(g, 0);
                    }
                } else if (side[g] == 1 && size_a + 1 <= hi) {
                    const bool source = std::none_of(pred_[g].begin(), pred_[g].end(),
                                                     [&side](std::size_t v) { return side[v] == 1; });
                    if (!source) continue;
                    move(g, 0);
                    const Score s = score(count_a, count_b);
                    if (s < current) {
                        current = s;
                        ++size_a;
                        improved = true;
                    } else {
                        move(g, 1);
                    }
                }
            }
            if (!improved) {
                break;
            }
        }
        split.first.clear();
        split.second.clear();
        for (std::size_t g = 0; g < dag_.num_gates(); ++g) {
            if (side[g] == 0) split.first.push_back(g);
            if (side[g] == 1) split.second.push_back(g);
        }
    }

    const GateDag &dag_;
    std::size_t limit_;
    DagpOptions options_;
    std::vector<std::vector<std::size_t>> succ_;
    std::vector<std::vector<std::size_t>> pred_;
    std::vector<std::vector<std::size_t>> orders_;
    std::vector<std::vector<std::size_t>> rank_;
};

/// Greedy merge over the part graph. A pair of parts may merge when the
/// union fits the limit and no path of length >= 2 connects them in either
/// direction (so contraction cannot close a cycle). Candidates are ranked
/// by shared qubits (descending), then adjacency, then lowest ids; the best
/// one is contracted and the candidates recomputed, until none is left.
inline std::vector<std::size_t>
DagpPartitioner::merge(const std::vector<std::vector<std::size_t>> &leaves) const {
    struct Group {
        std::vector<std::size_t> ops;
        QubitList qubits;
    };
    std::vector<Group> groups;
    std::vector<std::size_t> label(dag_.num_gates(), 0);
    for (const auto &leaf : leaves) {
        for (const std::size_t g : leaf) {
            label[g] = groups.size();
        }
        groups.push_back({leaf, qubits_of_ops(dag_, leaf)});
    }

    while (groups.size() > 1) {
        const std::size_t k = groups.size();
        const std::size_t words = (k + 63) / 64;
        std::vector<std::vector<std::size_t>> succ(k);
        for (std::size_t g = 0; g < dag_.num_gates(); ++g) {
            for (const std::size_t v : succ_[g]) {
                if (label[g] != label[v]) {
                    succ[label[g]].push_back(label[v]);
                }
            }
        }
        for (auto &s : succ) {
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
        }
        // Reachability (excluding self) in reverse topological order.
        std::vector<std::size_t> indeg(k, 0), topo;
        for (const auto &s : succ) for (const std::size_t v : s) ++indeg[v];
        for (std::size_t p = 0; p < k; ++p) if (indeg[p] == 0) topo.push_back(p);
        for (std::size_t i = 0; i < topo.size(); ++i) {
            for (const std::size_t v : succ[topo[i]]) {
                if (--indeg[v] == 0) topo.push_back(v);
            }
        }
        std::vector<std::vector<std::uint64_t>> reach(k, std::vector<std::uint64_t>(words, 0));
        for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
            for (const std::size_t v : succ[*it]) {
                reach[*it][v / 64] |= std::uint64_t{1} << (v % 64);
                for (std::size_t w = 0; w < words; ++w) reach[*it][w] |= reach[v][w];
            }
        }
        auto reaches = [&reach](std::size_t a, std::size_t b) {
            return (reach[a][b / 64] >> (b % 64)) & 1U;
        };
        // Path a ~> b through some third part.
        auto long_path = [&](std::size_t a, std::size_t b) {
            return std::any_of(succ[a].begin(), succ[a].end(),
                               [&](std::size_t c) { return c != b && reaches(c, b); });
        };

        bool found = false;
        std::size_t best_a = 0, best_b = 0, best_shared = 0;
        bool best_adjacent = false;
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = a + 1; b < k; ++b) {
                const std::size_t shared = intersection_size(groups[a].qubits, groups[b].qubits);
                const std::size_t merged = groups[a].qubits.size() + groups[b].qubits.size() - shared;
                if (merged > limit_) continue;
                const bool ab = reaches(a, b), ba = reaches(b, a);
                if ((ab && long_path(a, b)) || (ba && long_path(b, a))) continue;
                const bool adjacent =
                    std::binary_search(succ[a].begin(), succ[a].end(), b) ||
                    std::binary_search(succ[b].begin(), succ[b].end(), a);
                const bool better = !found || shared > best_shared ||
                                    (shared == best_shared && adjacent && !best_adjacent);
                if (better) {
                    found = true;
                    best_a = a;
                    best_b = b;
                    best_shared = shared;
                    best_adjacent = adjacent;
                }
            }
        }
        if (!found) {
            break;
        }
        auto &into = groups[best_a];
        auto &from = groups[best_b];
        into.ops.insert(into.ops.end(), from.ops.begin(), from.ops.end());
        std::sort(into.ops.begin(), into.ops.end());
        into.qubits = union_qubits(into.qubits, from.qubits);
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(best_b));
        for (std::size_t p = 0; p < groups.size(); ++p) {
            for (const std::size_t g : groups[p].ops) {
                label[g] = p;
            }
        }
    }
    return label;
}

inline bool DagpPartitioner::refine_parts(std::vector<std::size_t> &label) const {
    const std::size_t m = dag_.num_gates();
    if (m == 0) {
        return false;
    }
    const std::size_t k = *std::max_element(label.begin(), label.end()) + 1;
    const std::size_t n = dag_.num_qubits();
    std::vector<std::size_t> size(k, 0);
    std::vector<std::vector<std::size_t>> uses(k, std::vector<std::size_t>(n, 0));
    std::vector<std::size_t> width(k, 0);
    for (std::size_t g = 0; g < m; ++g) {
        ++size[label[g]];
        for (const Qubit q : dag_.op(g).qubits) {
            width[label[g]] += uses[label[g]][q]++ == 0 ? 1 : 0;
        }
    }
    bool emptied = false;
    for (std::size_t sweep = 0; sweep < 4 * k + 4; ++sweep) {
        bool moved = false;
        for (std::size_t g = 0; g < m; ++g) {
            const std::size_t from = label[g];
            std::vector<std::size_t> targets;
            for (const std::size_t v : succ_[g]) targets.push_back(label[v]);
            for (const std::size_t v : pred_[g]) targets.push_back(label[v]);
            std::sort(targets.begin(), targets.end());
            targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
            for (const std::size_t to : targets) {
                if (to == from || size[to] < size[from]) {
                    continue;
                }
                std::size_t grown = width[to];
                for (const Qubit q : dag_.op(g).qubits) {
                    grown += uses[to][q] == 0 ? 1 : 0;
                }
                if (grown > limit_) {
                    continue;
                }
                label[g] = to;
                if (!labels_acyclic(label, k)) {
                    label[g] = from;
                    continue;
                }
                for (const Qubit q : dag_.op(g).qubits) {
                    width[from] -= --uses[from][q] == 0 ? 1 : 0;
                    width[to] += uses[to][q]++ == 0 ? 1 : 0;
                }
                --size[from];
                ++size[to];
                emptied = emptied || size[from] == 0;
                moved = true;
                break;
            }
        }
        if (!moved) {
            break;
        }
    }
    if (!emptied) {
        return false;
    }
    std::vector<std::size_t> dense(k, SIZE_MAX);
    std::size_t next = 0;
    for (std::size_t &l : label) {
        if (dense[l] == SIZE_MAX) {
            dense[l] = next++;
        }
        l = dense[l];
    }
    return true;
}

} // namespace detail

inline PartitionResult partition_dagp(const GateDag &dag, std::size_t limit,
                                      const DagpOptions &options = {}) {
    detail::check_limit(dag, limit);
    std::vector<std::size_t> best;
    std::size_t best_parts = SIZE_MAX;
    for (std::size_t r = 0; r < std::max<std::size_t>(options.restarts, 1); ++r) {
        DagpOptions run = options;
        run.seed = r == 0 ? options.seed : splitmix64(options.seed + r);
        auto label = detail::DagpPartitioner(dag, limit, run).run();
        const std::size_t parts =
            label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
        if (parts < best_parts) {
            best_parts = parts;
            best = std::move(label);
        }
    }
    return make_partition(dag, best, "dagp", limit);
}

/// Sub-circuit made of one part's gates, with the part's qubits renumbered
/// to their positions in `part.qubits` (ascending order -> slots 0..w-1).
inline Circuit part_subcircuit(const GateDag &dag, const Part &part) {
    Circuit sub;
    sub.num_qubits = part.qubits.size();
    for (const std::size_t g : part.gate_indices) {
        GateOp op = dag.op(g);
        for (Qubit &q : op.qubits) {
            const auto it = std::lower_bound(part.qubits.begin(), part.qubits.end(), q);
            if (it == part.qubits.end() || *it != q) {
                throw Error(ErrorKind::QubitNotInPart, std::to_string(q));
            }
            q = static_cast<Qubit>(it - part.qubits.begin());
        }
        sub.ops.push_back(std::move(op));
    }
    return sub;
}

/// Second-level parts are padded with the lowest-numbered parent slots they
/// do not already use, up to min(limit2, parent width) qubits.
inline MultiLevelPartition partition_multilevel(const GateDag &dag, std::size_t limit1,
                                                std::size_t limit2,
                                                const DagpOptions &options = {}) {
    detail::check_limit(dag, limit2);
    if (limit2 > limit1) {
        throw Error(ErrorKind::LimitTooSmall, "first-level limit " + std::to_string(limit1) +
                                                  " is below second-level limit " +
                                                  std::to_string(limit2));
    }
    MultiLevelPartition ml;
    ml.level1 = partition_dagp(dag, limit1, options);
    ml.level1.strategy = "multilevel";
    ml.limit2 = limit2;
    for (const auto &parent : ml.level1.parts) {
        const GateDag sub = build_dag(part_subcircuit(dag, parent));
        PartitionResult inner = partition_dagp(sub, limit2, options);
        const std::size_t target = std::min(limit2, parent.qubits.size());
        for (auto &child : inner.parts) {
            for (Qubit slot = 0; child.qubits.size() < target; ++slot) {
                if (!std::binary_search(child.qubits.begin(), child.qubits.end(), slot)) {
                    child.qubits.insert(
                        std::lower_bound(child.qubits.begin(), child.qubits.end(), slot), slot);
                }
            }
        }
        ml.level2.push_back(std::move(inner));
    }
    return ml;
}

/// True when `order` (op indices) is a permutation of the circuit's ops that
/// keeps the program order of the ops on every qubit.
inline bool is_valid_execution_order(const Circuit &circuit, std::span<const std::size_t> order) {
    if (order.size() != circuit.ops.size()) {
        return false;
    }
    std::vector<char> seen(order.size(), 0);
    std::vector<std::size_t> last(circuit.num_qubits, SIZE_MAX);
    for (const std::size_t i : order) {
        if (i >= order.size() || seen[i]) {
            return false;
        }
        seen[i] = 1;
        for (const Qubit q : circuit.ops[i].qubits) {
            if (last[q] != SIZE_MAX && last[q] > i) {
                return false;
            }
            last[q] = i;
        }
    }
    return true;
}

/// Op indices in execution order: level-1 parts in order, and within each,
/// level-2 parts in order.
inline std::vector<std::size_t> flattened_order(const MultiLevelPartition &ml) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ml.level1.parts.size(); ++i) {
        const auto &parent = ml.level1.parts[i];
        for (const auto &child : ml.level2.at(i).parts) {
            for (const std::size_t local : child.gate_indices) {
                out.push_back(parent.gate_indices.at(local));
            }
        }
    }
    return out;
}

inline std::vector<std::string> multilevel_violations(const GateDag &dag,
                                                      const MultiLevelPartition &ml,
                                                      std::size_t limit1) {
    auto problems = partition_violations(dag, ml.level1, limit1);
    if (ml.level2.size() != ml.level1.parts.size()) {
        problems.emplace_back("one second-level partition per first-level part required");
        return problems;
    }
    for (std::size_t i = 0; i < ml.level2.size(); ++i) {
        const auto &parent = ml.level1.parts[i];
        const GateDag sub = build_dag(part_subcircuit(dag, parent));
        for (auto &p : partition_violations(sub, ml.level2[i], ml.limit2)) {
            problems.push_back("level-2 of part " + std::to_string(i) + ": " + p);
        }
        for (const auto &child : ml.level2[i].parts) {
            if (!child.qubits.empty() && child.qubits.back() >= parent.qubits.size()) {
                problems.push_back("level-2 part of " + std::to_string(i) +
                                   " uses a slot outside its parent");
            }
        }
    }
    Circuit circuit{dag.num_qubits(), dag.ops()};
    if (!is_valid_execution_order(circuit, flattened_order(ml))) {
        problems.emplace_back("flattened execution order breaks a dependency");
    }
    return problems;
}

/**
 * Partition file format:
 *   {"strategy": "nat"|"dfs"|"dagp"|"multilevel", "limit": L,
 *    "num_qubits": n, "num_gates": m,
 *    "parts": [{"id", "gate_indices": [...], "qubits": [...], "working_set"}],
 *    "edges": [[from, to], ...]}
 * A multilevel file adds "limit2" and "children": one partition object per
 * part, in that part's local coordinates.
 */
inline nlohmann::json partition_to_json(const GateDag &dag, const PartitionResult &result) {
    nlohmann::json parts = nlohmann::json::array();
    for (const auto &part : result.parts) {
        parts.push_back({{"id", part.id},
                         {"gate_indices", part.gate_indices},
                         {"qubits", part.qubits},
                         {"working_set", part.working_set}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto &[a, b] : part_edges(dag, result)) {
        edges.push_back({a, b});
    }
    return {{"strategy", result.strategy},
            {"limit", result.limit},
            {"num_qubits", dag.num_qubits()},
            {"num_gates", dag.num_gates()},
            {"parts", std::move(parts)},
            {"edges", std::move(edges)}};
}

inline nlohmann::json multilevel_to_json(const GateDag &dag, const MultiLevelPartition &ml) {
    nlohmann::json j = partition_to_json(dag, ml.level1);
    j["limit2"] = ml.limit2;
    nlohmann::json children = nlohmann::json::array();
    for (std::size_t i = 0; i < ml.level2.size(); ++i) {
        const GateDag sub = build_dag(part_subcircuit(dag, ml.level1.parts[i]));
        children.push_back(partition_to_json(sub, ml.level2[i]));
    }
    j["children"] = std::move(children);
    return j;
}

/// Reads a partition for `dag`, keeping part order and qubit lists as
/// stored, and rejects it when any invariant fails under its own limit.
inline PartitionResult partition_from_json(const GateDag &dag, const nlohmann::json &j) {
    PartitionResult result;
    try {
        result.strategy = j.at("strategy").get<std::string>();
        result.limit = j.at("limit").get<std::size_t>();
        if (j.contains("num_gates") && j.at("num_gates").get<std::size_t>() != dag.num_gates()) {
            throw Error(ErrorKind::InvalidPartition, "partition is for a different circuit");
        }
        for (const auto &pj : j.at("parts")) {
            Part part;
            part.id = pj.at("id").get<std::size_t>();
            part.gate_indices = pj.at("gate_indices").get<std::vector<std::size_t>>();
            part.qubits = pj.at("qubits").get<std::vector<Qubit>>();
            result.parts.push_back(std::move(part));
        }
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorKind::InvalidPartition, e.what());
    }
    result.assignment.assign(dag.num_nodes(), 0);
    for (std::size_t p = 0; p < result.parts.size(); ++p) {
        auto &part = result.parts[p];
        for (const std::size_t g : part.gate_indices) {
            if (g >= dag.num_gates()) {
                throw Error(ErrorKind::InvalidPartition, "unknown gate " + std::to_string(g));
            }
            result.assignment[dag.gate_node(g)] = p;
        }
        part.working_set = detail::qubits_of_ops(dag, part.gate_indices).size();
    }
    for (Qubit q = 0; q < dag.num_qubits(); ++q) {
        const NodeId entry = dag.entry_node(q);
        const NodeId first = dag.edges()[dag.out_edges(entry)[0]].dst;
        result.assignment[entry] = dag.is_gate(first) ? result.assignment[first] : 0;
        const NodeId exit = dag.exit_node(q);
        const NodeId last = dag.edges()[dag.in_edges(exit)[0]].src;
        result.assignment[exit] = dag.is_gate(last) ? result.assignment[last] : 0;
    }
    const auto problems = partition_violations(dag, result, result.limit);
    if (!problems.empty()) {
        throw Error(ErrorKind::InvalidPartition, problems.front());
    }
    return result;
}

inline MultiLevelPartition multilevel_from_json(const GateDag &dag, const nlohmann::json &j) {
    MultiLevelPartition ml;
    ml.level1 = partition_from_json(dag, j);
    try {
        ml.limit2 = j.at("limit2").get<std::size_t>();
        const auto &children = j.at("children");
        if (children.size() != ml.level1.parts.size()) {
            throw Error(ErrorKind::InvalidPartition, "one child partition per part required");
        }
        for (std::size_t i = 0; i < children.size(); ++i) {
            const GateDag sub = build_dag(part_subcircuit(dag, ml.level1.parts[i]));
            ml.level2.push_back(partition_from_json(sub, children[i]));
        }
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorKind::InvalidPartition, e.what());
    }
    return ml;
}

} // namespace hisim
