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
 * Gate dependency DAG.
 *
 * Every qubit gets an artificial Entry node (no predecessors) and Exit node
 * (no successors); every gate is a node whose in-edges and out-edges carry
 * exactly the qubits it acts on, one edge per qubit. Following the edges
 * labelled q from Entry(q) visits the gates on q in program order and ends
 * at Exit(q).
 *
 * Node ids are dense: [0, n) are entries, [n, n + m) the m gates in program
 * order, [n + m, 2n + m) the exits.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hisim/circuit.hpp"
#include "hisim/error.hpp"
#include "hisim/random.hpp"

namespace hisim {

using NodeId = std::size_t;

enum class NodeKind { Entry, Gate, Exit };

struct DagNode {
    NodeId id{0};
    NodeKind kind{NodeKind::Gate};
    /// Qubit for Entry/Exit, op index for Gate.
    std::size_t index{0};
};

struct DagEdge {
    NodeId src{0};
    NodeId dst{0};
    Qubit qubit{0};
};

class GateDag {
  public:
    GateDag() = default;

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t num_gates() const noexcept { return ops_.size(); }
    [[nodiscard]] std::size_t num_nodes() const noexcept { return nodes_.size(); }

    [[nodiscard]] const std::vector<DagNode> &nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<DagEdge> &edges() const noexcept { return edges_; }
    [[nodiscard]] const DagNode &node(NodeId id) const { return nodes_.at(id); }

    /// Edge indices into edges().
    [[nodiscard]] std::span<const std::size_t> in_edges(NodeId id) const { return in_[id]; }
    [[nodiscard]] std::span<const std::size_t> out_edges(NodeId id) const { return out_[id]; }

    [[nodiscard]] NodeId entry_node(Qubit q) const { return q; }
    [[nodiscard]] NodeId gate_node(std::size_t op) const { return num_qubits_ + op; }
    [[nodiscard]] NodeId exit_node(Qubit q) const { return num_qubits_ + ops_.size() + q; }

    [[nodiscard]] bool is_gate(NodeId id) const {
        return id >= num_qubits_ && id < num_qubits_ + ops_.size();
    }
    [[nodiscard]] std::size_t op_index(NodeId id) const { return id - num_qubits_; }

    /// Qubits a node touches: the op's qubits, or the single entry/exit qubit.
    [[nodiscard]] std::span<const Qubit> node_qubits(NodeId id) const {
        if (is_gate(id)) {
            return ops_[op_index(id)].qubits;
        }
        return {&qubit_of_[id], 1};
    }

    [[nodiscard]] const GateOp &op(std::size_t index) const { return ops_.at(index); }
    [[nodiscard]] const std::vector<GateOp> &ops() const noexcept { return ops_; }

    friend GateDag build_dag(const Circuit &circuit);

  private:
    std::size_t num_qubits_{0};
    std::vector<GateOp> ops_;
    std::vector<DagNode> nodes_;
    std::vector<DagEdge> edges_;
    std::vector<std::vector<std::size_t>> in_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<Qubit> qubit_of_;
};

namespace detail {

/// Kahn's algorithm over an adjacency list; true when every node is emitted.
inline bool is_acyclic(const std::vector<std::vector<std::size_t>> &succ) {
    std::vector<std::size_t> indeg(succ.size(), 0);
    for (const auto &s : succ) {
        for (const std::size_t v : s) {
            ++indeg[v];
        }
    }
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < succ.size(); ++v) {
        if (indeg[v] == 0) {
            ready.push_back(v);
        }
    }
    std::size_t seen = 0;
    while (!ready.empty()) {
        const std::size_t u = ready.back();
        ready.pop_back();
        ++seen;
        for (const std::size_t v : succ[u]) {
            if (--indeg[v] == 0) {
                ready.push_back(v);
            }
        }
    }
    return seen == succ.size();
}

} // namespace detail

inline GateDag build_dag(const Circuit &circuit) {
    validate(circuit);
    const std::size_t n = circuit.num_qubits;
    const std::size_t m = circuit.ops.size();
    GateDag dag;
    dag.num_qubits_ = n;
    dag.ops_ = circuit.ops;
    dag.nodes_.reserve(2 * n + m);
    dag.qubit_of_.assign(2 * n + m, 0);
    for (Qubit q = 0; q < n; ++q) {
        dag.nodes_.push_back({q, NodeKind::Entry, q});
        dag.qubit_of_[q] = q;
    }
    for (std::size_t i = 0; i < m; ++i) {
        dag.nodes_.push_back({n + i, NodeKind::Gate, i});
    }
    for (Qubit q = 0; q < n; ++q) {
        dag.nodes_.push_back({n + m + q, NodeKind::Exit, q});
        dag.qubit_of_[n + m + q] = q;
    }
    dag.in_.assign(dag.nodes_.size(), {});
    dag.out_.assign(dag.nodes_.size(), {});

    auto add_edge = [&dag](NodeId src, NodeId dst, Qubit q) {
        dag.out_[src].push_back(dag.edges_.size());
        dag.in_[dst].push_back(dag.edges_.size());
        dag.edges_.push_back({src, dst, q});
    };

    std::vector<NodeId> last(n);
    for (Qubit q = 0; q < n; ++q) {
        last[q] = q;
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (const Qubit q : circuit.ops[i].qubits) {
            add_edge(last[q], n + i, q);
            last[q] = n + i;
        }
    }
    for (Qubit q = 0; q < n; ++q) {
        add_edge(last[q], n + m + q, q);
    }

    std::vector<std::vector<std::size_t>> succ(dag.nodes_.size());
    for (const auto &e : dag.edges_) {
        succ[e.src].push_back(e.dst);
    }
    if (!detail::is_acyclic(succ)) {
        throw Error(ErrorKind::InvalidPartition, "gate graph has a cycle");
    }
    return dag;
}

/// Number of qubits a node set needs resident: the distinct qubits entering
/// the set from outside together with the qubits of Entry nodes inside it.
/// For a set of gates this is the number of distinct qubits they touch.
inline std::size_t working_set(const GateDag &dag, std::span<const NodeId> node_set) {
    std::vector<char> member(dag.num_nodes(), 0);
    for (const NodeId id : node_set) {
        if (id >= dag.num_nodes()) {
            throw Error(ErrorKind::UnknownNode, std::to_string(id));
        }
        member[id] = 1;
    }
    std::vector<char> needed(dag.num_qubits(), 0);
    for (const NodeId id : node_set) {
        if (dag.node(id).kind == NodeKind::Entry) {
            needed[dag.node(id).index] = 1;
        }
        for (const std::size_t e : dag.in_edges(id)) {
            const auto &edge = dag.edges()[e];
            if (!member[edge.src]) {
                needed[edge.qubit] = 1;
            }
        }
    }
    return static_cast<std::size_t>(std::count(needed.begin(), needed.end(), 1));
}

/// Contracts every part to one node and checks the result for directed
/// cycles; edges inside a part are ignored. `assignment` maps node id to
/// part id and must cover every node.
inline bool quotient_is_acyclic(const GateDag &dag, std::span<const std::size_t> assignment) {
    if (assignment.size() != dag.num_nodes()) {
        throw Error(ErrorKind::InvalidPartition, "assignment does not cover every node");
    }
    std::size_t num_parts = 0;
    for (const std::size_t p : assignment) {
        num_parts = std::max(num_parts, p + 1);
    }
    std::vector<std::vector<std::size_t>> succ(num_parts);
    for (const auto &e : dag.edges()) {
        const std::size_t a = assignment[e.src];
        const std::size_t b = assignment[e.dst];
        if (a != b) {
            succ[a].push_back(b);
        }
    }
    for (auto &s : succ) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return detail::is_acyclic(succ);
}

/// Randomized depth-first topological order of all nodes. Nodes become ready
/// once all predecessors are emitted; ready nodes go on a stack so the walk
/// follows one dependency chain as deep as it can before backtracking. Source
/// order and each node's successor order are shuffled by Rng(seed, stream).
inline std::vector<NodeId> dfs_topo_order(const GateDag &dag, std::uint64_t seed,
                                          std::uint64_t stream = 0) {
    Rng rng(seed, stream);
    std::vector<std::size_t> indeg(dag.num_nodes(), 0);
    for (const auto &e : dag.edges()) {
        ++indeg[e.dst];
    }
    std::vector<NodeId> stack;
    for (NodeId v = 0; v < dag.num_nodes(); ++v) {
        if (indeg[v] == 0) {
            stack.push_back(v);
        }
    }
    rng.shuffle(std::span<NodeId>(stack));

    std::vector<NodeId> order;
    order.reserve(dag.num_nodes());
    std::vector<NodeId> children;
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        order.push_back(u);
        children.clear();
        for (const std::size_t e : dag.out_edges(u)) {
            const NodeId v = dag.edges()[e].dst;
            if (--indeg[v] == 0) {
                children.push_back(v);
            }
        }
        rng.shuffle(std::span<NodeId>(children));
        stack.insert(stack.end(), children.begin(), children.end());
    }
    return order;
}

/// True when `order` lists every node exactly once and every edge points
/// forward in it.
inline bool is_topological_order(const GateDag &dag, std::span<const NodeId> order) {
    if (order.size() != dag.num_nodes()) {
        return false;
    }
    std::vector<std::size_t> pos(dag.num_nodes(), SIZE_MAX);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i] >= dag.num_nodes() || pos[order[i]] != SIZE_MAX) {
            return false;
        }
        pos[order[i]] = i;
    }
    return std::all_of(dag.edges().begin(), dag.edges().end(),
                       [&pos](const DagEdge &e) { return pos[e.src] < pos[e.dst]; });
}

namespace detail {

inline std::string node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Entry: return "entry";
        case NodeKind::Gate: return "gate";
        case NodeKind::Exit: return "exit";
    }
    return "gate";
}

inline std::string node_label(const GateDag &dag, const DagNode &node) {
    if (node.kind == NodeKind::Gate) {
        const auto &op = dag.op(node.index);
        std::string label(gate_name(op.kind));
        for (const Qubit q : op.qubits) {
            label += " " + std::to_string(q);
        }
        return label;
    }
    return node_kind_name(node.kind) + " q" + std::to_string(node.index);
}

} // namespace detail

/**
 * JSON form:
 *   {"num_qubits": n, "num_gates": m,
 *    "nodes": [{"id", "kind": "entry"|"gate"|"exit", "qubit" | "op", "gate", "qubits"}],
 *    "edges": [{"src", "dst", "qubit"}]}
 */
inline nlohmann::json dag_to_json(const GateDag &dag) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto &node : dag.nodes()) {
        nlohmann::json j{{"id", node.id}, {"kind", detail::node_kind_name(node.kind)}};
        if (node.kind == NodeKind::Gate) {
            const auto &op = dag.op(node.index);
            j["op"] = node.index;
            j["gate"] = std::string(gate_name(op.kind));
            j["qubits"] = op.qubits;
        } else {
            j["qubit"] = node.index;
        }
        nodes.push_back(std::move(j));
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto &e : dag.edges()) {
        edges.push_back({{"src", e.src}, {"dst", e.dst}, {"qubit", e.qubit}});
    }
    return {{"num_qubits", dag.num_qubits()},
            {"num_gates", dag.num_gates()},
            {"nodes", std::move(nodes)},
            {"edges", std::move(edges)}};
}

/// Graphviz rendering. When `assignment` is non-empty, nodes are grouped
/// into one cluster per part.
inline void write_dot(std::ostream &out, const GateDag &dag,
                      std::span<const std::size_t> assignment = {}) {
    out << "digraph circuit {\n  rankdir=TB;\n";
    auto emit_node = [&](const DagNode &node, const char *indent) {
        out << indent << "n" << node.id << " [label=\"" << detail::node_label(dag, node) << "\"";
        if (node.kind != NodeKind::Gate) {
            out << ", shape=point";
        }
        out << "];\n";
    };
    if (assignment.size() == dag.num_nodes()) {
        std::size_t parts = 0;
        for (const std::size_t p : assignment) {
            parts = std::max(parts, p + 1);
        }
        for (std::size_t p = 0; p < parts; ++p) {
            out << "  subgraph cluster_" << p << " {\n    label=\"P" << p << "\";\n";
            for (const auto &node : dag.nodes()) {
                if (assignment[node.id] == p) {
                    emit_node(node, "    ");
                }
            }
            out << "  }\n";
        }
    } else {
        for (const auto &node : dag.nodes()) {
            emit_node(node, "  ");
        }
    }
    for (const auto &e : dag.edges()) {
        out << "  n" << e.src << " -> n" << e.dst << " [label=\"q" << e.qubit << "\"];\n";
    }
    out << "}\n";
}

} // namespace hisim
