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

#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"

namespace hisim {
namespace {

GateOp g1(GateKind k, Qubit a) { return {k, {a}, {}}; }
GateOp g2(GateKind k, Qubit a, Qubit b) { return {k, {a, b}, {}}; }

std::set<std::tuple<NodeId, NodeId, Qubit>> edge_set(const GateDag &dag) {
    std::set<std::tuple<NodeId, NodeId, Qubit>> out;
    for (const auto &e : dag.edges()) out.emplace(e.src, e.dst, e.qubit);
    return out;
}

// Independent cycle check: transitive closure of the contracted graph.
bool quotient_acyclic_closure(const GateDag &dag, const std::vector<std::size_t> &assignment) {
    std::size_t k = 0;
    for (const auto p : assignment) k = std::max(k, p + 1);
    std::vector<std::vector<char>> reach(k, std::vector<char>(k, 0));
    for (const auto &e : dag.edges()) {
        if (assignment[e.src] != assignment[e.dst]) reach[assignment[e.src]][assignment[e.dst]] = 1;
    }
    for (std::size_t m = 0; m < k; ++m)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if (reach[i][m] && reach[m][j]) reach[i][j] = 1;
    for (std::size_t i = 0; i < k; ++i)
        if (reach[i][i]) return false;
    return true;
}

TEST(Dag, EmptyCircuit) {
    const GateDag dag = build_dag(Circuit{1, {}});
    EXPECT_EQ(dag.num_nodes(), 2u);
    ASSERT_EQ(dag.edges().size(), 1u);
    EXPECT_EQ(dag.edges()[0].src, dag.entry_node(0));
    EXPECT_EQ(dag.edges()[0].dst, dag.exit_node(0));
}

TEST(Dag, HandTracedExample) {
    const GateDag dag = build_dag(Circuit{2, {g1(GateKind::H, 0), g2(GateKind::CX, 0, 1)}});
    EXPECT_EQ(dag.num_nodes(), 6u);
    const NodeId h = dag.gate_node(0), cx = dag.gate_node(1);
    const std::set<std::tuple<NodeId, NodeId, Qubit>> expected{
        {dag.entry_node(0), h, 0}, {h, cx, 0}, {dag.entry_node(1), cx, 1},
        {cx, dag.exit_node(0), 0}, {cx, dag.exit_node(1), 1}};
    EXPECT_EQ(edge_set(dag), expected);
    EXPECT_EQ(dag.node(h).kind, NodeKind::Gate);
    EXPECT_EQ(dag.node(dag.entry_node(1)).kind, NodeKind::Entry);
    EXPECT_EQ(dag.node(dag.exit_node(1)).kind, NodeKind::Exit);
}

TEST(Dag, StructuralInvariantsOnRandomCircuits) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng(7, s);
        const std::size_t n = 2 + rng.below(9);
        const Circuit c = testing::random_circuit(rng, n, rng.below(60));
        const GateDag dag = build_dag(c);
        std::size_t arity_sum = 0;
        for (const auto &op : c.ops) arity_sum += op.qubits.size();
        ASSERT_EQ(dag.num_nodes(), c.ops.size() + 2 * n);
        ASSERT_EQ(dag.edges().size(), n + arity_sum);
        for (Qubit q = 0; q < n; ++q) {
            EXPECT_EQ(dag.in_edges(dag.entry_node(q)).size(), 0u);
            EXPECT_EQ(dag.out_edges(dag.entry_node(q)).size(), 1u);
            EXPECT_EQ(dag.in_edges(dag.exit_node(q)).size(), 1u);
            EXPECT_EQ(dag.out_edges(dag.exit_node(q)).size(), 0u);
        }
        for (std::size_t i = 0; i < c.ops.size(); ++i) {
            const NodeId v = dag.gate_node(i);
            std::multiset<Qubit> in, out;
            for (const auto e : dag.in_edges(v)) in.insert(dag.edges()[e].qubit);
            for (const auto e : dag.out_edges(v)) out.insert(dag.edges()[e].qubit);
            EXPECT_EQ(in, out);
            EXPECT_EQ(in.size(), c.ops[i].qubits.size());
            EXPECT_EQ(std::set<Qubit>(in.begin(), in.end()).size(), in.size());
        }
        // Each qubit's chain visits its gates in program order.
        for (Qubit q = 0; q < n; ++q) {
            NodeId v = dag.entry_node(q);
            std::vector<std::size_t> seen;
            while (dag.node(v).kind != NodeKind::Exit) {
                NodeId next = v;
                for (const auto e : dag.out_edges(v))
                    if (dag.edges()[e].qubit == q) next = dag.edges()[e].dst;
                ASSERT_NE(next, v);
                v = next;
                if (dag.is_gate(v)) seen.push_back(dag.op_index(v));
            }
            std::vector<std::size_t> expected;
            for (std::size_t i = 0; i < c.ops.size(); ++i)
                if (std::find(c.ops[i].qubits.begin(), c.ops[i].qubits.end(), q) != c.ops[i].qubits.end())
                    expected.push_back(i);
            EXPECT_EQ(seen, expected);
        }
        std::vector<NodeId> program(dag.num_nodes());
        std::iota(program.begin(), program.end(), 0);
        EXPECT_TRUE(is_topological_order(dag, program));
    }
}

TEST(Dag, WorkingSetExamples) {
    const GateDag dag = build_dag(Circuit{3, {g2(GateKind::CX, 0, 1), g2(GateKind::CZ, 0, 2)}});
    const std::vector<NodeId> both{dag.gate_node(0), dag.gate_node(1)};
    EXPECT_EQ(working_set(dag, both), 3u);
    std::vector<NodeId> all(dag.num_nodes());
    std::iota(all.begin(), all.end(), 0);
    EXPECT_EQ(working_set(dag, all), 3u);
    EXPECT_EQ(working_set(dag, std::vector<NodeId>{}), 0u);
    const std::vector<NodeId> with_entry{dag.entry_node(0), dag.gate_node(0)};
    EXPECT_EQ(working_set(dag, with_entry), 2u);
    try {
        working_set(dag, std::vector<NodeId>{999});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnknownNode);
    }
}

TEST(Dag, WorkingSetOfGatesIsDistinctQubits) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        Rng rng(9, s);
        const Circuit c = testing::random_circuit(rng, 2 + rng.below(8), 1 + rng.below(30));
        const GateDag dag = build_dag(c);
        std::vector<NodeId> set;
        std::set<Qubit> qubits;
        for (std::size_t i = 0; i < c.ops.size(); ++i) {
            if (rng.below(2)) {
                set.push_back(dag.gate_node(i));
                qubits.insert(c.ops[i].qubits.begin(), c.ops[i].qubits.end());
            }
        }
        EXPECT_EQ(working_set(dag, set), qubits.size());
    }
}

TEST(Dag, WorkingSetIsSubadditive) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        Rng rng(11, s);
        const Circuit c = testing::random_circuit(rng, 3, 4);
        const GateDag dag = build_dag(c);
        // Entry and gate nodes only; each node goes to S1, S2 or neither.
        std::vector<NodeId> candidates;
        for (const auto &node : dag.nodes())
            if (node.kind != NodeKind::Exit) candidates.push_back(node.id);
        std::size_t combos = 1;
        for (std::size_t i = 0; i < candidates.size(); ++i) combos *= 3;
        for (std::size_t code = 0; code < combos; ++code) {
            std::vector<NodeId> a, b, u;
            std::size_t x = code;
            for (const NodeId v : candidates) {
                if (x % 3 == 1) a.push_back(v);
                if (x % 3 == 2) b.push_back(v);
                if (x % 3 != 0) u.push_back(v);
                x /= 3;
            }
            ASSERT_LE(working_set(dag, u), working_set(dag, a) + working_set(dag, b));
        }
    }
}

TEST(Dag, QuotientExamples) {
    // Chain a -> b -> c on one qubit.
    const GateDag dag = build_dag(Circuit{1, {g1(GateKind::H, 0), g1(GateKind::X, 0), g1(GateKind::Z, 0)}});
    std::vector<std::size_t> one(dag.num_nodes(), 0);
    EXPECT_TRUE(quotient_is_acyclic(dag, one));
    std::vector<std::size_t> split(dag.num_nodes(), 0);
    split[dag.gate_node(1)] = 1;
    EXPECT_FALSE(quotient_is_acyclic(dag, split));
    split[dag.gate_node(2)] = 1;
    split[dag.exit_node(0)] = 1;
    EXPECT_TRUE(quotient_is_acyclic(dag, split));
}

TEST(Dag, QuotientMatchesClosureOracleExhaustively) {
    const std::vector<Circuit> circuits{
        Circuit{2, {g1(GateKind::H, 0), g2(GateKind::CX, 0, 1), g1(GateKind::X, 1)}},
        Circuit{3, {g2(GateKind::CX, 0, 1), g2(GateKind::CX, 1, 2), g1(GateKind::H, 0)}},
        Circuit{2, {g2(GateKind::CZ, 0, 1), g2(GateKind::CX, 1, 0)}},
    };
    for (const auto &c : circuits) {
        const GateDag dag = build_dag(c);
        ASSERT_LE(dag.num_nodes(), 12u);
        const std::size_t k = 3;
        std::size_t combos = 1;
        for (std::size_t i = 0; i < dag.num_nodes(); ++i) combos *= k;
        std::vector<std::size_t> assignment(dag.num_nodes());
        for (std::size_t code = 0; code < combos; ++code) {
            std::size_t x = code;
            for (auto &p : assignment) {
                p = x % k;
                x /= k;
            }
            ASSERT_EQ(quotient_is_acyclic(dag, assignment), quotient_acyclic_closure(dag, assignment));
        }
    }
}

TEST(Dag, DfsOrderSingleChain) {
    const GateDag dag = build_dag(Circuit{1, {g1(GateKind::H, 0), g1(GateKind::X, 0), g1(GateKind::Y, 0)}});
    std::vector<NodeId> chain(dag.num_nodes());
    std::iota(chain.begin(), chain.end(), 0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        EXPECT_EQ(dfs_topo_order(dag, seed), chain);
    }
}

TEST(Dag, DfsOrderIndependentChainsAndDiamond) {
    const GateDag chains =
        build_dag(Circuit{2, {g1(GateKind::H, 0), g1(GateKind::H, 1), g1(GateKind::X, 0), g1(GateKind::X, 1)}});
    for (std::uint64_t seed : {1, 2}) {
        EXPECT_TRUE(is_topological_order(chains, dfs_topo_order(chains, seed)));
    }
    // Diamond: CX(0,1) feeds CX(0,2) and, via q1, CX(1,2), which rejoin.
    const GateDag diamond = build_dag(Circuit{
        3, {g2(GateKind::CX, 0, 1), g2(GateKind::CX, 0, 2), g2(GateKind::CX, 1, 2), g1(GateKind::H, 0)}});
    std::set<std::vector<NodeId>> distinct;
    for (std::uint64_t seed = 0; seed <= 100; ++seed) {
        const auto order = dfs_topo_order(diamond, seed);
        EXPECT_TRUE(is_topological_order(diamond, order));
        EXPECT_EQ(order, dfs_topo_order(diamond, seed));
        distinct.insert(order);
    }
    EXPECT_GT(distinct.size(), 1u);
}

TEST(Dag, TopologicalPredicateRejectsBadOrders) {
    const GateDag dag = build_dag(Circuit{1, {g1(GateKind::H, 0)}});
    EXPECT_FALSE(is_topological_order(dag, std::vector<NodeId>{1, 0, 2}));
    EXPECT_FALSE(is_topological_order(dag, std::vector<NodeId>{0, 1}));
    EXPECT_FALSE(is_topological_order(dag, std::vector<NodeId>{0, 0, 2}));
    EXPECT_TRUE(is_topological_order(dag, std::vector<NodeId>{0, 1, 2}));
}

TEST(Dag, JsonExport) {
    const GateDag dag = build_dag(Circuit{2, {g1(GateKind::H, 0), g2(GateKind::CX, 0, 1)}});
    const auto j = dag_to_json(dag);
    EXPECT_EQ(j.at("num_qubits"), 2);
    EXPECT_EQ(j.at("num_gates"), 2);
    ASSERT_EQ(j.at("nodes").size(), dag.num_nodes());
    ASSERT_EQ(j.at("edges").size(), dag.edges().size());
    EXPECT_EQ(j.at("nodes")[0].at("kind"), "entry");
    EXPECT_EQ(j.at("nodes")[3].at("kind"), "gate");
    EXPECT_EQ(j.at("nodes")[3].at("gate"), "cx");
    for (const auto &e : j.at("edges")) {
        EXPECT_TRUE(e.contains("src") && e.contains("dst") && e.contains("qubit"));
    }
}

TEST(Dag, DotExportClustersParts) {
    const GateDag dag = build_dag(Circuit{2, {g1(GateKind::H, 0), g2(GateKind::CX, 0, 1)}});
    std::ostringstream plain, clustered;
    write_dot(plain, dag);
    EXPECT_NE(plain.str().find("digraph"), std::string::npos);
    EXPECT_EQ(plain.str().find("cluster"), std::string::npos);
    std::vector<std::size_t> assignment(dag.num_nodes(), 0);
    assignment[dag.gate_node(1)] = 1;
    write_dot(clustered, dag, assignment);
    EXPECT_NE(clustered.str().find("cluster_1"), std::string::npos);
}

TEST(Dag, Bv6DagShape) {
    const GateDag dag = build_dag(testing::bundled("bv_6"));
    EXPECT_EQ(dag.num_qubits(), 6u);
    std::vector<NodeId> all(dag.num_nodes());
    std::iota(all.begin(), all.end(), 0);
    EXPECT_EQ(working_set(dag, all), 6u);
}

} // namespace
} // namespace hisim
