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
 * Exact minimum part count for small DAGs.
 *
 * An acyclic partition listed in topological part order is the same thing
 * as a chain of down-sets (predecessor-closed gate sets) D_0 = {} < D_1 <
 * ... < D_k = all gates, where each step D_{i+1} \ D_i is one part. The
 * search is therefore a breadth-first walk over down-sets, level = number
 * of parts used so far, where a step may add any set of gates that keeps the
 * down-set property and touches at most `limit` qubits.
 *
 * Pruning: the optimum from a larger down-set is never worse than from a
 * subset of it (restricting a valid partition of the remainder to a smaller
 * remainder keeps it valid), so from each down-set only the maximal
 * extensions are expanded.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hisim/dag.hpp"
#include "hisim/error.hpp"

namespace hisim {

inline constexpr std::size_t kOracleMaxGates = 20;

inline std::size_t optimal_parts_bruteforce(const GateDag &dag, std::size_t limit) {
    const std::size_t m = dag.num_gates();
    if (m > kOracleMaxGates) {
        throw Error(ErrorKind::TooLargeForOracle, std::to_string(m) + " gate nodes");
    }
    for (const auto &op : dag.ops()) {
        if (op.qubits.size() > limit) {
            throw Error(ErrorKind::LimitTooSmall, "limit " + std::to_string(limit));
        }
    }
    if (m == 0) {
        return 0;
    }
    using Mask = std::uint32_t;
    const Mask full = (Mask{1} << m) - 1;

    std::vector<Mask> pred_mask(m, 0);
    std::vector<std::uint64_t> qubit_mask(m, 0);
    std::vector<std::vector<Qubit>> qubits(m);
    for (const auto &e : dag.edges()) {
        if (dag.is_gate(e.src) && dag.is_gate(e.dst)) {
            pred_mask[dag.op_index(e.dst)] |= Mask{1} << dag.op_index(e.src);
        }
    }
    // Qubits are renumbered densely so the union fits one 64-bit word.
    std::vector<std::size_t> dense(dag.num_qubits(), SIZE_MAX);
    std::size_t next_qubit = 0;
    for (std::size_t i = 0; i < m; ++i) {
        for (const Qubit q : dag.op(i).qubits) {
            if (dense[q] == SIZE_MAX) {
                dense[q] = next_qubit++;
            }
            qubit_mask[i] |= std::uint64_t{1} << dense[q];
        }
    }

    auto popcount = [](std::uint64_t x) { return static_cast<std::size_t>(__builtin_popcountll(x)); };

    // All maximal extensions of `base`: grow a part one available gate at a
    // time; record a result when no further gate can be added.
    auto expand = [&](Mask base, std::unordered_set<Mask> &out) {
        std::unordered_set<Mask> visited;
        std::vector<std::pair<Mask, std::uint64_t>> stack{{0, 0}};
        while (!stack.empty()) {
            const auto [part, used] = stack.back();
            stack.pop_back();
            const Mask placed = base | part;
            bool grew = false;
            for (std::size_t i = 0; i < m; ++i) {
                const Mask bit = Mask{1} << i;
                if ((placed & bit) || (pred_mask[i] & ~placed)) {
                    continue;
                }
                const std::uint64_t next_used = used | qubit_mask[i];
                if (popcount(next_used) > limit) {
                    continue;
                }
                grew = true;
                const Mask next = part | bit;
                if (visited.insert(next).second) {
                    stack.emplace_back(next, next_used);
                }
            }
            if (!grew && part != 0) {
                out.insert(placed);
            }
        }
    };

    // Lower bound: every qubit still touched needs a part, at most `limit`
    // qubits per part.
    auto lower_bound = [&](Mask placed) {
        std::uint64_t used = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (!(placed >> i & 1U)) {
                used |= qubit_mask[i];
            }
        }
        return (popcount(used) + limit - 1) / limit;
    };

    // Iterative deepening on the part count; failed[d] is the largest budget
    // already proven insufficient from down-set d.
    std::unordered_map<Mask, std::size_t> failed;
    std::function<bool(Mask, std::size_t)> solve = [&](Mask placed, std::size_t budget) {
        if (placed == full) {
            return true;
        }
        if (budget == 0 || lower_bound(placed) > budget) {
            return false;
        }
        if (const auto it = failed.find(placed); it != failed.end() && it->second >= budget) {
            return false;
        }
        std::unordered_set<Mask> ext_set;
        expand(placed, ext_set);
        std::vector<Mask> ext(ext_set.begin(), ext_set.end());
        std::sort(ext.begin(), ext.end(), [&](Mask a, Mask b) {
            const auto pa = popcount(a), pb = popcount(b);
            return pa != pb ? pa > pb : a < b;
        });
        for (const Mask e : ext) {
            if (solve(e, budget - 1)) {
                return true;
            }
        }
        auto &f = failed[placed];
        f = std::max(f, budget);
        return false;
    };
    for (std::size_t k = lower_bound(0); k <= m; ++k) {
        if (solve(0, k)) {
            return k;
        }
    }
    return m;
}

} // namespace hisim
