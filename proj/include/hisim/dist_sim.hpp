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
 * In-process emulation of distributed state-vector execution.
 *
 * With R = 2^p ranks, an n-qubit state is split into p process qubits, which
 * select the rank, and l = n - p local qubits, which index the rank's 2^l
 * amplitude buffer. Every part runs entirely rank-locally, so all of its
 * qubits must be local. Between parts whose layouts differ, amplitudes are
 * permuted across buffers according to a RedistributionPlan; the plan is the
 * exact data-movement contract a message-passing backend would follow, and
 * its byte counts are what CommStats reports.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hisim/bits.hpp"
#include "hisim/circuit.hpp"
#include "hisim/error.hpp"
#include "hisim/hier_exec.hpp"
#include "hisim/partition.hpp"
#include "hisim/statevector.hpp"

namespace hisim {

struct RankLayout {
    std::size_t num_qubits{0};
    /// process[j] is bit j of the rank index; ascending.
    std::vector<Qubit> process;
    /// local[i] is bit i of the offset inside a rank buffer; ascending.
    std::vector<Qubit> local;

    [[nodiscard]] std::size_t num_ranks() const { return std::size_t{1} << process.size(); }
    [[nodiscard]] std::size_t local_size() const { return std::size_t{1} << local.size(); }

    [[nodiscard]] std::size_t rank_of(bits::Index global) const {
        return bits::extract(global, process);
    }
    [[nodiscard]] std::size_t offset_of(bits::Index global) const {
        return bits::extract(global, local);
    }
    [[nodiscard]] bits::Index global_index(std::size_t rank, std::size_t offset) const {
        return bits::deposit(rank, process) | bits::deposit(offset, local);
    }

    friend bool operator==(const RankLayout &, const RankLayout &) = default;
};

inline void check_layout(const RankLayout &layout) {
    std::vector<char> seen(layout.num_qubits, 0);
    auto mark = [&](Qubit q) {
        if (q >= layout.num_qubits || seen[q]) {
            throw Error(ErrorKind::LayoutMismatch,
                        "qubit " + std::to_string(q) + " is out of range or listed twice");
        }
        seen[q] = 1;
    };
    for (const Qubit q : layout.process) mark(q);
    for (const Qubit q : layout.local) mark(q);
    if (layout.process.size() + layout.local.size() != layout.num_qubits) {
        throw Error(ErrorKind::LayoutMismatch, "process and local qubits must cover the register");
    }
}

/// Local qubits: the part's qubits, topped up with the lowest-numbered other
/// qubits until there are n - p of them. Process qubits: the rest.
inline RankLayout choose_layout(std::span<const Qubit> part_qubits, std::size_t num_qubits,
                                std::size_t process_qubits) {
    if (process_qubits > num_qubits) {
        throw Error(ErrorKind::PartTooWideForLayout,
                    std::to_string(process_qubits) + " process qubits for " +
                        std::to_string(num_qubits) + " qubits");
    }
    const std::size_t l = num_qubits - process_qubits;
    if (part_qubits.size() > l) {
        throw Error(ErrorKind::PartTooWideForLayout,
                    "part needs " + std::to_string(part_qubits.size()) + " local qubits, only " +
                        std::to_string(l) + " available");
    }
    std::vector<char> is_local(num_qubits, 0);
    std::size_t count = 0;
    for (const Qubit q : part_qubits) {
        if (q >= num_qubits) {
            throw Error(ErrorKind::QubitOutOfRange, std::to_string(q));
        }
        count += is_local[q] ? 0 : 1;
        is_local[q] = 1;
    }
    for (Qubit q = 0; q < num_qubits && count < l; ++q) {
        if (!is_local[q]) {
            is_local[q] = 1;
            ++count;
        }
    }
    RankLayout layout;
    layout.num_qubits = num_qubits;
    for (Qubit q = 0; q < num_qubits; ++q) {
        (is_local[q] ? layout.local : layout.process).push_back(q);
    }
    return layout;
}

inline RankLayout choose_layout(const Part &part, std::size_t num_qubits, std::size_t process_qubits) {
    return choose_layout(part.qubits, num_qubits, process_qubits);
}

struct CopyDescriptor {
    std::size_t src_offset{0};
    std::size_t dst_offset{0};
    std::size_t length{0};

    friend bool operator==(const CopyDescriptor &, const CopyDescriptor &) = default;
};

struct RedistributionPlan {
    std::size_t num_ranks{0};
    std::size_t local_size{0};
    /// transfers[src * num_ranks + dst], ordered by source offset.
    std::vector<std::vector<CopyDescriptor>> transfers;
    std::uint64_t bytes_remote{0};
    std::uint64_t bytes_resident{0};
    /// Number of (src, dst) pairs with src != dst that exchange data.
    std::size_t messages{0};
    std::vector<std::uint64_t> bytes_sent;
    std::vector<std::uint64_t> bytes_received;

    [[nodiscard]] const std::vector<CopyDescriptor> &between(std::size_t src, std::size_t dst) const {
        return transfers.at(src * num_ranks + dst);
    }
};

inline RedistributionPlan plan_redistribution(const RankLayout &prev, const RankLayout &next) {
    if (prev.num_qubits != next.num_qubits || prev.process.size() != next.process.size()) {
        throw Error(ErrorKind::LayoutMismatch, "layouts describe different registers");
    }
    check_layout(prev);
    check_layout(next);
    RedistributionPlan plan;
    plan.num_ranks = prev.num_ranks();
    plan.local_size = prev.local_size();
    plan.transfers.assign(plan.num_ranks * plan.num_ranks, {});
    plan.bytes_sent.assign(plan.num_ranks, 0);
    plan.bytes_received.assign(plan.num_ranks, 0);
    for (std::size_t src = 0; src < plan.num_ranks; ++src) {
        for (std::size_t off = 0; off < plan.local_size; ++off) {
            const bits::Index g = prev.global_index(src, off);
            const std::size_t dst = next.rank_of(g);
            const std::size_t dst_off = next.offset_of(g);
            auto &list = plan.transfers[src * plan.num_ranks + dst];
            if (!list.empty() && list.back().src_offset + list.back().length == off &&
                list.back().dst_offset + list.back().length == dst_off) {
                ++list.back().length;
            } else {
                list.push_back({off, dst_off, 1});
            }
            if (src == dst) {
                plan.bytes_resident += sizeof(Amplitude);
            } else {
                plan.bytes_remote += sizeof(Amplitude);
                plan.bytes_sent[src] += sizeof(Amplitude);
                plan.bytes_received[dst] += sizeof(Amplitude);
            }
        }
    }
    for (std::size_t src = 0; src < plan.num_ranks; ++src) {
        for (std::size_t dst = 0; dst < plan.num_ranks; ++dst) {
            if (src != dst && !plan.between(src, dst).empty()) {
                ++plan.messages;
            }
        }
    }
    return plan;
}

using RankBuffers = std::vector<std::vector<Amplitude>>;

/// Performs every copy of the plan, producing the buffers of the new layout.
inline RankBuffers apply_redistribution(const RedistributionPlan &plan, const RankBuffers &buffers) {
    if (buffers.size() != plan.num_ranks) {
        throw Error(ErrorKind::LayoutMismatch, "buffer count does not match the plan");
    }
    RankBuffers out(plan.num_ranks, std::vector<Amplitude>(plan.local_size));
    for (std::size_t src = 0; src < plan.num_ranks; ++src) {
        if (buffers[src].size() != plan.local_size) {
            throw Error(ErrorKind::LayoutMismatch, "rank buffer has the wrong size");
        }
        for (std::size_t dst = 0; dst < plan.num_ranks; ++dst) {
            for (const auto &d : plan.between(src, dst)) {
                std::copy_n(buffers[src].begin() + static_cast<std::ptrdiff_t>(d.src_offset),
                            d.length,
                            out[dst].begin() + static_cast<std::ptrdiff_t>(d.dst_offset));
            }
        }
    }
    return out;
}

/// Splits a full state into rank buffers according to `layout`.
inline RankBuffers distribute(std::span<const Amplitude> state, const RankLayout &layout) {
    RankBuffers buffers(layout.num_ranks(), std::vector<Amplitude>(layout.local_size()));
    for (std::size_t r = 0; r < buffers.size(); ++r) {
        for (std::size_t o = 0; o < buffers[r].size(); ++o) {
            buffers[r][o] = state[layout.global_index(r, o)];
        }
    }
    return buffers;
}

inline StateVector collect(const RankBuffers &buffers, const RankLayout &layout) {
    std::vector<Amplitude> amps(std::size_t{1} << layout.num_qubits);
    for (std::size_t r = 0; r < buffers.size(); ++r) {
        for (std::size_t o = 0; o < buffers[r].size(); ++o) {
            amps[layout.global_index(r, o)] = buffers[r][o];
        }
    }
    return StateVector(layout.num_qubits, std::move(amps));
}

struct SwitchStats {
    std::size_t from_part{0};
    std::size_t to_part{0};
    std::uint64_t bytes_remote{0};
    std::uint64_t bytes_resident{0};
    std::size_t messages{0};
    std::vector<std::uint64_t> bytes_sent;
    std::vector<std::uint64_t> bytes_received;
};

struct CommStats {
    std::size_t num_ranks{1};
    std::size_t parts{0};
    std::vector<SwitchStats> switches;

    [[nodiscard]] std::uint64_t total_remote() const {
        std::uint64_t t = 0;
        for (const auto &s : switches) t += s.bytes_remote;
        return t;
    }
    [[nodiscard]] std::uint64_t total_resident() const {
        std::uint64_t t = 0;
        for (const auto &s : switches) t += s.bytes_resident;
        return t;
    }
    [[nodiscard]] std::size_t total_messages() const {
        std::size_t t = 0;
        for (const auto &s : switches) t += s.messages;
        return t;
    }
};

/// {"parts", "ranks", "switches": [{"from", "to", "bytes_remote",
/// "bytes_resident", "messages", "bytes_sent", "bytes_received"}],
/// "totals": {"bytes_remote", "bytes_resident", "messages"}}
inline nlohmann::json comm_stats_to_json(const CommStats &stats) {
    nlohmann::json switches = nlohmann::json::array();
    for (const auto &s : stats.switches) {
        switches.push_back({{"from", s.from_part},
                            {"to", s.to_part},
                            {"bytes_remote", s.bytes_remote},
                            {"bytes_resident", s.bytes_resident},
                            {"messages", s.messages},
                            {"bytes_sent", s.bytes_sent},
                            {"bytes_received", s.bytes_received}});
    }
    return {{"parts", stats.parts},
            {"ranks", stats.num_ranks},
            {"switches", std::move(switches)},
            {"totals",
             {{"bytes_remote", stats.total_remote()},
              {"bytes_resident", stats.total_resident()},
              {"messages", stats.total_messages()}}}};
}

struct DistributedResult {
    StateVector state;
    CommStats comm;
};

namespace detail {

/// Part program expressed in rank-local offsets: either the part's gates
/// directly, or nested gather-execute-scatter over second-level parts.
inline InnerProgram rank_program(const Circuit &circuit, const Part &part, const RankLayout &layout,
                                 const PartitionResult *children) {
    QubitSlotMap local_map(layout.local);
    InnerProgram program;
    for (const std::size_t g : part.gate_indices) {
        GateOp op = circuit.ops.at(g);
        for (Qubit &q : op.qubits) {
            q = local_map.slot(q);
        }
        program.ops.push_back(std::move(op));
    }
    if (children == nullptr) {
        return program;
    }
    const std::size_t l = layout.local.size();
    for (const auto &child : children->parts) {
        // Child qubits are parent slots; parent slot s is part.qubits[s].
        std::vector<Qubit> local_qubits;
        for (const Qubit slot : child.qubits) {
            local_qubits.push_back(local_map.slot(part.qubits.at(slot)));
        }
        std::vector<GateOp> ops;
        for (const std::size_t idx : child.gate_indices) {
            ops.push_back(program.ops.at(idx));
        }
        if (children->parts.size() == 1 && local_qubits.size() == l) {
            return program;
        }
        program.sub_parts.push_back(make_executable(child.id, l, local_qubits, ops));
        const auto &sub = program.sub_parts.back();
        program.sub_plans.emplace_back(l, sub.map, sub.free_qubits);
    }
    return program;
}

inline DistributedResult simulate_distributed_impl(const Circuit &circuit,
                                                   const PartitionResult &partition,
                                                   const std::vector<PartitionResult> *level2,
                                                   std::size_t process_qubits) {
    validate(circuit);
    const std::size_t n = circuit.num_qubits;
    if (n > max_qubits()) {
        throw Error(ErrorKind::QubitCountOutOfRange, std::to_string(n));
    }
    std::vector<RankLayout> layouts;
    for (const auto &part : partition.parts) {
        layouts.push_back(choose_layout(part, n, process_qubits));
    }
    RankLayout layout = layouts.empty() ? choose_layout(std::span<const Qubit>{}, n, process_qubits)
                                        : layouts.front();

    CommStats comm;
    comm.num_ranks = layout.num_ranks();
    comm.parts = partition.parts.size();
    RankBuffers buffers(layout.num_ranks(), std::vector<Amplitude>(layout.local_size(), 0.0));
    buffers[layout.rank_of(0)][layout.offset_of(0)] = 1.0;

    for (std::size_t k = 0; k < partition.parts.size(); ++k) {
        const auto &part = partition.parts[k];
        if (k > 0 && layouts[k] != layout) {
            const RedistributionPlan plan = plan_redistribution(layout, layouts[k]);
            buffers = apply_redistribution(plan, buffers);
            comm.switches.push_back({k - 1, k, plan.bytes_remote, plan.bytes_resident,
                                     plan.messages, plan.bytes_sent, plan.bytes_received});
            layout = layouts[k];
        } else if (k > 0) {
            comm.switches.push_back({k - 1, k, 0, std::uint64_t{16} << n, 0,
                                     std::vector<std::uint64_t>(layout.num_ranks(), 0),
                                     std::vector<std::uint64_t>(layout.num_ranks(), 0)});
        }
        const InnerProgram program =
            rank_program(circuit, part, layout, level2 ? &level2->at(k) : nullptr);
        const auto ranks = static_cast<std::int64_t>(buffers.size());
#pragma omp parallel
        {
            std::vector<Amplitude> scratch;
            std::uint64_t unused = 0;
#pragma omp for schedule(static)
            for (std::int64_t r = 0; r < ranks; ++r) {
                run_inner(buffers[static_cast<std::size_t>(r)], layout.local.size(), program, scratch,
                          unused);
            }
        }
    }
    return {collect(buffers, layout), std::move(comm)};
}

} // namespace detail

/// Runs every part rank-locally on 2^p emulated ranks, redistributing the
/// state between parts whose layouts differ.
inline DistributedResult simulate_distributed(const Circuit &circuit,
                                              const PartitionResult &partition,
                                              std::size_t process_qubits) {
    return detail::simulate_distributed_impl(circuit, partition, nullptr, process_qubits);
}

/// Same, with each rank running its part through the part's second-level
/// partition.
inline DistributedResult simulate_distributed(const Circuit &circuit, const MultiLevelPartition &ml,
                                              std::size_t process_qubits) {
    if (ml.level2.size() != ml.level1.parts.size()) {
        throw Error(ErrorKind::InvalidPartition, "one second-level partition per part required");
    }
    return detail::simulate_distributed_impl(circuit, ml.level1, &ml.level2, process_qubits);
}

} // namespace hisim
