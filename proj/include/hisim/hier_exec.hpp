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
 * Part-by-part execution against small inner state vectors.
 *
 * For a part acting on w qubits, the n - w remaining ("free") qubits are
 * fixed to each of their 2^(n-w) bit patterns in turn. For every pattern the
 * 2^w amplitudes that share it are gathered into an inner vector, the part's
 * gates run on that vector with qubits renamed to inner slots, and the
 * results are scattered back. The gathered index sets of one part tile the
 * outer vector exactly once, so iterations are independent.
 *
 * Slots are assigned in ascending global qubit order, and free patterns are
 * enumerated as ascending integers over the free qubits (also ascending).
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

#include "hisim/bits.hpp"
#include "hisim/circuit.hpp"
#include "hisim/error.hpp"
#include "hisim/partition.hpp"
#include "hisim/statevector.hpp"

namespace hisim {

/// Bijection between a part's qubits and inner slots [0, w).
class QubitSlotMap {
  public:
    QubitSlotMap() = default;

    /// `qubits` need not be sorted; they are sorted so slot order follows
    /// ascending qubit index.
    explicit QubitSlotMap(std::vector<Qubit> qubits) : slots_(std::move(qubits)) {
        std::sort(slots_.begin(), slots_.end());
        if (std::adjacent_find(slots_.begin(), slots_.end()) != slots_.end()) {
            throw Error(ErrorKind::DuplicateQubitInOp, "repeated qubit in slot map");
        }
    }

    [[nodiscard]] std::size_t width() const noexcept { return slots_.size(); }
    [[nodiscard]] Qubit qubit(std::size_t slot) const { return slots_.at(slot); }
    [[nodiscard]] std::span<const Qubit> qubits() const noexcept { return slots_; }

    [[nodiscard]] bool contains(Qubit q) const {
        return std::binary_search(slots_.begin(), slots_.end(), q);
    }

    [[nodiscard]] std::size_t slot(Qubit q) const {
        const auto it = std::lower_bound(slots_.begin(), slots_.end(), q);
        if (it == slots_.end() || *it != q) {
            throw Error(ErrorKind::QubitNotInPart, std::to_string(q));
        }
        return static_cast<std::size_t>(it - slots_.begin());
    }

  private:
    std::vector<Qubit> slots_;
};

struct ExecutablePart {
    std::size_t part_id{0};
    std::size_t num_qubits{0};
    QubitSlotMap map;
    /// Part gates in program order, qubits rewritten to slots.
    std::vector<GateOp> ops;
    /// Qubits outside the part, ascending; bit j of a free pattern is free_qubits[j].
    std::vector<Qubit> free_qubits;

    [[nodiscard]] std::size_t width() const noexcept { return map.width(); }
    [[nodiscard]] bits::Index iterations() const { return bits::bit(free_qubits.size()); }
};

/// Builds the executable form of a part over an n-qubit register, given its
/// slot qubits and its ops still in register coordinates.
inline ExecutablePart make_executable(std::size_t part_id, std::size_t num_qubits,
                                      std::vector<Qubit> part_qubits,
                                      std::span<const GateOp> ops) {
    ExecutablePart ex;
    ex.part_id = part_id;
    ex.num_qubits = num_qubits;
    ex.map = QubitSlotMap(std::move(part_qubits));
    for (const Qubit q : ex.map.qubits()) {
        if (q >= num_qubits) {
            throw Error(ErrorKind::QubitOutOfRange, std::to_string(q));
        }
    }
    for (const auto &op : ops) {
        GateOp local = op;
        for (Qubit &q : local.qubits) {
            q = ex.map.slot(q);
        }
        ex.ops.push_back(std::move(local));
    }
    for (Qubit q = 0; q < num_qubits; ++q) {
        if (!ex.map.contains(q)) {
            ex.free_qubits.push_back(q);
        }
    }
    return ex;
}

inline ExecutablePart remap_part(const Circuit &circuit, const Part &part) {
    std::vector<GateOp> ops;
    ops.reserve(part.gate_indices.size());
    for (const std::size_t g : part.gate_indices) {
        ops.push_back(circuit.ops.at(g));
    }
    return make_executable(part.id, circuit.num_qubits, part.qubits, ops);
}

namespace detail {

/// Outer-index offsets for every slot pattern and the packing of free bits,
/// precomputed once per part.
class GatherPlan {
  public:
    GatherPlan(std::size_t num_qubits, const QubitSlotMap &map, std::span<const Qubit> free_qubits)
        : free_(free_qubits.begin(), free_qubits.end()) {
        if (map.width() + free_.size() != num_qubits) {
            throw Error(ErrorKind::BadFreeBits, "free qubits do not complement the part");
        }
        const std::vector<std::size_t> slots(map.qubits().begin(), map.qubits().end());
        offsets_.resize(bits::bit(map.width()));
        for (bits::Index s = 0; s < offsets_.size(); ++s) {
            offsets_[s] = bits::deposit(s, slots);
        }
    }

    [[nodiscard]] bits::Index base(bits::Index free_bits) const {
        if (free_bits >= bits::bit(free_.size())) {
            throw Error(ErrorKind::BadFreeBits, std::to_string(free_bits));
        }
        return bits::deposit(free_bits, free_);
    }

    void gather(std::span<const Amplitude> outer, bits::Index base, std::span<Amplitude> inner) const {
        for (std::size_t s = 0; s < offsets_.size(); ++s) {
            inner[s] = outer[base | offsets_[s]];
        }
    }

    void scatter(std::span<const Amplitude> inner, bits::Index base, std::span<Amplitude> outer) const {
        for (std::size_t s = 0; s < offsets_.size(); ++s) {
            outer[base | offsets_[s]] = inner[s];
        }
    }

    [[nodiscard]] std::size_t inner_size() const noexcept { return offsets_.size(); }

  private:
    std::vector<std::size_t> free_;
    std::vector<bits::Index> offsets_;
};

inline std::vector<Qubit> complement(std::size_t num_qubits, const QubitSlotMap &map) {
    std::vector<Qubit> free;
    for (Qubit q = 0; q < num_qubits; ++q) {
        if (!map.contains(q)) {
            free.push_back(q);
        }
    }
    return free;
}

} // namespace detail

/// Copies the 2^w amplitudes selected by `free_bits` (bit j = value of the
/// j-th free qubit, ascending) into a fresh inner vector, slot s of the map
/// taking bit s of the inner index.
inline std::vector<Amplitude> gather(std::span<const Amplitude> outer, std::size_t num_qubits,
                                     bits::Index free_bits, const QubitSlotMap &map) {
    const auto free = detail::complement(num_qubits, map);
    const detail::GatherPlan plan(num_qubits, map, free);
    std::vector<Amplitude> inner(plan.inner_size());
    plan.gather(outer, plan.base(free_bits), inner);
    return inner;
}

inline std::vector<Amplitude> gather(const StateVector &outer, bits::Index free_bits,
                                     const QubitSlotMap &map) {
    return gather(outer.amplitudes(), outer.num_qubits(), free_bits, map);
}

/// Exact inverse placement of gather; touches only the gathered positions.
inline void scatter(std::span<const Amplitude> inner, std::span<Amplitude> outer,
                    std::size_t num_qubits, bits::Index free_bits, const QubitSlotMap &map) {
    const auto free = detail::complement(num_qubits, map);
    const detail::GatherPlan plan(num_qubits, map, free);
    if (inner.size() != plan.inner_size()) {
        throw Error(ErrorKind::BadFreeBits, "inner vector has the wrong size");
    }
    plan.scatter(inner, plan.base(free_bits), outer);
}

inline void scatter(std::span<const Amplitude> inner, StateVector &outer, bits::Index free_bits,
                    const QubitSlotMap &map) {
    scatter(inner, outer.amplitudes(), outer.num_qubits(), free_bits, map);
}

struct PartTrace {
    std::size_t part_id{0};
    /// 1 for first-level (or single-level) parts, 2 for nested parts.
    std::size_t level{1};
    std::size_t width{0};
    std::uint64_t iterations{0};
    std::size_t gates{0};
};

struct ExecStats {
    std::vector<PartTrace> parts;
    std::uint64_t gathers{0};
    std::uint64_t scatters{0};
    std::uint64_t inner_gathers{0};
    std::uint64_t inner_scatters{0};
};

/// One JSON object per line: {"part_id", "level", "w", "iterations", "gates"}.
inline void write_trace(std::ostream &out, const ExecStats &stats) {
    for (const auto &t : stats.parts) {
        out << nlohmann::json{{"part_id", t.part_id},
                              {"level", t.level},
                              {"w", t.width},
                              {"iterations", t.iterations},
                              {"gates", t.gates}}
                   .dump()
            << '\n';
    }
}

namespace detail {

/// Nested work run on each gathered inner vector: either the part's gates
/// directly, or a second round of gather-execute-scatter over sub-parts.
struct InnerProgram {
    std::vector<GateOp> ops;
    std::vector<ExecutablePart> sub_parts;
    std::vector<GatherPlan> sub_plans;
};

inline void run_inner(std::span<Amplitude> inner, std::size_t width, const InnerProgram &program,
                      std::vector<Amplitude> &scratch, std::uint64_t &inner_gathers) {
    if (program.sub_parts.empty()) {
        for (const auto &op : program.ops) {
            apply_gate(inner, width, op);
        }
        return;
    }
    for (std::size_t i = 0; i < program.sub_parts.size(); ++i) {
        const auto &sub = program.sub_parts[i];
        const auto &plan = program.sub_plans[i];
        scratch.resize(plan.inner_size());
        for (bits::Index f = 0; f < sub.iterations(); ++f) {
            const bits::Index base = plan.base(f);
            plan.gather(inner, base, scratch);
            for (const auto &op : sub.ops) {
                apply_gate(scratch, sub.width(), op);
            }
            plan.scatter(scratch, base, inner);
            ++inner_gathers;
        }
    }
}

/// For each free pattern: gather, run the inner program, scatter.
inline void run_part(std::span<Amplitude> outer, const ExecutablePart &part,
                     const InnerProgram &program, ExecStats *stats) {
    const GatherPlan plan(part.num_qubits, part.map, part.free_qubits);
    const auto iterations = static_cast<std::int64_t>(part.iterations());
    std::uint64_t gathers = 0;
    std::uint64_t inner_gathers = 0;
#pragma omp parallel reduction(+ : gathers, inner_gathers)
    {
        std::vector<Amplitude> inner(plan.inner_size());
        std::vector<Amplitude> scratch;
#pragma omp for schedule(static)
        for (std::int64_t f = 0; f < iterations; ++f) {
            const bits::Index base = plan.base(static_cast<bits::Index>(f));
            plan.gather(outer, base, inner);
            run_inner(inner, part.width(), program, scratch, inner_gathers);
            plan.scatter(inner, base, outer);
            ++gathers;
        }
    }
    if (stats != nullptr) {
        stats->parts.push_back({part.part_id, 1, part.width(), gathers, part.ops.size()});
        stats->gathers += gathers;
        stats->scatters += gathers;
        stats->inner_gathers += inner_gathers;
        stats->inner_scatters += inner_gathers;
        for (const auto &sub : program.sub_parts) {
            stats->parts.push_back({sub.part_id, 2, sub.width(), gathers * sub.iterations(),
                                    sub.ops.size()});
        }
    }
}

} // namespace detail

/// Runs already-remapped parts against an amplitude block in place.
inline void execute_parts(std::span<Amplitude> amps, std::span<const ExecutablePart> parts,
                          ExecStats *stats = nullptr) {
    for (const auto &part : parts) {
        detail::InnerProgram program{part.ops, {}, {}};
        detail::run_part(amps, part, program, stats);
    }
}

inline StateVector execute_hierarchical(const Circuit &circuit, const PartitionResult &partition,
                                        ExecStats *stats = nullptr) {
    validate(circuit);
    StateVector sv(circuit.num_qubits);
    std::vector<ExecutablePart> parts;
    parts.reserve(partition.parts.size());
    for (const auto &part : partition.parts) {
        parts.push_back(remap_part(circuit, part));
    }
    execute_parts(sv.amplitudes(), parts, stats);
    return sv;
}

namespace detail {

/// Second-level program for first-level part `index`, in the coordinates of
/// that part's inner vector (slot i = i-th qubit of the parent). A single
/// child spanning the whole parent runs directly, so it adds no gathers.
inline InnerProgram nested_program(const MultiLevelPartition &ml, std::size_t index,
                                   const ExecutablePart &parent) {
    InnerProgram program;
    program.ops = parent.ops;
    const auto &children = ml.level2.at(index);
    if (children.parts.size() == 1 && children.parts[0].qubits.size() == parent.width()) {
        return program;
    }
    for (const auto &child : children.parts) {
        std::vector<GateOp> ops;
        for (const std::size_t local : child.gate_indices) {
            ops.push_back(program.ops.at(local));
        }
        program.sub_parts.push_back(make_executable(child.id, parent.width(), child.qubits, ops));
        const auto &sub = program.sub_parts.back();
        program.sub_plans.emplace_back(parent.width(), sub.map, sub.free_qubits);
    }
    return program;
}

} // namespace detail

inline StateVector execute_multilevel(const Circuit &circuit, const MultiLevelPartition &ml,
                                      ExecStats *stats = nullptr) {
    validate(circuit);
    if (ml.level2.size() != ml.level1.parts.size()) {
        throw Error(ErrorKind::InvalidPartition, "one second-level partition per part required");
    }
    StateVector sv(circuit.num_qubits);
    for (std::size_t i = 0; i < ml.level1.parts.size(); ++i) {
        const ExecutablePart parent = remap_part(circuit, ml.level1.parts[i]);
        const detail::InnerProgram program = detail::nested_program(ml, i, parent);
        detail::run_part(sv.amplitudes(), parent, program, stats);
    }
    return sv;
}

} // namespace hisim
