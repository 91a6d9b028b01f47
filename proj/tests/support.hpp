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

// Shared helpers for the test binaries.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hisim/hisim.hpp"

#ifndef HISIM_SOURCE_DIR
#define HISIM_SOURCE_DIR "."
#endif

namespace hisim::testing {

inline std::filesystem::path source_dir() { return HISIM_SOURCE_DIR; }

inline std::filesystem::path circuit_path(const std::string &name) {
    return source_dir() / "circuits" / (name + ".qasm");
}

inline Circuit bundled(const std::string &name) { return load_qasm_file(circuit_path(name).string()); }

/// Uniformly random gate from the full gate set, restricted to arity <= n.
inline GateOp random_gate(Rng &rng, std::size_t num_qubits) {
    GateKind kind{};
    do {
        kind = kGateTable[rng.below(kGateTable.size())].kind;
    } while (arity(kind) > num_qubits);
    GateOp op;
    op.kind = kind;
    std::vector<Qubit> pool(num_qubits);
    for (std::size_t i = 0; i < num_qubits; ++i) {
        pool[i] = i;
    }
    rng.shuffle(std::span<Qubit>(pool));
    op.qubits.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(arity(kind)));
    for (std::size_t i = 0; i < param_count(kind); ++i) {
        op.params.push_back((rng.uniform() * 2.0 - 1.0) * 6.283185307179586);
    }
    return op;
}

inline Circuit random_circuit(Rng &rng, std::size_t num_qubits, std::size_t num_gates) {
    Circuit c;
    c.num_qubits = num_qubits;
    for (std::size_t i = 0; i < num_gates; ++i) {
        c.ops.push_back(random_gate(rng, num_qubits));
    }
    return c;
}

/// The shared property corpus: n in [3, 12], up to 150 gates.
inline std::vector<Circuit> random_corpus(std::size_t count, std::uint64_t seed) {
    std::vector<Circuit> corpus;
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(seed, i);
        const std::size_t n = 3 + rng.below(10);
        const std::size_t m = 1 + rng.below(150);
        corpus.push_back(random_circuit(rng, n, m));
    }
    return corpus;
}

/// First `max_gates` ops of a circuit.
inline Circuit truncated(const Circuit &c, std::size_t max_gates) {
    Circuit t;
    t.num_qubits = c.num_qubits;
    t.ops.assign(c.ops.begin(), c.ops.begin() + static_cast<std::ptrdiff_t>(std::min(max_gates, c.ops.size())));
    return t;
}

} // namespace hisim::testing
