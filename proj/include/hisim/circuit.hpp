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
 * Gate-list IR shared by every other module: gate kinds with their fixed
 * arity/parameter counts, single gate applications and whole circuits.
 *
 * Qubit indices are 0-based with little-endian significance: qubit i is bit i
 * of an amplitude index.
 */

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hisim/error.hpp"

namespace hisim {

using Qubit = std::size_t;

enum class GateKind {
    H, X, Y, Z, S, T, Sdg, Tdg,
    RX, RY, RZ, U1, U3,
    CX, CZ, CRZ, CRY, SWAP,
    CCX,
};

struct GateInfo {
    GateKind kind;
    std::string_view name;
    std::size_t arity;
    std::size_t num_params;
    /// Leading qubits that act purely as controls (the rest are targets).
    std::size_t num_controls;
};

inline constexpr std::array<GateInfo, 19> kGateTable{{
    {GateKind::H, "h", 1, 0, 0},
    {GateKind::X, "x", 1, 0, 0},
    {GateKind::Y, "y", 1, 0, 0},
    {GateKind::Z, "z", 1, 0, 0},
    {GateKind::S, "s", 1, 0, 0},
    {GateKind::T, "t", 1, 0, 0},
    {GateKind::Sdg, "sdg", 1, 0, 0},
    {GateKind::Tdg, "tdg", 1, 0, 0},
    {GateKind::RX, "rx", 1, 1, 0},
    {GateKind::RY, "ry", 1, 1, 0},
    {GateKind::RZ, "rz", 1, 1, 0},
    {GateKind::U1, "u1", 1, 1, 0},
    {GateKind::U3, "u3", 1, 3, 0},
    {GateKind::CX, "cx", 2, 0, 1},
    {GateKind::CZ, "cz", 2, 0, 1},
    {GateKind::CRZ, "crz", 2, 1, 1},
    {GateKind::CRY, "cry", 2, 1, 1},
    {GateKind::SWAP, "swap", 2, 0, 0},
    {GateKind::CCX, "ccx", 3, 0, 2},
}};

constexpr const GateInfo &gate_info(GateKind kind) {
    return kGateTable[static_cast<std::size_t>(kind)];
}

constexpr std::size_t arity(GateKind kind) { return gate_info(kind).arity; }
constexpr std::size_t param_count(GateKind kind) {
    return gate_info(kind).num_params;
}
constexpr std::string_view gate_name(GateKind kind) {
    return gate_info(kind).name;
}

/// Looks up a lowercase gate name. `u` and `p` are accepted as the OpenQASM
/// 3 / qiskit spellings of u3 and u1.
inline std::optional<GateKind> gate_kind_from_name(std::string_view name) {
    if (name == "u") {
        return GateKind::U3;
    }
    if (name == "p") {
        return GateKind::U1;
    }
    for (const auto &info : kGateTable) {
        if (info.name == name) {
            return info.kind;
        }
    }
    return std::nullopt;
}

struct GateOp {
    GateKind kind{GateKind::H};
    std::vector<Qubit> qubits;
    std::vector<double> params;

    friend bool operator==(const GateOp &, const GateOp &) = default;
};

struct Circuit {
    std::size_t num_qubits{0};
    std::vector<GateOp> ops;

    friend bool operator==(const Circuit &, const Circuit &) = default;
};

/// Checks one op against the circuit width. Shared by the parser so both
/// paths report the same error kinds.
inline void validate_op(const GateOp &op, std::size_t num_qubits) {
    const auto &info = gate_info(op.kind);
    if (op.qubits.size() != info.arity) {
        throw Error(ErrorKind::InvalidQubitCount,
                    std::string(info.name) + " expects " +
                        std::to_string(info.arity) + " qubit(s), got " +
                        std::to_string(op.qubits.size()));
    }
    if (op.params.size() != info.num_params) {
        throw Error(ErrorKind::BadParamCount,
                    std::string(info.name) + " expects " +
                        std::to_string(info.num_params) +
                        " parameter(s), got " +
                        std::to_string(op.params.size()));
    }
    for (std::size_t i = 0; i < op.qubits.size(); ++i) {
        if (op.qubits[i] >= num_qubits) {
            throw Error(ErrorKind::QubitOutOfRange,
                        std::to_string(op.qubits[i]));
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (op.qubits[i] == op.qubits[j]) {
                throw Error(ErrorKind::DuplicateQubitInOp,
                            std::string(info.name) + " uses qubit " +
                                std::to_string(op.qubits[i]) + " twice");
            }
        }
    }
}

inline void validate(const Circuit &circuit) {
    if (circuit.num_qubits == 0) {
        throw Error(ErrorKind::InvalidQubitCount,
                    "circuit must have at least one qubit");
    }
    for (const auto &op : circuit.ops) {
        validate_op(op, circuit.num_qubits);
    }
}

/// Largest gate arity in the circuit, 0 for an empty circuit.
inline std::size_t max_arity(const Circuit &circuit) {
    std::size_t result = 0;
    for (const auto &op : circuit.ops) {
        result = std::max(result, op.qubits.size());
    }
    return result;
}

/// The op that undoes `op`.
inline GateOp inverse(const GateOp &op) {
    GateOp inv = op;
    switch (op.kind) {
        case GateKind::S: inv.kind = GateKind::Sdg; break;
        case GateKind::Sdg: inv.kind = GateKind::S; break;
        case GateKind::T: inv.kind = GateKind::Tdg; break;
        case GateKind::Tdg: inv.kind = GateKind::T; break;
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
        case GateKind::U1:
        case GateKind::CRZ:
        case GateKind::CRY:
            inv.params[0] = -op.params[0];
            break;
        case GateKind::U3:
            // U3(t,p,l)^-1 = U3(-t,-l,-p)
            inv.params = {-op.params[0], -op.params[2], -op.params[1]};
            break;
        default: break;
    }
    return inv;
}

namespace detail {

inline std::string format_angle(double value) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) {
        return std::to_string(value);
    }
    return std::string(buf.data(), end);
}

} // namespace detail

/// One canonical statement, without the trailing newline.
inline std::string to_qasm(const GateOp &op) {
    std::string out(gate_name(op.kind));
    if (!op.params.empty()) {
        out += '(';
        for (std::size_t i = 0; i < op.params.size(); ++i) {
            if (i != 0) {
                out += ',';
            }
            out += detail::format_angle(op.params[i]);
        }
        out += ')';
    }
    for (std::size_t i = 0; i < op.qubits.size(); ++i) {
        out += (i == 0) ? " " : ",";
        out += "q[" + std::to_string(op.qubits[i]) + "]";
    }
    out += ';';
    return out;
}

/// Canonical text form: one statement per line, lowercase gate names, the
/// register always named `q`. Angles use the shortest round-tripping
/// decimal, so parse(to_qasm(c)) == c bit-exactly.
inline std::string to_qasm(const Circuit &circuit) {
    std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
    out += "qreg q[" + std::to_string(circuit.num_qubits) + "];\n";
    for (const auto &op : circuit.ops) {
        out += to_qasm(op);
        out += '\n';
    }
    return out;
}

} // namespace hisim
