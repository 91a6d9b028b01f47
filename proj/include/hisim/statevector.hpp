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
 * Flat state-vector kernel: gate matrices, strided in-place gate
 * application and the plain one-gate-at-a-time simulator that every
 * hierarchical mode is checked against.
 *
 * A single-qubit gate on qubit i updates the 2^(n-1) amplitude pairs
 * (j, j + 2^i) with bit i of j clear; controls restrict the update to indices
 * whose control bits are all set. Each pair update reads and writes 32 bytes
 * for 28 flops, an operational intensity of 7/16 flop/byte, which is why the
 * kernel is bandwidth bound once the vector leaves cache.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hisim/bits.hpp"
#include "hisim/circuit.hpp"
#include "hisim/error.hpp"

namespace hisim {

using Amplitude = std::complex<double>;

/// Dense row-major d x d matrix, d = 2^arity. Row/column index bit j
/// corresponds to op.qubits[j].
struct GateMatrix {
    std::size_t dim{0};
    std::vector<Amplitude> entries;

    Amplitude operator()(std::size_t row, std::size_t col) const {
        return entries[row * dim + col];
    }
    Amplitude &operator()(std::size_t row, std::size_t col) {
        return entries[row * dim + col];
    }
};

using Matrix2 = std::array<Amplitude, 4>;

namespace detail {

inline Matrix2 target_matrix(GateKind kind, std::span<const double> params) {
    using namespace std::complex_literals;
    const double r = std::numbers::sqrt2 / 2.0;
    switch (kind) {
        case GateKind::H: return {r, r, r, -r};
        case GateKind::X:
        case GateKind::CX:
        case GateKind::CCX:
            return {0.0, 1.0, 1.0, 0.0};
        case GateKind::Y: return {0.0, -1i, 1i, 0.0};
        case GateKind::Z:
        case GateKind::CZ:
            return {1.0, 0.0, 0.0, -1.0};
        case GateKind::S: return {1.0, 0.0, 0.0, 1i};
        case GateKind::Sdg: return {1.0, 0.0, 0.0, -1i};
        case GateKind::T: return {1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi / 4)};
        case GateKind::Tdg: return {1.0, 0.0, 0.0, std::polar(1.0, -std::numbers::pi / 4)};
        case GateKind::RX: {
            const double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
            return {c, -1i * s, -1i * s, c};
        }
        case GateKind::RY:
        case GateKind::CRY: {
            const double c = std::cos(params[0] / 2), s = std::sin(params[0] / 2);
            return {c, -s, s, c};
        }
        case GateKind::RZ:
        case GateKind::CRZ:
            return {std::polar(1.0, -params[0] / 2), 0.0, 0.0,
                    std::polar(1.0, params[0] / 2)};
        case GateKind::U1: return {1.0, 0.0, 0.0, std::polar(1.0, params[0])};
        case GateKind::U3: {
            const double theta = params[0], phi = params[1], lambda = params[2];
            const double c = std::cos(theta / 2), s = std::sin(theta / 2);
            return {c, -std::polar(s, lambda), std::polar(s, phi),
                    std::polar(c, phi + lambda)};
        }
        case GateKind::SWAP: break;
    }
    return {1.0, 0.0, 0.0, 1.0};
}

inline void check_params(GateKind kind, std::span<const double> params) {
    if (params.size() != param_count(kind)) {
        throw Error(ErrorKind::BadParamCount,
                    std::string(gate_name(kind)) + " expects " +
                        std::to_string(param_count(kind)) + " parameter(s), got " +
                        std::to_string(params.size()));
    }
}

} // namespace detail

/// Full unitary of a gate in the local basis of its qubit list.
inline GateMatrix gate_matrix(GateKind kind, std::span<const double> params) {
    detail::check_params(kind, params);
    const auto &info = gate_info(kind);
    const std::size_t dim = std::size_t{1} << info.arity;
    GateMatrix m{dim, std::vector<Amplitude>(dim * dim, 0.0)};
    if (kind == GateKind::SWAP) {
        m(0, 0) = m(3, 3) = 1.0;
        m(1, 2) = m(2, 1) = 1.0;
        return m;
    }
    const Matrix2 u = detail::target_matrix(kind, params);
    const std::size_t control_mask = (std::size_t{1} << info.num_controls) - 1;
    const std::size_t target_bit = std::size_t{1} << info.num_controls;
    for (std::size_t col = 0; col < dim; ++col) {
        if ((col & control_mask) != control_mask) {
            m(col, col) = 1.0;
            continue;
        }
        const std::size_t in = (col & target_bit) ? 1 : 0;
        for (std::size_t out = 0; out < 2; ++out) {
            const std::size_t row = (col & ~target_bit) | (out ? target_bit : 0);
            m(row, col) = u[out * 2 + in];
        }
    }
    return m;
}

inline GateMatrix gate_matrix(const GateOp &op) { return gate_matrix(op.kind, op.params); }

/// max |(U U^dagger - I)_ij|
inline double unitarity_error(const GateMatrix &m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.dim; ++i) {
        for (std::size_t j = 0; j < m.dim; ++j) {
            Amplitude acc = 0.0;
            for (std::size_t k = 0; k < m.dim; ++k) {
                acc += m(i, k) * std::conj(m(j, k));
            }
            worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

/// Applies `op` in place to a raw amplitude block of `num_qubits` qubits.
/// This is the kernel shared by the flat simulator and by the inner vectors
/// of the hierarchical executors. Qubit bounds are the caller's problem.
inline void apply_gate(std::span<Amplitude> amps, std::size_t num_qubits, const GateOp &op) {
    const auto &info = gate_info(op.kind);
    std::array<std::size_t, 3> sorted{};
    std::copy(op.qubits.begin(), op.qubits.end(), sorted.begin());
    std::sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(info.arity));
    const std::span<const std::size_t> positions(sorted.data(), info.arity);
    const auto iterations = static_cast<std::int64_t>(bits::bit(num_qubits - info.arity));

    if (op.kind == GateKind::SWAP) {
        const bits::Index b0 = bits::bit(op.qubits[0]);
        const bits::Index b1 = bits::bit(op.qubits[1]);
#pragma omp parallel for if (num_qubits >= 16)
        for (std::int64_t k = 0; k < iterations; ++k) {
            const bits::Index base = bits::insert_zero_bits(static_cast<bits::Index>(k), positions);
            std::swap(amps[base | b0], amps[base | b1]);
        }
        return;
    }

    bits::Index control_mask = 0;
    for (std::size_t c = 0; c < info.num_controls; ++c) {
        control_mask |= bits::bit(op.qubits[c]);
    }
    const bits::Index stride = bits::bit(op.qubits[info.num_controls]);
    const Matrix2 u = detail::target_matrix(op.kind, op.params);
#pragma omp parallel for if (num_qubits >= 16)
    for (std::int64_t k = 0; k < iterations; ++k) {
        const bits::Index i0 =
            bits::insert_zero_bits(static_cast<bits::Index>(k), positions) | control_mask;
        const bits::Index i1 = i0 | stride;
        const Amplitude a0 = amps[i0];
        const Amplitude a1 = amps[i1];
        amps[i0] = u[0] * a0 + u[1] * a1;
        amps[i1] = u[2] * a0 + u[3] * a1;
    }
}

/// Dense application of an arbitrary matrix over `qubits` (index bit j of the
/// matrix <-> qubits[j]). Slow; used as an independent route in tests.
inline void apply_matrix(std::span<Amplitude> amps, std::size_t num_qubits,
                         std::span<const Qubit> qubits, const GateMatrix &m) {
    std::vector<std::size_t> sorted(qubits.begin(), qubits.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<Amplitude> local(m.dim);
    const bits::Index iterations = bits::bit(num_qubits - qubits.size());
    for (bits::Index k = 0; k < iterations; ++k) {
        const bits::Index base = bits::insert_zero_bits(k, sorted);
        for (std::size_t c = 0; c < m.dim; ++c) {
            local[c] = amps[base | bits::deposit(c, qubits)];
        }
        for (std::size_t r = 0; r < m.dim; ++r) {
            Amplitude acc = 0.0;
            for (std::size_t c = 0; c < m.dim; ++c) {
                acc += m(r, c) * local[c];
            }
            amps[base | bits::deposit(r, qubits)] = acc;
        }
    }
}

inline constexpr std::size_t kHardMaxQubits = 30;
inline constexpr std::size_t kDefaultMaxQubits = 24;

/// Materialization cap: HISIM_MAX_QUBITS if set (clamped to 30), else 24.
inline std::size_t max_qubits() {
    if (const char *env = std::getenv("HISIM_MAX_QUBITS")) {
        char *end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return std::min<std::size_t>(v, kHardMaxQubits);
        }
    }
    return kDefaultMaxQubits;
}

/// Bytes needed for 2^n complex doubles: 2^(n+4).
constexpr std::uint64_t footprint_bytes(std::size_t num_qubits) {
    return std::uint64_t{1} << (num_qubits + 4);
}

class StateVector {
  public:
    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(std::size_t num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits < 1 || num_qubits > max_qubits()) {
            throw Error(ErrorKind::QubitCountOutOfRange,
                        std::to_string(num_qubits) + " qubits (cap " +
                            std::to_string(max_qubits()) + ")");
        }
        amps_.assign(std::size_t{1} << num_qubits, 0.0);
        amps_[0] = 1.0;
    }

    StateVector(std::size_t num_qubits, std::vector<Amplitude> amplitudes)
        : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
        if (num_qubits > kHardMaxQubits || amps_.size() != (std::size_t{1} << num_qubits)) {
            throw Error(ErrorKind::QubitCountOutOfRange,
                        "amplitude count does not match 2^" + std::to_string(num_qubits));
        }
    }

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amps_.size(); }
    [[nodiscard]] std::uint64_t footprint() const noexcept { return footprint_bytes(num_qubits_); }

    [[nodiscard]] std::span<Amplitude> amplitudes() noexcept { return amps_; }
    [[nodiscard]] std::span<const Amplitude> amplitudes() const noexcept { return amps_; }

    Amplitude &operator[](std::size_t i) { return amps_[i]; }
    const Amplitude &operator[](std::size_t i) const { return amps_[i]; }

    [[nodiscard]] double norm_squared() const {
        double acc = 0.0;
        for (const auto &a : amps_) {
            acc += std::norm(a);
        }
        return acc;
    }

    [[nodiscard]] std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        std::transform(amps_.begin(), amps_.end(), p.begin(),
                       [](const Amplitude &a) { return std::norm(a); });
        return p;
    }

    void apply(const GateOp &op) {
        for (const Qubit q : op.qubits) {
            if (q >= num_qubits_) {
                throw Error(ErrorKind::QubitOutOfRange, std::to_string(q));
            }
        }
        apply_gate(amps_, num_qubits_, op);
    }

    friend bool operator==(const StateVector &, const StateVector &) = default;

  private:
    std::size_t num_qubits_;
    std::vector<Amplitude> amps_;
};

inline StateVector zero_state(std::size_t num_qubits) { return StateVector(num_qubits); }

inline void apply_gate(StateVector &sv, const GateOp &op) { sv.apply(op); }

/// Reference simulator: every op in program order against one flat vector.
inline StateVector simulate_flat(const Circuit &circuit) {
    validate(circuit);
    StateVector sv(circuit.num_qubits);
    for (const auto &op : circuit.ops) {
        apply_gate(sv.amplitudes(), circuit.num_qubits, op);
    }
    return sv;
}

/// Elementwise max |a_i - b_i|; infinity when the sizes differ.
inline double max_abs_diff(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    if (a.size() != b.size()) {
        return INFINITY;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

inline double max_abs_diff(const StateVector &a, const StateVector &b) {
    return max_abs_diff(a.amplitudes(), b.amplitudes());
}

/// Writes the raw dump (little-endian (re, im) float64 pairs) to `path` and
/// a JSON sidecar {num_qubits, norm} to `path + ".json"`.
inline void dump_state(const StateVector &sv, const std::string &path) {
    static_assert(sizeof(Amplitude) == 16);
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw Error(ErrorKind::Io, "cannot write " + path);
        }
        // std::complex<double> is layout-compatible with double[2]; the
        // supported targets are all little-endian.
        out.write(reinterpret_cast<const char *>(sv.amplitudes().data()),
                  static_cast<std::streamsize>(sv.size() * sizeof(Amplitude)));
    }
    std::ofstream side(path + ".json");
    if (!side) {
        throw Error(ErrorKind::Io, "cannot write " + path + ".json");
    }
    side << nlohmann::json{{"num_qubits", sv.num_qubits()},
                           {"norm", std::sqrt(sv.norm_squared())}}
                .dump(2)
         << '\n';
}

inline StateVector load_state(const std::string &path) {
    std::ifstream side(path + ".json");
    if (!side) {
        throw Error(ErrorKind::Io, "cannot read " + path + ".json");
    }
    const auto meta = nlohmann::json::parse(side);
    const auto n = meta.at("num_qubits").get<std::size_t>();
    if (n > kHardMaxQubits) {
        throw Error(ErrorKind::QubitCountOutOfRange, std::to_string(n));
    }
    std::vector<Amplitude> amps(std::size_t{1} << n);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot read " + path);
    }
    in.read(reinterpret_cast<char *>(amps.data()),
            static_cast<std::streamsize>(amps.size() * sizeof(Amplitude)));
    if (in.gcount() != static_cast<std::streamsize>(amps.size() * sizeof(Amplitude))) {
        throw Error(ErrorKind::Io, path + " is truncated");
    }
    return StateVector(n, std::move(amps));
}

} // namespace hisim
