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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace hisim::bits {

using Index = std::uint64_t;

constexpr Index bit(std::size_t pos) { return Index{1} << pos; }

constexpr bool test(Index value, std::size_t pos) { return (value >> pos) & 1U; }

/// Inserts a zero bit at each position of `sorted_positions` (ascending),
/// shifting higher bits up. Enumerating x over [0, 2^(n-k)) therefore visits
/// every n-bit index whose listed bits are clear, in increasing order.
inline Index insert_zero_bits(Index x, std::span<const std::size_t> sorted_positions) {
    for (const std::size_t p : sorted_positions) {
        const Index low = x & (bit(p) - 1);
        x = ((x >> p) << (p + 1)) | low;
    }
    return x;
}

/// Scatters the low bits of `packed` to `positions` (any order): bit j of
/// `packed` lands at bit positions[j] of the result.
inline Index deposit(Index packed, std::span<const std::size_t> positions) {
    Index out = 0;
    for (std::size_t j = 0; j < positions.size(); ++j) {
        out |= ((packed >> j) & 1U) << positions[j];
    }
    return out;
}

/// Inverse of deposit: collects bit positions[j] of `value` into bit j.
inline Index extract(Index value, std::span<const std::size_t> positions) {
    Index out = 0;
    for (std::size_t j = 0; j < positions.size(); ++j) {
        out |= ((value >> positions[j]) & 1U) << j;
    }
    return out;
}

} // namespace hisim::bits
