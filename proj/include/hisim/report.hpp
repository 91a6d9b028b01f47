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
 * Run reports: a summary of one simulation, serialized as JSON.
 *
 * Schema:
 * {
 *   "circuit": str, "num_qubits": int, "num_gates": int,
 *   "mode": "flat" | "hierarchical" | "multilevel" | "distributed",
 *   "strategy": str | null, "limit": int | null, "limit2": int | null,
 *   "process_qubits": int | null,
 *   "num_parts": int,
 *   "parts": [{"id": int, "qubits": [int], "working_set": int, "gates": int}],
 *   "comm": CommStats | null,
 *   "wall_time_s": float, "footprint_bytes": int,
 *   "max_abs_diff": float | null,
 *   "norm": float,
 *   "probabilities": {bitstring: float}
 * }
 *
 * Bitstrings list qubit n-1 first. Only probabilities above
 * kReportProbabilityFloor appear, at most kReportMaxProbabilities of them
 * (the largest).
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hisim/dist_sim.hpp"
#include "hisim/partition.hpp"
#include "hisim/statevector.hpp"

namespace hisim {

inline constexpr double kReportProbabilityFloor = 1e-12;
inline constexpr std::size_t kReportMaxProbabilities = 1024;

struct PartSummary {
    std::size_t id{0};
    std::vector<Qubit> qubits;
    std::size_t gates{0};
};

struct RunReport {
    std::string circuit;
    std::size_t num_qubits{0};
    std::size_t num_gates{0};
    std::string mode;
    std::optional<std::string> strategy;
    std::optional<std::size_t> limit;
    std::optional<std::size_t> limit2;
    std::optional<std::size_t> process_qubits;
    std::vector<PartSummary> parts;
    std::optional<CommStats> comm;
    double wall_time_s{0.0};
    std::uint64_t footprint_bytes{0};
    std::optional<double> max_abs_diff;
    double norm{0.0};
    std::vector<std::pair<std::uint64_t, double>> probabilities;
};

inline std::vector<PartSummary> summarize_parts(const PartitionResult &partition) {
    std::vector<PartSummary> out;
    for (const auto &p : partition.parts) {
        out.push_back({p.id, p.qubits, p.gate_indices.size()});
    }
    return out;
}

/// Largest probabilities above the report floor, in ascending index order.
inline std::vector<std::pair<std::uint64_t, double>> significant_probabilities(const StateVector &sv) {
    std::vector<std::pair<std::uint64_t, double>> out;
    const auto probs = sv.probabilities();
    for (std::uint64_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > kReportProbabilityFloor) {
            out.emplace_back(i, probs[i]);
        }
    }
    if (out.size() > kReportMaxProbabilities) {
        std::stable_sort(out.begin(), out.end(),
                         [](const auto &a, const auto &b) { return a.second > b.second; });
        out.resize(kReportMaxProbabilities);
        std::sort(out.begin(), out.end());
    }
    return out;
}

inline std::string bitstring(std::uint64_t index, std::size_t num_qubits) {
    std::string s(num_qubits, '0');
    for (std::size_t q = 0; q < num_qubits; ++q) {
        if ((index >> q) & 1U) {
            s[num_qubits - 1 - q] = '1';
        }
    }
    return s;
}

inline nlohmann::json report_to_json(const RunReport &r) {
    auto opt = [](const auto &v) -> nlohmann::json {
        if (v) return *v;
        return nullptr;
    };
    nlohmann::json parts = nlohmann::json::array();
    for (const auto &p : r.parts) {
        parts.push_back({{"id", p.id},
                         {"qubits", p.qubits},
                         {"working_set", p.qubits.size()},
                         {"gates", p.gates}});
    }
    nlohmann::json probs = nlohmann::json::object();
    for (const auto &[index, p] : r.probabilities) {
        probs[bitstring(index, r.num_qubits)] = p;
    }
    return {{"circuit", r.circuit},
            {"num_qubits", r.num_qubits},
            {"num_gates", r.num_gates},
            {"mode", r.mode},
            {"strategy", opt(r.strategy)},
            {"limit", opt(r.limit)},
            {"limit2", opt(r.limit2)},
            {"process_qubits", opt(r.process_qubits)},
            {"num_parts", r.parts.size()},
            {"parts", std::move(parts)},
            {"comm", r.comm ? comm_stats_to_json(*r.comm) : nlohmann::json(nullptr)},
            {"wall_time_s", r.wall_time_s},
            {"footprint_bytes", r.footprint_bytes},
            {"max_abs_diff", opt(r.max_abs_diff)},
            {"norm", r.norm},
            {"probabilities", std::move(probs)}};
}

/// Schema problems in a report document; empty when it conforms.
inline std::vector<std::string> report_schema_violations(const nlohmann::json &j) {
    std::vector<std::string> problems;
    auto need = [&](const char *key, auto check, const char *what) {
        if (!j.contains(key)) {
            problems.push_back(std::string("missing ") + key);
        } else if (!check(j.at(key))) {
            problems.push_back(std::string(key) + " is not " + what);
        }
    };
    auto is_uint = [](const nlohmann::json &v) { return v.is_number_unsigned(); };
    auto is_num = [](const nlohmann::json &v) { return v.is_number(); };
    auto uint_or_null = [](const nlohmann::json &v) { return v.is_null() || v.is_number_unsigned(); };
    auto num_or_null = [](const nlohmann::json &v) { return v.is_null() || v.is_number(); };
    if (!j.is_object()) {
        return {"report is not an object"};
    }
    need("circuit", [](const nlohmann::json &v) { return v.is_string(); }, "a string");
    need("num_qubits", is_uint, "an unsigned integer");
    need("num_gates", is_uint, "an unsigned integer");
    need("mode",
         [](const nlohmann::json &v) {
             return v.is_string() && (v == "flat" || v == "hierarchical" || v == "multilevel" ||
                                      v == "distributed");
         },
         "a known mode");
    need("strategy", [](const nlohmann::json &v) { return v.is_null() || v.is_string(); },
         "a string or null");
    need("limit", uint_or_null, "an unsigned integer or null");
    need("limit2", uint_or_null, "an unsigned integer or null");
    need("process_qubits", uint_or_null, "an unsigned integer or null");
    need("num_parts", is_uint, "an unsigned integer");
    need("wall_time_s", is_num, "a number");
    need("footprint_bytes", is_uint, "an unsigned integer");
    need("max_abs_diff", num_or_null, "a number or null");
    need("norm", is_num, "a number");
    need("comm", [](const nlohmann::json &v) { return v.is_null() || v.is_object(); },
         "an object or null");
    need("probabilities", [](const nlohmann::json &v) { return v.is_object(); }, "an object");
    need("parts", [](const nlohmann::json &v) { return v.is_array(); }, "an array");
    if (!problems.empty()) {
        return problems;
    }
    std::uint64_t gate_sum = 0;
    for (const auto &p : j.at("parts")) {
        if (!p.is_object() || !p.contains("id") || !p.contains("qubits") ||
            !p.contains("working_set") || !p.contains("gates") || !p.at("gates").is_number_unsigned() ||
            !p.at("qubits").is_array()) {
            problems.push_back("malformed part entry");
            continue;
        }
        gate_sum += p.at("gates").get<std::uint64_t>();
    }
    if (j.at("num_parts") != j.at("parts").size()) {
        problems.push_back("num_parts does not match parts");
    }
    if (!j.at("parts").empty() && gate_sum != j.at("num_gates").get<std::uint64_t>()) {
        problems.push_back("part gate counts do not sum to num_gates");
    }
    const auto n = j.at("num_qubits").get<std::size_t>();
    for (const auto &[key, value] : j.at("probabilities").items()) {
        if (key.size() != n || key.find_first_not_of("01") != std::string::npos || !value.is_number()) {
            problems.push_back("bad probability entry " + key);
        }
    }
    if (j.at("mode") == "distributed") {
        const auto &c = j.at("comm");
        if (!c.is_object() || !c.contains("parts") || !c.contains("switches") || !c.contains("totals")) {
            problems.push_back("distributed report needs comm {parts, switches, totals}");
        }
    }
    return problems;
}

} // namespace hisim
