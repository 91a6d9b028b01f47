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

#include <gtest/gtest.h>

#include "support.hpp"

namespace hisim {
namespace {

RunReport sample_report(const std::string &mode) {
    const Circuit c = testing::bundled("bv_6");
    const PartitionResult p = partition_dagp(build_dag(c), 4);
    RunReport r;
    r.circuit = "bv_6";
    r.num_qubits = c.num_qubits;
    r.num_gates = c.ops.size();
    r.mode = mode;
    r.strategy = "dagp";
    r.limit = 4;
    r.parts = summarize_parts(p);
    if (mode == "distributed") {
        r.process_qubits = 1;
        const DistributedResult d = simulate_distributed(c, p, 1);
        r.comm = d.comm;
    }
    const StateVector sv = simulate_flat(c);
    r.footprint_bytes = sv.footprint();
    r.norm = std::sqrt(sv.norm_squared());
    r.max_abs_diff = 0.0;
    r.probabilities = significant_probabilities(sv);
    return r;
}

TEST(Report, BitstringListsHighestQubitFirst) {
    EXPECT_EQ(bitstring(0b0001, 4), "0001");
    EXPECT_EQ(bitstring(0b1000, 4), "1000");
    EXPECT_EQ(bitstring(0b110, 3), "110");
    EXPECT_EQ(bitstring(0, 1), "0");
}

TEST(Report, SerializedReportsConform) {
    for (const char *mode : {"hierarchical", "distributed"}) {
        const auto j = report_to_json(sample_report(mode));
        EXPECT_TRUE(report_schema_violations(j).empty()) << j.dump(2);
        EXPECT_EQ(j.at("num_parts"), j.at("parts").size());
    }
}

TEST(Report, FlatReportHasNulls) {
    const StateVector sv = simulate_flat(testing::bundled("bell"));
    RunReport r;
    r.circuit = "bell";
    r.num_qubits = 2;
    r.num_gates = 2;
    r.mode = "flat";
    r.norm = 1.0;
    r.probabilities = significant_probabilities(sv);
    const auto j = report_to_json(r);
    EXPECT_TRUE(report_schema_violations(j).empty());
    EXPECT_TRUE(j.at("strategy").is_null());
    EXPECT_TRUE(j.at("comm").is_null());
    ASSERT_EQ(j.at("probabilities").size(), 2u);
    EXPECT_NEAR(j.at("probabilities").at("00").get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(j.at("probabilities").at("11").get<double>(), 0.5, 1e-12);
}

TEST(Report, SchemaViolationsAreDetected) {
    const auto good = report_to_json(sample_report("distributed"));
    auto missing = good;
    missing.erase("norm");
    EXPECT_FALSE(report_schema_violations(missing).empty());
    auto bad_mode = good;
    bad_mode["mode"] = "quantum";
    EXPECT_FALSE(report_schema_violations(bad_mode).empty());
    auto bad_sum = good;
    bad_sum["num_gates"] = good.at("num_gates").get<std::size_t>() + 1;
    EXPECT_FALSE(report_schema_violations(bad_sum).empty());
    auto bad_key = good;
    bad_key["probabilities"]["012"] = 0.1;
    EXPECT_FALSE(report_schema_violations(bad_key).empty());
    auto no_comm = good;
    no_comm["comm"] = nullptr;
    EXPECT_FALSE(report_schema_violations(no_comm).empty());
    EXPECT_FALSE(report_schema_violations(nlohmann::json::array()).empty());
}

TEST(Report, ProbabilitiesAreFilteredAndCapped) {
    // H on every qubit of 11 qubits: 2048 equal entries, capped to the limit.
    Circuit c{11, {}};
    for (Qubit q = 0; q < 11; ++q) c.ops.push_back({GateKind::H, {q}, {}});
    const auto probs = significant_probabilities(simulate_flat(c));
    EXPECT_EQ(probs.size(), kReportMaxProbabilities);
    EXPECT_TRUE(std::is_sorted(probs.begin(), probs.end()));
    const auto bv = significant_probabilities(simulate_flat(testing::bundled("bv_6")));
    for (const auto &[i, p] : bv) EXPECT_GT(p, kReportProbabilityFloor);
}

} // namespace
} // namespace hisim
