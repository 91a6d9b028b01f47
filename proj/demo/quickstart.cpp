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

// Library walkthrough: parse, partition three ways, execute
// hierarchically and on emulated ranks, and compare with flat simulation.

#include <cstdio>

#include "hisim/hisim.hpp"

int main() {
    const hisim::Circuit circuit = hisim::parse_qasm(R"(
        OPENQASM 2.0;
        include "qelib1.inc";
        qreg q[6];
        h q;
        cx q[0], q[1];
        cx q[1], q[2];
        rz(pi/3) q[2];
        cx q[3], q[4];
        ccx q[2], q[4], q[5];
        crz(pi/5) q[5], q[0];
        u3(0.1, 0.2, 0.3) q[3];
        swap q[1], q[4];
    )");
    const hisim::GateDag dag = hisim::build_dag(circuit);
    const std::size_t limit = 3;

    const auto nat = hisim::partition_nat(dag, limit);
    const auto dfs = hisim::partition_dfs(dag, limit, 16, 1);
    const auto dagp = hisim::partition_dagp(dag, limit);
    std::printf("parts at limit %zu: nat %zu, dfs %zu, dagp %zu\n", limit, nat.num_parts(),
                dfs.num_parts(), dagp.num_parts());

    const hisim::StateVector flat = hisim::simulate_flat(circuit);

    hisim::ExecStats stats;
    const hisim::StateVector hier = hisim::execute_hierarchical(circuit, dagp, &stats);
    std::printf("hierarchical: %llu gathers, max |delta| %.2e\n",
                static_cast<unsigned long long>(stats.gathers), hisim::max_abs_diff(hier, flat));

    const auto dist = hisim::simulate_distributed(circuit, dagp, 2);
    std::printf("4 ranks: %zu switches, %llu remote bytes, max |delta| %.2e\n",
                dist.comm.switches.size(), static_cast<unsigned long long>(dist.comm.total_remote()),
                hisim::max_abs_diff(dist.state, flat));
    return 0;
}
