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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "support.hpp"

namespace hisim {
namespace {

ErrorKind kind_of(const std::string &text) {
    try {
        parse_qasm(text);
    } catch (const Error &e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error for: " << text;
    return ErrorKind::Io;
}

TEST(Qasm, ParsesMinimalProgram) {
    const Circuit c = parse_qasm("qreg q[2]; h q[0]; cx q[0],q[1];");
    const Circuit expected{2, {{GateKind::H, {0}, {}}, {GateKind::CX, {0, 1}, {}}}};
    EXPECT_EQ(c, expected);
}

TEST(Qasm, HeaderIncludeCommentsAndBarrier) {
    const Circuit c = parse_qasm(R"(// leading comment
OPENQASM 2.0;
include "qelib1.inc";
/* block
   comment */ qreg q[3];
barrier q[0], q[1];
barrier q;
x q[2]; // trailing
)");
    ASSERT_EQ(c.num_qubits, 3u);
    ASSERT_EQ(c.ops.size(), 1u);
    EXPECT_EQ(c.ops[0].kind, GateKind::X);
}

TEST(Qasm, RejectsOutOfRangeQubit) {
    EXPECT_EQ(kind_of("qreg q[1]; h q[5];"), ErrorKind::QubitOutOfRange);
}

TEST(Qasm, RejectsDuplicateQubit) {
    EXPECT_EQ(kind_of("qreg q[2]; cx q[1],q[1];"), ErrorKind::DuplicateQubitInOp);
}

TEST(Qasm, RejectsUnsupportedStatements) {
    for (const char *text : {"qreg q[1]; creg c[1];", "qreg q[1]; creg c[1]; measure q[0] -> c[0];",
                             "qreg q[1]; reset q[0];", "qreg q[1]; foo q[0];",
                             "qreg q[1]; gate g a { h a; }", "qreg q[1]; opaque g a;"}) {
        EXPECT_EQ(kind_of(text), ErrorKind::UnsupportedGate) << text;
    }
}

TEST(Qasm, SyntaxErrorsCarryPosition) {
    try {
        parse_qasm("qreg q[2];\nh q[0]\ncx q[0],q[1];");
        FAIL();
    } catch (const SyntaxError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Syntax);
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.col(), 1u);
    }
    EXPECT_EQ(kind_of("qreg q[2]; h r[0];"), ErrorKind::Syntax);
    EXPECT_EQ(kind_of("h q[0];"), ErrorKind::Syntax);
    EXPECT_EQ(kind_of("qreg q[2]; qreg r[2];"), ErrorKind::Syntax);
    EXPECT_EQ(kind_of("qreg q[2]; rz(1+) q[0];"), ErrorKind::Syntax);
    EXPECT_EQ(kind_of("qreg q[2]; cx q, q[1];"), ErrorKind::Syntax);
    EXPECT_EQ(kind_of("qreg q[2]; /* open"), ErrorKind::Syntax);
    EXPECT_EQ(kind_of(""), ErrorKind::Syntax);
}

TEST(Qasm, ArityAndParameterChecks) {
    EXPECT_EQ(kind_of("qreg q[2]; cx q[0];"), ErrorKind::InvalidQubitCount);
    EXPECT_EQ(kind_of("qreg q[2]; rz q[0];"), ErrorKind::BadParamCount);
    EXPECT_EQ(kind_of("qreg q[2]; h(0.1) q[0];"), ErrorKind::BadParamCount);
    EXPECT_EQ(kind_of("qreg q[0];"), ErrorKind::InvalidQubitCount);
}

TEST(Qasm, EvaluatesAngleExpressions) {
    const Circuit c = parse_qasm(
        "qreg q[1]; rz(pi/2) q[0]; rx(-pi*3/4) q[0]; u3(2^3, sin(pi/2), -(1.5e-1)) q[0];"
        " u1(sqrt(4)+ln(exp(1))) q[0]; ry(cos(0)*tan(0)) q[0];");
    ASSERT_EQ(c.ops.size(), 5u);
    EXPECT_DOUBLE_EQ(c.ops[0].params[0], std::numbers::pi / 2);
    EXPECT_DOUBLE_EQ(c.ops[1].params[0], -std::numbers::pi * 3 / 4);
    EXPECT_DOUBLE_EQ(c.ops[2].params[0], 8.0);
    EXPECT_DOUBLE_EQ(c.ops[2].params[1], 1.0);
    EXPECT_DOUBLE_EQ(c.ops[2].params[2], -0.15);
    EXPECT_DOUBLE_EQ(c.ops[3].params[0], 3.0);
    EXPECT_DOUBLE_EQ(c.ops[4].params[0], 0.0);
}

TEST(Qasm, BroadcastsSingleQubitGates) {
    const Circuit c = parse_qasm("qreg q[3]; h q;");
    ASSERT_EQ(c.ops.size(), 3u);
    for (Qubit q = 0; q < 3; ++q) {
        EXPECT_EQ(c.ops[q].qubits, std::vector<Qubit>{q});
    }
}

TEST(Qasm, AcceptsAliases) {
    const Circuit c = parse_qasm("qreg q[1]; u(1,2,3) q[0]; p(0.5) q[0];");
    EXPECT_EQ(c.ops[0].kind, GateKind::U3);
    EXPECT_EQ(c.ops[1].kind, GateKind::U1);
}

TEST(Qasm, EveryGateKindParses) {
    for (const auto &info : kGateTable) {
        std::string text = "qreg q[3]; " + std::string(info.name);
        if (info.num_params > 0) {
            text += "(";
            for (std::size_t i = 0; i < info.num_params; ++i) {
                text += (i ? "," : "") + std::to_string(0.25 * static_cast<double>(i + 1));
            }
            text += ")";
        }
        for (std::size_t i = 0; i < info.arity; ++i) {
            text += (i ? ", q[" : " q[") + std::to_string(i) + "]";
        }
        text += ";";
        const Circuit c = parse_qasm(text);
        ASSERT_EQ(c.ops.size(), 1u) << text;
        EXPECT_EQ(c.ops[0].kind, info.kind);
        EXPECT_EQ(c.ops[0].qubits.size(), info.arity);
        EXPECT_EQ(c.ops[0].params.size(), info.num_params);
    }
}

TEST(Qasm, BundledBv30HasTableCounts) {
    const Circuit c = testing::bundled("bv_30");
    EXPECT_EQ(c.num_qubits, 30u);
    EXPECT_EQ(c.ops.size(), 102u);
}

TEST(Qasm, AllBundledCircuitsParseAndValidate) {
    for (const auto &entry : std::filesystem::directory_iterator(testing::source_dir() / "circuits")) {
        if (entry.path().extension() != ".qasm") continue;
        const Circuit c = load_qasm_file(entry.path().string());
        EXPECT_NO_THROW(validate(c)) << entry.path();
        EXPECT_FALSE(c.ops.empty()) << entry.path();
    }
}

TEST(Qasm, MissingFileIsIoError) {
    try {
        load_qasm_file("/nonexistent/file.qasm");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

TEST(Qasm, RoundTripRandomCircuits) {
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng(42, s);
        const Circuit c = testing::random_circuit(rng, 3 + rng.below(8), rng.below(60));
        const std::string text = to_qasm(c);
        EXPECT_EQ(parse_qasm(text), c) << text;
        EXPECT_EQ(to_qasm(parse_qasm(text)), text);
    }
}

TEST(Qasm, RoundTripBundled) {
    for (const char *name : {"qft_12", "grover", "adder", "qaoa"}) {
        const Circuit c = testing::bundled(name);
        EXPECT_EQ(parse_qasm(to_qasm(c)), c) << name;
    }
}

TEST(Qasm, CanonicalFormIsOneStatementPerLine) {
    const Circuit c{2, {{GateKind::RZ, {1}, {0.5}}, {GateKind::CX, {0, 1}, {}}}};
    EXPECT_EQ(to_qasm(c), "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\nrz(0.5) q[1];\ncx q[0],q[1];\n");
}

TEST(Circuit, ValidateExamples) {
    EXPECT_NO_THROW(validate(Circuit{2, {{GateKind::H, {0}, {}}}}));
    try {
        validate(Circuit{2, {{GateKind::CX, {1, 1}, {}}}});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::DuplicateQubitInOp);
    }
    try {
        validate(Circuit{0, {}});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidQubitCount);
    }
    const Circuit ok{3, {{GateKind::CCX, {0, 1, 2}, {}}}};
    validate(ok);
    EXPECT_NO_THROW(validate(ok));
}

TEST(Circuit, GateTableShape) {
    for (std::size_t i = 0; i < kGateTable.size(); ++i) {
        const auto &info = kGateTable[i];
        EXPECT_EQ(static_cast<std::size_t>(info.kind), i);
        EXPECT_GE(info.arity, 1u);
        EXPECT_LE(info.arity, 3u);
        EXPECT_LE(info.num_params, 3u);
        EXPECT_EQ(gate_kind_from_name(info.name), info.kind);
    }
}

} // namespace
} // namespace hisim
