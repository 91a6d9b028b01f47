#!/usr/bin/env python3
# Copyright 2026 The HiSim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the bundled benchmark circuits in circuits/.

Desk-scale instances of the standard constructions. Output is deterministic.
"""

import argparse
import math
import pathlib
import random


class Builder:
    def __init__(self, n):
        self.n = n
        self.lines = []

    def op(self, name, *qubits, params=()):
        args = ",".join(f"q[{q}]" for q in qubits)
        if params:
            ps = ",".join(repr(float(p)) for p in params)
            self.lines.append(f"{name}({ps}) {args};")
        else:
            self.lines.append(f"{name} {args};")

    def cphase(self, theta, c, t):
        # controlled-u1 as crz plus a phase on the control
        self.op("crz", c, t, params=(theta,))
        self.op("u1", c, params=(theta / 2,))

    def rzz(self, theta, a, b):
        self.op("cx", a, b)
        self.op("rz", b, params=(theta,))
        self.op("cx", a, b)

    def text(self, comment):
        head = [f"// {comment}", "OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{self.n}];"]
        return "\n".join(head + self.lines) + "\n"


def bell():
    b = Builder(2)
    b.op("h", 0)
    b.op("cx", 0, 1)
    return b, "Bell pair"


def cat_state(n):
    b = Builder(n)
    b.op("h", 0)
    for i in range(n - 1):
        b.op("cx", i, i + 1)
    return b, f"GHZ state on {n} qubits"


def bv(n, secret):
    """Ancilla is the last qubit; the oracle is a cx per secret 1-bit."""
    b = Builder(n)
    anc = n - 1
    b.op("x", anc)
    for q in range(n):
        b.op("h", q)
    for q in range(n - 1):
        if secret >> q & 1:
            b.op("cx", q, anc)
    for q in range(n - 1):
        b.op("h", q)
    return b, f"Bernstein-Vazirani, secret {secret:0{n - 1}b} (qubit 0 is the last digit)"


def bv_cz(n, ones):
    """Oracle via h-cz-h on the ancilla; `ones` secret bits set."""
    b = Builder(n)
    anc = n - 1
    b.op("x", anc)
    for q in range(n):
        b.op("h", q)
    for q in range(ones):
        b.op("h", anc)
        b.op("cz", q, anc)
        b.op("h", anc)
    for q in range(n - 1):
        b.op("h", q)
    return b, f"Bernstein-Vazirani, {n - 1} data qubits, secret bits 0..{ones - 1} set"


def qaoa(n, rounds, seed):
    rng = random.Random(seed)
    edges = set()
    for i in range(n):
        edges.add((i, (i + 1) % n))
    while len(edges) < int(1.5 * n):
        a, c = rng.sample(range(n), 2)
        edges.add((min(a, c), max(a, c)))
    edges = sorted((min(e), max(e)) for e in edges)
    b = Builder(n)
    for q in range(n):
        b.op("h", q)
    for _ in range(rounds):
        gamma = rng.uniform(0, math.pi)
        beta = rng.uniform(0, math.pi)
        for a, c in edges:
            b.rzz(2 * gamma, a, c)
        for q in range(n):
            b.op("rx", q, params=(2 * beta,))
    return b, f"QAOA MaxCut, {len(edges)} edges, {rounds} rounds"


def cc(n, false_coin):
    """Counterfeit coin: n - 1 coins plus a balance ancilla."""
    b = Builder(n)
    anc = n - 1
    for q in range(n - 1):
        b.op("h", q)
    for q in range(n - 1):
        b.op("cx", q, anc)
    b.op("x", anc)
    b.op("h", anc)
    b.op("cx", false_coin, anc)
    for q in range(n - 1):
        b.op("h", q)
    return b, f"counterfeit coin, {n - 1} coins, false coin {false_coin}"


def ising(n, steps, seed):
    rng = random.Random(seed)
    b = Builder(n)
    for q in range(n):
        b.op("h", q)
    for _ in range(steps):
        j = rng.uniform(0.1, 1.0)
        h = rng.uniform(0.1, 1.0)
        for q in range(n - 1):
            b.rzz(2 * j, q, q + 1)
        for q in range(n):
            b.op("rx", q, params=(2 * h,))
    return b, f"transverse-field Ising chain, {steps} Trotter steps"


def qft(n):
    b = Builder(n)
    for q in reversed(range(n)):
        b.op("h", q)
        for c in reversed(range(q)):
            b.cphase(math.pi / 2 ** (q - c), c, q)
    for q in range(n // 2):
        b.op("swap", q, n - 1 - q)
    return b, f"quantum Fourier transform on {n} qubits"


def qnn(n, layers, seed):
    rng = random.Random(seed)
    b = Builder(n)
    for _ in range(layers):
        for q in range(n):
            b.op("ry", q, params=(rng.uniform(-math.pi, math.pi),))
            b.op("rz", q, params=(rng.uniform(-math.pi, math.pi),))
        for q in range(n - 1):
            b.op("cx", q, q + 1)
    for q in range(n):
        b.op("ry", q, params=(rng.uniform(-math.pi, math.pi),))
    return b, f"quantum neural network, {layers} entangling layers"


def mcz(b, controls, target, ancillas):
    """Multi-controlled Z via a ccx ladder."""
    b.op("h", target)
    chain = [controls[0]]
    for i, c in enumerate(controls[1:]):
        b.op("ccx", chain[-1], c, ancillas[i])
        chain.append(ancillas[i])
    b.op("cx", chain[-1], target)
    for i in reversed(range(len(controls) - 1)):
        b.op("ccx", chain[i], controls[i + 1], ancillas[i])
    b.op("h", target)


def grover(data, marked, iterations):
    """`data` search qubits, data - 2 ladder ancillas."""
    n = 2 * data - 2
    anc = list(range(data, n))
    b = Builder(n)
    qs = list(range(data))
    for q in qs:
        b.op("h", q)
    for _ in range(iterations):
        for q in qs:
            if not marked >> q & 1:
                b.op("x", q)
        mcz(b, qs[:-1], qs[-1], anc)
        for q in qs:
            if not marked >> q & 1:
                b.op("x", q)
        for q in qs:
            b.op("h", q)
            b.op("x", q)
        mcz(b, qs[:-1], qs[-1], anc)
        for q in qs:
            b.op("x", q)
            b.op("h", q)
    return b, f"Grover search over {data} qubits, marked {marked:0{data}b}"


def qpe(counting, phase):
    n = counting + 1
    target = counting
    b = Builder(n)
    b.op("x", target)
    for q in range(counting):
        b.op("h", q)
    for q in range(counting):
        b.cphase(2 * math.pi * phase * 2 ** q, q, target)
    # inverse QFT on the counting register
    for q in range(counting // 2):
        b.op("swap", q, counting - 1 - q)
    for q in range(counting):
        for c in range(q):
            b.cphase(-math.pi / 2 ** (q - c), c, q)
        b.op("h", q)
    return b, f"quantum phase estimation, {counting} counting qubits, phase {phase}"


def adder(bits, a_val, b_val):
    """Cuccaro ripple-carry: q0 carry-in, a_i = 1 + 2i, b_i = 2 + 2i, carry-out last."""
    n = 2 * bits + 2
    b = Builder(n)
    a = [1 + 2 * i for i in range(bits)]
    bb = [2 + 2 * i for i in range(bits)]
    cout = n - 1
    for i in range(bits):
        if a_val >> i & 1:
            b.op("x", a[i])
        if b_val >> i & 1:
            b.op("x", bb[i])

    def maj(x, y, z):
        b.op("cx", z, y)
        b.op("cx", z, x)
        b.op("ccx", x, y, z)

    def uma(x, y, z):
        b.op("ccx", x, y, z)
        b.op("cx", z, x)
        b.op("cx", x, y)

    maj(0, bb[0], a[0])
    for i in range(1, bits):
        maj(a[i - 1], bb[i], a[i])
    b.op("cx", a[-1], cout)
    for i in reversed(range(1, bits)):
        uma(a[i - 1], bb[i], a[i])
    uma(0, bb[0], a[0])
    return b, f"ripple-carry adder, {bits}-bit, {a_val} + {b_val}"


def suite():
    return {
        "bell": bell(),
        "bv_6": bv(6, 0b10110),
        "bv_30": bv_cz(30, 14),
        "cat_state": cat_state(12),
        "bv": bv(12, 0b10110101101),
        "bv_16": bv(16, 0b110101101011011),
        "qaoa": qaoa(10, 2, 7),
        "cc": cc(12, 5),
        "cc_16": cc(16, 9),
        "ising": ising(10, 3, 11),
        "ising_14": ising(14, 2, 13),
        "qft_12": qft(12),
        "qnn": qnn(8, 3, 17),
        "grover": grover(4, 0b1011, 2),
        "qpe": qpe(8, 0.3125),
        "adder": adder(4, 5, 9),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=pathlib.Path(__file__).resolve().parent.parent / "circuits")
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, (builder, comment) in suite().items():
        (out / f"{name}.qasm").write_text(builder.text(comment))
        print(f"{name:10s} n={builder.n:3d} gates={len(builder.lines)}")


if __name__ == "__main__":
    main()
