#!/usr/bin/env python3
"""Regenerate the bundled test corpus (crates/core/tests/corpus).

Deterministic: the same seed always produces the same files.
"""
import math
import os
import random
import sys

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'
OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "tests", "corpus")


def ang(rng):
    return f"{rng.uniform(-math.pi, math.pi):.6f}"


def program(n, body, measure=False):
    lines = [HEADER, f"qreg q[{n}];\n"]
    if measure:
        lines.append(f"creg c[{n}];\n")
    lines += [b + "\n" for b in body]
    if measure:
        lines.append("measure q -> c;\n")
    return "".join(lines)


def ghz(n):
    return program(n, ["h q[0];"] + [f"cx q[{i}],q[{i + 1}];" for i in range(n - 1)], measure=True)


def w_state(n):
    body = ["x q[0];"]
    for i in range(n - 1):
        theta = 2 * math.acos(math.sqrt(1 / (n - i)))
        body += [f"cry({theta:.15f}) q[{i}],q[{i + 1}];", f"cx q[{i + 1}],q[{i}];"]
    return program(n, body)


def qft(n, rng):
    body = [f"x q[{i}];" for i in range(n) if rng.random() < 0.5]
    for i in range(n):
        body.append(f"h q[{i}];")
        for j in range(i + 1, n):
            body.append(f"cu1(pi/{2 ** (j - i)}) q[{j}],q[{i}];")
    for i in range(n // 2):
        body.append(f"swap q[{i}],q[{n - 1 - i}];")
    return program(n, body)


def deutsch_jozsa(n, rng):
    # n - 1 inputs, ancilla last; balanced oracle x·s mod 2
    a = n - 1
    body = [f"x q[{a}];"] + [f"h q[{i}];" for i in range(n)]
    s = [rng.random() < 0.5 for _ in range(a)]
    s[0] = True
    body += [f"cx q[{i}],q[{a}];" for i in range(a) if s[i]]
    body += [f"h q[{i}];" for i in range(a)]
    return program(n, body, measure=False)


def graph_state(n, rng):
    body = ["h q;"]
    edges = [(i, i + 1) for i in range(n - 1)]
    edges += [(i, j) for i in range(n) for j in range(i + 2, n) if rng.random() < 0.3]
    body += [f"cz q[{i}],q[{j}];" for i, j in edges]
    return program(n, body)


def random_dense(n, gates, rng):
    body = []
    singles = ["u3", "rx", "ry", "rz", "h", "t", "sx"]
    for _ in range(gates):
        if rng.random() < 0.35:
            a, b = rng.sample(range(n), 2)
            kind = rng.choice(["cx", "cx", "cu3", "crz", "cry"])
            if kind == "cx":
                body.append(f"cx q[{a}],q[{b}];")
            elif kind == "cu3":
                body.append(f"cu3({ang(rng)},{ang(rng)},{ang(rng)}) q[{a}],q[{b}];")
            else:
                body.append(f"{kind}({ang(rng)}) q[{a}],q[{b}];")
        else:
            q = rng.randrange(n)
            g = rng.choice(singles)
            if g == "u3":
                body.append(f"u3({ang(rng)},{ang(rng)},{ang(rng)}) q[{q}];")
            elif g in ("rx", "ry", "rz"):
                body.append(f"{g}({ang(rng)}) q[{q}];")
            else:
                body.append(f"{g} q[{q}];")
    return program(n, body)


def random_clifford(n, gates, rng):
    body = []
    for _ in range(gates):
        if rng.random() < 0.4:
            a, b = rng.sample(range(n), 2)
            body.append(f"{rng.choice(['cx', 'cx', 'cz', 'cy', 'swap'])} q[{a}],q[{b}];")
        else:
            body.append(f"{rng.choice(['h', 's', 'sdg', 'x', 'y', 'z', 'h'])} q[{rng.randrange(n)}];")
    return program(n, body)


def qaoa(n, layers, rng):
    body = ["h q;"]
    edges = [(i, (i + 1) % n) for i in range(n)]
    for _ in range(layers):
        gamma, beta = rng.uniform(0.1, 1.5), rng.uniform(0.1, 1.5)
        body += [f"rzz({2 * gamma:.6f}) q[{i}],q[{j}];" for i, j in edges]
        body += [f"rx({2 * beta:.6f}) q[{i}];" for i in range(n)]
    return program(n, body, measure=True)


def gate_zoo():
    return program(4, [
        "gate mix(a) x, y { ry(a) x; cx x, y; rz(-a/2) y; }",
        "h q; sx q[0]; sxdg q[1]; u2(0.3,-0.2) q[2]; p(0.7) q[3]; y q[1]; tdg q[2];",
        "ch q[0],q[1]; ccx q[0],q[1],q[2]; cswap q[3],q[0],q[2];",
        "crx(0.4) q[1],q[3]; cry(-1.2) q[2],q[0]; crz(2.1) q[3],q[1];",
        "cu1(0.5) q[0],q[2]; cp(-0.9) q[1],q[2]; cu3(0.3,0.2,0.1) q[2],q[3]; csx q[3],q[0];",
        "rxx(0.6) q[0],q[3]; rccx q[1],q[2],q[3]; mix(pi/3) q[2],q[1]; u(0.2,0.4,0.6) q[0];",
        "barrier q; cy q[2],q[1]; cz q[0],q[3]; sdg q[3]; s q[0]; swap q[1],q[2];",
    ])


def norm_low_hostile(n):
    # Each qubit ends with |0> amplitude sin(1e-8): the rz angles of every
    # cascade nearly cancel. Products of such amplitudes fall below δ.
    body = ["x q;", "h q;"]
    for i in range(n):
        body += [f"rz(0.9) q[{i}];", f"rz(-0.45) q[{i}];", f"rz(-0.3) q[{i}];", f"rz(-0.15+2e-8) q[{i}];"]
    body.append("h q;")
    return program(n, body)


def main():
    rng = random.Random(20240917)
    os.makedirs(OUT, exist_ok=True)
    files = {}
    for n in (2, 3, 4, 6, 8, 10):
        files[f"ghz_{n}"] = ghz(n)
    for n in (3, 4, 6, 8):
        files[f"w_{n}"] = w_state(n)
    for n in (3, 4, 5, 6, 8):
        files[f"qft_{n}"] = qft(n, rng)
    for n in (3, 5, 7):
        files[f"dj_{n}"] = deutsch_jozsa(n, rng)
    for n in (4, 6, 8, 10):
        files[f"graph_{n}"] = graph_state(n, rng)
    for n, g in ((3, 20), (4, 30), (5, 36), (6, 40), (8, 40)):
        files[f"random_dense_{n}"] = random_dense(n, g, rng)
    for n, g in ((3, 20), (5, 30), (7, 40), (9, 50)):
        files[f"clifford_{n}"] = random_clifford(n, g, rng)
    for n, p in ((4, 2), (6, 2), (8, 1)):
        files[f"qaoa_{n}"] = qaoa(n, p, rng)
    files["gate_zoo_4"] = gate_zoo()
    files["norm_low_hostile_4"] = norm_low_hostile(4)
    for name, text in files.items():
        with open(os.path.join(OUT, name + ".qasm"), "w") as f:
            f.write(text)
    print(f"wrote {len(files)} circuits to {os.path.normpath(OUT)}", file=sys.stderr)


if __name__ == "__main__":
    main()
