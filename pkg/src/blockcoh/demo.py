"""Reproduce the worked examples as a pass/fail table."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import block_dephasing_channel, classify_block_incoherent, unitary_channel
from .conversion import build_conversion_channel, necessity_certificate, verify_conversion
from .core import block_state, contiguous_structure, haar_random_unitary, maximally_coherent_state, random_state, uniform_structure
from .gates import block_hadamard, block_rotation, build_gate_protocol, protocol_checks, run_gate_protocol
from .kcoherence import conjecture_probe, enumerate_structures
from .measures import c_entropy, c_l1
from .optimize import OptimizerOptions
from .powers import bcp, bcp_random_unitary, bcp_unitary, bdp, bdp_unitary, random_unitary_channel


@dataclass(frozen=True)
class Row:
    name: str
    expected: float
    got: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(abs(self.expected - self.got) <= self.tol)


def _fmt(v: float) -> str:
    r = round(v)
    return str(int(r)) if abs(v - r) < 1e-9 else f"{v:.6f}"


def run_demo(seed: int = 0, restarts: int = 16) -> list[Row]:
    rng = np.random.default_rng(seed)
    opts = OptimizerOptions(restarts=restarts, seed=seed)
    rows: list[Row] = []

    for m in (2, 3, 4):
        s = contiguous_structure([2] * m)
        rows.append(Row(f"C_l1(MC, M={m})", m - 1, c_l1(maximally_coherent_state(s).density(), s), 1e-9))
    s = contiguous_structure([2, 3])
    rows.append(Row("C_s(MC, M=2)", 1.0, c_entropy(maximally_coherent_state(s).density(), s), 1e-9))

    src, dst = block_state(s, np.sqrt([0.5, 0.5])), block_state(s, np.sqrt([0.7, 0.3]))
    plan = build_conversion_channel(src, dst)
    rep = verify_conversion(plan, src, dst)
    rows.append(Row("convert (1/2,1/2)->(0.7,0.3): gamma_0^2", 0.5, plan.gammas[0], 1e-12))
    rows.append(Row("convert (1/2,1/2)->(0.7,0.3): gamma_1^2", 0.5, plan.gammas[1], 1e-12))
    rows.append(Row("convert (1/2,1/2)->(0.7,0.3): fidelity", 1.0, rep.fidelity, 1e-9))
    cert = necessity_certificate(plan.channel, src, dst)
    rows.append(Row("necessity: sum |alpha|^2", 1.0, float(np.sum(np.abs(cert.alphas) ** 2)), 1e-8))

    a, b = np.sqrt(3) / 2, 0.5
    v = haar_random_unitary(2, rng)
    u = block_rotation(a, b, v)
    s2 = uniform_structure(2, 2)
    rows.append(Row("BCP(U(a=sqrt3/2, b=1/2)) = 2|ab|", 2 * a * b, bcp_unitary(u, s2, opts).value, 1e-6))
    rows.append(Row("BCP(U, generic optimizer)", 2 * a * b, bcp(unitary_channel(u, s2), s2, opts).value, 1e-6))
    hl = block_rotation(1 / np.sqrt(2), 1 / np.sqrt(2), v)
    rows.append(Row("BCP(block Hadamard-like)", 1.0, bcp_unitary(hl, s2, opts).value, 1e-6))

    p = 0.3
    ab = np.array([0.8, 0.6j])
    u2 = np.array([[ab[0], ab[1]], [-np.conj(ab[1]), np.conj(ab[0])]])
    terms = [(1 - p, np.eye(2), np.eye(1)), (p, u2, np.eye(1))]
    rows.append(Row("BCP(two-qubit random unitary) = 2p|ab|", 2 * p * abs(ab[0] * ab[1]),
                    bcp_random_unitary(terms, opts).value, 1e-6))
    ch = random_unitary_channel(terms)
    rows.append(Row("BCP(two-qubit, generic optimizer)", 2 * p * abs(ab[0] * ab[1]),
                    bcp(ch, ch.in_structure, opts).value, 1e-6))

    rows.append(Row("BDP(U(a=sqrt3/2, b=1/2)) = 1-sqrt(1-4|ab|^2)", 1 - np.sqrt(1 - 4 * (a * b) ** 2),
                    bdp_unitary(u, s2, opts).value, 1e-6))
    h = block_hadamard(2)
    rows.append(Row("BDP(H)", 1.0, bdp_unitary(h, s2, opts).value, 1e-6))
    rows.append(Row("BDP(H, generic optimizer)", 1.0, bdp(unitary_channel(h, s2), s2, opts).value, 1e-6))
    um, vn = haar_random_unitary(2, rng), haar_random_unitary(2, rng)
    rows.append(Row("BDP(U (x) V) - BDP(U)", 0.0,
                    bdp_unitary(np.kron(um, vn), s2, opts).value - bdp_unitary(um, uniform_structure(2, 1), opts).value,
                    1e-5))

    sg = contiguous_structure([2, 1, 2])
    ug = haar_random_unitary(sg.total_dim, rng)
    proto = build_gate_protocol(ug, sg)
    psi = random_state(sg.total_dim, rng)
    sys_m, anc_m = run_gate_protocol(proto, psi)
    target = ug @ psi
    res, inco = protocol_checks(proto)
    rows.append(Row("gate: system fidelity", 1.0, float(np.real(target.conj() @ sys_m @ target)), 1e-8))
    rows.append(Row("gate: ancilla C_l1 after", 0.0, c_l1(anc_m, sg), 1e-8))
    rows.append(Row("gate: completeness residual", 0.0, res, 1e-9))
    rows.append(Row("gate: block-incoherent", 1.0, float(inco), 0.0))

    rows.append(Row("k-coherence probe violations (d=4, k=2)", 0.0,
                    float(conjecture_probe(4, 2, 500, seed).violations), 0.0))
    fam = enumerate_structures(4, 2)
    pairs = [[[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]]]
    rows.append(Row("pair partitions of d=4 enumerated", 3.0, float(sum(p in fam for p in pairs)), 0.0))
    rows.append(Row("block dephasing is block-incoherent", 1.0,
                    float(classify_block_incoherent(block_dephasing_channel(s2)).is_block_incoherent), 0.0))
    return rows


def format_table(rows: list[Row]) -> str:
    width = max(len(r.name) for r in rows)
    lines = [f"{'check':<{width}}  {'expected':>10}  {'got':>12}  result"]
    for r in rows:
        lines.append(f"{r.name:<{width}}  {_fmt(r.expected):>10}  {_fmt(r.got):>12}  {'PASS' if r.passed else 'FAIL'}")
    return "\n".join(lines)
