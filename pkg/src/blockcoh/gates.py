"""Arbitrary gates from block-incoherent operations plus one maximally coherent ancilla."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel, apply, classify_block_incoherent, validate_cptp
from .core import (
    BlockStructure,
    PureBlockState,
    _check_dim,
    maximally_coherent_state,
    partial_trace,
    product_structure,
    projector,
    uniform_component,
)
from .errors import DimensionMismatch, NotUnitary

UNITARY_TOL = 1e-9


def check_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NotUnitary(f"expected a square matrix, got shape {u.shape}")
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if dev > tol:
        raise NotUnitary(f"U^dag U deviates from I by {dev:.3g}")
    return u


def _embedded_phi(s: BlockStructure, mu: int) -> np.ndarray:
    v = np.zeros(s.total_dim, dtype=complex)
    v[s.index(mu)] = uniform_component(s.dims[mu])
    return v


def decohered_resource(s: BlockStructure) -> np.ndarray:
    """``(1/M) sum_mu |mu><mu| (x) |phi_mu><phi_mu|``."""
    return sum(projector(_embedded_phi(s, mu)) for mu in range(s.num_blocks)) / s.num_blocks


@dataclass(frozen=True)
class GateProtocol:
    unitary: np.ndarray
    structure: BlockStructure
    joint_structure: BlockStructure
    channel: KrausChannel
    num_shift_ops: int

    @property
    def shift_kraus(self):
        return self.channel.kraus[: self.num_shift_ops]


def build_gate_protocol(u, s: BlockStructure) -> GateProtocol:
    """Kraus operators on system (x) ancilla implementing ``u`` on the system.

    ``K_s = sum_{mu,nu} |mu><nu| (x) A_{mu nu} (x) |s><mu+s| (x) |phi_s><phi_{mu+s}|``
    with cyclic ``mu + s``.  The ``K_s`` alone only resolve the identity on
    the span of the ``phi_beta``; one extra block-diagonal operator
    ``I (x) (+)_beta (I - |phi_beta><phi_beta|)`` completes the set and
    annihilates the resource state.
    """
    u = check_unitary(u)
    _check_dim(u.shape[0], s, "unitary")
    m, d = s.num_blocks, s.total_dim
    phis = [_embedded_phi(s, mu) for mu in range(m)]
    kraus = []
    for sh in range(m):
        k = np.zeros((d * d, d * d), dtype=complex)
        for mu in range(m):
            row = np.zeros((d, d), dtype=complex)
            row[s.index(mu), :] = u[s.index(mu), :]
            anc = np.outer(phis[sh], phis[(mu + sh) % m].conj())
            k += np.kron(row, anc)
        kraus.append(k)
    p_phi = sum(projector(v) for v in phis)
    kraus.append(np.kron(np.eye(d), np.eye(d) - p_phi))
    joint = product_structure(s, s)
    return GateProtocol(u, s, joint, KrausChannel(tuple(kraus), joint), m)


def protocol_checks(p: GateProtocol) -> tuple[float, bool]:
    """Completeness residual and joint-structure incoherence verdict."""
    _, res = validate_cptp(p.channel)
    return res, classify_block_incoherent(p.channel).is_block_incoherent


def run_gate_protocol(p: GateProtocol, psi) -> tuple[np.ndarray, np.ndarray]:
    """System and ancilla marginals after the protocol acts on ``|psi> (x) |Phi_MC>``."""
    s = p.structure
    v = psi.amplitudes if isinstance(psi, PureBlockState) else np.asarray(psi, dtype=complex).reshape(-1)
    if v.size != s.total_dim:
        raise DimensionMismatch(f"state has dimension {v.size}, gate acts on {s.total_dim}")
    xi = np.kron(v, maximally_coherent_state(s).amplitudes)
    out = apply(p.channel, projector(xi))
    d = s.total_dim
    return partial_trace(out, [d, d], 0), partial_trace(out, [d, d], 1)


def block_hadamard(n: int) -> np.ndarray:
    """``(1/sqrt 2) [[I, I], [I, -I]]`` on two blocks of size ``n``."""
    i = np.eye(n)
    return np.block([[i, i], [i, -i]]) / np.sqrt(2)


def block_rotation(a: complex, b: complex, v) -> np.ndarray:
    """``[[a I, b V], [-b* V^dag, a* I]]`` with ``|a|^2 + |b|^2 = 1``."""
    v = np.asarray(v, dtype=complex)
    i = np.eye(v.shape[0])
    return np.block([[a * i, b * v], [-np.conj(b) * v.conj().T, np.conj(a) * i]])

