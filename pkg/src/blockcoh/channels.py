"""Kraus channels and their block-incoherence classification.

A Kraus operator is block-incoherent when every block column contains at most
one nonzero block; the column ``nu`` is then sent to a single output block
``a(nu)``.  The recovered map ``a`` is kept in the verdict because the
necessity certificate in :mod:`blockcoh.conversion` needs it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import BlockStructure, _check_dim, block_dephase, random_density
from .errors import DimensionMismatch, NotCPTP

CPTP_TOL = 1e-9
BLOCK_NONZERO_TOL = 1e-9


@dataclass(frozen=True)
class KrausChannel:
    kraus: tuple[np.ndarray, ...]
    in_structure: BlockStructure
    out_structure: BlockStructure = None

    def __post_init__(self):
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ks:
            raise DimensionMismatch("a channel needs at least one Kraus operator")
        shapes = {k.shape for k in ks}
        if len(shapes) != 1 or ks[0].ndim != 2:
            raise DimensionMismatch(f"Kraus operators have inconsistent shapes {sorted(shapes)}")
        out = self.out_structure if self.out_structure is not None else self.in_structure
        d_out, d_in = ks[0].shape
        _check_dim(d_in, self.in_structure, "Kraus input")
        _check_dim(d_out, out, "Kraus output")
        object.__setattr__(self, "kraus", ks)
        object.__setattr__(self, "out_structure", out)

    @property
    def d_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus[0].shape[0]

    def __len__(self):
        return len(self.kraus)

    def __call__(self, rho):
        return apply(self, rho)


def kraus_channel(kraus: Sequence, s: BlockStructure, out: BlockStructure | None = None) -> KrausChannel:
    return KrausChannel(tuple(kraus), s, out)


def unitary_channel(u, s: BlockStructure) -> KrausChannel:
    return KrausChannel((np.asarray(u),), s)


def mixed_unitary_channel(probs, unitaries, s: BlockStructure) -> KrausChannel:
    return KrausChannel(tuple(np.sqrt(p) * np.asarray(u) for p, u in zip(probs, unitaries) if p > 0), s)


def completeness_residual(ch: KrausChannel) -> float:
    acc = sum(k.conj().T @ k for k in ch.kraus)
    return float(np.max(np.abs(acc - np.eye(ch.d_in))))


def validate_cptp(ch: KrausChannel, tol: float = CPTP_TOL) -> tuple[bool, float]:
    """``(ok, residual)`` with residual the max-entry deviation of ``sum K^dag K`` from ``I``."""
    r = completeness_residual(ch)
    return r <= tol, r


def apply(ch: KrausChannel, rho, check: bool = True) -> np.ndarray:
    """``sum_a K_a rho K_a^dag``, symmetrized so the output is exactly Hermitian."""
    if check:
        ok, r = validate_cptp(ch)
        if not ok:
            raise NotCPTP(f"completeness residual {r:.3g}")
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.d_in, ch.d_in):
        raise DimensionMismatch(f"state has shape {rho.shape}, channel input dimension is {ch.d_in}")
    out = _apply_linear(ch, rho)
    return (out + out.conj().T) / 2


def _apply_linear(ch: KrausChannel, x) -> np.ndarray:
    """Unsymmetrized action; valid on non-Hermitian inputs."""
    out = np.zeros((ch.d_out, ch.d_out), dtype=complex)
    for k in ch.kraus:
        out += k @ x @ k.conj().T
    return out


def compose(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """Channel ``second o first``."""
    return KrausChannel(
        tuple(b @ a for b in second.kraus for a in first.kraus), first.in_structure, second.out_structure
    )


# --------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class ColumnViolation:
    kraus_index: int
    column: int
    nonzero_rows: tuple[int, ...]


@dataclass(frozen=True)
class IncoherenceVerdict:
    """``block_maps[a][nu]`` is the output block of column ``nu`` (``None`` for a zero column)."""

    is_block_incoherent: bool
    block_maps: tuple[tuple[int | None, ...] | None, ...]
    violations: tuple[ColumnViolation, ...] = field(default=())

    def __bool__(self):
        return self.is_block_incoherent


def classify_block_incoherent(ch: KrausChannel, tol: float = BLOCK_NONZERO_TOL) -> IncoherenceVerdict:
    si, so = ch.in_structure, ch.out_structure
    maps, viol = [], []
    for a, k in enumerate(ch.kraus):
        amap: list[int | None] = []
        ok = True
        for nu in range(si.num_blocks):
            rows = tuple(
                mu for mu in range(so.num_blocks)
                if np.linalg.norm(k[np.ix_(so.index(mu), si.index(nu))]) > tol
            )
            if len(rows) > 1:
                viol.append(ColumnViolation(a, nu, rows))
                ok = False
            amap.append(rows[0] if rows else None)
        maps.append(tuple(amap) if ok else None)
    return IncoherenceVerdict(not viol, tuple(maps), tuple(viol))


def block_dephasing_channel(s: BlockStructure) -> KrausChannel:
    return KrausChannel(tuple(s.projector(mu).astype(complex) for mu in range(s.num_blocks)), s)


def _matrix_units(d: int):
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            yield e


def dephasing_covariance_deviation(ch: KrausChannel, s: BlockStructure, samples: int = 8, seed: int = 0) -> float:
    """Max entry of ``|E(D(rho)) - D(E(rho))|`` over matrix units plus random states."""
    if ch.d_in != ch.d_out:
        raise DimensionMismatch("covariance needs a square channel")
    _check_dim(ch.d_in, s)
    rng = np.random.default_rng(seed)
    inputs = list(_matrix_units(ch.d_in)) + [random_density(ch.d_in, rng) for _ in range(samples)]
    dev = 0.0
    for x in inputs:
        lhs = _apply_linear(ch, block_dephase(x, s))
        rhs = block_dephase(_apply_linear(ch, x), s)
        dev = max(dev, float(np.max(np.abs(lhs - rhs))))
    return dev


def is_dephasing_covariant(ch: KrausChannel, s: BlockStructure, samples: int = 8, tol: float = 1e-8) -> bool:
    """Exact by linearity: the matrix-unit sweep spans every input."""
    return dephasing_covariance_deviation(ch, s, samples) <= tol


def block_norms(k, s_in: BlockStructure, s_out: BlockStructure | None = None) -> np.ndarray:
    """Frobenius norm of every ``(mu, nu)`` block of ``k``."""
    s_out = s_in if s_out is None else s_out
    k = np.asarray(k)
    return np.array(
        [[np.linalg.norm(k[np.ix_(s_out.index(mu), s_in.index(nu))]) for nu in range(s_in.num_blocks)]
         for mu in range(s_out.num_blocks)]
    )


def _ginibre(rng, r: int, c: int) -> np.ndarray:
    return rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))


def random_block_incoherent_channel(s: BlockStructure, num_kraus: int = 4, seed=None) -> KrausChannel:
    """Random CPTP channel whose Kraus operators all have the block-incoherent shape.

    Each operator draws a random block map ``a``.  Source blocks sharing a
    target get mutually orthogonal ranges when the target is large enough
    (otherwise only one of them is kept), which makes ``sum K^dag K``
    block-diagonal; normalizing by its inverse square root then keeps every
    operator's shape.  The first operator is block-diagonal so the sum is
    invertible.
    """
    rng = np.random.default_rng(seed)
    m, d = s.num_blocks, s.total_dim
    kraus = []
    for a in range(num_kraus):
        amap = np.arange(m) if a == 0 else rng.integers(0, m, size=m)
        k = np.zeros((d, d), dtype=complex)
        for t in range(m):
            cols = [nu for nu in rng.permutation(m) if amap[nu] == t]
            while sum(s.dims[nu] for nu in cols) > s.dims[t]:
                cols.pop()
            if not cols:
                continue
            width = sum(s.dims[nu] for nu in cols)
            w, _ = np.linalg.qr(_ginibre(rng, s.dims[t], width))
            start = 0
            for nu in cols:
                n = s.dims[nu]
                k[np.ix_(s.index(t), s.index(nu))] = w[:, start:start + n] @ _ginibre(rng, n, n)
                start += n
        kraus.append(k)
    total = sum(k.conj().T @ k for k in kraus)
    lam, vec = np.linalg.eigh(total)
    inv_sqrt = vec @ np.diag(lam**-0.5) @ vec.conj().T
    return KrausChannel(tuple(k @ inv_sqrt for k in kraus), s)
