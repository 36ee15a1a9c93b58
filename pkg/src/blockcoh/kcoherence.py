"""Coherence rank, rank-bounded block structures and the C_k membership certificate.

A state that is block-incoherent for a structure whose blocks have size at
most ``k`` is a mixture of pure states supported inside single blocks, hence
of coherence rank at most ``k``.  :func:`ck_certificate` produces that
decomposition explicitly.  Whether every member of ``C_k`` arises this way is
an open conjecture; :func:`conjecture_probe` only gathers evidence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .core import (
    BlockStructure,
    _check_dim,
    block_dephase,
    make_block_structure,
    random_incoherent_density,
)
from .errors import NotBlockIncoherent, RankBoundExceeded, TooLarge
from .measures import coherence_rank

MAX_ENUM_DIM = 8


def _partitions(items: list[int], k: int):
    """Set partitions of ``items`` with parts of size <= k; part containing ``items[0]`` first."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for size in range(0, min(k - 1, len(rest)) + 1):
        for mates in combinations(rest, size):
            remaining = [i for i in rest if i not in mates]
            for tail in _partitions(remaining, k):
                yield [(first, *mates)] + tail


@dataclass(frozen=True)
class RankBoundedStructureFamily:
    d: int
    k: int
    structures: tuple[BlockStructure, ...]

    def __len__(self):
        return len(self.structures)

    def __iter__(self):
        return iter(self.structures)

    def __contains__(self, groups) -> bool:
        key = frozenset(frozenset(g) for g in (groups.groups if isinstance(groups, BlockStructure) else groups))
        return any(frozenset(frozenset(g) for g in s.groups) == key for s in self.structures)


def enumerate_structures(d: int, k: int) -> RankBoundedStructureFamily:
    """Every partition of ``range(d)`` into parts of size at most ``k``.

    Parts are ordered by their smallest element.
    """
    if not 1 <= k <= d:
        raise ValueError(f"need 1 <= k <= d, got d={d}, k={k}")
    if d > MAX_ENUM_DIM:
        raise TooLarge(f"enumeration is limited to d <= {MAX_ENUM_DIM}")
    out = [make_block_structure(p, d) for p in _partitions(list(range(d)), k)]
    return RankBoundedStructureFamily(d, k, tuple(out))


def restricted_bell(n: int, k: int) -> int:
    """Number of set partitions of ``n`` elements with all parts of size <= ``k``."""
    a = [1] + [0] * n
    for m in range(1, n + 1):
        a[m] = sum(comb(m - 1, j - 1) * a[m - j] for j in range(1, min(k, m) + 1))
    return a[n]


def in_block_incoherent_set(rho, s: BlockStructure, tol: float = 1e-9) -> bool:
    rho = np.asarray(rho)
    _check_dim(rho.shape[0], s)
    return float(np.max(np.abs(rho - block_dephase(rho, s)))) <= tol


@dataclass(frozen=True)
class CkCertificate:
    weights: np.ndarray
    states: tuple[np.ndarray, ...] = field(repr=False)
    ranks: tuple[int, ...]
    residual: float

    def reconstruct(self) -> np.ndarray:
        return sum(w * np.outer(v, v.conj()) for w, v in zip(self.weights, self.states))


def ck_certificate(rho, s: BlockStructure, k: int, tol: float = 1e-12) -> CkCertificate:
    """Decompose a block-incoherent ``rho`` into pure states of coherence rank <= ``k``.

    Each diagonal block is diagonalized on its own, so eigenvectors never mix
    blocks even when eigenvalues are degenerate across blocks.
    """
    rho = np.asarray(rho, dtype=complex)
    if max(s.dims) > k:
        raise RankBoundExceeded(f"structure has a block of size {max(s.dims)} > k={k}")
    if not in_block_incoherent_set(rho, s):
        raise NotBlockIncoherent("state has weight between different blocks")
    d = s.total_dim
    weights, states, ranks = [], [], []
    for mu in range(s.num_blocks):
        idx = s.index(mu)
        sub = rho[np.ix_(idx, idx)]
        lam, vec = np.linalg.eigh((sub + sub.conj().T) / 2)
        for l, v in zip(lam, vec.T):
            if l <= tol:
                continue
            full = np.zeros(d, dtype=complex)
            full[idx] = v
            weights.append(float(l))
            states.append(full)
            ranks.append(coherence_rank(full))
    w = np.array(weights)
    recon = sum(wi * np.outer(v, v.conj()) for wi, v in zip(w, states))
    residual = float(np.max(np.abs(recon - rho)))
    if max(ranks) > k:
        raise RankBoundExceeded(f"certificate state of rank {max(ranks)} > k={k}")
    return CkCertificate(w, tuple(states), tuple(ranks), residual)


def support_structure(psi, tol: float = 1e-9) -> BlockStructure:
    """Support of ``psi`` as one group, every other index a singleton."""
    psi = np.asarray(psi).reshape(-1)
    supp = [i for i in range(psi.size) if abs(psi[i]) > tol]
    rest = [[i] for i in range(psi.size) if abs(psi[i]) <= tol]
    groups = sorted([supp] + rest, key=min) if supp else rest
    return make_block_structure(groups, psi.size)


@dataclass(frozen=True)
class ProbeReport:
    """Evidence for the conjectured equality; a probe, not a proof."""

    d: int
    k: int
    trials: int
    num_structures: int
    certificates_checked: int
    certificate_violations: int
    pure_states_checked: int
    pure_state_violations: int
    max_residual: float

    @property
    def violations(self) -> int:
        return self.certificate_violations + self.pure_state_violations


def conjecture_probe(d: int, k: int, trials: int = 500, seed: int = 0) -> ProbeReport:
    """Sample both directions of the union-of-structures vs ``C_k`` relation.

    Direction 1: random block-incoherent states of random rank-bounded
    structures each get a valid certificate.  Direction 2: random pure states
    of coherence rank <= ``k`` are block-incoherent for their support structure.
    """
    if d > 4:
        raise TooLarge("the probe is limited to d <= 4")
    fam = enumerate_structures(d, k)
    rng = np.random.default_rng(seed)
    cert_bad = pure_bad = 0
    max_res = 0.0
    for _ in range(trials):
        s = fam.structures[rng.integers(len(fam))]
        rho = random_incoherent_density(s, rng)
        try:
            cert = ck_certificate(rho, s, k)
            max_res = max(max_res, cert.residual)
            if cert.residual > 1e-8 or max(cert.ranks) > k or abs(cert.weights.sum() - 1) > 1e-8:
                cert_bad += 1
        except (NotBlockIncoherent, RankBoundExceeded):
            cert_bad += 1

        r = int(rng.integers(1, k + 1))
        supp = rng.choice(d, size=r, replace=False)
        psi = np.zeros(d, dtype=complex)
        psi[supp] = rng.standard_normal(r) + 1j * rng.standard_normal(r)
        psi /= np.linalg.norm(psi)
        ss = support_structure(psi)
        ok = coherence_rank(psi) <= k and max(ss.dims) <= k and in_block_incoherent_set(np.outer(psi, psi.conj()), ss)
        pure_bad += not ok
    return ProbeReport(d, k, trials, len(fam), trials, cert_bad, trials, pure_bad, max_res)

