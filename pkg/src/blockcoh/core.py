"""Block structures, block decompositions and the canonical states of the theory.

A block structure partitions the computational basis ``{0, ..., d-1}`` into
``M`` groups.  Groups need not be contiguous: the parity partition
``{0, 3} | {1, 2}`` of two qubits is a perfectly good structure.

Density matrices and operators are plain ``numpy`` arrays; the helpers here
validate them and slice them by blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyGroup,
    IncompleteCover,
    NotADensityMatrix,
    NotNormalized,
    OverlappingGroups,
)

TOL = 1e-9


@dataclass(frozen=True)
class BlockStructure:
    """An ordered partition of ``range(d)`` into index groups."""

    groups: tuple[tuple[int, ...], ...]

    @property
    def num_blocks(self) -> int:
        return len(self.groups)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.groups)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def index(self, mu: int) -> np.ndarray:
        return np.asarray(self.groups[mu], dtype=int)

    def projector(self, mu: int) -> np.ndarray:
        p = np.zeros((self.total_dim, self.total_dim))
        idx = self.index(mu)
        p[idx, idx] = 1.0
        return p

    def block_of(self) -> np.ndarray:
        """Array mapping each basis index to the label of its block."""
        lab = np.empty(self.total_dim, dtype=int)
        for mu, g in enumerate(self.groups):
            lab[list(g)] = mu
        return lab

    def is_contiguous(self) -> bool:
        flat = [i for g in self.groups for i in g]
        return flat == list(range(self.total_dim))

    def __str__(self) -> str:
        return " | ".join("{" + ",".join(map(str, g)) + "}" for g in self.groups)


def make_block_structure(groups: Sequence[Sequence[int]], d: int | None = None) -> BlockStructure:
    """Validate ``groups`` as a partition of ``range(d)``.

    ``d`` defaults to the number of indices supplied.  Order of groups is kept
    as given; indices inside a group are sorted.
    """
    groups = [tuple(sorted(int(i) for i in g)) for g in groups]
    if not groups:
        raise EmptyGroup("a block structure needs at least one group")
    for mu, g in enumerate(groups):
        if not g:
            raise EmptyGroup(f"group {mu} is empty")
        if len(set(g)) != len(g):
            raise OverlappingGroups(f"group {mu} repeats an index")
    seen: dict[int, int] = {}
    for mu, g in enumerate(groups):
        for i in g:
            if i in seen:
                raise OverlappingGroups(f"index {i} appears in groups {seen[i]} and {mu}")
            seen[i] = mu
    if d is None:
        d = len(seen)
    bad = [i for i in seen if not 0 <= i < d]
    if bad:
        raise IncompleteCover(f"indices {sorted(bad)} outside range(0, {d})")
    missing = sorted(set(range(d)) - set(seen))
    if missing:
        raise IncompleteCover(f"indices {missing} are not covered by any group")
    return BlockStructure(tuple(groups))


def contiguous_structure(dims: Sequence[int]) -> BlockStructure:
    """Structure whose blocks are consecutive index ranges of the given sizes."""
    groups, start = [], 0
    for n in dims:
        groups.append(range(start, start + int(n)))
        start += int(n)
    return make_block_structure(groups)


def uniform_structure(num_blocks: int, block_dim: int) -> BlockStructure:
    """``H_M (x) H_N`` viewed as ``M`` consecutive blocks of size ``N``."""
    return contiguous_structure([block_dim] * num_blocks)


def product_structure(a: BlockStructure, b: BlockStructure) -> BlockStructure:
    """Blocks ``(mu, alpha)`` of ``a (x) b``, ordered lexicographically."""
    db = b.total_dim
    groups = []
    for ga in a.groups:
        for gb in b.groups:
            groups.append([i * db + j for i in ga for j in gb])
    return make_block_structure(groups, a.total_dim * db)


def _check_dim(n: int, s: BlockStructure, what: str = "operand") -> None:
    if n != s.total_dim:
        raise DimensionMismatch(f"{what} has dimension {n}, structure has {s.total_dim}")


# --------------------------------------------------------------------------
# block views


def block(a: np.ndarray, s: BlockStructure, mu: int, nu: int) -> np.ndarray:
    """The ``d_mu x d_nu`` submatrix with rows in group ``mu`` and columns in ``nu``."""
    return a[np.ix_(s.index(mu), s.index(nu))]


def block_view(a: np.ndarray, s: BlockStructure) -> list[list[np.ndarray]]:
    a = np.asarray(a)
    _check_dim(a.shape[0], s)
    return [[block(a, s, mu, nu) for nu in range(s.num_blocks)] for mu in range(s.num_blocks)]


def assemble(blocks: Sequence[Sequence[np.ndarray]], s: BlockStructure) -> np.ndarray:
    """Inverse of :func:`block_view`."""
    d = s.total_dim
    dtype = np.result_type(*[b for row in blocks for b in row])
    out = np.zeros((d, d), dtype=dtype)
    for mu in range(s.num_blocks):
        for nu in range(s.num_blocks):
            out[np.ix_(s.index(mu), s.index(nu))] = blocks[mu][nu]
    return out


@dataclass(frozen=True)
class BlockOperator:
    """A square matrix together with the structure that defines its blocks."""

    matrix: np.ndarray
    structure: BlockStructure

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
        _check_dim(m.shape[0], self.structure)
        object.__setattr__(self, "matrix", m)

    def block(self, mu: int, nu: int) -> np.ndarray:
        return block(self.matrix, self.structure, mu, nu)

    def blocks(self) -> list[list[np.ndarray]]:
        return block_view(self.matrix, self.structure)


# --------------------------------------------------------------------------
# states


def as_state_vector(v, s: BlockStructure | None = None, tol: float = TOL) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if s is not None:
        _check_dim(v.size, s, "state")
    n = np.linalg.norm(v)
    if abs(n - 1.0) > tol:
        raise NotNormalized(f"state has norm {n:.12g}")
    return v


def check_density_matrix(rho, tol: float = TOL) -> np.ndarray:
    """Return ``rho`` as a complex array or raise :class:`NotADensityMatrix`."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise NotADensityMatrix(f"expected a square matrix, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T), initial=0.0)
    if herm > tol:
        raise NotADensityMatrix(f"not Hermitian (deviation {herm:.3g})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise NotADensityMatrix(f"trace is {tr:.12g}")
    lam = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if lam[0] < -tol:
        raise NotADensityMatrix(f"negative eigenvalue {lam[0]:.3g}")
    return rho


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class PureBlockState:
    """A unit vector together with its decomposition ``sum_mu x_mu |mu> (x) |psi_mu>``.

    ``components[mu]`` is ``None`` when the block weight vanishes: no direction
    is invented for empty blocks.
    """

    amplitudes: np.ndarray
    structure: BlockStructure
    weights: np.ndarray = field(repr=False)
    components: tuple = field(repr=False)

    @property
    def probabilities(self) -> np.ndarray:
        return self.weights**2

    def density(self) -> np.ndarray:
        return projector(self.amplitudes)

    def reassemble(self) -> np.ndarray:
        out = np.zeros(self.structure.total_dim, dtype=complex)
        for mu, (x, psi) in enumerate(zip(self.weights, self.components)):
            if psi is not None:
                out[self.structure.index(mu)] = x * psi
        return out


def decompose(state, s: BlockStructure, tol: float = TOL) -> PureBlockState:
    v = as_state_vector(state, s, tol)
    weights = np.empty(s.num_blocks)
    comps = []
    for mu in range(s.num_blocks):
        part = v[s.index(mu)]
        x = np.linalg.norm(part)
        weights[mu] = x
        comps.append(part / x if x > tol else None)
    return PureBlockState(v, s, weights, tuple(comps))


def uniform_component(n: int) -> np.ndarray:
    """Uniform superposition of ``n`` basis vectors (the block's own maximally coherent state)."""
    return np.full(n, 1.0 / np.sqrt(n), dtype=complex)


def block_state(s: BlockStructure, weights, components=None) -> PureBlockState:
    """Assemble ``sum_mu w_mu |mu> (x) |c_mu>``; components default to uniform superpositions."""
    weights = np.asarray(weights, dtype=complex)
    if weights.size != s.num_blocks:
        raise DimensionMismatch(f"{weights.size} weights for {s.num_blocks} blocks")
    if components is None:
        components = [uniform_component(n) for n in s.dims]
    if len(components) != s.num_blocks:
        raise DimensionMismatch(f"{len(components)} components for {s.num_blocks} blocks")
    v = np.zeros(s.total_dim, dtype=complex)
    for mu, c in enumerate(components):
        c = np.asarray(c, dtype=complex).reshape(-1)
        if c.size != s.dims[mu]:
            raise DimensionMismatch(f"component {mu} has length {c.size}, block has {s.dims[mu]}")
        n = np.linalg.norm(c)
        if abs(n - 1.0) > TOL:
            raise NotNormalized(f"component {mu} has norm {n:.12g}")
        v[s.index(mu)] = weights[mu] * c
    return decompose(v / np.linalg.norm(v), s)


def maximally_coherent_state(s: BlockStructure, components=None) -> PureBlockState:
    """Equal weight ``1/sqrt(M)`` on every block."""
    return block_state(s, np.full(s.num_blocks, 1.0 / np.sqrt(s.num_blocks)), components)


def block_dephase(rho, s: BlockStructure) -> np.ndarray:
    """``sum_mu pi_mu rho pi_mu``: zero every cross-block entry."""
    rho = np.asarray(rho)
    _check_dim(rho.shape[0], s)
    lab = s.block_of()
    mask = lab[:, None] == lab[None, :]
    return np.where(mask, rho, 0)


def incoherent_mixture(s: BlockStructure, probs, blocks) -> np.ndarray:
    """``sum_mu p_mu |mu><mu| (x) rho_mu`` for given per-block density matrices."""
    d = s.total_dim
    out = np.zeros((d, d), dtype=complex)
    for mu, (p, r) in enumerate(zip(probs, blocks)):
        out[np.ix_(s.index(mu), s.index(mu))] = p * np.asarray(r)
    return out


# --------------------------------------------------------------------------
# random inputs and products


def haar_random_unitary(n: int, seed=None) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary.

    QR of a complex Ginibre matrix with the phases of ``diag(R)`` moved into
    ``Q`` (Mezzadri's correction); without it the distribution is not Haar.
    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def block_diagonal_unitary(s: BlockStructure, seed=None) -> np.ndarray:
    """``U = (+)_mu u_mu`` with independent Haar blocks."""
    rng = np.random.default_rng(seed)
    return assemble(
        [
            [haar_random_unitary(s.dims[mu], rng) if mu == nu else np.zeros((s.dims[mu], s.dims[nu]))
             for nu in range(s.num_blocks)]
            for mu in range(s.num_blocks)
        ],
        s,
    )


def random_state(d: int, seed=None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density(d: int, seed=None, rank: int | None = None) -> np.ndarray:
    """Random density matrix ``G G^dag / tr`` with ``G`` a ``d x rank`` Ginibre matrix."""
    rng = np.random.default_rng(seed)
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_incoherent_density(s: BlockStructure, seed=None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(s.num_blocks))
    return incoherent_mixture(s, p, [random_density(n, rng) for n in s.dims])


def tensor(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: int) -> np.ndarray:
    """Reduced state of subsystem ``keep`` of a bipartite (or multipartite) operator."""
    dims = list(dims)
    n = len(dims)
    r = rho.reshape(dims + dims)
    for ax in reversed(range(n)):
        if ax == keep:
            continue
        cur = r.ndim // 2
        r = np.trace(r, axis1=ax, axis2=ax + cur)
    return r


def fidelity_pure(rho: np.ndarray, psi) -> float:
    """``<psi| rho |psi>`` for a pure reference state."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return float(np.real(psi.conj() @ rho @ psi))
