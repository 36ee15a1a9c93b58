"""Block-coherence measures: relative-entropy (closed form) and block l1 (trace norms)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BlockStructure, _check_dim, block, block_dephase, check_density_matrix
from .errors import NotADensityMatrix

EIG_CLAMP = 1e-10


def von_neumann_entropy(rho, base: float = 2.0) -> float:
    """Entropy in bits (``base=2``) with ``0 log 0 = 0``.

    Eigenvalues in ``[-1e-10, 0)`` are round-off and clamped; anything more
    negative is rejected.
    """
    rho = np.asarray(rho, dtype=complex)
    lam = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if lam[0] < -EIG_CLAMP:
        raise NotADensityMatrix(f"negative eigenvalue {lam[0]:.3g}")
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam)) / np.log(base)) + 0.0


def trace_norm(a) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def c_entropy(rho, s: BlockStructure) -> float:
    """``S(rho*) - S(rho)`` where ``rho*`` is the block-dephased state."""
    rho = check_density_matrix(rho)
    _check_dim(rho.shape[0], s)
    return max(von_neumann_entropy(block_dephase(rho, s)) - von_neumann_entropy(rho), 0.0)


def c_l1(rho, s: BlockStructure) -> float:
    """Sum of trace norms of all off-diagonal blocks."""
    rho = np.asarray(rho)
    _check_dim(rho.shape[0], s)
    m = s.num_blocks
    # rho is Hermitian, so the (nu, mu) block has the same trace norm as (mu, nu).
    return 2.0 * sum(trace_norm(block(rho, s, mu, nu)) for mu in range(m) for nu in range(mu + 1, m))


def c_l1_pure(weights) -> float:
    """``sum_{mu != nu} |x_mu x_nu|`` for a pure state with block weights ``x``."""
    w = np.abs(np.asarray(weights))
    return float(w.sum() ** 2 - np.sum(w**2))


def c_entropy_pure(weights) -> float:
    """Shannon entropy (bits) of the block probabilities ``|x_mu|^2``."""
    p = np.abs(np.asarray(weights)) ** 2
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def standard_l1(rho) -> float:
    rho = np.asarray(rho)
    return float(np.sum(np.abs(rho)) - np.sum(np.abs(np.diag(rho))))


@dataclass(frozen=True)
class CoherenceReport:
    c_entropy: float
    c_l1: float
    structure: BlockStructure

    def is_incoherent(self, tol: float = 1e-9) -> bool:
        return self.c_entropy <= tol and self.c_l1 <= tol


def coherence_report(rho, s: BlockStructure) -> CoherenceReport:
    return CoherenceReport(c_entropy(rho, s), c_l1(rho, s), s)


def coherence_rank(psi, tol: float = 1e-9) -> int:
    """Number of amplitudes with modulus above ``tol``."""
    return int(np.count_nonzero(np.abs(np.asarray(psi).reshape(-1)) > tol))
