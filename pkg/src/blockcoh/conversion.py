"""Pure-state conversion by block-incoherent operations.

Pipeline for ``|Psi_x> -> |Psi_y>``:

1. Strip the within-block components with block-diagonal unitaries, leaving
   ``|Phi_x> = sum_mu x_mu |mu> (x) |phi_mu>`` with ``phi_mu`` uniform.
2. Sort both weight vectors descending.  Block permutations are free; when
   paired blocks differ in dimension the permutation lives inside the Kraus
   operators as a partial isometry.
3. Solve the cyclic system ``gamma_0^2 y_mu^2 + sum_s gamma_s^2 y_{mu-s}^2 = x_mu^2``.
   A nonnegative solution gives the shift family of Kraus operators.
4. For ``M >= 3`` that cyclic family does not reach every majorized pair.  When
   it fails but ``x`` is still majorized by ``y``, a doubly stochastic ``D``
   with ``x^2 = D y^2`` is built from T-transforms and expanded into block
   permutations, one Kraus family per permutation.

Every Kraus family is indexed by a *slot map* ``pi`` with weight ``w``: sorted
source slot ``j`` is sent to sorted target slot ``pi[j]``.  A cyclic shift by
``s`` is ``pi[j] = j - s (mod M)`` with ``w = gamma_s^2``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .channels import KrausChannel, apply, classify_block_incoherent, validate_cptp
from .core import (
    BlockStructure,
    PureBlockState,
    assemble,
    fidelity_pure,
    uniform_component,
)
from .errors import (
    CertificateViolation,
    DimensionMismatch,
    Infeasible,
    NotAConversion,
    NotIncoherent,
    NotNormalized,
    SingularSystem,
    VerificationFailed,
    ZeroWeightPolicy,
)

PROB_TOL = 1e-9
MAJ_TOL = 1e-12
GAMMA_CLAMP = 1e-10
ZERO_WEIGHT = 1e-9


def probability_vector(p) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(-1)
    if np.any(np.isnan(p)):
        raise NotNormalized("probability vector contains NaN")
    if np.any(p < -PROB_TOL) or abs(p.sum() - 1.0) > PROB_TOL:
        raise NotNormalized(f"not a probability vector: {p.tolist()}")
    return np.clip(p, 0.0, None)


def _padded(p, q):
    n = max(p.size, q.size)
    return np.pad(p, (0, n - p.size)), np.pad(q, (0, n - q.size))


def majorization_gap(p, q) -> np.ndarray:
    """Prefix sums of sorted ``p`` minus those of sorted ``q``."""
    p, q = _padded(probability_vector(p), probability_vector(q))
    return np.cumsum(np.sort(p)[::-1]) - np.cumsum(np.sort(q)[::-1])


def majorizes(p, q, tol: float = MAJ_TOL) -> bool:
    """True iff ``p`` majorizes ``q`` (``q`` is the more spread-out vector)."""
    return bool(np.all(majorization_gap(p, q) >= -tol))


def first_failing_prefix(p, q, tol: float = MAJ_TOL) -> int | None:
    """1-based length of the first prefix where ``p`` fails to dominate ``q``."""
    bad = np.nonzero(majorization_gap(p, q) < -tol)[0]
    return int(bad[0]) + 1 if bad.size else None


def sample_majorized(y, rng, terms: int = 3) -> np.ndarray:
    """A random probability vector majorized by ``y``: a convex mix of permutations of ``y``."""
    y = probability_vector(y)
    w = rng.dirichlet(np.ones(terms))
    x = sum(wi * y[rng.permutation(y.size)] for wi in w)
    return x / x.sum()


def circulant(y) -> np.ndarray:
    """``C[mu, s] = y[mu - s]`` (cyclic)."""
    y = np.asarray(y, dtype=float)
    m = y.size
    return np.array([[y[(mu - s) % m] for s in range(m)] for mu in range(m)])


def solve_gammas(x, y) -> np.ndarray:
    """Nonnegative ``gamma_s^2`` solving the cyclic trace-preservation system.

    ``x`` and ``y`` are the sorted probability vectors of source and target.
    Raises :class:`Infeasible` (with the raw solution as ``detail``) when some
    component is below ``-1e-10`` and :class:`SingularSystem` when the
    circulant of ``y`` is not invertible.
    """
    x = probability_vector(x)
    y = probability_vector(y)
    if x.size != y.size:
        raise DimensionMismatch(f"{x.size} source weights vs {y.size} target weights")
    if np.allclose(x, y, atol=1e-14, rtol=0):
        g = np.zeros(x.size)
        g[0] = 1.0
        return g
    if not majorizes(y, x):
        k = first_failing_prefix(y, x)
        raise Infeasible(f"x is not majorized by y (prefix sum {k} fails)")
    c = circulant(y)
    if np.linalg.cond(c) > 1e12:
        g = np.linalg.lstsq(c, x, rcond=None)[0]
        if np.max(np.abs(c @ g - x)) > 1e-9:
            raise Infeasible(f"cyclic system for y={y.tolist()} has no solution", detail=g)
        raise SingularSystem(f"circulant of y={y.tolist()} is singular")
    g = np.linalg.solve(c, x)
    if np.any(g < -GAMMA_CLAMP):
        raise Infeasible(f"cyclic system has negative solution {g.tolist()}", detail=g)
    return np.clip(g, 0.0, None)


def shift_maps(gammas) -> list[tuple[tuple[int, ...], float]]:
    m = len(gammas)
    return [(tuple((j - s) % m for j in range(m)), float(g)) for s, g in enumerate(gammas)]


def t_transform_maps(x, y) -> list[tuple[tuple[int, ...], float]]:
    """Slot maps ``(pi, w)`` with ``x[j] = sum_pi w * y[pi[j]]``, for sorted ``x`` majorized by ``y``.

    Moves mass between pairs of entries of ``y`` (T-transforms) until it
    equals ``x``.  Each T-transform is ``lam * I + (1 - lam) * swap``, so the
    product expands exactly into at most ``2^(M-1)`` permutations.
    """
    x = np.asarray(x, dtype=float)
    cur = np.asarray(y, dtype=float).copy()
    m = x.size
    mix: dict[tuple[int, ...], float] = {tuple(range(m)): 1.0}
    for _ in range(4 * m):
        diff = cur - x
        if np.max(np.abs(diff)) <= 1e-15:
            break
        above = np.nonzero(diff > 1e-15)[0]
        below = np.nonzero(diff < -1e-15)[0]
        if not above.size or not below.size:
            break
        j = int(above[-1])
        later = below[below > j]
        if not later.size:
            break
        k = int(later[0])
        delta = min(cur[j] - x[j], x[k] - cur[k])
        lam = 1.0 - delta / (cur[j] - cur[k])
        # new[j] = lam*cur[j] + (1-lam)*cur[k]; new[k] symmetric.
        nxt: dict[tuple[int, ...], float] = {}
        for perm, w in mix.items():
            sw = list(perm)
            sw[j], sw[k] = sw[k], sw[j]
            for p, ww in ((perm, w * lam), (tuple(sw), w * (1 - lam))):
                if ww > 0:
                    nxt[p] = nxt.get(p, 0.0) + ww
        mix = nxt
        cur[j], cur[k] = cur[j] - delta, cur[k] + delta
    return sorted(mix.items())


# --------------------------------------------------------------------------
# Kraus construction


def unitary_with_first_column(v) -> np.ndarray:
    """A unitary whose first column is exactly ``v``."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    n = v.size
    q, _ = np.linalg.qr(np.column_stack([v, np.eye(n, dtype=complex)]))
    q = q[:, :n]
    q[:, 0] *= np.vdot(q[:, 0], v)
    return q


def component_unitary(s: BlockStructure, components) -> np.ndarray:
    """``(+)_mu W_mu`` with ``W_mu phi_mu = components[mu]`` (identity for ``None``)."""
    blocks = []
    for mu, n in enumerate(s.dims):
        row = []
        for nu, m in enumerate(s.dims):
            if mu != nu:
                row.append(np.zeros((n, m)))
            elif components[mu] is None:
                row.append(np.eye(n))
            else:
                phi = uniform_component(n)
                row.append(unitary_with_first_column(components[mu]) @ unitary_with_first_column(phi).conj().T)
        blocks.append(row)
    return assemble(blocks, s)


@dataclass(frozen=True)
class KrausLabel:
    """Provenance of one Kraus operator.

    ``kind`` is ``"diag"`` (identity slot map with matched dimensions),
    ``"family"`` (one member ``I`` of a measure-and-prepare family) or
    ``"null"`` (projector onto empty source blocks).
    """

    kind: str
    slot_map: tuple[int, ...] = ()
    index: tuple[int, ...] = ()
    shift: int | None = None


@dataclass
class ConversionPlan:
    structure: BlockStructure
    source_order: tuple[int, ...]
    target_order: tuple[int, ...]
    x_sorted: np.ndarray
    y_sorted: np.ndarray
    feasible: bool
    method: str = ""
    gammas: np.ndarray | None = None
    slot_maps: list = field(default_factory=list)
    channel: KrausChannel | None = None
    labels: list = field(default_factory=list)
    constants: np.ndarray | None = None
    message: str = ""
    circulant_solution: np.ndarray | None = None
    canonical_kraus: list = field(default_factory=list)


def _family_kraus(s, src_blocks, dst_blocks, xs, ys, pi, w):
    """Kraus operators sending sorted source slot ``j`` to target slot ``pi[j]``.

    ``A_I = sqrt(w / dslash) sum_j (y_{pi j} / x_j) sqrt(d_j) |phi_{pi j}><e_{i_j}|``
    over all index tuples ``I``; each maps ``|Phi_x>`` to ``sqrt(w / dslash) |Phi_y>``.
    """
    d = s.total_dim
    dims = [s.dims[b] for b in src_blocks]
    dslash = int(np.prod(dims))
    pref = np.sqrt(w / dslash)
    out = []
    for tup in itertools.product(*[range(n) for n in dims]):
        k = np.zeros((d, d), dtype=complex)
        for j, b in enumerate(src_blocks):
            t = dst_blocks[pi[j]]
            coef = pref * ys[pi[j]] / xs[j] * np.sqrt(dims[j])
            if coef == 0:
                continue
            rows = s.index(t)
            col = s.index(b)[tup[j]]
            k[rows, col] = coef * uniform_component(rows.size)
        out.append((k, tuple(tup)))
    return out, pref


def _diag_kraus(s, src_blocks, dst_blocks, xs, ys, w):
    d = s.total_dim
    k = np.zeros((d, d), dtype=complex)
    for j, b in enumerate(src_blocks):
        t = dst_blocks[j]
        k[s.index(t), s.index(b)] = np.sqrt(w) * ys[j] / xs[j]
    return k, np.sqrt(w)


def _descending_order(p) -> tuple[int, ...]:
    """Stable descending order; weights equal to 12 digits count as ties."""
    return tuple(int(i) for i in np.argsort(-np.round(p, 12), kind="stable"))


def build_conversion_channel(src: PureBlockState, dst: PureBlockState, allow_birkhoff: bool = True) -> ConversionPlan:
    """Explicit block-incoherent channel taking ``src`` to ``dst``.

    Returns a plan with ``feasible=False`` (and a diagnostic ``message``)
    when ``dst`` does not majorize ``src``.  With ``allow_birkhoff=False``
    only the cyclic shift family is tried.
    """
    s = src.structure
    if dst.structure != s:
        raise DimensionMismatch("source and target use different block structures")
    m = s.num_blocks
    px, py = src.probabilities, dst.probabilities
    sx, sy = _descending_order(px), _descending_order(py)
    xs, ys = src.weights[list(sx)], dst.weights[list(sy)]
    plan = ConversionPlan(s, sx, sy, xs**2, ys**2, feasible=False)

    if not majorizes(py, px):
        k = first_failing_prefix(py, px)
        plan.message = (
            f"target does not majorize source: prefix sum {k} of sorted y^2 is "
            f"{np.cumsum(ys**2)[k - 1]:.6g} < {np.cumsum(xs**2)[k - 1]:.6g} for x^2"
        )
        return plan

    # Deflate the shared zero tail; A0 divides by x.
    active = int(np.count_nonzero(xs > ZERO_WEIGHT))
    if np.any(ys[active:] > ZERO_WEIGHT):
        raise ZeroWeightPolicy("target has weight in a slot where the source weight vanishes")
    xa, ya = xs[:active], ys[:active]
    pxa, pya = xa**2 / np.sum(xa**2), ya**2 / np.sum(ya**2)

    try:
        g = solve_gammas(pxa, pya)
        plan.method, plan.gammas = "circulant", g
        maps = shift_maps(g)
    except (Infeasible, SingularSystem) as exc:
        plan.circulant_solution = getattr(exc, "detail", None)
        if not allow_birkhoff:
            plan.message = f"cyclic shift family infeasible: {exc}"
            return plan
        plan.method = "birkhoff"
        maps = t_transform_maps(pxa, pya)
    plan.slot_maps = maps

    src_blocks, dst_blocks = list(sx[:active]), list(sy[:active])
    identity = tuple(range(active))
    dims_match = all(s.dims[a] == s.dims[b] for a, b in zip(src_blocks, dst_blocks))
    kraus, labels, consts = [], [], []
    for pi, w in maps:
        if w <= 0:
            continue
        shift = None
        if plan.method == "circulant":
            shift = (-pi[0]) % active if active else 0
        if pi == identity and dims_match:
            k, c = _diag_kraus(s, src_blocks, dst_blocks, xa, ya, w)
            kraus.append(k)
            labels.append(KrausLabel("diag", pi, (), shift))
            consts.append(c)
        else:
            fam, c = _family_kraus(s, src_blocks, dst_blocks, xa, ya, pi, w)
            for k, tup in fam:
                kraus.append(k)
                labels.append(KrausLabel("family", pi, tup, shift))
                consts.append(c)
    empty = [b for b in sx[active:]]
    if empty:
        kraus.append(sum(s.projector(b) for b in empty).astype(complex))
        labels.append(KrausLabel("null"))
        consts.append(0.0)

    plan.canonical_kraus = kraus
    u_src = component_unitary(s, src.components)
    u_dst = component_unitary(s, dst.components)
    # Unitaries are built on the full structure; phases of dst come from its components.
    full = [u_dst @ k @ u_src.conj().T for k in kraus]
    plan.channel = KrausChannel(tuple(full), s)
    plan.labels = labels
    plan.constants = np.array(consts)
    plan.feasible = True
    plan.message = f"feasible via {plan.method} ({len(full)} Kraus operators)"
    return plan


# --------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class ConversionReport:
    proportionality_error: float
    cptp_residual: float
    block_incoherent: bool
    fidelity: float

    @property
    def passed(self) -> bool:
        return (
            self.proportionality_error <= 1e-9
            and self.cptp_residual <= 1e-9
            and self.block_incoherent
            and self.fidelity >= 1 - 1e-9
        )


def verify_conversion(plan: ConversionPlan, src: PureBlockState, dst: PureBlockState) -> ConversionReport:
    """Check proportionality, completeness, incoherence and output fidelity; raise on the first failure."""
    if not plan.feasible or plan.channel is None:
        raise VerificationFailed("feasibility", plan.message or "plan is not feasible")
    ch = plan.channel
    a, b = src.amplitudes, dst.amplitudes
    prop = max(float(np.linalg.norm(k @ a - c * b)) for k, c in zip(ch.kraus, plan.constants))
    if prop > 1e-9:
        raise VerificationFailed("proportionality", f"max deviation {prop:.3g}")
    ok, res = validate_cptp(ch)
    if not ok:
        raise VerificationFailed("completeness", f"residual {res:.3g}")
    verdict = classify_block_incoherent(ch)
    if not verdict.is_block_incoherent:
        raise VerificationFailed("incoherence", f"{len(verdict.violations)} column violations")
    fid = fidelity_pure(apply(ch, src.density()), b)
    if fid < 1 - 1e-9:
        raise VerificationFailed("fidelity", f"fidelity {fid:.12g}")
    return ConversionReport(prop, res, True, fid)


# --------------------------------------------------------------------------
# necessity certificate


@dataclass(frozen=True)
class NecessityCertificate:
    alphas: np.ndarray
    slot_permutations: tuple[tuple[int, ...], ...]
    B: np.ndarray
    mixed: np.ndarray
    x: np.ndarray
    y: np.ndarray

    @property
    def chain(self) -> tuple[bool, bool]:
        return majorizes(self.mixed, self.x, 1e-8), majorizes(self.y, self.mixed, 1e-8)


def triangular_permutation(block_map, m: int) -> tuple[int, ...]:
    """Permutation ``P`` with ``block_map = P o a'`` and ``a'(mu) <= mu``.

    Slot ``min{mu : a(mu) = t}`` is sent to target ``t``; leftover slots fill
    leftover targets in increasing order.
    """
    perm = [None] * m
    used = set()
    for mu in range(m):
        t = block_map[mu]
        if t is not None and t not in used:
            perm[mu] = t
            used.add(t)
    free = iter(t for t in range(m) if t not in used)
    for mu in range(m):
        if perm[mu] is None:
            perm[mu] = next(free)
    return tuple(perm)


def necessity_certificate(ch: KrausChannel, src: PureBlockState, dst: PureBlockState) -> NecessityCertificate:
    """Doubly stochastic ``B`` with ``x^2 <= B y^2 <= y^2`` in the majorization order.

    ``alpha_a = <dst| K_a |src>``; ``B[mu, nu]`` collects ``|alpha_a|^2`` over
    Kraus operators whose slot permutation sends ``mu`` to ``nu``.
    """
    verdict = classify_block_incoherent(ch)
    if not verdict.is_block_incoherent:
        raise NotIncoherent(f"{len(verdict.violations)} column violations")
    fid = fidelity_pure(apply(ch, src.density()), dst.amplitudes)
    if fid < 1 - 1e-8:
        raise NotAConversion(f"output fidelity {fid:.12g}")
    m = src.structure.num_blocks
    alphas = np.array([np.vdot(dst.amplitudes, k @ src.amplitudes) for k in ch.kraus])
    total = float(np.sum(np.abs(alphas) ** 2))
    if abs(total - 1) > 1e-8:
        raise CertificateViolation(f"sum |alpha|^2 = {total:.12g}")
    perms = tuple(triangular_permutation(a, m) for a in verdict.block_maps)
    B = np.zeros((m, m))
    for al, p in zip(alphas, perms):
        for mu in range(m):
            B[mu, p[mu]] += abs(al) ** 2
    if np.max(np.abs(B.sum(0) - 1)) > 1e-8 or np.max(np.abs(B.sum(1) - 1)) > 1e-8:
        raise CertificateViolation("B is not doubly stochastic")
    x, y = src.probabilities, dst.probabilities
    mixed = B @ y
    cert = NecessityCertificate(alphas, perms, B, mixed, x, y)
    lo, hi = cert.chain
    if not (lo and hi):
        raise CertificateViolation(f"majorization chain broken (x<=By: {lo}, By<=y: {hi})")
    return cert
