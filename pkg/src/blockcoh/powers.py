"""Block-cohering and block-decohering powers.

Generic routines evaluate the channel on candidate inputs and measure the
output; the ``*_unitary`` and ``bcp_random_unitary`` routines optimize the
closed-form objectives instead.  Both are searched with the same multi-start
sphere ascent, so the two routes can be cross-checked.

BCP needs only pure inputs supported on one block, ``|nu> (x) |psi_nu>``.
BDP searches over maximally coherent inputs ``(1/sqrt M) sum_mu |mu> (x) |psi_mu>``,
i.e. over a product of ``M`` unit spheres.  Its objective has kinks wherever an
output block vanishes, which is typical at the optimum, so BDP starts are
first carried through a smoothed version of the objective (see
:mod:`blockcoh.optimize`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import KrausChannel, _apply_linear, validate_cptp
from .core import BlockStructure, _check_dim, block, uniform_structure
from .errors import DimensionMismatch, InvalidMixture, NotCPTP
from .gates import check_unitary
from .measures import c_entropy, c_l1, trace_norm
from .optimize import OptimizerOptions, maximize


@dataclass(frozen=True)
class PowerResult:
    value: float
    block: int | None
    states: tuple = field(repr=False)
    method: str
    restarts: int
    gap: float
    per_block: tuple[float, ...] = ()


def _measure(name: str):
    if name == "l1":
        return c_l1
    if name == "entropy":
        def ent(rho, s):
            return c_entropy(rho / np.trace(rho).real, s)
        return ent
    raise ValueError(f"unknown measure {name!r}")


def _check_channel(ch: KrausChannel, s: BlockStructure) -> None:
    ok, r = validate_cptp(ch)
    if not ok:
        raise NotCPTP(f"completeness residual {r:.3g}")
    if ch.d_in != ch.d_out:
        raise DimensionMismatch("powers are defined for square channels")
    _check_dim(ch.d_in, s, "channel")


def _unit(v):
    return v / np.linalg.norm(v)


def _norm_sum_grad(ops, v, eps: float = 0.0):
    """Gradient of ``(sum_a n_a)^2`` with ``n_a = sqrt(||O_a v||^2 + eps^2)``."""
    outs = [o @ v for o in ops]
    norms = [np.sqrt(np.linalg.norm(w) ** 2 + eps**2) for w in outs]
    g = sum(o.conj().T @ w / max(n, 1e-300) for o, w, n in zip(ops, outs, norms))
    return 2 * sum(norms) * g


def _smooth_trace_norm(a, eps: float) -> float:
    s = np.linalg.svd(a, compute_uv=False)
    return float(np.sum(np.sqrt(s**2 + eps**2)))


def _smooth_c_l1(rho, s: BlockStructure, eps: float) -> float:
    m = s.num_blocks
    return 2 * sum(_smooth_trace_norm(block(rho, s, mu, nu), eps) for mu in range(m) for nu in range(mu + 1, m))


def _best_over_blocks(objective_for_block, s: BlockStructure, opts: OptimizerOptions, method: str,
                      grad_for_block=None) -> PowerResult:
    best = None
    per = []
    for nu in range(s.num_blocks):
        grad = grad_for_block(nu) if grad_for_block is not None else None
        res = maximize(objective_for_block(nu), [s.dims[nu]], opts, grad=grad)
        per.append(res.value)
        if best is None or res.value > best[1].value:
            best = (nu, res)
    nu, res = best
    return PowerResult(max(res.value, 0.0), nu, tuple(res.point), method, len(res.values), res.gap, tuple(per))


# --------------------------------------------------------------------------
# cohering power


def bcp(ch: KrausChannel, s: BlockStructure, opts: OptimizerOptions = OptimizerOptions(), measure: str = "l1") -> PowerResult:
    """Maximum coherence of ``E(|nu><nu| (x) |psi><psi|)`` over ``nu`` and unit ``psi``.

    ``measure="entropy"`` is experimental: there are no closed forms to check it against.
    """
    _check_channel(ch, s)
    meas = _measure(measure)
    d = s.total_dim

    def for_block(nu):
        idx = s.index(nu)

        def f(z):
            v = np.zeros(d, dtype=complex)
            v[idx] = _unit(z)
            return meas(_apply_linear(ch, np.outer(v, v.conj())), s)

        return f

    return _best_over_blocks(for_block, s, opts, "optimized")


def bcp_unitary(u, s: BlockStructure, opts: OptimizerOptions = OptimizerOptions()) -> PowerResult:
    """``max_{nu, psi} (sum_mu ||A_{mu nu} psi||)^2 - 1``."""
    u = check_unitary(u)
    _check_dim(u.shape[0], s, "unitary")
    m = s.num_blocks
    cols = [[block(u, s, mu, nu) for mu in range(m)] for nu in range(m)]

    def for_block(nu):
        def f(z):
            z = _unit(z)
            return sum(np.linalg.norm(a @ z) for a in cols[nu]) ** 2 - 1.0

        return f

    def grad_for_block(nu):
        return lambda z: _norm_sum_grad(cols[nu], z)

    return _best_over_blocks(for_block, s, opts, "closed_form", grad_for_block)


def classical_cohering_power(u) -> float:
    """``max_nu (sum_mu |u_{mu nu}|)^2 - 1`` for an ordinary unitary matrix."""
    return float(np.max(np.sum(np.abs(np.asarray(u)), axis=0) ** 2) - 1.0)


def _check_mixture(terms):
    probs = np.array([float(t[0]) for t in terms])
    if np.any(probs < -1e-12) or abs(probs.sum() - 1) > 1e-9:
        raise InvalidMixture(f"weights {probs.tolist()} are not a probability vector")
    out = []
    for p, uu, vv in terms:
        try:
            out.append((float(p), check_unitary(uu), check_unitary(vv)))
        except ValueError as exc:
            raise InvalidMixture(str(exc)) from exc
    if len({(t[1].shape, t[2].shape) for t in out}) != 1:
        raise InvalidMixture("all terms need the same U and V dimensions")
    return out


def random_unitary_channel(terms, s: BlockStructure | None = None) -> KrausChannel:
    """``rho -> sum_i p_i (U_i (x) V_i) rho (U_i (x) V_i)^dag`` as a Kraus channel."""

    terms = _check_mixture(terms)
    m, n = terms[0][1].shape[0], terms[0][2].shape[0]
    s = uniform_structure(m, n) if s is None else s
    return KrausChannel(tuple(np.sqrt(p) * np.kron(u, v) for p, u, v in terms if p > 0), s)


def bcp_random_unitary(terms, opts: OptimizerOptions = OptimizerOptions()) -> PowerResult:
    """``max_{nu, psi} sum_{mu != mu'} ||B^nu_{mu mu'}||_1`` for a mixture of ``U_i (x) V_i``.

    ``B^nu_{mu mu'} = sum_i p_i (U_i)_{mu nu} conj((U_i)_{mu' nu}) V_i |psi><psi| V_i^dag``.
    """
    terms = _check_mixture(terms)
    m = terms[0][1].shape[0]
    n = terms[0][2].shape[0]

    def for_block(nu):
        def f(z):
            z = _unit(z)
            outs = [v @ z for _, _, v in terms]
            tot = 0.0
            for mu in range(m):
                for mp in range(mu + 1, m):
                    b = sum(p * u[mu, nu] * np.conj(u[mp, nu]) * np.outer(w, w.conj())
                            for (p, u, _), w in zip(terms, outs))
                    tot += 2 * trace_norm(b)
            return tot

        return f

    return _best_over_blocks(for_block, uniform_structure(m, n), opts, "closed_form")


# --------------------------------------------------------------------------
# decohering power


def _mc_vector(z, s: BlockStructure) -> np.ndarray:
    """``(1/sqrt M) (+)_mu psi_mu`` from concatenated (unnormalized) components."""
    m = s.num_blocks
    v = np.zeros(s.total_dim, dtype=complex)
    for mu, part in enumerate(np.split(z, np.cumsum(s.dims)[:-1])):
        v[s.index(mu)] = _unit(part) / np.sqrt(m)
    return v


def bdp(ch: KrausChannel, s: BlockStructure, opts: OptimizerOptions = OptimizerOptions(), measure: str = "l1") -> PowerResult:
    """``C(Psi_MC) - min C(E(Psi_MC))`` over maximally coherent inputs."""
    _check_channel(ch, s)
    meas = _measure(measure)
    m = s.num_blocks
    start_value = (m - 1) if measure == "l1" else float(np.log2(m))

    def f(z):
        v = _mc_vector(z, s)
        return -meas(_apply_linear(ch, np.outer(v, v.conj())), s)

    def smoothed(eps):
        def fe(z):
            v = _mc_vector(z, s)
            return -_smooth_c_l1(_apply_linear(ch, np.outer(v, v.conj())), s, eps)

        return fe, None

    res = maximize(f, s.dims, opts, smoothed=smoothed if measure == "l1" else None)
    comps = tuple(_unit(p) for p in res.point)
    return PowerResult(max(start_value + res.value, 0.0), None, comps, "optimized", len(res.values), res.gap)


def bdp_unitary(u, s: BlockStructure, opts: OptimizerOptions = OptimizerOptions()) -> PowerResult:
    """``M - (1/M) min (sum_alpha ||chi_alpha||)^2`` with ``chi_alpha = sum_mu A_{alpha mu} psi_mu``."""
    u = check_unitary(u)
    _check_dim(u.shape[0], s, "unitary")
    m = s.num_blocks
    rows = [np.asarray(u)[s.index(alpha), :] for alpha in range(m)]

    order = np.concatenate([s.index(mu) for mu in range(m)])

    def smoothed(eps):
        def fe(z):
            v = _mc_vector(z, s) * np.sqrt(m)
            return -sum(np.sqrt(np.linalg.norm(r @ v) ** 2 + eps**2) for r in rows) ** 2

        def ge(z):
            v = np.zeros(s.total_dim, dtype=complex)
            v[order] = z
            return -_norm_sum_grad(rows, v, eps)[order]

        return fe, ge

    f, grad = smoothed(0.0)
    res = maximize(f, s.dims, opts, grad=grad, smoothed=smoothed)
    comps = tuple(_unit(p) for p in res.point)
    return PowerResult(max(m + res.value / m, 0.0), None, comps, "closed_form", len(res.values), res.gap)
