"""Multi-start projected gradient ascent on products of complex unit spheres.

Objectives with kinks (sums of norms that can vanish) stall plain ascent at
the kink.  Callers can pass a smoothed family ``eps -> (f_eps, grad_eps)``;
each start is then first carried through the ``smoothing`` schedule with
L-BFGS on the unnormalized coordinates, and finished with the exact ascent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize


@dataclass(frozen=True)
class OptimizerOptions:
    restarts: int = 32
    seed: int = 0
    max_iter: int = 500
    tol: float = 1e-10
    fd_step: float = 1e-7
    init_step: float = 0.2
    smoothing: tuple[float, ...] = (1e-2, 1e-4, 1e-6)


@dataclass(frozen=True)
class AscentResult:
    value: float
    point: list
    values: tuple[float, ...] = field(repr=False)
    iterations: tuple[int, ...] = field(repr=False)

    @property
    def gap(self) -> float:
        """Best minus second-best restart value (0 when only one restart ran)."""
        v = sorted(self.values, reverse=True)
        return v[0] - v[1] if len(v) > 1 else 0.0


def _split(z: np.ndarray, sizes: Sequence[int]) -> list[np.ndarray]:
    return np.split(z, np.cumsum(sizes)[:-1])


def _normalize(z: np.ndarray, sizes) -> np.ndarray:
    return np.concatenate([p / np.linalg.norm(p) for p in _split(z, sizes)])


def _random_point(rng, sizes) -> np.ndarray:
    z = rng.standard_normal(sum(sizes)) + 1j * rng.standard_normal(sum(sizes))
    return _normalize(z, sizes)


def _gradient(f, z: np.ndarray, h: float) -> np.ndarray:
    """Central-difference gradient; the imaginary part holds d/d(Im z)."""
    g = np.zeros_like(z)
    for i in range(z.size):
        for unit in (1.0, 1j):
            e = np.zeros_like(z)
            e[i] = unit * h
            g[i] += unit * (f(z + e) - f(z - e)) / (2 * h)
    return g


def _tangent(g: np.ndarray, z: np.ndarray, sizes) -> np.ndarray:
    out = []
    for gp, zp in zip(_split(g, sizes), _split(z, sizes)):
        out.append(gp - np.real(np.vdot(zp, gp)) * zp)
    return np.concatenate(out)


def ascend(f: Callable[[np.ndarray], float], z0: np.ndarray, sizes, opts: OptimizerOptions,
           grad: Callable[[np.ndarray], np.ndarray] | None = None) -> tuple[np.ndarray, float, int]:
    """Single-start ascent from ``z0``; returns ``(point, value, iterations)``.

    ``f`` is evaluated on unnormalized perturbations when differencing, so it
    must normalize internally.  ``grad``, if given, returns
    ``df/dRe z + i df/dIm z`` at a point on the spheres.
    """
    z = _normalize(np.asarray(z0, dtype=complex), sizes)
    val = f(z)
    step = opts.init_step
    it = 0
    for it in range(1, opts.max_iter + 1):
        g = _tangent(grad(z) if grad is not None else _gradient(f, z, opts.fd_step), z, sizes)
        gn = np.linalg.norm(g)
        if gn < 1e-14:
            break
        improved = False
        while step > 1e-14:
            cand = _normalize(z + step * g / gn, sizes)
            cv = f(cand)
            if cv > val:
                gain = cv - val
                z, val = cand, cv
                step *= 1.5
                improved = True
                break
            step *= 0.5
        if not improved or gain < opts.tol:
            break
    return z, val, it


def _smoothed_stage(f, grad, z: np.ndarray, sizes, opts: OptimizerOptions) -> np.ndarray:
    """L-BFGS on ``x -> f(normalize(x))`` starting at ``z``; returns the normalized endpoint."""
    n = z.size

    def fun(x):
        raw = x[:n] + 1j * x[n:]
        zn = _normalize(raw, sizes)
        g = grad(zn) if grad is not None else _gradient(f, zn, opts.fd_step)
        parts = [(gp - np.real(np.vdot(zp, gp)) * zp) / np.linalg.norm(rp)
                 for gp, zp, rp in zip(_split(g, sizes), _split(zn, sizes), _split(raw, sizes))]
        gr = np.concatenate(parts)
        return -f(zn), -np.concatenate([gr.real, gr.imag])

    res = minimize(fun, np.concatenate([z.real, z.imag]), jac=True, method="L-BFGS-B",
                   options={"maxiter": opts.max_iter, "gtol": 1e-12, "ftol": 1e-15})
    return _normalize(res.x[:n] + 1j * res.x[n:], sizes)


def maximize(
    f: Callable[[np.ndarray], float],
    sizes: Sequence[int],
    opts: OptimizerOptions = OptimizerOptions(),
    starts: Sequence[np.ndarray] | None = None,
    grad: Callable[[np.ndarray], np.ndarray] | None = None,
    smoothed: Callable[[float], tuple[Callable, Callable | None]] | None = None,
) -> AscentResult:
    """Best of several ascents.  Ties go to the lowest restart index.

    ``smoothed(eps)`` returns ``(f_eps, grad_eps)`` (``grad_eps`` may be
    ``None`` for finite differences); it is used only when
    ``opts.smoothing`` is non-empty.  Values are always those of ``f``.
    """
    sizes = [int(n) for n in sizes]
    if starts is None:
        rng = np.random.default_rng(opts.seed)
        starts = [_random_point(rng, sizes) for _ in range(opts.restarts)]
    stages = [smoothed(eps) for eps in opts.smoothing] if smoothed is not None else []
    best = None
    vals, iters = [], []
    for z0 in starts:
        z0 = _normalize(np.asarray(z0, dtype=complex), sizes)
        for fe, ge in stages:
            z0 = _smoothed_stage(fe, ge, z0, sizes, opts)
        z, v, it = ascend(f, z0, sizes, opts, grad)
        vals.append(v)
        iters.append(it)
        if best is None or v > best[1]:
            best = (z, v)
    return AscentResult(best[1], _split(best[0], sizes), tuple(vals), tuple(iters))
