"""Numerical search for Kings: states whose multipoles vanish up to a target rank.

The objective ``A_M`` is a quartic form in the amplitudes divided by the
squared norm, so it is smooth everywhere except the origin. Each restart
runs BFGS from a random complex vector with the analytic gradient, and the
winning restart is polished by Levenberg-Marquardt on the multipoles
themselves (a zero-residual least-squares problem, so convergence there is
quadratic and the final ``A_M`` lands near rounding level).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize
from scipy.spatial.distance import pdist

from .majorana import Constellation
from .multipole import anticoherence_order, cumulative_a, multipoles, tensor_operators
from .spin_core import SpinState, new_state


@dataclass(frozen=True)
class SearchConfig:
    """Budget and target for :func:`find_king`.

    ``cyclic = n`` restricts the search to states that pick up only a phase
    under rotation by ``2 pi / n`` about z, i.e. amplitudes live on
    ``m = S, S - n, S - 2n, ...``. Constellations then consist of rings of
    ``n`` points about the z axis (plus polar points). ``real`` keeps every
    amplitude real, which imposes a mirror plane through the z axis.
    """

    two_s: int
    target_order: int
    restarts: int = 64
    max_iters: int = 2000
    tol: float = 1e-10
    rng_seed: int = 0
    cyclic: int = 1
    real: bool = False

    def __post_init__(self):
        if self.two_s < 1:
            raise ValueError("two_s must be >= 1")
        if not 1 <= self.target_order <= self.two_s:
            raise ValueError(f"target_order must be in 1..{self.two_s}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")
        if self.cyclic < 1:
            raise ValueError("cyclic must be >= 1")


@dataclass(frozen=True, eq=False)
class SearchResult:
    state: SpinState
    achieved_order: int
    objective: float
    restarts_used: int
    seed: int
    reached_tol: bool
    restart_objectives: np.ndarray = field(repr=False)


def objective(state: SpinState, m_order: int) -> float:
    """``A_M`` of ``state``; zero exactly for ``M``-th order anticoherent states."""
    return cumulative_a(multipoles(state), m_order)


class _Objective:
    """``A_M(v / |v|)`` and its gradient over real coordinates of the free amplitudes."""

    def __init__(self, two_s: int, m_order: int, free: np.ndarray, real: bool):
        self.dim = two_s + 1
        self.t = tensor_operators(two_s)[1 : (m_order + 1) ** 2]
        self.th = self.t.conj().T.tocsr()
        self.free = free
        self.nf = free.size
        self.real = real
        self.size = self.nf if real else 2 * self.nf - 1

    def vector(self, x: np.ndarray) -> np.ndarray:
        # first free amplitude is kept real: it absorbs the global phase
        v = np.zeros(self.dim, dtype=complex)
        v[self.free] = x[: self.nf]
        if not self.real:
            v[self.free[1:]] += 1j * x[self.nf :]
        return v

    def rho(self, v: np.ndarray) -> np.ndarray:
        n = np.vdot(v, v).real
        return self.t @ np.outer(v.conj(), v).ravel() / n

    def value_grad(self, x: np.ndarray):
        v = self.vector(x)
        n = np.vdot(v, v).real
        g = self.t @ np.outer(v.conj(), v).ravel()
        a = np.vdot(g, g).real / n**2
        gm = (self.th @ g).reshape(self.dim, self.dim).conj()  # sum_j conj(g_j) T_j
        dv = (gm @ v + gm.conj().T @ v) / n**2 - 2 * a * v / n
        dv = dv[self.free]
        if self.real:
            return a, 2 * dv.real
        return a, np.concatenate([2 * dv.real, 2 * dv[1:].imag])

    def residual(self, x: np.ndarray) -> np.ndarray:
        r = self.rho(self.vector(x))
        return np.concatenate([r.real, r.imag])


def _free_indices(two_s: int, cyclic: int) -> np.ndarray:
    return np.arange(0, two_s + 1, cyclic)


def find_king(config: SearchConfig) -> SearchResult:
    """Multi-start minimization of ``A_M``; deterministic for a given config.

    Restart ``k`` draws its start from the ``k``-th child of
    ``SeedSequence(config.rng_seed)``. Every restart runs, then one is
    chosen: among restarts that reach ``tol``, the one with the most
    vanishing multipole ranks above the target (the most isotropic
    solution), earliest restart on ties; if none reaches ``tol``, the
    lowest objective. The choice is polished and returned. Falling short of
    ``tol`` is reported through ``reached_tol``, not raised.
    """
    free = _free_indices(config.two_s, config.cyclic)
    obj = _Objective(config.two_s, config.target_order, free, config.real)
    children = np.random.SeedSequence(config.rng_seed).spawn(config.restarts)
    values = np.empty(config.restarts)
    points = []
    for child in children:
        rng = np.random.default_rng(child)
        x0 = rng.standard_normal(obj.size)
        res = minimize(
            obj.value_grad, x0, jac=True, method="BFGS",
            options={"maxiter": config.max_iters, "gtol": 1e-14},
        )
        values[len(points)] = res.fun
        points.append(res.x)
    best = _select(config, obj, values, points)
    x = points[best]
    with np.errstate(all="ignore"):
        # LM needs at least as many residuals as unknowns; low orders are underdetermined
        method = "lm" if 2 * obj.t.shape[0] >= x.size else "trf"
        polished = least_squares(obj.residual, x, method=method, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if np.all(np.isfinite(polished.x)) and obj.value_grad(polished.x)[0] <= values[best]:
        x = polished.x
    state = new_state(config.two_s, obj.vector(x))
    value = objective(state, config.target_order)
    order = anticoherence_order(state, tol=config.tol)
    return SearchResult(
        state=state,
        achieved_order=order,
        objective=value,
        restarts_used=config.restarts,
        seed=config.rng_seed,
        reached_tol=value < config.tol,
        restart_objectives=values,
    )


def _extra_zeros(state: SpinState, above: int, tol: float) -> int:
    power = multipoles(state).power()
    return int(np.count_nonzero(power[above + 1 :] < tol))


def _select(config: SearchConfig, obj: _Objective, values: np.ndarray, points) -> int:
    hits = np.flatnonzero(values < config.tol)
    if hits.size == 0:
        return int(np.argmin(values))  # first index on ties
    zeros = [
        _extra_zeros(new_state(config.two_s, obj.vector(points[k])), config.target_order, config.tol)
        for k in hits
    ]
    return int(hits[int(np.argmax(zeros))])


def signature(constellation: Constellation) -> np.ndarray:
    """All pairwise chordal distances between points, sorted ascending."""
    return np.sort(pdist(constellation.xyz))


def match(a: Constellation, b: Constellation, tol: float = 1e-6) -> bool:
    """Whether the two signatures agree elementwise within ``tol``.

    Equal signatures are necessary for the constellations to be congruent,
    not sufficient; this is a signature test, not a congruence proof.
    """
    if a.two_s != b.two_s:
        raise ValueError(f"size mismatch: two_s {a.two_s} vs {b.two_s}")
    return bool(np.all(np.abs(signature(a) - signature(b)) <= tol))
