"""Majorana constellations: state <-> 2S points on the unit sphere.

The Majorana polynomial of a state is ``p(z) = sum_k a_k z^k`` with
``a_{S+m} = c_m Psi_m`` and ``c_m = sqrt((2S)! / ((S-m)! (S+m)!))``. A root
``z`` corresponds to the sphere direction

    theta = 2 arctan(1 / |z|),   phi = arg z,

which is exactly where the Husimi function ``Q`` vanishes; roots at
complex infinity (missing top-degree terms, i.e. ``Psi_S = 0``) sit at the
north pole. A coherent state pointing along ``n`` therefore has all of its
``2S`` points at ``-n``, and rotating a state rotates its points rigidly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import linkage, to_tree
from scipy.optimize import least_squares
from scipy.special import comb

from ._fmt import fmt_float
from .multipole import _log_binomial_sqrt
from .spin_core import SpinState, new_state

DISPLAY_CLUSTER_TOL = 1e-7


@dataclass(frozen=True)
class MajoranaPolynomial:
    """Coefficients ``a_k``, ``k = 0 .. 2S`` (ascending powers of ``z``)."""

    coefficients: np.ndarray

    @property
    def two_s(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coefficients)


@dataclass(frozen=True, eq=False)
class Constellation:
    """The ``2S`` Majorana points as ``(theta, phi)`` rows.

    ``points`` always has ``two_s`` rows; the ``infinity_multiplicity``
    points that came from roots at infinity are among them, at
    ``theta = 0``.
    """

    two_s: int
    points: np.ndarray
    infinity_multiplicity: int = 0

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        if len(pts) != self.two_s:
            raise ValueError(f"constellation for two_s={self.two_s} needs {self.two_s} points, got {len(pts)}")
        if not 0 <= self.infinity_multiplicity <= self.two_s:
            raise ValueError("infinity_multiplicity out of range")
        pts[:, 0] = np.clip(pts[:, 0], 0.0, np.pi)
        pts[:, 1] = np.mod(pts[:, 1], 2 * np.pi)
        pts[:, 1][pts[:, 1] >= 2 * np.pi] = 0.0
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def xyz(self) -> np.ndarray:
        return spherical_to_cartesian(self.points[:, 0], self.points[:, 1])

    @classmethod
    def from_xyz(cls, xyz, infinity_multiplicity: int = 0) -> "Constellation":
        xyz = np.atleast_2d(np.asarray(xyz, dtype=float))
        xyz = xyz / np.linalg.norm(xyz, axis=1, keepdims=True)
        theta = np.arccos(np.clip(xyz[:, 2], -1.0, 1.0))
        phi = np.arctan2(xyz[:, 1], xyz[:, 0])
        return cls(len(xyz), np.column_stack([theta, phi]), infinity_multiplicity)

    def clusters(self, tol: float = DISPLAY_CLUSTER_TOL) -> list[tuple[float, float, int]]:
        """Distinct points with multiplicities; points within chordal ``tol`` coincide."""
        xyz = self.xyz
        out: list[tuple[float, float, int]] = []
        members: list[list[int]] = []
        for i, p in enumerate(xyz):
            for grp in members:
                if np.linalg.norm(xyz[grp[0]] - p) <= tol:
                    grp.append(i)
                    break
            else:
                members.append([i])
        for grp in members:
            theta, phi = self.points[grp[0]]
            out.append((float(theta), float(phi), len(grp)))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "theta", "phi", "x", "y", "z"])
        for i, ((theta, phi), (x, y, z)) in enumerate(zip(self.points, self.xyz)):
            w.writerow([i, *(fmt_float(v) for v in (theta, phi, x, y, z))])
        return buf.getvalue()


def spherical_to_cartesian(theta, phi) -> np.ndarray:
    theta, phi = np.asarray(theta, dtype=float), np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def majorana_coefficients(two_s: int) -> np.ndarray:
    """``c_m`` in amplitude order (symmetric in ``m``)."""
    return np.exp(_log_binomial_sqrt(two_s))


def polynomial_from_state(state: SpinState) -> MajoranaPolynomial:
    a_desc = majorana_coefficients(state.two_s) * state.amplitudes  # a_{2S} first
    return MajoranaPolynomial(a_desc[::-1].copy())


def _taylor(a: np.ndarray, z0: complex, upto: int) -> np.ndarray:
    """Taylor coefficients ``b_j = p^{(j)}(z0)/j!`` for ``j <= upto``."""
    n = len(a) - 1
    i = np.arange(n + 1)[:, None]
    j = np.arange(upto + 1)[None, :]
    binom = comb(i, j) * (i >= j)
    powers = np.where(i >= j, z0 ** np.maximum(i - j, 0), 0)
    return (a[:, None] * binom * powers).sum(axis=0)


def _multiple_root(a: np.ndarray, w: np.ndarray) -> complex:
    """Best single location for the ``k = len(w)`` roots ``w`` of ``a`` (ascending).

    A ``k``-fold root is a simple root of ``p^{(k-1)}``; Newton from the
    centroid converges to it quadratically.
    """
    k = len(w)
    z = complex(np.mean(w))
    for _ in range(4):
        b = _taylor(a, z, k)
        if b[k] == 0:
            break
        step = b[k - 1] / (k * b[k])
        z -= step
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return z


def _polish(a: np.ndarray, z: complex, steps: int = 2) -> complex:
    da = np.polynomial.polynomial.polyder(a)
    for _ in range(steps):
        d = np.polynomial.polynomial.polyval(z, da)
        if d == 0:
            break
        step = np.polynomial.polynomial.polyval(z, a) / d
        if not np.isfinite(step):
            break
        z = z - step
    return z


def _root_to_point(z: complex) -> tuple[float, float]:
    r = abs(z)
    theta = 2 * np.arctan2(1.0, r)
    phi = float(np.angle(z)) % (2 * np.pi) if 0 < r < np.inf else 0.0
    return float(theta), phi


def _points_amplitudes(two_s: int, points: np.ndarray) -> np.ndarray:
    """Unnormalized amplitudes whose Majorana points are ``points``."""
    half = points[:, 0] / 2
    alpha = np.sin(half)
    beta = np.cos(half) * np.exp(1j * points[:, 1])
    a = np.array([1.0 + 0j])
    for al, be in zip(alpha, beta):
        a = np.convolve(a, [-be, al])  # factor (alpha z - beta), ascending powers
    return a[::-1] / majorana_coefficients(two_s)


def _state_distance(psi: np.ndarray, two_s: int, points: np.ndarray) -> float:
    """``min_chi || psi - e^{i chi} psi' ||`` for the state ``psi'`` built from ``points``."""
    other = _points_amplitudes(two_s, points)
    other = other / np.linalg.norm(other)
    ov = np.vdot(other, psi)
    phase = ov / abs(ov) if ov != 0 else 1.0
    return float(np.linalg.norm(psi - phase * other))


def _to_points(roots) -> np.ndarray:
    return np.array([_root_to_point(z) for z in roots]).reshape(-1, 2)


def _eigen_roots(a: np.ndarray) -> list[np.ndarray]:
    """Candidate root sets of ``a`` (ascending): companion eigenvalues in the ``z``
    chart, in the ``1/z`` chart, and each chart restricted to the unit disk."""
    n = len(a) - 1
    inner = np.roots(a[::-1])
    with np.errstate(divide="ignore"):
        outer = 1 / np.roots(a) if a[0] != 0 else None
    sets = [inner]
    if outer is not None and len(outer) == n:
        sets.append(outer)
        mixed = np.concatenate([inner[np.abs(inner) <= 1], outer[np.abs(outer) > 1]])
        if len(mixed) == n:
            sets.append(mixed)
    return sets


def _polished(a: np.ndarray, roots: np.ndarray) -> np.ndarray:
    out = []
    for z in roots:
        if abs(z) > 1:
            w = _polish(a[::-1], 1 / z)
            out.append(1 / w if w != 0 else complex(np.inf))
        else:
            out.append(_polish(a, z))
    return np.array(out, dtype=complex)


def _merge_candidates(a: np.ndarray, zs: np.ndarray):
    """Locations for collapsing the roots ``zs`` into one repeated root, tried in both charts."""
    k = len(zs)
    finite = zs[np.isfinite(zs)]
    if len(finite) == k:
        yield _multiple_root(a, zs)
    nz = zs[zs != 0]
    if len(nz) == k and a[0] != 0:
        w = _multiple_root(a[::-1], 1 / nz)
        yield 1 / w if w != 0 else complex(np.inf)


# loose on purpose: while other repeated roots are still scattered, a correct
# collapse can leave a residual many orders above rounding
PLAUSIBLE_MERGE = 1e-3


def _locate_points(state: SpinState, a: np.ndarray, n_inf: int) -> np.ndarray:
    """Sphere points for the finite roots of ``a`` plus ``n_inf`` points at the north pole.

    Companion-matrix eigenvalues are only accurate in the chart where the
    roots have modulus <= 1, so candidate sets from both charts compete and
    the one that rebuilds the state best wins; two Newton steps are kept if
    they do not hurt.

    A repeated root comes back as a small ring of eigenvalues. Clusters of
    a single-linkage tree that could plausibly be one repeated root are
    collapsed together, their locations fitted jointly against the state,
    and the collapse kept when it rebuilds the state as well as the raw
    eigenvalues do; otherwise the cluster whose release helps most is
    replaced by the plausible clusters inside it and the rest retried.
    """
    n = len(a) - 1
    north = np.zeros((n_inf, 2))
    if n == 0:
        return north
    psi, two_s = state.amplitudes, state.two_s

    def dist(pts):
        return _state_distance(psi, two_s, np.vstack([pts, north]))

    best, best_d = None, np.inf
    for roots in _eigen_roots(a):
        for cand in (roots, _polished(a, roots)):
            d = dist(_to_points(cand))
            if d < best_d:
                best, best_d = cand, d
    pts = _to_points(best)
    if n == 1:
        return np.vstack([pts, north])
    accept = max(4 * best_d, 1e-12)
    xyz = spherical_to_cartesian(pts[:, 0], pts[:, 1])

    def collect(node) -> list:
        """Topmost subtrees of ``node`` whose collapse is plausible, as ``(node, indices, z)``."""
        idx = np.array(node.pre_order())
        if len(idx) == 1:
            return []
        scored = []
        with np.errstate(all="ignore"):
            for z in _merge_candidates(a, best[idx]):
                trial = pts.copy()
                trial[idx] = _root_to_point(z)
                scored.append((dist(trial), z))
        scored = [sc for sc in scored if np.isfinite(sc[0])]
        if scored:
            d, z = min(scored, key=lambda sc: sc[0])
            if d <= PLAUSIBLE_MERGE:
                return [(node, idx, z)]
        return collect(node.get_left()) + collect(node.get_right())

    groups = collect(to_tree(linkage(xyz, method="single")))
    while groups:
        merged = _fit_merged(psi, two_s, pts, north, [(idx, z) for _, idx, z in groups], best)
        if dist(merged) <= accept:
            pts = merged
            break
        # give up the cluster whose release helps most and look inside it instead
        worst = 0
        if len(groups) > 1:
            scores = [
                dist(_fit_merged(psi, two_s, pts, north, [(idx, z) for _, idx, z in groups[:i] + groups[i + 1 :]], best))
                for i in range(len(groups))
            ]
            worst = int(np.argmin(scores))
        node = groups.pop(worst)[0]
        groups += collect(node.get_left()) + collect(node.get_right())
    return np.vstack([pts, north])


def _fit_merged(psi, two_s, pts, north, groups, roots) -> np.ndarray:
    """Collapse each ``(indices, z)`` group to one point and refine every location jointly.

    Simple roots next to a repeated one inherit its eigenvalue error, so
    they are refitted along with the collapsed points.
    """
    grouped = np.zeros(len(pts), dtype=bool)
    for idx, _ in groups:
        grouped[idx] = True
    groups = list(groups) + [(np.array([i]), roots[i]) for i in np.flatnonzero(~grouped)]
    charts = [abs(z) > 1 for _, z in groups]
    u0 = []
    for (_, z), outer in zip(groups, charts):
        u = (1 / z if z != 0 else 0j) if outer else z
        if not np.isfinite(u):
            u = 0j
        u0 += [u.real, u.imag]

    def place(x):
        trial = pts.copy()
        for g, ((idx, _), outer) in enumerate(zip(groups, charts)):
            u = complex(x[2 * g], x[2 * g + 1])
            z = (1 / u if u != 0 else complex(np.inf)) if outer else u
            trial[idx] = _root_to_point(z)
        return trial

    def residual(x):
        other = _points_amplitudes(two_s, np.vstack([place(x), north]))
        other = other / np.linalg.norm(other)
        ov = np.vdot(other, psi)
        r = psi - (ov / abs(ov) if ov != 0 else 1.0) * other
        return np.concatenate([r.real, r.imag])

    with np.errstate(all="ignore"):
        sol = least_squares(residual, u0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return place(sol.x)


def constellation_from_state(state: SpinState) -> Constellation:
    a = polynomial_from_state(state).coefficients
    scale = np.max(np.abs(a))
    if scale == 0:
        raise ValueError("zero polynomial has no constellation")
    a = a / scale
    top = int(np.flatnonzero(a)[-1])  # exact zeros only: tiny top terms are legitimate
    pts = _locate_points(state, a[: top + 1], state.two_s - top)
    n_inf = int(np.count_nonzero(pts[:, 0] == 0.0))
    return Constellation(state.two_s, pts, n_inf)


def state_from_constellation(points: Constellation) -> SpinState:
    """Inverse Majorana map; defined up to a global phase."""
    return new_state(points.two_s, _points_amplitudes(points.two_s, points.points))
