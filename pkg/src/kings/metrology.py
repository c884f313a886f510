"""Rotation-angle estimation with the state projector as the observable.

For a rotation ``R = exp(-i omega u.S)`` the signal is
``P(omega) = |<Psi|R|Psi>|^2`` and the error-propagation sensitivity is
``dP / |dP/domega|`` with ``dP = sqrt(P (1 - P))`` (the projector squares to
itself). Everything below works in the eigenbasis of ``u.S``, where
``<Psi|R|Psi> = sum_m p_m exp(-i omega m)``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import ConvexHull, QhullError

from ._fmt import fmt_float
from .majorana import Constellation
from .spin_core import RotationAxis, SpinState, axis_populations, m_values, spin_moments

REVIVAL_TOL = 1e-8
# Var(u.S) below this (in units of S^2) counts as an eigenstate
ZERO_VARIANCE = 1e-13


class ZeroVarianceError(ArithmeticError):
    """The state is an eigenstate of ``u.S``; it carries no information about the angle."""


@dataclass(frozen=True)
class SensitivityReport:
    axis: RotationAxis
    omega: float
    p_mean: float
    p_std: float
    dp_domega: float
    delta_omega: float


def _signal(state: SpinState, axis: RotationAxis, omega: float):
    """``(P, 1 - P, f, f')`` with ``1 - P`` summed directly so small angles keep their digits."""
    p = axis_populations(state, axis)
    m = m_values(state.two_s)
    phase = np.exp(-1j * omega * m)
    f = np.sum(p * phase)
    df = -1j * np.sum(p * m * phase)
    gap = np.subtract.outer(m, m)
    loss = float(np.sum(np.outer(p, p) * 2 * np.sin(omega * gap / 2) ** 2))
    loss = min(max(loss, 0.0), 1.0)
    return 1.0 - loss, loss, f, df


def projection_probability(state: SpinState, axis: RotationAxis, omega: float) -> float:
    """``|<Psi| exp(-i omega u.S) |Psi>|^2``."""
    return _signal(state, axis, omega)[0]


def dprojection_domega(state: SpinState, axis: RotationAxis, omega: float) -> float:
    _, _, f, df = _signal(state, axis, omega)
    return float(2 * np.real(np.conj(f) * df))


def sensitivity(state: SpinState, axis: RotationAxis, omega: float) -> SensitivityReport:
    """Error-propagation ``delta omega`` at a finite rotation angle.

    At ``omega = 0`` both numerator and denominator vanish; use
    :func:`small_angle_sensitivity` for that limit.
    """
    if omega == 0:
        raise ValueError("sensitivity is 0/0 at omega = 0; use small_angle_sensitivity for the limit")
    p_mean, loss, f, df = _signal(state, axis, omega)
    p_std = float(np.sqrt(p_mean * loss))
    slope = float(2 * np.real(np.conj(f) * df))
    delta = p_std / abs(slope) if slope != 0 else np.inf
    return SensitivityReport(axis, float(omega), p_mean, p_std, slope, delta)


def axis_variance(state: SpinState, axis: RotationAxis) -> float:
    return spin_moments(state).variance(axis)


def small_angle_sensitivity(state: SpinState, axis: RotationAxis) -> float:
    """``omega -> 0`` limit of :func:`sensitivity`: ``1 / (2 sqrt(Var(u.S)))``."""
    var = axis_variance(state, axis)
    if var <= ZERO_VARIANCE * max(state.spin, 1.0) ** 2:
        raise ZeroVarianceError(f"Var(u.S) = {var:.3g}: state is an eigenstate of the rotation generator")
    return float(1 / (2 * np.sqrt(var)))


def kings_formula(two_s: int) -> float:
    s = two_s / 2
    return float(np.sqrt(3) / 2 / np.sqrt(s * (s + 1)))


def noon_formula(two_s: int, theta_cap: float) -> float:
    s = two_s / 2
    c2 = np.cos(theta_cap) ** 2
    return float(1 / np.sqrt(2) / np.sqrt(2 * s * s * c2 + s * (1 - c2)))


def crossover_cos_theta(two_s: int) -> float:
    """``cos(Theta)`` at which NOON and King sensitivities coincide."""
    if two_s < 2:
        raise ValueError("crossover needs two_s >= 2")
    target = kings_formula(two_s)
    return float(brentq(lambda c: noon_formula(two_s, np.arccos(c)) - target, 0.0, 1.0, xtol=1e-15))


@dataclass(frozen=True, eq=False)
class AxisScan:
    """``p_mean[i, j]`` is the projection probability for ``axes[i]`` at ``omegas[j]``."""

    axes: tuple[RotationAxis, ...]
    omegas: np.ndarray
    p_mean: np.ndarray

    def revivals(self, tol: float = REVIVAL_TOL) -> list[np.ndarray]:
        """Per axis, the grid angles ``omega > 0`` that are local maxima with ``P > 1 - tol``."""
        out = []
        for row in self.p_mean:
            left = np.r_[-np.inf, row[:-1]]
            right = np.r_[row[1:], -np.inf]
            hit = (row >= left) & (row >= right) & (row > 1 - tol) & (self.omegas > 0)
            out.append(self.omegas[hit])
        return out

    def first_revival(self, tol: float = REVIVAL_TOL) -> np.ndarray:
        return np.array([r[0] if r.size else np.nan for r in self.revivals(tol)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["axis_index", "theta_cap", "phi_cap", "omega", "p_mean"])
        for i, (ax, row) in enumerate(zip(self.axes, self.p_mean)):
            for om, p in zip(self.omegas, row):
                w.writerow([i, fmt_float(ax.theta_cap), fmt_float(ax.phi_cap), fmt_float(om), fmt_float(p)])
        return buf.getvalue()


def axis_scan(state: SpinState, axes, omega_grid) -> AxisScan:
    axes = tuple(axes)
    omegas = np.asarray(omega_grid, dtype=float)
    m = m_values(state.two_s)
    gap = np.subtract.outer(m, m)
    rows = []
    for ax in axes:
        p = axis_populations(state, ax)
        weights = np.outer(p, p)
        loss = np.einsum("ij,kij->k", weights, 2 * np.sin(omegas[:, None, None] * gap / 2) ** 2)
        rows.append(1 - np.clip(loss, 0.0, 1.0))
    return AxisScan(axes, omegas, np.array(rows).reshape(len(axes), omegas.size))


def vertex_axes(constellation: Constellation, tol: float = 1e-7) -> list[RotationAxis]:
    """Directions through the distinct constellation points."""
    return [RotationAxis(t, p) for t, p, _ in constellation.clusters(tol)]


def facet_axes(constellation: Constellation, tol: float = 1e-6) -> list[RotationAxis]:
    """Outward normals of the faces of the points' convex hull.

    The hull comes back triangulated, so triangles sharing a plane (within
    ``tol``) are merged into one polygonal face.
    """
    xyz = np.array([RotationAxis(t, p).vector for t, p, _ in constellation.clusters()])
    if len(xyz) < 4:
        raise ValueError("need at least 4 distinct points for a hull")
    try:
        hull = ConvexHull(xyz)
    except QhullError as exc:
        raise ValueError("points are coplanar; the hull has no facets") from exc
    normals: list[np.ndarray] = []
    offsets: list[float] = []
    for eq in hull.equations:
        n, d = eq[:3], eq[3]
        if any(np.linalg.norm(n - k) < tol and abs(d - e) < tol for k, e in zip(normals, offsets)):
            continue
        normals.append(n)
        offsets.append(d)
    return [RotationAxis.from_vector(n) for n in normals]


def sensitivity_csv(rows) -> str:
    """Rows ``(two_s, axis, numeric, formula)`` as CSV with ``S`` in spin units."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["S", "theta_cap", "phi_cap", "delta_omega_numeric", "delta_omega_formula"])
    for two_s, ax, num, formula in rows:
        w.writerow([fmt_float(two_s / 2), fmt_float(ax.theta_cap), fmt_float(ax.phi_cap), fmt_float(num), fmt_float(formula)])
    return buf.getvalue()
