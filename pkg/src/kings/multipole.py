"""Husimi function, state multipoles and anticoherence."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import sparse
from scipy.special import gammaln, sph_harm_y

from .spin_core import SpinState, m_values

DEFAULT_TOL = 1e-8


def clebsch_gordan(tj1, tm1, tj2, tm2, tj, tm):
    """``<j1 m1; j2 m2 | j m>`` with every argument given doubled.

    Racah's closed form, with factorials accumulated in log space. Broadcasts
    over array arguments; selection-rule violations give 0.
    """
    tj1, tm1, tj2, tm2, tj, tm = np.broadcast_arrays(*(np.asarray(x, dtype=np.int64) for x in (tj1, tm1, tj2, tm2, tj, tm)))
    ok = (
        (tm1 + tm2 == tm)
        & (np.abs(tm1) <= tj1) & (np.abs(tm2) <= tj2) & (np.abs(tm) <= tj)
        & ((tj1 + tm1) % 2 == 0) & ((tj2 + tm2) % 2 == 0) & ((tj + tm) % 2 == 0)
        & (tj <= tj1 + tj2) & (tj >= np.abs(tj1 - tj2)) & ((tj1 + tj2 + tj) % 2 == 0)
    )

    def h(x):
        # x is a doubled sum that is even wherever ok holds
        return np.where(ok, x // 2, 0)

    j_j1_j2 = h(tj + tj1 - tj2)
    j_j2_j1 = h(tj - tj1 + tj2)
    j1_j2_j = h(tj1 + tj2 - tj)
    total = h(tj1 + tj2 + tj) + 1
    j1m, j1p = h(tj1 - tm1), h(tj1 + tm1)
    j2m, j2p = h(tj2 - tm2), h(tj2 + tm2)
    jm, jp = h(tj - tm), h(tj + tm)

    lg = lambda n: gammaln(np.asarray(n, dtype=float) + 1)  # noqa: E731
    log_pref = 0.5 * (
        np.log(np.where(ok, tj + 1, 1))
        + lg(j_j1_j2) + lg(j_j2_j1) + lg(j1_j2_j) - lg(total)
        + lg(jp) + lg(jm) + lg(j1m) + lg(j1p) + lg(j2m) + lg(j2p)
    )
    # J - j2 + m1 and J - j1 - m2 may be negative; they only shift the k range
    a4 = np.where(ok, (tj - tj2 + tm1) // 2, 0)
    a5 = np.where(ok, (tj - tj1 - tm2) // 2, 0)
    k_lo = np.maximum(0, np.maximum(-a4, -a5))
    k_hi = np.minimum(j1_j2_j, np.minimum(j1m, j2p))
    kmax = int(np.max(k_hi, initial=0))
    ks = np.arange(kmax + 1).reshape((-1,) + (1,) * tj1.ndim)
    valid = ok & (ks >= k_lo) & (ks <= k_hi)
    kk = np.where(valid, ks, 0)
    log_den = (
        lg(kk) + lg(np.where(valid, j1_j2_j - kk, 0)) + lg(np.where(valid, j1m - kk, 0))
        + lg(np.where(valid, j2p - kk, 0)) + lg(np.where(valid, a4 + kk, 0))
        + lg(np.where(valid, a5 + kk, 0))
    )
    terms = np.where(valid, np.where(kk % 2, -1.0, 1.0) * np.exp(log_pref - log_den), 0.0)
    return np.where(ok, terms.sum(axis=0), 0.0)


def kq_index(k: int, q: int) -> int:
    return k * k + k + q


@lru_cache(maxsize=None)
def tensor_operators(two_s: int) -> sparse.csr_matrix:
    """Orthonormal tensor operators ``T_Kq`` stacked as rows of a sparse matrix.

    Row ``K^2 + K + q`` holds the flattened ``(2S+1) x (2S+1)`` matrix with
    elements ``<S m'|T_Kq|S m> = sqrt((2K+1)/(2S+1)) <S m; K q|S m'>``;
    column ``a * dim + b`` pairs ``m' = m_a`` with ``m = m_b``.
    """
    dim = two_s + 1
    tm = two_s - 2 * np.arange(dim, dtype=np.int64)  # doubled m
    rows, cols, vals = [], [], []
    for k in range(two_s + 1):
        for q in range(-k, k + 1):
            b = np.arange(dim)
            a = b - q  # m' = m + q
            sel = (a >= 0) & (a < dim)
            a, b = a[sel], b[sel]
            coef = np.sqrt((2 * k + 1) / dim) * clebsch_gordan(two_s, tm[b], 2 * k, 2 * q, two_s, tm[a])
            rows.append(np.full(a.size, kq_index(k, q)))
            cols.append(a * dim + b)
            vals.append(coef)
    mat = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=((two_s + 1) ** 2, dim * dim),
    )
    return mat


@dataclass(frozen=True, eq=False)
class MultipoleSpectrum:
    """State multipoles ``rho_Kq`` for ``K = 0 .. 2S``, stored flat in ``(K, q)`` order."""

    two_s: int
    rho: np.ndarray

    def __getitem__(self, kq: tuple[int, int]) -> complex:
        k, q = kq
        if not (0 <= k <= self.two_s and abs(q) <= k):
            raise KeyError(kq)
        return complex(self.rho[kq_index(k, q)])

    def items(self):
        for k in range(self.two_s + 1):
            for q in range(-k, k + 1):
                yield (k, q), complex(self.rho[kq_index(k, q)])

    def power(self) -> np.ndarray:
        """``sum_q |rho_Kq|^2`` for each rank ``K``."""
        p = np.abs(self.rho) ** 2
        return np.array([p[k * k : (k + 1) ** 2].sum() for k in range(self.two_s + 1)])


def _rho(two_s: int, psi: np.ndarray, upto: int | None = None) -> np.ndarray:
    t = tensor_operators(two_s)
    if upto is not None:
        t = t[: (upto + 1) ** 2]
    return t @ np.outer(psi.conj(), psi).ravel()


def multipoles(state: SpinState) -> MultipoleSpectrum:
    """``rho_Kq = <Psi|T_Kq|Psi>``; the monopole is ``1/sqrt(2S+1)``."""
    return MultipoleSpectrum(state.two_s, _rho(state.two_s, state.amplitudes))


def cumulative_a(spectrum: MultipoleSpectrum, m_order: int) -> float:
    """``A_M = sum_{K=1}^{M} sum_q |rho_Kq|^2`` (monopole excluded)."""
    if not 1 <= m_order <= spectrum.two_s:
        raise ValueError(f"order must be in 1..{spectrum.two_s}, got {m_order}")
    return float(np.sum(np.abs(spectrum.rho[1 : (m_order + 1) ** 2]) ** 2))


def a_table(spectrum: MultipoleSpectrum) -> np.ndarray:
    """All ``A_M`` for ``M = 1 .. 2S``."""
    return np.cumsum(spectrum.power()[1:])


def anticoherence_order(state: SpinState, tol: float = DEFAULT_TOL) -> int:
    """Largest ``M`` with ``A_M < tol`` (0 when the dipole alone exceeds ``tol``)."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    if state.two_s == 0:
        return 0
    table = a_table(multipoles(state))
    return int(np.count_nonzero(table < tol))


@lru_cache(maxsize=None)
def _log_binomial_sqrt(two_s: int) -> np.ndarray:
    k = two_s - np.arange(two_s + 1)  # S + m
    return 0.5 * (gammaln(two_s + 1) - gammaln(k + 1) - gammaln(two_s - k + 1))


def coherent_amplitudes(two_s: int, theta, phi) -> np.ndarray:
    """Coherent-state amplitudes for arrays of directions, shape ``(..., 2S+1)``."""
    theta = np.asarray(theta, dtype=float)[..., None]
    phi = np.asarray(phi, dtype=float)[..., None]
    k = two_s - np.arange(two_s + 1)
    c = np.exp(_log_binomial_sqrt(two_s))
    return c * np.cos(theta / 2) ** k * np.sin(theta / 2) ** (two_s - k) * np.exp(-1j * m_values(two_s) * phi)


def husimi_q(state: SpinState, theta, phi):
    """``Q(n) = |<n|Psi>|^2``; broadcasts over ``theta`` and ``phi``."""
    amps = coherent_amplitudes(state.two_s, theta, phi)
    q = np.abs(amps.conj() @ state.amplitudes) ** 2
    return float(q) if q.ndim == 0 else q


def sphere_quadrature(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Product rule: Gauss-Legendre in ``cos(theta)`` times the uniform trapezoid in ``phi``.

    Integrates spherical polynomials of degree ``< min(2 n_theta, n_phi)`` exactly.
    """
    x, w = leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    tt, pp = np.meshgrid(np.arccos(x), phi, indexing="ij")
    ww = np.repeat(w[:, None] * (2 * np.pi / n_phi), n_phi, axis=1)
    return tt.ravel(), pp.ravel(), ww.ravel()


def husimi_quadrature(two_s: int, k_max: int = 0):
    """Nodes and weights exact for ``Q`` times any harmonic of rank ``<= k_max``."""
    degree = two_s + k_max
    return sphere_quadrature(max(degree // 2 + 1, two_s + 2), max(degree + 1, 2 * two_s + 4))


def q_harmonic_coeffs(state: SpinState, k_max: int) -> dict[tuple[int, int], complex]:
    """Projections ``int Q(n) conj(Y_Kq(n)) dOmega`` for ``K <= k_max``.

    ``Q`` is band-limited to rank ``2S``, so the product rule from
    :func:`husimi_quadrature` makes these exact up to rounding. ``k_max``
    may exceed ``2S``; those coefficients vanish.
    """
    theta, phi, w = husimi_quadrature(state.two_s, k_max)
    wq = w * husimi_q(state, theta, phi)
    out = {}
    for k in range(k_max + 1):
        for q in range(-k, k + 1):
            out[(k, q)] = complex(np.sum(wq * np.conj(sph_harm_y(k, q, theta, phi))))
    return out
