"""JSON interchange formats for states, constellations, spectra and search results."""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from ._fmt import fmt_float
from .majorana import Constellation
from .multipole import MultipoleSpectrum, a_table, kq_index
from .spin_core import NORM_TOL, SpinState


class FormatError(ValueError):
    """Input does not follow the expected JSON layout."""


def _require(obj, key, kind):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"missing field {key!r}")
    value = obj[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise FormatError(f"field {key!r} must be an integer")
    if kind is list and not isinstance(value, list):
        raise FormatError(f"field {key!r} must be a list")
    return value


def _pairs(rows, what: str) -> np.ndarray:
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{what} must be a list of number pairs") from exc
    if arr.ndim != 2 or arr.shape[1] != 2 or not np.all(np.isfinite(arr)):
        raise FormatError(f"{what} must be a list of finite number pairs")
    return arr


def state_to_dict(state: SpinState) -> dict:
    amps = state.amplitudes
    return {"two_s": state.two_s, "amplitudes": [[float(a.real), float(a.imag)] for a in amps]}


def state_from_dict(obj) -> SpinState:
    """Parse and validate; the amplitudes must already be normalized."""
    two_s = _require(obj, "two_s", int)
    if two_s < 0:
        raise FormatError("two_s must be non-negative")
    pairs = _pairs(_require(obj, "amplitudes", list), "amplitudes")
    if len(pairs) != two_s + 1:
        raise FormatError(f"expected {two_s + 1} amplitudes for two_s={two_s}, got {len(pairs)}")
    amps = pairs[:, 0] + 1j * pairs[:, 1]
    norm = np.linalg.norm(amps)
    if abs(norm - 1) > 1e-9:
        raise FormatError(f"amplitudes are not normalized (norm {norm:.12g})")
    if abs(norm - 1) > NORM_TOL:
        amps = amps / norm  # text round trips lose the last bits
    return SpinState(two_s, amps)


def constellation_to_dict(con: Constellation) -> dict:
    return {
        "two_s": con.two_s,
        "points": [[float(t), float(p)] for t, p in con.points],
        "infinity_multiplicity": con.infinity_multiplicity,
    }


def constellation_from_dict(obj) -> Constellation:
    two_s = _require(obj, "two_s", int)
    raw = _require(obj, "points", list)
    pts = _pairs(raw, "points") if raw else np.zeros((0, 2))
    n_inf = obj.get("infinity_multiplicity", 0)
    if isinstance(n_inf, bool) or not isinstance(n_inf, int):
        raise FormatError("infinity_multiplicity must be an integer")
    try:
        return Constellation(two_s, pts, n_inf)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def spectrum_to_dict(spec: MultipoleSpectrum) -> dict:
    return {
        "two_s": spec.two_s,
        "rho": [{"K": k, "q": q, "re": v.real, "im": v.imag} for (k, q), v in spec.items()],
    }


def spectrum_from_dict(obj) -> MultipoleSpectrum:
    two_s = _require(obj, "two_s", int)
    rho = np.zeros((two_s + 1) ** 2, dtype=complex)
    seen = np.zeros(rho.size, dtype=bool)
    for entry in _require(obj, "rho", list):
        k, q = _require(entry, "K", int), _require(entry, "q", int)
        if not (0 <= k <= two_s and abs(q) <= k):
            raise FormatError(f"(K, q) = ({k}, {q}) out of range for two_s={two_s}")
        i = kq_index(k, q)
        rho[i] = complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
        seen[i] = True
    if not seen.all():
        raise FormatError("spectrum is missing components")
    return MultipoleSpectrum(two_s, rho)


def a_table_csv(spec: MultipoleSpectrum, max_order: int | None = None) -> str:
    table = a_table(spec)
    if max_order is not None:
        table = table[:max_order]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["M", "A_M"])
    for m, a in enumerate(table, start=1):
        w.writerow([m, fmt_float(a)])
    return buf.getvalue()


def search_result_to_dict(result) -> dict:
    out = state_to_dict(result.state)
    out.update(
        achieved_order=result.achieved_order,
        objective=float(result.objective),
        restarts_used=result.restarts_used,
        seed=result.seed,
    )
    return out


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc}") from exc
