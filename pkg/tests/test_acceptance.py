"""Acceptance checks, one per criterion, each printing a single PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the lines are collected into the
terminal summary) or ``python3 tests/test_acceptance.py`` to print them
directly.
"""

import time

import numpy as np

from kings.majorana import constellation_from_state, state_from_constellation
from kings.metrology import (
    axis_scan,
    crossover_cos_theta,
    facet_axes,
    kings_formula,
    noon_formula,
    projection_probability,
    sensitivity,
    small_angle_sensitivity,
    vertex_axes,
)
from kings.multipole import a_table, anticoherence_order, husimi_q, multipoles
from kings.reference import load_king
from kings.search import SearchConfig, find_king, match
from kings.spin_core import Z_AXIS, RotationAxis, fidelity, new_state, noon_state

try:
    from conftest import icosahedron, octahedron
except ImportError:  # run as a script from elsewhere
    import sys
    from pathlib import Path

    sys.path.insert(0, str(Path(__file__).parent))
    from conftest import icosahedron, octahedron

REPORT: list[str] = []


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    REPORT.append(line)
    print(line)
    assert ok, line


def random_axes(rng, n):
    return [RotationAxis.from_vector(v) for v in rng.standard_normal((n, 3))]


def rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_01_closed_forms():
    expected = {6: 0.25, 12: np.sqrt(3) / (2 * np.sqrt(42)), 20: np.sqrt(3) / (2 * np.sqrt(110))}
    worst = 0.0
    ok = all(rel(kings_formula(ts), v) < 1e-12 for ts, v in expected.items())
    ok &= abs(kings_formula(12) - 0.133631) < 1e-6 and abs(kings_formula(20) - 0.082572) < 1e-6
    rng = np.random.default_rng(1)
    for ts in expected:
        king = load_king(ts)
        for ax in random_axes(rng, 5):
            for num in (small_angle_sensitivity(king, ax), sensitivity(king, ax, 1e-4).delta_omega):
                worst = max(worst, rel(num, kings_formula(ts)))
    for ts in (6, 10, 12, 20):
        s = ts / 2
        ok &= rel(noon_formula(ts, 0.0), 1 / (2 * s)) < 1e-12
        ok &= rel(noon_formula(ts, np.pi / 2), 1 / np.sqrt(2 * s)) < 1e-12
        for theta in (0.0, np.pi / 2):
            ax = RotationAxis(theta, 0.3)
            for num in (small_angle_sensitivity(noon_state(ts), ax), sensitivity(noon_state(ts), ax, 1e-4).delta_omega):
                worst = max(worst, rel(num, noon_formula(ts, theta)))
    report(1, ok and worst < 1e-6, f"closed forms; worst numeric/closed-form relative gap {worst:.2e} (tol 1e-6)")


def test_criterion_02_axis_independence():
    rng = np.random.default_rng(2)
    spreads = {}
    for ts in (6, 10, 12, 20):
        king = load_king(ts)
        vals = np.array([small_angle_sensitivity(king, ax) for ax in random_axes(rng, 200)])
        spreads[ts / 2] = np.ptp(vals) / vals.mean()
    worst = max(spreads.values())
    detail = ", ".join(f"S={s:g}: {v:.1e}" for s, v in spreads.items())
    report(2, worst < 1e-8, f"relative spread over 200 axes ({detail}; tol 1e-8)")


def test_criterion_03_anticoherence_orders():
    orders = {ts / 2: anticoherence_order(load_king(ts), tol=1e-8) for ts in (6, 10, 12, 20)}
    ok = orders[3] == 3 and orders[6] == 5 and orders[10] == 5
    report(3, ok, f"orders S=3: {orders[3]}, S=6: {orders[6]}, S=10: {orders[10]} (S=5 recorded: {orders[5]})")


def test_criterion_04_noon_angles():
    worst_zero = worst_one = 0.0
    for s in (3, 5, 6, 10):
        x = noon_state(2 * s)
        worst_zero = max(worst_zero, projection_probability(x, Z_AXIS, np.pi / (2 * s)))
        worst_one = max(worst_one, abs(projection_probability(x, Z_AXIS, np.pi / s) - 1))
    ok = worst_zero < 1e-10 and worst_one < 1e-10
    report(4, ok, f"max P(pi/2S) = {worst_zero:.1e}, max |P(pi/S) - 1| = {worst_one:.1e} (tol 1e-10)")


def test_criterion_05_revival_structure():
    grid = 2 * np.pi * np.arange(121) / 120
    expect = {(6, "vertex"): 4, (12, "vertex"): 5, (20, "vertex"): 3, (6, "facet"): 3, (12, "facet"): 3, (20, "facet"): 5}
    found = {}
    for (ts, kind), fold in expect.items():
        king = load_king(ts)
        con = constellation_from_state(king)
        axes = vertex_axes(con) if kind == "vertex" else facet_axes(con)
        scan = axis_scan(king, axes, grid)
        first = scan.first_revival(1e-8)
        # every axis of the family first revives at 2 pi / fold
        found[(ts, kind)] = round(2 * np.pi / first[0]) if np.allclose(first, first[0]) else None
    ok = found == expect
    detail = "; ".join(f"S={ts // 2} {kind}: {found[(ts, kind)]}-fold" for ts, kind in expect)
    report(5, ok, detail)


def test_criterion_06_crossover():
    c = crossover_cos_theta(100)
    gap = abs(c - 1 / np.sqrt(3))
    report(6, gap < 2e-2, f"S=50 crossover cos(Theta) = {c:.12f}, |gap to 1/sqrt 3| = {gap:.1e} (tol 2e-2)")


def test_criterion_07_majorana_round_trip():
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    worst_f, worst_q = 1.0, 0.0
    for _ in range(1000):
        ts = int(rng.integers(1, 31))
        x = new_state(ts, rng.standard_normal(ts + 1) + 1j * rng.standard_normal(ts + 1))
        con = constellation_from_state(x)
        worst_f = min(worst_f, fidelity(x, state_from_constellation(con)))
        worst_q = max(worst_q, float(np.max(husimi_q(x, con.points[:, 0], con.points[:, 1]))))
    dt = time.perf_counter() - t0
    ok = worst_f > 1 - 1e-9 and worst_q < 1e-12 and dt < 60
    report(7, ok, f"1000 states S<=15: min fidelity 1 - {1 - worst_f:.1e}, max Q at zeros {worst_q:.1e}, {dt:.1f}s")


def test_criterion_08_purity_identity():
    rng = np.random.default_rng(8)
    worst_p = worst_a = 0.0
    for _ in range(1000):
        ts = int(rng.integers(1, 31))
        spec = multipoles(new_state(ts, rng.standard_normal(ts + 1) + 1j * rng.standard_normal(ts + 1)))
        worst_p = max(worst_p, abs(np.sum(np.abs(spec.rho) ** 2) - 1))
        worst_a = max(worst_a, abs(a_table(spec)[-1] - (1 - 1 / (ts + 1))))
    ok = worst_p < 1e-10 and worst_a < 1e-9
    report(8, ok, f"1000 states: max |sum|rho|^2 - 1| = {worst_p:.1e}, max A_2S gap = {worst_a:.1e}")


def test_criterion_09_search_reproduction():
    t0 = time.perf_counter()
    octa = find_king(SearchConfig(6, 3))
    ico = find_king(SearchConfig(12, 5))
    dt = time.perf_counter() - t0
    ok = (
        octa.objective < 1e-8
        and ico.objective < 1e-8
        and match(constellation_from_state(octa.state), octahedron(), 1e-6)
        and match(constellation_from_state(ico.state), icosahedron(), 1e-6)
        and dt < 600
    )
    report(9, ok, f"A_3 = {octa.objective:.1e} (octahedron), A_5 = {ico.objective:.1e} (icosahedron), {dt:.1f}s")


def test_criterion_10_excluded():
    REPORT.append("criterion 10: EXCLUDED  experimental fidelities, error bars and photon statistics are out of scope")
    print(REPORT[-1])


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    raise SystemExit(1 if failed else 0)
