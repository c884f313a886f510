import numpy as np
import pytest

from kings.majorana import Constellation

GOLDEN = (1 + 5**0.5) / 2


def octahedron() -> Constellation:
    return Constellation.from_xyz(np.vstack([np.eye(3), -np.eye(3)]))


def icosahedron() -> Constellation:
    pts = []
    for a in (1, -1):
        for b in (GOLDEN, -GOLDEN):
            pts += [(0, a, b), (a, b, 0), (b, 0, a)]
    return Constellation.from_xyz(np.array(pts, dtype=float))


def dodecahedron() -> Constellation:
    pts = [(a, b, c) for a in (1, -1) for b in (1, -1) for c in (1, -1)]
    for a in (1, -1):
        for b in (1, -1):
            pts += [(0, a / GOLDEN, b * GOLDEN), (a / GOLDEN, b * GOLDEN, 0), (b * GOLDEN, 0, a / GOLDEN)]
    return Constellation.from_xyz(np.array(pts, dtype=float))


def tetrahedron() -> Constellation:
    return Constellation.from_xyz(np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float))


def random_amplitudes(rng, two_s):
    return rng.standard_normal(two_s + 1) + 1j * rng.standard_normal(two_s + 1)


def random_rotation_matrix(rng):
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
