"""Extremal spin states: Majorana constellations, multipoles, rotation metrology and search."""

from .spin_core import (
    RotationAxis,
    SpinMoments,
    SpinState,
    Z_AXIS,
    coherent_state,
    dicke_state,
    dicke_to_fock,
    fidelity,
    inner,
    new_state,
    noon_state,
    rotate,
    spin_moments,
)
from .majorana import Constellation, constellation_from_state, state_from_constellation
from .multipole import (
    MultipoleSpectrum,
    anticoherence_order,
    cumulative_a,
    husimi_q,
    multipoles,
    q_harmonic_coeffs,
)
from .metrology import (
    SensitivityReport,
    ZeroVarianceError,
    axis_scan,
    dprojection_domega,
    kings_formula,
    noon_formula,
    projection_probability,
    sensitivity,
    small_angle_sensitivity,
)
from .search import SearchConfig, SearchResult, find_king, match, objective, signature
from .reference import available as available_kings, load_king

__version__ = "0.1.0"
