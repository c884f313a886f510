"""Stored Kings shipped with the package, and the searches that produce them.

Run ``python -m kings.reference`` to regenerate the JSON files under
``kings/data``.
"""

from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

from .codec import dumps, loads, search_result_to_dict, state_from_dict
from .search import SearchConfig, find_king
from .spin_core import SpinState

# two_s -> search producing the stored King. The ring ansatz (cyclic) is
# used where the target order leaves a continuum of solutions: for
# two_s = 10 it yields the two pentagons, for two_s = 20 the mirror-symmetric
# four-ring solutions, among which the tie-break of find_king picks the most
# isotropic one.
REFERENCE_CONFIGS: dict[int, SearchConfig] = {
    4: SearchConfig(4, 2, rng_seed=0),
    6: SearchConfig(6, 3, rng_seed=0),
    10: SearchConfig(10, 3, rng_seed=0, cyclic=5),
    12: SearchConfig(12, 5, rng_seed=0),
    20: SearchConfig(20, 5, rng_seed=0, cyclic=5, real=True),
}


def _data_file(two_s: int):
    return resources.files("kings") / "data" / f"king_{two_s}.json"


def available() -> list[int]:
    return sorted(REFERENCE_CONFIGS)


def load_king_record(two_s: int) -> dict:
    if two_s not in REFERENCE_CONFIGS:
        raise KeyError(f"no stored King for two_s={two_s}; available: {available()}")
    return loads(_data_file(two_s).read_text())


def load_king(two_s: int) -> SpinState:
    return state_from_dict(load_king_record(two_s))


def regenerate(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for two_s, config in REFERENCE_CONFIGS.items():
        result = find_king(config)
        (out_dir / f"king_{two_s}.json").write_text(dumps(search_result_to_dict(result)))
        print(f"two_s={two_s}: order {result.achieved_order}, A_M = {result.objective:.3g}")


if __name__ == "__main__":
    regenerate(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent / "data")
