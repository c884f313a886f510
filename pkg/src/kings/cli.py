"""``kings`` command line: build states, analyse them, scan rotations, search for Kings.

Exit status is 0 on success, 2 for usage or input errors and 3 for
numerical failures such as a sensitivity request on an eigenstate of the
rotation generator. Relative output paths given with ``-o`` are resolved
against ``$KINGS_OUTPUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import codec
from .majorana import constellation_from_state
from .metrology import (
    ZeroVarianceError,
    axis_scan,
    facet_axes,
    kings_formula,
    noon_formula,
    sensitivity_csv,
    small_angle_sensitivity,
    vertex_axes,
)
from .multipole import multipoles
from .reference import available, load_king
from .search import SearchConfig, find_king
from .spin_core import RotationAxis, coherent_state, dicke_state, new_state, noon_state

OUTPUT_DIR_ENV = "KINGS_OUTPUT_DIR"
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


def _out_path(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    p = _out_path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    return codec.loads(text)


def _read_state(path: str):
    return codec.state_from_dict(_read_json(path))


def _parse_two_s_list(text: str) -> list[int]:
    """``"6"``, ``"6,8,12"``, ``"6-20"`` or ``"6-20:2"`` (inclusive ranges)."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                span, _, step = part.partition(":")
                lo, hi = (int(x) for x in span.split("-"))
                out.extend(range(lo, hi + 1, int(step) if step else 1))
            else:
                out.append(int(part))
    except ValueError as exc:
        raise UsageError(f"cannot parse two_s list {text!r}") from exc
    if not out or min(out) < 1:
        raise UsageError("two_s values must be positive integers")
    return out


# --- subcommands -----------------------------------------------------------


def cmd_state(args) -> None:
    kind = args.kind
    two_s = args.two_s
    if two_s is None or two_s < 0:
        raise UsageError("--two-s must be given as a non-negative integer")
    if kind == "coherent":
        if args.theta is None or args.phi is None:
            raise UsageError("coherent states need --theta and --phi")
        if two_s < 1:
            raise UsageError("coherent states need --two-s >= 1")
        state = coherent_state(two_s, args.theta, args.phi)
    elif kind == "noon":
        if two_s < 1:
            raise UsageError("NOON states need --two-s >= 1")
        state = noon_state(two_s)
    elif kind == "dicke":
        if args.m2 is None:
            raise UsageError("dicke states need --m2 (twice the projection)")
        try:
            state = dicke_state(two_s, args.m2)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    elif kind == "king":
        if two_s not in available():
            raise UsageError(f"no stored King for two_s={two_s}; available: {available()}")
        state = load_king(two_s)
    else:  # custom
        if args.amplitudes is None:
            raise UsageError("custom states need --amplitudes '[[re, im], ...]'")
        try:
            raw = json.loads(args.amplitudes)
            pairs = np.array(raw, dtype=float).reshape(-1, 2)
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise UsageError("--amplitudes must be a JSON list of [re, im] pairs") from exc
        try:
            state = new_state(two_s, pairs[:, 0] + 1j * pairs[:, 1])
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    _emit(codec.dumps(codec.state_to_dict(state)), args.output)


def cmd_constellation(args) -> None:
    state = _read_state(args.state)
    con = constellation_from_state(state)
    if args.format == "csv":
        _emit(con.to_csv(), args.output)
    else:
        _emit(codec.dumps(codec.constellation_to_dict(con)), args.output)


def cmd_multipoles(args) -> None:
    if args.max_order is not None and args.max_order < 1:
        raise UsageError("--max-order must be >= 1")
    state = _read_state(args.state)
    if args.max_order is not None and args.max_order > state.two_s:
        raise UsageError(f"--max-order must be <= two_s = {state.two_s}")
    spec = multipoles(state)
    if args.json:
        _emit(codec.dumps(codec.spectrum_to_dict(spec)), args.json)
    table = codec.a_table_csv(spec, args.max_order)
    if args.csv:
        _emit(table, args.csv)
    elif not args.json:
        _emit(table, None)


def _read_axes(path: str) -> list[RotationAxis]:
    obj = _read_json(path)
    rows = obj.get("axes") if isinstance(obj, dict) else obj
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise codec.FormatError("axes must be a list of [theta_cap, phi_cap] pairs") from exc
    if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) == 0:
        raise codec.FormatError("axes must be a non-empty list of [theta_cap, phi_cap] pairs")
    return [RotationAxis(float(t), float(p)) for t, p in arr]


def cmd_scan(args) -> None:
    if args.omega_steps < 2:
        raise UsageError("--omega-steps must be >= 2")
    if not args.omega_max > args.omega_min:
        raise UsageError("--omega-max must exceed --omega-min")
    if (args.axes is None) == (args.axes_from is None):
        raise UsageError("give exactly one of --axes FILE or --axes-from {vertex,facet}")
    state = _read_state(args.state)
    if args.axes is not None:
        axes = _read_axes(args.axes)
    else:
        con = constellation_from_state(state)
        try:
            axes = vertex_axes(con) if args.axes_from == "vertex" else facet_axes(con)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    grid = np.linspace(args.omega_min, args.omega_max, args.omega_steps)
    _emit(axis_scan(state, axes, grid).to_csv(), args.output)


def _king_for(two_s: int):
    if two_s in available():
        return load_king(two_s)
    # any second-order anticoherent state has the King sensitivity
    result = find_king(SearchConfig(two_s, 2, restarts=16, rng_seed=0))
    if result.achieved_order < 2:
        raise ArithmeticError(f"no second-order anticoherent state found for two_s={two_s}")
    return result.state


def cmd_sensitivity(args) -> None:
    if (args.family is None) == (args.state is None):
        raise UsageError("give exactly one of --family or --state")
    if args.axes < 1:
        raise UsageError("--axes must be >= 1")
    if args.axes == 1:
        axes = [RotationAxis(args.theta_cap, args.phi_cap)]
    else:
        rng = np.random.default_rng(args.seed)
        v = rng.standard_normal((args.axes, 3))
        axes = [RotationAxis.from_vector(x) for x in v]
    rows = []
    if args.state is not None:
        state = _read_state(args.state)
        for ax in axes:
            rows.append((state.two_s, ax, small_angle_sensitivity(state, ax), math.nan))
    else:
        if args.two_s is None:
            raise UsageError("--family needs --two-s")
        values = _parse_two_s_list(args.two_s)
        if args.family == "kings" and min(values) < 2:
            raise UsageError("the Kings family needs two_s >= 2")
        for two_s in values:
            if args.family == "kings":
                state = _king_for(two_s)
                formula = kings_formula(two_s)
            else:
                state = noon_state(two_s)
            for ax in axes:
                if args.family == "noon":
                    formula = noon_formula(two_s, ax.theta_cap)
                rows.append((two_s, ax, small_angle_sensitivity(state, ax), formula))
    _emit(sensitivity_csv(rows), args.output)


def cmd_search(args) -> None:
    if args.two_s is None or args.two_s < 1:
        raise UsageError("--two-s must be >= 1")
    try:
        config = SearchConfig(
            two_s=args.two_s,
            target_order=args.order,
            restarts=args.restarts,
            max_iters=args.max_iters,
            tol=args.tol,
            rng_seed=args.seed,
            cyclic=args.cyclic,
            real=args.real,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = find_king(config)
    if not result.reached_tol:
        print(
            f"warning: best A_{args.order} = {result.objective:.3g} did not reach tol {args.tol:g}",
            file=sys.stderr,
        )
    _emit(codec.dumps(codec.search_result_to_dict(result)), args.output)


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kings", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p):
        p.add_argument("-o", "--output", help="write here instead of stdout")

    p = sub.add_parser("state", help="write a state as JSON")
    p.add_argument("--kind", required=True, choices=["coherent", "noon", "king", "dicke", "custom"])
    p.add_argument("--two-s", type=int, required=True, help="twice the spin, 2S")
    p.add_argument("--theta", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--m2", type=int, help="twice the projection m (dicke)")
    p.add_argument("--amplitudes", help="JSON list of [re, im] pairs, m = S first (custom)")
    add_output(p)
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("constellation", help="Majorana points of a state")
    p.add_argument("state", help="state JSON file ('-' for stdin)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    add_output(p)
    p.set_defaults(func=cmd_constellation)

    p = sub.add_parser("multipoles", help="state multipoles and the A_M table")
    p.add_argument("state")
    p.add_argument("--max-order", type=int)
    p.add_argument("--json", metavar="PATH", help="write the spectrum JSON here")
    p.add_argument("--csv", metavar="PATH", help="write the A_M table here (default: stdout)")
    p.set_defaults(func=cmd_multipoles)

    p = sub.add_parser("scan", help="projection probability against rotation angle")
    p.add_argument("state")
    p.add_argument("--axes", help="JSON file with [[theta_cap, phi_cap], ...]")
    p.add_argument("--axes-from", choices=["vertex", "facet"], help="use the state's own symmetry axes")
    p.add_argument("--omega-min", type=float, default=0.0)
    p.add_argument("--omega-max", type=float, default=2 * math.pi)
    p.add_argument("--omega-steps", type=int, default=121)
    add_output(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("sensitivity", help="small-angle sensitivity against the closed forms")
    p.add_argument("--family", choices=["kings", "noon"])
    p.add_argument("--state", help="state JSON file instead of a family")
    p.add_argument("--two-s", help="e.g. 6, 6,8,12 or 6-20 or 6-20:2")
    p.add_argument("--theta-cap", type=float, default=0.0)
    p.add_argument("--phi-cap", type=float, default=0.0)
    p.add_argument("--axes", type=int, default=1, help="number of random axes (overrides the angles)")
    p.add_argument("--seed", type=int, default=0, help="seed for random axes")
    add_output(p)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("search", help="find a state with vanishing multipoles up to --order")
    p.add_argument("--two-s", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cyclic", type=int, default=1, help="n-fold ring ansatz about z")
    p.add_argument("--real", action="store_true", help="real amplitudes only")
    add_output(p)
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except (UsageError, ValueError, KeyError) as exc:
        print(f"kings {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ZeroVarianceError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"kings {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"kings {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
