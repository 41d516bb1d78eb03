"""hcsignal command line.

    hcsignal demo ghz|w                 the two worked three-qubit examples
    hcsignal scenario FILE.json         evaluate a scenario file
    hcsignal timing --model pf ...      classify a detection layout
    hcsignal sweep --visibility ...     CSV rows for plotting
    hcsignal --schema                   print the report JSON schema

Exit codes: 0 consistent, 2 signaling witness found, 1 input or usage error,
3 internal consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

from . import __version__
from .causal_timing import (
    Model1Config,
    Model2Config,
    SpacetimeEvent,
    model1_classify,
    model1_timing_window,
    multisim_classify,
)
from .correlation_algebra import PARTIES
from .errors import ConsistencyError, EmptyIntervalEncountered, ZeroQMValue
from .feasibility import FEAS_TOL
from .quantum_core import LocalSetting, ghz_state, settings_for, w_state
from .serialize import (
    box_to_dict,
    dumps,
    fmt_float,
    load_schema,
    parse_scenario,
    report_to_dict,
    visibility_to_dict,
)
from .witness_engine import (
    Mode,
    Scenario,
    Verdict,
    mixed_model_box_test,
    run_scenario,
    severed_timing,
    visibility_report,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SIGNALING = 2
EXIT_INTERNAL = 3

DEMOS = {
    "ghz": (ghz_state, "z"),
    "w": (w_state, "x"),
}
STATES = {"ghz": ghz_state, "w": w_state}


class UsageError(Exception):
    pass


def _emit(text: str) -> None:
    sys.stdout.write(text)


def _require_json(args) -> None:
    if args.output not in (None, "json"):
        raise UsageError(f"'{args.command}' only writes json; csv output is for 'sweep'")


def cmd_demo(args) -> int:
    _require_json(args)
    if args.name not in DEMOS:
        raise UsageError(f"unknown demo {args.name!r}; choose from {sorted(DEMOS)}")
    make_state, axis = DEMOS[args.name]
    state = make_state()
    settings = settings_for(axis)
    reports = {}
    for mode in (Mode.COMMUNICATION_ONLY, Mode.MIXED_PROBE):
        scenario = Scenario(state, settings, severed_timing("AB"), mode=mode, tol=args.tol)
        reports[mode.value] = run_scenario(scenario)
    doc = {
        "demo": args.name,
        "state": args.name,
        "settings": {p: axis for p in PARTIES},
        "reports": {k: report_to_dict(r) for k, r in reports.items()},
    }
    _emit(dumps(doc))
    signaling = reports[Mode.COMMUNICATION_ONLY.value].verdict is Verdict.SIGNALING_WITNESS
    return EXIT_SIGNALING if signaling else EXIT_OK


def cmd_scenario(args) -> int:
    _require_json(args)
    try:
        with open(args.path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {args.path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.path} is not valid JSON: {exc}") from None
    kind, payload = parse_scenario(doc)
    if kind == "box":
        if args.tol_given:
            payload["tol"] = args.tol
        try:
            box = mixed_model_box_test(**payload)
        except EmptyIntervalEncountered as exc:
            _emit(dumps({"box": {"empty_pair": list(exc.pair), "mixed_models_signal": True}}))
            return EXIT_SIGNALING
        _emit(dumps({"box": box_to_dict(box)}))
        return EXIT_SIGNALING if box.signals else EXIT_OK
    scenario = payload
    if args.tol_given:
        scenario = Scenario(
            scenario.state, scenario.settings, scenario.timing, scenario.constraints, scenario.mode, args.tol
        )
    report = run_scenario(scenario)
    _emit(dumps({"report": report_to_dict(report)}))
    return EXIT_SIGNALING if report.verdict is Verdict.SIGNALING_WITNESS else EXIT_OK


def _parse_events(text: str) -> list[tuple[float, float]]:
    try:
        events = [tuple(float(v) for v in item.split(",")) for item in text.split(";")]
    except ValueError:
        raise UsageError(f"bad --events {text!r}; expected 'x,t;x,t;x,t'") from None
    if len(events) != 3 or any(len(e) != 2 for e in events):
        raise UsageError(f"bad --events {text!r}; expected three 'x,t' pairs")
    return events


def _parse_floats(text: str, n: int, flag: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad {flag} {text!r}") from None
    if len(values) != n:
        raise UsageError(f"{flag} needs {n} comma-separated numbers")
    return values


def cmd_timing(args) -> int:
    _require_json(args)
    if args.model == "pf":
        if args.x is None or args.v_hc is None:
            raise UsageError("--model pf needs --x and --v-hc")
        if not (args.x > 0 and args.v_hc > 0):
            raise UsageError("--x and --v-hc must be positive")
        window = model1_timing_window(args.x, args.v_hc)
        if window is None:
            print(
                f"warning: no admissible detection time for C; the window needs v_hc > 3 (got {args.v_hc:g})",
                file=sys.stderr,
            )
        doc: dict[str, Any] = {"model": "pf", "window": list(window) if window else None}
        if args.t_c is not None:
            cfg = Model1Config.symmetric(args.x, args.v_hc, args.t_c, args.delay_a, args.delay_b)
            doc["labels"] = model1_classify(cfg).to_dict()
        else:
            doc["labels"] = None
        _emit(dumps(doc))
        return EXIT_OK

    if args.receding is not None:
        v = args.receding
        events = [(-1.0, 0.0), (1.0, 0.0), (0.0, 0.5)]
        velocities = [-v, v, 0.0]
    else:
        if args.events is None:
            raise UsageError("--model multisim needs --events or --receding")
        events = _parse_events(args.events)
        velocities = _parse_floats(args.velocities, 3, "--velocities") if args.velocities else [0.0] * 3
    cfg = Model2Config(
        {p: SpacetimeEvent(x, t, "lab") for p, (x, t) in zip(PARTIES, events)},
        dict(zip(PARTIES, velocities)),
    )
    doc = {
        "model": "multisim",
        "events": [list(e) for e in events],
        "velocities": velocities,
        "labels": multisim_classify(cfg).to_dict(),
    }
    _emit(dumps(doc))
    return EXIT_OK


VISIBILITY_COLUMNS = ["index", "obs", "theta", "qm_e_ab", "v_min", "v_max", "v_upper", "status"]
BOX_COLUMNS = [
    "index", "phi", "qm_chsh", "min_chsh", "max_chsh",
    "e11_lo", "e11_hi", "e12_lo", "e12_hi", "e21_lo", "e21_hi", "e22_lo", "e22_hi", "signals",
]


def _grid(start: float, stop: float, steps: int) -> list[float]:
    if steps < 1:
        raise UsageError("--steps must be at least 1")
    if steps == 1:
        return [start]
    return [start + k * (stop - start) / (steps - 1) for k in range(steps)]


def _visibility_rows(args) -> list[dict[str, Any]]:
    state = STATES[args.state]()
    if args.obs is not None:
        points = [(axis, None, settings_for(axis)) for axis in args.obs.split(",")]
        for axis, _, _ in points:
            if axis not in ("x", "y", "z"):
                raise UsageError(f"--obs takes x, y or z, got {axis!r}")
    else:
        points = [
            (None, th, tuple(LocalSetting.from_angles(p, th) for p in PARTIES))
            for th in _grid(args.theta_start, args.theta_stop, args.steps)
        ]
    rows = []
    for i, (axis, theta, settings) in enumerate(points):
        row = {"index": i, "obs": axis or "", "theta": theta}
        try:
            rep = visibility_report(state, settings, args.tol)
        except ZeroQMValue:
            row.update(qm_e_ab=0.0, v_min=None, v_max=None, v_upper=None, status="zero_qm_value")
        else:
            row.update(visibility_to_dict(rep), status="ok")
        rows.append(row)
    return rows


def _axis_list(text: str, party: str) -> list[LocalSetting]:
    try:
        return [LocalSetting.axis(party, a) for a in text.split(",")]
    except KeyError:
        raise UsageError(f"bad axis list {text!r}; use x, y, z, optionally signed") from None


def _rotate_z(s: LocalSetting, phi: float) -> LocalSetting:
    x, y, z = s.bloch
    c, sn = math.cos(phi), math.sin(phi)
    vec = (c * x - sn * y, sn * x + c * y, z)
    n = math.sqrt(sum(v * v for v in vec))
    return LocalSetting(s.party, tuple(v / n for v in vec))


def _box_rows(args) -> list[dict[str, Any]]:
    state = STATES[args.state]()
    alice = _axis_list(args.alice, "A")
    bob = _axis_list(args.bob, "B")
    charlie = _axis_list(args.charlie, "C")
    if len(charlie) != 1:
        raise UsageError("--charlie takes a single axis")
    rows = []
    for i, phi in enumerate(_grid(args.phi_start, args.phi_stop, args.steps)):
        rotated = [_rotate_z(s, phi) for s in bob]
        row: dict[str, Any] = {"index": i, "phi": phi}
        try:
            box = mixed_model_box_test(state, alice, rotated, charlie[0], tol=args.tol)
        except EmptyIntervalEncountered:
            row["signals"] = "empty_interval"
            rows.append(row)
            continue
        row.update(qm_chsh=box.qm_chsh, min_chsh=box.min_chsh, max_chsh=box.max_chsh)
        for label, pair in zip(("e11", "e12", "e21", "e22"), box.pairs):
            row[f"{label}_lo"], row[f"{label}_hi"] = box.intervals[pair]
        row["signals"] = "yes" if box.signals else "no"
        rows.append(row)
    return rows


def _csv_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        f = fmt_float(v)
        return "nan" if f is None else repr(f)
    return str(v)


def cmd_sweep(args) -> int:
    if args.visibility:
        rows, columns = _visibility_rows(args), VISIBILITY_COLUMNS
    else:
        rows, columns = _box_rows(args), BOX_COLUMNS
    if args.output == "json":
        _emit(dumps([{c: row.get(c) for c in columns} for row in rows]))
        return EXIT_OK
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(c)) for c in columns])
    _emit(buf.getvalue())
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, defaults: bool) -> None:
    kw = {} if defaults else {"default": argparse.SUPPRESS}
    parser.add_argument("--tol", type=float, help=f"feasibility tolerance on probabilities (default {FEAS_TOL:g})",
                        **({"default": FEAS_TOL} if defaults else kw))
    parser.add_argument("--output", choices=("json", "csv"),
                        help="output format: json (default) or csv (sweep only, its default)",
                        **({"default": None} if defaults else kw))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcsignal",
        description="No-signaling feasibility checks for hidden-communication models of three-party correlations.",
        epilog="exit codes: 0 consistent, 2 signaling witness, 1 input error, 3 internal failure",
    )
    _add_common(parser, defaults=True)
    parser.add_argument("--schema", action="store_true", help="print the report JSON schema and exit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("demo", help="run a built-in example (ghz or w)")
    _add_common(p, defaults=False)
    p.add_argument("name", help="ghz (sigma_z on all) or w (sigma_x on all)")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("scenario", help="evaluate a scenario JSON file")
    _add_common(p, defaults=False)
    p.add_argument("path")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("timing", help="classify pair timing for a detection layout")
    _add_common(p, defaults=False)
    p.add_argument("--model", choices=("pf", "multisim"), required=True)
    p.add_argument("--x", type=float, help="pf: A at -x, B at +x, C at 0")
    p.add_argument("--v-hc", type=float, help="pf: hidden-communication speed (units of c)")
    p.add_argument("--t-c", type=float, help="pf: detection time of C")
    p.add_argument("--delay-a", type=float, default=0.0, help="pf: extra delay on A's detection")
    p.add_argument("--delay-b", type=float, default=0.0, help="pf: extra delay on B's detection")
    p.add_argument("--events", help="multisim: lab-frame events 'xA,tA;xB,tB;xC,tC' (use --events=...)")
    p.add_argument("--velocities", help="multisim: device velocities 'vA,vB,vC' (use --velocities=...)")
    p.add_argument("--receding", type=float,
                   help="multisim preset: A at x=-1 moving at -V, B at x=+1 at +V, C at rest detected at t=0.5")
    p.set_defaults(func=cmd_timing)

    p = sub.add_parser(
        "sweep",
        help="CSV sweep rows",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description=(
            "visibility columns: " + ",".join(VISIBILITY_COLUMNS) + "\n"
            "  v_min/v_max: feasible range of V in [0, 1] with E(AB) = V * E_QM(AB)\n"
            "  v_upper: upper end of the feasible V range without clipping at 1\n"
            "  grid: one row per --obs axis, or --steps angles theta (all parties in the x-z plane)\n"
            "box-chsh columns: " + ",".join(BOX_COLUMNS) + "\n"
            "  eNM_lo/hi: feasible E(AB) interval for Alice setting N, Bob setting M\n"
            "  grid: --steps rotations phi of Bob's settings about z\n"
            "  signals: yes when min_chsh > 2, i.e. no preparation can match"
        ),
    )
    _add_common(p, defaults=False)
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--visibility", action="store_true")
    kind.add_argument("--box-chsh", action="store_true")
    p.add_argument("--state", choices=sorted(STATES), default="ghz")
    p.add_argument("--obs", help="visibility: comma list of Pauli axes measured by all parties")
    p.add_argument("--theta-start", type=float, default=0.0)
    p.add_argument("--theta-stop", type=float, default=math.pi)
    p.add_argument("--phi-start", type=float, default=0.0)
    p.add_argument("--phi-stop", type=float, default=math.pi)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--alice", default="x,y", help="box-chsh: Alice's axes")
    p.add_argument("--bob", default="x,y", help="box-chsh: Bob's axes")
    p.add_argument("--charlie", default="x", help="box-chsh: Charlie's axis")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.schema:
        _emit(json.dumps(load_schema(), indent=2) + "\n")
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    args.tol_given = any(a == "--tol" or a.startswith("--tol=") for a in argv)
    try:
        return args.func(args)
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (UsageError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
