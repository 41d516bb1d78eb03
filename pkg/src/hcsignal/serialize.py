"""JSON forms of scenarios and reports.

Numbers are written with 12 significant digits so that reports are stable
byte-for-byte; magnitudes below 1e-12 are written as 0.0.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from typing import Any, Mapping

from .causal_timing import (
    Model1Config,
    Model2Config,
    SpacetimeEvent,
    TimingStructure,
    model1_classify,
    multisim_classify,
)
from .correlation_algebra import PARTIES, probabilities_from_tensor
from .errors import InputError
from .feasibility import FEAS_TOL, ConstraintSpec
from .quantum_core import (
    LocalSetting,
    StateVector,
    correlation_tensor,
    ghz_state,
    w_state,
)
from .witness_engine import ChshBox, Mode, Scenario, VisibilityReport, WitnessReport

SIG_DIGITS = 12
ZERO_SNAP = 1e-12


def fmt_float(v: float) -> float | None:
    if v is None or not math.isfinite(v):
        return None
    if abs(v) < ZERO_SNAP:
        return 0.0
    return float(f"{v:.{SIG_DIGITS}g}")


def clean(obj: Any) -> Any:
    """Recursively round floats for output."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, Mapping):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(clean(obj), indent=2, ensure_ascii=False) + "\n"


def load_schema() -> dict:
    text = resources.files("hcsignal").joinpath("schemas/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


# -- reports -----------------------------------------------------------------

def report_to_dict(report: WitnessReport) -> dict[str, Any]:
    spec = report.constraint_spec
    worst_tensor = spec.tensor_at(report.worst_point)
    return {
        "qm_tensor": report.qm_tensor.to_dict(),
        "timing": report.timing.to_dict() if report.timing is not None else None,
        "constraints": spec.to_dict(),
        "region": report.region.to_dict(),
        "e_ab_interval": list(report.e_ab_interval) if report.e_ab_interval is not None else None,
        "worst_probability": report.worst_probability,
        "worst_point": dict(zip(spec.free, report.worst_point)),
        "probabilities_at_worst": probabilities_from_tensor(worst_tensor).to_dict(),
        "verdict": report.verdict.value,
    }


def box_to_dict(box: ChshBox) -> dict[str, Any]:
    return {
        "pairs": [
            {
                "alice": n,
                "bob": m,
                "qm_e_ab": box.qm_correlators[(n, m)],
                "e_ab_interval": list(box.intervals[(n, m)]),
            }
            for n, m in box.pairs
        ],
        "chsh_coefficients": list(box.chsh_coefficients),
        "qm_chsh": box.qm_chsh,
        "min_chsh": box.min_chsh,
        "max_chsh": box.max_chsh,
        "mixed_models_signal": box.signals,
    }


def visibility_to_dict(rep: VisibilityReport) -> dict[str, Any]:
    return {"qm_e_ab": rep.qm_value, "v_min": rep.v_min, "v_max": rep.v_max, "v_upper": rep.v_upper}


# -- scenario files ----------------------------------------------------------

SCENARIO_KEYS = {"state", "settings", "timing", "constraints", "mode", "chsh_selection", "tolerances"}
NAMED_STATES = {"ghz": ghz_state, "w": w_state}


def parse_state(raw: Any) -> StateVector:
    if isinstance(raw, str):
        try:
            return NAMED_STATES[raw.lower()]()
        except KeyError:
            raise InputError(f"unknown named state {raw!r}; use one of {sorted(NAMED_STATES)}") from None
    if not isinstance(raw, list) or len(raw) != 8:
        raise InputError("state must be 'ghz', 'w' or a list of 8 [re, im] pairs")
    amps = []
    for entry in raw:
        if isinstance(entry, (int, float)):
            amps.append(complex(entry))
        elif isinstance(entry, list) and len(entry) == 2:
            amps.append(complex(float(entry[0]), float(entry[1])))
        else:
            raise InputError(f"bad amplitude {entry!r}; expected [re, im]")
    return StateVector(amps)


def _is_vector(raw: Any) -> bool:
    return isinstance(raw, list) and len(raw) == 3 and all(isinstance(v, (int, float)) for v in raw)


def parse_setting(party: str, raw: Any) -> LocalSetting:
    if isinstance(raw, str):
        try:
            return LocalSetting.axis(party, raw)
        except KeyError:
            raise InputError(f"unknown axis {raw!r} for party {party}") from None
    if _is_vector(raw):
        return LocalSetting(party, tuple(float(v) for v in raw))
    raise InputError(f"setting for {party} must be an axis name or a Bloch triple, got {raw!r}")


def parse_settings(raw: Any) -> dict[str, list[LocalSetting]]:
    if not isinstance(raw, Mapping) or set(raw) != set(PARTIES):
        raise InputError(f"settings must map each of {list(PARTIES)} to a setting")
    out = {}
    for party in PARTIES:
        value = raw[party]
        if isinstance(value, list) and value and not _is_vector(value):
            out[party] = [parse_setting(party, v) for v in value]
        else:
            out[party] = [parse_setting(party, value)]
    return out


def _number(cfg: Mapping[str, Any], key: str, default: float | None = None) -> float:
    if key not in cfg:
        if default is None:
            raise InputError(f"timing config missing {key!r}")
        return default
    value = cfg[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"timing field {key!r} must be a number")
    return float(value)


def parse_timing(raw: Any, communication_only: bool = True) -> TimingStructure:
    if not isinstance(raw, Mapping):
        raise InputError("timing must be an object")
    if "pairs" in raw:
        if set(raw) != {"pairs"}:
            raise InputError(f"unknown timing keys {sorted(set(raw) - {'pairs'})}")
        try:
            return TimingStructure(raw["pairs"], communication_only)
        except (ValueError, TypeError) as exc:
            raise InputError(f"bad pair labels: {exc}") from None
    model = raw.get("model")
    if model == "pf":
        allowed = {"model", "x", "v_hc", "t_c", "delay_a", "delay_b"}
        if set(raw) - allowed:
            raise InputError(f"unknown pf timing keys {sorted(set(raw) - allowed)}")
        cfg = Model1Config.symmetric(
            _number(raw, "x"),
            _number(raw, "v_hc"),
            _number(raw, "t_c"),
            _number(raw, "delay_a", 0.0),
            _number(raw, "delay_b", 0.0),
        )
        return model1_classify(cfg, communication_only)
    if model == "multisim":
        allowed = {"model", "events", "velocities"}
        if set(raw) - allowed:
            raise InputError(f"unknown multisim timing keys {sorted(set(raw) - allowed)}")
        events, velocities = raw.get("events"), raw.get("velocities")
        if not (isinstance(events, list) and len(events) == 3 and isinstance(velocities, list) and len(velocities) == 3):
            raise InputError("multisim timing needs three [x, t] events and three velocities")
        cfg = Model2Config(
            {p: SpacetimeEvent(float(e[0]), float(e[1]), "lab") for p, e in zip(PARTIES, events)},
            {p: float(v) for p, v in zip(PARTIES, velocities)},
        )
        return multisim_classify(cfg)
    raise InputError(f"timing must give 'pairs' or a model 'pf'/'multisim', got {model!r}")


def parse_scenario(doc: Any):
    """Return ``("report", Scenario)`` or ``("box", kwargs for the box test)``."""
    if not isinstance(doc, Mapping):
        raise InputError("scenario file must hold a JSON object")
    unknown = set(doc) - SCENARIO_KEYS
    if unknown:
        raise InputError(f"unknown scenario keys {sorted(unknown)}")
    for key in ("state", "settings"):
        if key not in doc:
            raise InputError(f"scenario missing {key!r}")

    try:
        mode = Mode(doc.get("mode", Mode.COMMUNICATION_ONLY.value))
    except ValueError:
        raise InputError(f"unknown mode {doc.get('mode')!r}") from None
    tolerances = doc.get("tolerances", {})
    if not isinstance(tolerances, Mapping) or set(tolerances) - {"feasibility"}:
        raise InputError("tolerances may only contain 'feasibility'")
    tol = float(tolerances.get("feasibility", FEAS_TOL))

    state = parse_state(doc["state"])
    settings = parse_settings(doc["settings"])
    timing = None
    if "timing" in doc:
        timing = parse_timing(doc["timing"], mode is Mode.COMMUNICATION_ONLY)

    multi = any(len(v) > 1 for v in settings.values())
    if multi:
        if len(settings["C"]) != 1:
            raise InputError("Charlie makes a single measurement in the CHSH box test")
        if "constraints" in doc:
            raise InputError("explicit constraints are not supported for the CHSH box test")
        if timing is not None and timing.to_dict() != {"AB": "no_hc", "AC": "qm", "BC": "qm"}:
            raise InputError("the CHSH box test assumes A-B severed and A-C, B-C linked")
        selection = doc.get("chsh_selection", [[0, 1], [0, 1]])
        try:
            (n1, n2), (m1, m2) = selection
            selection = ((int(n1), int(n2)), (int(m1), int(m2)))
        except (TypeError, ValueError):
            raise InputError("chsh_selection must be [[n1, n2], [m1, m2]]") from None
        return "box", dict(
            state=state,
            alice_settings=settings["A"],
            bob_settings=settings["B"],
            charlie_setting=settings["C"][0],
            chsh_selection=selection,
            tol=tol,
        )
    if "chsh_selection" in doc:
        raise InputError("chsh_selection only applies when Alice and Bob have several settings")

    flat = tuple(settings[p][0] for p in PARTIES)
    constraints = None
    if "constraints" in doc:
        if not isinstance(doc["constraints"], Mapping):
            raise InputError("constraints must be an object")
        constraints = ConstraintSpec.from_dict(doc["constraints"], base=correlation_tensor(state, flat))
    if timing is None and constraints is None:
        raise InputError("scenario needs 'timing' or 'constraints'")
    return "report", Scenario(state, flat, timing, constraints, mode, tol)
