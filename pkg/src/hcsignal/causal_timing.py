"""Event timing for the two hidden-communication models.

Units have c = 1 and one spatial dimension.  In the preferred-frame model the
hidden communication travels at ``v_hc`` in that frame, and two detections
are correlated only if the communication from the earlier one reaches the
later one.  In the multisimultaneity model each particle judges order in the
rest frame of its own choice-device.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping

from .correlation_algebra import PARTIES
from .errors import InputError, SuperluminalFrame

REACH_TOL = 1e-12
PAIR_NAMES = ("AB", "AC", "BC")


class PairLabel(str, enum.Enum):
    QM = "qm"
    NO_HC = "no_hc"
    AFTER_AFTER = "after_after"


@dataclass(frozen=True)
class SpacetimeEvent:
    x: float
    t: float
    frame: str = "pf"

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.t)):
            raise InputError(f"event coordinates must be finite, got ({self.x}, {self.t})")

    def delayed(self, dt: float) -> "SpacetimeEvent":
        return SpacetimeEvent(self.x, self.t + dt, self.frame)


@dataclass(frozen=True)
class TimingStructure:
    labels: Mapping[str, PairLabel]
    communication_only: bool = True

    def __post_init__(self):
        labels = {_norm_pair(k): PairLabel(v) for k, v in self.labels.items()}
        if set(labels) != set(PAIR_NAMES):
            raise InputError(f"timing needs labels for exactly {PAIR_NAMES}, got {sorted(labels)}")
        object.__setattr__(self, "labels", {p: labels[p] for p in PAIR_NAMES})

    def __getitem__(self, pair: str) -> PairLabel:
        return self.labels[_norm_pair(pair)]

    def pairs_with(self, label: PairLabel) -> tuple[str, ...]:
        return tuple(p for p in PAIR_NAMES if self.labels[p] is label)

    def to_dict(self) -> dict[str, str]:
        return {p: self.labels[p].value for p in PAIR_NAMES}


def _norm_pair(pair: str) -> str:
    letters = sorted(pair.upper(), key=PARTIES.index)
    return "".join(letters)


@dataclass(frozen=True)
class Model1Config:
    events: Mapping[str, SpacetimeEvent]
    v_hc: float
    delay_a: float = 0.0
    delay_b: float = 0.0

    def __post_init__(self):
        if set(self.events) != set(PARTIES):
            raise InputError(f"need one event per party {PARTIES}")
        if not self.v_hc > 0:
            raise InputError(f"hidden-communication speed must be positive, got {self.v_hc!r}")
        if not (math.isfinite(self.delay_a) and math.isfinite(self.delay_b)):
            raise InputError("delays must be finite")
        if self.delay_a < 0 or self.delay_b < 0:
            raise InputError("delays must be non-negative")

    @classmethod
    def symmetric(cls, x: float, v_hc: float, t_c: float, delay_a: float = 0.0, delay_b: float = 0.0) -> "Model1Config":
        """A at -x and B at +x detected at t = 0, C at the origin at ``t_c``."""
        events = {
            "A": SpacetimeEvent(-x, 0.0),
            "B": SpacetimeEvent(x, 0.0),
            "C": SpacetimeEvent(0.0, t_c),
        }
        return cls(events, v_hc, delay_a, delay_b)

    def detection_events(self) -> dict[str, SpacetimeEvent]:
        return {
            "A": self.events["A"].delayed(self.delay_a),
            "B": self.events["B"].delayed(self.delay_b),
            "C": self.events["C"],
        }


@dataclass(frozen=True)
class Model2Config:
    events: Mapping[str, SpacetimeEvent]
    device_velocity: Mapping[str, float] = field(default_factory=lambda: {p: 0.0 for p in PARTIES})

    def __post_init__(self):
        if set(self.events) != set(PARTIES) or set(self.device_velocity) != set(PARTIES):
            raise InputError(f"need one event and one device velocity per party {PARTIES}")
        for p, v in self.device_velocity.items():
            if not abs(v) < 1:
                raise SuperluminalFrame(f"device {p} moves at {v!r}; need |v| < 1")


def lorentz_time(event: SpacetimeEvent, v: float) -> float:
    """Time coordinate of ``event`` in a frame moving at ``v`` along x."""
    if not abs(v) < 1:
        raise SuperluminalFrame(f"frame velocity {v!r} is not below light speed")
    gamma = 1.0 / math.sqrt(1.0 - v * v)
    return gamma * (event.t - v * event.x)


def hc_reachable(src: SpacetimeEvent, dst: SpacetimeEvent, v_hc: float) -> bool:
    dt = dst.t - src.t
    if not dt > 0:
        return False
    return abs(dst.x - src.x) <= v_hc * dt + REACH_TOL


def model1_timing_window(x: float, v_hc: float) -> tuple[float, float] | None:
    """Open interval of detection times for C that lets the hidden
    communication from both A and B (and from a delayed A or B) reach C while
    no light signal from A or B does.  ``None`` when it is empty.
    """
    if not (x > 0 and v_hc > 0):
        raise InputError(f"need x > 0 and v_hc > 0, got x={x!r}, v_hc={v_hc!r}")
    # decide on v_hc itself: 3x/v_hc < x can round the wrong way next to v_hc = 3
    if not v_hc > 3.0:
        return None
    return (3.0 * x / v_hc, x)


def model1_classify(cfg: Model1Config, communication_only: bool = True) -> TimingStructure:
    """Label each pair by whether hidden communication links its detections.

    ``communication_only`` is carried on the result; the labels themselves do
    not depend on it.
    """
    ev = cfg.detection_events()
    labels = {}
    for pair in PAIR_NAMES:
        e1, e2 = ev[pair[0]], ev[pair[1]]
        linked = hc_reachable(e1, e2, cfg.v_hc) or hc_reachable(e2, e1, cfg.v_hc)
        labels[pair] = PairLabel.QM if linked else PairLabel.NO_HC
    return TimingStructure(labels, communication_only)


def _is_before(me: str, other: str, cfg: Model2Config) -> bool:
    # simultaneity in my device frame counts as "the other has not chosen yet"
    v = cfg.device_velocity[me]
    return lorentz_time(cfg.events[other], v) >= lorentz_time(cfg.events[me], v)


def multisim_classify(cfg: Model2Config) -> TimingStructure:
    labels = {}
    for pair in PAIR_NAMES:
        x, y = pair
        n_before = _is_before(x, y, cfg) + _is_before(y, x, cfg)
        labels[pair] = {2: PairLabel.NO_HC, 1: PairLabel.QM, 0: PairLabel.AFTER_AFTER}[n_before]
    return TimingStructure(labels)
