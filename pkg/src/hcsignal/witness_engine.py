"""From a timing structure and a quantum state to a signaling verdict."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .causal_timing import PairLabel, TimingStructure
from .correlation_algebra import PARTIES, CorrelationTensor, pair_component
from .errors import (
    AfterAfterPresent,
    ConsistencyError,
    EmptyIntervalEncountered,
    InputError,
    UnsupportedTimingPattern,
)
from .feasibility import (
    FEAS_TOL,
    FREE,
    PRODUCT,
    ConstraintSpec,
    FeasibleRegion,
    feasible_region,
    max_min_probability,
    project_interval,
    visibility_max,
    visibility_min,
)
from .quantum_core import LocalSetting, StateVector, correlation_tensor


class Mode(str, enum.Enum):
    COMMUNICATION_ONLY = "communication_only"
    MIXED_PROBE = "mixed_probe"


class Verdict(str, enum.Enum):
    CONSISTENT_UNIQUE_QM = "consistent_unique_qm"
    CONSISTENT_RANGE = "consistent_range"
    SIGNALING_WITNESS = "signaling_witness"


@dataclass(frozen=True)
class Scenario:
    state: StateVector
    settings: tuple[LocalSetting, ...]
    timing: TimingStructure | None = None
    constraints: ConstraintSpec | None = None
    mode: Mode = Mode.COMMUNICATION_ONLY
    tol: float = FEAS_TOL

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        settings = tuple(self.settings)
        if sorted(s.party for s in settings) != list(PARTIES):
            raise InputError("a scenario needs exactly one setting per party")
        object.__setattr__(self, "settings", tuple(sorted(settings, key=lambda s: s.index)))
        if self.timing is None and self.constraints is None:
            raise InputError("a scenario needs a timing structure or an explicit constraint spec")


@dataclass(frozen=True)
class WitnessReport:
    qm_tensor: CorrelationTensor
    constraint_spec: ConstraintSpec
    region: FeasibleRegion
    e_ab_interval: tuple[float, float] | None
    worst_probability: float
    worst_point: tuple[float, ...]
    verdict: Verdict
    timing: TimingStructure | None = None


def build_constraints(scenario: Scenario) -> ConstraintSpec:
    """Condition 1 on every linked pair and all singles; the severed pair is
    either the product of its singles (communication only) or free (mixed
    model probe); the triple correlator is free whenever a pair is severed.
    """
    if scenario.constraints is not None:
        return scenario.constraints
    timing = scenario.timing
    undefined = timing.pairs_with(PairLabel.AFTER_AFTER)
    if undefined:
        raise AfterAfterPresent(
            f"pairs {list(undefined)} have after-after timing, for which the model defines no "
            "correlations (ordering them would require a causal loop)"
        )
    severed = timing.pairs_with(PairLabel.NO_HC)
    if len(severed) > 1:
        raise UnsupportedTimingPattern(f"more than one pair without hidden communication: {list(severed)}")
    qm = correlation_tensor(scenario.state, scenario.settings)
    if not severed:
        return ConstraintSpec.from_tensor(qm)
    entry = PRODUCT if scenario.mode is Mode.COMMUNICATION_ONLY else FREE
    entries = dict(ConstraintSpec.from_tensor(qm, free=("e_abc",)).entries)
    entries[pair_component(severed[0])] = entry
    return ConstraintSpec(entries)


def run_scenario(scenario: Scenario) -> WitnessReport:
    qm = correlation_tensor(scenario.state, scenario.settings)
    spec = build_constraints(scenario)
    region = feasible_region(spec, scenario.tol)
    worst, point = max_min_probability(spec)

    if region.empty:
        interval = None
    elif "e_ab" in region.free:
        interval = project_interval(region, "e_ab")
    else:
        v = spec.resolved()["e_ab"]
        interval = (v, v)

    if region.empty != (worst < -scenario.tol):
        raise ConsistencyError(f"region emptiness {region.empty} disagrees with worst probability {worst!r}")
    if region.empty:
        verdict = Verdict.SIGNALING_WITNESS
    elif region.affine_dimension == 0:
        verdict = Verdict.CONSISTENT_UNIQUE_QM
    else:
        verdict = Verdict.CONSISTENT_RANGE
    return WitnessReport(qm, spec, region, interval, worst, point, verdict, scenario.timing)


CHSH_SIGNS = (1, 1, 1, -1)


@dataclass(frozen=True)
class ChshBox:
    """Interval-box CHSH bounds for the A-B correlators under no-signaling.

    ``intervals[(n, m)]`` is the feasible range of E(AB) when Alice uses her
    n-th setting and Bob his m-th; the CHSH combination uses the four pairs
    in ``pairs`` with signs (+, +, +, -).
    """

    pairs: tuple[tuple[int, int], ...]
    intervals: dict[tuple[int, int], tuple[float, float]]
    qm_correlators: dict[tuple[int, int], float]
    min_chsh: float
    max_chsh: float
    qm_chsh: float
    tol: float = FEAS_TOL
    chsh_coefficients: tuple[int, ...] = field(default=CHSH_SIGNS)

    @property
    def signals(self) -> bool:
        """Every preparation-only A-B model would violate CHSH here."""
        return self.min_chsh > 2.0 + self.tol


def severed_ab_spec(qm: CorrelationTensor) -> ConstraintSpec:
    return ConstraintSpec.from_tensor(qm, free=("e_ab", "e_abc"))


def mixed_model_box_test(
    state: StateVector,
    alice_settings: Sequence[LocalSetting],
    bob_settings: Sequence[LocalSetting],
    charlie_setting: LocalSetting,
    chsh_selection: tuple[tuple[int, int], tuple[int, int]] = ((0, 1), (0, 1)),
    tol: float = FEAS_TOL,
) -> ChshBox:
    if len(alice_settings) < 2 or len(bob_settings) < 2:
        raise InputError("the CHSH box test needs at least two settings for Alice and for Bob")
    (n1, n2), (m1, m2) = chsh_selection
    if n1 == n2 or m1 == m2:
        raise InputError("CHSH selection must name two distinct settings per party")
    for n in (n1, n2):
        if not 0 <= n < len(alice_settings):
            raise InputError(f"Alice setting index {n} out of range")
    for m in (m1, m2):
        if not 0 <= m < len(bob_settings):
            raise InputError(f"Bob setting index {m} out of range")

    pairs = ((n1, m1), (n1, m2), (n2, m1), (n2, m2))
    intervals = {}
    qm_values = {}
    for n, m in pairs:
        settings = (alice_settings[n], bob_settings[m], charlie_setting)
        qm = correlation_tensor(state, settings)
        region = feasible_region(severed_ab_spec(qm), tol)
        if region.empty:
            raise EmptyIntervalEncountered((n, m))
        intervals[(n, m)] = project_interval(region, "e_ab")
        qm_values[(n, m)] = qm.e_ab

    lo, hi = box_chsh_bounds([intervals[p] for p in pairs])
    qm_chsh = sum(s * qm_values[p] for p, s in zip(pairs, CHSH_SIGNS))
    return ChshBox(pairs, intervals, qm_values, lo, hi, qm_chsh, tol)


def box_chsh_bounds(intervals: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Min and max of E1 + E2 + E3 - E4 over a box of four intervals.

    S is linear in each term, so both extremes sit at interval endpoints.
    """
    lo = [iv[0] if s > 0 else -iv[1] for iv, s in zip(intervals, CHSH_SIGNS)]
    hi = [iv[1] if s > 0 else -iv[0] for iv, s in zip(intervals, CHSH_SIGNS)]
    return sum(lo), sum(hi)


@dataclass(frozen=True)
class VisibilityReport:
    qm_value: float
    v_min: float
    v_max: float
    v_upper: float  # largest scaling allowed by the feasible interval, not clipped at 1


def visibility_report(state: StateVector, settings: Sequence[LocalSetting], tol: float = FEAS_TOL) -> VisibilityReport:
    """Feasible range of V for E(AB) = V * E_QM(AB), Condition 1 elsewhere.

    The bounds come from the exact E(AB) interval; the bisection search in
    ``feasibility`` must agree with them.
    """
    qm = correlation_tensor(state, settings)
    v_bisect = visibility_min(qm, "e_ab", tol)
    v_max = visibility_max(qm, "e_ab", tol)
    lo, hi = project_interval(feasible_region(severed_ab_spec(qm), tol), "e_ab")
    v_lo, v_hi = sorted((lo / qm.e_ab, hi / qm.e_ab))
    v_min = min(max(v_lo, 0.0), 1.0)
    if abs(v_min - v_bisect) > 1e-6:
        raise ConsistencyError(f"interval visibility {v_min!r} disagrees with bisection {v_bisect!r}")
    return VisibilityReport(qm.e_ab, v_min, v_max, v_hi)


def all_linked_timing() -> TimingStructure:
    return TimingStructure({p: PairLabel.QM for p in ("AB", "AC", "BC")})


def severed_timing(pair: str = "AB") -> TimingStructure:
    labels = {p: PairLabel.QM for p in ("AB", "AC", "BC")}
    labels[pair] = PairLabel.NO_HC
    return TimingStructure(labels)
