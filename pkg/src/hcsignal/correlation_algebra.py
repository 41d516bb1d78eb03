"""Correlators and outcome distributions for three dichotomic parties.

Outcomes are labelled +1/-1 per party, in party order A, B, C.  A joint
distribution is fully described by seven correlators (three singles, three
pairs, one triple) through

    p(xa, xb, xc) = 1/8 [1 + xa eA + xb eB + xc eC
                         + xa xb eAB + xa xc eAC + xb xc eBC + xa xb xc eABC]

and this module converts between the two descriptions.  Distributions are
allowed to carry negative entries: a negative probability is the object that
signals an impossible constraint set, so it is computed rather than rejected.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, fields
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ComponentOutOfRange, EmptySubset, NotNormalized

PARTIES = ("A", "B", "C")

# component name -> indices of the parties whose outcomes it multiplies
COMPONENT_PARTIES: dict[str, tuple[int, ...]] = {
    "e_a": (0,),
    "e_b": (1,),
    "e_c": (2,),
    "e_ab": (0, 1),
    "e_ac": (0, 2),
    "e_bc": (1, 2),
    "e_abc": (0, 1, 2),
}
COMPONENTS = tuple(COMPONENT_PARTIES)
SINGLES = ("e_a", "e_b", "e_c")
PAIRS = ("e_ab", "e_ac", "e_bc")

OUTCOMES3: tuple[tuple[int, int, int], ...] = tuple(itertools.product((1, -1), repeat=3))

RANGE_TOL = 1e-9
NORM_TOL = 1e-9


def outcome_label(outcome: Sequence[int]) -> str:
    return "".join("+" if x > 0 else "-" for x in outcome)


def parse_outcome(label: str) -> tuple[int, ...]:
    if not label or any(ch not in "+-" for ch in label):
        raise ValueError(f"bad outcome label {label!r}")
    return tuple(1 if ch == "+" else -1 for ch in label)


def character(component: str, outcome: Sequence[int]) -> int:
    """Product of the outcome signs that ``component`` multiplies."""
    return math.prod(outcome[i] for i in COMPONENT_PARTIES[component])


def pair_name(component: str) -> str:
    """``"e_ab"`` -> ``"AB"``."""
    return "".join(PARTIES[i] for i in COMPONENT_PARTIES[component])


def pair_component(pair: str) -> str:
    """``"AB"`` -> ``"e_ab"``; accepts any order of the two letters."""
    idx = sorted(PARTIES.index(ch) for ch in pair.upper())
    for name, parties in COMPONENT_PARTIES.items():
        if parties == tuple(idx):
            return name
    raise ValueError(f"no correlator for parties {pair!r}")


# the 8x7 sign matrix, built from the character definition
CHARACTER_MATRIX = np.array(
    [[character(c, xi) for c in COMPONENTS] for xi in OUTCOMES3], dtype=float
)


@dataclass(frozen=True)
class CorrelationTensor:
    e_a: float = 0.0
    e_b: float = 0.0
    e_c: float = 0.0
    e_ab: float = 0.0
    e_ac: float = 0.0
    e_bc: float = 0.0
    e_abc: float = 0.0

    def __getitem__(self, component: str) -> float:
        if component not in COMPONENT_PARTIES:
            raise KeyError(component)
        return getattr(self, component)

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, c) for c in COMPONENTS], dtype=float)

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "CorrelationTensor":
        values = [float(v) for v in values]
        if len(values) != len(COMPONENTS):
            raise ValueError(f"expected {len(COMPONENTS)} components, got {len(values)}")
        return cls(*values)

    def replace(self, **changes: float) -> "CorrelationTensor":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        for key, value in changes.items():
            if key not in data:
                raise KeyError(key)
            data[key] = float(value)
        return CorrelationTensor(**data)

    def to_dict(self) -> dict[str, float]:
        return {c: getattr(self, c) for c in COMPONENTS}


@dataclass(frozen=True)
class Distribution:
    """Map from outcome tuples to (possibly negative) weights.

    ``parties`` lists the party letters in canonical order; a distribution over
    all three parties plays the role of Distribution3, two parties
    Distribution2, and so on.
    """

    parties: tuple[str, ...]
    probs: Mapping[tuple[int, ...], float]

    def __post_init__(self):
        expected = set(itertools.product((1, -1), repeat=len(self.parties)))
        if set(self.probs) != expected:
            raise ValueError("distribution must assign a weight to every outcome")

    def __getitem__(self, outcome) -> float:
        if isinstance(outcome, str):
            outcome = parse_outcome(outcome)
        return self.probs[tuple(outcome)]

    def outcomes(self) -> list[tuple[int, ...]]:
        return list(itertools.product((1, -1), repeat=len(self.parties)))

    @property
    def total(self) -> float:
        return math.fsum(self.probs.values())

    def min(self) -> float:
        return min(self.probs.values())

    def as_array(self) -> np.ndarray:
        return np.array([self.probs[o] for o in self.outcomes()], dtype=float)

    def to_dict(self) -> dict[str, float]:
        return {outcome_label(o): self.probs[o] for o in self.outcomes()}

    @classmethod
    def from_dict(cls, parties: Sequence[str], data: Mapping[str, float]) -> "Distribution":
        return cls(tuple(parties), {parse_outcome(k): float(v) for k, v in data.items()})


def _check_range(t: CorrelationTensor, tol: float = RANGE_TOL) -> None:
    for c in COMPONENTS:
        v = t[c]
        if not (-1.0 - tol <= v <= 1.0 + tol):
            raise ComponentOutOfRange(f"{c} = {v!r} lies outside [-1, 1]")


def _check_normalized(d: Distribution, tol: float = NORM_TOL) -> None:
    if abs(d.total - 1.0) > tol:
        raise NotNormalized(f"weights sum to {d.total!r}, not 1")


def probabilities_from_tensor(t: CorrelationTensor) -> Distribution:
    _check_range(t)
    values = (1.0 + CHARACTER_MATRIX @ t.as_array()) / 8.0
    return Distribution(PARTIES, {xi: float(v) for xi, v in zip(OUTCOMES3, values)})


def tensor_from_probabilities(d: Distribution) -> CorrelationTensor:
    if d.parties != PARTIES:
        raise ValueError(f"need a distribution over {PARTIES}, got {d.parties}")
    _check_normalized(d)
    return CorrelationTensor.from_array(CHARACTER_MATRIX.T @ d.as_array())


def min_probability(t: CorrelationTensor) -> float:
    return float(np.min(1.0 + CHARACTER_MATRIX @ t.as_array()) / 8.0)


def is_valid(t: CorrelationTensor, tol: float = 1e-9) -> bool:
    """True iff all eight probabilities built from ``t`` are >= -tol."""
    return min_probability(t) >= -tol


def _party_indices(d: Distribution, parties: Iterable[str]) -> tuple[int, ...]:
    wanted = {p.upper() for p in parties}
    if not wanted:
        raise EmptySubset("marginal over an empty set of parties")
    unknown = wanted - set(d.parties)
    if unknown:
        raise ValueError(f"parties {sorted(unknown)} not in distribution over {d.parties}")
    return tuple(i for i, p in enumerate(d.parties) if p in wanted)


def marginal(d: Distribution, parties: Iterable[str]) -> Distribution:
    keep = _party_indices(d, parties)
    acc: dict[tuple[int, ...], list[float]] = {
        o: [] for o in itertools.product((1, -1), repeat=len(keep))
    }
    for outcome, p in d.probs.items():
        acc[tuple(outcome[i] for i in keep)].append(p)
    return Distribution(
        tuple(d.parties[i] for i in keep), {o: math.fsum(v) for o, v in acc.items()}
    )


def no_signaling_violation(d1: Distribution, d2: Distribution, spectator_parties: Iterable[str]) -> float:
    """Largest change of the spectators' marginal between two distributions."""
    spectator_parties = list(spectator_parties)
    m1 = marginal(d1, spectator_parties)
    m2 = marginal(d2, spectator_parties)
    return max(abs(m1.probs[o] - m2.probs[o]) for o in m1.outcomes())


def product_distribution(m_a: Distribution, m_b: Distribution) -> Distribution:
    _check_normalized(m_a)
    _check_normalized(m_b)
    if set(m_a.parties) & set(m_b.parties):
        raise ValueError("product of distributions sharing a party")
    probs = {
        oa + ob: m_a.probs[oa] * m_b.probs[ob]
        for oa in m_a.outcomes()
        for ob in m_b.outcomes()
    }
    return Distribution(m_a.parties + m_b.parties, probs)


def mean(d: Distribution) -> float:
    """Expectation of the product of all outcome signs in ``d``."""
    return math.fsum(math.prod(o) * p for o, p in d.probs.items())
