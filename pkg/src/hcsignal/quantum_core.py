"""Exact three-qubit quantum predictions.

Basis order is |000>, |001>, ..., |111> with party A on the most significant
bit, so amplitude index ``4*a + 2*b + c``.  Outcome +1 of ``n . sigma`` is
the eigenvalue +1 eigenvector; for sigma_z that is |0>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .correlation_algebra import (
    COMPONENT_PARTIES,
    COMPONENTS,
    OUTCOMES3,
    PARTIES,
    CorrelationTensor,
    Distribution,
)
from .errors import ConsistencyError, DuplicateParty, NonNormalizedState, NonUnitBloch

NORM_TOL = 1e-12
IMAG_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (8,):
            raise ValueError(f"a three-qubit state needs 8 amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise NonNormalizedState(
                f"state is not normalized: sum |a|^2 = {norm2:.15g} "
                f"(deficit {1.0 - norm2:.3e})"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes: Iterable[complex]) -> "StateVector":
        amps = np.asarray(list(amplitudes), dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise NonNormalizedState("zero vector cannot be normalized")
        return cls(amps / norm)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        amps = np.zeros(8, dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(2, 2, 2)

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return bool(np.array_equal(self.amplitudes, other.amplitudes))

    def __hash__(self):
        return hash(self.amplitudes.tobytes())


@dataclass(frozen=True)
class LocalSetting:
    party: str
    bloch: tuple[float, float, float]

    def __post_init__(self):
        party = str(self.party).upper()
        if party not in PARTIES:
            raise ValueError(f"unknown party {self.party!r}")
        vec = tuple(float(v) for v in self.bloch)
        if len(vec) != 3:
            raise NonUnitBloch(f"Bloch vector needs 3 components, got {len(vec)}")
        length = math.sqrt(sum(v * v for v in vec))
        if abs(length - 1.0) > NORM_TOL:
            raise NonUnitBloch(f"Bloch vector {vec} has length {length!r}")
        object.__setattr__(self, "party", party)
        object.__setattr__(self, "bloch", vec)

    @classmethod
    def axis(cls, party: str, name: str) -> "LocalSetting":
        """Pauli measurement along ``"x"``, ``"y"`` or ``"z"``; a leading ``-`` flips it."""
        sign = -1.0 if name.startswith("-") else 1.0
        return cls(party, tuple(sign * v for v in AXES[name.lstrip("+-").lower()]))

    @classmethod
    def from_angles(cls, party: str, theta: float, phi: float = 0.0) -> "LocalSetting":
        st = math.sin(theta)
        vec = (st * math.cos(phi), st * math.sin(phi), math.cos(theta))
        # renormalize away the last-ulp drift of sin/cos
        n = math.sqrt(sum(v * v for v in vec))
        return cls(party, tuple(v / n for v in vec))

    @property
    def index(self) -> int:
        return PARTIES.index(self.party)

    def operator(self) -> np.ndarray:
        nx, ny, nz = self.bloch
        return nx * SIGMA_X + ny * SIGMA_Y + nz * SIGMA_Z

    def projector(self, outcome: int) -> np.ndarray:
        if outcome not in (1, -1):
            raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")
        return (IDENTITY + outcome * self.operator()) / 2


def ghz_state() -> StateVector:
    amps = np.zeros(8, dtype=complex)
    amps[0] = amps[7] = 1 / math.sqrt(2)
    return StateVector(amps)


def w_state() -> StateVector:
    amps = np.zeros(8, dtype=complex)
    amps[1] = amps[2] = amps[4] = 1 / math.sqrt(3)
    return StateVector(amps)


def _by_party(settings: Iterable[LocalSetting]) -> dict[int, LocalSetting]:
    out: dict[int, LocalSetting] = {}
    for s in settings:
        if s.index in out:
            raise DuplicateParty(f"two settings given for party {s.party}")
        out[s.index] = s
    return out


def _apply_local(psi: np.ndarray, ops: dict[int, np.ndarray]) -> np.ndarray:
    """Apply one 2x2 operator per listed qubit axis of a (2,2,2) tensor."""
    out = psi
    for axis, op in ops.items():
        out = np.moveaxis(np.tensordot(op, out, axes=([1], [axis])), 0, axis)
    return out


def expectation(state: StateVector, settings: Iterable[LocalSetting]) -> float:
    """<psi| (x) n.sigma |psi> over the listed parties, identity elsewhere."""
    by_party = _by_party(settings)
    if not by_party:
        raise ValueError("expectation needs at least one setting")
    psi = state.tensor()
    phi = _apply_local(psi, {i: s.operator() for i, s in by_party.items()})
    value = np.vdot(psi, phi)
    if abs(value.imag) > IMAG_TOL:
        raise ConsistencyError(f"expectation has imaginary part {value.imag!r}")
    return float(value.real)


def _full_settings(settings: Iterable[LocalSetting]) -> dict[int, LocalSetting]:
    by_party = _by_party(settings)
    if set(by_party) != {0, 1, 2}:
        missing = [PARTIES[i] for i in range(3) if i not in by_party]
        raise ValueError(f"missing settings for parties {missing}")
    return by_party


def joint_probability(state: StateVector, settings: Iterable[LocalSetting], outcome: Sequence[int]) -> float:
    by_party = _full_settings(settings)
    if len(outcome) != 3 or any(x not in (1, -1) for x in outcome):
        raise ValueError(f"outcome must be three signs, got {outcome!r}")
    projected = _apply_local(
        state.tensor(), {i: by_party[i].projector(outcome[i]) for i in range(3)}
    )
    return float(np.vdot(projected, projected).real)


def joint_distribution(state: StateVector, settings: Iterable[LocalSetting]) -> Distribution:
    settings = list(settings)
    return Distribution(
        PARTIES, {xi: joint_probability(state, settings, xi) for xi in OUTCOMES3}
    )


def correlation_tensor(state: StateVector, settings: Iterable[LocalSetting]) -> CorrelationTensor:
    by_party = _full_settings(settings)
    values = [
        expectation(state, [by_party[i] for i in COMPONENT_PARTIES[c]]) for c in COMPONENTS
    ]
    return CorrelationTensor.from_array(values)


def settings_for(axes: Sequence[str] | str) -> tuple[LocalSetting, LocalSetting, LocalSetting]:
    """Pauli settings for A, B, C; ``"z"`` means all sigma_z, ``"xzx"`` per party."""
    if len(axes) == 1:
        axes = axes * 3
    return tuple(LocalSetting.axis(p, a) for p, a in zip(PARTIES, axes))


def random_state(rng: np.random.Generator) -> StateVector:
    amps = rng.normal(size=8) + 1j * rng.normal(size=8)
    return StateVector.normalized(amps)


def random_setting(party: str, rng: np.random.Generator) -> LocalSetting:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return LocalSetting(party, tuple(v))
