"""Which values of the unconstrained correlators keep every probability >= 0.

A ``ConstraintSpec`` pins some of the seven correlators and leaves the rest
free.  Each of the eight outcomes then contributes one linear inequality in the
free correlators, ``a . x + b >= 0`` (eight times the probability), and the
feasible set is the intersection of those half-spaces.  The character vectors
are linearly independent, so the set is always a bounded polytope; its vertices
are found by enumerating every square subsystem of active constraints.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .correlation_algebra import (
    CHARACTER_MATRIX,
    COMPONENT_PARTIES,
    COMPONENTS,
    PAIRS,
    CorrelationTensor,
)
from .errors import (
    ComponentNotFree,
    FixedValueOutOfRange,
    InputError,
    NonMonotonePredicate,
    TooManyFreeComponents,
    ZeroQMValue,
)

FEAS_TOL = 1e-9
DEDUP_TOL = 1e-9
MAX_FREE = 3


@dataclass(frozen=True)
class Fixed:
    value: float


class _Marker:
    def __init__(self, name: str):
        self._name = name

    def __repr__(self):
        return self._name

    def __reduce__(self):
        return self._name


FREE = _Marker("FREE")
# pair correlator equal to the product of its two (fixed) single correlators
PRODUCT = _Marker("PRODUCT")

Entry = Union[Fixed, _Marker]


@dataclass(frozen=True)
class ConstraintSpec:
    entries: Mapping[str, Entry]

    def __post_init__(self):
        entries = dict(self.entries)
        if set(entries) != set(COMPONENTS):
            missing = sorted(set(COMPONENTS) - set(entries))
            extra = sorted(set(entries) - set(COMPONENTS))
            raise InputError(f"constraint spec needs all seven components (missing {missing}, unknown {extra})")
        for name, entry in entries.items():
            if isinstance(entry, Fixed):
                v = float(entry.value)
                if not math.isfinite(v) or abs(v) > 1.0 + 1e-12:
                    raise FixedValueOutOfRange(f"{name} fixed to {entry.value!r}, outside [-1, 1]")
                entries[name] = Fixed(v)
            elif entry is PRODUCT:
                if name not in PAIRS:
                    raise InputError(f"product constraint only applies to pair correlators, not {name}")
                for i in COMPONENT_PARTIES[name]:
                    single = COMPONENTS[i]
                    if not isinstance(entries[single], Fixed):
                        raise InputError(f"product constraint on {name} needs {single} fixed")
            elif entry is not FREE:
                raise InputError(f"bad constraint entry for {name}: {entry!r}")
        object.__setattr__(self, "entries", {c: entries[c] for c in COMPONENTS})

    @classmethod
    def from_tensor(
        cls,
        tensor: CorrelationTensor,
        free: Sequence[str] = (),
        product: Sequence[str] = (),
        fixed: Mapping[str, float] | None = None,
    ) -> "ConstraintSpec":
        """Everything fixed at ``tensor`` except the listed overrides."""
        entries: dict[str, Entry] = {c: Fixed(tensor[c]) for c in COMPONENTS}
        for c in free:
            entries[c] = FREE
        for c in product:
            entries[c] = PRODUCT
        for c, v in (fixed or {}).items():
            entries[c] = Fixed(v)
        return cls(entries)

    @classmethod
    def all_free(cls) -> "ConstraintSpec":
        return cls({c: FREE for c in COMPONENTS})

    @property
    def free(self) -> tuple[str, ...]:
        return tuple(c for c in COMPONENTS if self.entries[c] is FREE)

    def resolved(self) -> dict[str, float]:
        """Values of all non-free components, products evaluated."""
        out = {c: e.value for c, e in self.entries.items() if isinstance(e, Fixed)}
        for c, e in self.entries.items():
            if e is PRODUCT:
                i, j = COMPONENT_PARTIES[c]
                out[c] = out[COMPONENTS[i]] * out[COMPONENTS[j]]
        return out

    def tensor_at(self, point: Sequence[float]) -> CorrelationTensor:
        values = self.resolved()
        values.update(zip(self.free, (float(v) for v in point)))
        return CorrelationTensor(**values)

    def half_spaces(self) -> tuple[np.ndarray, np.ndarray]:
        """Rows ``a`` and offsets ``b`` with ``8 p(outcome) = a . x + b``."""
        values = self.resolved()
        free_idx = [COMPONENTS.index(c) for c in self.free]
        fixed_idx = [COMPONENTS.index(c) for c in values]
        a = CHARACTER_MATRIX[:, free_idx]
        b = 1.0 + CHARACTER_MATRIX[:, fixed_idx] @ np.array([values[c] for c in values], dtype=float).reshape(-1)
        return a, b

    def to_dict(self) -> dict[str, object]:
        out: dict[str, object] = {}
        for c, e in self.entries.items():
            if e is FREE:
                out[c] = "free"
            elif e is PRODUCT:
                out[c] = "product"
            else:
                out[c] = {"fixed": e.value}
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, object], base: CorrelationTensor | None = None) -> "ConstraintSpec":
        """Parse the JSON form; components not mentioned are fixed at ``base``."""
        unknown = set(data) - set(COMPONENTS)
        if unknown:
            raise InputError(f"unknown constraint components {sorted(unknown)}")
        entries: dict[str, Entry] = {}
        for c in COMPONENTS:
            raw = data.get(c)
            if raw is None:
                if base is None:
                    raise InputError(f"constraint for {c} missing")
                entries[c] = Fixed(base[c])
            elif raw == "free":
                entries[c] = FREE
            elif raw == "product":
                entries[c] = PRODUCT
            elif isinstance(raw, Mapping) and set(raw) == {"fixed"}:
                entries[c] = Fixed(float(raw["fixed"]))
            else:
                raise InputError(f"cannot parse constraint for {c}: {raw!r}")
        return cls(entries)


@dataclass(frozen=True)
class FeasibleRegion:
    """Feasible values of the free correlators.

    ``dimension`` is the number of free correlators; ``affine_dimension`` is
    the dimension of the region itself (0 for a single point, -1 if empty).
    Vertices of a 2-d region are in counter-clockwise boundary order.
    """

    free: tuple[str, ...]
    vertices: tuple[tuple[float, ...], ...]
    empty: bool
    affine_dimension: int

    @property
    def dimension(self) -> int:
        return len(self.free)

    def to_dict(self) -> dict[str, object]:
        return {
            "empty": self.empty,
            "dimension": self.dimension,
            "affine_dimension": self.affine_dimension,
            "free": list(self.free),
            "vertices": [list(v) for v in self.vertices],
        }


def _check_free_count(spec: ConstraintSpec) -> None:
    if len(spec.free) > MAX_FREE:
        raise TooManyFreeComponents(f"{len(spec.free)} free components; at most {MAX_FREE} supported")


@functools.lru_cache(maxsize=None)
def _row_subsets(n: int, size: int) -> np.ndarray:
    return np.array(list(itertools.combinations(range(n), size)), dtype=np.intp).reshape(-1, size)


def _square_subsystems(a: np.ndarray, b: np.ndarray, size: int) -> np.ndarray:
    """Solutions of every nonsingular ``size``-row subsystem ``a x = -b``, one per
    row, in lexicographic order of the chosen rows."""
    rows = _row_subsets(a.shape[0], size)
    subs = a[rows]
    # integer-like matrices: a singular one has determinant exactly 0
    keep = np.abs(np.linalg.det(subs)) >= 0.5
    if not keep.any():
        return np.empty((0, size))
    return np.linalg.solve(subs[keep], -b[rows[keep]][..., None])[..., 0]


def max_min_probability(spec: ConstraintSpec) -> tuple[float, tuple[float, ...]]:
    """Maximize, over the free correlators, the smallest of the 8 probabilities.

    Exact epigraph vertex enumeration: the optimum of ``max s`` subject to
    ``a . x + b >= s`` sits where ``d + 1`` constraints are active.  When the
    optimal face is not a single vertex, the centroid of its vertices is
    returned as the argument.  With only eight constraints this stays cheap
    for any number of free correlators.
    """
    a, b = spec.half_spaces()
    d = a.shape[1]
    if d == 0:
        return float(b.min() / 8.0), ()
    aug = np.hstack([a, -np.ones((a.shape[0], 1))])
    sols = _square_subsystems(aug, b, d + 1)
    xs, ss = sols[:, :d], sols[:, d]
    ok = np.min(xs @ a.T + b - ss[:, None], axis=1) >= -1e-12
    if not ok.any():
        raise AssertionError("bounded LP without an optimal vertex")
    xs, ss = xs[ok], ss[ok]
    point = np.mean(xs[ss >= ss.max() - 1e-12], axis=0)
    value = float(np.min(a @ point + b) / 8.0)
    return value, tuple(float(v) for v in point)


def _dedup(points: list[np.ndarray], tol: float = DEDUP_TOL) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for p in points:
        if all(np.max(np.abs(p - q)) > tol for q in out):
            out.append(p)
    return out


def _order_vertices(points: list[np.ndarray]) -> list[np.ndarray]:
    if not points:
        return points
    d = points[0].size
    if d == 1:
        return sorted(points, key=lambda p: p[0])
    if d == 2 and len(points) > 2:
        c = np.mean(points, axis=0)
        return sorted(points, key=lambda p: math.atan2(p[1] - c[1], p[0] - c[0]))
    return sorted(points, key=lambda p: tuple(p))


def feasible_region(spec: ConstraintSpec, tol: float = FEAS_TOL) -> FeasibleRegion:
    _check_free_count(spec)
    a, b = spec.half_spaces()
    d = a.shape[1]
    value, argpoint = max_min_probability(spec)
    if value < -tol:
        return FeasibleRegion(spec.free, (), True, -1)
    if d == 0:
        return FeasibleRegion(spec.free, ((),), False, 0)

    slack = 8.0 * tol
    sols = _square_subsystems(a, b, d)
    candidates = list(sols[np.min(sols @ a.T + b, axis=1) >= -slack]) if len(sols) else []
    vertices = _order_vertices(_dedup(candidates))
    if not vertices:
        # feasible only through the tolerance margin
        vertices = [np.array(argpoint)]
    if len(vertices) == 1:
        affine = 0
    else:
        affine = int(np.linalg.matrix_rank(np.array(vertices[1:]) - vertices[0], tol=DEDUP_TOL))
    return FeasibleRegion(
        spec.free,
        tuple(tuple(float(v) for v in p) for p in vertices),
        False,
        affine,
    )


def project_interval(region: FeasibleRegion, component: str) -> tuple[float, float] | None:
    """Range of one free correlator over the region; ``None`` if the region is empty."""
    if component not in region.free:
        raise ComponentNotFree(f"{component} is not free in this region (free: {region.free})")
    if region.empty:
        return None
    k = region.free.index(component)
    coords = [v[k] for v in region.vertices]
    return min(coords), max(coords)


def bisect_threshold(
    predicate: Callable[[float], bool], lo: float, hi: float, atol: float = 1e-9
) -> float:
    """Smallest x in [lo, hi] with ``predicate(x)`` true, for a predicate that
    is false below some threshold and true above it.  Requires ``predicate(hi)``.
    """
    if not predicate(hi):
        raise NonMonotonePredicate(f"predicate false at upper end {hi!r}")
    if predicate(lo):
        return lo
    while hi - lo > atol:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _visibility_spec(qm: CorrelationTensor, component: str, v: float) -> ConstraintSpec:
    return ConstraintSpec.from_tensor(
        qm, free=("e_abc",), fixed={component: v * qm[component]}
    )


def _check_visibility_args(qm: CorrelationTensor, component: str) -> None:
    if component not in PAIRS:
        raise InputError(f"visibility applies to pair correlators {PAIRS}, not {component!r}")
    if abs(qm[component]) < 1e-12:
        raise ZeroQMValue(f"QM value of {component} is zero; visibility is undefined")


def visibility_feasible(qm: CorrelationTensor, component: str, v: float, tol: float = FEAS_TOL) -> bool:
    value, _ = max_min_probability(_visibility_spec(qm, component, v))
    return value >= -tol


def visibility_min(qm: CorrelationTensor, component: str = "e_ab", tol: float = FEAS_TOL) -> float:
    """Smallest V in [0, 1] for which the scaled correlator stays feasible."""
    _check_visibility_args(qm, component)
    v = bisect_threshold(lambda x: visibility_feasible(qm, component, x, tol), 0.0, 1.0)
    # feasible V form an interval ending at 1; spot-check it
    for probe in (v, 0.5 * (v + 1.0)):
        if not visibility_feasible(qm, component, probe, tol):
            raise NonMonotonePredicate(f"visibility {probe!r} above threshold {v!r} is infeasible")
    return v


def visibility_max(qm: CorrelationTensor, component: str = "e_ab", tol: float = FEAS_TOL) -> float:
    """Largest V in [0, 1] for which the scaled correlator stays feasible.

    Convexity of the feasible set makes the admissible V an interval, and the
    QM tensor itself (V = 1) must lie in it, so the maximum is 1 whenever that
    holds.
    """
    _check_visibility_args(qm, component)
    if not visibility_feasible(qm, component, 1.0, tol):
        raise NonMonotonePredicate(f"the QM value of {component} is itself infeasible")
    return 1.0
