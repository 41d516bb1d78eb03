import numpy as np
import pytest
from scipy.optimize import linprog

from hcsignal.correlation_algebra import COMPONENTS, CorrelationTensor, min_probability
from hcsignal.errors import (
    ComponentNotFree,
    FixedValueOutOfRange,
    InputError,
    NonMonotonePredicate,
    TooManyFreeComponents,
    ZeroQMValue,
)
from hcsignal.feasibility import (
    FREE,
    PRODUCT,
    ConstraintSpec,
    Fixed,
    bisect_threshold,
    feasible_region,
    max_min_probability,
    project_interval,
    visibility_feasible,
    visibility_max,
    visibility_min,
)
from hcsignal.quantum_core import correlation_tensor, random_setting, random_state

from oracles import (
    OUTCOMES,
    eq3_probability,
    grid_min_probability,
    grid_min_probability_1d,
)

GHZ_Z = CorrelationTensor(0, 0, 0, 1, 1, 1, 0)
W_X = CorrelationTensor(0, 0, 0, 2 / 3, 2 / 3, 2 / 3, 0)
# hand-enumerated from the eight sign patterns: u - w >= 1/3, u + w >= 1/3, u + w <= 1, u - w <= 1
W_VERTICES = [(1 / 3, 0.0), (2 / 3, -1 / 3), (1.0, 0.0), (2 / 3, 1 / 3)]


def ghz_spec(**kw):
    return ConstraintSpec.from_tensor(GHZ_Z, free=("e_ab", "e_abc"), **kw)


def w_spec(**kw):
    return ConstraintSpec.from_tensor(W_X, free=("e_ab", "e_abc"), **kw)


def lp_max_min(spec: ConstraintSpec) -> float:
    """scipy LP oracle: max t s.t. p_outcome(x) >= t, probabilities by substitution."""
    free = spec.free
    fixed = spec.resolved()
    d = len(free)
    rows, rhs = [], []
    for xi in OUTCOMES:
        base = eq3_probability(xi, {**fixed, **{c: 0.0 for c in free}})
        coeffs = [eq3_probability(xi, {**fixed, **{c: float(c == f) for c in free}}) - base for f in free]
        # t - coeffs . x <= base
        rows.append([-c for c in coeffs] + [1.0])
        rhs.append(base)
    res = linprog(
        c=[0.0] * d + [-1.0],
        A_ub=np.array(rows),
        b_ub=np.array(rhs),
        bounds=[(None, None)] * (d + 1),
        method="highs",
    )
    assert res.status == 0
    return -res.fun


def test_ghz_region_is_the_qm_point():
    region = feasible_region(ghz_spec())
    assert not region.empty
    assert region.affine_dimension == 0
    assert len(region.vertices) == 1
    np.testing.assert_allclose(region.vertices[0], (1.0, 0.0), atol=1e-9)
    assert project_interval(region, "e_ab") == pytest.approx((1.0, 1.0), abs=1e-9)
    assert project_interval(region, "e_abc") == pytest.approx((0.0, 0.0), abs=1e-9)


def test_ghz_condition2_is_empty():
    spec = ConstraintSpec.from_tensor(GHZ_Z, free=("e_abc",), product=("e_ab",))
    assert spec.resolved()["e_ab"] == 0.0
    region = feasible_region(spec)
    assert region.empty and region.vertices == ()
    value, point = max_min_probability(spec)
    assert value == pytest.approx(-1 / 8, abs=1e-12)
    assert point == pytest.approx((0.0,), abs=1e-12)
    assert project_interval(region, "e_abc") is None


def test_w_region_polygon():
    region = feasible_region(w_spec())
    assert region.affine_dimension == 2
    assert len(region.vertices) == 4
    got = sorted(region.vertices)
    np.testing.assert_allclose(got, sorted(W_VERTICES), atol=1e-12)
    lo, hi = project_interval(region, "e_ab")
    assert lo == pytest.approx(1 / 3, abs=1e-12)
    assert hi == pytest.approx(1.0, abs=1e-12)


def test_w_region_vertices_on_grid():
    u, w, pmin = grid_min_probability(
        {c: W_X[c] for c in COMPONENTS if c not in ("e_ab", "e_abc")}, ("e_ab", "e_abc")
    )
    feasible = pmin >= -1e-9
    iu, iw = np.nonzero(feasible)
    assert u[iu].min() == pytest.approx(1 / 3, abs=1e-3)
    assert u[iu].max() == pytest.approx(1.0, abs=1e-3)
    for vu, vw in W_VERTICES:
        near = (np.abs(u[:, None] - vu) <= 1e-3) & (np.abs(w[None, :] - vw) <= 1e-3)
        # within one grid step the probabilities drop by at most 2 * step / 8
        assert np.any(near & (pmin >= -2e-3 / 8 - 1e-12))


def test_region_vertices_are_ordered_boundary():
    region = feasible_region(w_spec())
    v = np.array(region.vertices)
    # consecutive cross products share one sign for a convex boundary walk
    e = np.roll(v, -1, axis=0) - v
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    assert np.all(cross > 0)


def test_max_min_examples():
    value, _ = max_min_probability(ghz_spec())
    assert value == pytest.approx(0.0, abs=1e-12)
    value, point = max_min_probability(ConstraintSpec.all_free())
    assert value == pytest.approx(1 / 8, abs=1e-15)
    np.testing.assert_allclose(point, np.zeros(7), atol=1e-15)


def test_max_min_matches_lp_oracle():
    rng = np.random.default_rng(21)
    for _ in range(60):
        qm = correlation_tensor(random_state(rng), [random_setting(p, rng) for p in "ABC"])
        n_free = rng.integers(0, 4)
        free = tuple(rng.choice(COMPONENTS, size=n_free, replace=False))
        spec = ConstraintSpec.from_tensor(qm, free=free)
        if rng.random() < 0.5 and not {"e_a", "e_b", "e_ab"} & set(free):
            spec = ConstraintSpec({**spec.entries, "e_ab": PRODUCT})
        value, point = max_min_probability(spec)
        if spec.free:
            assert value == pytest.approx(lp_max_min(spec), abs=1e-9)
        else:
            assert value == pytest.approx(min_probability(spec.tensor_at(())), abs=1e-15)
        assert min_probability(spec.tensor_at(point)) == pytest.approx(value, abs=1e-12)


def test_errors():
    spec = ConstraintSpec.from_tensor(GHZ_Z, free=("e_a", "e_b", "e_c", "e_ab"))
    with pytest.raises(TooManyFreeComponents):
        feasible_region(spec)
    with pytest.raises(FixedValueOutOfRange):
        ConstraintSpec.from_tensor(GHZ_Z, fixed={"e_ab": 1.5})
    with pytest.raises(ComponentNotFree):
        project_interval(feasible_region(w_spec()), "e_ac")
    with pytest.raises(InputError):
        ConstraintSpec({**ghz_spec().entries, "e_a": FREE, "e_ab": PRODUCT})
    with pytest.raises(InputError):
        ConstraintSpec({**ghz_spec().entries, "e_abc": PRODUCT})


def test_point_check_dimension_zero():
    region = feasible_region(ConstraintSpec.from_tensor(GHZ_Z))
    assert not region.empty and region.dimension == 0 and region.vertices == ((),)
    region = feasible_region(ConstraintSpec.from_tensor(GHZ_Z, fixed={"e_ab": 0.0}))
    assert region.empty


def test_one_free_matches_1d_grid():
    spec = ConstraintSpec.from_tensor(W_X, free=("e_abc",))
    region = feasible_region(spec)
    lo, hi = project_interval(region, "e_abc")
    fixed = {c: W_X[c] for c in COMPONENTS if c != "e_abc"}
    u, pmin = grid_min_probability_1d(fixed, "e_abc")
    ok = u[pmin >= -1e-9]
    assert ok.min() == pytest.approx(lo, abs=1e-3)
    assert ok.max() == pytest.approx(hi, abs=1e-3)


def test_three_free_vertices_feasible():
    rng = np.random.default_rng(4)
    for _ in range(20):
        qm = correlation_tensor(random_state(rng), [random_setting(p, rng) for p in "ABC"])
        spec = ConstraintSpec.from_tensor(qm, free=("e_ab", "e_bc", "e_abc"))
        region = feasible_region(spec)
        assert not region.empty
        for v in region.vertices:
            assert min_probability(spec.tensor_at(v)) >= -1e-9
        # the QM point lies in the region, so it is within the vertex bounding box
        coords = np.array(region.vertices)
        q = np.array([qm.e_ab, qm.e_bc, qm.e_abc])
        assert np.all(q >= coords.min(axis=0) - 1e-9) and np.all(q <= coords.max(axis=0) + 1e-9)


def test_interval_endpoints_attained():
    rng = np.random.default_rng(9)
    for _ in range(50):
        qm = correlation_tensor(random_state(rng), [random_setting(p, rng) for p in "ABC"])
        spec = ConstraintSpec.from_tensor(qm, free=("e_ab", "e_abc"))
        region = feasible_region(spec)
        for comp in ("e_ab", "e_abc"):
            lo, hi = project_interval(region, comp)
            k = region.free.index(comp)
            for target in (lo, hi):
                v = next(v for v in region.vertices if v[k] == target)
                assert min_probability(spec.tensor_at(v)) >= -1e-9


def test_qm_tensor_always_feasible():
    rng = np.random.default_rng(13)
    for _ in range(50):
        qm = correlation_tensor(random_state(rng), [random_setting(p, rng) for p in "ABC"])
        assert min_probability(qm) >= -1e-12
        assert not feasible_region(ConstraintSpec.from_tensor(qm, free=("e_ab", "e_abc"))).empty


def test_emptiness_matches_certificate():
    rng = np.random.default_rng(17)
    for _ in range(100):
        qm = correlation_tensor(random_state(rng), [random_setting(p, rng) for p in "ABC"])
        spec = ConstraintSpec.from_tensor(qm, free=("e_abc",), product=("e_ab",))
        region = feasible_region(spec)
        value, _ = max_min_probability(spec)
        assert region.empty == (value < -1e-9)


def test_bisect_threshold():
    assert bisect_threshold(lambda x: x >= 0.3, 0.0, 1.0) == pytest.approx(0.3, abs=1e-9)
    assert bisect_threshold(lambda x: True, 0.0, 1.0) == 0.0
    with pytest.raises(NonMonotonePredicate):
        bisect_threshold(lambda x: False, 0.0, 1.0)


def test_visibility():
    assert visibility_min(GHZ_Z) == pytest.approx(1.0, abs=1e-7)
    assert visibility_max(GHZ_Z) == 1.0
    assert visibility_min(W_X) == pytest.approx(0.5, abs=1e-7)
    assert visibility_max(W_X) == 1.0
    # companion check straight from the interval [1/3, 1]
    assert visibility_feasible(W_X, "e_ab", 0.5 + 1e-6)
    assert not visibility_feasible(W_X, "e_ab", 0.5 - 1e-6)
    with pytest.raises(ZeroQMValue):
        visibility_max(GHZ_Z.replace(e_ab=0.0))
    with pytest.raises(NonMonotonePredicate):
        # an invalid "QM" tensor: V = 1 is already infeasible
        visibility_max(CorrelationTensor(0, 0, 0, 0.5, 1, 1, 0))


def test_spec_json_round_trip():
    spec = ConstraintSpec.from_tensor(GHZ_Z, free=("e_abc",), product=("e_ab",))
    data = spec.to_dict()
    assert data["e_ab"] == "product" and data["e_abc"] == "free" and data["e_ac"] == {"fixed": 1.0}
    assert ConstraintSpec.from_dict(data) == spec
    partial = ConstraintSpec.from_dict({"e_ab": {"fixed": 0.0}, "e_abc": "free"}, base=GHZ_Z)
    assert partial.entries["e_ab"] == Fixed(0.0) and partial.entries["e_ac"] == Fixed(1.0)
    with pytest.raises(InputError):
        ConstraintSpec.from_dict({"e_xy": "free"}, base=GHZ_Z)
