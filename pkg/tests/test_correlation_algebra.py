import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hcsignal.correlation_algebra import (
    COMPONENTS,
    OUTCOMES3,
    PARTIES,
    CorrelationTensor,
    Distribution,
    is_valid,
    marginal,
    mean,
    min_probability,
    no_signaling_violation,
    probabilities_from_tensor,
    product_distribution,
    tensor_from_probabilities,
)
from hcsignal.errors import ComponentOutOfRange, EmptySubset, NotNormalized
from hcsignal.quantum_core import LocalSetting, ghz_state, joint_distribution, settings_for

from oracles import eq3_probability

GHZ_Z = CorrelationTensor(0, 0, 0, 1, 1, 1, 0)


def test_zero_tensor_is_uniform():
    d = probabilities_from_tensor(CorrelationTensor())
    assert all(d[xi] == 1 / 8 for xi in OUTCOMES3)


@pytest.mark.parametrize("w", [-1.0, -0.3, 0.0, 0.4, 1.0])
def test_paper_witness_formulas(w):
    d = probabilities_from_tensor(CorrelationTensor(0, 0, 0, 0, 1, 1, w))
    assert d["++-"] == pytest.approx((-1 - w) / 8, abs=1e-15)
    assert d["--+"] == pytest.approx((-1 + w) / 8, abs=1e-15)
    d = probabilities_from_tensor(CorrelationTensor(0, 0, 0, 0, 2 / 3, 2 / 3, w))
    assert d["--+"] == pytest.approx((-1 / 3 + w) / 8, abs=1e-15)
    assert d["++-"] == pytest.approx((-1 / 3 - w) / 8, abs=1e-15)


def test_matches_term_by_term_oracle():
    rng = np.random.default_rng(3)
    for _ in range(200):
        t = CorrelationTensor.from_array(rng.uniform(-1, 1, 7))
        d = probabilities_from_tensor(t)
        for xi in OUTCOMES3:
            assert d[xi] == pytest.approx(eq3_probability(xi, t.to_dict()), abs=1e-15)
        assert d.total == pytest.approx(1.0, abs=1e-12)


def test_out_of_range_component():
    with pytest.raises(ComponentOutOfRange):
        probabilities_from_tensor(CorrelationTensor(e_ab=1.5))


def test_inverse_examples():
    uniform = Distribution(PARTIES, {xi: 1 / 8 for xi in OUTCOMES3})
    np.testing.assert_allclose(tensor_from_probabilities(uniform).as_array(), 0, atol=1e-15)
    ghz = Distribution(PARTIES, {xi: 0.5 if xi in [(1, 1, 1), (-1, -1, -1)] else 0.0 for xi in OUTCOMES3})
    np.testing.assert_allclose(tensor_from_probabilities(ghz).as_array(), [0, 0, 0, 1, 1, 1, 0], atol=1e-15)
    with pytest.raises(NotNormalized):
        tensor_from_probabilities(Distribution(PARTIES, {xi: 0.2 for xi in OUTCOMES3}))


def test_round_trip_random_distributions():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        p = rng.dirichlet(np.ones(8))
        d = Distribution(PARTIES, dict(zip(OUTCOMES3, p)))
        back = probabilities_from_tensor(tensor_from_probabilities(d))
        np.testing.assert_allclose(back.as_array(), p, atol=1e-12)


def test_is_valid_examples():
    assert is_valid(GHZ_Z)
    assert not is_valid(GHZ_Z.replace(e_ab=0.0))
    assert probabilities_from_tensor(GHZ_Z.replace(e_ab=0.0))["++-"] == pytest.approx(-1 / 8)
    assert is_valid(CorrelationTensor())


def test_marginals():
    d = joint_distribution(ghz_state(), settings_for("z"))
    a = marginal(d, ["A"])
    assert a["+"] == pytest.approx(0.5) and a["-"] == pytest.approx(0.5)
    bc = marginal(d, "BC")
    assert bc["++"] == pytest.approx(0.5) and bc["--"] == pytest.approx(0.5)
    assert bc["+-"] == pytest.approx(0.0, abs=1e-15) and bc["-+"] == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(EmptySubset):
        marginal(d, [])


def test_product_marginal_uniform():
    half = Distribution(("A",), {(1,): 0.5, (-1,): 0.5})
    prod3 = product_distribution(product_distribution(half, Distribution(("B",), {(1,): 0.5, (-1,): 0.5})),
                                 Distribution(("C",), {(1,): 0.5, (-1,): 0.5}))
    ab = marginal(prod3, "AB")
    assert all(v == pytest.approx(0.25) for v in ab.probs.values())


def test_no_signaling_examples():
    d = joint_distribution(ghz_state(), settings_for("z"))
    assert no_signaling_violation(d, d, "BC") == 0.0
    sx = [LocalSetting.axis("A", "x"), LocalSetting.axis("B", "z"), LocalSetting.axis("C", "z")]
    d2 = joint_distribution(ghz_state(), sx)
    assert no_signaling_violation(d, d2, "BC") < 1e-12
    # the invalid Condition-2 tensor keeps the B-C marginal; only negativity shows
    bad = probabilities_from_tensor(GHZ_Z.replace(e_ab=0.0))
    assert no_signaling_violation(d, bad, "BC") == pytest.approx(0.0, abs=1e-15)


def test_product_distribution_examples():
    u = Distribution(("A",), {(1,): 0.5, (-1,): 0.5})
    ub = Distribution(("B",), {(1,): 0.5, (-1,): 0.5})
    assert all(v == 0.25 for v in product_distribution(u, ub).probs.values())
    plus = Distribution(("A",), {(1,): 1.0, (-1,): 0.0})
    minus = Distribution(("B",), {(1,): 0.0, (-1,): 1.0})
    pm = product_distribution(plus, minus)
    assert pm["+-"] == 1.0 and pm.total == 1.0
    # GHZ singles are uniform, so the product has no A-B correlation
    assert mean(product_distribution(u, ub)) == 0.0
    with pytest.raises(NotNormalized):
        product_distribution(Distribution(("A",), {(1,): 0.7, (-1,): 0.7}), ub)


probs1 = st.floats(0, 1)


@settings(max_examples=50, deadline=None)
@given(pa=probs1, pb=probs1)
def test_product_correlator_is_product_of_means(pa, pb):
    ma = Distribution(("A",), {(1,): pa, (-1,): 1 - pa})
    mb = Distribution(("B",), {(1,): pb, (-1,): 1 - pb})
    prod = product_distribution(ma, mb)
    assert mean(prod) == pytest.approx(mean(ma) * mean(mb), abs=1e-12)
    assert marginal(prod, "A").as_array() == pytest.approx(ma.as_array(), abs=1e-15)
    assert marginal(prod, "B").as_array() == pytest.approx(mb.as_array(), abs=1e-15)


components = st.lists(st.floats(-1, 1), min_size=7, max_size=7)


@settings(max_examples=50, deadline=None)
@given(base=components, other=components)
def test_marginal_depends_only_on_subtensor(base, other):
    t1 = CorrelationTensor.from_array(base)
    # randomize everything that does not involve B or C alone or together
    t2 = t1.replace(e_a=other[0], e_ab=other[3], e_ac=other[4], e_abc=other[6])
    m1 = marginal(probabilities_from_tensor(t1), "BC")
    m2 = marginal(probabilities_from_tensor(t2), "BC")
    np.testing.assert_allclose(m1.as_array(), m2.as_array(), atol=1e-12)


@settings(max_examples=80, deadline=None)
@given(values=st.lists(st.floats(-1.2, 1.2), min_size=7, max_size=7))
def test_valid_implies_in_range(values):
    t = CorrelationTensor.from_array(values)
    if min_probability(t) >= -1e-9:
        assert all(abs(v) <= 1 + 1e-9 for v in values)


def test_serialization_keys():
    d = probabilities_from_tensor(GHZ_Z)
    assert list(d.to_dict()) == ["+++", "++-", "+-+", "+--", "-++", "-+-", "--+", "---"]
    assert list(GHZ_Z.to_dict()) == list(COMPONENTS)
    assert Distribution.from_dict(PARTIES, d.to_dict()) == d
