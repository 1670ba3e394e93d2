import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lemniscope.polyfield import Polynomial as P
from lemniscope.qdmodel import (
    INF,
    InfinityKind,
    ModelError,
    Properness,
    RationalMap,
    build,
    connectivity_predicate,
    critical_values,
    max_modulus_pairs,
    necessary_condition,
    properness_test,
)

S52 = 1.5811388300841898  # sqrt(5/2)


def _loc(qd):
    return sorted((z.location for z in qd.finite_zeros), key=lambda z: (z.real, z.imag))


def test_rejects_bad_maps():
    with pytest.raises(ModelError):
        RationalMap(P((3,)))
    with pytest.raises(ModelError):
        RationalMap(P((-1, 0, 1)), P((0, 1, 1)))  # shared root -1
    with pytest.raises(ModelError):
        RationalMap(P((1, 1)), P(()))


def test_quartic_critical_data(maps):
    qd = build(maps["e44"])
    assert np.allclose(_loc(qd), [-S52, 0, S52], atol=1e-12)
    assert [z.multiplicity for z in qd.finite_zeros] == [2, 2, 2]
    assert qd.infinity.kind is InfinityKind.DOUBLE_POLE
    assert qd.infinity.residue == -16
    assert {a.signed_multiplicity for a in qd.double_poles} == {1}
    assert len(qd.all_double_poles) == 5
    w = sorted(e.value.real for e in critical_values(qd))
    assert np.allclose(w, [-2.25, -2.25, 4], atol=1e-12)


def test_rational_with_regular_infinity(maps):
    qd = build(maps["rat3"])
    assert np.allclose(qd.numerator.array, [1, 4, 1])
    assert qd.infinity.kind is InfinityKind.REGULAR
    assert len(qd.all_double_poles) == 4


def test_infinity_as_zero():
    # deg p = deg q and N drops by three degrees: (z^2-1)/(z^2+1) has N = 4z
    qd = build(RationalMap(P((-1, 0, 1)), P((1, 0, 1))))
    assert qd.infinity.kind is InfinityKind.ZERO
    assert qd.zeros[-1].location == INF and qd.zeros[-1].multiplicity == 2
    tab = critical_values(qd)
    assert tab[-1].modulus == pytest.approx(1.0) and tab[0].modulus == pytest.approx(1.0)


def test_residue_at_a_double_pole_of_multiplicity_k():
    qd = build(RationalMap(P.from_roots([0, 0, 0, 1])))
    m = {round(a.location.real): a.signed_multiplicity for a in qd.double_poles}
    assert m == {0: 3, 1: 1}
    assert [a.residue for a in qd.all_double_poles if a.location == 0] == [-9.0]


def test_necessary_condition_examples(maps):
    qd = build(maps["e44"])
    idx = {round(z.location.real, 3): k for k, z in enumerate(qd.finite_zeros)}
    assert necessary_condition(qd, idx[-1.581], idx[1.581])
    assert not necessary_condition(qd, idx[0.0], idx[1.581])
    with pytest.raises(ValueError):
        necessary_condition(qd, 0, 0)


def test_connectivity_predicate_examples(maps):
    assert not connectivity_predicate(build(maps["e44"]))
    assert connectivity_predicate(build(maps["z3-3z"]))
    assert connectivity_predicate(build(maps["rat"]))
    assert not connectivity_predicate(build(maps["rat2"]))


def test_max_modulus_pairs(maps):
    qd = build(maps["z3-3z"])
    pairs = max_modulus_pairs(qd)
    assert len(pairs) == 1
    i, j = pairs[0]
    assert {round(qd.finite_zeros[i].location.real), round(qd.finite_zeros[j].location.real)} == {-1, 1}


@pytest.mark.parametrize(
    "p, expected",
    [
        (P((0, 0, 1)), Properness.PROPER),
        (P((-0.25, 0, 1)), Properness.PROPER),
        (P.from_roots([1, -1, 2, -2]) / 3, Properness.NOT_CONNECTED),
        (P((-1, 0, 1)), Properness.NOT_SMOOTH),
    ],
)
def test_properness(p, expected):
    assert properness_test(build(RationalMap(p))) is expected


def test_properness_needs_polynomial(maps):
    with pytest.raises(ValueError):
        properness_test(build(maps["rat"]))


def test_json_shape(maps):
    js = build(maps["e44"]).to_json()
    assert len(js["zeros"]) == 3 and len(js["double_poles"]) == 5
    assert js["infinity"]["kind"] == "double_pole"


_root = st.tuples(st.integers(-6, 6), st.integers(-6, 6)).map(lambda t: complex(t[0], t[1]) / 3)


@st.composite
def coprime_pairs(draw):
    zs = draw(st.lists(_root, min_size=1, max_size=6, unique=True))
    k = draw(st.integers(1, len(zs)))
    pz, qz = zs[:k], zs[k:]
    lead = draw(st.sampled_from([1.0, -2.0, 0.5j]))
    return RationalMap(P.from_roots(pz, lead), P.from_roots(qz))


@settings(max_examples=80, deadline=None)
@given(coprime_pairs())
def test_divisor_balance(r):
    qd = build(r)
    assert qd.divisor_balance() == -4


@settings(max_examples=40, deadline=None)
@given(coprime_pairs())
def test_residues_match_local_limit(r):
    """z^2 (N/pq)^2 evaluated at a + z tends to m_a^2 from every direction."""
    qd = build(r)
    N, pq = qd.numerator, r.p * r.q
    for a in qd.double_poles:
        if a.is_infinite:
            continue
        for d in (1, 1j, -1, -1j):
            z = 1e-7 * d
            val = z**2 * (N(a.location + z) / pq(a.location + z)) ** 2
            assert abs(val - a.signed_multiplicity**2) <= 1e-4 * a.signed_multiplicity**2
