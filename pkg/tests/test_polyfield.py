import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lemniscope.polyfield import (
    Polynomial as P,
    RootFindingError,
    coprime,
    derivative,
    evaluate,
    roots,
    wronskian_numerator,
)

E44 = P((4, 0, -5, 0, 1))  # (z^2-1)(z^2-4)


def test_construction_strips_trailing_zeros():
    assert P((1, 2, 0, 0)).degree == 1
    assert P(()).is_zero and P(()).degree == -math.inf


def test_evaluate_examples():
    assert evaluate(E44, 1) == 0
    assert evaluate(E44, 0) == 4
    assert evaluate(E44, 1j) == 10
    assert np.allclose(evaluate(E44, np.array([1, 2, -1])), 0)


def test_derivative_example():
    assert derivative(E44) == P((0, -10, 0, 4))
    assert derivative(P((5,))).is_zero


def test_wronskian_examples():
    assert wronskian_numerator(P((-1, 0, 1)), P((1, 0, 1))) == P((0, 4))
    assert wronskian_numerator(P((-4, 0, 1)), P((1, 0, 1))) == P((0, 10))
    with pytest.raises(ValueError):
        wronskian_numerator(P(()), P(()))


def test_roots_of_derivative():
    rs = roots(P((0, -10, 0, 4)))
    got = sorted(rs.locations, key=lambda z: z.real)
    # sqrt(5/2)
    assert np.allclose(got, [-1.5811388300841898, 0, 1.5811388300841898], atol=1e-12)
    assert rs.multiplicities == [1, 1, 1]


@pytest.mark.parametrize("m", [2, 3, 4])
def test_multiple_roots_cluster(m):
    rs = roots(P.from_roots([1.0] * m + [-2.0]))
    assert len(rs) == 2
    by_loc = {round(z.real): k for z, k in rs}
    assert by_loc == {1: m, -2: 1}


def test_zero_roots_are_exact():
    rs = roots(P.monomial(3) * P((-1, 1)))
    assert rs.roots[0] == (0j, 3)


def test_roots_rejects_constants():
    with pytest.raises(ValueError):
        roots(P((3,)))


def test_root_finding_error_carries_best_estimate():
    err = RootFindingError("x", np.array([1j]))
    assert isinstance(err, ArithmeticError) and err.best[0] == 1j


def test_coprime_examples():
    assert coprime(P((-1, 0, 1)), P((1, 0, 1)))
    assert not coprime(P((-1, 0, 1)), P((0, 1, 1)))
    assert coprime(P((0, 1)), P((1,)))


def test_json_roundtrip():
    p = P((1 + 2j, 0, -3))
    assert P.from_json(p.to_json()) == p


_coef = st.tuples(st.floats(-1, 1), st.floats(-1, 1)).map(lambda t: complex(*t))


@settings(max_examples=60, deadline=None)
@given(st.lists(_coef, min_size=1, max_size=8))
def test_roots_reconstruct_monic_polynomial(head):
    mono = P(tuple(head) + (1,))
    rs = roots(mono, cluster_rtol=0)  # no merging: compare against raw factors
    pts = [z for z, m in rs for _ in range(m)]
    rec = P.from_roots(pts).array
    err = np.max(np.abs(rec - mono.array)) / max(1.0, mono.scale())
    assert err <= 1e-8


@settings(max_examples=60, deadline=None)
@given(st.lists(_coef, min_size=2, max_size=9), _coef)
def test_derivative_matches_central_difference(c, z):
    p = P(tuple(c))
    h = 1e-6
    fd = (p(z + h) - p(z - h)) / (2 * h)
    exact = derivative(p)(z)
    assert abs(fd - exact) <= 1e-5 * max(1.0, abs(exact))


@settings(max_examples=60, deadline=None)
@given(st.lists(_coef, min_size=1, max_size=7), st.lists(_coef, min_size=1, max_size=7))
def test_wronskian_antisymmetry(a, b):
    p, q = P(tuple(a)), P(tuple(b))
    if p.is_zero and q.is_zero:
        return
    assert wronskian_numerator(p, q) == -wronskian_numerator(q, p)
