import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lemniscope.oracle import Window, winding_number
from lemniscope.polyfield import Polynomial as P
from lemniscope.qdmodel import RationalMap, build
from lemniscope.tracer import (
    DEFAULT_OPTIONS,
    TraceError,
    arg_monotonicity_check,
    level_loops,
    level_seeds,
    oversample,
    ray_angles,
    trace_critical,
    trace_level,
)

Z2 = RationalMap(P((0, 0, 1)))
Z2M1 = RationalMap(P((-1, 0, 1)))


def _level_error(t, r):
    return np.max(np.abs(np.abs(r(t.points)) - t.level)) / t.level


def test_unit_circle():
    t = trace_level(Z2, 1.0, 1 + 0j)
    assert t.closed
    assert np.allclose(np.abs(t.points), 1, atol=1e-10)
    assert t.total_arg_change == pytest.approx(4 * math.pi, abs=1e-9)
    rep = arg_monotonicity_check(t, Z2)
    assert rep.ok and rep.winding_multiple == pytest.approx(2)


def test_loop_around_one_zero():
    t = trace_level(Z2M1, 0.5, math.sqrt(1.5) + 0j)
    assert winding_number(t.points, 1) != 0
    assert winding_number(t.points, -1) == 0
    assert arg_monotonicity_check(t, Z2M1).total_arg_change == pytest.approx(2 * math.pi, abs=1e-9)


def test_loop_around_both_zeros():
    t = trace_level(Z2M1, 4.0, math.sqrt(5) + 0j)
    assert winding_number(t.points, 1) != 0 and winding_number(t.points, -1) != 0
    assert t.total_arg_change == pytest.approx(4 * math.pi, abs=1e-9)


def test_loop_around_pole_has_negative_ccw_change(maps):
    r = maps["rat"]
    loops = level_loops(r, 10.0)
    assert len(loops) == 2
    for t in loops:
        rep = arg_monotonicity_check(t, r)
        assert rep.ok
        # traced with increasing arg r, i.e. clockwise around the pole
        assert rep.total_arg_change == pytest.approx(2 * math.pi, abs=1e-9)
        assert rep.ccw_arg_change == pytest.approx(-2 * math.pi, abs=1e-9)


def test_trace_level_preconditions():
    with pytest.raises(ValueError):
        trace_level(Z2M1, 0.5, 3 + 0j)  # seed off the level
    with pytest.raises(ValueError):
        trace_level(Z2M1, 1.0, math.sqrt(2) + 0j)  # critical level


@pytest.mark.parametrize("c, count", [(0.1, 2), (10.0, 2)])
def test_level_seeds_rational(maps, c, count):
    assert len(level_seeds(maps["rat"], c, Window(-3, 3, -3, 3))) == count


def test_level_seeds_monomial():
    assert len(level_seeds(Z2, 1.0)) == 1


@pytest.mark.parametrize("key", ["z2-1", "z3-3z", "e44", "t4"])
def test_ray_angles_are_evenly_spaced(maps, key):
    for cp in build(maps[key]).zeros:
        a = ray_angles(cp)
        assert len(a) == cp.multiplicity + 2
        gaps = np.diff(np.append(a, a[0] + 2 * math.pi))
        assert np.max(np.abs(gaps - 2 * math.pi / (cp.multiplicity + 2))) <= 1e-9


def test_critical_figure_eight():
    qd = build(Z2M1)
    ends = [trace_critical(qd, 0, j) for j in range(4)]
    for t in ends:
        assert t.start.vertex == 0 and t.end.vertex == 0
        assert arg_monotonicity_check(t, Z2M1).monotone
    lobes = {tuple(sorted((t.start.ray, t.end.ray))) for t in ends}
    assert len(lobes) == 2
    enclosed = sorted(
        1 if winding_number(t.points, 1) else -1 for t in ends
    )
    assert enclosed == [-1, -1, 1, 1]


def test_critical_rays_reach_infinity(maps):
    qd = build(maps["rat"])
    for j in range(4):
        t = trace_critical(qd, 0, j)
        assert {t.start.vertex, t.end.vertex} == {0, 1}
        assert any(t.ends_at_infinity)


def test_critical_quartic_lobes(maps):
    r = maps["e44"]
    qd = build(r)
    k = next(i for i, z in enumerate(qd.finite_zeros) if z.location.real > 1)
    loops = [trace_critical(qd, k, j) for j in range(4)]
    inside = {round(x) for t in loops for x in (1, 2) if t.end.vertex == k and winding_number(t.points, x)}
    assert inside == {1, 2}


def test_trace_error_on_tiny_budget():
    with pytest.raises(TraceError):
        trace_level(Z2, 1.0, 1 + 0j, DEFAULT_OPTIONS.__class__(max_steps=5))


@pytest.mark.parametrize("key", ["z2-1", "z3-3z", "e44", "rat", "rat2", "rat3"])
def test_level_invariant_on_critical_edges(maps, key):
    from lemniscope.graphbuilder import build_graph

    r = maps[key]
    for e in build_graph(build(r)).edges:
        t = e.trajectory
        assert _level_error(t, r) <= DEFAULT_OPTIONS.trace_tol
        rep = oversample(t, r, 10)
        assert rep.max_level_error <= DEFAULT_OPTIONS.trace_tol
        assert rep.max_shift <= 0.05


_root = st.tuples(st.integers(-8, 8), st.integers(-8, 8)).map(lambda t: complex(*t) / 4)


@settings(max_examples=15, deadline=None)
@given(st.lists(_root, min_size=1, max_size=4, unique=True), st.floats(0.05, 20))
def test_loops_satisfy_invariants(zs, c):
    r = RationalMap(P.from_roots(zs))
    try:
        loops = level_loops(r, c)
    except ValueError:
        return  # level too close to a critical modulus
    assert loops
    for t in loops:
        assert _level_error(t, r) <= DEFAULT_OPTIONS.trace_tol
        assert oversample(t, r, 10).max_level_error <= DEFAULT_OPTIONS.trace_tol
        assert arg_monotonicity_check(t, r).ok
