import math

import pytest

from lemniscope.graphbuilder import build_graph, domain_configurations
from lemniscope.qdmodel import build
from lemniscope.teichcheck import (
    ANGLE_SNAP,
    AngleSnapError,
    _snap,
    polygon_from_face,
    polygon_from_loop,
    teichmuller_sum,
    verify_configuration,
)
from lemniscope.tracer import level_loops


@pytest.mark.parametrize("key", ["z2-1", "z3-3z", "e44", "t4", "rat", "rat2", "rat3"])
def test_every_face_balances(maps, key):
    qd = build(maps[key])
    g = build_graph(qd)
    dc = domain_configurations(g, qd)
    for face in dc.faces:
        poly = polygon_from_face(face, g, dc.anchor)
        res = teichmuller_sum(poly)
        assert isinstance(res.lhs, int) and isinstance(res.rhs, int)
        assert res.ok, (key, res)
        for c in poly.corners:
            assert abs(c.measured - c.angle) < ANGLE_SNAP
    assert all(entry["ok"] for entry in verify_configuration(g, dc))


def test_figure_eight_lobe_is_a_right_angled_monogon(maps):
    qd = build(maps["z2-1"])
    g = build_graph(qd)
    dc = domain_configurations(g, qd)
    lobes = [f for f in dc.faces if len(f.walks[0].traversal) == 1]
    assert len(lobes) == 2
    for f in lobes:
        poly = polygon_from_face(f, g, dc.anchor)
        (c,) = poly.corners
        assert c.sectors == 1 and c.multiplicity == 2
        assert c.measured == pytest.approx(math.pi / 2, abs=math.radians(0.5))
        assert [n for _, n in poly.interior] == [-2]


def test_smooth_loop_polygon(maps):
    r = maps["z2-1"]
    qd = build(r)
    (loop,) = level_loops(r, 4.0, qd=qd)
    poly = polygon_from_loop(loop, qd)
    # two double poles and one simple zero of the differential inside: 0 = 2 + (-4 + 2)
    assert sorted(n for _, n in poly.interior) == [-2, -2, 2]
    assert teichmuller_sum(poly).ok


def test_snap_rejects_off_angles():
    assert _snap(math.pi / 2 + math.radians(1), 2) == 1
    with pytest.raises(AngleSnapError):
        _snap(math.pi / 2 + math.radians(10), 2)
    with pytest.raises(AngleSnapError):
        _snap(2 * math.pi, 2)
