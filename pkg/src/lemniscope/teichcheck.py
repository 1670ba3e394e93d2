"""Teichmüller's equality on polygons cut out by the critical graph.

For a polygon bounded by horizontal trajectories with corners z_j of
multiplicity m_j and interior angle t_j,

    sum_j (1 - (m_j + 2) t_j / 2pi) = 2 + sum_i n_i

where n_i runs over interior critical points (zeros: +m, double poles: -2).
Angles are measured on the traced polylines and snapped to multiples of
2pi/(m_j + 2); both sides are then integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphbuilder import CriticalGraph, DomainConfiguration, Face, GraphError, Walk, _inside, _ZetaChart
from .oracle import winding_number
from .qdmodel import QuadraticDifferential
from .tracer import Trajectory

__all__ = [
    "ANGLE_SNAP",
    "AngleSnapError",
    "Corner",
    "QDPolygon",
    "TeichmullerResult",
    "polygon_from_face",
    "polygon_from_loop",
    "teichmuller_sum",
    "verify_configuration",
]

ANGLE_SNAP = math.radians(2.0)
_NEAR = 5


class AngleSnapError(ValueError):
    pass


@dataclass(frozen=True)
class Corner:
    vertex: int
    location: complex
    multiplicity: int
    measured: float
    sectors: int

    @property
    def angle(self) -> float:
        return self.sectors * 2 * math.pi / (self.multiplicity + 2)


@dataclass
class QDPolygon:
    boundary: np.ndarray  # closed polyline (z-chart; samples at infinity omitted)
    corners: list[Corner]
    interior: list[tuple[complex, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        def cj(z):
            return None if math.isinf(z.real) else [z.real, z.imag]

        return {
            "corners": [
                {"vertex": c.vertex, "location": cj(c.location), "multiplicity": c.multiplicity,
                 "measured": c.measured, "angle": c.angle}
                for c in self.corners
            ],
            "interior": [{"location": cj(z), "n": n} for z, n in self.interior],
        }


@dataclass(frozen=True)
class TeichmullerResult:
    lhs: int
    rhs: int

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs


def _direction(samples: np.ndarray, vertex: complex) -> complex:
    d = samples - vertex
    d = d[np.abs(d) > 0][:_NEAR]
    if len(d) == 0:
        raise AngleSnapError("no samples next to the corner")
    u = np.sum(d / np.abs(d))
    return u / abs(u)


def _snap(measured: float, m: int) -> int:
    sector = 2 * math.pi / (m + 2)
    k = int(round(measured / sector))
    if abs(measured - k * sector) >= ANGLE_SNAP or not 1 <= k <= m + 1:
        raise AngleSnapError(
            f"corner angle {math.degrees(measured):.3f} deg is not within 2 deg of an admissible multiple "
            f"of {math.degrees(sector):.3f} deg"
        )
    return k


def _walk_pieces(g: CriticalGraph, walk: Walk, chart: _ZetaChart) -> list[np.ndarray]:
    from .graphbuilder import _edge_zeta

    return [_edge_zeta(g.edges[k], fwd, chart) for k, fwd in walk.traversal]


def polygon_from_face(face: Face, g: CriticalGraph, anchor: complex | None = None) -> QDPolygon:
    """The polygon bounded by the first boundary walk of a face, on the face's side.

    For a Circle face this is the face itself.  For a Ring face the polygon
    is the disk on the face side of one boundary walk, so it also holds the
    component of the graph bounding the ring from the other side.
    """
    qd = g.qd
    if anchor is None:
        anchor = next(a.location for a in qd.all_double_poles if not math.isinf(a.location.real))
    chart = _ZetaChart(anchor)
    walk = face.walks[0]
    pieces = _walk_pieces(g, walk, chart)
    corners = []
    for i, piece in enumerate(pieces):
        nxt = pieces[(i + 1) % len(pieces)]
        v = walk.darts[(i + 1) % len(pieces)][0]
        cp = qd.zeros[v]
        vz = chart.point(cp.location)
        d_in = _direction(piece[::-1], vz)
        d_out = _direction(nxt, vz)
        measured = (np.angle(d_in) - np.angle(d_out)) % (2 * math.pi)
        corners.append(Corner(v, cp.location, cp.multiplicity, float(measured), _snap(measured, cp.multiplicity)))
    own = set(g.components[walk.component])
    interior = []
    for i, cp in enumerate(qd.zeros):
        if i not in own and _inside(walk, chart.point(cp.location)):
            interior.append((cp.location, cp.multiplicity))
    for a in qd.all_double_poles:
        if _inside(walk, chart.point(a.location)):
            interior.append((a.location, -2))
    z = np.concatenate([g.edges[k].trajectory.points[:: 1 if f else -1] for k, f in walk.traversal])
    return QDPolygon(z, corners, interior)


def polygon_from_loop(loop: Trajectory, qd: QuadraticDifferential) -> QDPolygon:
    """A cornerless polygon: the bounded side of a closed level curve."""
    if not loop.closed:
        raise ValueError("trajectory is not a closed loop")
    interior = []
    pts = [(cp.location, cp.multiplicity) for cp in qd.finite_zeros]
    pts += [(a.location, -2) for a in qd.double_poles]
    for z, n in pts:
        if winding_number(loop.points, z) != 0:
            interior.append((z, n))
    return QDPolygon(loop.points, [], interior)


def teichmuller_sum(poly: QDPolygon) -> TeichmullerResult:
    lhs = sum(1 - c.sectors for c in poly.corners)
    rhs = 2 + sum(n for _, n in poly.interior)
    return TeichmullerResult(lhs, rhs)


def verify_configuration(g: CriticalGraph, dc: DomainConfiguration) -> list[dict]:
    """Per-face report of both sides of the equality."""
    out = []
    for i, face in enumerate(dc.faces):
        entry = {"face": i, "kind": face.kind.value}
        try:
            res = teichmuller_sum(polygon_from_face(face, g, dc.anchor))
            entry.update(lhs=res.lhs, rhs=res.rhs, ok=res.ok)
        except (AngleSnapError, GraphError, ValueError) as exc:
            entry.update(lhs=None, rhs=None, ok=False, error=str(exc))
        out.append(entry)
    return out
