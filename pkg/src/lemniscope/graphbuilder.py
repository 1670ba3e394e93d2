"""Critical graph of -(r'/r)^2 dz^2 and its face decomposition.

Every critical ray of every zero is traced to the zero it lands on and the
two ends are paired into an edge.  Faces come from the rotation system
(rays at a vertex are ordered counter-clockwise by index): walking in along
ray ``j`` and out along ray ``j - 1`` keeps the face on the left.

Geometry is done in the chart ``zeta = 1/(z - a0)`` for a finite double
pole ``a0``, in which infinity is the ordinary point 0.  A walk with positive
signed area bounds its face from outside; a negative one bounds a hole and
its face contains ``a0``.  When the graph is disconnected, walks from
different components that bound the same face are merged.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .oracle import Window, winding_number
from .qdmodel import INF, QuadraticDifferential, RationalMap, build, critical_values
from .tracer import (
    DEFAULT_OPTIONS,
    Endpoint,
    TraceError,
    TraceOptions,
    Trajectory,
    _TraceContext,
    level_loops,
    trace_critical,
)

__all__ = [
    "GraphError",
    "Edge",
    "CriticalGraph",
    "FaceKind",
    "Walk",
    "Face",
    "DomainConfiguration",
    "LevelComponents",
    "build_graph",
    "lemniscate_components",
    "domain_configurations",
    "connecting_trajectory",
]


class GraphError(RuntimeError):
    pass


Dart = tuple[int, int]


@dataclass
class Edge:
    trajectory: Trajectory

    @property
    def start(self) -> Dart:
        return (self.trajectory.start.vertex, self.trajectory.start.ray)

    @property
    def end(self) -> Dart:
        return (self.trajectory.end.vertex, self.trajectory.end.ray)

    @property
    def vertices(self) -> tuple[int, int]:
        return self.start[0], self.end[0]

    def to_json(self) -> dict:
        return {"start": list(self.start), "end": list(self.end), **self.trajectory.to_json()}


@dataclass
class CriticalGraph:
    qd: QuadraticDifferential
    edges: list[Edge]
    dart_edge: dict[Dart, int]
    components: list[list[int]]  # vertex indices per component

    @property
    def vertices(self):
        return self.qd.zeros

    def ray_count(self, v: int) -> int:
        return self.qd.zeros[v].multiplicity + 2

    def component_of(self, v: int) -> int:
        for k, c in enumerate(self.components):
            if v in c:
                return k
        raise KeyError(v)

    @property
    def handshake_ok(self) -> bool:
        return 2 * len(self.edges) == sum(self.ray_count(v) for v in range(len(self.vertices)))

    def to_json(self) -> dict:
        return {
            "vertices": [
                {
                    "index": i,
                    "location": None if z.is_infinite else [z.location.real, z.location.imag],
                    "at_infinity": z.is_infinite,
                    "multiplicity": z.multiplicity,
                }
                for i, z in enumerate(self.vertices)
            ],
            "edges": [e.to_json() for e in self.edges],
            "components": self.components,
        }


def build_graph(qd: QuadraticDifferential, opts: TraceOptions = DEFAULT_OPTIONS) -> CriticalGraph:
    """Trace every critical ray and pair the ends into edges."""
    if not qd.zeros:
        raise GraphError("the quadratic differential has no zeros; the critical graph is empty")
    ctx = _TraceContext(qd, opts)
    edges: list[Edge] = []
    dart_edge: dict[Dart, int] = {}
    for v, cp in enumerate(qd.zeros):
        for j in range(cp.multiplicity + 2):
            if (v, j) in dart_edge:
                continue
            t = trace_critical(qd, v, j, opts, ctx)
            e = Edge(t)
            if (v, j) not in (e.start, e.end):
                raise GraphError(f"trace of vertex {v} ray {j} returned an edge not ending on that ray")
            k = len(edges)
            for d in {e.start, e.end}:
                if d in dart_edge:
                    raise GraphError(f"ray {d[1]} at vertex {d[0]} is claimed by two edges")
                dart_edge[d] = k
            if e.start == e.end:
                raise GraphError(f"edge from vertex {v} ray {j} returns along its own ray")
            edges.append(e)
    for v, cp in enumerate(qd.zeros):
        for j in range(cp.multiplicity + 2):
            if (v, j) not in dart_edge:
                raise GraphError(f"ray {j} at vertex {v} is unpaired")
    parent = list(range(len(qd.zeros)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in edges:
        a, b = e.vertices
        parent[find(a)] = find(b)
    groups: dict[int, list[int]] = {}
    for v in range(len(qd.zeros)):
        groups.setdefault(find(v), []).append(v)
    comps = sorted(groups.values(), key=lambda c: c[0])
    return CriticalGraph(qd, edges, dart_edge, comps)


def connecting_trajectory(g: CriticalGraph, i: int, j: int) -> Trajectory | None:
    """An edge of the graph joining vertices i and j, if there is one."""
    for e in g.edges:
        if set(e.vertices) == {i, j} and (i != j or e.vertices == (i, i)):
            return e.trajectory
    return None


@dataclass
class LevelComponents:
    count: int
    polylines: list[np.ndarray]

    def to_json(self) -> dict:
        return {"count": self.count, "polylines": [[[z.real, z.imag] for z in p] for p in self.polylines]}


def lemniscate_components(r: RationalMap, c: float, window: Window | None = None,
                          opts: TraceOptions = DEFAULT_OPTIONS) -> LevelComponents:
    """Components of ``|r| = c`` on the sphere, each traced as a closed loop."""
    loops = level_loops(r, c, window, opts)
    return LevelComponents(len(loops), [t.points for t in loops])


class FaceKind(enum.Enum):
    CIRCLE = "circle"
    RING = "ring"


@dataclass
class Walk:
    darts: list[Dart]  # outgoing dart of each traversed edge, in order
    traversal: list[tuple[int, bool]]  # (edge index, forward)
    zeta: np.ndarray  # closed polyline in the zeta chart
    signed_area: float
    component: int

    @property
    def bounds_outside(self) -> bool:
        """True if the face lies inside this walk in the zeta chart."""
        return self.signed_area > 0

    def vertices(self) -> list[int]:
        return [d[0] for d in self.darts]


@dataclass
class Face:
    kind: FaceKind
    walks: list[Walk]
    poles: list[int]  # indices into qd.all_double_poles

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "poles": self.poles,
            "boundary": [[{"edge": k, "forward": f} for k, f in w.traversal] for w in self.walks],
        }


@dataclass
class DomainConfiguration:
    faces: list[Face]
    anchor: complex  # the finite double pole a0 sent to infinity by the zeta chart
    euler: tuple[int, int, int, int]  # V, E, F, components

    @property
    def circle_count(self) -> int:
        return sum(f.kind is FaceKind.CIRCLE for f in self.faces)

    @property
    def ring_count(self) -> int:
        return sum(f.kind is FaceKind.RING for f in self.faces)

    @property
    def euler_ok(self) -> bool:
        V, E, F, C = self.euler
        return V - E + F == 1 + C

    def to_json(self) -> dict:
        V, E, F, C = self.euler
        return {
            "faces": [f.to_json() for f in self.faces],
            "circle_count": self.circle_count,
            "ring_count": self.ring_count,
            "euler": {"V": V, "E": E, "F": F, "components": C, "ok": self.euler_ok},
        }


class _ZetaChart:
    def __init__(self, a0: complex):
        self.a0 = a0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return 1.0 / (z - self.a0)

    def point(self, z: complex) -> complex | None:
        """Image of a point; None stands for the image of a0 (zeta = infinity)."""
        if math.isinf(z.real):
            return 0j
        if z == self.a0:
            return None
        return 1.0 / (z - self.a0)


def _edge_zeta(e: Edge, forward: bool, chart: _ZetaChart) -> np.ndarray:
    pts = chart(e.trajectory.points)
    s_inf, e_inf = e.trajectory.ends_at_infinity
    if s_inf:
        pts = np.concatenate([[0j], pts])
    if e_inf:
        pts = np.concatenate([pts, [0j]])
    return pts if forward else pts[::-1]


def _walks(g: CriticalGraph, chart: _ZetaChart) -> list[Walk]:
    seen: set[Dart] = set()
    walks = []
    for v in range(len(g.vertices)):
        for j in range(g.ray_count(v)):
            if (v, j) in seen:
                continue
            darts, trav, pieces = [], [], []
            d = (v, j)
            while d not in seen:
                seen.add(d)
                k = g.dart_edge[d]
                e = g.edges[k]
                forward = e.start == d
                other = e.end if forward else e.start
                darts.append(d)
                trav.append((k, forward))
                pieces.append(_edge_zeta(e, forward, chart))
                w, jj = other
                d = (w, (jj - 1) % g.ray_count(w))
            if d != (v, j):
                raise GraphError("rotation system does not close up; the ray pairing is inconsistent")
            poly = np.concatenate(pieces)
            area = 0.5 * float(np.sum((poly[:-1].conj() * poly[1:]).imag) + (poly[-1].conj() * poly[0]).imag)
            walks.append(Walk(darts, trav, poly, area, g.component_of(v)))
    return walks


def _inside(w: Walk, zeta: complex | None) -> bool:
    """Does the point lie on the face side of this walk?"""
    if zeta is None:
        return not w.bounds_outside
    k = winding_number(w.zeta, zeta)
    return k == 1 if w.bounds_outside else k == 0


def domain_configurations(g: CriticalGraph, qd: QuadraticDifferential | None = None) -> DomainConfiguration:
    """Faces of the critical graph on the sphere, classified as Circle or Ring domains."""
    qd = qd or g.qd
    finite_poles = [a.location for a in qd.all_double_poles if not math.isinf(a.location.real)]
    if not finite_poles:
        raise GraphError("no finite double pole to anchor the face chart")
    a0 = finite_poles[0]
    chart = _ZetaChart(a0)
    walks = _walks(g, chart)
    ncomp = len(g.components)

    # a representative point of each component in the zeta chart
    rep = [chart.point(g.vertices[c[0]].location) for c in g.components]
    by_comp: dict[int, list[int]] = {}
    for i, w in enumerate(walks):
        by_comp.setdefault(w.component, []).append(i)

    def container(ci: int, cj: int) -> int:
        """Walk of component ci whose face holds component cj."""
        hits = [i for i in by_comp[ci] if _inside(walks[i], rep[cj])]
        if len(hits) != 1:
            raise GraphError(f"component {cj} is not in exactly one face of component {ci}")
        return hits[0]

    cont = {(a, b): container(a, b) for a in range(ncomp) for b in range(ncomp) if a != b}
    parent = list(range(len(walks)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in range(ncomp):
        for b in range(a + 1, ncomp):
            separated = any(
                cont[(c, a)] != cont[(c, b)] for c in range(ncomp) if c not in (a, b)
            )
            if not separated:
                parent[find(cont[(a, b)])] = find(cont[(b, a)])
    groups: dict[int, list[int]] = {}
    for i in range(len(walks)):
        groups.setdefault(find(i), []).append(i)

    poles = [chart.point(a.location) for a in qd.all_double_poles]
    faces = []
    for members in sorted(groups.values(), key=lambda m: m[0]):
        ws = [walks[i] for i in members]
        inside = [k for k, zp in enumerate(poles) if all(_inside(w, zp) for w in ws)]
        if len(inside) >= 2:
            raise GraphError(f"a face holds {len(inside)} double poles; the critical graph is incomplete")
        if len(inside) == 1:
            kind = FaceKind.CIRCLE
        else:
            if len(ws) != 2:
                raise GraphError(f"a pole-free face has {len(ws)} boundary components instead of two")
            kind = FaceKind.RING
        faces.append(Face(kind, ws, inside))
    circles = sum(f.kind is FaceKind.CIRCLE for f in faces)
    if circles != len(qd.all_double_poles):
        raise GraphError(f"{circles} Circle faces for {len(qd.all_double_poles)} double poles")
    return DomainConfiguration(faces, a0, (len(g.vertices), len(g.edges), len(faces), ncomp))
