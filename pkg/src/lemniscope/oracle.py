"""Brute-force ground truth: level sets of |r| by marching squares, winding numbers.

Kept deliberately independent of the rest of the package: it evaluates
``p`` and ``q`` with ``numpy.polyval`` on a rectilinear grid and locates its
refinement points with ``numpy.roots``.  The tracer and graph builder are
tested against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "Window",
    "GridLevelSet",
    "grid_level",
    "grid_level_enclosing",
    "winding_number",
    "default_window",
    "hausdorff",
    "WindingGuardError",
]


@dataclass(frozen=True)
class Window:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    @classmethod
    def square(cls, half_width: float, center: complex = 0j) -> "Window":
        return cls(center.real - half_width, center.real + half_width, center.imag - half_width, center.imag + half_width)

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    def contains(self, z: complex) -> bool:
        return self.xmin <= z.real <= self.xmax and self.ymin <= z.imag <= self.ymax

    def to_json(self) -> list[float]:
        return [self.xmin, self.xmax, self.ymin, self.ymax]


@dataclass
class GridLevelSet:
    window: Window
    pitch: float
    level: float
    polylines: list[np.ndarray] = field(default_factory=list)
    closed: list[bool] = field(default_factory=list)
    outer_component: bool = False

    @property
    def component_count(self) -> int:
        return len(self.polylines) + (1 if self.outer_component else 0)

    @property
    def touches_boundary(self) -> bool:
        return not all(self.closed)


def _coeffs_desc(poly) -> np.ndarray:
    return np.array(poly.coeffs, dtype=complex)[::-1]


def default_window(r) -> Window:
    """Origin-centred box of half-width ``2 + 2 max|root of pq|``."""
    pts = []
    for poly in (r.p, r.q):
        if poly.degree >= 1:
            pts.extend(np.roots(_coeffs_desc(poly)))
    rad = max((abs(z) for z in pts), default=0.0)
    return Window.square(2.0 + 2.0 * rad)


def _refinement_points(r) -> list[complex]:
    p, q = _coeffs_desc(r.p), _coeffs_desc(r.q)
    pts: list[complex] = []
    for d in (p, q):
        if len(d) > 1:
            pts.extend(np.roots(d))
    num = np.polysub(np.polymul(np.polyder(p), q), np.polymul(p, np.polyder(q)))
    num = np.trim_zeros(np.where(np.abs(num) > 1e-14 * np.max(np.abs(num)), num, 0), "f")
    if len(num) > 1:
        pts.extend(np.roots(num))
    return pts


def _axis(lo: float, hi: float, pitch: float, centres: list[float], depth: int) -> np.ndarray:
    n = max(2, int(math.ceil((hi - lo) / pitch)) + 1)
    base = np.linspace(lo, hi, n)
    extra = []
    offs = pitch * 2.0 ** -np.arange(1, depth + 1)
    for c in centres:
        if lo < c < hi:
            extra.append(c)
            extra.extend(c + offs)
            extra.extend(c - offs)
    ax = np.concatenate([base, np.array(extra)])
    ax = np.unique(ax[(ax >= lo) & (ax <= hi)])
    keep = np.concatenate([[True], np.diff(ax) > 1e-14 * max(1.0, abs(hi), abs(lo))])
    return ax[keep]


def _logmod(r, Z: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        f = np.log(np.abs(np.polyval(_coeffs_desc(r.p), Z))) - np.log(np.abs(np.polyval(_coeffs_desc(r.q), Z)))
    return np.nan_to_num(f, nan=0.0, posinf=1e3, neginf=-1e3)


def grid_level(r, c: float, window: Window | None = None, pitch: float | None = None, refine: bool = True,
               depth: int = 14) -> GridLevelSet:
    """Marching-squares extraction of ``|r(z)| = c`` on a rectilinear grid.

    With ``refine`` the uniform grid gets extra lines graded geometrically
    toward the zeros and poles of ``r`` and the zeros of ``r'``, so small
    loops around them and nearly touching branches near saddles resolve.
    ``pitch`` stays the spacing of the uniform part.
    """
    window = window or default_window(r)
    pitch = pitch or window.width / 1024
    pts = _refinement_points(r) if refine else []
    xs = _axis(window.xmin, window.xmax, pitch, [z.real for z in pts], depth if refine else 0)
    ys = _axis(window.ymin, window.ymax, pitch, [z.imag for z in pts], depth if refine else 0)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    F = _logmod(r, X + 1j * Y) - math.log(c)
    out = GridLevelSet(window, pitch, c)
    segs, points = _march(r, c, xs, ys, F)
    out.polylines, out.closed = _chain(segs, points)
    # the level set may also close up outside the window, around infinity
    border = np.concatenate([F[0, :], F[-1, :], F[:, 0], F[:, -1]])
    if np.all(np.sign(border) == np.sign(border[0])):
        at_inf = _log_at_infinity(r) - math.log(c)
        out.outer_component = bool(np.sign(at_inf) != np.sign(border[0]))
    return out


def grid_level_enclosing(r, c: float, cells: int = 1024, window: Window | None = None,
                         max_doublings: int = 8) -> GridLevelSet:
    """``grid_level`` on a window grown until no contour meets its border.

    Arcs cut by the border cannot be counted as components, so the window
    doubles about its centre until every contour closes inside it; the
    pitch stays ``width / cells`` of the final window.
    """
    window = window or default_window(r)
    for _ in range(max_doublings + 1):
        g = grid_level(r, c, window, window.width / cells)
        if not g.touches_boundary:
            return g
        centre = complex((window.xmin + window.xmax) / 2, (window.ymin + window.ymax) / 2)
        window = Window.square(window.width, centre)
    return g


def _log_at_infinity(r) -> float:
    dp, dq = r.p.degree, r.q.degree
    if dp > dq:
        return math.inf
    if dp < dq:
        return -math.inf
    return math.log(abs(r.p.leading / r.q.leading))


def _march(r, c, xs, ys, F):
    nx, ny = len(xs), len(ys)
    pos = F > 0
    # edge ids: horizontal (i,j)-(i+1,j) -> i*ny + j ; vertical (i,j)-(i,j+1) -> H + i*(ny-1) + j
    H = (nx - 1) * ny
    b0, b1, b2, b3 = pos[:-1, :-1], pos[1:, :-1], pos[1:, 1:], pos[:-1, 1:]
    I, J = np.meshgrid(np.arange(nx - 1), np.arange(ny - 1), indexing="ij")
    e0 = I * ny + J
    e2 = I * ny + J + 1
    e3 = H + I * (ny - 1) + J
    e1 = H + (I + 1) * (ny - 1) + J
    cross = np.stack([b0 != b1, b1 != b2, b3 != b2, b0 != b3], axis=-1)
    ids = np.stack([e0, e1, e2, e3], axis=-1)
    count = cross.sum(axis=-1)
    segs = []
    two = count == 2
    if np.any(two):
        sub_c = cross[two]
        sub_i = ids[two]
        first = np.argmax(sub_c, axis=1)
        second = 3 - np.argmax(sub_c[:, ::-1], axis=1)
        rows = np.arange(len(sub_c))
        segs.append(np.stack([sub_i[rows, first], sub_i[rows, second]], axis=1))
    four = np.argwhere(count == 4)
    if len(four):
        ci = four[:, 0]
        cj = four[:, 1]
        zc = 0.5 * (xs[ci] + xs[ci + 1]) + 0.5j * (ys[cj] + ys[cj + 1])
        centre_pos = _logmod(r, zc) - math.log(c) > 0
        v0 = b0[ci, cj]
        k = ids[ci, cj]
        joined02 = centre_pos == v0
        # corners 0 and 2 joined through the centre: cut off corners 1 and 3, else 0 and 2
        a = np.where(joined02[:, None], k[:, [0, 1]], k[:, [0, 3]])
        b = np.where(joined02[:, None], k[:, [2, 3]], k[:, [1, 2]])
        segs.append(a)
        segs.append(b)
    segs = np.concatenate(segs) if segs else np.zeros((0, 2), dtype=int)
    used = np.unique(segs)
    points = {}
    hmask = used < H
    hi = used[hmask]
    i, j = hi // ny, hi % ny
    fa, fb = F[i, j], F[i + 1, j]
    t = fa / (fa - fb)
    xh = xs[i] + t * (xs[i + 1] - xs[i])
    for e, z in zip(hi, xh + 1j * ys[j]):
        points[int(e)] = z
    vi = used[~hmask] - H
    i, j = vi // (ny - 1), vi % (ny - 1)
    fa, fb = F[i, j], F[i, j + 1]
    t = fa / (fa - fb)
    yv = ys[j] + t * (ys[j + 1] - ys[j])
    for e, z in zip(used[~hmask], xs[i] + 1j * yv):
        points[int(e)] = z
    return segs, points


def _chain(segs: np.ndarray, points: dict) -> tuple[list[np.ndarray], list[bool]]:
    adj: dict[int, list[int]] = {}
    for k, (a, b) in enumerate(segs):
        adj.setdefault(int(a), []).append(k)
        adj.setdefault(int(b), []).append(k)
    used = np.zeros(len(segs), dtype=bool)
    lines, closed = [], []

    def walk(start_edge: int, seg: int) -> list[int]:
        path = [start_edge]
        e = start_edge
        while True:
            used[seg] = True
            a, b = int(segs[seg][0]), int(segs[seg][1])
            e = b if a == e else a
            path.append(e)
            nxt = [s for s in adj[e] if not used[s]]
            if not nxt:
                return path
            seg = nxt[0]

    # open chains start at edges with a single segment (window boundary)
    for e, ss in adj.items():
        if len(ss) == 1 and not used[ss[0]]:
            path = walk(e, ss[0])
            lines.append(np.array([points[x] for x in path]))
            closed.append(False)
    for k in range(len(segs)):
        if not used[k]:
            path = walk(int(segs[k][0]), k)
            lines.append(np.array([points[x] for x in path]))
            closed.append(path[0] == path[-1])
    return lines, closed


class WindingGuardError(ValueError):
    pass


def winding_number(polyline, point: complex, guard: float = 0.25) -> int:
    """Signed winding number of a closed polyline about ``point``."""
    z = np.asarray(polyline, dtype=complex)
    if z[0] != z[-1]:
        z = np.append(z, z[0])
    w = z - point
    if np.any(w == 0):
        raise WindingGuardError("point lies on the polyline")
    total = np.sum(np.angle(w[1:] / w[:-1])) / (2 * np.pi)
    k = int(round(total))
    if abs(total - k) >= guard:
        raise WindingGuardError(f"winding sum {total:.3f} is not near an integer; point too close to the curve")
    return k


def _densify(line: np.ndarray, spacing: float) -> np.ndarray:
    out = [line[:1]]
    for a, b in zip(line[:-1], line[1:]):
        k = max(1, int(math.ceil(abs(b - a) / spacing)))
        out.append(a + (b - a) * np.arange(1, k + 1) / k)
    return np.concatenate(out)


def hausdorff(lines_a, lines_b, spacing: float) -> float:
    """Symmetric Hausdorff distance between two polyline sets, densified to ``spacing``."""
    A = np.concatenate([_densify(np.asarray(l), spacing) for l in lines_a])
    B = np.concatenate([_densify(np.asarray(l), spacing) for l in lines_b])
    pa = np.column_stack([A.real, A.imag])
    pb = np.column_stack([B.real, B.imag])
    da, _ = cKDTree(pb).query(pa)
    db, _ = cKDTree(pa).query(pb)
    return float(max(da.max(), db.max()))
