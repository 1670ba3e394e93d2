"""Horizontal trajectories of -(r'/r)^2 dz^2, i.e. level curves of |r|.

Writing ``g = log r``, the level curve ``Re g = log c`` has unit tangent
``i * conj(g') / |g'|`` and along it ``arg r`` increases at rate ``|g'|``;
every trajectory here is stored in that orientation.  Steps are a midpoint
predictor along the tangent followed by Newton on ``log|r| - log c`` in the
gradient direction, which in complex form is ``x -= (log|r(x)| - log c) / g'(x)``.

Near infinity the march continues in the chart ``u = 1/z``, where ``r(1/u)``
is again a ratio of polynomials, so the same machinery traces curves
through or around infinity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .qdmodel import INF, QuadraticDifferential, RationalMap, build, critical_values
from .oracle import Window, default_window

__all__ = [
    "TraceOptions",
    "Endpoint",
    "Trajectory",
    "TraceError",
    "StepCollapseError",
    "MonotonicityReport",
    "ray_angles",
    "trace_level",
    "trace_critical",
    "level_seeds",
    "level_loops",
    "arg_monotonicity_check",
    "OversampleReport",
    "oversample",
]


class TraceError(RuntimeError):
    pass


class StepCollapseError(TraceError):
    def __init__(self, message: str, nearest: complex | None = None):
        super().__init__(message)
        self.nearest = nearest


@dataclass(frozen=True)
class TraceOptions:
    trace_tol: float = 1e-8
    newton_tol: float = 1e-12
    max_newton: int = 3
    h_min: float = 1e-9  # relative to the problem length scale
    h_max: float = 0.1  # relative to the problem length scale
    curvature_step: float = 0.3
    arg_step: float = 0.5
    max_steps: int = 200_000
    launch_rel: float = 1e-4
    capture_factor: float = 10.0
    level_guard: float = 1e-6
    chart_switch: float = 10.0


DEFAULT_OPTIONS = TraceOptions()


@dataclass(frozen=True)
class Endpoint:
    """Either a vertex (index into ``qd.zeros``) with the ray used there, or a closed loop."""

    vertex: int | None = None
    ray: int | None = None

    @property
    def is_loop(self) -> bool:
        return self.vertex is None

    def to_json(self):
        return "loop" if self.is_loop else {"vertex": self.vertex, "ray": self.ray}


LOOP = Endpoint()


@dataclass
class Trajectory:
    """Oriented polyline on a level set of |r|, with arg r increasing along it.

    ``points`` are finite z-samples; an endpoint at infinity is not sampled
    and is recorded only in the endpoint tag.
    """

    points: np.ndarray
    level: float
    start: Endpoint
    end: Endpoint
    total_arg_change: float
    ends_at_infinity: tuple[bool, bool] = (False, False)

    @property
    def closed(self) -> bool:
        return self.start.is_loop

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "start": self.start.to_json(),
            "end": self.end.to_json(),
            "total_arg_change": self.total_arg_change,
            "points": [[z.real, z.imag] for z in self.points],
        }


class _Chart:
    """Scalar evaluation of log|r|, r'/r and the curvature bound for one coordinate chart."""

    def __init__(self, r: RationalMap):
        self.r = r
        N = r.p.derivative() * r.q - r.p * r.q.derivative()
        pq = r.p * r.q
        self._p = r.p.coeffs
        self._q = r.q.coeffs
        self._N = N.coeffs
        self._dN = N.derivative().coeffs
        self._pq = pq.coeffs
        self._dpq = pq.derivative().coeffs

    @staticmethod
    def _h(c, x):
        acc = 0j
        for a in reversed(c):
            acc = acc * x + a
        return acc

    def value(self, x: complex) -> complex:
        return self._h(self._p, x) / self._h(self._q, x)

    def logmod(self, x: complex) -> float:
        return math.log(abs(self._h(self._p, x))) - math.log(abs(self._h(self._q, x)))

    def dlog(self, x: complex) -> complex:
        return self._h(self._N, x) / self._h(self._pq, x)

    def curvature_bound(self, x: complex) -> float:
        n = self._h(self._N, x)
        pq = self._h(self._pq, x)
        if n == 0 or pq == 0:
            return math.inf
        return abs(self._h(self._dN, x) / n - self._h(self._dpq, x) / pq)


class _Sphere:
    """The two charts z and u = 1/z with switching radii."""

    def __init__(self, r: RationalMap, length: float, opts: TraceOptions):
        self.r = r
        self.charts = {"z": _Chart(r), "u": _Chart(r.inverted_chart())}
        self.L = length
        self.R = opts.chart_switch * length
        self.h_max = {"z": opts.h_max * length, "u": opts.h_max * 2.0 / self.R}
        self.h_min = {"z": opts.h_min * length, "u": opts.h_min * 2.0 / self.R}

    def to_chart(self, chart: str, z: complex) -> complex:
        if chart == "z":
            return z
        return 0j if math.isinf(z.real) else 1.0 / z

    def to_z(self, chart: str, x: complex) -> complex:
        if chart == "z":
            return x
        return INF if x == 0 else 1.0 / x

    def home(self, z: complex) -> str:
        return "u" if math.isinf(z.real) or abs(z) > self.R else "z"

    def maybe_switch(self, chart: str, x: complex) -> tuple[str, complex]:
        if chart == "z" and abs(x) > self.R:
            return "u", 1.0 / x
        if chart == "u" and abs(x) > 2.0 / self.R:
            return "z", 1.0 / x
        return chart, x

    def value(self, z: complex) -> complex:
        c = self.home(z)
        return self.charts[c].value(self.to_chart(c, z))


def _length_scale(r: RationalMap) -> float:
    pts = []
    for poly in (r.p, r.q, r.p.derivative() * r.q - r.p * r.q.derivative()):
        if poly.degree >= 1:
            pts.extend(np.roots(np.array(poly.coeffs)[::-1]))
    return 1.0 + max((abs(z) for z in pts), default=0.0)


def _tangent(ch: _Chart, x: complex, sign: int) -> complex:
    g = ch.dlog(x)
    return sign * 1j * g.conjugate() / abs(g)


def _correct(ch: _Chart, x: complex, clog: float, tol: float, max_iter: int) -> tuple[complex, int, bool]:
    for it in range(max_iter + 1):
        f = ch.logmod(x) - clog
        if abs(f) <= tol:
            return x, it, True
        if it == max_iter:
            break
        x = x - f / ch.dlog(x)
    return x, max_iter, False


def _next_h(ch: _Chart, x: complex, h: float, h_cap: float, opts: TraceOptions) -> float:
    kb = ch.curvature_bound(x)
    g = abs(ch.dlog(x))
    cand = [h_cap, 1.5 * h]
    if kb > 0:
        cand.append(opts.curvature_step / kb)
    if g > 0:
        cand.append(opts.arg_step / g)
    return min(cand)


def _seg_dist(s: complex, a: complex, b: complex) -> tuple[float, float]:
    d = b - a
    dd = abs(d) ** 2
    t = 0.0 if dd == 0 else ((s - a) * d.conjugate()).real / dd
    tc = min(1.0, max(0.0, t))
    return abs(a + tc * d - s), t


class _March:
    """One oriented march along a level curve; ``stop`` decides termination."""

    def __init__(self, sphere: _Sphere, chart: str, x: complex, clog: float, sign: int, opts: TraceOptions):
        self.S = sphere
        self.chart = chart
        self.x = x
        self.clog = clog
        self.sign = sign
        self.opts = opts
        self.samples: list[complex] = [sphere.to_z(chart, x)]
        self.values: list[complex] = [sphere.charts[chart].value(x)]
        self.h = _next_h(sphere.charts[chart], x, math.inf, sphere.h_max[chart], opts)

    def step(self) -> tuple[complex, complex]:
        """Advance one accepted step; returns (previous, new) in the current chart."""
        S, o = self.S, self.opts
        ch = S.charts[self.chart]
        x = self.x
        T = _tangent(ch, x, self.sign)
        h = min(self.h, S.h_max[self.chart])
        while True:
            if h < S.h_min[self.chart]:
                raise StepCollapseError(f"step collapsed near z = {S.to_z(self.chart, x)}", S.to_z(self.chart, x))
            xm = x + 0.5 * h * T
            try:
                Tm = _tangent(ch, xm, self.sign)
                xp = x + h * Tm
                xn, its, ok = _correct(ch, xp, self.clog, o.newton_tol, o.max_newton)
                Tn = _tangent(ch, xn, self.sign)
            except (ZeroDivisionError, ValueError, OverflowError):
                ok = False
            if ok and abs(xn - xp) <= 0.3 * h and (Tn * T.conjugate()).real > 0.75:
                break
            h *= 0.5
        self.h = _next_h(ch, xn, h, S.h_max[self.chart], o)
        prev = x
        self.x = xn
        self.samples.append(S.to_z(self.chart, xn))
        self.values.append(ch.value(xn))
        return prev, xn

    def switch_if_needed(self):
        c, x = self.S.maybe_switch(self.chart, self.x)
        if c != self.chart:
            self.chart, self.x = c, x
            self.h = _next_h(self.S.charts[c], x, math.inf, self.S.h_max[c], self.opts)


def _arg_total(values: list[complex]) -> float:
    v = np.asarray(values)
    return float(np.sum(np.angle(v[1:] / v[:-1])))


def _check_level_guard(qd: QuadraticDifferential, c: float, opts: TraceOptions):
    for e in critical_values(qd):
        if abs(c - e.modulus) <= opts.level_guard * e.modulus:
            raise ValueError(
                f"level {c} collides with the critical modulus {e.modulus} of the critical point {e.point}"
            )


def trace_level(r: RationalMap, c: float, seed: complex, opts: TraceOptions = DEFAULT_OPTIONS,
                qd: QuadraticDifferential | None = None) -> Trajectory:
    """Trace the closed component of ``|r| = c`` through ``seed``."""
    qd = qd or build(r)
    _check_level_guard(qd, c, opts)
    if abs(abs(r(seed)) - c) > opts.trace_tol * c:
        raise ValueError(f"seed {seed} is not on the level |r| = {c} (|r(seed)| = {abs(r(seed))})")
    L = _length_scale(r)
    S = _Sphere(r, L, opts)
    chart = S.home(seed)
    x0 = S.to_chart(chart, seed)
    m = _March(S, chart, x0, math.log(c), +1, opts)
    first = None
    armed = False
    for _ in range(opts.max_steps):
        a, b = m.step()
        if first is None:
            first = abs(b - a)
        s = S.to_chart(m.chart, seed)
        if not armed and abs(b - s) > 2.0 * first:
            armed = True
        if armed:
            d, t = _seg_dist(s, a, b)
            if -0.05 <= t <= 1.05 and d <= 0.1 * abs(b - a) + 1e-12 * L:
                m.samples[-1] = seed
                m.values[-1] = m.values[0]
                pts = np.array(m.samples)
                total = _arg_total(m.values)
                return Trajectory(pts, c, LOOP, LOOP, total)
        m.switch_if_needed()
    raise TraceError(f"level curve through {seed} did not close after {opts.max_steps} steps")


def ray_angles(point) -> np.ndarray:
    """Directions of the m+2 critical rays at a zero of multiplicity m (in its own chart)."""
    k = point.multiplicity // 2
    base = (math.pi / 2 - cmath.phase(point.leading)) / (k + 1)
    return base + math.pi * np.arange(2 * k + 2) / (k + 1)


@dataclass
class _Vertex:
    index: int
    chart: str
    x: complex  # location in its chart
    modulus: float
    value: complex
    angles: np.ndarray
    launch: float
    capture: float


def _vertices(qd: QuadraticDifferential, S: _Sphere, opts: TraceOptions) -> list[_Vertex]:
    table = critical_values(qd)
    finite = [z.location for z in qd.finite_zeros] + [a.location for a in qd.double_poles]
    out = []
    for i, (cp, cv) in enumerate(zip(qd.zeros, table)):
        if cp.is_infinite:
            chart, x = "u", 0j
            others = [1.0 / z for z in finite if z != 0]
        else:
            chart, x = "z", cp.location
            others = [z for z in finite if z != cp.location]
        sep = min((abs(o - x) for o in others), default=S.L if chart == "z" else 2.0 / S.R)
        if chart == "u":
            sep = min(sep, 2.0 / S.R)
        rho = opts.launch_rel * sep
        out.append(_Vertex(i, chart, x, cv.modulus, cv.value, ray_angles(cp), rho, opts.capture_factor * rho))
    return out


def _match_ray(v: _Vertex, approach: float) -> int | None:
    spacing = 2 * math.pi / len(v.angles)
    diff = np.angle(np.exp(1j * (v.angles - approach)))
    j = int(np.argmin(np.abs(diff)))
    if abs(diff[j]) <= spacing / 4:
        return j
    return None


def _launch(S: _Sphere, v: _Vertex, ray: int, opts: TraceOptions) -> tuple[complex, int]:
    ch = S.charts[v.chart]
    d = cmath.exp(1j * v.angles[ray])
    x0 = v.x + v.launch * d
    x0, _, _ = _correct(ch, x0, math.log(v.modulus), opts.newton_tol, 8)
    T = _tangent(ch, x0, +1)
    sign = 1 if (T * d.conjugate()).real > 0 else -1
    return x0, sign


class _TraceContext:
    def __init__(self, qd: QuadraticDifferential, opts: TraceOptions):
        self.qd = qd
        self.opts = opts
        self.L = _length_scale(qd.source)
        self.S = _Sphere(qd.source, self.L, opts)
        self.vertices = _vertices(qd, self.S, opts)


def trace_critical(qd: QuadraticDifferential, vertex: int, ray: int, opts: TraceOptions = DEFAULT_OPTIONS,
                   _ctx: _TraceContext | None = None) -> Trajectory:
    """Trace the critical trajectory leaving zero ``vertex`` along ``ray``.

    The march runs until it enters the capture disk of a zero at the same
    level; the launch zero only becomes capturable after the march has left
    its capture disk.  The result is oriented by increasing arg r, so when the
    outward direction decreases arg r the polyline is reversed and the
    endpoint tags swap.
    """
    ctx = _ctx or _TraceContext(qd, opts)
    S = ctx.S
    v0 = ctx.vertices[vertex]
    targets = [w for w in ctx.vertices if abs(w.modulus - v0.modulus) <= 1e-6 * v0.modulus]
    x0, sign = _launch(S, v0, ray, opts)
    m = _March(S, v0.chart, x0, math.log(v0.modulus), sign, opts)
    m.samples.insert(0, S.to_z(v0.chart, v0.x))
    m.values.insert(0, v0.value)
    armed = False
    for _ in range(opts.max_steps):
        a, b = m.step()
        hits = []
        for w in targets:
            if w.chart != m.chart or (w.index == vertex and not armed):
                continue
            d, _ = _seg_dist(w.x, a, b)
            if d <= w.capture:
                hits.append(w)
        if not armed and (m.chart != v0.chart or abs(b - v0.x) > v0.capture):
            armed = True
        if len(hits) > 1:
            raise TraceError(f"ambiguous capture between critical points {[h.index for h in hits]}")
        if hits:
            w = hits[0]
            end_ray = _match_ray(w, cmath.phase(b - w.x) if b != w.x else cmath.phase(a - w.x))
            if end_ray is None:
                raise TraceError(
                    f"trajectory from vertex {vertex} ray {ray} reached vertex {w.index} off every ray direction"
                )
            m.samples.append(S.to_z(w.chart, w.x))
            m.values.append(w.value)
            start, end = Endpoint(vertex, ray), Endpoint(w.index, end_ray)
            at_inf = (v0.chart == "u" and v0.x == 0, w.chart == "u" and w.x == 0)
            pts, vals = m.samples, m.values
            if sign < 0:
                pts, vals = pts[::-1], vals[::-1]
                start, end = end, start
                at_inf = at_inf[::-1]
            finite = np.array([z for z in pts if not math.isinf(z.real)])
            return Trajectory(finite, v0.modulus, start, end, _arg_total(vals), at_inf)
        m.switch_if_needed()
    raise TraceError(f"critical trajectory from vertex {vertex} ray {ray} did not terminate")


def _probe_candidates(r: RationalMap, c: float, window: Window, L: float) -> list[complex]:
    clog = math.log(c)
    cands: list[complex] = []

    def f(z):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            v = np.log(np.abs(r.p(z))) - np.log(np.abs(r.q(z))) - clog
        return np.nan_to_num(v, nan=0.0, posinf=1e3, neginf=-1e3)

    def bisect(a, b, fa):
        for _ in range(60):
            mid = 0.5 * (a + b)
            fm = f(np.array([mid]))[0]
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b = mid
        return 0.5 * (a + b)

    xs = np.linspace(window.xmin, window.xmax, 65)
    ys = np.linspace(window.ymin, window.ymax, 65)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Z = X + 1j * Y
    F = f(Z)
    for A, B, FA, FB in ((Z[:-1, :], Z[1:, :], F[:-1, :], F[1:, :]), (Z[:, :-1], Z[:, 1:], F[:, :-1], F[:, 1:])):
        idx = np.argwhere((FA > 0) != (FB > 0))
        for i, j in idx:
            cands.append(bisect(A[i, j], B[i, j], FA[i, j]))
    centres = []
    for poly in (r.p, r.q):
        if poly.degree >= 1:
            centres.extend(np.roots(np.array(poly.coeffs)[::-1]))
    t = L * np.logspace(-9, 6, 600)
    for a in centres:
        for k in range(8):
            d = cmath.exp(1j * (2 * math.pi * k / 8 + 0.3))
            zs = a + t * d
            fs = f(zs)
            for i in np.nonzero((fs[:-1] > 0) != (fs[1:] > 0))[0]:
                cands.append(bisect(zs[i], zs[i + 1], fs[i]))
    return cands


def _on_loop(z: complex, pts: np.ndarray, L: float) -> bool:
    a, b = pts[:-1], pts[1:]
    d = b - a
    dd = np.abs(d) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.clip(np.where(dd > 0, ((z - a) * d.conj()).real / dd, 0.0), 0.0, 1.0)
    dist = np.abs(a + t * d - z)
    return bool(np.any(dist <= 0.05 * np.sqrt(dd) + 1e-10 * L))


def level_loops(r: RationalMap, c: float, window: Window | None = None, opts: TraceOptions = DEFAULT_OPTIONS,
                qd: QuadraticDifferential | None = None) -> list[Trajectory]:
    """Every component of ``|r| = c`` found by grid and radial probing, traced once each.

    The grid covers ``window``; radial probes from each zero and pole of r
    reach from far inside the window out to ``1e6`` length scales, so small
    loops around zeros/poles and loops around infinity are found as well.
    """
    qd = qd or build(r)
    _check_level_guard(qd, c, opts)
    window = window or default_window(r)
    L = _length_scale(r)
    loops: list[Trajectory] = []
    ch = _Chart(r)
    for cand in _probe_candidates(r, c, window, L):
        if any(_on_loop(cand, t.points, L) for t in loops):
            continue
        x, _, ok = _correct(ch, cand, math.log(c), 1e-13, 20)
        if not ok or any(_on_loop(x, t.points, L) for t in loops):
            continue
        loops.append(trace_level(r, c, x, opts, qd))
    return loops


def level_seeds(r: RationalMap, c: float, window: Window | None = None, opts: TraceOptions = DEFAULT_OPTIONS) -> list[complex]:
    """One seed point on each component of ``|r| = c`` that meets ``window``."""
    window = window or default_window(r)
    out = []
    for t in level_loops(r, c, window, opts):
        inside = [z for z in t.points if window.contains(z)]
        if inside:
            out.append(inside[0])
    return out


@dataclass
class MonotonicityReport:
    monotone: bool
    total_arg_change: float
    offending_index: int | None
    closed: bool
    winding_multiple: float | None  # total / 2pi for closed loops
    ccw_arg_change: float | None  # total change measured along the counter-clockwise orientation

    @property
    def ok(self) -> bool:
        if not self.monotone:
            return False
        if self.closed:
            return abs(self.winding_multiple - round(self.winding_multiple)) <= 1e-6 / (2 * math.pi)
        return True


def arg_monotonicity_check(t: Trajectory, r: RationalMap) -> MonotonicityReport:
    """Recompute arg r along the samples and confirm it increases strictly."""
    S = _Sphere(r, _length_scale(r), DEFAULT_OPTIONS)
    vals = [S.value(z) for z in t.points]
    if t.ends_at_infinity[0]:
        vals.insert(0, r.value_at_infinity())
    if t.ends_at_infinity[1]:
        vals.append(r.value_at_infinity())
    v = np.asarray(vals)
    inc = np.angle(v[1:] / v[:-1])
    if t.closed:
        inc = inc[np.abs(v[1:] - v[:-1]) > 0] if len(inc) else inc
    bad = np.nonzero(inc <= 0)[0]
    total = float(np.sum(inc))
    closed = t.closed
    wm = total / (2 * math.pi) if closed else None
    ccw = None
    if closed:
        z = t.points
        area = 0.5 * float(np.sum((z[:-1].conj() * z[1:]).imag))
        ccw = total if area > 0 else -total
    return MonotonicityReport(len(bad) == 0, total, int(bad[0]) if len(bad) else None, closed, wm, ccw)


@dataclass
class OversampleReport:
    points: np.ndarray
    max_level_error: float  # max | |r| - c | / c at the corrected points
    max_shift: float  # largest Newton displacement relative to its chord length


def oversample(t: Trajectory, r: RationalMap, factor: int = 10, opts: TraceOptions = DEFAULT_OPTIONS) -> OversampleReport:
    """Insert ``factor - 1`` points per chord and project each onto the level by Newton.

    The level error is re-evaluated at the projected points; a small shift
    shows that the polyline follows the curve between samples.
    """
    S = _Sphere(r, _length_scale(r), opts)
    clog = math.log(t.level)
    pts = t.points
    if t.closed:
        pts = np.append(pts, pts[:1]) if pts[0] != pts[-1] else pts
    out, worst, shift = [], 0.0, 0.0
    frac = np.arange(1, factor) / factor
    for a, b in zip(pts[:-1], pts[1:]):
        chord = abs(b - a)
        if chord == 0:
            continue
        for s in frac:
            z = a + s * (b - a)
            chart = S.home(z)
            x, _, _ = _correct(S.charts[chart], S.to_chart(chart, z), clog, opts.newton_tol, 20)
            zc = S.to_z(chart, x)
            out.append(zc)
            shift = max(shift, abs(zc - z) / chord)
            worst = max(worst, abs(abs(S.value(zc)) - t.level) / t.level)
    return OversampleReport(np.array(out), worst, shift)
