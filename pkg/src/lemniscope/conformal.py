"""Conformal maps of lemniscate interiors/exteriors, fingerprints and Blaschke products.

The interior Riemann map of a smooth Jordan curve is computed from the
Szegő kernel, which solves the Kerzman–Stein integral equation

    S(z) + int A(z, w) S(w) |dw| = conj(T(z) / (2 pi i (z - a)))

with A(z, w) = (1/2 pi i) [T(w)/(z - w) - conj(T(z))/conj(z - w)] and
A(z, z) = 0.  The boundary values of the map f onto the disk with f(a) = 0,
f'(a) > 0 are f = -i T S / conj(S).  The equation is discretised by the
trapezoidal rule (Nyström), which converges geometrically for analytic
curves with an analytic parametrisation; lemniscate components are
parametrised by arg p for exactly that reason.

Exterior maps are interior maps of the inverted curve 1/(z - z0).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial.distance import pdist

from .oracle import winding_number
from .polyfield import Polynomial, roots as poly_roots
from .qdmodel import QuadraticDifferential, RationalMap, build, critical_values

__all__ = [
    "MAP_ACCURACY_REL",
    "FINGERPRINT_TOL",
    "DEFAULT_SAMPLES",
    "ConformalError",
    "PreconditionError",
    "OrientationError",
    "BlaschkeProduct",
    "blaschke_eval",
    "SampledCurve",
    "DiskMap",
    "ExteriorMap",
    "CircleDomainMap",
    "Fingerprint",
    "TheoremReport",
    "riemann_map_disk",
    "exterior_map",
    "exterior_param",
    "circle_domain_map",
    "fingerprint",
    "verify_eks",
    "verify_thm2",
    "verify_thm3",
    "root_census",
    "fingerprint_component",
]

MAP_ACCURACY_REL = 1e-6
FINGERPRINT_TOL = 1e-3
DEFAULT_SAMPLES = 1024
MAX_SAMPLES = 2048


class ConformalError(RuntimeError):
    pass


class PreconditionError(ValueError):
    pass


class OrientationError(PreconditionError):
    pass


# Blaschke products


@dataclass(frozen=True)
class BlaschkeProduct:
    """e^{i theta} prod ((z - a)/(1 - conj(a) z))^m.

    Factors normally lie in the unit disk.  A factor outside the closed
    disk is still unimodular on the circle; such factors describe maps on
    the exterior of the disk and are accepted.
    """

    theta: float = 0.0
    factors: tuple[tuple[complex, int], ...] = ()

    def __post_init__(self):
        for a, m in self.factors:
            if m < 1:
                raise ValueError(f"factor multiplicity must be positive, got {m}")
            if abs(abs(a) - 1.0) < 1e-14:
                raise ValueError(f"factor {a} lies on the unit circle")

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.factors)

    @property
    def inside_disk(self) -> bool:
        return all(abs(a) < 1 for a, _ in self.factors)

    def rotated(self, theta: float) -> "BlaschkeProduct":
        return BlaschkeProduct(self.theta + theta, self.factors)

    def __call__(self, z):
        return blaschke_eval(self, z)

    def to_json(self) -> dict:
        return {"theta": self.theta, "factors": [{"a": [a.real, a.imag], "multiplicity": m} for a, m in self.factors]}


def blaschke_eval(B: BlaschkeProduct, z):
    z = np.asarray(z, dtype=complex)
    out = np.full(z.shape, cmath.exp(1j * B.theta), dtype=complex)
    for a, m in B.factors:
        den = 1.0 - np.conj(a) * z
        if np.any(den == 0):
            raise ValueError(f"evaluation at the pole 1/conj({a}) of a Blaschke factor")
        out = out * ((z - a) / den) ** m
    return out if out.ndim else complex(out)


# Sampled curves


def _trig_coeffs(values: np.ndarray) -> np.ndarray:
    return np.fft.fft(values) / len(values)


def _trig_eval(coeffs: np.ndarray, t, derivative: int = 0):
    M = len(coeffs)
    k = np.fft.fftfreq(M, 1.0 / M)
    if M % 2 == 0:
        # split the Nyquist mode symmetrically so real data interpolates to real values
        c = coeffs.copy()
        c[M // 2] *= 0.5
        c = np.append(c, c[M // 2])
        k = np.append(k, -k[M // 2])
    else:
        c = coeffs
    t = np.atleast_1d(np.asarray(t, dtype=float))
    E = np.exp(1j * np.outer(t, k))
    return E @ (c * (1j * k) ** derivative)


@dataclass
class SampledCurve:
    """A closed curve sampled at t_j = 2 pi j / M with its derivative dz/dt."""

    z: np.ndarray
    dz: np.ndarray

    @property
    def M(self) -> int:
        return len(self.z)

    @property
    def t(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.M) / self.M

    @property
    def tangent(self) -> np.ndarray:
        return self.dz / np.abs(self.dz)

    @property
    def signed_area(self) -> float:
        h = 2 * np.pi / self.M
        return 0.5 * float(np.sum((np.conj(self.z) * self.dz).imag) * h)

    @property
    def diameter(self) -> float:
        pts = np.column_stack([self.z.real, self.z.imag])
        return float(pdist(pts).max())

    def contains(self, w: complex) -> bool:
        return winding_number(self.z, w) != 0

    def at(self, t) -> np.ndarray:
        return _trig_eval(_trig_coeffs(self.z), t)

    def inverted(self, z0: complex) -> tuple["SampledCurve", np.ndarray]:
        """The curve 1/(z - z0) traversed so that the exterior side is on its left.

        Returns the curve and the index map: sample i of the result is
        sample ``index[i]`` of this curve.
        """
        idx = (-np.arange(self.M)) % self.M
        w = self.z[idx] - z0
        return SampledCurve(1.0 / w, self.dz[idx] / w**2), idx

    @classmethod
    def from_function(cls, fn, dfn, M: int = DEFAULT_SAMPLES) -> "SampledCurve":
        t = 2 * np.pi * np.arange(M) / M
        return cls(np.asarray(fn(t), dtype=complex), np.asarray(dfn(t), dtype=complex))

    @classmethod
    def circle(cls, center: complex = 0j, radius: float = 1.0, M: int = DEFAULT_SAMPLES) -> "SampledCurve":
        return cls.from_function(lambda t: center + radius * np.exp(1j * t), lambda t: 1j * radius * np.exp(1j * t), M)

    @classmethod
    def from_polyline(cls, points, M: int = DEFAULT_SAMPLES) -> "SampledCurve":
        """Periodic cubic spline through a closed polyline, resampled uniformly in its parameter."""
        pts = np.asarray(points, dtype=complex)
        if pts[0] == pts[-1]:
            pts = pts[:-1]
        closed = np.append(pts, pts[0])
        s = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(closed)))])
        s = 2 * np.pi * s / s[-1]
        xs = CubicSpline(s, closed.real, bc_type="periodic")
        ys = CubicSpline(s, closed.imag, bc_type="periodic")
        t = 2 * np.pi * np.arange(M) / M
        return cls(xs(t) + 1j * ys(t), xs(t, 1) + 1j * ys(t, 1))

    @classmethod
    def lemniscate(cls, p: Polynomial, level: float, points, M: int = DEFAULT_SAMPLES) -> "SampledCurve":
        """A component of |p| = level parametrised by arg p.

        ``points`` is any closed polyline on the component (e.g. a traced
        loop) traversed with arg p increasing.  Samples solve
        p(z) = level * exp(i (phi0 + w t)) by Newton, where w is the winding
        of p along the component, and dz/dt = i w p / p'.
        """
        pts = np.asarray(points, dtype=complex)
        if pts[0] == pts[-1]:
            pts = pts[:-1]
        vals = p(pts)
        closed = np.append(vals, vals[0])
        steps = np.angle(closed[1:] / closed[:-1])
        total = float(np.sum(steps))
        w = int(round(total / (2 * np.pi)))
        if w <= 0 or abs(total - 2 * np.pi * w) > 1e-6:
            raise OrientationError(f"arg p winds {total / (2 * np.pi):.6f} times along the curve; need a positive integer")
        phase = np.concatenate([[np.angle(vals[0])], np.angle(vals[0]) + np.cumsum(steps)])
        ring = np.append(pts, pts[0])
        t = 2 * np.pi * np.arange(M) / M
        target = phase[0] + w * t
        z = np.interp(target, phase, ring.real) + 1j * np.interp(target, phase, ring.imag)
        goal = level * np.exp(1j * target)
        dp = p.derivative()
        for _ in range(60):
            step = (p(z) - goal) / dp(z)
            z = z - step
            if np.max(np.abs(step)) <= 1e-15 * (1 + np.max(np.abs(z))):
                break
        dz = 1j * w * p(z) / dp(z)
        return cls(z, dz)


# Interior and exterior Riemann maps


def _szego_boundary(curve: SampledCurve, a: complex) -> np.ndarray:
    z, T, speed = curve.z, curve.tangent, np.abs(curve.dz)
    h = 2 * np.pi / curve.M
    D = z[:, None] - z[None, :]  # z_j - w_k
    with np.errstate(divide="ignore", invalid="ignore"):
        A = (T[None, :] / D - np.conj(T[:, None]) / np.conj(D)) / (2j * np.pi)
    np.fill_diagonal(A, 0.0)
    K = np.eye(curve.M) + A * (speed * h)[None, :]
    rhs = np.conj(T / (2j * np.pi * (z - a)))
    S = np.linalg.solve(K, rhs)
    return -1j * T * S / np.conj(S)


def _cauchy_eval(nodes, weights, values, w):
    """Barycentric Cauchy interpolation: sum v dz/(z - w) / sum dz/(z - w)."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    C = weights[None, :] / (nodes[None, :] - w[:, None])
    return (C @ values) / C.sum(axis=1)


@dataclass
class DiskMap:
    """Riemann map phi of the unit disk onto the interior of ``curve`` with phi(0) = center, phi'(0) > 0.

    ``boundary[j]`` is phi^{-1}(curve.z[j]); together they are the boundary
    correspondence.
    """

    curve: SampledCurve
    center: complex
    boundary: np.ndarray
    accuracy: float

    @property
    def M(self) -> int:
        return self.curve.M

    def inverse(self, z):
        """phi^{-1} at interior points."""
        out = _cauchy_eval(self.curve.z, self.curve.dz, self.boundary, z)
        return out if np.ndim(z) else complex(out[0])

    def _lifted(self) -> np.ndarray:
        return np.unwrap(np.angle(self.boundary))

    def boundary_parameter(self, eta) -> np.ndarray:
        """Curve parameter t with phi(e^{i s}) = z(t) for the given circle points."""
        lift = self._lifted()
        t = self.curve.t
        c = _trig_coeffs(lift - t - lift[0])
        s = np.angle(np.atleast_1d(np.asarray(eta, dtype=complex))) - lift[0]
        s = np.mod(s, 2 * np.pi)
        ext = np.append(lift - lift[0], 2 * np.pi)
        guess = np.interp(s, ext, np.append(t, 2 * np.pi))
        for _ in range(30):
            g = guess + _trig_eval(c, guess).real - s
            dg = 1.0 + _trig_eval(c, guess, 1).real
            step = g / dg
            guess = guess - step
            if np.max(np.abs(step)) < 1e-15:
                break
        return guess

    def forward_boundary(self, eta) -> np.ndarray:
        return self.curve.at(self.boundary_parameter(eta))

    def forward(self, eta):
        """phi at points of the open unit disk."""
        lift = self._lifted()
        c = _trig_coeffs(lift - self.curve.t)
        dtheta = 1.0 + _trig_eval(c, self.curve.t, 1).real
        weights = 1j * self.boundary * dtheta
        out = _cauchy_eval(self.boundary, weights, self.curve.z, eta)
        return out if np.ndim(eta) else complex(out[0])

    def derivative_at_center(self) -> complex:
        """phi'(0), from f'(center) = (1/2 pi i) int f(w)/(w - center)^2 dw."""
        h = 2 * np.pi / self.M
        fprime = np.sum(self.boundary * self.curve.dz / (self.curve.z - self.center) ** 2) * h / (2j * np.pi)
        return 1.0 / fprime

    def rotated(self, gamma: float) -> "DiskMap":
        """The map eta -> phi(e^{-i gamma} eta), i.e. phi^{-1} followed by a rotation by gamma."""
        return DiskMap(self.curve, self.center, self.boundary * cmath.exp(1j * gamma), self.accuracy)

    def to_json(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "samples": self.M,
            "accuracy": self.accuracy,
            "correspondence": [
                {"eta": float(np.angle(e)), "z": [z.real, z.imag]} for e, z in zip(self.boundary, self.curve.z)
            ],
        }


def _tail(boundary: np.ndarray, t: np.ndarray) -> float:
    lift = np.unwrap(np.angle(boundary))
    c = np.abs(_trig_coeffs(lift - t))
    M = len(c)
    k = np.abs(np.fft.fftfreq(M, 1.0 / M))
    return float(c[k >= M // 4].max())


def riemann_map_disk(curve, z0: complex, samples: int = DEFAULT_SAMPLES,
                     accuracy_rel: float = MAP_ACCURACY_REL, max_samples: int = MAX_SAMPLES) -> DiskMap:
    """Interior Riemann map of a smooth Jordan curve, normalised at ``z0``.

    ``curve`` is a ``SampledCurve`` or a closed polyline (counter-clockwise).
    Polylines are splined and resampled; for a polyline the reachable
    accuracy is bounded by the spline.  The accuracy estimate is the size
    of the top quarter of the Fourier spectrum of arg phi^{-1} - t, scaled by
    the curve diameter; it is refined by doubling the sample count.
    """
    polyline = None
    if not isinstance(curve, SampledCurve):
        polyline = np.asarray(curve, dtype=complex)
        curve = SampledCurve.from_polyline(polyline, samples)
    if curve.signed_area <= 0:
        raise OrientationError("curve is clockwise; the interior must lie on its left")
    if winding_number(curve.z, z0) != 1:
        raise PreconditionError(f"center {z0} is not inside the curve")
    target = accuracy_rel * curve.diameter
    while True:
        f = _szego_boundary(curve, z0)
        lift = np.unwrap(np.angle(f))
        if not np.all(np.diff(lift) > 0) or abs(lift[-1] - lift[0] + np.angle(f[0] / f[-1]) - 2 * np.pi) > 1e-6:
            err = math.inf
        else:
            err = _tail(f, curve.t) * curve.diameter
        if err <= target or curve.M * 2 > max_samples:
            break
        if polyline is not None:
            curve = SampledCurve.from_polyline(polyline, curve.M * 2)
        else:
            break
    if not err <= target:
        raise ConformalError(f"map accuracy {err:.3e} misses the target {target:.3e} at {curve.M} samples")
    return DiskMap(curve, z0, f, err)


@dataclass
class ExteriorMap:
    """Riemann map of |xi| > 1 onto the exterior of a curve, xi -> infinity at infinity, positive derivative there.

    Built from the interior map g of the inverted curve 1/(z - z0):
    phi_plus(xi) = z0 + 1/g(1/xi).
    """

    curve: SampledCurve
    z0: complex
    inner: DiskMap
    index: np.ndarray

    @property
    def boundary(self) -> np.ndarray:
        """phi_plus^{-1} at each sample of the original curve."""
        out = np.empty(self.curve.M, dtype=complex)
        out[self.index] = 1.0 / self.inner.boundary
        return out

    def inverse(self, z):
        w = 1.0 / (np.asarray(z, dtype=complex) - self.z0)
        return 1.0 / self.inner.inverse(w)

    def forward(self, xi):
        return self.z0 + 1.0 / self.inner.forward(1.0 / np.asarray(xi, dtype=complex))

    @property
    def accuracy(self) -> float:
        return self.inner.accuracy

    def derivative_at_infinity(self) -> complex:
        return 1.0 / self.inner.derivative_at_center()


def exterior_map(curve: SampledCurve, z0: complex, accuracy_rel: float = MAP_ACCURACY_REL) -> ExteriorMap:
    if curve.signed_area <= 0:
        raise OrientationError("curve is clockwise; the interior must lie on its left")
    if winding_number(curve.z, z0) != 1:
        raise PreconditionError(f"inversion center {z0} is not inside the curve")
    inv, idx = curve.inverted(z0)
    inner = riemann_map_disk(inv, 0j, accuracy_rel=accuracy_rel)
    return ExteriorMap(curve, z0, inner, idx)


# Explicit maps


def _check_smooth(p: Polynomial, level: float):
    qd = build(RationalMap(p))
    for cv in critical_values(qd):
        if abs(cv.modulus - level) <= 1e-9 * max(level, 1.0):
            raise PreconditionError(
                f"level {level} equals the critical modulus |{cv.value}| at z = {cv.point}; the lemniscate is not smooth"
            )


def exterior_param(p: Polynomial, curve, level: float = 1.0) -> np.ndarray:
    """p^{1/n} along a closed curve on |p| = level, continued by unwrapping arg p.

    The samples close up only when p winds exactly n = deg p times along the
    curve, i.e. when the curve encloses every root of p.
    """
    _check_smooth(p, level)
    pts = np.asarray(curve.z if isinstance(curve, SampledCurve) else curve, dtype=complex)
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]
    n = p.degree
    vals = p(pts) / level
    steps = np.angle(np.append(vals[1:], vals[0]) / vals)
    winding = float(np.sum(steps)) / (2 * np.pi)
    if abs(winding - n) > 1e-6:
        raise PreconditionError(f"p winds {winding:.6f} times along the curve, not deg p = {n}; p^(1/n) does not close")
    phase = np.angle(vals[0]) + np.concatenate([[0.0], np.cumsum(steps[:-1])])
    return np.abs(vals) ** (1.0 / n) * np.exp(1j * phase / n)


@dataclass
class CircleDomainMap:
    """psi = beta p^c on the Circle domain of a double pole ``center`` of -(p'/p)^2 dz^2.

    The branch is fixed through the normalised ratio p(z)/(lead (z - a)^alpha)
    (or p(z)/(lead z^n) at infinity), which tends to 1 at the center and is
    taken on its principal branch; beta makes psi'(a) > 0.  ``radius`` is the
    radius of the image disk (or of the omitted disk, at infinity).
    """

    p: Polynomial
    center: complex
    alpha: int
    exponent: float
    lead: complex
    beta: complex
    radius: float | None = None

    @property
    def at_infinity(self) -> bool:
        return math.isinf(self.center.real)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.at_infinity:
            base = z
            ratio = self.p(z) / (self.lead * z**self.alpha)
        else:
            base = z - self.center
            ratio = self.p(z) / (self.lead * base**self.alpha)
        # beta p^c = |lead|^c (z - a) ratio^c, since beta cancels the phase of lead^c
        return abs(self.lead) ** self.exponent * base * np.exp(self.exponent * np.log(ratio))

    def to_json(self) -> dict:
        c = None if self.at_infinity else [self.center.real, self.center.imag]
        return {"center": c, "alpha": self.alpha, "exponent": self.exponent, "radius": self.radius}


def circle_domain_map(p: Polynomial, a: complex, radius: float | None = None) -> CircleDomainMap:
    """Descriptor of psi = beta p^c for a = infinity (c = 1/n) or a root of p of multiplicity alpha (c = 1/alpha)."""
    if p.degree < 1:
        raise PreconditionError("p must be non-constant")
    if math.isinf(complex(a).real):
        alpha, lead = p.degree, p.leading
    else:
        rs = poly_roots(p)
        hits = [(z, m) for z, m in rs.roots if abs(z - a) <= 1e-8 * (1 + abs(a))]
        if not hits:
            raise PreconditionError(f"{a} is neither infinity nor a root of p, so it is not a double pole")
        a, alpha = hits[0]
        d = p
        for _ in range(alpha):
            d = d.derivative()
        lead = d(a) / math.factorial(alpha)
    c = 1.0 / alpha
    beta = 1.0 / cmath.exp(1j * c * cmath.phase(lead))
    return CircleDomainMap(p, complex(a), alpha, c, lead, beta, radius)


# Fingerprints and theorem checks


@dataclass
class Fingerprint:
    """Samples of k = phi_plus^{-1} o phi_minus on the circle, paired in curve order."""

    eta: np.ndarray
    k: np.ndarray
    n: int
    alpha: int | None = None
    beta: int | None = None

    @property
    def M(self) -> int:
        return len(self.eta)

    def lifted(self) -> tuple[np.ndarray, np.ndarray]:
        return np.unwrap(np.angle(self.eta)), np.unwrap(np.angle(self.k))

    @property
    def monotone(self) -> bool:
        a, b = self.lifted()
        return bool(np.all(np.diff(a) > 0) and np.all(np.diff(b) > 0))

    def to_json(self) -> dict:
        a, b = self.lifted()
        return {"n": self.n, "alpha": self.alpha, "beta": self.beta,
                "samples": [[float(x), float(y)] for x, y in zip(np.mod(a, 2 * np.pi), np.mod(b, 2 * np.pi))]}


def fingerprint(p: Polynomial, curve: SampledCurve, dm: DiskMap, ext: ExteriorMap | None = None,
                level: float = 1.0) -> Fingerprint:
    """k samples: eta_j = phi_minus^{-1}(z_j), k_j = phi_plus^{-1}(z_j).

    Without ``ext`` the exterior side is p^{1/n}, valid when the curve
    encloses every root of p.
    """
    if curve.signed_area <= 0:
        raise OrientationError("curve is clockwise")
    if dm.curve is not curve and not np.array_equal(dm.curve.z, curve.z):
        raise PreconditionError("the disk map was built on a different sampling of the curve")
    k = exterior_param(p, curve, level) if ext is None else ext.boundary
    fp = Fingerprint(dm.boundary.copy(), np.asarray(k), p.degree)
    if not fp.monotone:
        raise OrientationError("fingerprint samples are not increasing; the curve orientation is reversed")
    return fp


@dataclass
class TheoremReport:
    theorem: str
    residual: float
    tolerance: float
    blaschke: BlaschkeProduct
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.residual <= self.tolerance

    def to_json(self) -> dict:
        return {"theorem": self.theorem, "residual": self.residual, "tolerance": self.tolerance, "ok": self.ok,
                "blaschke": self.blaschke.to_json(), **self.details}


def root_census(p: Polynomial, curve: SampledCurve) -> tuple[list[tuple[complex, int]], list[tuple[complex, int]]]:
    """Distinct roots of p inside and outside the curve."""
    rs = poly_roots(p)
    inside, outside = [], []
    for z, m in rs.roots:
        (inside if curve.contains(z) else outside).append((z, m))
    return inside, outside


def _fit_rotation(target: np.ndarray, model: np.ndarray) -> float:
    return float(np.angle(np.sum(target * np.conj(model))))


def verify_eks(p: Polynomial, fp: Fingerprint, dm: DiskMap, tol: float = FINGERPRINT_TOL) -> TheoremReport:
    """k^n = B on the circle, with B's zeros at phi_minus^{-1} of the roots of p."""
    inside, outside = root_census(p, dm.curve)
    if outside:
        raise PreconditionError(f"roots {[z for z, _ in outside]} lie outside the curve")
    n = p.degree
    factors = tuple((complex(dm.inverse(z)), m) for z, m in inside)
    B0 = BlaschkeProduct(0.0, factors)
    lhs = fp.k**n
    model = B0(fp.eta)
    theta = _fit_rotation(lhs, model)
    B = B0.rotated(theta)
    res = float(np.max(np.abs(lhs - B(fp.eta))))
    return TheoremReport("eks", res, tol, B, {"roots": [[z.real, z.imag] for z, _ in inside]})


def verify_thm2(p: Polynomial, curve: SampledCurve, ext: ExteriorMap, level: float = 1.0,
                tol: float = FINGERPRINT_TOL) -> TheoremReport:
    """(k^{-1})^alpha = eta^n B1 with B1's factors at phi_plus^{-1} of the outside roots.

    The curve must hold a single distinct root a (multiplicity alpha); the
    interior map is then p^{1/alpha} up to rotation, so (k^{-1})^alpha is p
    along the curve.  The factors of B1 lie outside the unit disk.
    """
    inside, outside = root_census(p, curve)
    if len(inside) != 1:
        raise PreconditionError(f"the curve holds {len(inside)} distinct roots of p; exactly one is required")
    (a, alpha), n = inside[0], p.degree
    xi = ext.boundary
    lhs = p(curve.z) / level
    factors = tuple((complex(ext.inverse(z)), m) for z, m in outside)
    B1 = BlaschkeProduct(0.0, factors)
    model = xi**n * B1(xi)
    theta = _fit_rotation(lhs, model)
    B1 = B1.rotated(theta)
    res = float(np.max(np.abs(lhs - xi**n * B1(xi))))
    return TheoremReport("thm2", res, tol, B1, {"a": [a.real, a.imag], "alpha": alpha, "n": n})


def verify_thm3(p: Polynomial, curve: SampledCurve, dm: DiskMap, ext: ExteriorMap, a: complex, b: complex,
                level: float = 1.0, tol: float = FINGERPRINT_TOL) -> TheoremReport:
    """A o k = B on the circle for a curve holding exactly the two distinct roots a, b.

    B has zeros at phi_minus^{-1}(a), phi_minus^{-1}(b) with multiplicities
    alpha, beta; A = eta^n B2 with B2's factors at phi_plus^{-1} of the other
    roots.  The reversed composition B o k = A is also evaluated and
    reported as ``reversed_residual``; it does not hold in general.
    """
    if abs(a - b) <= 1e-8 * (1 + abs(a)):
        raise PreconditionError("a and b must be distinct roots")
    inside, outside = root_census(p, curve)
    pick = lambda w: [(z, m) for z, m in inside if abs(z - w) <= 1e-6 * (1 + abs(w))]
    ia, ib = pick(a), pick(b)
    if len(inside) != 2 or len(ia) != 1 or len(ib) != 1:
        raise PreconditionError(f"the curve must hold exactly the roots {a} and {b}; it holds {[z for z, _ in inside]}")
    (za, alpha), (zb, beta), n = ia[0], ib[0], p.degree
    eta = dm.boundary
    xi = ext.boundary
    B0 = BlaschkeProduct(0.0, ((complex(dm.inverse(za)), alpha), (complex(dm.inverse(zb)), beta)))
    B2 = BlaschkeProduct(0.0, tuple((complex(ext.inverse(z)), m) for z, m in outside))
    A = xi**n * B2(xi)
    theta = _fit_rotation(A, B0(eta))
    B = B0.rotated(theta)
    res = float(np.max(np.abs(B(eta) - A)))
    # the composition in the opposite order, for comparison
    Arev = eta**n * B2(eta) if not B2.factors or all(abs(1 - np.conj(c) * eta).min() > 0 for c, _ in B2.factors) else None
    rev = math.nan
    if Arev is not None:
        th2 = _fit_rotation(Arev, B0(xi))
        rev = float(np.max(np.abs(B0.rotated(th2)(xi) - Arev)))
    return TheoremReport("thm3", res, tol, B, {
        "a": [za.real, za.imag], "b": [zb.real, zb.imag], "alpha": alpha, "beta": beta, "n": n,
        "A": {"n": n, "B2": B2.to_json()}, "reversed_residual": rev,
    })


def fingerprint_component(p: Polynomial, points, level: float = 1.0, samples: int = DEFAULT_SAMPLES,
                          tol: float = FINGERPRINT_TOL) -> tuple[Fingerprint | None, TheoremReport | None, dict]:
    """Fingerprint of one component of |p| = level and the theorem check its root census selects.

    ``points`` is a closed polyline on the component with arg p increasing.
    Returns (fingerprint, report, info); the report is None when the census
    falls outside every theorem.
    """
    _check_smooth(p, level)
    curve = SampledCurve.lemniscate(p, level, points, samples)
    inside, outside = root_census(p, curve)
    info = {"inside": [[z.real, z.imag, m] for z, m in inside], "outside": [[z.real, z.imag, m] for z, m in outside],
            "level": level, "samples": samples}
    if not inside:
        info["scope"] = "no root inside"
        return None, None, info
    z0 = inside[0][0]
    dm = riemann_map_disk(curve, z0)
    if not outside:
        info["scope"] = "eks"
        fp = fingerprint(p, curve, dm, level=level)
        return fp, verify_eks(p, fp, dm, tol), info
    ext = exterior_map(curve, z0)
    fp = fingerprint(p, curve, dm, ext, level)
    if len(inside) == 1:
        info["scope"] = "thm2"
        fp.alpha = inside[0][1]
        return fp, verify_thm2(p, curve, ext, level, tol), info
    if len(inside) == 2:
        info["scope"] = "thm3"
        fp.alpha, fp.beta = inside[0][1], inside[1][1]
        return fp, verify_thm3(p, curve, dm, ext, inside[0][0], inside[1][0], level, tol), info
    info["scope"] = "out of theorem scope"
    return fp, None, info
