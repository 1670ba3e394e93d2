"""Structural model of the quadratic differential -(r'/r)^2 dz^2 of a rational map.

The zeros of the differential are the roots of ``N = p'q - pq'`` away from
the roots of ``pq``; every root ``a`` of ``pq`` is a double pole whose
leading coefficient is ``-m_a**2`` with ``m_a`` the signed multiplicity
(positive for zeros of ``r``, negative for poles).  The behaviour at
infinity is fixed by the degree drop ``d = deg(pq) - deg(N)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .polyfield import Polynomial, RootSet, coprime, roots, wronskian_numerator

__all__ = [
    "RationalMap",
    "InfinityKind",
    "Infinity",
    "CriticalPoint",
    "DoublePole",
    "QuadraticDifferential",
    "CriticalValue",
    "CriticalValueTable",
    "Properness",
    "build",
    "critical_values",
    "necessary_condition",
    "connectivity_predicate",
    "max_modulus_pairs",
    "properness_test",
    "MODULUS_RTOL",
]

INF = complex(math.inf, 0.0)

# relative tolerance for "equal moduli" of critical values
MODULUS_RTOL = 1e-9


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class RationalMap:
    """``r = p / q`` with coprime ``p`` and ``q``; ``n = max(deg p, deg q) >= 1``."""

    p: Polynomial
    q: Polynomial = field(default_factory=lambda: Polynomial((1.0,)))
    coprime_tol: float = 1e-8

    def __post_init__(self):
        if self.p.is_zero or self.q.is_zero:
            raise ModelError("p and q must be nonzero polynomials")
        if self.n < 1:
            raise ModelError("the rational map must have degree n >= 1")
        if not coprime(self.p, self.q, self.coprime_tol):
            raise ModelError("p and q share a root; the rational map must be given in lowest terms")

    @property
    def n(self) -> int:
        return int(max(self.p.degree, self.q.degree))

    @property
    def is_polynomial(self) -> bool:
        return self.q.degree == 0

    def __call__(self, z):
        return self.p(z) / self.q(z)

    def value_at_infinity(self) -> complex:
        dp, dq = self.p.degree, self.q.degree
        if dp > dq:
            return INF
        if dp < dq:
            return 0j
        return self.p.leading / self.q.leading

    def scaled(self, factor: complex) -> "RationalMap":
        return RationalMap(self.p * factor, self.q, self.coprime_tol)

    def inverted_chart(self) -> "RationalMap":
        """The same map in the coordinate ``u = 1/z``: ``r(1/u)`` as a ratio of polynomials."""
        dp, dq = int(self.p.degree), int(self.q.degree)
        P, Q = self.p.reversed(), self.q.reversed()
        e = dq - dp
        if e >= 0:
            P = P * Polynomial.monomial(e)
        else:
            Q = Q * Polynomial.monomial(-e)
        return RationalMap(P, Q, self.coprime_tol)

    def zeros(self) -> RootSet | None:
        return roots(self.p) if self.p.degree >= 1 else None

    def poles(self) -> RootSet | None:
        return roots(self.q) if self.q.degree >= 1 else None

    def zero_count(self) -> int:
        """Distinct zeros of r on the sphere (the small-level component count)."""
        z = self.zeros()
        k = len(z) if z is not None else 0
        return k + (1 if self.q.degree > self.p.degree else 0)

    def pole_count(self) -> int:
        """Distinct poles of r on the sphere (the large-level component count)."""
        z = self.poles()
        k = len(z) if z is not None else 0
        return k + (1 if self.p.degree > self.q.degree else 0)

    def to_json(self) -> dict:
        return {"p": {"coeffs": self.p.to_json()}, "q": {"coeffs": self.q.to_json()}}


class InfinityKind(enum.Enum):
    DOUBLE_POLE = "double_pole"
    ZERO = "zero"
    REGULAR = "regular"


@dataclass(frozen=True)
class Infinity:
    kind: InfinityKind
    residue: float | None = None
    multiplicity: int = 0
    note: str = ""


@dataclass(frozen=True)
class CriticalPoint:
    """A zero of the differential; ``multiplicity`` is twice the root multiplicity in N."""

    location: complex
    multiplicity: int
    leading: complex  # leading coefficient c of r'/r ~ c (z - z0)**(m/2) in the local chart

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.location.real)

    @property
    def ray_count(self) -> int:
        return self.multiplicity + 2


@dataclass(frozen=True)
class DoublePole:
    location: complex
    signed_multiplicity: int  # m_a: >0 for zeros of r, <0 for poles of r

    @property
    def residue(self) -> float:
        return -float(self.signed_multiplicity**2)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.location.real)


@dataclass(frozen=True)
class QuadraticDifferential:
    source: RationalMap
    numerator: Polynomial
    finite_zeros: tuple[CriticalPoint, ...]
    double_poles: tuple[DoublePole, ...]
    infinity: Infinity
    cluster_tolerance: float

    @property
    def zeros(self) -> tuple[CriticalPoint, ...]:
        """Finite zeros followed by infinity when it is a zero."""
        if self.infinity.kind is InfinityKind.ZERO:
            c = self.source
            lead = -self.numerator.leading / (c.p * c.q).leading
            return self.finite_zeros + (CriticalPoint(INF, self.infinity.multiplicity, lead),)
        return self.finite_zeros

    @property
    def all_double_poles(self) -> tuple[DoublePole, ...]:
        if self.infinity.kind is InfinityKind.DOUBLE_POLE:
            dp, dq = self.source.p.degree, self.source.q.degree
            return self.double_poles + (DoublePole(INF, int(dp - dq)),)
        return self.double_poles

    def divisor_balance(self) -> int:
        """Total zero order minus total pole order on the sphere; always -4."""
        return sum(z.multiplicity for z in self.zeros) - 2 * len(self.all_double_poles)

    def length_scale(self) -> float:
        pts = [z.location for z in self.finite_zeros] + [a.location for a in self.double_poles]
        return 1.0 + max((abs(p) for p in pts), default=0.0)

    def to_json(self) -> dict:
        return {
            "numerator": self.numerator.to_json(),
            "zeros": [
                {"location": _cjson(z.location), "multiplicity": z.multiplicity} for z in self.zeros
            ],
            "double_poles": [
                {"location": _cjson(a.location), "signed_multiplicity": a.signed_multiplicity, "residue": a.residue}
                for a in self.all_double_poles
            ],
            "infinity": {
                "kind": self.infinity.kind.value,
                "residue": self.infinity.residue,
                "multiplicity": self.infinity.multiplicity,
                "note": self.infinity.note,
            },
        }


def _cjson(z: complex):
    if math.isinf(z.real) or math.isinf(z.imag):
        return "inf"
    return [z.real, z.imag]


def _near_any(z: complex, pts: np.ndarray, tol: float) -> bool:
    return bool(len(pts)) and bool(np.min(np.abs(pts - z)) <= tol)


def _local_leading(N: Polynomial, pq: Polynomial, z0: complex, k: int) -> complex:
    d = N
    fact = 1
    for i in range(k):
        d = d.derivative()
        fact *= i + 1
    return d(z0) / fact / pq(z0)


def build(r: RationalMap, tol: float = 1e-10) -> QuadraticDifferential:
    """Zeros, double poles and the nature of infinity for ``r``."""
    p, q = r.p, r.q
    pq = p * q
    N = wronskian_numerator(p, q).trimmed(1e-14)
    if N.is_zero:
        raise ModelError("r is constant")
    poles: list[DoublePole] = []
    ctol = 0.0
    for poly, sign in ((p, 1), (q, -1)):
        if poly.degree >= 1:
            rs = roots(poly, tol)
            ctol = max(ctol, rs.cluster_tolerance)
            poles += [DoublePole(z, sign * m) for z, m in rs]
    pole_locs = np.array([a.location for a in poles], dtype=complex)
    zeros: list[CriticalPoint] = []
    if N.degree >= 1:
        rn = roots(N, tol)
        ctol = max(ctol, rn.cluster_tolerance)
        guard = max(ctol, 1e-6 * (1.0 + max((abs(a) for a in pole_locs), default=0.0)))
        for z, k in rn:
            if _near_any(z, pole_locs, guard):
                continue
            zeros.append(CriticalPoint(z, 2 * k, _local_leading(N, pq, z, k)))
    drop = int(pq.degree - N.degree)
    dp, dq = int(p.degree), int(q.degree)
    if drop == 1:
        inf = Infinity(InfinityKind.DOUBLE_POLE, residue=-float((dp - dq) ** 2))
    elif drop == 2:
        inf = Infinity(InfinityKind.REGULAR)
    else:
        mult = 2 * drop - 4
        inf = Infinity(
            InfinityKind.ZERO,
            multiplicity=mult,
            note=(
                "order at infinity from 2(deg pq - deg N) - 4; "
                "the -(deg p - deg q)^2 residue formula applies only when infinity is a double pole"
            ),
        )
    zeros.sort(key=lambda c: (round(c.location.real, 9), round(c.location.imag, 9)))
    poles.sort(key=lambda a: (round(a.location.real, 9), round(a.location.imag, 9)))
    qd = QuadraticDifferential(r, N, tuple(zeros), tuple(poles), inf, ctol)
    if qd.divisor_balance() != -4:
        raise ModelError(
            f"divisor balance {qd.divisor_balance()} != -4; root clustering failed to resolve multiplicities"
        )
    return qd


@dataclass(frozen=True)
class CriticalValue:
    point: complex
    value: complex
    modulus: float


@dataclass(frozen=True)
class CriticalValueTable:
    entries: tuple[CriticalValue, ...]

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i) -> CriticalValue:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    @property
    def moduli(self) -> np.ndarray:
        return np.array([e.modulus for e in self.entries])

    def to_json(self) -> list[dict]:
        return [
            {"point": _cjson(e.point), "value": _cjson(e.value), "modulus": e.modulus} for e in self.entries
        ]


def critical_values(qd: QuadraticDifferential) -> CriticalValueTable:
    """``w_k = r(z_k)`` for each zero of the differential, infinity last."""
    r = qd.source
    out = [CriticalValue(z.location, complex(r(z.location)), abs(r(z.location))) for z in qd.finite_zeros]
    if qd.infinity.kind is InfinityKind.ZERO:
        w = r.value_at_infinity()
        out.append(CriticalValue(INF, w, abs(w)))
    return CriticalValueTable(tuple(out))


def _same_modulus(a: float, b: float, rtol: float = MODULUS_RTOL) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def necessary_condition(qd: QuadraticDifferential, i: int, j: int, rtol: float = MODULUS_RTOL) -> bool:
    """Whether ``Re`` of the integral of r'/r between critical points i and j can vanish.

    Along any arc the integral's real part is ``log|w_j| - log|w_i|``, so this
    is equality of the critical moduli.
    """
    table = critical_values(qd)
    if i == j:
        raise ValueError("necessary_condition needs two distinct critical points")
    return _same_modulus(table[i].modulus, table[j].modulus, rtol)


def connectivity_predicate(qd: QuadraticDifferential, rtol: float = MODULUS_RTOL) -> bool:
    """The critical graph is connected iff all critical moduli coincide."""
    mods = critical_values(qd).moduli
    if len(mods) == 0:
        raise ValueError("the differential has no zeros")
    return all(_same_modulus(m, mods[0], rtol) for m in mods)


def max_modulus_pairs(qd: QuadraticDifferential, rtol: float = MODULUS_RTOL) -> list[tuple[int, int]]:
    mods = critical_values(qd).moduli
    if len(mods) < 2:
        return []
    top = float(np.max(mods))
    idx = [k for k, m in enumerate(mods) if _same_modulus(m, top, rtol)]
    return [(a, b) for x, a in enumerate(idx) for b in idx[x + 1 :]]


class Properness(enum.Enum):
    PROPER = "proper"
    NOT_SMOOTH = "not_smooth"
    NOT_CONNECTED = "not_connected"


def properness_test(qd: QuadraticDifferential, level: float = 1.0, rtol: float = MODULUS_RTOL) -> Properness:
    """Classify the lemniscate ``|p| = level`` of a polynomial by its critical values."""
    if not qd.source.is_polynomial:
        raise ValueError("properness is defined for polynomial lemniscates only")
    mods = [e.modulus for e in critical_values(qd)]
    if any(_same_modulus(m, level, rtol) for m in mods):
        return Properness.NOT_SMOOTH
    if all(m < level for m in mods):
        return Properness.PROPER
    return Properness.NOT_CONNECTED
