"""Complex polynomials in ascending-coefficient form and an all-roots solver.

Everything downstream (the quadratic differential model, the tracer, the
conformal maps) evaluates polynomials at scalar points many thousands of
times, so scalar evaluation is a plain Horner loop over a tuple; array
arguments fall through to numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Polynomial",
    "RootSet",
    "RootFindingError",
    "evaluate",
    "derivative",
    "wronskian_numerator",
    "roots",
    "coprime",
]

_EPS = np.finfo(float).eps


class RootFindingError(ArithmeticError):
    """Raised when the simultaneous iteration does not converge.

    The best iterate is kept on the exception so callers can inspect it.
    """

    def __init__(self, message: str, best: np.ndarray):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with complex coefficients, lowest degree first.

    Trailing zero coefficients are stripped on construction, so
    ``coeffs[-1]`` is nonzero unless the polynomial is zero (empty tuple).
    """

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        c = [complex(v) for v in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, roots: Iterable[complex], leading: complex = 1.0) -> "Polynomial":
        c = np.array([complex(leading)])
        for r in roots:
            # multiply by (z - r)
            c = np.concatenate([[0], c]) - complex(r) * np.concatenate([c, [0]])
        return cls(tuple(c))

    @classmethod
    def constant(cls, value: complex) -> "Polynomial":
        return cls((value,))

    @classmethod
    def monomial(cls, degree: int, coefficient: complex = 1.0) -> "Polynomial":
        return cls((0,) * degree + (coefficient,))

    @property
    def degree(self) -> int | float:
        """Index of the last nonzero coefficient; ``-inf`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> complex:
        return self.coeffs[-1] if self.coeffs else 0j

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def scale(self) -> float:
        """Largest coefficient modulus."""
        return max((abs(c) for c in self.coeffs), default=0.0)

    def __call__(self, z):
        return evaluate(self, z)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Polynomial(tuple(x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)))

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return Polynomial(tuple(c * other for c in self.coeffs))
        if self.is_zero or other.is_zero:
            return Polynomial(())
        out = [0j] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, value: complex) -> "Polynomial":
        return Polynomial(tuple(c / value for c in self.coeffs))

    def derivative(self) -> "Polynomial":
        return derivative(self)

    def reversed(self, degree: int | None = None) -> "Polynomial":
        """Coefficients of ``z**degree * self(1/z)`` (default: own degree)."""
        d = len(self.coeffs) - 1 if degree is None else degree
        c = list(self.coeffs) + [0j] * (d + 1 - len(self.coeffs))
        return Polynomial(tuple(reversed(c[: d + 1])))

    def trimmed(self, rtol: float) -> "Polynomial":
        """Drop trailing coefficients below ``rtol`` times the coefficient scale."""
        s = self.scale()
        c = list(self.coeffs)
        while c and abs(c[-1]) <= rtol * s:
            c.pop()
        return Polynomial(tuple(c))

    def to_json(self) -> list[list[float]]:
        return [[c.real, c.imag] for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence) -> "Polynomial":
        return cls(tuple(_parse_complex(v) for v in data))


def _parse_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ValueError(f"cannot read {v!r} as a complex number; expected [re, im]")


def evaluate(poly: Polynomial, z):
    """Horner evaluation; scalars stay Python complex, arrays go through numpy."""
    c = poly.coeffs
    if isinstance(z, np.ndarray):
        acc = np.zeros_like(z, dtype=complex)
        for a in reversed(c):
            acc = acc * z + a
        return acc
    acc = 0j
    for a in reversed(c):
        acc = acc * z + a
    return acc


def derivative(poly: Polynomial) -> Polynomial:
    return Polynomial(tuple(k * c for k, c in enumerate(poly.coeffs) if k > 0))


def wronskian_numerator(p: Polynomial, q: Polynomial) -> Polynomial:
    """Numerator ``p'q - pq'`` of the derivative of ``p/q``, by exact coefficient arithmetic."""
    if p.is_zero and q.is_zero:
        raise ValueError("p and q are both zero")
    a, b = p.coeffs, q.coeffs
    n = max(len(a), len(b))
    a = a + (0j,) * (n - len(a))
    b = b + (0j,) * (n - len(b))
    out = [0j] * max(2 * n - 2, 1)
    # pair terms (i - j)(a_i b_j - a_j b_i) flip sign exactly under p <-> q
    for i in range(1, n):
        for j in range(i):
            out[i + j - 1] += (i - j) * (a[i] * b[j] - a[j] * b[i])
    return Polynomial(tuple(out))


@dataclass(frozen=True)
class RootSet:
    """Distinct roots with integer multiplicities."""

    roots: tuple[tuple[complex, int], ...]
    cluster_tolerance: float

    @property
    def locations(self) -> np.ndarray:
        return np.array([z for z, _ in self.roots], dtype=complex)

    @property
    def multiplicities(self) -> list[int]:
        return [m for _, m in self.roots]

    def total_multiplicity(self) -> int:
        return sum(self.multiplicities)

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)


def _aberth(a: np.ndarray, max_iter: int) -> tuple[np.ndarray, bool]:
    """Aberth-Ehrlich iteration for the roots of a polynomial without zero roots.

    ``a`` holds ascending coefficients with ``a[-1] != 0`` and ``a[0] != 0``.
    Returns (iterates, converged).
    """
    n = len(a) - 1
    if n == 1:
        return np.array([-a[0] / a[1]]), True
    desc = a[::-1]
    dp = np.polyder(desc)
    absdesc = np.abs(desc)
    center = -a[n - 1] / (n * a[n])
    # geometric mean of root distances from the centroid
    radius = abs(np.polyval(desc, center) / a[n]) ** (1.0 / n)
    if radius == 0 or not np.isfinite(radius):
        radius = 1.0
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = center + radius * np.exp(1j * angles)
    done = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        pz = np.polyval(desc, z)
        bound = np.polyval(absdesc, np.abs(z))
        done |= np.abs(pz) <= 4 * _EPS * bound
        if done.all():
            return z, True
        dpz = np.polyval(dp, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        step = np.where(done, 0.0, w)
        if not np.any(step):
            return z, bool(done.all())
        z = z - step
    return z, bool(done.all())


def _cluster(z: np.ndarray, tol: float) -> list[list[int]]:
    parent = list(range(len(z)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(z)):
        for j in range(i + 1, len(z)):
            if abs(z[i] - z[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(z)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _is_multiple_root(desc: np.ndarray, z: complex, m: int) -> bool:
    d = desc
    for _ in range(m - 1):
        bound = np.polyval(np.abs(d), abs(z))
        if abs(np.polyval(d, z)) > 1e-10 * max(bound, 1e-300):
            return False
        d = np.polyder(d)
    return True


def _merge_multiple(desc: np.ndarray, z: np.ndarray, groups: list[list[int]], wide_tol: float) -> list[list[int]]:
    if len(groups) < 2:
        return groups
    centres = np.array([np.mean(z[g]) for g in groups])
    merged: list[list[int]] = []
    for wide in _cluster(centres, wide_tol):
        if len(wide) == 1:
            merged.append(groups[wide[0]])
            continue
        idx = [i for w in wide for i in groups[w]]
        c = _polish(desc, complex(np.mean(z[idx])), len(idx))
        if _is_multiple_root(desc, c, len(idx)):
            merged.append(idx)
        else:
            merged.extend(groups[w] for w in wide)
    return merged


def _polish(desc: np.ndarray, z: complex, m: int, steps: int = 3) -> complex:
    """Newton on the (m-1)-th derivative, which has a simple root at an m-fold root."""
    d = desc
    for _ in range(m - 1):
        d = np.polyder(d)
    dd = np.polyder(d)
    best, best_val = z, abs(np.polyval(d, z))
    for _ in range(steps):
        den = np.polyval(dd, z)
        if den == 0:
            break
        z = z - np.polyval(d, z) / den
        val = abs(np.polyval(d, z))
        if val < best_val:
            best, best_val = z, val
        else:
            break
    return complex(best)


def roots(
    poly: Polynomial,
    tol: float = 1e-10,
    cluster_rtol: float = 1e-6,
    max_iter: int = 500,
    wide_rtol: float = 1e-3,
) -> RootSet:
    """All complex roots of ``poly``, with near-coincident roots merged.

    Roots closer than ``cluster_rtol * max(1, max|root|)`` are reported as one
    root whose multiplicity is the cluster size; the location is the cluster
    centroid refined by Newton on the matching derivative.  Roots of
    multiplicity three or more scatter by about ``eps**(1/m)``, beyond the
    cluster tolerance, so groups within ``wide_rtol`` are also merged when the
    refined centroid annihilates every derivative below the cluster size.
    """
    if not isinstance(poly.degree, int) or poly.degree < 1:
        raise ValueError("roots() needs a polynomial of degree >= 1")
    a = poly.array
    nzero = 0
    while a[nzero] == 0:
        nzero += 1
    a_rest = a[nzero:]
    if len(a_rest) > 1:
        z, ok = _aberth(a_rest, max_iter)
    else:
        z, ok = np.array([], dtype=complex), True
    desc = a[::-1]
    absdesc = np.abs(desc)
    if not ok:
        resid = np.abs(np.polyval(desc, z)) / np.maximum(np.polyval(absdesc, np.abs(z)), 1e-300)
        if np.max(resid) > tol:
            raise RootFindingError(
                f"Aberth iteration did not converge in {max_iter} steps (worst backward error {np.max(resid):.3g})",
                z,
            )
    scale = max(1.0, float(np.max(np.abs(z))) if len(z) else 1.0)
    ctol = cluster_rtol * scale
    found: list[tuple[complex, int]] = []
    if nzero:
        found.append((0j, nzero))
    desc_rest = a_rest[::-1]
    groups = _merge_multiple(desc_rest, z, _cluster(z, ctol), wide_rtol * scale)
    for group in groups:
        m = len(group)
        centre = complex(np.mean(z[group]))
        if nzero and abs(centre) <= ctol:
            found[0] = (0j, found[0][1] + m)
            continue
        found.append((_polish(desc_rest, centre, m), m))
    for loc, _ in found:
        bound = np.polyval(absdesc, abs(loc))
        if abs(np.polyval(desc, loc)) > tol * max(bound, 1e-300) and abs(np.polyval(desc, loc)) > tol:
            raise RootFindingError(f"root {loc} fails the residual check", z)
    found.sort(key=lambda rm: (round(rm[0].real, 12), round(rm[0].imag, 12)))
    return RootSet(tuple(found), ctol)


def coprime(p: Polynomial, q: Polynomial, tol: float = 1e-8) -> bool:
    """True when no root of ``p`` lies within ``tol`` of a root of ``q``."""
    if p.is_zero or q.is_zero:
        raise ValueError("coprime() needs nonzero polynomials")
    if p.degree < 1 or q.degree < 1:
        return True
    rp = roots(p).locations
    rq = roots(q).locations
    return bool(np.min(np.abs(rp[:, None] - rq[None, :])) > tol)
