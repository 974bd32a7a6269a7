"""Riemann sphere points, dense complex polynomials, and simultaneous root finding.

Everything downstream (critical points, fibers, periodic points) reduces to
polynomial root extraction with correct multiplicities, so the root finder here
is the load-bearing wall: Aberth-Ehrlich iteration with deterministic circle
initialization, cluster-based multiplicity detection, and a Newton polish of
each cluster against the appropriate derivative.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

# Chordal tolerance used for point equality throughout the package.
CHORDAL_EQ_TOL = 1e-8

# |w| below this (after max-modulus normalization) counts as the point at infinity.
_INF_TOL = 1e-11


class RootFindingError(ArithmeticError):
    """Raised when the Aberth iteration fails to converge.

    The best iterate so far is attached as ``best`` so callers can inspect
    how far the solve got.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


# ---------------------------------------------------------------------------
# sphere points


@dataclass(frozen=True)
class SpherePoint:
    """Point of the Riemann sphere in homogeneous coordinates (z : w).

    Stored max-modulus normalized: max(|z|, |w|) == 1. The point at infinity
    is (1 : 0); finite points with |z| <= 1 are stored as (z : 1) scaled.
    """

    z: complex
    w: complex

    def __post_init__(self):
        z = complex(self.z)
        w = complex(self.w)
        s = max(abs(z), abs(w))
        if s == 0.0 or not math.isfinite(s):
            raise ValueError(f"invalid homogeneous pair ({self.z!r}, {self.w!r})")
        object.__setattr__(self, "z", z / s)
        object.__setattr__(self, "w", w / s)

    @classmethod
    def of(cls, z: complex) -> "SpherePoint":
        z = complex(z)
        if cmath.isinf(z):
            return cls.infinity()
        return cls(z, 1.0)

    @classmethod
    def infinity(cls) -> "SpherePoint":
        return cls(1.0, 0.0)

    @property
    def is_infinity(self) -> bool:
        return abs(self.w) < _INF_TOL

    def to_complex(self) -> complex:
        if self.is_infinity:
            raise ValueError("point at infinity has no finite coordinate")
        return self.z / self.w

    def chordal(self, other: "SpherePoint") -> float:
        """Chordal distance, range [0, 2]."""
        num = 2.0 * abs(self.z * other.w - other.z * self.w)
        n1 = math.hypot(abs(self.z), abs(self.w))
        n2 = math.hypot(abs(other.z), abs(other.w))
        return num / (n1 * n2)

    def isclose(self, other: "SpherePoint", tol: float = CHORDAL_EQ_TOL) -> bool:
        return self.chordal(other) < tol

    def __repr__(self):
        if self.is_infinity:
            return "SpherePoint(inf)"
        return f"SpherePoint({self.to_complex():.12g})"


def as_sphere(x) -> SpherePoint:
    """Coerce a complex number or SpherePoint to a SpherePoint."""
    if isinstance(x, SpherePoint):
        return x
    return SpherePoint.of(x)


def chordal(a, b) -> float:
    return as_sphere(a).chordal(as_sphere(b))


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial with complex coefficients, ascending degree order.

    Trailing (highest-degree) exact zeros are stripped on construction; the
    zero polynomial has empty coefficients and degree -1.
    """

    coeffs: tuple

    def __post_init__(self):
        cs = [complex(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def eval_abs(self, r: float) -> float:
        """sum |a_k| r^k, the natural scale for backward-error tests."""
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * r + abs(c)
        return acc

    def deriv(self) -> "Polynomial":
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return Polynomial(tuple(out))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if self.is_zero or other.is_zero:
                return Polynomial(())
            conv = np.convolve(np.asarray(self.coeffs), np.asarray(other.coeffs))
            return Polynomial(tuple(conv))
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, s: complex) -> "Polynomial":
        return Polynomial(tuple(s * c for c in self.coeffs))

    def pow(self, n: int) -> "Polynomial":
        out = Polynomial((1.0,))
        for _ in range(n):
            out = out * self
        return out

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def trimmed(self, rel_tol: float = 1e-12) -> "Polynomial":
        """Strip high-order coefficients that are tiny relative to the largest."""
        scale = self.max_abs_coeff()
        if scale == 0.0:
            return Polynomial(())
        cs = list(self.coeffs)
        while cs and abs(cs[-1]) <= rel_tol * scale:
            cs.pop()
        return Polynomial(tuple(cs))

    def reversed_to(self, n: int) -> "Polynomial":
        """Coefficient reversal z^n p(1/z); pads with zeros up to degree n."""
        if n < self.degree:
            raise ValueError("reversal degree below polynomial degree")
        cs = list(self.coeffs) + [0j] * (n - self.degree)
        return Polynomial(tuple(reversed(cs)))

    def __repr__(self):
        if self.is_zero:
            return "Polynomial(0)"
        terms = ", ".join(f"{c:.6g}" for c in self.coeffs)
        return f"Polynomial([{terms}])"


def poly(*coeffs) -> Polynomial:
    """Convenience constructor, ascending coefficients."""
    return Polynomial(tuple(coeffs))


def hom_compose(outer: Polynomial, u: Polynomial, v: Polynomial, n: int) -> Polynomial:
    """sum a_k u^k v^(n-k) for outer = sum a_k z^k, homogenized to degree n."""
    if n < outer.degree:
        raise ValueError("homogenization degree below outer degree")
    u_pow = [Polynomial((1.0,))]
    v_pow = [Polynomial((1.0,))]
    for _ in range(n):
        u_pow.append(u_pow[-1] * u)
        v_pow.append(v_pow[-1] * v)
    acc = Polynomial(())
    for k, a in enumerate(outer.coeffs):
        if a != 0:
            acc = acc + (u_pow[k] * v_pow[n - k]).scale(a)
    return acc


def poly_compose(outer: Polynomial, inner_num: Polynomial,
                 inner_den: Polynomial) -> tuple[Polynomial, Polynomial]:
    """outer(inner_num/inner_den) as a numerator/denominator pair.

    The denominator is inner_den raised to deg(outer).
    """
    n = outer.degree
    if n < 0:
        return Polynomial(()), Polynomial((1.0,))
    num = hom_compose(outer, inner_num, inner_den, n)
    den = inner_den.pow(n)
    return num, den


def _sylvester(p: Polynomial, q: Polynomial) -> np.ndarray:
    m, n = p.degree, q.degree
    s = np.zeros((m + n, m + n), dtype=complex)
    pc = list(reversed(p.coeffs))
    qc = list(reversed(q.coeffs))
    for i in range(n):
        s[i, i:i + m + 1] = pc
    for i in range(m):
        s[n + i, i:i + n + 1] = qc
    return s


def resultant(p: Polynomial, q: Polynomial) -> complex:
    """Resultant via the Sylvester matrix determinant."""
    m, n = p.degree, q.degree
    if m < 0 or n < 0:
        return 0j
    if m == 0:
        return p.coeffs[0] ** n
    if n == 0:
        return q.coeffs[0] ** m
    return complex(np.linalg.det(_sylvester(p, q)))


def coprime(p: Polynomial, q: Polynomial, rel_tol: float = 1e-10) -> bool:
    """Approximate coprimality by the numerical rank of the Sylvester matrix.

    A common factor makes the matrix rank-deficient, so the test compares the
    smallest singular value against the largest. The determinant itself is a
    bad signal here: its Hadamard bound outgrows honest resultants by orders
    of magnitude once the degrees reach the double digits.
    """
    m, n = p.degree, q.degree
    if m <= 0 or n <= 0:
        return not (p.is_zero or q.is_zero)
    sv = np.linalg.svd(_sylvester(p, q), compute_uv=False)
    if sv[0] == 0.0:
        return False
    return sv[-1] > rel_tol * sv[0]


# ---------------------------------------------------------------------------
# root finding


def _initial_guesses(a: np.ndarray) -> np.ndarray:
    """Starting points on circles whose radii come from the upper convex hull
    of (k, log|a_k|).

    One circle per hull edge, radius (|a_{k1}|/|a_{k2}|)^(1/(k2-k1)), which
    tracks the moduli of the root groups. A single bounding circle fails badly
    when the coefficient range spans many orders of magnitude (high iterates):
    its radius is astronomically large and evaluation overflows.
    """
    n = len(a) - 1
    mags = np.abs(a)
    logs = np.where(mags > 0.0, np.log(np.where(mags > 0.0, mags, 1.0)), -np.inf)
    hull = [0]
    for k in range(1, n + 1):
        if not np.isfinite(logs[k]):
            continue
        while len(hull) >= 2:
            k1, k2 = hull[-2], hull[-1]
            if (logs[k] - logs[k1]) * (k2 - k1) >= (logs[k2] - logs[k1]) * (k - k1):
                hull.pop()
            else:
                break
        hull.append(k)
    z = np.empty(n, dtype=complex)
    pos = 0
    for i in range(len(hull) - 1):
        k1, k2 = hull[i], hull[i + 1]
        m = k2 - k1
        r = math.exp((logs[k1] - logs[k2]) / m)
        ang = 2.0 * math.pi * (np.arange(m) + 0.5) / m + 0.45 + 0.3 * i
        z[pos:pos + m] = r * np.exp(1j * ang)
        pos += m
    return z


def _aberth(coeffs: np.ndarray, tol_stop: float, max_iter: int) -> np.ndarray:
    """Simultaneous root iteration for a polynomial with nonzero constant term.

    coeffs ascending, length n+1, monic not required. Deterministic: fixed
    initialization from the coefficient Newton polygon with fixed angular
    offsets.
    """
    n = len(coeffs) - 1
    a = coeffs / coeffs[-1]
    da = np.arange(1, n + 1) * a[1:]
    z = _initial_guesses(a)
    aa = np.abs(a)

    def horner(c, x):
        acc = np.zeros_like(x)
        for ck in c[::-1]:
            acc = acc * x + ck
        return acc

    converged = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        pv = horner(a, z)
        bad = ~np.isfinite(pv)
        if bad.any():
            # evaluation overflowed: those iterates rocketed out, pull inward
            z = np.where(bad, 0.5 * z, z)
            continue
        scale = horner(aa, np.abs(z)).real
        converged = converged | (np.abs(pv) <= tol_stop * scale)
        if converged.all():
            return z
        dv = horner(da, z)
        dv = np.where(np.abs(dv) < 1e-300, 1e-300 + 0j, dv)
        newton = pv / dv
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - newton * s
        denom = np.where(np.abs(denom) < 1e-300, 1.0, denom)
        step = newton / denom
        step = np.where(np.isfinite(step), step, newton)
        cap = 1.0 + np.abs(z)
        mag = np.abs(step)
        step = np.where(mag > cap, step * (cap / np.where(mag > 0, mag, 1.0)), step)
        z = np.where(converged, z, z - step)
    # Accept a looser backward error before giving up; multiple roots stall
    # the per-point test even though the cluster centroid is fine.
    pv = horner(a, z)
    scale = horner(aa, np.abs(z)).real
    if np.all(np.abs(pv) <= 1e-8 * scale):
        return z
    raise RootFindingError("Aberth iteration did not converge", best=z)


def _mult_estimates(cs: Sequence[complex], points: Sequence[complex]) -> list[int]:
    """Local multiplicity estimate 1 / (1 - p p'' / p'^2) at each point.

    Near an m-fold root the ratio p p'' / p'^2 tends to (m-1)/m, so the
    reciprocal tends to m. Tightly converged simple roots give p ~ 0 and the
    estimate collapses to 1.
    """
    p = Polynomial(tuple(cs))
    dp = p.deriv()
    ddp = dp.deriv()
    n = max(p.degree, 1)
    out = []
    for z in points:
        est = 1
        dv = dp(z)
        if abs(dv) > 0.0:
            denom = 1.0 - (p(z) * ddp(z)) / (dv * dv)
            if abs(denom) > 1e-3:
                m = (1.0 / denom).real
                if math.isfinite(m):
                    est = int(min(max(round(m), 1), n))
        out.append(est)
    return out


def _cluster(points: Sequence[complex], tol: float,
             ests: Optional[Sequence[int]] = None) -> list[tuple[complex, int]]:
    """Agglomerate approximations into (centroid, multiplicity) clusters.

    Two clusters merge while their centroids sit within 3 * tol^(1/m) of each
    other; the stall radius of the iteration near an m-fold root scales like
    tol^(1/m), the factor 3 is slack. m is the merged size, or the local
    multiplicity estimate when both sides agree it is larger: the iterates of
    an m-fold root stall on a circle whose radius already reflects m, so a
    size-based radius alone never starts the merge.
    """
    if ests is None:
        ests = [1] * len(points)
    clusters = [[complex(p), 1, int(e)] for p, e in zip(points, ests)]
    merged = True
    while merged and len(clusters) > 1:
        merged = False
        best = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                d = abs(clusters[i][0] - clusters[j][0])
                if best is None or d < best[0]:
                    best = (d, i, j)
        d, i, j = best
        m = clusters[i][1] + clusters[j][1]
        m_eff = max(m, min(clusters[i][2], clusters[j][2]))
        local = 1.0 + max(abs(clusters[i][0]), abs(clusters[j][0]))
        if d <= 3.0 * (tol ** (1.0 / m_eff)) * local:
            ci, mi, ei = clusters[i]
            cj, mj, ej = clusters[j]
            clusters[i] = [(ci * mi + cj * mj) / m, m, max(ei, ej)]
            del clusters[j]
            merged = True
    return [(c, m) for c, m, _ in clusters]


def _polish(p: Polynomial, root: complex, mult: int) -> complex:
    """Newton-polish a root of multiplicity m against the (m-1)th derivative."""
    q = p
    for _ in range(mult - 1):
        q = q.deriv()
    dq = q.deriv()
    z = root
    for _ in range(30):
        qv = q(z)
        dv = dq(z)
        if abs(dv) == 0.0:
            break
        step = qv / dv
        z_new = z - step
        if abs(step) <= 1e-16 * (1.0 + abs(z)):
            z = z_new
            break
        z = z_new
    # keep the polished value only if it did not wander off
    return z if abs(z - root) <= 1e-2 * (1.0 + abs(root)) else root


def poly_roots(p: Polynomial, tol: float = 1e-10,
               max_iter: int = 600) -> list[tuple[complex, int]]:
    """All roots of p with multiplicities; multiplicities sum to deg(p).

    Deterministic. Raises RootFindingError on non-convergence and ValueError
    for degree < 1 or a non-positive tolerance.
    """
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    work = p.trimmed(1e-14)
    if work.degree < 1:
        raise ValueError("root extraction needs degree >= 1")
    scale = work.max_abs_coeff()
    cs = [c / scale for c in work.coeffs]
    # deflate roots at the origin exactly: leading ascending near-zeros
    k0 = 0
    while k0 < len(cs) - 1 and abs(cs[k0]) <= 1e-14:
        k0 += 1
    cs = cs[k0:]
    found: list[tuple[complex, int]] = []
    if len(cs) > 1:
        tol_stop = max(tol * 1e-3, 5e-15)
        approx = _aberth(np.asarray(cs, dtype=complex), tol_stop, max_iter)
        ests = _mult_estimates(cs, list(approx))
        found.extend(_cluster(list(approx), tol, ests))
    if k0:
        found.append((0j, k0))
        found = _cluster([r for r, m in found for _ in range(m)], tol)
    out = []
    for r, m in found:
        r = _polish(p, r, m)
        out.append((r, m))
    out.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    # backward-error acceptance: |p(r)| small relative to sum |a_k| |r|^k
    for r, m in out:
        res = abs(p(r))
        bound = tol * max(p.eval_abs(abs(r)), 1e-300)
        if res > bound and m == 1:
            raise RootFindingError(
                f"root residual {res:.3g} above {bound:.3g} at {r:.6g}",
                best=[r for r, _ in out])
    assert sum(m for _, m in out) == work.degree
    return out


# ---------------------------------------------------------------------------
# Moebius transforms


@dataclass(frozen=True)
class MoebiusTransform:
    """z -> (a z + b) / (c z + d), determinant bounded away from zero."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for f in ("a", "b", "c", "d"):
            object.__setattr__(self, f, complex(getattr(self, f)))
        det = self.a * self.d - self.b * self.c
        scale = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        if scale == 0.0 or abs(det) <= 1e-12 * scale * scale:
            raise ValueError("Moebius transform is singular")

    @classmethod
    def identity(cls) -> "MoebiusTransform":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def inversion(cls) -> "MoebiusTransform":
        return cls(0.0, 1.0, 1.0, 0.0)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "MoebiusTransform":
        return MoebiusTransform(self.d, -self.b, -self.c, self.a)

    def apply(self, x) -> SpherePoint:
        pt = as_sphere(x)
        return SpherePoint(self.a * pt.z + self.b * pt.w,
                           self.c * pt.z + self.d * pt.w)

    def as_rational(self) -> tuple[Polynomial, Polynomial]:
        return Polynomial((self.b, self.a)), Polynomial((self.d, self.c))


def moebius_conjugate(f_num: Polynomial, f_den: Polynomial,
                      m: MoebiusTransform) -> tuple[Polynomial, Polynomial]:
    """Numerator/denominator of m o f o m^{-1}.

    The common homogenizing factor cancels, so the result is the raw
    conjugated pair; callers normalize if they need coprimality.
    """
    inv = m.inverse()
    u = Polynomial((inv.b, inv.a))
    v = Polynomial((inv.d, inv.c))
    n = max(f_num.degree, f_den.degree)
    n1 = hom_compose(f_num, u, v, n)
    n2 = hom_compose(f_den, u, v, n)
    num = n1.scale(m.a) + n2.scale(m.b)
    den = n1.scale(m.c) + n2.scale(m.d)
    return num, den
