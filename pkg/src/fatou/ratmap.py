"""Rational maps on the sphere: evaluation, critical points, preimages, iteration."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .sphere import (Polynomial, SpherePoint, MoebiusTransform, as_sphere,
                     coprime, hom_compose, moebius_conjugate, poly_roots)

COMPOSE_DEGREE_BOUND = 4096


@dataclass(frozen=True)
class CriticalPoint:
    point: SpherePoint
    local_degree: int


@dataclass(frozen=True)
class RationalMap:
    """f = num/den in lowest terms, degree = max(deg num, deg den) >= 2.

    Build through normalize(); the raw constructor trusts its inputs.
    """

    num: Polynomial
    den: Polynomial

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree)

    def __call__(self, x) -> SpherePoint:
        return eval_sphere(self, x)

    def wronskian(self) -> Polynomial:
        return self.num.deriv() * self.den - self.num * self.den.deriv()

    def derivative(self, z: complex) -> complex:
        """f'(z) in the finite chart; z must not be a pole."""
        dv = self.den(z)
        if abs(dv) == 0.0:
            raise ZeroDivisionError("derivative at a pole")
        return self.wronskian()(z) / (dv * dv)

    def conjugate_by(self, m: MoebiusTransform) -> "RationalMap":
        n, d = moebius_conjugate(self.num, self.den, m)
        return normalize(n, d)

    def __repr__(self):
        return f"RationalMap(num={self.num!r}, den={self.den!r})"


def _cancel_common_roots(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Divide out shared roots, matched within a chordal-scale tolerance.

    Explicit root matching is the deciding evidence for coprimality: rank
    tests on the Sylvester matrix go blind past degree ten or so, where the
    nearest non-coprime coefficient vector sits within double precision of
    honest input. Returns the inputs untouched when nothing matches.
    """
    rn = poly_roots(num) if num.degree >= 1 else []
    rd = poly_roots(den) if den.degree >= 1 else []
    used = [False] * len(rn)
    keep_den = []
    total_cancelled = 0
    for r, m in rd:
        cancelled = 0
        for i, (s, ms) in enumerate(rn):
            if used[i]:
                continue
            if abs(r - s) <= 1e-8 * (1.0 + abs(r)):
                k = min(m, ms)
                rn[i] = (s, ms - k)
                used[i] = ms - k == 0
                cancelled = k
                break
        total_cancelled += cancelled
        if m - cancelled > 0:
            keep_den.append((r, m - cancelled))
    if total_cancelled == 0:
        return num, den
    keep_num = [(r, m) for r, m in rn if m > 0]

    def rebuild(lead: complex, roots) -> Polynomial:
        out = Polynomial((lead,))
        for r, m in roots:
            factor = Polynomial((-r, 1.0))
            for _ in range(m):
                out = out * factor
        return out

    lead_n = num.coeffs[-1] if not num.is_zero else 0j
    lead_d = den.coeffs[-1] if not den.is_zero else 0j
    return rebuild(lead_n, keep_num), rebuild(lead_d, keep_den)


def normalize(raw_num: Polynomial, raw_den: Polynomial) -> RationalMap:
    """Reduce to lowest terms and validate; rejects maps of degree < 2."""
    num = raw_num.trimmed(1e-14)
    den = raw_den.trimmed(1e-14)
    if num.is_zero or den.is_zero:
        raise ValueError("numerator and denominator must both be nonzero")
    if not coprime(num, den):
        # rank test is suspicious; root matching settles it either way
        num, den = _cancel_common_roots(num, den)
    # scale jointly so the largest coefficient has modulus near 1; powers of
    # two keep binary-exact coefficients exact
    scale = 2.0 ** round(math.log2(max(num.max_abs_coeff(), den.max_abs_coeff())))
    num = num.scale(1.0 / scale)
    den = den.scale(1.0 / scale)
    deg = max(num.degree, den.degree)
    if deg < 2:
        raise ValueError(f"map has degree {deg} after cancellation; need >= 2")
    return RationalMap(num, den)


def from_coeffs(num, den) -> RationalMap:
    return normalize(Polynomial(tuple(num)), Polynomial(tuple(den)))


def eval_sphere(f: RationalMap, x) -> SpherePoint:
    """Total evaluation: poles go to infinity, infinity through the other chart.

    Works on the homogenizations P, Q of num, den to degree d, evaluated
    stably in whichever affine chart the input lies in.
    """
    pt = as_sphere(x)
    d = f.degree
    if abs(pt.w) >= abs(pt.z):
        # P(z, w) = w^d num(z/w), Q(z, w) = w^d den(z/w); the w^d cancels.
        t = pt.z / pt.w  # |t| <= 1
        pv = f.num(t)
        qv = f.den(t)
    else:
        s = pt.w / pt.z  # |s| < 1, reversal chart
        pv = f.num.reversed_to(d)(s)
        qv = f.den.reversed_to(d)(s)
    if pv == 0 and qv == 0:
        raise ArithmeticError("indeterminate evaluation; map not in lowest terms")
    return SpherePoint(pv, qv)


def iterate(f: RationalMap, x, n: int) -> SpherePoint:
    pt = as_sphere(x)
    for _ in range(n):
        pt = eval_sphere(f, pt)
    return pt


def compose_self(f: RationalMap, n: int) -> RationalMap:
    """The n-th iterate as an explicit map, coefficients rescaled each step to
    keep magnitudes tame. Degree d^n capped at 4096.

    An iterate of a coprime pair is coprime (a common root would map to 0 and
    to infinity at once), so the raw constructor applies.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if f.degree ** n > COMPOSE_DEGREE_BOUND:
        raise ValueError(f"degree {f.degree}^{n} exceeds bound {COMPOSE_DEGREE_BOUND}")
    num, den = f.num, f.den
    d = f.degree
    for _ in range(n - 1):
        new_num = hom_compose(f.num, num, den, d)
        new_den = hom_compose(f.den, num, den, d)
        scale = max(new_num.max_abs_coeff(), new_den.max_abs_coeff())
        num = new_num.scale(1.0 / scale)
        den = new_den.scale(1.0 / scale)
    return RationalMap(num, den)


def critical_points(f: RationalMap) -> list[CriticalPoint]:
    """Critical points with local degrees; sum of (local_degree - 1) is 2d - 2.

    Finite critical points are the Wronskian roots (a pole of order k shows up
    with multiplicity k - 1 there, which is its correct local degree). The
    point at infinity is inspected after conjugating by 1/z.
    """
    d = f.degree
    out: list[CriticalPoint] = []
    w = f.wronskian().trimmed(1e-12)
    if w.is_zero:
        raise ValueError("degenerate map: vanishing Wronskian")
    if w.degree >= 1:
        for r, m in poly_roots(w):
            out.append(CriticalPoint(SpherePoint.of(r), m + 1))
    # behavior at infinity via the inversion chart
    conj_num = f.den.reversed_to(d)
    conj_den = f.num.reversed_to(d)
    w_inf = (conj_num.deriv() * conj_den - conj_num * conj_den.deriv())
    scale = w_inf.max_abs_coeff()
    order = 0
    for c in w_inf.coeffs:
        if abs(c) <= 1e-9 * scale:
            order += 1
        else:
            break
    if order >= 1:
        out.append(CriticalPoint(SpherePoint.infinity(), order + 1))
    total = sum(cp.local_degree - 1 for cp in out)
    if total != 2 * d - 2:
        raise ArithmeticError(
            f"critical multiplicities sum to {total}, expected {2 * d - 2}")
    return out


def preimages(f: RationalMap, v) -> list[tuple[SpherePoint, int]]:
    """Solutions of f(x) = v with multiplicities summing to deg(f)."""
    target = as_sphere(v)
    d = f.degree
    pad = d + 1
    a = list(f.num.coeffs) + [0j] * (pad - len(f.num.coeffs))
    b = list(f.den.coeffs) + [0j] * (pad - len(f.den.coeffs))
    phi = Polynomial(tuple(target.w * a[k] - target.z * b[k] for k in range(pad)))
    phi = phi.trimmed(1e-12)
    if phi.is_zero:
        raise ArithmeticError("degenerate fiber; map not in lowest terms")
    out: list[tuple[SpherePoint, int]] = []
    if phi.degree >= 1:
        for r, m in poly_roots(phi):
            out.append((SpherePoint.of(r), m))
    inf_mult = d - phi.degree
    if inf_mult > 0:
        out.append((SpherePoint.infinity(), inf_mult))
    assert sum(m for _, m in out) == d
    return out


# --- serialization ----------------------------------------------------------


def map_to_jsonable(f: RationalMap) -> dict:
    return {
        "num": [[c.real, c.imag] for c in f.num.coeffs],
        "den": [[c.real, c.imag] for c in f.den.coeffs],
    }


def map_from_jsonable(obj: dict) -> RationalMap:
    try:
        num = Polynomial(tuple(complex(re, im) for re, im in obj["num"]))
        den = Polynomial(tuple(complex(re, im) for re, im in obj["den"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed map object: {exc}") from None
    return normalize(num, den)
