"""Forward orbits, cycle classification, critical portraits, periodic points."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .sphere import (MoebiusTransform, Polynomial, SpherePoint, as_sphere,
                     poly_roots)
from .ratmap import (RationalMap, CriticalPoint, compose_self, critical_points,
                     eval_sphere)

SUPER_TOL = 1e-8
INDIFFERENT_BAND = 1e-6
CYCLE_WINDOW = 64


@dataclass(frozen=True)
class CycleReport:
    """Eventually periodic orbit data for one starting point."""

    start: SpherePoint
    preperiod: int
    period: int
    cycle: tuple  # tuple[SpherePoint, ...]
    multiplier: complex
    classification: str  # superattracting | attracting | indifferent | repelling


@dataclass(frozen=True)
class CriticalPortrait:
    critical_points: tuple  # tuple[CriticalPoint, ...]
    orbits: tuple  # tuple[Optional[CycleReport], ...], aligned with critical_points
    postcritical: tuple  # tuple[SpherePoint, ...], strict forward orbit closure
    q_subset: tuple  # postcritical points feeding cycles that contain a critical point
    critically_finite: Optional[bool]
    hyperbolic: Optional[bool]
    all_postcritical_periodic: Optional[bool]


@dataclass(frozen=True)
class PeriodicPoint:
    point: SpherePoint
    multiplicity: int
    minimal_period: int


def _classify(multiplier: complex) -> str:
    m = abs(multiplier)
    if m < SUPER_TOL:
        return "superattracting"
    if m < 1.0 - INDIFFERENT_BAND:
        return "attracting"
    if m <= 1.0 + INDIFFERENT_BAND:
        return "indifferent"
    return "repelling"


def cycle_multiplier(f: RationalMap, cycle) -> complex:
    """Chain-rule multiplier; conjugates the cycle into moderate coordinates
    first so the plain-chart derivative formula applies."""
    pts = [as_sphere(p) for p in cycle]
    needs_move = any(p.is_infinity or abs(p.to_complex()) > 1e6 for p in pts)
    if needs_move:
        finite = [p.to_complex() for p in pts if not p.is_infinity]
        for a in (0.3178, -1.7071, 2.4142, -0.5774, 1.1447):
            if all(abs(z - a) > 1e-3 for z in finite):
                break
        else:
            raise ArithmeticError("could not find a pivot for the cycle chart")
        m = MoebiusTransform(0.0, 1.0, 1.0, -a)  # z -> 1/(z - a)
        g = f.conjugate_by(m)
        moved = [m.apply(p) for p in pts]
        return cycle_multiplier(g, moved)
    lam = 1.0 + 0j
    for p in pts:
        lam *= f.derivative(p.to_complex())
    return lam


def detect_cycle(f: RationalMap, start, tol: float = 1e-9,
                 max_iter: int = 512) -> Optional[CycleReport]:
    """Find the eventually periodic structure of an orbit, or None if the
    orbit shows no revisit within max_iter (expected for Julia set starts)."""
    x = as_sphere(start)
    orbit = [x]
    period = 0
    for _ in range(max_iter):
        x = eval_sphere(f, x)
        k = len(orbit)
        lo = max(0, k - CYCLE_WINDOW)
        for j in range(k - 1, lo - 1, -1):
            if x.chordal(orbit[j]) < tol:
                period = k - j
                break
        orbit.append(x)
        if period:
            break
    if not period:
        return None
    preperiod = 0
    while orbit[preperiod].chordal(orbit[preperiod + period]) >= tol:
        preperiod += 1
    cycle = tuple(orbit[preperiod:preperiod + period])
    lam = cycle_multiplier(f, cycle)
    return CycleReport(orbit[0], preperiod, period, cycle, lam, _classify(lam))


def _dedupe(points, tol: float = 1e-9):
    out = []
    for p in points:
        if not any(p.chordal(q) < tol for q in out):
            out.append(p)
    return out


def critical_portrait(f: RationalMap, tol: float = 1e-9,
                      max_iter: int = 512) -> CriticalPortrait:
    """Orbit data for every critical point plus the derived finiteness flags.

    Flags are tri-state: None when some orbit stayed unresolved, so absence
    of evidence is reported as unknown rather than false.
    """
    crits = critical_points(f)
    reports = [detect_cycle(f, c.point, tol, max_iter) for c in crits]
    unresolved = any(r is None for r in reports)

    post: list[SpherePoint] = []
    for c, rep in zip(crits, reports):
        if rep is None:
            # best effort: a bounded chunk of the orbit is still postcritical
            x = c.point
            for _ in range(CYCLE_WINDOW):
                x = eval_sphere(f, x)
                post.append(x)
            continue
        x = c.point
        for _ in range(rep.preperiod + rep.period):
            x = eval_sphere(f, x)
            post.append(x)
    post = _dedupe(post, tol)

    crit_pts = [c.point for c in crits]

    def cycle_contains_critical(cycle) -> bool:
        return any(any(p.chordal(c) < tol for c in crit_pts) for p in cycle)

    q_subset: list[SpherePoint] = []
    all_periodic: Optional[bool] = True
    if unresolved:
        critically_finite = None
        hyperbolic = None
        all_periodic = None
    else:
        critically_finite = True
        hyperbolic = all(cycle_contains_critical(r.cycle) for r in reports)
        for p in post:
            rep = detect_cycle(f, p, tol, max_iter)
            if rep is None:
                all_periodic = None
                continue
            if rep.preperiod > 0:
                all_periodic = False
            if cycle_contains_critical(rep.cycle):
                q_subset.append(p)

    return CriticalPortrait(
        critical_points=tuple(crits),
        orbits=tuple(reports),
        postcritical=tuple(post),
        q_subset=tuple(q_subset),
        critically_finite=critically_finite,
        hyperbolic=hyperbolic,
        all_postcritical_periodic=all_periodic,
    )


def periodic_points(f: RationalMap, period: int,
                    tol: float = 1e-9) -> list[PeriodicPoint]:
    """All fixed points of f^period, counted with multiplicity.

    There are degree^period + 1 of them on the sphere. Points whose true
    period strictly divides the requested one are kept, annotated with their
    minimal period.
    """
    if period < 1:
        raise ValueError("period must be >= 1")
    fp = compose_self(f, period)
    num, den = fp.num, fp.den
    dp = f.degree ** period
    phi = (num - Polynomial((0.0, 1.0)) * den).trimmed(1e-12)
    out: list[PeriodicPoint] = []
    pts: list[tuple[SpherePoint, int]] = []
    if phi.degree >= 1:
        for r, m in poly_roots(phi):
            pts.append((SpherePoint.of(r), m))
    elif phi.is_zero:
        raise ArithmeticError("iterate equals identity; not a degree >= 2 map")
    inf_mult = (dp + 1) - sum(m for _, m in pts)
    if inf_mult > 0:
        pts.append((SpherePoint.infinity(), inf_mult))
    for p, m in pts:
        minimal = period
        x = p
        for q in range(1, period):
            x = eval_sphere(f, x)
            if period % q == 0 and x.chordal(p) < math.sqrt(tol):
                minimal = q
                break
        out.append(PeriodicPoint(p, m, minimal))
    assert sum(pp.multiplicity for pp in out) == dp + 1
    return out
