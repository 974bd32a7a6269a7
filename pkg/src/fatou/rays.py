"""Backward-iterated rays in a superattracting basin, co-landing, separation.

In the basin of a superattracting fixed point of local degree m the map is
conjugate to zeta -> zeta^m; rays are preimages of radial lines under that
conjugacy. Tracing runs backward: the sample of the angle-t ray at potential
rho^(1/m) is the preimage of the sample of the angle-mt ray at potential rho,
picked by continuity. Angle arithmetic is exact on rationals, so the angle
orbit under multiplication by m is finite and the whole orbit is traced
jointly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ._geom import point_polyline_distance, winding_number
from .sphere import MoebiusTransform, SpherePoint, as_sphere
from .ratmap import RationalMap, critical_points, eval_sphere, preimages

DEFAULT_R0 = 100.0
DEFAULT_DEPTH = 96
LANDING_TOL = 1e-6
LANDING_WINDOW = 8  # potential shells inspected for contraction
_LIN_GUIDE_MIN = 4.0  # potential above which the linearized coordinate guides
_MAX_SUBLEVELS = 64


class RayTraceError(RuntimeError):
    pass


class RayLandingError(RayTraceError):
    pass


@dataclass(frozen=True)
class RayAngle:
    """Angle t in [0, 1) as an exact fraction of full turns."""

    numerator: int
    denominator: int

    def __post_init__(self):
        fr = Fraction(self.numerator, self.denominator)
        fr -= math.floor(fr)
        object.__setattr__(self, "numerator", fr.numerator)
        object.__setattr__(self, "denominator", fr.denominator)

    @classmethod
    def parse(cls, text: str) -> "RayAngle":
        """Exact fraction strings only ('1/3', '0'); decimals are rejected."""
        s = text.strip()
        if "/" in s:
            a, b = s.split("/", 1)
            return cls(int(a), int(b))
        return cls(int(s), 1)

    def times(self, m: int) -> "RayAngle":
        return RayAngle(self.numerator * m, self.denominator)

    def value(self) -> float:
        return self.numerator / self.denominator

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"


@dataclass(frozen=True)
class RayTrace:
    angle: RayAngle
    samples: tuple  # complex, ordered by decreasing potential
    potentials: tuple  # float, same order
    landed: bool
    landing: Optional[complex]
    residual: float
    sublevels: int  # potential steps inserted per doubling level


class _Ambiguous(Exception):
    pass


def _local_degree_at(f: RationalMap, b: SpherePoint) -> int:
    for c in critical_points(f):
        if c.point.chordal(b) < 1e-8:
            return c.local_degree
    raise ValueError("basin point is not a critical point of the map")


def _check_superattracting_fixed(f: RationalMap, b: SpherePoint) -> int:
    if eval_sphere(f, b).chordal(b) > 1e-9:
        raise ValueError("basin point is not fixed")
    m = _local_degree_at(f, b)
    if m < 2:
        raise ValueError("basin point is not superattracting")
    return m


def _leading_data(f: RationalMap, m: int) -> tuple[complex, complex]:
    """(a, shift) of the asymptotic conjugacy psi(z) ~ a (z + shift) at
    infinity, where f(z) = c z^m (1 + c1/z + ...) and a^(m-1) = c.

    The principal root keeps the positive real axis fixed when c > 0, which
    pins the t = 0 ray along the positive reals.
    """
    p, q = f.num.degree, f.den.degree
    if p - q != m:
        raise ValueError("map does not have a superattracting pole of that degree")
    c = f.num.coeffs[-1] / f.den.coeffs[-1]
    a = cmath.exp(cmath.log(c) / (m - 1))
    alpha = f.num.coeffs[-2] / f.num.coeffs[-1] if p >= 1 else 0j
    beta = f.den.coeffs[-2] / f.den.coeffs[-1] if q >= 1 else 0j
    c1 = alpha - beta
    return a, c1 / m


def _orbit_angles(angles, m: int) -> list[RayAngle]:
    seen: dict[tuple[int, int], RayAngle] = {}
    stack = list(angles)
    while stack:
        t = stack.pop()
        key = (t.numerator, t.denominator)
        if key in seen:
            continue
        seen[key] = t
        stack.append(t.times(m))
    return list(seen.values())


def _trace_at_infinity(f: RationalMap, m: int, angles, depth: int, r0: float,
                       sublevels: int, landing_tol: float) -> dict:
    a, shift = _leading_data(f, m)
    orbit = _orbit_angles(angles, m)
    step = (1.0 / m) ** (1.0 / sublevels)
    n_levels = depth * sublevels

    def potential(q: int) -> float:
        return r0 ** (step ** q)

    def lin_inverse(rho: float, t: RayAngle) -> complex:
        psi = rho * cmath.exp(2j * math.pi * t.value())
        return psi / a - shift

    samples = {(t.numerator, t.denominator): [] for t in orbit}
    for t in orbit:
        key = (t.numerator, t.denominator)
        for q in range(sublevels):
            samples[key].append(lin_inverse(potential(q), t))

    for q in range(sublevels, n_levels + 1):
        rho = potential(q)
        for t in orbit:
            key = (t.numerator, t.denominator)
            chain = samples[key]
            target = samples[(t.times(m).numerator, t.times(m).denominator)][q - sublevels]
            if rho >= _LIN_GUIDE_MIN:
                guide = lin_inverse(rho, t)
            elif len(chain) >= 2:
                guide = 2.0 * chain[-1] - chain[-2]
            else:
                guide = chain[-1]
            cands = []
            for p, mult in preimages(f, target):
                if p.is_infinity:
                    continue
                cands.extend([p.to_complex()] * mult)
            if not cands:
                raise RayTraceError("empty finite fiber while tracing")
            cands.sort(key=lambda z: abs(z - guide))
            best = cands[0]
            if len(cands) > 1:
                d_best = abs(best - guide)
                d_second = abs(cands[1] - guide)
                if d_best > 0.5 * d_second and d_best > 1e-12:
                    raise _Ambiguous
            chain.append(best)

    out = {}
    window = LANDING_WINDOW * sublevels + 1
    for t in orbit:
        key = (t.numerator, t.denominator)
        chain = samples[key]
        tail = chain[-window:]
        diam = max(abs(x - y) for x in tail for y in tail)
        landed = diam < landing_tol
        out[key] = RayTrace(
            angle=t,
            samples=tuple(chain),
            potentials=tuple(potential(q) for q in range(len(chain))),
            landed=landed,
            landing=chain[-1] if landed else None,
            residual=diam,
            sublevels=sublevels,
        )
    return out


def trace_orbit(f: RationalMap, basin_fixed_point, angles, depth: int = DEFAULT_DEPTH,
                r0: float = DEFAULT_R0, landing_tol: float = LANDING_TOL) -> dict:
    """Traces of every ray in the forward angle orbit of the given angles.

    Keys of the returned dict are RayAngle instances. Raises RayTraceError
    when branch continuation stays ambiguous at the finest potential
    subdivision.
    """
    b = as_sphere(basin_fixed_point)
    m = _check_superattracting_fixed(f, b)
    if r0 < 10.0:
        raise ValueError("starting potential too small for the linearized seed")
    angles = [t if isinstance(t, RayAngle) else RayAngle.parse(str(t)) for t in angles]

    if b.is_infinity:
        work, back = f, None
    else:
        z0 = b.to_complex()
        mo = MoebiusTransform(0.0, 1.0, 1.0, -z0)  # z -> 1/(z - z0)
        work, back = f.conjugate_by(mo), z0

    sub = 1
    while True:
        try:
            traces = _trace_at_infinity(work, m, angles, depth, r0, sub, landing_tol)
            break
        except _Ambiguous:
            sub *= 2
            if sub > _MAX_SUBLEVELS:
                raise RayTraceError(
                    "branch continuation ambiguous at the finest subdivision")

    if back is not None:
        def pull(tr: RayTrace) -> RayTrace:
            pts = tuple(back + 1.0 / u for u in tr.samples)
            landing = back + 1.0 / tr.landing if tr.landed else None
            tail = pts[-(LANDING_WINDOW * tr.sublevels + 1):]
            diam = max(abs(x - y) for x in tail for y in tail)
            return RayTrace(tr.angle, pts, tr.potentials, tr.landed, landing,
                            diam, tr.sublevels)
        traces = {k: pull(tr) for k, tr in traces.items()}
    return {RayAngle(*k): tr for k, tr in traces.items()}


def trace_ray(f: RationalMap, basin_fixed_point, t, depth: int = DEFAULT_DEPTH,
              r0: float = DEFAULT_R0, landing_tol: float = LANDING_TOL) -> RayTrace:
    """Trace one ray; see trace_orbit for the mechanics."""
    t = t if isinstance(t, RayAngle) else RayAngle.parse(str(t))
    return trace_orbit(f, basin_fixed_point, [t], depth, r0, landing_tol)[t]


def coland(f: RationalMap, basin_fixed_point, t1, t2, tol: float = LANDING_TOL,
           depth: int = DEFAULT_DEPTH, r0: float = DEFAULT_R0) -> bool:
    """Whether the two rays land at the same point (within tol).

    Raises RayLandingError if either ray fails to land; an unlanded ray is
    never reported as not co-landing.
    """
    t1 = t1 if isinstance(t1, RayAngle) else RayAngle.parse(str(t1))
    t2 = t2 if isinstance(t2, RayAngle) else RayAngle.parse(str(t2))
    traces = trace_orbit(f, basin_fixed_point, [t1, t2], depth, r0, tol)
    tr1, tr2 = traces[t1], traces[t2]
    for tr in (tr1, tr2):
        if not tr.landed:
            raise RayLandingError(
                f"ray {tr.angle} did not land (residual {tr.residual:.3g})")
    return abs(tr1.landing - tr2.landing) < tol


def separation_test(f: RationalMap, basin_fixed_point, t1, t2, a: complex,
                    b: complex, depth: int = DEFAULT_DEPTH, r0: float = DEFAULT_R0,
                    landing_tol: float = LANDING_TOL) -> bool:
    """Whether the closed curve R_t1 + landing + R_t2, closed up across the
    basin's fixed point, separates a from b. Decided by winding parity.

    Preconditions: both rays land at a common point; neither a nor b sits on
    the curve (within a relative 1e-9).
    """
    t1 = t1 if isinstance(t1, RayAngle) else RayAngle.parse(str(t1))
    t2 = t2 if isinstance(t2, RayAngle) else RayAngle.parse(str(t2))
    a, b = complex(a), complex(b)
    traces = trace_orbit(f, basin_fixed_point, [t1, t2], depth, r0, landing_tol)
    tr1, tr2 = traces[t1], traces[t2]
    for tr in (tr1, tr2):
        if not tr.landed:
            raise RayLandingError(f"ray {tr.angle} did not land")
    gap = abs(tr1.landing - tr2.landing)
    if gap > landing_tol:
        raise RayLandingError(f"rays do not co-land (gap {gap:.3g})")
    joint = 0.5 * (tr1.landing + tr2.landing)

    if not as_sphere(basin_fixed_point).is_infinity:
        raise NotImplementedError("separation closure only implemented across infinity")

    tip1, tip2 = tr1.samples[0], tr2.samples[0]
    r_close = 1e6 * max(1.0, abs(a), abs(b))
    th1, th2 = cmath.phase(tip1), cmath.phase(tip2)
    dth = (th2 - th1) % (2.0 * math.pi)
    if dth > math.pi:
        dth -= 2.0 * math.pi  # shorter way around
    arc = [r_close * cmath.exp(1j * (th1 + dth * k / 64)) for k in range(65)]

    # In along R_t1 from its far tip to the landing, back out along R_t2,
    # radially to the far circle, across the short arc, radially back in.
    verts = [complex(s) for s in tr1.samples] + [joint]
    verts += [complex(s) for s in reversed(tr2.samples)]
    verts.append(tip2 / abs(tip2) * r_close)
    verts += [arc[k] for k in range(64, -1, -1)]
    verts.append(tip1 / abs(tip1) * r_close)

    for name, pt in (("a", a), ("b", b)):
        if point_polyline_distance(pt, verts) < 1e-9 * (1.0 + abs(pt)):
            raise ValueError(f"point {name} lies on the separation curve")
    wa = winding_number(verts, a)
    wb = winding_number(verts, b)
    return (wa - wb) % 2 == 1
