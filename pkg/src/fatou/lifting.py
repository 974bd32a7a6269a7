"""Lifting closed curves through a rational map, with orientation bookkeeping.

A simple closed polyline that stays clear of the critical values has a full
preimage made of disjoint closed curves. The full fiber over each vertex is
continued around the curve by nearest-strand matching; the monodromy
permutation this produces decomposes into cycles, one lift per cycle, whose
covering degree is the cycle length. Signs are relative to a marked point
omega standing in for the distinguished invariant Fatou component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from ._geom import (is_simple, point_polyline_distance, signed_area,
                    winding_number)
from .sphere import SpherePoint, as_sphere
from .ratmap import RationalMap, critical_points, eval_sphere, preimages

MATCH_RATIO = 0.5
MAX_SUBDIVISION = 10
HUGE_FIBER = 1e9


class LiftError(RuntimeError):
    pass


@dataclass(frozen=True)
class OrientedPolyCurve:
    """Closed polyline, implicitly joining the last vertex back to the first."""

    vertices: tuple

    def __post_init__(self):
        vs = tuple(complex(v) for v in self.vertices)
        if len(vs) < 3:
            raise ValueError("need at least three vertices")
        for i, v in enumerate(vs):
            nxt = vs[(i + 1) % len(vs)]
            if abs(v - nxt) == 0.0:
                raise ValueError("coincident consecutive vertices")
        object.__setattr__(self, "vertices", vs)

    def validate_simple(self):
        if not is_simple(self.vertices):
            raise ValueError("polyline is self-intersecting")

    def winding(self, p: complex) -> int:
        return winding_number(self.vertices, p)

    def orientation(self) -> int:
        a = signed_area(self.vertices)
        if a == 0.0:
            raise ValueError("degenerate curve with zero area")
        return 1 if a > 0 else -1

    def distance_to(self, p: complex) -> float:
        return point_polyline_distance(p, self.vertices)

    def reversed(self) -> "OrientedPolyCurve":
        return OrientedPolyCurve(tuple(reversed(self.vertices)))


def circle(center: complex, radius: float, n: int = 64,
           clockwise: bool = False) -> OrientedPolyCurve:
    """Regular polygon approximation of a circle, counterclockwise by default."""
    if radius <= 0 or n < 3:
        raise ValueError("need positive radius and at least three vertices")
    sgn = -1.0 if clockwise else 1.0
    pts = tuple(center + radius * complex(math.cos(sgn * 2 * math.pi * k / n),
                                          math.sin(sgn * 2 * math.pi * k / n))
                for k in range(n))
    return OrientedPolyCurve(pts)


def _omega_winding(curve: OrientedPolyCurve, omega) -> int:
    om = as_sphere(omega)
    if om.is_infinity:
        return 0
    return curve.winding(om.to_complex())


def sign_of(curve: OrientedPolyCurve, omega) -> int:
    """+1 when omega lies on the right of the curve (the outside in the
    left-is-inside convention), -1 when it lies inside.

    Uses the winding number around omega plus the curve's own orientation;
    |winding| > 1 means the curve is not simple and is rejected. omega may be
    the point at infinity, which every closed polyline winds around zero
    times.
    """
    w = _omega_winding(curve, omega)
    if abs(w) > 1:
        raise ValueError(f"malformed curve: winding {w} around the base point")
    o = curve.orientation()
    return o if w == 0 else -o


@dataclass(frozen=True)
class Lift:
    curve: OrientedPolyCurve
    degree: int
    sign: int
    strand: int  # index of the starting strand in the base fiber


@dataclass(frozen=True)
class LiftSet:
    base: OrientedPolyCurve
    base_refined: tuple  # base vertices incl. adaptive subdivision points
    lifts: tuple
    monodromy: tuple  # permutation of the fiber over the first vertex

    @property
    def total_degree(self) -> int:
        return sum(l.degree for l in self.lifts)


class _Ambiguous(Exception):
    pass


def _fiber(f: RationalMap, v: complex) -> list[complex]:
    """The d distinct preimages of v, or raise if the fiber degenerates."""
    pts = preimages(f, v)
    out = []
    for p, m in pts:
        if m != 1:
            raise LiftError(f"degenerate fiber over {v}: multiplicity {m}")
        if p.is_infinity or abs(p.to_complex()) > HUGE_FIBER:
            raise LiftError(f"fiber over {v} reaches infinity")
        out.append(p.to_complex())
    return out


def _match(strands: Sequence[complex], fiber: Sequence[complex]) -> list[complex]:
    """Assign each strand its continuation in the next fiber.

    Nearest neighbor with a ratio test: the best candidate must be at most
    MATCH_RATIO times the distance of the runner-up, and the assignment must
    be a bijection. Anything else raises _Ambiguous.
    """
    chosen = []
    taken = set()
    for s in strands:
        dists = sorted(range(len(fiber)), key=lambda i: abs(fiber[i] - s))
        best = dists[0]
        d_best = abs(fiber[best] - s)
        if len(dists) > 1:
            d_second = abs(fiber[dists[1]] - s)
            if d_best > MATCH_RATIO * d_second:
                raise _Ambiguous(f"ambiguous continuation near {s}")
        if best in taken:
            raise _Ambiguous(f"two strands claim one preimage near {fiber[best]}")
        taken.add(best)
        chosen.append(fiber[best])
    return chosen


def _continue_edge(f: RationalMap, strands: list[complex], va: complex, vb: complex,
                   depth: int, refined: list[complex],
                   chains: list[list[complex]]):
    """Continue all strands across the edge va -> vb, subdividing on ambiguity."""
    fiber = _fiber(f, vb)
    try:
        matched = _match(strands, fiber)
    except _Ambiguous:
        if depth >= MAX_SUBDIVISION:
            raise LiftError(
                f"strand matching stayed ambiguous after {depth} subdivisions "
                f"near {vb}") from None
        vm = 0.5 * (va + vb)
        mid = _continue_edge(f, strands, va, vm, depth + 1, refined, chains)
        return _continue_edge(f, mid, vm, vb, depth + 1, refined, chains)
    refined.append(vb)
    for chain, m in zip(chains, matched):
        chain.append(m)
    return matched


def lift_curve(f: RationalMap, curve: OrientedPolyCurve, omega: complex,
               eps: float = 1e-3) -> LiftSet:
    """All lifts of a closed curve, each with covering degree and sign.

    Preconditions enforced: every vertex keeps chordal distance > eps from
    every critical value, and omega stays off the base curve and off every
    lift. Lifts inherit the parametrization that makes f orientation
    preserving on them, which is automatic for the induced continuation.
    """
    crit_values = [eval_sphere(f, c.point) for c in critical_points(f)]
    for v in curve.vertices:
        vp = as_sphere(v)
        for cv in crit_values:
            if vp.chordal(cv) <= eps:
                raise LiftError(
                    f"vertex {v} within eps of critical value {cv}")
    om = as_sphere(omega)
    if not om.is_infinity:
        oz = om.to_complex()
        if curve.distance_to(oz) < 1e-9 * (1.0 + abs(oz)):
            raise LiftError("omega lies on the base curve")

    verts = list(curve.vertices)
    start_fiber = _fiber(f, verts[0])
    d = f.degree
    refined = [verts[0]]
    chains = [[s] for s in start_fiber]
    strands = list(start_fiber)
    for i in range(len(verts)):
        va = verts[i]
        vb = verts[(i + 1) % len(verts)]
        strands = _continue_edge(f, strands, va, vb, 0, refined, chains)
    # closure: final strands must realign with the start fiber
    perm = []
    for s in strands:
        cands = sorted(range(d), key=lambda i: abs(start_fiber[i] - s))
        if abs(start_fiber[cands[0]] - s) > 1e-6 * (1.0 + abs(s)):
            raise LiftError("monodromy failed to close up")
        perm.append(cands[0])
    if sorted(perm) != list(range(d)):
        raise LiftError("monodromy closure is not a permutation")

    # cycles of the permutation -> lifts
    k = len(refined) - 1  # chain length per loop, excluding the closing vertex
    lifts = []
    seen = set()
    for s0 in range(d):
        if s0 in seen:
            continue
        cycle = [s0]
        nxt = perm[s0]
        while nxt != s0:
            cycle.append(nxt)
            nxt = perm[nxt]
        seen.update(cycle)
        pts: list[complex] = []
        for idx in cycle:
            pts.extend(chains[idx][:k])
        lift_curve_ = OrientedPolyCurve(tuple(pts))
        if not om.is_infinity:
            oz = om.to_complex()
            if lift_curve_.distance_to(oz) < 1e-9 * (1.0 + abs(oz)):
                raise LiftError("omega lies on a lift")
        lifts.append(Lift(lift_curve_, len(cycle), sign_of(lift_curve_, om), s0))
    lifts.sort(key=lambda l: l.strand)
    return LiftSet(curve, tuple(refined[:-1]), tuple(lifts), tuple(perm))


def _probe_vertex(lift: Lift, other: Lift) -> complex:
    """A vertex of `lift` suitable for winding queries against `other`."""
    verts = lift.curve.vertices
    best = max(verts, key=lambda v: other.curve.distance_to(v))
    dist = other.curve.distance_to(best)
    if dist < 1e-9 * (1.0 + abs(best)):
        # nudge toward the centroid of the other curve's complement direction
        centroid = sum(other.curve.vertices) / len(other.curve.vertices)
        direction = (best - centroid) / abs(best - centroid)
        best = best + 10e-9 * direction
        if other.curve.distance_to(best) < 1e-9 * (1.0 + abs(best)):
            raise LiftError("could not separate lifts for the outermost test")
    return best


def outermost_lifts(lift_set: LiftSet, omega) -> list[Lift]:
    """Lifts not separated from omega by any other lift.

    A lift l' separates l from omega when the winding of l' around l differs
    from its winding around omega.
    """
    out = []
    for l in lift_set.lifts:
        separated = False
        for lp in lift_set.lifts:
            if lp is l:
                continue
            probe = _probe_vertex(l, lp)
            if lp.curve.winding(probe) != _omega_winding(lp.curve, omega):
                separated = True
                break
        if not separated:
            out.append(l)
    return out


@dataclass(frozen=True)
class SignStep:
    curve: OrientedPolyCurve
    sign: int
    outermost_count: int
    changed: bool


@dataclass(frozen=True)
class SignSequence:
    base_sign: int
    steps: tuple

    @property
    def signs(self) -> list[int]:
        return [s.sign for s in self.steps]

    @property
    def change_count(self) -> int:
        return sum(1 for s in self.steps if s.changed)


def _default_selector(lifts: Sequence[Lift], omega) -> Lift:
    """Deterministic choice: the outermost lift whose closest vertex to omega
    is farthest away (chordally when omega is at infinity); ties break by
    strand index."""
    om = as_sphere(omega)
    if om.is_infinity:
        def dist(v):
            return om.chordal(as_sphere(v))
    else:
        oz = om.to_complex()

        def dist(v):
            return abs(v - oz)

    def key(l: Lift):
        return (-min(dist(v) for v in l.curve.vertices), l.strand)
    return min(lifts, key=key)


def sign_change_sequence(f: RationalMap, curve: OrientedPolyCurve, omega,
                         n: int = 8, eps: float = 1e-3,
                         selector: Optional[Callable] = None) -> SignSequence:
    """Iterated lifting, recording the sign of a chosen outermost lift at each
    backward step and whether it changed from the previous one."""
    if n < 1:
        raise ValueError("need at least one step")
    omega = as_sphere(omega)
    select = selector or _default_selector
    prev_sign = sign_of(curve, omega)
    base_sign = prev_sign
    steps = []
    current = curve
    for _ in range(n):
        ls = lift_curve(f, current, omega, eps)
        outs = outermost_lifts(ls, omega)
        chosen = select(outs, omega)
        step_sign = chosen.sign
        steps.append(SignStep(chosen.curve, step_sign, len(outs),
                              step_sign != prev_sign))
        prev_sign = step_sign
        current = chosen.curve
    return SignSequence(base_sign, tuple(steps))
