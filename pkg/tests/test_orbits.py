import cmath
import math

import numpy as np

from fatou.catalog import paper_g, pseudo_basilica
from fatou.orbits import (
    critical_portrait,
    cycle_multiplier,
    detect_cycle,
    periodic_points,
)
from fatou.ratmap import Polynomial, normalize
from fatou.sphere import MoebiusTransform, SpherePoint


def _poly(*coeffs):
    # coeffs low to high, denominator 1
    return normalize(Polynomial(tuple(float(c) for c in coeffs)),
                     Polynomial((1.0,)))


def _chebyshev():
    return _poly(-2, 0, 1)  # z^2 - 2


def test_detect_cycle_superattracting_two_cycle():
    # paper-g sends 1 -> 0 -> -2 -> 0, and 0 is critical
    g = paper_g()
    rep = detect_cycle(g, 1.0)
    assert rep is not None
    assert rep.preperiod == 1
    assert rep.period == 2
    got = {p.to_complex() for p in rep.cycle}
    assert all(min(abs(z - w) for w in got) < 1e-8 for z in (0.0, -2.0))
    assert abs(rep.multiplier) < 1e-12
    assert rep.classification == "superattracting"


def test_detect_cycle_repelling_fixed_point():
    f = _chebyshev()
    rep = detect_cycle(f, 0.0)  # 0 -> -2 -> 2 -> 2
    assert rep.preperiod == 2
    assert rep.period == 1
    assert abs(rep.cycle[0].to_complex() - 2.0) < 1e-9
    assert abs(rep.multiplier - 4.0) < 1e-9
    assert rep.classification == "repelling"


def test_detect_cycle_classifications():
    # z + z^2 fixes 0 with multiplier exactly 1
    par = _poly(0, 1, 1)
    rep = detect_cycle(par, 0.0)
    assert rep.period == 1
    assert abs(rep.multiplier - 1.0) < 1e-12
    assert rep.classification == "indifferent"

    # z^2 + 0.1 has an attracting fixed point at (1 - sqrt(0.6)) / 2
    att = _poly(0.1, 0, 1)
    rep = detect_cycle(att, 0.0)
    assert rep.period == 1
    fix = (1.0 - math.sqrt(0.6)) / 2.0
    assert abs(rep.cycle[0].to_complex() - fix) < 1e-7
    assert abs(rep.multiplier - 2.0 * fix) < 1e-6
    assert rep.classification == "attracting"

    rep = detect_cycle(_chebyshev(), SpherePoint.infinity())
    assert rep.period == 1
    assert rep.classification == "superattracting"


def test_detect_cycle_none_cases():
    # rotation number = golden mean: closest return in 512 steps stays
    # far above tol, so no cycle is reported
    theta = (math.sqrt(5.0) - 1.0) / 2.0
    lam = cmath.exp(2j * math.pi * theta)
    f = normalize(Polynomial((0.0, lam, 1.0)), Polynomial((1.0,)))
    assert detect_cycle(f, 0.05) is None

    att = _poly(0.1, 0, 1)
    assert detect_cycle(att, 0.0, max_iter=3) is None


def test_fixed_points_chebyshev():
    # z^2 - z - 2 = (z - 2)(z + 1), plus the fixed point at infinity
    pts = periodic_points(_chebyshev(), 1)
    assert sum(p.multiplicity for p in pts) == 3
    finite = sorted(p.point.to_complex().real for p in pts
                    if not p.point.is_infinity)
    assert np.allclose(finite, [-1.0, 2.0], atol=1e-9)
    assert all(p.minimal_period == 1 for p in pts)


def test_period_two_points_minimal_periods():
    # period-2 polynomial of z^2 - 2 factors through z^2 + z - 1,
    # giving the golden pair (-1 +- sqrt(5)) / 2
    pts = periodic_points(_chebyshev(), 2)
    assert sum(p.multiplicity for p in pts) == 5
    fresh = sorted(p.point.to_complex().real for p in pts
                   if p.minimal_period == 2)
    s5 = math.sqrt(5.0)
    assert np.allclose(fresh, [(-1 - s5) / 2, (-1 + s5) / 2], atol=1e-9)
    fixed = {round(p.point.to_complex().real, 6) for p in pts
             if p.minimal_period == 1 and not p.point.is_infinity}
    assert fixed == {-1.0, 2.0}


def test_fixed_points_embed_in_higher_periods():
    f = paper_g()
    fix = [p.point for p in periodic_points(f, 1)]
    per2 = periodic_points(f, 2)
    for q in fix:
        assert min(q.chordal(p.point) for p in per2) < 1e-8


def test_periodic_count_degree_formula():
    # degree^period + 1 points counted with multiplicity
    for f, period in ((_poly(0, 0, 1), 3), (paper_g(), 1), (paper_g(), 2),
                      (pseudo_basilica(4), 2)):
        pts = periodic_points(f, period)
        assert sum(p.multiplicity for p in pts) == f.degree ** period + 1


def test_parabolic_fixed_point_multiplicity():
    # z + z^2 has a double fixed point at 0
    pts = periodic_points(_poly(0, 1, 1), 1)
    by_mult = {("inf" if p.point.is_infinity
                else round(abs(p.point.to_complex()), 9)): p.multiplicity
               for p in pts}
    assert by_mult == {0.0: 2, "inf": 1}


def test_multiplier_conjugation_invariant():
    f = _chebyshev()
    m = MoebiusTransform(0.0, 1.0, 1.0, 0.0)  # z -> 1/z
    h = f.conjugate_by(m)
    a = detect_cycle(f, 2.0)
    b = detect_cycle(h, 0.5)
    assert a.period == b.period == 1
    assert abs(a.multiplier - b.multiplier) < 1e-8
    assert b.classification == "repelling"


def test_cycle_multiplier_through_infinity():
    # z + 1/z fixes infinity with derivative 1 in the 1/z chart
    flow = normalize(Polynomial((1.0, 0.0, 1.0)), Polynomial((0.0, 1.0)))
    rep = detect_cycle(flow, SpherePoint.infinity())
    assert rep.period == 1
    assert abs(rep.multiplier - 1.0) < 1e-9
    assert rep.classification == "indifferent"

    # 1/z^2 swaps 0 and infinity, both critical
    inv2 = normalize(Polynomial((1.0,)), Polynomial((0.0, 0.0, 1.0)))
    rep = detect_cycle(inv2, 0.0)
    assert rep.period == 2
    assert abs(rep.multiplier) < 1e-12
    assert rep.classification == "superattracting"
    assert abs(cycle_multiplier(inv2, rep.cycle)) < 1e-12


def test_chebyshev_portrait_not_hyperbolic():
    # both critical orbits are finite but the finite one lands on a
    # repelling fixed point, so the map is critically finite and not
    # hyperbolic
    port = critical_portrait(_chebyshev())
    crit = {("inf" if c.point.is_infinity
             else round(abs(c.point.to_complex()), 9)): c.local_degree
            for c in port.critical_points}
    assert crit == {0.0: 2, "inf": 2}
    post = {"inf" if p.is_infinity else round(p.to_complex().real, 6)
            for p in port.postcritical}
    assert post == {-2.0, 2.0, "inf"}
    assert port.critically_finite is True
    assert port.hyperbolic is False
    assert port.all_postcritical_periodic is False
    assert len(port.q_subset) == 1 and port.q_subset[0].is_infinity


def test_paper_g_portrait_flags():
    port = critical_portrait(paper_g())
    assert port.critically_finite is True
    assert port.hyperbolic is True
    assert port.all_postcritical_periodic is True
    # orbits tuple stays aligned with critical_points
    assert len(port.orbits) == len(port.critical_points)
    for c, rep in zip(port.critical_points, port.orbits):
        assert rep is not None
        assert rep.start.chordal(c.point) < 1e-12


def test_portrait_unresolved_orbit_gives_none_flags():
    # Siegel-type map: the finite critical orbit never settles, so the
    # portrait leaves the global flags undecided
    theta = (math.sqrt(5.0) - 1.0) / 2.0
    lam = cmath.exp(2j * math.pi * theta)
    f = normalize(Polynomial((0.0, lam, 1.0)), Polynomial((1.0,)))
    port = critical_portrait(f, max_iter=256)
    assert any(rep is None for rep in port.orbits)
    assert port.critically_finite is None
    assert port.hyperbolic is None


def test_random_conjugation_preserves_multiplier():
    rng = np.random.default_rng(44)
    f = paper_g()
    base = detect_cycle(f, 1.0)
    for _ in range(10):
        a, b, c, d = rng.normal(size=4) + 1j * rng.normal(size=4)
        if abs(a * d - b * c) < 1e-2:
            continue
        m = MoebiusTransform(a, b, c, d)
        h = f.conjugate_by(m)
        rep = detect_cycle(h, m.apply(SpherePoint(1.0, 1.0)))
        assert rep is not None
        assert rep.period == base.period
        assert abs(rep.multiplier - base.multiplier) < 1e-6
