"""Rational maps: normalization, charts, critical structure, fibers."""

import numpy as np
import pytest

from fatou.catalog import paper_g, pseudo_basilica
from fatou.ratmap import (RationalMap, compose_self, critical_points,
                          eval_sphere, from_coeffs, iterate, map_from_jsonable,
                          map_to_jsonable, normalize, preimages)
from fatou.sphere import SpherePoint, as_sphere, poly


def _crit_summary(f):
    out = set()
    for c in critical_points(f):
        key = "inf" if c.point.is_infinity else complex(round(c.point.to_complex().real, 9),
                                                        round(c.point.to_complex().imag, 9))
        out.add((key, c.local_degree))
    return out


def test_normalize_cancels_common_roots():
    # (z^2 - 1)/(z - 1) is the degree-1 map z + 1 and gets rejected
    with pytest.raises(ValueError):
        normalize(poly(-1.0, 0.0, 1.0), poly(-1.0, 1.0))


def test_normalize_keeps_coprime_pair():
    f = normalize(poly(2.0, -3.0, 0.0, 1.0), poly(-1.0, 1.5))
    assert f.degree == 3
    # cancellation keeps the map's values
    g = normalize(poly(2.0, -3.0, 0.0, 1.0) * poly(1.0, 1.0),
                  poly(-1.0, 1.5) * poly(1.0, 1.0))
    rng = np.random.default_rng(7)
    for _ in range(10):
        z = complex(rng.normal(), rng.normal())
        a = eval_sphere(f, as_sphere(z))
        b = eval_sphere(g, as_sphere(z))
        assert a.chordal(b) < 1e-8


def test_normalize_rejects_zero_denominator():
    with pytest.raises(ValueError):
        normalize(poly(1.0, 1.0, 1.0), poly(0.0))


def test_eval_special_points():
    g = paper_g()
    assert eval_sphere(g, as_sphere(0.0)).to_complex() == pytest.approx(-2.0)
    assert eval_sphere(g, SpherePoint.infinity()).is_infinity
    # pole of the denominator 1.5z - 1
    assert eval_sphere(g, as_sphere(2.0 / 3.0)).is_infinity
    assert eval_sphere(g, as_sphere(1.0)).chordal(as_sphere(0.0)) < 1e-15


def test_eval_chart_consistency():
    g = paper_g()
    rng = np.random.default_rng(3)
    for _ in range(50):
        z = complex(rng.normal(), rng.normal()) * 10.0 ** rng.integers(-2, 3)
        x = as_sphere(z)
        direct = eval_sphere(g, x)
        # same point entered through the far chart representation
        flipped = SpherePoint(1.0, 1.0 / z)
        assert direct.chordal(eval_sphere(g, flipped)) < 1e-9


def test_critical_points_square():
    f = from_coeffs([0.0, 0.0, 1.0], [1.0])
    assert _crit_summary(f) == {(0j, 2), ("inf", 2)}


def test_critical_points_cubic_map():
    assert _crit_summary(paper_g()) == {(0j, 3), (1 + 0j, 2), ("inf", 2)}


def test_critical_points_quartic_map():
    assert _crit_summary(pseudo_basilica(4)) == {(0j, 4), (1 + 0j, 3), ("inf", 2)}


def test_critical_points_multiple_pole():
    # (z^3 + 1)/z^2 has a double pole at 0; the branching count must close
    f = from_coeffs([1.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0])
    total = sum(c.local_degree - 1 for c in critical_points(f))
    assert total == 2 * f.degree - 2


def test_riemann_hurwitz_random_maps():
    rng = np.random.default_rng(12)
    built = 0
    while built < 50:
        d = int(rng.integers(2, 6))
        dn = int(rng.integers(0, d + 1))
        dd = d if dn < d else int(rng.integers(0, d + 1))
        if max(dn, dd) < 2:
            continue
        num = rng.normal(size=dn + 1) + 1j * rng.normal(size=dn + 1)
        den = rng.normal(size=dd + 1) + 1j * rng.normal(size=dd + 1)
        try:
            f = normalize(poly(*num), poly(*den))
        except (ValueError, ArithmeticError):
            continue
        built += 1
        crit = critical_points(f)
        assert sum(c.local_degree - 1 for c in crit) == 2 * f.degree - 2
        assert all(c.local_degree >= 2 for c in crit)


def test_preimages_square_map():
    f = from_coeffs([0.0, 0.0, 1.0], [1.0])
    pre = preimages(f, as_sphere(4.0))
    got = sorted(p.to_complex().real for p, _ in pre)
    assert got == pytest.approx([-2.0, 2.0])


def test_preimages_of_cycle_points():
    g = paper_g()
    pre0 = sorted(((p.to_complex(), m) for p, m in preimages(g, as_sphere(0.0))),
                  key=lambda t: t[0].real)
    assert [(round(z.real, 9), m) for z, m in pre0] == [(-2.0, 1), (1.0, 2)]
    prem2 = preimages(g, as_sphere(-2.0))
    assert len(prem2) == 1
    p, m = prem2[0]
    assert m == 3 and abs(p.to_complex()) < 1e-9


def test_preimages_fiber_property():
    g = paper_g()
    rng = np.random.default_rng(31)
    for _ in range(20):
        v = as_sphere(complex(rng.normal(), rng.normal()))
        fiber = preimages(g, v)
        assert sum(m for _, m in fiber) == g.degree
        for p, _ in fiber:
            assert eval_sphere(g, p).chordal(v) < 1e-7


def test_preimages_at_infinity():
    g = paper_g()
    fiber = preimages(g, SpherePoint.infinity())
    # pole 2/3 simple, infinity double (deg num - deg den = 2)
    flat = {(("inf" if p.is_infinity else round(p.to_complex().real, 9)), m)
            for p, m in fiber}
    assert flat == {(0.666666667, 1), ("inf", 2)}


def test_iterate_matches_composition():
    g = paper_g()
    g2 = compose_self(g, 2)
    assert g2.degree == 9
    rng = np.random.default_rng(8)
    for _ in range(10):
        z = as_sphere(complex(rng.normal(), rng.normal()))
        a = iterate(g, z, 2)
        b = eval_sphere(g2, z)
        assert a.chordal(b) < 1e-7


def test_iterate_orbit_of_one():
    g = paper_g()
    x = as_sphere(1.0)
    orbit = [iterate(g, x, n) for n in range(4)]
    vals = [("inf" if p.is_infinity else round(p.to_complex().real, 9)) for p in orbit]
    assert vals == [1.0, 0.0, -2.0, 0.0]


def test_iterate_power_of_two():
    f = from_coeffs([0.0, 0.0, 1.0], [1.0])
    assert iterate(f, as_sphere(2.0), 3).to_complex() == pytest.approx(256.0)


def test_compose_self_degree_bound():
    g = paper_g()
    with pytest.raises(ValueError):
        compose_self(g, 9)  # 3^9 > 4096


def test_json_round_trip():
    g = paper_g()
    j = map_to_jsonable(g)
    h = map_from_jsonable(j)
    assert h.num.coeffs == g.num.coeffs
    assert h.den.coeffs == g.den.coeffs


def test_conjugate_by_inversion_moves_infinity():
    from fatou.sphere import MoebiusTransform
    g = paper_g().conjugate_by(MoebiusTransform.inversion())
    # infinity had local degree 2; now 0 does
    summary = dict(_crit_summary(g))
    assert summary[0j] == 2
    assert sum(ld - 1 for ld in summary.values()) == 2 * g.degree - 2
