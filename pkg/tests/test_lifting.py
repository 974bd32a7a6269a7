import math

import pytest

from fatou.catalog import paper_g
from fatou.lifting import (
    Lift,
    LiftError,
    LiftSet,
    OrientedPolyCurve,
    circle,
    lift_curve,
    outermost_lifts,
    point_polyline_distance,
    sign_change_sequence,
    sign_of,
    signed_area,
    winding_number,
)
from fatou.ratmap import Polynomial, eval_sphere, normalize
from fatou.sphere import SpherePoint


def _square_map():
    return normalize(Polynomial((0.0, 0.0, 1.0)), Polynomial((1.0,)))


def test_winding_number_hand_cases():
    square = (0j, 1 + 0j, 1 + 1j, 1j)
    assert winding_number(square, 0.5 + 0.5j) == 1
    assert winding_number(square, 2 + 0.5j) == 0
    assert winding_number(tuple(reversed(square)), 0.5 + 0.5j) == -1
    # pentagram: five vertices stepping by 4 pi / 5 wind twice
    import cmath
    star = tuple(cmath.exp(4j * math.pi * k / 5) for k in range(5))
    assert winding_number(star, 0j) == 2


def test_signed_area_and_orientation():
    cc = circle(0.0, 1.0, n=64)
    # regular 64-gon area, not quite pi
    assert abs(signed_area(cc.vertices) - 32 * math.sin(math.pi / 32)) < 1e-12
    assert cc.orientation() == 1
    assert circle(0.0, 1.0, clockwise=True).orientation() == -1
    flat = OrientedPolyCurve((0j, 1 + 0j, 2 + 0j))
    with pytest.raises(ValueError):
        flat.orientation()


def test_point_polyline_distance():
    square = (0j, 1 + 0j, 1 + 1j, 1j)
    assert abs(point_polyline_distance(0.5 + 0.5j, square) - 0.5) < 1e-12
    assert abs(point_polyline_distance(2 + 0.5j, square) - 1.0) < 1e-12
    # the open chain drops the closing edge along x = 0
    p = -0.2 + 0.5j
    assert abs(point_polyline_distance(p, square, closed=True) - 0.2) < 1e-12
    open_d = point_polyline_distance(p, square, closed=False)
    assert abs(open_d - math.hypot(0.2, 0.5)) < 1e-12


def test_curve_validation():
    with pytest.raises(ValueError):
        OrientedPolyCurve((0j, 1 + 0j))
    with pytest.raises(ValueError):
        OrientedPolyCurve((0j, 0j, 1 + 0j, 1j))
    bowtie = OrientedPolyCurve((0j, 1 + 1j, 1 + 0j, 1j))
    with pytest.raises(ValueError):
        bowtie.validate_simple()
    circle(0.0, 1.0).validate_simple()


def test_circle_helper():
    c = circle(2.0 + 1j, 0.5, n=48)
    assert len(c.vertices) == 48
    assert all(abs(abs(v - (2 + 1j)) - 0.5) < 1e-12 for v in c.vertices)
    assert c.winding(2.0 + 1j) == 1
    assert circle(2.0 + 1j, 0.5, clockwise=True).winding(2.0 + 1j) == -1


def test_sign_convention():
    cc = circle(0.0, 1.0)
    cw = circle(0.0, 1.0, clockwise=True)
    assert sign_of(cc, 5.0) == 1
    assert sign_of(cc, 0.0) == -1
    assert sign_of(cw, 5.0) == -1
    assert sign_of(cw, 0.0) == 1
    # the point at infinity is outside every closed polyline
    assert sign_of(cc, SpherePoint.infinity()) == 1
    assert sign_of(cw, SpherePoint.infinity()) == -1


def test_lift_through_critical_value_is_connected():
    # |w| = 4 encloses the critical value 0 of z -> z^2, so its preimage
    # is the circle |z| = 2 covered once while the base is covered twice
    f = _square_map()
    ls = lift_curve(f, circle(0.0, 4.0), omega=1e9)
    assert len(ls.lifts) == 1
    lift = ls.lifts[0]
    assert lift.degree == 2
    assert lift.sign == 1
    assert ls.monodromy == (1, 0)
    assert all(abs(abs(v) - 2.0) < 1e-9 for v in lift.curve.vertices)
    assert lift.curve.winding(0.0) == 1


def test_lift_away_from_critical_values_splits():
    f = _square_map()
    ls = lift_curve(f, circle(5.0, 1.0), omega=1e9)
    assert sorted(l.degree for l in ls.lifts) == [1, 1]
    assert ls.monodromy == (0, 1)
    s5 = math.sqrt(5.0)
    centers = sorted((sum(l.curve.vertices) / len(l.curve.vertices)).real
                     for l in ls.lifts)
    assert abs(centers[0] + s5) < 1e-6 and abs(centers[1] - s5) < 1e-6
    # components are unnested
    assert ls.lifts[0].curve.winding(centers[1] + 0j) == 0
    assert ls.lifts[1].curve.winding(centers[0] + 0j) == 0


def test_lift_degrees_paper_g():
    g = paper_g()
    ls = lift_curve(g, circle(-2.0, 0.1), omega=1e6)
    assert [l.degree for l in ls.lifts] == [3]
    assert ls.monodromy == (1, 2, 0)
    assert ls.lifts[0].curve.winding(0.0) == 1

    ls0 = lift_curve(g, circle(0.0, 0.1), omega=1e6)
    degs = sorted((l.degree, l.curve.winding(-2.0), l.curve.winding(1.0))
                  for l in ls0.lifts)
    assert degs == [(1, 1, 0), (2, 0, 1)]
    assert ls0.monodromy == (0, 2, 1)
    assert sum(l.degree for l in ls0.lifts) == g.degree


def test_lifts_map_back_onto_the_base():
    g = paper_g()
    ls = lift_curve(g, circle(0.0, 0.1), omega=1e6)
    base = ls.base_refined
    for lift in ls.lifts:
        for v in lift.curve.vertices:
            w = eval_sphere(g, SpherePoint(v, 1.0)).to_complex()
            assert point_polyline_distance(w, base) < 1e-9


def test_lift_rejects_curve_near_critical_value():
    f = _square_map()
    with pytest.raises(LiftError):
        lift_curve(f, circle(0.0, 1e-9), omega=1e9)
    with pytest.raises(LiftError):
        lift_curve(paper_g(), circle(-2.0, 1e-4), omega=1e6)


def test_outermost_filtering_is_relative_to_omega():
    outer = circle(0.0, 2.0)
    inner = circle(0.0, 1.0)
    ls = LiftSet(base=circle(0.0, 4.0), base_refined=circle(0.0, 4.0),
                 lifts=(Lift(outer, 1, 1, 0), Lift(inner, 1, 1, 1)),
                 monodromy=(0, 1))
    assert [l.strand for l in outermost_lifts(ls, 1e6)] == [0]
    assert [l.strand for l in outermost_lifts(ls, 0.0)] == [1]
    assert [l.strand for l in outermost_lifts(ls, SpherePoint.infinity())] == [0]


def test_sign_sequence_omega_in_unbounded_basin():
    g = paper_g()
    seq = sign_change_sequence(g, circle(-2.0, 0.1), 1e6, n=3)
    assert seq.base_sign == 1
    assert [s.sign for s in seq.steps] == [1, 1, 1]
    assert [s.changed for s in seq.steps] == [False, False, False]
    assert [s.outermost_count for s in seq.steps] == [1, 2, 1]


def test_sign_sequence_omega_inside():
    # when omega sits in the bounded complement the first pull-back
    # already flips the sign
    g = paper_g()
    seq = sign_change_sequence(g, circle(-2.0, 0.1), 0.0, n=2)
    assert seq.base_sign == 1
    assert [s.sign for s in seq.steps] == [-1, 1]
    assert [s.changed for s in seq.steps] == [True, True]


def test_lift_determinism():
    g = paper_g()
    a = lift_curve(g, circle(0.0, 0.1), omega=1e6)
    b = lift_curve(g, circle(0.0, 0.1), omega=1e6)
    assert a.monodromy == b.monodromy
    assert len(a.lifts) == len(b.lifts)
    for la, lb in zip(a.lifts, b.lifts):
        assert la.curve.vertices == lb.curve.vertices
        assert (la.degree, la.sign, la.strand) == (lb.degree, lb.sign, lb.strand)
