import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, settings, strategies as st

from cuspfield.errors import CoincidentPoints, DegenerateLabel, NegativeDistance
from cuspfield.geometry import (
    INF,
    complex_distance,
    corner_labels,
    cross_ratio,
    develop_region,
    mobius,
    region_shapes,
    shape_by_cross_ratio,
    shape_parameter,
    valid_corners,
)
from cuspfield.tt_system import LabelSystem

import helpers


def test_complex_distance_examples():
    cd = complex_distance(1)
    assert cd.d == 0 and cd.theta == 0
    with mpmath.workprec(128):
        cd = complex_distance(mpmath.exp(-2), 128)
        assert abs(cd.d - 2) < 1e-35 and cd.theta == 0
        cd = complex_distance(-mpmath.exp(-1), 128)
        assert abs(cd.d - 1) < 1e-35 and abs(cd.theta - mpmath.pi) < 1e-35


def test_complex_distance_branch_and_errors():
    # the negative real axis approached from below still gives theta = pi
    with mpmath.workprec(128):
        cd = complex_distance(mpmath.mpc(-0.5, -0.0), 128)
        assert abs(cd.theta - mpmath.pi) < 1e-35
    with pytest.raises(DegenerateLabel):
        complex_distance(0)
    with pytest.raises(NegativeDistance):
        complex_distance(2)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 1), st.floats(-3.14, 3.14))
def test_distance_round_trip(r, phi):
    with mpmath.workprec(128):
        w = mpmath.mpf(r) * mpmath.expjpi(mpmath.mpf(phi) / mpmath.pi)
        cd = complex_distance(w, 128)
        assert cd.d >= 0
        assert -mpmath.pi < cd.theta <= mpmath.pi
        assert abs(cd.w() - w) < mpmath.mpf(2) ** -120


def test_shape_parameter_examples():
    assert shape_parameter(-1, 1, 1) == 1
    assert shape_parameter(-(1 + 1j), 1, 1) == 1 + 1j
    with pytest.raises(DegenerateLabel):
        shape_parameter(1, 0, 1)


def test_cross_ratio_examples():
    assert cross_ratio(Fraction(2), Fraction(0), Fraction(1), Fraction(3)) == Fraction(4, 3)
    assert cross_ratio(Fraction(0), Fraction(1), INF, Fraction(2)) == -1
    with pytest.raises(CoincidentPoints):
        cross_ratio(1, 1, 2, 3)
    with pytest.raises(CoincidentPoints):
        cross_ratio(INF, 1, INF, 3)


def _limit_cross_ratio(pts, k, big):
    """Cross-ratio with the infinite point replaced by a huge finite one."""
    pts = list(pts)
    pts[k] = big
    p0, p1, p2, p3 = pts
    return (p0 - p1) * (p2 - p3) / ((p0 - p2) * (p1 - p3))


@pytest.mark.parametrize("k", range(4))
def test_infinity_is_a_limit(k):
    rng = random.Random(k)
    with mpmath.workprec(256):
        pts = [mpmath.mpc(rng.random(), rng.random()) for _ in range(4)]
        exact = cross_ratio(*[INF if i == k else p for i, p in enumerate(pts)])
        approx = _limit_cross_ratio(pts, k, mpmath.mpc(10) ** 60)
        assert abs(exact - approx) < mpmath.mpf(10) ** -50


rationals = st.fractions(min_value=-20, max_value=20, max_denominator=50)


@settings(max_examples=1000, deadline=None)
@given(rationals, rationals.filter(bool), rationals.filter(bool))
def test_shape_is_cross_ratio_exactly(w, u_prev, u_next):
    """cross_ratio(-w/u', 0, inf, u) = -w/(u' u) over the rationals."""
    assume(w != 0 and -w / u_prev != u_next)
    assert cross_ratio(-w / u_prev, Fraction(0), INF, u_next) == -w / (u_prev * u_next)


def _random_matrix(rng):
    while True:
        m = [mpmath.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(4)]
        if abs(m[0] * m[3] - m[1] * m[2]) > 0.1:
            return m


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_mobius_invariance(seed):
    rng = random.Random(seed)
    with mpmath.workprec(128):
        pts = [mpmath.mpc(rng.uniform(-3, 3), rng.uniform(-3, 3)) for _ in range(4)]
        m = _random_matrix(rng)
        moved = [mobius(m, p) for p in pts]
        assert abs(cross_ratio(*pts) - cross_ratio(*moved)) < mpmath.mpf(2) ** -90


def test_mobius_at_infinity():
    assert mobius((1, 2, 0, 1), INF) == INF
    assert mobius(tuple(map(Fraction, (1, 2, 3, 4))), INF) == Fraction(1, 3)
    assert mobius((1, 2, 1, 0), 0) == INF


def _geometric(case):
    res = helpers.solve(case)
    return res.diagram, res.system, res.full_values


def test_bigon_develops_to_coincident_points():
    d, s, full = _geometric(("braid", 2))
    labels = LabelSystem(d)
    bigon = next(r for r in d.regions if r.size == 2)
    dev = develop_region(bigon, full, labels)
    assert dev.points[0] == INF and dev.points[1] == 0
    assert dev.coincident
    assert valid_corners(bigon, corner_labels(bigon, labels, full)) == []


def test_triangle_develops_to_distinct_points():
    d, s, full = _geometric(("braid", 2))
    labels = LabelSystem(d)
    tri = next(r for r in d.regions if r.size == 3)
    dev = develop_region(tri, full, labels)
    assert not dev.coincident
    assert dev.points[0] == INF and dev.points[1] == 0
    assert len({complex(p) for p in dev.points[1:]}) == 2


def test_rotated_development_is_mobius_equivalent():
    d, s, full = _geometric(("braid", 4))
    labels = LabelSystem(d)
    big = max(d.regions, key=lambda r: r.size)
    with mpmath.workprec(128):
        base = develop_region(big, full, labels)
        for k in range(1, big.size):
            rot = develop_region(big.rotated(k), full, labels)
            # same points in a different chart: every cross-ratio agrees
            for i in range(big.size):
                j = (i - k) % big.size
                assert abs(shape_by_cross_ratio(base, i) - shape_by_cross_ratio(rot, j)) < mpmath.mpf(2) ** -60


@pytest.mark.parametrize("case", [("braid", 4), ("braid", 5), ("two_bridge", "7/3")], ids=helpers.case_id)
def test_shapes_match_developing_map(case):
    d, s, full = _geometric(case)
    labels = LabelSystem(d)
    tol = mpmath.mpf(2) ** -32
    checked = 0
    for r in d.regions:
        dev = develop_region(r, full, labels)
        for i, _, zeta in region_shapes(r, full, labels):
            assert abs(zeta - shape_by_cross_ratio(dev, i)) < tol
            checked += 1
    assert checked > 0


def test_figure_eight_has_no_valid_corners():
    """Every region of the figure-eight diagram is a bigon or a triangle."""
    d, s, full = _geometric(("braid", 2))
    labels = LabelSystem(d)
    for r in d.regions:
        assert region_shapes(r, full, labels) == []


def test_five_two_shapes_not_flat():
    d, s, full = _geometric(("two_bridge", "7/3"))
    labels = LabelSystem(d)
    shapes = [z for r in d.regions for _, _, z in region_shapes(r, full, labels)]
    assert shapes and all(abs(z.imag) > 1e-10 for z in shapes)


def test_symmetric_polygons_have_real_shapes():
    """In the (aB)^n closures the n-gon regions develop flat: shapes are real."""
    d, s, full = _geometric(("braid", 4))
    labels = LabelSystem(d)
    with mpmath.workprec(128):
        shapes = [z for r in d.regions for _, _, z in region_shapes(r, full, labels)]
    assert shapes and all(abs(z.imag) < 1e-30 for z in shapes)
    assert all(abs(z) > 1e-10 and abs(z - 1) > 1e-10 for z in shapes)
