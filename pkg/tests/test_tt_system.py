import itertools
import random

import mpmath
import pytest

from cuspfield.diagram import LEFT, RIGHT, Region, from_braid, from_two_bridge, parse_pd
from cuspfield.errors import NotHyperbolicCandidate, UnsupportedDiagram
from cuspfield.numsolve import multistart_solve, select_geometric
from cuspfield.poly import Poly
from cuspfield.tt_system import (
    LabelSystem,
    Mat2,
    PolySystem,
    arc_relation,
    build_system,
    full_system,
    intercusp_matrix,
    region_product,
    region_relation,
    translation_matrix,
)

from test_diagram import NONALT_PD, TREFOIL_PD

w1, u1, w2, u2 = (Poly.var(i) for i in range(4))
ONE = Poly.const(1)
I2 = Mat2(ONE, Poly(), Poly(), ONE)


def same(m, n):
    return all(a == b for a, b in zip(m.entries(), n.entries()))


def test_intercusp_matrix_is_an_involution():
    m = intercusp_matrix(w1)
    assert same(m @ m, Mat2(w1, Poly(), Poly(), w1))
    one = intercusp_matrix(1) @ intercusp_matrix(1)
    assert one.entries() == (1, 0, 0, 1)
    minus = intercusp_matrix(-1) @ intercusp_matrix(-1)
    assert minus.entries() == (-1, 0, 0, -1)


def test_translation_matrices():
    assert translation_matrix(0).entries() == (1, 0, 0, 1)
    assert translation_matrix(1).entries() == (1, 1, 0, 1)
    assert same(translation_matrix(u1) @ translation_matrix(u2), translation_matrix(u1 + u2))


def test_bigon_product():
    prod = intercusp_matrix(w1) @ translation_matrix(u1) @ intercusp_matrix(w2) @ translation_matrix(u2)
    assert same(prod, Mat2(w1, w1 * u2, u1, w2 + u1 * u2))
    b, c, diag = prod.scalar_residual()
    # b = w1 u2 and c = u1 force u1 = u2 = 0 (w1 != 0), then w1 = w2
    assert c == u1 and b == w1 * u2
    assert diag.substitute({1: Poly(), 3: Poly()}) == w1 - w2


def test_triangle_residual():
    m = intercusp_matrix(1) @ intercusp_matrix(1) @ intercusp_matrix(1)
    assert m.entries() == (0, 1, 1, 0)
    assert tuple(m.scalar_residual()) == (1, 1, 0)


def test_region_relations_have_integer_coefficients_and_degree_bound():
    d = from_braid("aB", 3)
    labels = LabelSystem(d)
    for r in d.regions:
        for p in region_relation(r, labels):
            assert all(isinstance(c, int) for c in p.terms.values())
            assert p.total_degree() <= r.size + 1
            assert set(p.variables()) <= set(range(len(labels)))


def test_label_counts():
    d = from_braid("aB", 2)
    labels = LabelSystem(d)
    assert len(labels) == 5 * d.n
    assert sum(v.kind == "w" for v in labels.variables) == d.n


def test_figure_eight_full_counts():
    s = build_system(from_braid("aB", 2), reduce=False)
    assert s.counts() == (20, 26)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_full_counts_formula(n):
    d = from_braid("aB", n)
    s = full_system(d)
    assert s.counts() == (5 * d.n, 3 * (d.n + 2) + 2 * d.n)


def test_figure_eight_reduced():
    s = build_system(from_braid("aB", 2))
    assert len(s.variables) <= 6
    # every eliminated variable has a recorded reason
    assert all(reason for _, reason in s.substitutions.values())
    assert len(s.kept) + len(s.substitutions) == 20


def test_arc_relations_figure_eight():
    d = from_braid("aB", 2)
    labels = LabelSystem(d)
    rels = [arc_relation(a, labels) for a in d.arcs]
    assert len(rels) == 8
    for p in rels:
        const, lin = p.linear_coefficients()
        assert const in (1, -1)
        assert sorted(lin.values()) == [-1, 1]


def test_arc_next_to_bigon():
    # a bigon forces its edge labels to 0, so the label across the arc is +-1
    d = from_braid("aB", 2)
    s = build_system(d)
    labels = LabelSystem(d)
    bigon = next(r for r in d.regions if r.size == 2)
    for arc, side in bigon.edges:
        other = RIGHT if side == LEFT else LEFT
        expr, _ = s.substitutions[labels.u(arc, other)]
        assert expr.is_constant() and expr.constant_term() in (1, -1)


def test_unsupported_and_rejected_diagrams():
    with pytest.raises(UnsupportedDiagram):
        build_system(parse_pd(NONALT_PD))
    with pytest.raises(UnsupportedDiagram):
        arc_relation(next(a for a in parse_pd(NONALT_PD).arcs if a.starts_over == a.ends_over),
                     LabelSystem(parse_pd(NONALT_PD)))
    with pytest.raises(NotHyperbolicCandidate):
        build_system(parse_pd(TREFOIL_PD))
    with pytest.raises(NotHyperbolicCandidate):
        build_system(from_braid("a", 5))
    with pytest.raises(NotHyperbolicCandidate):
        build_system(from_braid("aaaB"))


def _random_point(n, rng):
    return [mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(n)]


def test_cyclic_invariance_of_region_products():
    """Rotating the starting corner conjugates the product, so scalarity is preserved."""
    rng = random.Random(5)
    d = from_braid("aB", 4)
    labels = LabelSystem(d)
    for r in d.regions:
        base = region_product(r, labels)
        for k in range(1, r.size):
            rot = region_product(r.rotated(k), labels)
            # a generic point: neither product is scalar, and traces agree
            x = _random_point(len(labels), rng)
            tr0 = (base.a + base.d).evaluate(x, mpmath.mpc(1))
            tr1 = (rot.a + rot.d).evaluate(x, mpmath.mpc(1))
            assert abs(tr0 - tr1) < 1e-20
            det0 = base.det().evaluate(x, mpmath.mpc(1))
            det1 = rot.det().evaluate(x, mpmath.mpc(1))
            assert abs(det0 - det1) < 1e-20


def test_cyclic_invariance_on_scalar_points():
    """A bigon at its forced solution satisfies the relations of every rotation."""
    r = Region(0, (0, 1), ((0, LEFT), (1, LEFT)))
    d = from_braid("aB", 2)
    labels = LabelSystem(d)
    for k in range(2):
        rels = region_relation(r.rotated(k), labels)
        x = [mpmath.mpc(0)] * len(labels)
        x[0] = x[1] = mpmath.mpc(0.3, 0.4)
        assert all(abs(p.evaluate(x, mpmath.mpc(1))) == 0 for p in rels)


def _affine_maps(xa, xb, kinds_a, kinds_b):
    """Bijections ``i -> (j, s, c)`` of same-kind variables with ``xa[i] = s * xb[j] + c``."""
    options = []
    with mpmath.workprec(128):
        for i, va in enumerate(xa):
            opts = [
                (j, s_, c)
                for j, vb in enumerate(xb)
                if kinds_b[j] == kinds_a[i]
                for s_, c in itertools.product((1, -1), (0, 1, -1))
                if abs(va - (s_ * vb + c)) < 1e-20
            ]
            options.append(opts)
    for choice in itertools.product(*options):
        if len({j for j, _, _ in choice}) == len(choice):
            yield dict(enumerate(choice))


def test_two_bridge_and_braid_systems_isomorphic():
    """The 5/2 diagram and the closure of (aB)^2 give the same reduced system.

    A renaming of labels (edge labels possibly negated or shifted by a
    meridian, the freedom in which side of an arc survives) is read off the
    geometric solutions; under it the equations of one system vanish on
    every solution found for the other, in both directions.
    """
    a = build_system(from_braid("aB", 2))
    b = build_system(from_two_bridge(5, 2)[1])
    assert a.counts() == b.counts()
    sa = multistart_solve(a, attempts=40)
    sb = multistart_solve(b, attempts=40)
    assert len(sa) == len(sb)
    xa = select_geometric(sa, a).values
    xb = select_geometric(sb, b).values
    kinds_a = [v.kind for v in a.variables]
    kinds_b = [v.kind for v in b.variables]

    def vanish(eqs, sols):
        with mpmath.workprec(128):
            return all(abs(p.evaluate(s.values, mpmath.mpc(1))) < 1e-25 for p in eqs for s in sols)

    for xs in (xb, [mpmath.conj(v) for v in xb]):
        for amap in _affine_maps(xa, xs, kinds_a, kinds_b):
            sub = {i: s_ * Poly.var(j) + c for i, (j, s_, c) in amap.items()}
            back = {j: s_ * (Poly.var(i) - c) for i, (j, s_, c) in amap.items()}
            if vanish([p.substitute(sub) for p in a.equations], sb) and vanish(
                [p.substitute(back) for p in b.equations], sa
            ):
                return
    pytest.fail("no label correspondence maps one system onto the other")


def test_polysystem_json_round_trip():
    s = build_system(from_two_bridge(7, 3)[1])
    again = PolySystem.from_json(s.to_json())
    assert again.names == s.names
    assert again.equations == s.equations
    assert again.tags == s.tags


def test_reduced_and_full_agree_on_expansion():
    """Substitutions map any reduced point to a point of the full variable space."""
    d = from_braid("aB", 3)
    s = build_system(d)
    full = full_system(d)
    rng = random.Random(1)
    x = _random_point(len(s.variables), rng)
    big = s.expand(x)
    # the arc relations hold identically after expansion
    for e, tag in zip(full.equations, full.tags):
        if tag.startswith("arc"):
            assert abs(e.evaluate(big, mpmath.mpc(1))) < 1e-25
