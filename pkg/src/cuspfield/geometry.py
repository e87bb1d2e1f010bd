"""Geometric readings of solved labels.

Complex distances ``d + i theta`` between horospheres from ``w = e^-(d+i theta)``,
tetrahedron shapes ``-w / (u' u)`` at region corners, and a developing map
that places the horosphere centers of one region in the upper half-space
chart so the shapes can be checked independently as cross-ratios.
"""

from dataclasses import dataclass

import mpmath

from .errors import CoincidentPoints, DegenerateLabel, NegativeDistance
from .tt_system import LabelSystem

INF = mpmath.inf


def is_inf(p):
    return mpmath.isinf(p)


@dataclass(frozen=True)
class ComplexDistance:
    d: object
    theta: object

    def w(self):
        return mpmath.exp(-mpmath.mpc(self.d, self.theta))


def complex_distance(w, bits=None):
    """``delta = -Log w`` on the principal branch, theta in (-pi, pi]."""
    bits = bits or mpmath.mp.prec
    with mpmath.workprec(bits):
        w = mpmath.mpc(w)
        if w == 0:
            raise DegenerateLabel("crossing label is zero")
        d = -mpmath.log(abs(w))
        theta = -mpmath.arg(w)
        if theta <= -mpmath.pi:
            theta += 2 * mpmath.pi
        if d < -(mpmath.mpf(2) ** (-bits // 4)):
            raise NegativeDistance("|w| = %s > 1: horospheres overlap" % mpmath.nstr(abs(w), 10))
        return ComplexDistance(+d, +theta)


def shape_parameter(w, u_prev, u_next):
    if u_prev == 0 or u_next == 0:
        raise DegenerateLabel("zero edge label next to the corner")
    return -w / (u_prev * u_next)


def cross_ratio(p0, p1, p2, p3):
    """``(p0-p1)(p2-p3) / ((p0-p2)(p1-p3))`` with a point at infinity cancelled."""
    pts = (p0, p1, p2, p3)
    infs = [i for i, p in enumerate(pts) if is_inf(p)]
    if len(infs) > 1:
        raise CoincidentPoints("more than one point at infinity")
    for i in range(4):
        for j in range(i + 1, 4):
            if i not in infs and j not in infs and pts[i] == pts[j]:
                raise CoincidentPoints("points %d and %d coincide" % (i, j))
    if not infs:
        return (p0 - p1) * (p2 - p3) / ((p0 - p2) * (p1 - p3))
    k = infs[0]
    # the two differences holding the point at infinity cancel to +-1
    num = [(0, 1), (2, 3)]
    den = [(0, 2), (1, 3)]
    sign = {0: 1, 1: -1, 2: -1, 3: 1}[k]
    top = 1
    for i, j in num:
        if k not in (i, j):
            top = top * (pts[i] - pts[j])
    bottom = 1
    for i, j in den:
        if k not in (i, j):
            bottom = bottom * (pts[i] - pts[j])
    return sign * top / bottom


def mobius(m, z):
    a, b, c, d = m
    if is_inf(z):
        return INF if c == 0 else a / c
    den = c * z + d
    if den == 0:
        return INF
    return (a * z + b) / den


def corner_labels(region, labels, values):
    """Per corner ``(w, t)``: crossing label and the signed edge label after it."""
    out = []
    for corner, (arc, side) in zip(region.corners, region.edges):
        w = values[labels.w(corner)]
        u = values[labels.u(arc, side)]
        out.append((w, u if side == "L" else -u))
    return out


@dataclass(frozen=True)
class DevelopedRegion:
    """Horosphere centers of one lifted region.

    ``centers[j]`` belongs to the edge ``edges[j]`` of the region as given;
    the last one sits at infinity and the first at 0.
    """

    centers: tuple
    coincident: bool

    @property
    def points(self):
        """Centers in walk order starting from the one at infinity."""
        return self.centers[-1:] + self.centers[:-1]


def develop_region(region, values, labels):
    """Replay the normalisation walk around ``region``.

    ``values`` holds one number per full label variable.  The walk starts
    with the last edge's horosphere at infinity and the first at 0; each
    step applies ``M(w) T(t)`` of the next corner.
    """
    pairs = corner_labels(region, labels, values)
    k = len(pairs)
    one = mpmath.mpc(1)
    m = (one, 0 * one, 0 * one, one)
    centers = []
    for j in range(k):
        centers.append(INF if j == k - 1 else mobius(m, 0 * one))
        w, t = pairs[j]
        if w == 0:
            raise DegenerateLabel("crossing label at corner %d is zero" % j)
        a, b, c, d = m
        # m @ M(w) @ T(t) with M(w)T(t) = (0 w; 1 t)
        m = (b, a * w + b * t, d, c * w + d * t)
    coincident = any(t == 0 for _, t in pairs) or _has_repeats(centers)
    return DevelopedRegion(tuple(centers), coincident)


def _has_repeats(centers):
    finite = [c for c in centers if not is_inf(c)]
    if len(finite) < len(centers) - 1:
        return True
    for i in range(len(finite)):
        for j in range(i + 1, len(finite)):
            if finite[i] == finite[j]:
                return True
    return False


def valid_corners(region, pairs):
    """Corner indices whose four surrounding horospheres are distinct.

    Bigon and triangle corners close up on themselves and carry no
    tetrahedron; a zero edge label next to the corner is excluded too.
    """
    k = len(pairs)
    if k < 4:
        return []
    return [i for i in range(k) if pairs[i - 1][1] != 0 and pairs[i][1] != 0]


def region_shapes(region, values, labels):
    """``[(corner index, crossing, zeta)]`` for the valid corners of a region."""
    pairs = corner_labels(region, labels, values)
    out = []
    for i in valid_corners(region, pairs):
        w = pairs[i][0]
        out.append((i, region.corners[i], shape_parameter(w, pairs[i - 1][1], pairs[i][1])))
    return out


def shape_by_cross_ratio(developed, i):
    """Cross-ratio of the centers around corner ``i``."""
    c = developed.centers
    k = len(c)
    return cross_ratio(c[(i - 2) % k], c[(i - 1) % k], c[i], c[(i + 1) % k])


def corner_shapes(d, system, full_values):
    labels = LabelSystem(d)
    out = []
    for r in d.regions:
        for i, _, zeta in region_shapes(r, full_values, labels):
            out.append((r.id, i, zeta))
    return out


def geometry_report(d, system, full_values, bits):
    """Distances per crossing and shapes per valid corner."""
    labels = LabelSystem(d)
    with mpmath.workprec(bits):
        distances = []
        for c in range(d.n):
            distances.append((c, complex_distance(full_values[labels.w(c)], bits)))
        shapes = []
        for r in d.regions:
            for i, crossing, zeta in region_shapes(r, full_values, labels):
                shapes.append((r.id, i, crossing, zeta))
    return distances, shapes
