"""Recognising algebraic numbers from high-precision values.

Integer LLL (exact arithmetic, Lovasz parameter 3/4), minimal polynomials
by a degree sweep over integer-relation lattices, and field membership
``z2 = q(z1)`` with ``q`` rational.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import mpmath

from .errors import DependentRows, FieldDescriptionIncomplete, NoRelationFound, PrecisionTooLow

DELTA = Fraction(3, 4)
PRIMITIVE_K = 8


# ---------------------------------------------------------------------------
# LLL


@dataclass
class ReducedBasis:
    rows: list
    transform: list  # unimodular: rows = transform * input


def lll_reduce(basis):
    """LLL-reduce integer row vectors (integral version, no floating point)."""
    b = [list(map(int, r)) for r in basis]
    n = len(b)
    h = [[int(i == j) for j in range(n)] for i in range(n)]
    if n == 0:
        return ReducedBasis([], [])
    dot = lambda x, y: sum(p * q for p, q in zip(x, y))
    # 1-based bookkeeping as in the textbook statement
    d = [1] + [0] * n
    lam = [[0] * (n + 1) for _ in range(n + 1)]
    d[1] = dot(b[0], b[0])
    if d[1] == 0:
        raise DependentRows("row 0 is zero")
    k, kmax = 2, 1

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l]:
            q = (2 * lam[k][l] + d[l]) // (2 * d[l])
            b[k - 1] = [x - q * y for x, y in zip(b[k - 1], b[l - 1])]
            h[k - 1] = [x - q * y for x, y in zip(h[k - 1], h[l - 1])]
            lam[k][l] -= q * d[l]
            for i in range(1, l):
                lam[k][i] -= q * lam[l][i]

    def swap(k):
        b[k - 1], b[k - 2] = b[k - 2], b[k - 1]
        h[k - 1], h[k - 2] = h[k - 2], h[k - 1]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        mu = lam[k][k - 1]
        big = (d[k - 2] * d[k] + mu * mu) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - mu * t) // d[k - 1]
            lam[i][k - 1] = (big * t + mu * lam[i][k]) // d[k]
        d[k - 1] = big

    while k <= n:
        if k > kmax:
            kmax = k
            for j in range(1, k + 1):
                u = dot(b[k - 1], b[j - 1])
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    d[k] = u
            if d[k] == 0:
                raise DependentRows("row %d is dependent on earlier rows" % (k - 1))
        red(k, k - 1)
        if 4 * d[k] * d[k - 2] < 3 * d[k - 1] ** 2 - 4 * lam[k][k - 1] ** 2:
            swap(k)
            k = max(2, k - 1)
        else:
            for l in range(k - 2, 0, -1):
                red(k, l)
            k += 1
    return ReducedBasis(b, h)


def is_lll_reduced(rows, delta=DELTA):
    """Check size reduction and the Lovasz condition with exact Gram-Schmidt."""
    n = len(rows)
    bstar = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    norms = []
    for i in range(n):
        v = [Fraction(x) for x in rows[i]]
        for j in range(i):
            mu[i][j] = sum(Fraction(x) * y for x, y in zip(rows[i], bstar[j])) / norms[j]
            v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
        bstar.append(v)
        norms.append(sum(x * x for x in v))
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    for i in range(1, n):
        if norms[i] < (delta - mu[i][i - 1] ** 2) * norms[i - 1]:
            return False
    return True


# ---------------------------------------------------------------------------
# minimal polynomials


@dataclass(frozen=True)
class MinimalPolynomial:
    coeffs: tuple  # integers, constant term first
    certified_at_bits: int
    residual: object

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def height(self):
        return max(abs(c) for c in self.coeffs)

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def format(self, var="x"):
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else (var if k == 1 else "%s^%d" % (var, k))
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append("%d*%s" % (c, mono))
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self):
        return {"coeffs": list(self.coeffs), "degree": self.degree}


def precision_floor(max_degree, height_bits):
    return 16 * max_degree + 4 * height_bits


def _normalize(coeffs):
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    g = 0
    for c in coeffs:
        g = gcd(g, c)
    coeffs = [c // g for c in coeffs]
    if coeffs[-1] < 0:
        coeffs = [-c for c in coeffs]
    return tuple(coeffs)


def _relation_lattice(values, bits):
    """Rows ``e_j | round(S Re v_j) | round(S Im v_j)`` with ``S = 2^(bits/2)``."""
    scale = mpmath.mpf(2) ** (bits // 2)
    n = len(values)
    rows = []
    for j, v in enumerate(values):
        row = [int(i == j) for i in range(n)]
        row.append(int(mpmath.nint(scale * mpmath.re(v))))
        row.append(int(mpmath.nint(scale * mpmath.im(v))))
        rows.append(row)
    return rows


def height_cap(dim, height_bits, bits, real=False):
    """Largest accepted coefficient size (in bits) for a relation of length ``dim``.

    With no true relation the shortest lattice vector has entries around
    ``2^(bits/dim)``, or ``2^(bits/(2 dim))`` when every value is real and
    only one column constrains the lattice; half of that keeps chance
    relations out.
    """
    return min(height_bits, bits // ((4 if real else 2) * dim))


def find_relation(values, bits, height_bits):
    """Smallest integer relation among ``values`` or None.

    A candidate is accepted when its coefficients stay under the height cap
    and ``|sum c_j v_j| < 2^(-bits/4)`` at full precision.
    """
    with mpmath.workprec(bits + 32):
        rows = _relation_lattice(values, bits)
        try:
            red = lll_reduce(rows)
        except DependentRows:
            return None
        n = len(values)
        tol = mpmath.mpf(2) ** (-bits // 4)
        real = all(abs(mpmath.im(v)) < mpmath.mpf(2) ** (-bits // 2) for v in values)
        cap = 1 << height_cap(n, height_bits, bits, real)
        for row in red.rows:
            c = row[:n]
            if not any(c) or max(abs(x) for x in c) >= cap:
                continue
            if abs(mpmath.fsum(x * v for x, v in zip(c, values))) < tol:
                return c
    return None


def minimal_polynomial(z, max_degree=8, height_bits=64, bits=None):
    """Integer minimal polynomial of ``z`` by sweeping degrees 1..max_degree."""
    bits = bits or mpmath.mp.prec
    if bits < precision_floor(max_degree, height_bits):
        raise PrecisionTooLow(
            "%d bits is below the floor 16*%d + 4*%d = %d"
            % (bits, max_degree, height_bits, precision_floor(max_degree, height_bits))
        )
    with mpmath.workprec(bits + 32):
        z = mpmath.mpc(z)
        powers = [mpmath.mpc(1)]
        for _ in range(max_degree):
            powers.append(powers[-1] * z)
        for deg in range(1, max_degree + 1):
            c = find_relation(powers[: deg + 1], bits, height_bits)
            if c is None or c[deg] == 0:
                continue
            coeffs = _normalize(list(c))
            p = MinimalPolynomial(coeffs, bits, None)
            res = abs(p(z))
            return MinimalPolynomial(coeffs, bits, res)
    raise NoRelationFound(
        "no integer polynomial of degree <= %d and height < 2^%d vanishes at %s"
        % (max_degree, height_bits, mpmath.nstr(z, 15))
    )


def stable_minimal_polynomial(z, max_degree=8, height_bits=64, bits=None):
    """Minimal polynomial that must agree at ``bits`` and ``2*bits``.

    ``z`` has to carry at least ``2*bits`` of accuracy.
    """
    bits = bits or mpmath.mp.prec // 2
    lo = minimal_polynomial(z, max_degree, height_bits, bits)
    hi = minimal_polynomial(z, max_degree, height_bits, 2 * bits)
    if lo.coeffs != hi.coeffs:
        raise NoRelationFound(
            "minimal polynomial changes between %d and %d bits" % (bits, 2 * bits)
        )
    return hi


# ---------------------------------------------------------------------------
# membership


@dataclass(frozen=True)
class Membership:
    coeffs: tuple  # Fractions, constant first: z2 = sum coeffs[j] * z1^j

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + mpmath.mpf(c.numerator) / c.denominator
        return acc

    def format(self, var="g"):
        parts = []
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if j == 0 else (var if j == 1 else "%s^%d" % (var, j))
            parts.append(("%s*%s" % (c, mono) if mono else str(c)) if c != 1 or not mono else mono)
        return " + ".join(parts).replace("+ -", "- ") or "0"

    def to_json(self):
        return [str(c) for c in self.coeffs]


def membership(z1, z2, deg1, bits=None, height_bits=64):
    """Witness ``q`` with ``z2 = q(z1)``, ``deg q < deg1``, or None."""
    bits = bits or mpmath.mp.prec
    if bits < 16 * (deg1 + 1):
        raise PrecisionTooLow("%d bits too few for a degree %d membership test" % (bits, deg1))
    with mpmath.workprec(bits + 32):
        z1 = mpmath.mpc(z1)
        z2 = mpmath.mpc(z2)
        values = [mpmath.mpc(1)]
        for _ in range(deg1 - 1):
            values.append(values[-1] * z1)
        values.append(z2)
        c = find_relation(values, bits, height_bits)
        if c is None or c[-1] == 0:
            return None
        den = -c[-1]
        return Membership(tuple(Fraction(x, den) for x in c[:-1]))


@dataclass(frozen=True)
class SameField:
    equal: bool
    witness: Membership = None


def same_field(z1, z2, deg1, bits=None, height_bits=64, deg2=None):
    """Whether ``Q(z1) = Q(z2)``: ``z2`` lies in ``Q(z1)`` and has the same degree."""
    bits = bits or mpmath.mp.prec
    wit = membership(z1, z2, deg1, bits, height_bits)
    if wit is None:
        return SameField(False)
    if deg2 is None:
        try:
            deg2 = minimal_polynomial(z2, deg1, height_bits, max(bits, precision_floor(deg1, height_bits))).degree
        except (NoRelationFound, PrecisionTooLow):
            back = membership(z2, z1, deg1, bits, height_bits)
            return SameField(back is not None, wit)
    return SameField(deg2 == deg1, wit)


# ---------------------------------------------------------------------------
# field descriptions


@dataclass
class FieldDescription:
    generator: str  # label name or "a + k*b"
    value: object
    polynomial: MinimalPolynomial
    members: dict = field(default_factory=dict)  # label -> Membership
    failures: list = field(default_factory=list)
    label_polys: dict = field(default_factory=dict)  # label -> MinimalPolynomial or None


def _dedupe(labels, bits):
    """Group labels with equal values; returns ``[(value, [names])]``."""
    tol = mpmath.mpf(2) ** (-bits // 4)
    groups = []
    for name, v in labels:
        for g in groups:
            if abs(g[0] - v) < tol:
                g[1].append(name)
                break
        else:
            groups.append((v, [name]))
    return groups


def describe_field(labels, max_degree=8, height_bits=64, bits=None):
    """Generator and membership witnesses for ``labels`` (name, value) pairs.

    Values must be accurate to ``2*bits``; every minimal polynomial is
    checked for agreement at ``bits`` and ``2*bits``.
    """
    bits = bits or mpmath.mp.prec // 2
    groups = _dedupe(labels, bits)
    polys = []
    label_polys = {}
    for value, names in groups:
        try:
            p = stable_minimal_polynomial(value, max_degree, height_bits, bits)
        except NoRelationFound:
            p = None
        polys.append(p)
        for nm in names:
            label_polys[nm] = p
    known = [i for i, p in enumerate(polys) if p is not None]
    if not known:
        raise FieldDescriptionIncomplete("no label has a recognisable minimal polynomial")
    order = {nm: i for i, (nm, _) in enumerate(labels)}
    # largest degree, then smallest height, then first label
    gi = min(known, key=lambda i: (-polys[i].degree, polys[i].height, order[groups[i][1][0]]))
    gen_name = groups[gi][1][0]
    gen_value = groups[gi][0]
    gen_poly = polys[gi]

    desc = _express(groups, gen_name, gen_value, gen_poly, bits, height_bits)
    if desc.failures:
        # primitive element search: generator + k * (first failing label)
        fail_value = next(v for v, names in groups if names[0] in desc.failures)
        fail_name = desc.failures[0]
        for k in range(1, PRIMITIVE_K + 1):
            with mpmath.workprec(2 * bits + 32):
                value = gen_value + k * fail_value
            try:
                p = stable_minimal_polynomial(value, max_degree, height_bits, bits)
            except NoRelationFound:
                continue
            trial = _express(groups, "%s + %d*%s" % (gen_name, k, fail_name), value, p, bits, height_bits)
            if not trial.failures:
                desc = trial
                break
    desc.label_polys = label_polys
    return desc


def _express(groups, name, value, poly, bits, height_bits):
    desc = FieldDescription(name, value, poly)
    for v, names in groups:
        try:
            wit = membership(value, v, poly.degree, 2 * bits, height_bits)
        except PrecisionTooLow:
            wit = None
        for nm in names:
            if wit is None:
                desc.failures.append(nm)
            else:
                desc.members[nm] = wit
    return desc
