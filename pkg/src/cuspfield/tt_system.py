"""Crossing/edge label equations of a link diagram.

Unknowns are the intercusp parameter ``w`` of every crossing arc and the
translation parameter ``u`` on each side of every diagram arc, measured
along the arc's orientation.  Each region contributes the three conditions
that the ordered product of ``M(w) = (0 w; 1 0)`` and ``T(+-u) = (1 +-u; 0 1)``
around it is scalar; each arc contributes ``u_L - u_R = sigma`` where sigma
is +1 when the arc leaves a crossing as the over-strand and -1 otherwise
(the two sides differ by one meridian).
"""

import json
from dataclasses import dataclass, field

from .diagram import LEFT, RIGHT, is_alternating, is_reduced, is_two_braid
from .errors import NotHyperbolicCandidate, UnsupportedDiagram
from .poly import Poly

JSON_SCHEMA = "cuspfield.polysystem/1"


@dataclass(frozen=True)
class LabelVar:
    kind: str  # "w" crossing label, "u" edge label, "x" anything else
    key: tuple
    index: int

    @property
    def name(self):
        if self.kind == "w":
            return "w%d" % self.key[0]
        if self.kind == "u":
            return "u%d%s" % self.key
        return "x%d" % self.key[0] if self.key else "x%d" % self.index

    def __str__(self):
        return self.name


class Mat2:
    """2x2 matrix over polynomials or numbers; compared up to scalars."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = a, b, c, d

    def __matmul__(self, o):
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def entries(self):
        return self.a, self.b, self.c, self.d

    def det(self):
        return self.a * self.d - self.b * self.c

    def scalar_residual(self):
        """The three entries that vanish iff the matrix is a scalar."""
        return self.b, self.c, self.a - self.d

    def __repr__(self):
        return "Mat2(%r, %r; %r, %r)" % self.entries()


def intercusp_matrix(w):
    return Mat2(0 * w, w, 0 * w + 1, 0 * w)


def translation_matrix(u):
    return Mat2(0 * u + 1, u, 0 * u, 0 * u + 1)


class LabelSystem:
    """Variable table for a diagram: one w per crossing, one u per arc side."""

    def __init__(self, diagram):
        self.diagram = diagram
        n = diagram.n
        self.variables = [LabelVar("w", (c,), c) for c in range(n)]
        for a in range(len(diagram.arcs)):
            for side in (LEFT, RIGHT):
                self.variables.append(LabelVar("u", (a, side), len(self.variables)))

    def w(self, crossing):
        return crossing

    def u(self, arc, side):
        return self.diagram.n + 2 * arc + (0 if side == LEFT else 1)

    def signed_u(self, arc, side):
        """Translation met by a left-keeping traversal: +u_L along, -u_R against."""
        v = Poly.var(self.u(arc, side))
        return v if side == LEFT else -v

    def __len__(self):
        return len(self.variables)


def region_product(region, labels):
    m = Mat2(Poly.const(1), Poly(), Poly(), Poly.const(1))
    for corner, (arc, side) in zip(region.corners, region.edges):
        m = m @ intercusp_matrix(Poly.var(labels.w(corner)))
        m = m @ translation_matrix(labels.signed_u(arc, side))
    return m


def region_relation(region, labels):
    """Three integer polynomials stating that the region's product is scalar."""
    return list(region_product(region, labels).scalar_residual())


def arc_sign(arc):
    return 1 if arc.starts_over else -1


def arc_relation(arc, labels):
    if arc.starts_over == arc.ends_over:
        raise UnsupportedDiagram(
            "arc %d is not alternating; only alternating diagrams are supported" % arc.id,
            detail=arc.id,
        )
    return Poly.var(labels.u(arc.id, LEFT)) - Poly.var(labels.u(arc.id, RIGHT)) - arc_sign(arc)


@dataclass
class PolySystem:
    variables: list
    equations: list
    tags: list
    # variables of the unreduced system and how eliminated ones are recovered
    full_variables: list = field(default_factory=list)
    substitutions: dict = field(default_factory=dict)  # full index -> (Poly over reduced vars, reason)
    kept: list = field(default_factory=list)  # full index of each reduced variable
    diagram: object = None

    def __post_init__(self):
        if not self.full_variables:
            self.full_variables = list(self.variables)
            self.kept = list(range(len(self.variables)))
        self._jac = None

    @classmethod
    def generic(cls, equations, nvars=None, names=None):
        if nvars is None:
            nvars = 1 + max((v for e in equations for v in e.variables()), default=-1)
        variables = [LabelVar("x", (i,), i) for i in range(nvars)]
        return cls(variables, list(equations), ["eq %d" % i for i in range(len(equations))])

    @property
    def names(self):
        return [v.name for v in self.variables]

    def jacobian_polys(self):
        if self._jac is None:
            self._jac = [
                {v: e.diff(v) for v in e.variables()} for e in self.equations
            ]
        return self._jac

    def expand(self, values):
        """Values for every full variable from values of the reduced ones."""
        out = [None] * len(self.full_variables)
        for i, full in enumerate(self.kept):
            out[full] = values[i]
        one = values[0] * 0 + 1 if len(values) else 1
        for full, (expr, _) in self.substitutions.items():
            out[full] = expr.evaluate(values, one=one)
        return out

    def counts(self):
        return len(self.variables), len(self.equations)

    def to_json(self):
        return json.dumps(
            {
                "schema": JSON_SCHEMA,
                "variables": self.names,
                "equations": [
                    {"tag": t, "terms": e.to_json()} for t, e in zip(self.tags, self.equations)
                ],
                "substitutions": [
                    {
                        "variable": self.full_variables[i].name,
                        "expression": expr.to_json(),
                        "reason": reason,
                    }
                    for i, (expr, reason) in sorted(self.substitutions.items())
                ],
            },
            indent=1,
        )

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        if data.get("schema") != JSON_SCHEMA:
            raise ValueError("unknown schema %r" % data.get("schema"))
        variables = [_var_from_name(nm, i) for i, nm in enumerate(data["variables"])]
        eqs = [Poly.from_json(e["terms"]) for e in data["equations"]]
        tags = [e["tag"] for e in data["equations"]]
        return cls(variables, eqs, tags)


def _var_from_name(name, index):
    if name.startswith("w"):
        return LabelVar("w", (int(name[1:]),), index)
    if name.startswith("u"):
        return LabelVar("u", (int(name[1:-1]), name[-1]), index)
    return LabelVar("x", (index,), index)


def check_candidate(d):
    if not is_alternating(d):
        raise UnsupportedDiagram("diagram is not alternating")
    if d.n < 4:
        raise NotHyperbolicCandidate("fewer than 4 crossings")
    if not is_reduced(d):
        raise NotHyperbolicCandidate("diagram has a nugatory crossing")
    if is_two_braid(d):
        raise NotHyperbolicCandidate("(2, n) torus link diagram")


def full_system(d):
    labels = LabelSystem(d)
    eqs, tags = [], []
    for r in d.regions:
        for k, p in zip(("01", "10", "00-11"), region_relation(r, labels)):
            eqs.append(p)
            tags.append("region %d %s" % (r.id, k))
    for a in d.arcs:
        eqs.append(arc_relation(a, labels))
        tags.append("arc %d" % a.id)
    return PolySystem(list(labels.variables), eqs, tags, diagram=d)


class _Classes:
    """Union-find with additive offsets: value(x) = value(root) + offset."""

    ZERO = -1

    def __init__(self):
        self.parent = {}

    def find(self, x):
        off = 0
        while x in self.parent:
            x, o = self.parent[x]
            off += o
        return x, off

    def union(self, x, y, diff):
        """Impose value(x) - value(y) = diff."""
        rx, ox = self.find(x)
        ry, oy = self.find(y)
        if rx == ry:
            return ox - oy == diff
        # keep ZERO, else the smaller index, as the root
        if rx == self.ZERO or (ry != self.ZERO and rx < ry):
            self.parent[ry] = (rx, ox - oy - diff)
        else:
            self.parent[rx] = (ry, oy - ox + diff)
        return True


def build_system(d, reduce=True):
    """Region and arc equations for a reduced alternating diagram.

    With ``reduce`` the relations forced by bigons (both edge labels 0, equal
    crossing labels) and the arc relations are substituted eagerly.
    """
    check_candidate(d)
    full = full_system(d)
    if not reduce:
        return full
    labels = LabelSystem(d)
    classes = _Classes()
    reasons = {}

    def impose(x, y, diff, why):
        if not classes.union(x, y, diff):
            raise NotHyperbolicCandidate("forced label relations are inconsistent (%s)" % why)
        reasons.setdefault(x, why)
        if y != _Classes.ZERO:
            reasons.setdefault(y, why)

    for r in d.regions:
        if r.size == 2:
            why = "bigon region %d" % r.id
            for arc, side in r.edges:
                impose(labels.u(arc, side), _Classes.ZERO, 0, why)
            impose(labels.w(r.corners[0]), labels.w(r.corners[1]), 0, why)
    for a in d.arcs:
        impose(labels.u(a.id, LEFT), labels.u(a.id, RIGHT), arc_sign(a), "arc %d" % a.id)

    roots = sorted({classes.find(i)[0] for i in range(len(labels))} - {_Classes.ZERO})
    new_index = {full_i: k for k, full_i in enumerate(roots)}
    subs_full = {}
    substitutions = {}
    for i in range(len(labels)):
        root, off = classes.find(i)
        if root == _Classes.ZERO:
            expr = Poly.const(off)
        else:
            expr = Poly.var(new_index[root]) + off
        subs_full[i] = expr
        if root != i:
            substitutions[i] = (expr, reasons.get(i, ""))

    eqs, tags = [], []
    seen = set()
    for e, tag in zip(full.equations, full.tags):
        if tag.startswith("arc"):
            continue
        p = e.substitute(subs_full)
        if p.is_zero():
            continue
        key = frozenset(p.terms.items())
        neg = frozenset((-p).terms.items())
        if key in seen or neg in seen:
            continue
        seen.add(key)
        eqs.append(p)
        tags.append(tag)
    variables = [
        LabelVar(full.variables[i].kind, full.variables[i].key, k) for k, i in enumerate(roots)
    ]
    return PolySystem(
        variables,
        eqs,
        tags,
        full_variables=list(full.variables),
        substitutions=substitutions,
        kept=list(roots),
        diagram=d,
    )
