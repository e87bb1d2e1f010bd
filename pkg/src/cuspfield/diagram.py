"""Link diagrams: parsing, construction and face structure.

Everything funnels into planar-diagram (PD) form.  A crossing ``X[a,b,c,d]``
lists its four arc labels counterclockwise starting from the incoming
under-strand, so ``a -> c`` is the under-strand and ``b``/``d`` the
over-strand.  Regions are traced with the face kept on the left; an arc
therefore meets a region either on its left side (the traversal runs along
the arc's orientation) or on its right side.
"""

import itertools
import re
from dataclasses import dataclass
from math import gcd

from .errors import (
    DisconnectedDiagram,
    InconsistentDiagram,
    InvalidDTRealization,
    InvalidFraction,
    MalformedInput,
)

LEFT, RIGHT = "L", "R"

# brute-force DT realization searches 2**(n-1) embeddings
MAX_DT_CROSSINGS = 16


@dataclass(frozen=True)
class Crossing:
    id: int
    slots: tuple  # arc ids, counterclockwise from the incoming under-strand
    sign: int

    @property
    def under(self):
        return self.slots[0], self.slots[2]

    @property
    def over(self):
        return self.slots[1], self.slots[3]


@dataclass(frozen=True)
class Arc:
    id: int
    label: int
    tail: tuple  # (crossing id, slot) where the arc leaves a crossing
    head: tuple  # (crossing id, slot) where it enters the next one
    component: int

    @property
    def starts_over(self):
        return self.tail[1] % 2 == 1

    @property
    def ends_over(self):
        return self.head[1] % 2 == 1


@dataclass(frozen=True)
class Region:
    """One face: ``corners[i]`` is followed by the edge ``edges[i]``.

    ``edges[i]`` is ``(arc id, side)`` and runs from ``corners[i]`` to
    ``corners[i + 1]``.
    """

    id: int
    corners: tuple
    edges: tuple

    @property
    def size(self):
        return len(self.corners)

    def rotated(self, k):
        k %= self.size
        return Region(self.id, self.corners[k:] + self.corners[:k], self.edges[k:] + self.edges[:k])

    def reversed_sides(self):
        return tuple(arc for arc, _ in self.edges)


@dataclass(frozen=True)
class TwoBridgeForm:
    alpha: int
    beta: int
    twists: tuple

    def fraction(self):
        """Rebuild alpha/beta from the twists as an exact (num, den) pair."""
        num, den = self.twists[-1], 1
        for m in reversed(self.twists[:-1]):
            num, den = m * num + den, num
        return num, den


@dataclass(frozen=True)
class LinkDiagram:
    crossings: tuple
    arcs: tuple
    regions: tuple
    components: int

    @property
    def n(self):
        return len(self.crossings)

    def pd_code(self):
        """Canonical PD tuples: arcs renumbered 1.. along each component."""
        order = []
        seen = set()
        for comp in range(self.components):
            start = min(a.id for a in self.arcs if a.component == comp)
            a = start
            while a not in seen:
                seen.add(a)
                order.append(a)
                c, s = self.arcs[a].head
                a = self.crossings[c].slots[(s + 2) % 4]
        relabel = {a: i + 1 for i, a in enumerate(order)}
        return [tuple(relabel[a] for a in x.slots) for x in self.crossings]

    def to_pd(self):
        return " ".join("X[%d,%d,%d,%d]" % x for x in self.pd_code())

    def corner_regions(self, c):
        """Region ids at the four corners of crossing ``c``; corner q lies between slots q and q+1."""
        out = [None] * 4
        for r in self.regions:
            for corner, (arc, side) in zip(r.corners, r.edges):
                if corner == c:
                    a = self.arcs[arc]
                    out[a.tail[1] if side == LEFT else a.head[1]] = r.id
        return out

    def side_counts(self):
        return sorted(r.size for r in self.regions)


# ---------------------------------------------------------------------------
# construction from PD tuples


def _occurrences(pd):
    occ = {}
    for c, x in enumerate(pd):
        for s, lab in enumerate(x):
            occ.setdefault(lab, []).append((c, s))
    return occ


def _trace_faces(pd, occ):
    """Faces as lists of darts (crossing, slot), each dart leaving through its slot."""

    def other(c, s):
        p, q = occ[pd[c][s]]
        return q if p == (c, s) else p

    seen = set()
    faces = []
    for c in range(len(pd)):
        for s in range(4):
            if (c, s) in seen:
                continue
            face = []
            d = (c, s)
            while d not in seen:
                seen.add(d)
                face.append(d)
                c2, s2 = other(*d)
                d = (c2, (s2 - 1) % 4)
            if d != (c, s):
                raise InconsistentDiagram("face traversal does not close", detail=d)
            faces.append(face)
    return faces


def _orient(pd, occ):
    """Map (crossing, slot) -> True if the arc leaves the crossing there."""
    out = {}
    for c in range(len(pd)):
        out[(c, 0)] = False
        out[(c, 2)] = True

    def settle(key, value):
        if key in out:
            if out[key] != value:
                raise InconsistentDiagram(
                    "arc orientations conflict at crossing %d" % key[0], detail=key
                )
            return False
        out[key] = value
        return True

    def propagate():
        changed = True
        while changed:
            changed = False
            for p, q in occ.values():
                if p in out:
                    changed |= settle(q, not out[p])
                if q in out:
                    changed |= settle(p, not out[q])
            for c in range(len(pd)):
                for s, t in ((1, 3), (3, 1)):
                    if (c, s) in out:
                        changed |= settle((c, t), not out[(c, s)])

    propagate()
    # components that only ever pass over: fall back on consecutive labelling
    for c, x in enumerate(pd):
        if (c, 1) not in out:
            b, d = x[1], x[3]
            out[(c, 1)] = not (d - b == 1 or b - d > 1)
            propagate()
    return out


def build_diagram(pd):
    """Build a LinkDiagram from PD tuples (any positive labels)."""
    pd = [tuple(int(v) for v in x) for x in pd]
    if not pd:
        raise MalformedInput("empty diagram")
    occ = _occurrences(pd)
    bad = sorted(lab for lab, places in occ.items() if len(places) != 2)
    if bad:
        raise InconsistentDiagram(
            "arc label %d appears %d time(s), expected 2" % (bad[0], len(occ[bad[0]])),
            detail=bad[0],
        )
    n = len(pd)

    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (c1, _), (c2, _) in occ.values():
        parent[find(c1)] = find(c2)
    if len({find(i) for i in range(n)}) > 1:
        raise DisconnectedDiagram("diagram is not connected")

    out = _orient(pd, occ)
    faces = _trace_faces(pd, occ)
    if len(faces) != n + 2:
        raise InconsistentDiagram(
            "not a planar diagram: %d faces for %d crossings" % (len(faces), n)
        )

    labels = sorted(occ)
    arc_id = {lab: i for i, lab in enumerate(labels)}
    ends = {}
    for lab, (p, q) in occ.items():
        tail, head = (p, q) if out[p] else (q, p)
        ends[arc_id[lab]] = (tail, head)

    crossings = []
    for c, x in enumerate(pd):
        sign = 1 if not out[(c, 3)] else -1
        crossings.append(Crossing(c, tuple(arc_id[lab] for lab in x), sign))

    component = {}
    ncomp = 0
    for a in range(len(labels)):
        if a in component:
            continue
        b = a
        while b not in component:
            component[b] = ncomp
            c, s = ends[b][1]
            b = crossings[c].slots[(s + 2) % 4]
        ncomp += 1

    arcs = tuple(
        Arc(a, labels[a], ends[a][0], ends[a][1], component[a]) for a in range(len(labels))
    )

    raw = []
    for face in faces:
        corners = tuple(c for c, _ in face)
        edges = tuple(
            (crossings[c].slots[s], LEFT if out[(c, s)] else RIGHT) for c, s in face
        )
        k = min(range(len(edges)), key=lambda i: edges[i])
        raw.append((corners[k:] + corners[:k], edges[k:] + edges[:k]))
    raw.sort(key=lambda r: r[1][0])
    regions = tuple(Region(i, cs, es) for i, (cs, es) in enumerate(raw))
    return LinkDiagram(tuple(crossings), arcs, regions, ncomp)


def regions(d):
    return list(d.regions)


# ---------------------------------------------------------------------------
# text formats

_PD_ITEM = re.compile(r"X\s*\[\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\]")
_SEP = re.compile(r"[\s,]*")


def parse_pd(text):
    """Parse ``X[a,b,c,d] X[...] ...`` (optionally wrapped in ``PD[...]``)."""
    if not isinstance(text, str):
        raise MalformedInput("PD input must be text")
    body = text.strip()
    offset = len(text) - len(text.lstrip())
    m = re.match(r"PD\s*\[(.*)\]\s*$", body, re.S)
    if m:
        offset += m.start(1)
        body = m.group(1)
    pos = 0
    items = []
    while True:
        pos = _SEP.match(body, pos).end()
        if pos >= len(body):
            break
        m = _PD_ITEM.match(body, pos)
        if not m:
            raise MalformedInput(
                "expected X[a,b,c,d] at position %d" % (pos + offset), detail=pos + offset
            )
        vals = tuple(int(v) for v in m.groups())
        if 0 in vals:
            raise MalformedInput(
                "arc labels must be positive (position %d)" % (pos + offset), detail=pos + offset
            )
        items.append(vals)
        pos = m.end()
    if not items:
        raise MalformedInput("no crossings found", detail=offset)
    return build_diagram(items)


def _int_tokens(text, what):
    toks = []
    for m in re.finditer(r"[^\s,\[\]()]+", text):
        tok = m.group(0)
        if tok.upper() == "DT":
            continue
        try:
            toks.append((int(tok), m.start()))
        except ValueError:
            raise MalformedInput(
                "bad %s entry %r at position %d" % (what, tok, m.start()), detail=m.start()
            ) from None
    return toks


def parse_dt(text):
    """Parse a Dowker-Thistlethwaite code of a knot, e.g. ``"4 6 2"``.

    Positive entries put the even-numbered pass under the odd one, so an
    all-positive code gives an alternating diagram.
    """
    if not isinstance(text, str):
        raise MalformedInput("DT input must be text")
    toks = _int_tokens(text, "DT")
    if not toks:
        raise MalformedInput("empty DT code", detail=0)
    for v, pos in toks:
        if v == 0 or v % 2:
            raise MalformedInput("DT entries must be nonzero even integers (%d at position %d)" % (v, pos), detail=pos)
    code = [v for v, _ in toks]
    n = len(code)
    if sorted(abs(v) for v in code) != list(range(2, 2 * n + 1, 2)):
        raise MalformedInput("DT code must use each of 2, 4, ..., %d once" % (2 * n))
    if n > MAX_DT_CROSSINGS:
        raise InvalidDTRealization(
            "DT realization search is limited to %d crossings" % MAX_DT_CROSSINGS
        )
    m = 2 * n

    def in_edge(p):
        return m if p == 1 else p - 1

    # half-edges tagged (label, pass, role) so equal labels stay distinguishable
    crossings = []
    for i, v in enumerate(code):
        odd, even = 2 * i + 1, abs(v)
        under = even if v > 0 else odd
        crossings.append((odd, even, under))

    def rotation(odd, even, flip):
        io, oo, ie, oe = (in_edge(odd), odd, "in"), (odd, odd, "out"), (in_edge(even), even, "in"), (even, even, "out")
        if flip:
            return [io, oe, oo, ie]
        return [io, ie, oo, oe]

    def as_pd(flips):
        pd = []
        for (odd, even, under), flip in zip(crossings, flips):
            rot = rotation(odd, even, flip)
            k = next(j for j, h in enumerate(rot) if h[1] == under and h[2] == "in")
            rot = rot[k:] + rot[:k]
            pd.append(tuple(h[0] for h in rot))
        return pd

    for bits in itertools.product((False, True), repeat=n - 1):
        pd = as_pd((False,) + bits)
        occ = _occurrences(pd)
        if len(_trace_faces(pd, occ)) == n + 2:
            return build_diagram(pd)
    raise InvalidDTRealization("DT code has no planar realization")


_TWO_BRIDGE = re.compile(r"\s*(-?\d+)\s*/\s*(-?\d+)\s*$")


def parse_fraction(text):
    m = _TWO_BRIDGE.match(text)
    if not m:
        raise MalformedInput("expected a fraction alpha/beta, got %r" % text)
    return int(m.group(1)), int(m.group(2))


# ---------------------------------------------------------------------------
# braids and plats


class _Strands:
    """Stack crossings on vertical strands; positions are 0-based."""

    def __init__(self, start):
        self.cur = list(start)
        self.next = max(start) + 1
        self.rotations = []  # (BL, BR, TR, TL, positive?) counterclockwise
        self.touched = set()
        self.parent = {}

    def fresh(self):
        self.next += 1
        return self.next - 1

    def cross(self, i, positive):
        bl, br = self.cur[i], self.cur[i + 1]
        tr, tl = self.fresh(), self.fresh()
        self.rotations.append((bl, br, tr, tl, positive))
        self.cur[i], self.cur[i + 1] = tl, tr
        self.touched.update((i, i + 1))

    def find(self, a):
        while a in self.parent:
            a = self.parent[a]
        return a

    def join(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.parent[max(a, b)] = min(a, b)


def _parse_word(word):
    if not isinstance(word, str) or not word:
        raise MalformedInput("empty braid word")
    for i, ch in enumerate(word):
        if not ("a" <= ch <= "z" or "A" <= ch <= "Z"):
            raise MalformedInput("bad braid letter %r at position %d" % (ch, i), detail=i)
    return [(ord(ch.lower()) - ord("a"), ch.islower()) for ch in word]


def from_braid(word, repeat=1):
    """Closure of ``word * repeat``; a-z are generators, A-Z their inverses."""
    letters = _parse_word(word)
    if not isinstance(repeat, int) or repeat < 1:
        raise MalformedInput("repeat must be a positive integer")
    letters = letters * repeat
    width = max(g for g, _ in letters) + 2
    st = _Strands(range(1, width + 1))
    for g, positive in letters:
        st.cross(g, positive)
    if len(st.touched) < width:
        raise DisconnectedDiagram("braid closure has a strand with no crossings")
    for p in range(width):
        st.join(st.cur[p], p + 1)
    pd = []
    for bl, br, tr, tl, positive in st.rotations:
        bl, br, tr, tl = (st.find(x) for x in (bl, br, tr, tl))
        # positive: the strand from bottom-left passes over
        pd.append((br, tr, tl, bl) if positive else (bl, br, tr, tl))
    return build_diagram(pd)


def continued_fraction(alpha, beta):
    """All-positive expansion alpha/beta = m1 + 1/(m2 + ... + 1/mk)."""
    _check_fraction(alpha, beta)
    out = []
    a, b = alpha, beta
    while b:
        q, r = divmod(a, b)
        out.append(q)
        a, b = b, r
    return out


def _check_fraction(alpha, beta):
    if not (isinstance(alpha, int) and isinstance(beta, int)):
        raise InvalidFraction("alpha and beta must be integers")
    if not 0 < beta < alpha:
        raise InvalidFraction("need 0 < beta < alpha, got %d/%d" % (alpha, beta))
    if gcd(alpha, beta) != 1:
        raise InvalidFraction("gcd(%d, %d) != 1" % (alpha, beta))


def alternating_pd(rotations):
    """Turn an unsigned planar 4-valent graph into an alternating PD code.

    ``rotations`` lists each vertex's four edge labels counterclockwise.  A
    checkerboard colouring of the faces picks the over-strand at every vertex
    so that the diagram alternates; component orientations are chosen by
    walking from the lowest label.
    """
    rot = [tuple(r) for r in rotations]
    occ = _occurrences(rot)
    faces = _trace_faces(rot, occ)
    face_of = {}
    for f, face in enumerate(faces):
        for dart in face:
            face_of[dart] = f
    colour = {0: 0}
    stack = [0]
    while stack:
        f = stack.pop()
        for dart in faces[f]:
            p, q = occ[rot[dart[0]][dart[1]]]
            g = face_of[q if p == dart else p]
            if g not in colour:
                colour[g] = 1 - colour[f]
                stack.append(g)
            elif colour[g] == colour[f]:
                raise InconsistentDiagram("faces are not 2-colourable")

    leaving = {}
    for lab in sorted(occ):
        if occ[lab][0] in leaving or occ[lab][1] in leaving:
            continue
        dart = occ[lab][0]
        while dart not in leaving:
            leaving[dart] = True
            p, q = occ[rot[dart[0]][dart[1]]]
            c, s = q if p == dart else p
            leaving[(c, s)] = False
            dart = (c, (s + 2) % 4)

    pd = []
    for c, r in enumerate(rot):
        over_even = colour[face_of[(c, 0)]] == 0
        under = (1, 3) if over_even else (0, 2)
        start = under[0] if not leaving[(c, under[0])] else under[1]
        pd.append(r[start:] + r[:start])
    return pd


def from_two_bridge(alpha, beta):
    """Standard alternating diagram of the two-bridge link alpha/beta.

    beta is canonicalised to beta <= alpha/2 (mirror image otherwise).
    """
    _check_fraction(alpha, beta)
    if 2 * beta > alpha:
        beta = alpha - beta
    twists = continued_fraction(alpha, beta)
    form = TwoBridgeForm(alpha, beta, tuple(twists))

    runs = list(twists)
    if len(runs) % 2 == 0:
        # 4-plat closure needs an odd number of twist runs; m -> (m-1, 1)
        # leaves the same planar twist region
        runs[-1] -= 1
        runs.append(1)
    st = _Strands([1, 1, 2, 2])
    for k, m in enumerate(runs):
        pos = 1 if k % 2 == 0 else 0
        for _ in range(m):
            st.cross(pos, True)
    st.join(st.cur[0], st.cur[1])
    st.join(st.cur[2], st.cur[3])
    rotations = [tuple(st.find(x) for x in r[:4]) for r in st.rotations]
    return form, build_diagram(alternating_pd(rotations))


# ---------------------------------------------------------------------------
# predicates


def component_passes(d, comp):
    """Sequence of (crossing, over?) met when walking a component."""
    start = min(a.id for a in d.arcs if a.component == comp)
    out = []
    a = start
    while True:
        c, s = d.arcs[a].head
        out.append((c, s % 2 == 1))
        a = d.crossings[c].slots[(s + 2) % 4]
        if a == start:
            return out


def is_alternating(d):
    for comp in range(d.components):
        passes = component_passes(d, comp)
        for (_, o1), (_, o2) in zip(passes, passes[1:] + passes[:1]):
            if o1 == o2:
                return False
    return True


def nugatory_crossings(d):
    return [c.id for c in d.crossings if len(set(d.corner_regions(c.id))) < 4]


def is_reduced(d):
    return not nugatory_crossings(d)


def is_two_braid(d):
    """True when every region but two is a bigon: the (2, n) torus-link diagram."""
    sizes = d.side_counts()
    return sizes.count(2) >= len(sizes) - 2


def coloring_determinant(d):
    """|det| of the reduced Fox colouring matrix (the link determinant)."""
    from fractions import Fraction

    # strands are maximal over-arcs: an arc ending in an over-pass continues
    parent = list(range(len(d.arcs)))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for a in d.arcs:
        c, s = a.head
        if s % 2 == 1:
            nxt = d.crossings[c].slots[(s + 2) % 4]
            parent[find(a.id)] = find(nxt)
    names = sorted({find(a.id) for a in d.arcs})
    idx = {s: i for i, s in enumerate(names)}
    rows = []
    for x in d.crossings:
        row = [Fraction(0)] * len(names)
        row[idx[find(x.slots[1])]] += 2
        row[idx[find(x.slots[0])]] -= 1
        row[idx[find(x.slots[2])]] -= 1
        rows.append(row)
    mat = [r[1:] for r in rows[1:]]
    size = len(mat)
    det = Fraction(1)
    for i in range(size):
        piv = next((r for r in range(i, size) if mat[r][i] != 0), None)
        if piv is None:
            return 0
        if piv != i:
            mat[i], mat[piv] = mat[piv], mat[i]
            det = -det
        det *= mat[i][i]
        for r in range(i + 1, size):
            f = mat[r][i] / mat[i][i]
            if f:
                for k in range(i, size):
                    mat[r][k] -= f * mat[i][k]
    return abs(int(det))
