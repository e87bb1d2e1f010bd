"""Sparse multivariate polynomials with exact coefficients.

A monomial is a tuple of ``(variable index, exponent)`` pairs sorted by
variable index; the empty tuple is the constant monomial.  Coefficients are
Python ints (or Fractions, where the caller needs them).  Instances are
treated as immutable.
"""

from fractions import Fraction


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        va, ea = a[i]
        vb, eb = b[j]
        if va == vb:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, c):
        return cls({(): c})

    @classmethod
    def var(cls, i):
        return cls({((i, 1),): 1})

    @staticmethod
    def _coerce(other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return Poly(terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                terms[m] = terms.get(m, 0) + ca * cb
        return Poly(terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Poly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not m for m in self.terms)

    def constant_term(self):
        return self.terms.get((), 0)

    def variables(self):
        return sorted({v for m in self.terms for v, _ in m})

    def total_degree(self):
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def degree_in(self, var):
        return max((e for m in self.terms for v, e in m if v == var), default=0)

    def monomials(self):
        """Terms in the fixed evaluation order (graded, then lexicographic)."""
        return sorted(self.terms.items(), key=lambda t: (sum(e for _, e in t[0]), t[0]))

    def linear_coefficients(self):
        """Return ``(const, {var: coeff})`` if the polynomial is affine, else None."""
        const = 0
        lin = {}
        for m, c in self.terms.items():
            if not m:
                const = c
            elif len(m) == 1 and m[0][1] == 1:
                lin[m[0][0]] = c
            else:
                return None
        return const, lin

    def evaluate(self, values, one=1):
        """Evaluate at ``values[var]``; ``one`` fixes the result type for constants."""
        total = one * 0
        cache = {}
        for m, c in self.monomials():
            term = one * c
            for v, e in m:
                key = (v, e)
                p = cache.get(key)
                if p is None:
                    p = values[v] ** e
                    cache[key] = p
                term = term * p
            total = total + term
        return total

    def diff(self, var):
        terms = {}
        for m, c in self.terms.items():
            new = []
            k = 0
            for v, e in m:
                if v == var:
                    k = e
                    if e > 1:
                        new.append((v, e - 1))
                else:
                    new.append((v, e))
            if k:
                nm = tuple(new)
                terms[nm] = terms.get(nm, 0) + c * k
        return Poly(terms)

    def substitute(self, mapping):
        """Replace variables by polynomials; unmapped variables are kept."""
        out = Poly()
        for m, c in self.terms.items():
            term = Poly.const(c)
            rest = []
            for v, e in m:
                if v in mapping:
                    term = term * (mapping[v] ** e)
                else:
                    rest.append((v, e))
            if rest:
                term = term * Poly({tuple(rest): 1})
            out = out + term
        return out

    def rename(self, index_map):
        """Reindex variables through ``index_map`` (old -> new)."""
        terms = {}
        for m, c in self.terms.items():
            nm = tuple(sorted((index_map[v], e) for v, e in m))
            terms[nm] = terms.get(nm, 0) + c
        return Poly(terms)

    def to_json(self):
        return [[_num_json(c), [[v, e] for v, e in m]] for m, c in self.monomials()]

    @classmethod
    def from_json(cls, data):
        terms = {}
        for c, mono in data:
            m = tuple(sorted((int(v), int(e)) for v, e in mono))
            terms[m] = terms.get(m, 0) + _num_parse(c)
        return cls(terms)

    def format(self, names=None):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.monomials():
            mono = "*".join(
                (names[v] if names else f"x{v}") + (f"^{e}" if e > 1 else "") for v, e in m
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self.format()})"


def _num_json(c):
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    return int(c)


def _num_parse(c):
    if isinstance(c, str):
        return Fraction(c)
    return int(c)
