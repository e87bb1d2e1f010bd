"""Exact elimination for two-bridge links.

The label system of the standard alternating diagram is solved by ordered
substitution: each step takes a relation that is linear in one unresolved
label (over the rational functions of the crossing label ``w1`` of the first
crossing) and substitutes the solution everywhere.  Whatever the remaining
relations share is the polynomial ``P(w1)``.  sympy does the exact algebra.
"""

from dataclasses import dataclass, field
from math import prod

import mpmath
import sympy

from .diagram import continued_fraction  # noqa: F401  (re-exported)
from .errors import DegenerateSystem, DegreeBoundViolated, EliminationStuck, RootMismatch
from .fieldrec import minimal_polynomial, precision_floor, same_field


@dataclass
class EliminationResult:
    poly: sympy.Poly  # P in w1, integer coefficients, content 1
    chain: dict  # reduced variable index -> sympy expression in w1
    order: list  # (variable index, equation tag, how) in resolution order
    pivot: int
    symbol: sympy.Symbol
    names: list
    spurious_factors: list = field(default_factory=list)
    identity_ok: bool = False

    @property
    def degree(self):
        return self.poly.degree()

    def coeffs(self):
        """Integer coefficients of P, constant term first."""
        return [int(c) for c in reversed(self.poly.all_coeffs())]

    def chain_value(self, var, w1):
        expr = self.chain[var]
        num, den = sympy.fraction(sympy.together(expr))
        pn = sympy.Poly(num, self.symbol)
        pd = sympy.Poly(den, self.symbol)
        return _horner(pn, w1) / _horner(pd, w1)


def _horner(p, z):
    acc = 0
    for c in p.all_coeffs():
        acc = acc * z + mpmath.mpf(int(sympy.numer(c))) / int(sympy.denom(c))
    return acc


def to_sympy(p, symbols):
    """A label polynomial as a sympy expression."""
    out = sympy.Integer(0)
    for mono, c in p.terms.items():
        term = sympy.Rational(c)
        for v, e in mono:
            term *= symbols[v] ** e
        out += term
    return out


def _numerator(expr):
    num, _ = sympy.fraction(sympy.cancel(sympy.together(expr)))
    return sympy.expand(num)


def pivot_index(system):
    """Reduced variable holding the label of crossing 0."""
    for i, full in enumerate(system.kept):
        var = system.full_variables[full]
        if var.kind == "w" and var.key == (0,):
            return i
    expr, _ = system.substitutions[0]
    (var,) = expr.variables()
    return var


def eliminate(system, pivot=None):
    """Ordered substitution down to one polynomial in the pivot label."""
    if pivot is None:
        pivot = pivot_index(system)
    names = system.names
    syms = [sympy.Symbol(nm) for nm in names]
    w1 = syms[pivot]
    chain = {pivot: w1}
    order = [(pivot, None, "pivot")]
    pending = [(tag, to_sympy(e, syms)) for e, tag in zip(system.equations, system.tags)]

    def current(expr):
        return _numerator(expr.subs({syms[v]: chain[v] for v in chain if v != pivot}, simultaneous=True))

    while len(chain) < len(syms):
        step = None
        fallback = None
        for k, (tag, expr) in enumerate(pending):
            num = current(expr)
            if num == 0:
                continue
            free = [s for s in num.free_symbols if s != w1]
            if len(free) != 1:
                continue
            x = free[0]
            px = sympy.Poly(num, x)
            if px.degree() == 1:
                a, b = px.all_coeffs()
                if sympy.expand(a) != 0:
                    step = (k, tag, x, sympy.cancel(-b / a))
                    break
            elif fallback is None:
                fallback = (k, tag, x, num)
        if step is None:
            if fallback is None:
                raise EliminationStuck("no relation involves exactly one unresolved label")
            step = _resultant_step(pending, current, fallback, w1)
        k, tag, x, value = step
        idx = syms.index(x)
        chain[idx] = value
        order.append((idx, tag, "linear"))
        pending.pop(k)

    rest = [current(expr) for _, expr in pending]
    rest = [sympy.Poly(r, w1) for r in rest if r != 0]
    if not rest:
        raise DegenerateSystem("every relation is satisfied identically; P is undetermined")
    g = rest[0]
    for r in rest[1:]:
        g = sympy.gcd(g, r)
    if g.degree() < 1:
        raise DegenerateSystem("the remaining relations have no common root")
    g = _integer_primitive(g)
    res = EliminationResult(g, chain, order, pivot, w1, names)
    res.identity_ok = check_identity(res, system)
    return res


def _resultant_step(pending, current, fallback, w1):
    """A second relation in the same unknown; its resultant pins w1."""
    k, tag, x, num = fallback
    for j, (tag2, expr2) in enumerate(pending):
        if j == k:
            continue
        other = current(expr2)
        if other == 0 or x not in other.free_symbols:
            continue
        if [s for s in other.free_symbols if s not in (w1, x)]:
            continue
        g = sympy.gcd(sympy.Poly(num, x, w1), sympy.Poly(other, x, w1))
        if g.degree(x) == 1:
            a, b = sympy.Poly(g.as_expr(), x).all_coeffs()
            return k, tag, x, sympy.cancel(-b / a)
    raise EliminationStuck("relation %s is not linear in %s and no resultant resolves it" % (tag, x))


def _integer_primitive(p):
    _, q = p.clear_denoms()
    q = q.primitive()[1]
    if q.LC() < 0:
        q = -q
    return q


def check_identity(result, system):
    """Every relation vanishes modulo P once the chain is substituted."""
    syms = [sympy.Symbol(nm) for nm in result.names]
    sub = {syms[v]: e for v, e in result.chain.items() if v != result.pivot}
    for e in system.equations:
        num = _numerator(to_sympy(e, syms).subs(sub, simultaneous=True))
        if num != 0 and not sympy.Poly(num, result.symbol).rem(result.poly).is_zero:
            return False
    return True


def degree_cap(twists):
    return prod(max(m, 2) ** 3 for m in twists)


def required_bits(bits, max_degree, height_bits=64):
    return max(bits, precision_floor(max_degree, height_bits))


def riley_bound(alpha):
    return (alpha - 1) // 2


@dataclass
class Certification:
    residual: object
    factor: object  # MinimalPolynomial
    factor_divides: bool
    degree_bound: int
    bound_ok: bool
    raw_degree: int
    degree_cap: int
    cap_ok: bool
    same_field: object = None
    max_label_error: object = None
    spurious: list = field(default_factory=list)


def certify(result, numeric_w1, bits, alpha, twists, generator=None, numeric_values=None,
            max_degree=None, height_bits=64, strict=False):
    """Check P against the numeric geometric root.

    ``generator`` is ``(value, degree)`` of the numeric field generator and
    ``numeric_values`` the reduced label values of the numeric solution.
    The degree sweep runs up to ``deg P`` unless ``max_degree`` is given;
    ``numeric_w1`` must be accurate to ``required_bits(...)``.
    """
    if max_degree is None:
        max_degree = result.degree
    tol = mpmath.mpf(2) ** (-bits // 4)
    rec_bits = required_bits(bits, max_degree, height_bits)
    with mpmath.workprec(rec_bits + 32):
        w1 = mpmath.mpc(numeric_w1)
        res = abs(_horner(result.poly, w1))
        if not res < tol:
            raise RootMismatch("|P(w1)| = %s is not below 2^-%d" % (mpmath.nstr(res, 5), bits // 4))
        mp = minimal_polynomial(w1, max_degree, height_bits, rec_bits)
    x = result.symbol
    factor = sympy.Poly(list(reversed(mp.coeffs)), x)
    quo, rem = sympy.div(result.poly, factor)
    if not rem.is_zero:
        raise RootMismatch("minimal polynomial of w1 does not divide P")
    spurious = []
    for f, _ in sympy.factor_list(result.poly)[1]:
        f = _integer_primitive(f)
        if f.degree() > 0 and f != factor:
            spurious.append([int(c) for c in reversed(f.all_coeffs())])
    result.spurious_factors = spurious
    bound = riley_bound(alpha)
    cap = degree_cap(twists)
    cert = Certification(
        residual=res,
        factor=mp,
        factor_divides=True,
        degree_bound=bound,
        bound_ok=mp.degree <= bound,
        raw_degree=result.degree,
        degree_cap=cap,
        cap_ok=result.degree <= cap,
        spurious=spurious,
    )
    if generator is not None:
        gval, gdeg = generator
        with mpmath.workprec(rec_bits + 32):
            cert.same_field = same_field(gval, w1, gdeg, rec_bits, height_bits, deg2=mp.degree).equal
    if numeric_values is not None:
        with mpmath.workprec(rec_bits + 32):
            cert.max_label_error = max(
                abs(result.chain_value(v, w1) - numeric_values[v]) for v in result.chain
            )
    if strict and not cert.bound_ok:
        raise DegreeBoundViolated(
            "retained factor has degree %d > (alpha-1)/2 = %d" % (mp.degree, bound)
        )
    return cert
