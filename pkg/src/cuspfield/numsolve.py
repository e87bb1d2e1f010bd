"""High-precision evaluation, Gauss-Newton refinement and multistart search.

Complex values at working precision are ``mpmath.mpc`` (binary mantissa,
round-to-nearest).  The multistart stage runs damped Gauss-Newton in double
precision and hands converged points to :func:`refine`, which doubles the
precision stage by stage.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .poly import Poly

from .errors import (
    NoDecrease,
    NoGeometricSolution,
    NoSolutionFound,
    PrecisionUnderflow,
    RefinementStalled,
    SingularJacobian,
)

BigComplex = mpmath.mpc

MODULUS_RANGE = (0.05, 1.5)
MAX_HALVINGS = 20
FLOAT_ITERATIONS = 80
FLOAT_TOL = 1e-10
# points whose crossing labels vanish are not PGL labellings
DEGENERATE_W = 1e-6


def _check_bits(bits):
    if bits < 32:
        raise PrecisionUnderflow("working precision must be at least 32 bits, got %d" % bits)


def worker_count():
    try:
        return max(1, int(os.environ.get("CUSPFIELD_THREADS", "1")))
    except ValueError:
        return 1


def to_big(x):
    return mpmath.mpc(x)


def decimal_string(x, bits):
    digits = max(1, int(bits * 0.30103) + 1)
    return mpmath.nstr(x, digits, strip_zeros=False, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)


@dataclass
class Solution:
    values: list  # mpc per reduced system variable
    residual_norm: object
    precision_bits: int
    seed: int = None
    start_index: int = None
    log: list = field(default_factory=list)  # residual after each refinement step

    def assignment(self, system):
        return {v: x for v, x in zip(system.variables, self.values)}

    def full_values(self, system):
        with mpmath.workprec(self.precision_bits):
            return system.expand(self.values)


# ---------------------------------------------------------------------------
# high precision


def eval_system(system, x, bits=None):
    """Residual vector of every equation at ``x`` (mpc list)."""
    bits = bits or mpmath.mp.prec
    _check_bits(bits)
    with mpmath.workprec(bits):
        xs = [mpmath.mpc(v) for v in x]
        one = mpmath.mpc(1)
        return [e.evaluate(xs, one=one) for e in system.equations]


def residual_norm(system, x, bits=None):
    r = eval_system(system, x, bits)
    with mpmath.workprec(bits or mpmath.mp.prec):
        return max((abs(v) for v in r), default=mpmath.mpf(0))


def jacobian(system, x, bits=None):
    bits = bits or mpmath.mp.prec
    with mpmath.workprec(bits):
        xs = [mpmath.mpc(v) for v in x]
        one = mpmath.mpc(1)
        m = len(system.equations)
        n = len(system.variables)
        J = mpmath.matrix(m, n)
        for i, parts in enumerate(system.jacobian_polys()):
            for v, p in parts.items():
                J[i, v] = p.evaluate(xs, one=one)
        return J


def _normal_step(J, r):
    JH = J.H
    A = JH * J
    b = JH * r
    n = A.rows
    scale = max((abs(A[i, i]) for i in range(n)), default=0)
    if scale == 0:
        raise SingularJacobian("Jacobian vanishes")
    try:
        delta = mpmath.lu_solve(A, b)
    except ZeroDivisionError:
        raise SingularJacobian("normal equations are singular") from None
    # lu_solve does not flag near-singular pivots: check the solve itself
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec // 2)
    if mpmath.mnorm(A * delta - b, 1) > eps * (mpmath.mnorm(b, 1) + scale * mpmath.mnorm(delta, 1)) * 1e6:
        raise SingularJacobian("normal equations are singular")
    return delta


def _norm2(r):
    return mpmath.sqrt(mpmath.fsum(abs(v) ** 2 for v in r))


def newton_step(system, x, bits=None):
    """One damped Gauss-Newton step ``x - (J^H J)^-1 J^H r``.

    The step is halved until the residual 2-norm decreases (at most 20
    times); the Gauss-Newton direction is a descent direction for that norm.
    """
    bits = bits or mpmath.mp.prec
    _check_bits(bits)
    with mpmath.workprec(bits):
        xs = [mpmath.mpc(v) for v in x]
        r = eval_system(system, xs, bits)
        r0 = _norm2(r)
        if r0 == 0:
            return xs
        J = jacobian(system, xs, bits)
        for j in range(J.cols):
            if all(J[i, j] == 0 for i in range(J.rows)):
                raise SingularJacobian("Jacobian column %d vanishes" % j)
        delta = _normal_step(J, mpmath.matrix(r))
        t = mpmath.mpf(1)
        for _ in range(MAX_HALVINGS + 1):
            cand = [xi - t * delta[i] for i, xi in enumerate(xs)]
            rc = _norm2(eval_system(system, cand, bits))
            if rc < r0:
                return cand
            t /= 2
        raise NoDecrease("no decrease after %d halvings" % MAX_HALVINGS)


def refine(system, sol, target_bits):
    """Raise ``sol`` to ``target_bits`` by Newton stages that double precision."""
    _check_bits(target_bits)
    bits = sol.precision_bits
    start = residual_norm(system, sol.values, max(bits, 53))
    if start > mpmath.mpf(2) ** (-min(bits, 53) // 4):
        raise RefinementStalled("input is not a converged solution (residual %s)" % mpmath.nstr(start, 5))
    x = list(sol.values)
    log = list(sol.log)
    stages = []
    p = bits
    while p < target_bits:
        p = min(2 * p, target_bits)
        stages.append(p)
    if not stages:
        stages = [target_bits]
    for p in stages:
        x = _polish(system, x, p, log)
    with mpmath.workprec(target_bits):
        res = residual_norm(system, x, target_bits)
        if res >= mpmath.mpf(2) ** (-target_bits // 2):
            raise RefinementStalled(
                "residual %s above 2^-%d" % (mpmath.nstr(res, 5), target_bits // 2)
            )
        x = [+v for v in x]
    return Solution(x, res, target_bits, sol.seed, sol.start_index, log)


def _polish(system, x, bits, log, max_steps=12):
    goal = mpmath.mpf(2) ** (-(bits * 3) // 4)
    with mpmath.workprec(bits):
        x = [mpmath.mpc(v) for v in x]
        res = residual_norm(system, x, bits)
        for _ in range(max_steps):
            if res < goal or res == 0:
                break
            try:
                x = newton_step(system, x, bits)
            except NoDecrease:
                break
            res = residual_norm(system, x, bits)
            log.append((bits, float(mpmath.log(res, 2)) if res else float("-inf")))
        return x


# ---------------------------------------------------------------------------
# double-precision stage


class _FloatSystem:
    """The system compiled to arrays for fast complex128 evaluation."""

    def __init__(self, system):
        n = len(system.variables)
        self.n = n
        eq_idx, coeffs, exps = [], [], []
        for i, e in enumerate(system.equations):
            for mono, c in e.terms.items():
                row = [0] * n
                for v, k in mono:
                    row[v] = k
                eq_idx.append(i)
                coeffs.append(complex(c))
                exps.append(row)
        self.m = len(system.equations)
        self.eq = np.array(eq_idx, dtype=int)
        self.c = np.array(coeffs, dtype=complex)
        self.E = np.array(exps, dtype=int).reshape(len(coeffs), n)
        self.maxdeg = int(self.E.max()) if self.E.size else 0
        d_eq, d_var, d_c, d_E = [], [], [], []
        for t in range(len(coeffs)):
            for v in range(n):
                k = self.E[t, v]
                if k:
                    row = self.E[t].copy()
                    row[v] -= 1
                    d_eq.append(self.eq[t])
                    d_var.append(v)
                    d_c.append(self.c[t] * k)
                    d_E.append(row)
        self.d_eq = np.array(d_eq, dtype=int)
        self.d_var = np.array(d_var, dtype=int)
        self.d_c = np.array(d_c, dtype=complex)
        self.d_E = np.array(d_E, dtype=int).reshape(len(d_c), n)
        self.cols = np.arange(n)

    def _powers(self, x):
        P = np.ones((self.maxdeg + 1, self.n), dtype=complex)
        for k in range(1, self.maxdeg + 1):
            P[k] = P[k - 1] * x
        return P

    def residual(self, x):
        P = self._powers(x)
        mono = P[self.E, self.cols].prod(axis=1) * self.c
        return np.bincount(self.eq, weights=mono.real, minlength=self.m) + 1j * np.bincount(
            self.eq, weights=mono.imag, minlength=self.m
        )

    def jacobian(self, x):
        P = self._powers(x)
        vals = P[self.d_E, self.cols].prod(axis=1) * self.d_c
        J = np.zeros((self.m, self.n), dtype=complex)
        np.add.at(J, (self.d_eq, self.d_var), vals)
        return J


def _float_gauss_newton(fs, x):
    """Damped Gauss-Newton in complex128; halving is judged on the 2-norm."""
    with np.errstate(all="ignore"):
        r = fs.residual(x)
        res = np.linalg.norm(r)
        for _ in range(FLOAT_ITERATIONS):
            if not np.isfinite(res):
                return None
            if np.abs(r).max() < FLOAT_TOL:
                return x
            J = fs.jacobian(x)
            delta = np.linalg.lstsq(J, r, rcond=None)[0]
            t = 1.0
            for _ in range(MAX_HALVINGS + 1):
                cand = x - t * delta
                rc = fs.residual(cand)
                rn = np.linalg.norm(rc)
                if rn < res:
                    break
                t /= 2
            else:
                return None
            x, r, res = cand, rc, rn
        return x if np.abs(r).max() < FLOAT_TOL else None


def _start_centres(system):
    """Edge labels start around the half-meridian split ``u = +-sigma/2 + iy``.

    The two sides of an alternating arc differ by one meridian, and splitting
    that difference evenly is where the geometric labels of every small
    example sit; crossing labels (and generic unknowns) have no centre.
    """
    d = system.diagram
    centres = np.zeros(len(system.variables))
    edge = np.zeros(len(system.variables), dtype=bool)
    if d is None:
        return centres, edge
    from .tt_system import arc_sign

    for i, v in enumerate(system.variables):
        if v.kind == "u":
            arc, side = v.key
            s = arc_sign(d.arcs[arc]) / 2
            centres[i] = s if side == "L" else -s
            edge[i] = True
    return centres, edge


def _start_points(system, seed, attempts, modulus_range):
    rng = np.random.default_rng(seed)
    lo, hi = modulus_range
    n = len(system.variables)
    centres, edge = _start_centres(system)
    starts = []
    for _ in range(attempts):
        mod = rng.uniform(lo, hi, n)
        arg = rng.uniform(0.0, 2 * np.pi, n)
        x = mod * np.exp(1j * arg)
        if edge.any():
            side = rng.choice((-1.0, 1.0))
            x = np.where(edge, centres + 1j * side * mod, x)
        starts.append(x)
    return starts


def _strip_monomials(p, allowed=None):
    """Divide out the largest monomial factor of ``p`` in the ``allowed`` variables."""
    shift = {}
    for v in p.variables():
        if allowed is not None and v not in allowed:
            continue
        low = min(dict(mono).get(v, 0) for mono in p.terms)
        if low:
            shift[v] = low
    if not shift:
        return p
    terms = {}
    for mono, c in p.terms.items():
        terms[tuple((v, e - shift.get(v, 0)) for v, e in mono if e - shift.get(v, 0))] = c
    return Poly(terms)


def _float_system(system):
    if system.diagram is None:
        return _FloatSystem(system)
    # labels other than bigon edge labels are nonzero at a geometric point,
    # so monomial factors in them only add degenerate components
    from .tt_system import PolySystem

    bigon_sides = {e for r in system.diagram.regions if r.size == 2 for e in r.edges}
    allowed = {
        i for i, v in enumerate(system.variables) if not (v.kind == "u" and v.key in bigon_sides)
    }
    eqs = [_strip_monomials(e, allowed) for e in system.equations]
    return _FloatSystem(PolySystem(system.variables, eqs, system.tags))


def _crossing_slots(system):
    return [i for i, v in enumerate(system.variables) if v.kind == "w"]


def multistart_solve(system, seed=42, attempts=200, bits=128, modulus_range=MODULUS_RANGE):
    """Solutions reached from ``attempts`` deterministic random starts.

    Converged points (residual < 2^-bits/2) are deduplicated at distance
    2^-bits/4 and sorted by residual, then by value.
    """
    if attempts < 1:
        raise ValueError("attempts must be >= 1")
    _check_bits(bits)
    fs = _float_system(system)
    starts = _start_points(system, seed, attempts, modulus_range)
    ws = _crossing_slots(system)

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            ends = list(pool.map(lambda s: _float_gauss_newton(fs, s), starts))
    else:
        ends = [_float_gauss_newton(fs, s) for s in starts]

    coarse = []
    for k, x in enumerate(ends):
        if x is None:
            continue
        if ws and np.abs(x[ws]).min() < DEGENERATE_W:
            continue
        if any(np.abs(x - y).max() < 1e-6 for y, _ in coarse):
            continue
        coarse.append((x, k))

    sols = []
    tol = mpmath.mpf(2) ** (-bits // 4)
    for x, k in coarse:
        seed_sol = Solution([mpmath.mpc(complex(v)) for v in x], None, 53, seed, k)
        try:
            sol = refine(system, seed_sol, bits)
        except (RefinementStalled, SingularJacobian, NoDecrease):
            continue
        with mpmath.workprec(bits):
            if any(max(abs(a - b) for a, b in zip(sol.values, s.values)) < tol for s in sols):
                continue
        sols.append(sol)
    if not sols:
        raise NoSolutionFound("no start converged (%d attempts)" % attempts)
    sols.sort(key=_sort_key)
    return sols


def _sort_key(sol):
    return (float(sol.residual_norm), [(float(v.real), float(v.imag)) for v in sol.values])


def select_geometric(cands, system, bits=None):
    """The geometric candidate among ``cands``.

    A candidate qualifies when every crossing label has ``0 < |w| <= 1``
    (plus slack), no non-bigon edge label vanishes and no corner shape is
    degenerate (0 or 1, i.e. two ideal points colliding).  Galois conjugates
    of the geometric point often qualify too; among qualifying candidates
    the one with the smallest largest ``|w|`` (the cusps furthest apart) is
    returned, ties going to the earliest in the given order.
    """
    if not cands:
        raise NoGeometricSolution("no candidates")
    best = None
    for sol in cands:
        b = bits or sol.precision_bits
        if not is_geometric(sol, system, b):
            continue
        with mpmath.workprec(b):
            top = max_crossing_modulus(sol, system)
            if best is None or top < best[0] - mpmath.mpf(2) ** (-b // 4):
                best = (top, sol)
    if best is None:
        raise NoGeometricSolution("no candidate passes the geometric filter (%d tried)" % len(cands))
    return best[1]


def max_crossing_modulus(sol, system):
    full = sol.full_values(system)
    return max(abs(v) for var, v in zip(system.full_variables, full) if var.kind == "w")


def is_geometric(sol, system, bits):
    from .geometry import corner_shapes

    with mpmath.workprec(bits):
        slack = mpmath.mpf(2) ** (-bits // 4)
        full = sol.full_values(system)
        bigon_sides = set()
        d = system.diagram
        if d is not None:
            for r in d.regions:
                if r.size == 2:
                    bigon_sides.update(r.edges)
        for var, val in zip(system.full_variables, full):
            if var.kind == "w":
                if abs(val) > 1 + slack or abs(val) < slack:
                    return False
            elif var.kind == "u" and var.key not in bigon_sides:
                if abs(val) < slack:
                    return False
        if d is not None:
            for _, _, zeta in corner_shapes(d, system, full):
                if abs(zeta) < slack or abs(zeta - 1) < slack:
                    return False
    return True


def convergence_orders(system, sol, bits=2048, steps=4):
    """Observed orders ``log r_{k+1} / log r_k`` of plain Newton steps.

    Runs at a fixed high precision so no step is cut off by rounding;
    quadratic convergence shows up as orders near 2.
    """
    with mpmath.workprec(bits):
        x = [mpmath.mpc(v) for v in sol.values]
        res = [_norm2(eval_system(system, x, bits))]
        for _ in range(steps):
            if res[-1] == 0 or res[-1] < mpmath.mpf(2) ** (-bits // 2):
                break
            x = newton_step(system, x, bits)
            res.append(_norm2(eval_system(system, x, bits)))
        logs = [mpmath.log(r, 2) for r in res if r > 0]
        return [float(b / a) for a, b in zip(logs, logs[1:])]
