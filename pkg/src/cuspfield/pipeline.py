"""Parse, build, solve, measure and recognise: the stages behind the CLI.

Each ``run_*`` function returns a result object; the ``*_report``
functions turn results into JSON-ready dicts with every number written as
a decimal string, so identical configurations give identical bytes.
"""

from dataclasses import dataclass, field

import mpmath

from . import diagram as dg
from .errors import ConfigError
from .fieldrec import describe_field, precision_floor
from .geometry import geometry_report
from .numsolve import decimal_string, multistart_solve, refine, select_geometric
from .tt_system import build_system
from .twobridge import certify, eliminate, required_bits

SCHEMA_VERSION = "cuspfield.report/1"


@dataclass
class RunConfig:
    pd: str = None
    dt: str = None
    braid: str = None
    repeat: int = None
    two_bridge: str = None
    bits: int = 128
    starts: int = 200
    seed: int = 42
    max_degree: int = 8
    height_bits: int = 64
    exact: bool = False
    bigon_reduction: bool = True
    json_path: str = None

    def validate(self):
        chosen = [s for s in ("pd", "dt", "braid", "two_bridge") if getattr(self, s) is not None]
        if len(chosen) != 1:
            raise ConfigError("exactly one of --pd, --dt, --braid, --two-bridge is required")
        if self.repeat is not None and self.braid is None:
            raise ConfigError("--repeat only applies to --braid")
        if self.repeat is not None and self.repeat < 1:
            raise ConfigError("--repeat must be at least 1")
        if self.bits < 64:
            raise ConfigError("--bits must be at least 64")
        if self.starts < 1:
            raise ConfigError("--starts must be at least 1")
        if self.max_degree < 1 or self.height_bits < 1:
            raise ConfigError("--max-degree and --height-bits must be positive")
        return self

    @property
    def field_bits(self):
        """Recognition precision: the working precision, raised to the LLL floor."""
        return max(self.bits, precision_floor(self.max_degree, self.height_bits))


def load_diagram(cfg):
    """``(diagram, two-bridge form or None)`` for the configured input."""
    if cfg.pd is not None:
        return dg.parse_pd(cfg.pd), None
    if cfg.dt is not None:
        return dg.parse_dt(cfg.dt), None
    if cfg.braid is not None:
        return dg.from_braid(cfg.braid, cfg.repeat or 1), None
    alpha, beta = dg.parse_fraction(cfg.two_bridge)
    form, d = dg.from_two_bridge(alpha, beta)
    return d, form


@dataclass
class SolveResult:
    cfg: RunConfig
    diagram: object
    form: object
    system: object
    candidates: list
    solution: object
    full_values: list
    distances: list
    shapes: list


def run_solve(cfg):
    cfg.validate()
    d, form = load_diagram(cfg)
    system = build_system(d, reduce=cfg.bigon_reduction)
    cands = multistart_solve(system, seed=cfg.seed, attempts=cfg.starts, bits=cfg.bits)
    # refined past the working precision so every reported digit is correct
    sol = refine(system, select_geometric(cands, system, cfg.bits), 2 * cfg.bits)
    full = sol.full_values(system)
    distances, shapes = geometry_report(d, system, full, cfg.bits)
    return SolveResult(cfg, d, form, system, cands, sol, full, distances, shapes)


@dataclass
class FieldResult:
    solved: SolveResult
    fine: object  # the geometric solution refined for recognition
    description: object
    bits: int


def fine_solution(solved, bits):
    """The geometric solution refined to ``bits``."""
    return refine(solved.system, solved.solution, bits)


def run_field(cfg, solved=None):
    solved = solved or run_solve(cfg)
    rb = cfg.field_bits
    fine = fine_solution(solved, 2 * rb)
    full = fine.full_values(solved.system)
    with mpmath.workprec(2 * rb + 32):
        labels = [(v.name, x) for v, x in zip(solved.system.full_variables, full)]
        desc = describe_field(labels, cfg.max_degree, cfg.height_bits, rb)
    return FieldResult(solved, fine, desc, rb)


@dataclass
class TwoBridgeResult:
    field: FieldResult
    alpha: int
    beta: int
    twists: tuple
    elimination: object = None
    certification: object = None
    numeric_w1: object = None
    notes: list = field(default_factory=list)


def run_twobridge(cfg, fraction):
    cfg.two_bridge = fraction
    cfg.pd = cfg.dt = cfg.braid = None
    fr = run_field(cfg)
    form = fr.solved.form
    out = TwoBridgeResult(fr, form.alpha, form.beta, form.twists)
    if not cfg.exact:
        return out
    system = fr.solved.system
    e = eliminate(system)
    need = required_bits(cfg.bits, e.degree, cfg.height_bits)
    fine = fr.fine if fr.fine.precision_bits >= need + 32 else fine_solution(fr.solved, need + 64)
    desc = fr.description
    w1 = fine.values[e.pivot]
    cert = certify(
        e,
        w1,
        cfg.bits,
        form.alpha,
        form.twists,
        generator=(desc.value, desc.polynomial.degree),
        numeric_values=fine.values,
        height_bits=cfg.height_bits,
    )
    out.elimination, out.certification, out.numeric_w1 = e, cert, w1
    if not cert.bound_ok:
        out.notes.append("retained factor degree exceeds (alpha-1)/2")
    return out


# ---------------------------------------------------------------------------
# reports


def _num(x, bits):
    with mpmath.workprec(bits):
        return decimal_string(mpmath.mpf(x), bits)


def _cplx(x, bits):
    with mpmath.workprec(bits):
        x = mpmath.mpc(x)
        return {"re": decimal_string(x.real, bits), "im": decimal_string(x.imag, bits)}


def diagram_report(d, form=None):
    out = {
        "n": d.n,
        "arcs": len(d.arcs),
        "regions": len(d.regions),
        "components": d.components,
        "alternating": dg.is_alternating(d),
        "region_sizes": d.side_counts(),
        "pd": d.to_pd(),
    }
    if form is not None:
        out["two_bridge"] = {"alpha": form.alpha, "beta": form.beta, "twists": list(form.twists)}
    return out


def solve_report(res):
    bits = res.cfg.bits
    sys_ = res.system
    labels = []
    for var, x in zip(sys_.full_variables, res.full_values):
        labels.append({"var": var.name, **_cplx(x, bits)})
    return {
        "schema_version": SCHEMA_VERSION,
        "config": {
            "bits": bits,
            "starts": res.cfg.starts,
            "seed": res.cfg.seed,
            "bigon_reduction": res.cfg.bigon_reduction,
        },
        "diagram": diagram_report(res.diagram, res.form),
        "system": {"variables": len(sys_.variables), "equations": len(sys_.equations)},
        "solution": {
            "labels": labels,
            "residual": _num(res.solution.residual_norm, bits),
            "candidates": len(res.candidates),
            "start_index": res.solution.start_index,
        },
        "geometry": {
            "distances": [
                {"crossing": c, "d": _num(cd.d, bits), "theta": _num(cd.theta, bits)}
                for c, cd in res.distances
            ],
            "shapes": [
                {"region": r, "corner": i, "crossing": c, **_cplx(z, bits)}
                for r, i, c, z in res.shapes
            ],
        },
    }


def field_section(fr):
    desc = fr.description
    bits = fr.solved.cfg.bits
    polys = {}
    for name, p in desc.label_polys.items():
        polys[name] = list(p.coeffs) if p is not None else None
    return {
        "generator": {"label": desc.generator, **_cplx(desc.value, bits)},
        "min_poly": list(desc.polynomial.coeffs),
        "degree": desc.polynomial.degree,
        "certified_at_bits": [fr.bits, 2 * fr.bits],
        "members": {name: m.to_json() for name, m in desc.members.items()},
        "failures": list(desc.failures),
        "label_min_polys": polys,
    }


def field_report(fr):
    out = solve_report(fr.solved)
    out["config"].update(
        {"max_degree": fr.solved.cfg.max_degree, "height_bits": fr.solved.cfg.height_bits}
    )
    out["field"] = field_section(fr)
    return out


def twobridge_report(tb):
    out = field_report(tb.field)
    bits = tb.field.solved.cfg.bits
    sec = {
        "alpha": tb.alpha,
        "beta": tb.beta,
        "continued_fraction": list(tb.twists),
        "exact": tb.elimination is not None,
    }
    if tb.elimination is not None:
        e, c = tb.elimination, tb.certification
        names = e.names
        sec.update(
            {
                "pivot": names[e.pivot],
                "P": e.coeffs(),
                "factor": list(c.factor.coeffs),
                "spurious_factors": c.spurious,
                "chain": [
                    {"var": names[v], "equation": tag, "value": str(e.chain[v])}
                    for v, tag, _ in e.order
                ],
                "identity_zero": e.identity_ok,
                "root_residual": _num(c.residual, bits),
                "max_label_error": _num(c.max_label_error, bits),
                "same_field_as_generator": c.same_field,
                "bound_check": {
                    "factor_degree": c.factor.degree,
                    "riley_bound": c.degree_bound,
                    "within_riley_bound": c.bound_ok,
                    "raw_degree": c.raw_degree,
                    "degree_cap": c.degree_cap,
                    "within_cap": c.cap_ok,
                },
                "notes": list(tb.notes),
            }
        )
    out["twobridge"] = sec
    return out
