"""Shared pipeline runs and independent reference values for the tests."""

from functools import lru_cache

import mpmath

from cuspfield import pipeline

# (selector, value) of every diagram the acceptance criteria run on
BRAIDS = [("braid", n) for n in range(2, 7)]
TWO_BRIDGE = [("two_bridge", "5/2"), ("two_bridge", "7/3")]
ACCEPTANCE = BRAIDS + TWO_BRIDGE


def config(case, bits=128, bigon=True, seed=42, starts=200):
    kind, value = case
    cfg = pipeline.RunConfig(bits=bits, bigon_reduction=bigon, seed=seed, starts=starts)
    if kind == "braid":
        cfg.braid, cfg.repeat = "aB", value
    else:
        cfg.two_bridge = value
    return cfg


@lru_cache(maxsize=None)
def solve(case, bits=128, bigon=True, seed=42):
    return pipeline.run_solve(config(case, bits, bigon, seed))


@lru_cache(maxsize=None)
def field(case, bits=128):
    cfg = config(case, bits)
    return pipeline.run_field(cfg, solve(case, bits))


@lru_cache(maxsize=None)
def twobridge(fraction):
    cfg = config(("two_bridge", fraction))
    cfg.exact = True
    return pipeline.run_twobridge(cfg, fraction)


def t_value(n, bits):
    """sqrt(-3 - 4 cos(pi/n) + 4 cos^2(pi/n)), the braid-family field generator."""
    with mpmath.workprec(bits + 32):
        c = mpmath.cos(mpmath.pi / n)
        return mpmath.sqrt(mpmath.mpc(-3 - 4 * c + 4 * c * c))


def case_id(case):
    return "%s-%s" % case
