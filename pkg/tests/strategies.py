"""Random generators shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction

from liemoment import multiindex as mi
from liemoment.moments import MomentPoly
from liemoment.nc_poly import NCPoly


def _parts(rng: random.Random, r: int):
    """Random composition of ``r`` into parts >= 2 (``r`` != 1)."""
    out = []
    while r:
        d = r if r <= 3 else rng.randint(2, r - 2 if r - 2 >= 2 else r)
        if r - d == 1:
            d = r
        out.append(d)
        r -= d
    return out


def random_moment_term(rng: random.Random, M: int, order: int, tagged=False):
    """A monomial key of the requested semiclassical order (order 1 does not exist)."""
    if order == 1:
        raise ValueError("no monomial has order 1")
    while True:
        h = rng.randint(0, order // 2)
        r = order - 2 * h
        if r != 1:
            break
    eps = [(rng.choice(mi.of_degree(M, d)), 1) for d in _parts(rng, r)]
    e = tuple(rng.randint(0, 2) for _ in range(M))
    return (h, e, tuple(eps), tagged)


def random_moment_poly(rng: random.Random, M: int, max_order: int = 5, max_terms: int = 3):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        key = random_moment_term(rng, M, rng.choice([0] + list(range(2, max_order + 1))))
        terms[key] = Fraction(rng.randint(-5, 5) or 1, rng.randint(1, 4))
    return MomentPoly(M, terms)


def random_nc_poly(rng: random.Random, spec, max_degree: int = 3, max_terms: int = 3, kind="x"):
    M = spec.dimension
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        n = rng.randint(0, max_degree)
        w = tuple(rng.randrange(M) for _ in range(n))
        h = rng.randint(0, 1)
        e = tuple(rng.randint(0, 1) if kind == "dx" else 0 for _ in range(M))
        terms[(w, h, e)] = Fraction(rng.randint(-4, 4) or 1, rng.randint(1, 3))
    return NCPoly(spec, kind, terms)
