"""Multi-indices: M-tuples of non-negative integers.

Plain tuples are used throughout; this module only collects the handful of
operations the rest of the package needs.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial as _fact
from typing import Iterator, Tuple

MultiIndex = Tuple[int, ...]


def degree(mi: MultiIndex) -> int:
    return sum(mi)


def factorial(mi: MultiIndex) -> int:
    out = 1
    for n in mi:
        out *= _fact(n)
    return out


def leq(a: MultiIndex, b: MultiIndex) -> bool:
    """Componentwise partial order ``a <= b``."""
    return all(x <= y for x, y in zip(a, b))


def add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    out = tuple(x - y for x, y in zip(a, b))
    if any(n < 0 for n in out):
        raise ValueError(f"{a} - {b} is not a multi-index")
    return out


def unit(m: int, k: int, n: int = 1) -> MultiIndex:
    return tuple(n if i == k else 0 for i in range(m))


def zero(m: int) -> MultiIndex:
    return (0,) * m


@lru_cache(maxsize=None)
def of_degree(m: int, n: int) -> Tuple[MultiIndex, ...]:
    """All M-tuples of degree ``n``, in descending lexicographic order.

    Descending lex puts ``(n, 0, ..., 0)`` first, so the first generator
    dominates the ordering of reports and gradient columns.
    """
    if m == 1:
        return ((n,),)
    out = []
    for first in range(n, -1, -1):
        for rest in of_degree(m - 1, n - first):
            out.append((first,) + rest)
    return tuple(out)


def up_to_degree(m: int, n: int, start: int = 0) -> Iterator[MultiIndex]:
    """Multi-indices ordered by (degree, descending lex) for degrees start..n."""
    for d in range(start, n + 1):
        yield from of_degree(m, d)


def count(m: int, n: int) -> int:
    """Number of M-tuples of degree ``n``: binom(n+M-1, M-1)."""
    return comb(n + m - 1, m - 1)


def below(mi: MultiIndex) -> Iterator[MultiIndex]:
    """Every multi-index ``j <= mi`` (componentwise)."""

    def rec(pos):
        if pos == len(mi):
            yield ()
            return
        for v in range(mi[pos] + 1):
            for rest in rec(pos + 1):
                yield (v,) + rest

    yield from rec(0)


def letters(mi: MultiIndex) -> Tuple[int, ...]:
    """Sorted word of generator indices with multiplicities ``mi``."""
    out = []
    for k, n in enumerate(mi):
        out.extend([k] * n)
    return tuple(out)


def from_word(word, m: int) -> MultiIndex:
    counts = [0] * m
    for k in word:
        counts[k] += 1
    return tuple(counts)


def fmt(mi: MultiIndex) -> str:
    return "(" + ",".join(str(n) for n in mi) + ")"
