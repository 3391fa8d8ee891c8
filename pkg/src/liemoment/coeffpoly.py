"""Commutative polynomials in the classical variables x_1..x_M and formal hbar."""

from __future__ import annotations

from math import factorial
from typing import Dict, Iterable, Mapping, Tuple

from ._numbers import ONE, ZERO, GaussQ, rational
from .multiindex import MultiIndex

Key = Tuple[int, MultiIndex]  # (hbar power, classical exponents)


class CoeffPoly:
    """Immutable map ``(hbar_power, exponents) -> GaussQ`` with no stored zeros."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Key, object] = ()):
        self.nvars = nvars
        clean: Dict[Key, GaussQ] = {}
        for (h, e), c in dict(terms).items():
            if h < 0:
                raise ValueError("hbar power must be >= 0")
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
            c = GaussQ.coerce(c)
            if c:
                key = (h, tuple(e))
                acc = clean.get(key)
                clean[key] = c if acc is None else acc + c
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def _from_clean(cls, nvars, terms):
        obj = object.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        return obj

    # constructors ---------------------------------------------------------
    @classmethod
    def constant(cls, nvars: int, value=1) -> "CoeffPoly":
        return cls(nvars, {(0, (0,) * nvars): value})

    @classmethod
    def var(cls, nvars: int, i: int) -> "CoeffPoly":
        e = tuple(1 if k == i else 0 for k in range(nvars))
        return cls._from_clean(nvars, {(0, e): ONE})

    @classmethod
    def hbar(cls, nvars: int, power: int = 1) -> "CoeffPoly":
        return cls._from_clean(nvars, {(power, (0,) * nvars): ONE})

    @classmethod
    def classical(cls, nvars: int, coeffs: Mapping[MultiIndex, object]) -> "CoeffPoly":
        """Build from ``{exponents: rational}`` (no hbar)."""
        return cls(nvars, {(0, tuple(e)): rational(c) if not isinstance(c, GaussQ) else c
                           for e, c in coeffs.items()})

    # queries --------------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, CoeffPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, GaussQ)):
            return self == CoeffPoly.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_classical(self) -> bool:
        return all(h == 0 for h, _ in self.terms)

    def max_hbar(self) -> int:
        return max((h for h, _ in self.terms), default=0)

    def min_hbar(self) -> int:
        return min((h for h, _ in self.terms), default=0)

    def degree(self) -> int:
        return max((sum(e) for _, e in self.terms), default=0)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other: "CoeffPoly") -> "CoeffPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return CoeffPoly._from_clean(self.nvars, out)

    def __neg__(self):
        return CoeffPoly._from_clean(self.nvars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, CoeffPoly):
            c = GaussQ.coerce(other)
            if not c:
                return CoeffPoly._from_clean(self.nvars, {})
            return CoeffPoly._from_clean(self.nvars, {k: v * c for k, v in self.terms.items()})
        out: Dict[Key, GaussQ] = {}
        for (h1, e1), c1 in self.terms.items():
            for (h2, e2), c2 in other.terms.items():
                k = (h1 + h2, tuple(a + b for a, b in zip(e1, e2)))
                v = out.get(k)
                out[k] = c1 * c2 if v is None else v + c1 * c2
        return CoeffPoly._from_clean(self.nvars, {k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = CoeffPoly.constant(self.nvars)
        for _ in range(n):
            out = out * self
        return out

    def derivative(self, i: int, n: int = 1) -> "CoeffPoly":
        """n-th partial derivative with respect to x_i."""
        out: Dict[Key, GaussQ] = {}
        for (h, e), c in self.terms.items():
            p = e[i]
            if p < n:
                continue
            f = factorial(p) // factorial(p - n)
            e2 = e[:i] + (p - n,) + e[i + 1:]
            out[(h, e2)] = c * f
        return CoeffPoly._from_clean(self.nvars, out)

    def multi_derivative(self, mi: MultiIndex) -> "CoeffPoly":
        out = self
        for i, n in enumerate(mi):
            if n:
                out = out.derivative(i, n)
        return out

    def subs_hbar_zero(self) -> "CoeffPoly":
        return CoeffPoly._from_clean(self.nvars, {k: v for k, v in self.terms.items() if k[0] == 0})

    def evaluate(self, x, hbar=0):
        """Substitute values for x (and hbar).

        Exact (GaussQ) when every input is an int or rational, complex float
        otherwise.
        """
        exact = all(not isinstance(v, (float, complex)) for v in x) and not isinstance(
            hbar, (float, complex))
        if exact:
            xs = [GaussQ.coerce(v) for v in x]
            hb = GaussQ.coerce(hbar)
            total = ZERO
            for (h, e), c in self.terms.items():
                t = c
                if h:
                    t = t * hb ** h
                for v, p in zip(xs, e):
                    if p:
                        t = t * v ** p
                total = total + t
            return total
        total = 0j
        for (h, e), c in self.terms.items():
            t = complex(c) * (hbar ** h if h else 1.0)
            for v, p in zip(x, e):
                if p:
                    t *= v ** p
            total += t
        return total

    def items(self) -> Iterable:
        return self.terms.items()

    # formatting -----------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (h, e), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0], [-p for p in kv[0][1]])):
            factors = [str(c) if c.is_real() else f"({c})"]
            if h:
                factors.append(f"hbar^{h}")
            for i, p in enumerate(e):
                if p:
                    factors.append(f"x{i + 1}" + (f"^{p}" if p > 1 else ""))
            parts.append(" * ".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"CoeffPoly({self})"

    def to_json(self) -> Dict[str, str]:
        return {f"h{h};" + ",".join(map(str, e)): str(c) for (h, e), c in sorted(self.terms.items())}

    @classmethod
    def from_json(cls, nvars: int, data: Mapping[str, str]) -> "CoeffPoly":
        terms = {}
        for key, c in data.items():
            hpart, epart = key.split(";")
            e = tuple(int(s) for s in epart.split(",")) if epart else ()
            terms[(int(hpart[1:]), e)] = GaussQ.parse(c)
        return cls(nvars, terms)
