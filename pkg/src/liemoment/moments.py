"""Moment polynomials: functions of expectation values x_i, moments eps_k and hbar.

A monomial key is ``(hbar_power, x_exponents, eps, tagged)`` where ``eps`` is
a sorted tuple of ``(multi_index, power)`` pairs with every multi-index of
degree >= 2.  ``tagged`` marks terms born proportional to the classical
constraint; in constraint mode such a term counts two orders higher.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

from . import multiindex as mi_ops
from ._numbers import ONE, GaussQ
from .coeffpoly import CoeffPoly
from .multiindex import MultiIndex
from .nc_poly import DX, INFINITE, NCPoly, to_delta, weyl_basis_decompose

EpsPart = Tuple[Tuple[MultiIndex, int], ...]
MKey = Tuple[int, MultiIndex, EpsPart, bool]


class MissingVariableError(KeyError):
    """A moment needed for evaluation is absent from the phase point."""


def _merge_eps(a: EpsPart, b: EpsPart) -> EpsPart:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, p in b:
        d[k] = d.get(k, 0) + p
    return tuple(sorted(d.items(), key=lambda kv: _eps_sort_key(kv[0])))


def _eps_sort_key(k: MultiIndex):
    # (degree, descending lex)
    return (sum(k), tuple(-n for n in k))


def _acc(out: Dict, key, c) -> None:
    v = out.get(key)
    if v is None:
        out[key] = c
    else:
        v = v + c
        if v:
            out[key] = v
        else:
            del out[key]


def key_order(key: MKey, constraint_mode: bool = False) -> int:
    h, _, eps, tagged = key
    o = 2 * h + sum(sum(k) * p for k, p in eps)
    if constraint_mode and tagged:
        o += 2
    return o


class MomentPoly:
    """Commutative polynomial in x_i, eps_k (|k| >= 2) and formal hbar.

    ``constraint_marked`` records that the polynomial came out of the
    constraint generator, so its tags are meaningful.
    """

    __slots__ = ("nvars", "terms", "constraint_marked")

    def __init__(self, nvars: int, terms: Mapping[MKey, object] = (),
                 constraint_marked: bool = False):
        self.nvars = nvars
        clean: Dict[MKey, GaussQ] = {}
        for (h, e, eps, tagged), c in dict(terms).items():
            if len(e) != nvars or h < 0:
                raise ValueError(f"malformed moment key {(h, e, eps, tagged)!r}")
            part: Dict[MultiIndex, int] = {}
            dead = False
            for k, p in eps:
                k = tuple(k)
                if len(k) != nvars or p < 0:
                    raise ValueError(f"malformed moment index {k!r}")
                d = sum(k)
                if p == 0 or d == 0:
                    continue
                if d == 1:
                    dead = True
                    break
                part[k] = part.get(k, 0) + p
            if dead:
                continue
            c = GaussQ.coerce(c)
            if c:
                key = (h, tuple(e), tuple(sorted(part.items(), key=lambda kv: _eps_sort_key(kv[0]))),
                       bool(tagged))
                _acc(clean, key, c)
        self.terms = clean
        self.constraint_marked = constraint_marked

    @classmethod
    def _wrap(cls, nvars, terms, marked=False) -> "MomentPoly":
        obj = object.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        obj.constraint_marked = marked
        return obj

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "MomentPoly":
        return cls._wrap(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value=1) -> "MomentPoly":
        return cls(nvars, {(0, (0,) * nvars, (), False): value})

    @classmethod
    def x(cls, nvars: int, i: int) -> "MomentPoly":
        return cls._wrap(nvars, {(0, mi_ops.unit(nvars, i), (), False): ONE})

    @classmethod
    def eps(cls, k: MultiIndex) -> "MomentPoly":
        """The moment eps_k; degree 0 gives 1 and degree 1 gives 0."""
        k = tuple(k)
        return cls(len(k), {(0, (0,) * len(k), ((k, 1),), False): 1})

    @classmethod
    def hbar(cls, nvars: int, power: int = 1) -> "MomentPoly":
        return cls._wrap(nvars, {(power, (0,) * nvars, (), False): ONE})

    @classmethod
    def from_coeffpoly(cls, cp: CoeffPoly, tagged: bool = False) -> "MomentPoly":
        return cls._wrap(cp.nvars, {(h, e, (), tagged): c for (h, e), c in cp.terms.items()})

    # queries --------------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, MomentPoly):
            return self.nvars == other.nvars and self.untagged().terms == other.untagged().terms
        if isinstance(other, (int, GaussQ)):
            return self == MomentPoly.constant(self.nvars, other)
        return NotImplemented

    __hash__ = None

    def identical(self, other: "MomentPoly") -> bool:
        """Equality including tags."""
        return self.nvars == other.nvars and self.terms == other.terms

    def untagged(self) -> "MomentPoly":
        out: Dict[MKey, GaussQ] = {}
        for (h, e, eps, _), c in self.terms.items():
            _acc(out, (h, e, eps, False), c)
        return MomentPoly._wrap(self.nvars, out)

    def eps_variables(self) -> set:
        return {k for (_, _, eps, _) in self.terms for k, _ in eps}

    def max_eps_degree(self) -> int:
        return max((sum(k) for k in self.eps_variables()), default=0)

    def items(self):
        return self.terms.items()

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "MomentPoly":
        if isinstance(other, MomentPoly):
            if other.nvars != self.nvars:
                raise ValueError("moment polynomials in different numbers of variables")
            return other
        if isinstance(other, CoeffPoly):
            return MomentPoly.from_coeffpoly(other)
        return MomentPoly.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _acc(out, k, c)
        return MomentPoly._wrap(self.nvars, out, self.constraint_marked or other.constraint_marked)

    __radd__ = __add__

    def __neg__(self):
        return MomentPoly._wrap(self.nvars, {k: -c for k, c in self.terms.items()},
                                self.constraint_marked)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, (MomentPoly, CoeffPoly)):
            c = GaussQ.coerce(other)
            if not c:
                return MomentPoly.zero(self.nvars)
            return MomentPoly._wrap(self.nvars, {k: v * c for k, v in self.terms.items()},
                                    self.constraint_marked)
        other = self._coerce(other)
        out: Dict[MKey, GaussQ] = {}
        for (h1, e1, p1, t1), c1 in self.terms.items():
            for (h2, e2, p2, t2), c2 in other.terms.items():
                key = (h1 + h2, tuple(a + b for a, b in zip(e1, e2)), _merge_eps(p1, p2), t1 or t2)
                _acc(out, key, c1 * c2)
        return MomentPoly._wrap(self.nvars, out, self.constraint_marked or other.constraint_marked)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = MomentPoly.constant(self.nvars)
        for _ in range(n):
            out = out * self
        return out

    def mark_constraint(self, marked: bool = True) -> "MomentPoly":
        return MomentPoly._wrap(self.nvars, dict(self.terms), marked)

    def div_i_hbar(self) -> "MomentPoly":
        out = {}
        for (h, e, eps, t), c in self.terms.items():
            if h < 1:
                raise ArithmeticError("term not divisible by hbar")
            out[(h - 1, e, eps, t)] = c.div_i()
        return MomentPoly._wrap(self.nvars, out, self.constraint_marked)

    # calculus -------------------------------------------------------------
    def diff_x(self, i: int) -> "MomentPoly":
        out: Dict[MKey, GaussQ] = {}
        for (h, e, eps, t), c in self.terms.items():
            if e[i]:
                _acc(out, (h, e[:i] + (e[i] - 1,) + e[i + 1:], eps, t), c * e[i])
        return MomentPoly._wrap(self.nvars, out, self.constraint_marked)

    def diff_eps(self, k: MultiIndex) -> "MomentPoly":
        k = tuple(k)
        out: Dict[MKey, GaussQ] = {}
        for (h, e, eps, t), c in self.terms.items():
            for pos, (kk, p) in enumerate(eps):
                if kk == k:
                    rest = eps[:pos] + (((kk, p - 1),) if p > 1 else ()) + eps[pos + 1:]
                    _acc(out, (h, e, rest, t), c * p)
        return MomentPoly._wrap(self.nvars, out, self.constraint_marked)

    def atom_derivatives(self) -> Dict[tuple, "MomentPoly"]:
        """Partial derivatives by every atom present: ``("x", i)`` or ``("e", k)``."""
        out: Dict[tuple, MomentPoly] = {}
        for i in range(self.nvars):
            if any(e[i] for (_, e, _, _) in self.terms):
                out[("x", i)] = self.diff_x(i)
        for k in sorted(self.eps_variables(), key=_eps_sort_key):
            out[("e", k)] = self.diff_eps(k)
        return out

    # formatting -----------------------------------------------------------
    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kv: (
            key_order(kv[0]), kv[0][0], [_eps_sort_key(k) + (p,) for k, p in kv[0][2]],
            tuple(-n for n in kv[0][1]), kv[0][3]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (h, e, eps, t), c in self.sorted_items():
            fs = [str(c) if c.is_real() else f"({c})"]
            if h:
                fs.append(f"hbar^{h}")
            fs.extend(f"x{i + 1}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(e) if p)
            fs.extend(f"eps{mi_ops.fmt(k)}" + (f"^{p}" if p > 1 else "") for k, p in eps)
            s = " * ".join(fs)
            parts.append(s + " [C]" if t else s)
        return " + ".join(parts)

    def __repr__(self):
        return f"MomentPoly({self})"

    def to_json(self) -> dict:
        """Machine form: ``"h<p>;<x exponents>;<eps list>[;C]" -> coefficient``."""
        out = {}
        for (h, e, eps, t), c in self.sorted_items():
            eps_txt = "|".join(",".join(map(str, k)) + f"^{p}" for k, p in eps)
            key = f"h{h};" + ",".join(map(str, e)) + ";" + eps_txt + (";C" if t else "")
            out[key] = str(c)
        return out

    @classmethod
    def from_json(cls, nvars: int, data: Mapping[str, str], constraint_marked=False):
        terms = {}
        for key, c in data.items():
            parts = key.split(";")
            h = int(parts[0][1:])
            e = tuple(int(s) for s in parts[1].split(",")) if parts[1] else ()
            eps = []
            if parts[2]:
                for item in parts[2].split("|"):
                    idx, p = item.split("^")
                    eps.append((tuple(int(s) for s in idx.split(",")), int(p)))
            t = len(parts) > 3 and parts[3] == "C"
            terms[(h, e, tuple(eps), t)] = GaussQ.parse(c)
        return cls(nvars, terms, constraint_marked)


# expectation, order, truncation ----------------------------------------------

def expectation(p: NCPoly, max_order: Optional[int] = None) -> MomentPoly:
    """Map an algebra element to its moment polynomial via the Weyl basis."""
    q = to_delta(p)
    M = p.spec.dimension
    out: Dict[MKey, GaussQ] = {}
    for k, cp in weyl_basis_decompose(q, max_order).items():
        d = sum(k)
        if d == 1:
            continue
        eps = ((k, 1),) if d >= 2 else ()
        for (h, e), c in cp.terms.items():
            _acc(out, (h, e, eps, False), c)
    return MomentPoly._wrap(M, out)


def _check_mode(f: MomentPoly, constraint) -> bool:
    if constraint is None or constraint is False:
        return False
    if not f.constraint_marked:
        raise ValueError("constraint mode requested on a polynomial without constraint tags")
    return True


def order(f: MomentPoly, constraint=None):
    """Leading semiclassical order; infinite for the zero polynomial.

    Passing ``constraint`` (the classical constraint, or True) switches on
    the rule that terms tagged as proportional to it count two orders higher.
    """
    mode = _check_mode(f, constraint)
    if not f.terms:
        return INFINITE
    return min(key_order(k, mode) for k in f.terms)


def truncate(f: MomentPoly, N: int, constraint=None) -> MomentPoly:
    """Drop every monomial of order above ``N``."""
    mode = _check_mode(f, constraint)
    return MomentPoly._wrap(f.nvars, {k: c for k, c in f.terms.items() if key_order(k, mode) <= N},
                            f.constraint_marked)


# numeric evaluation -----------------------------------------------------------

@dataclass
class PhasePoint:
    """Values for the expectation values, the moments and hbar."""

    x: Tuple
    eps: Dict[MultiIndex, object] = field(default_factory=dict)
    hbar: object = 0

    def __post_init__(self):
        self.x = tuple(self.x)
        self.eps = {tuple(k): v for k, v in self.eps.items()}

    def moment(self, k: MultiIndex):
        k = tuple(k)
        d = sum(k)
        if d == 0:
            return 1
        if d == 1:
            return 0
        try:
            return self.eps[k]
        except KeyError:
            raise MissingVariableError(f"no value for eps{mi_ops.fmt(k)}") from None

    def is_exact(self) -> bool:
        vals = list(self.x) + list(self.eps.values()) + [self.hbar]
        return all(not isinstance(v, (float, complex)) for v in vals)


def evaluate(f: MomentPoly, at: PhasePoint, exact: Optional[bool] = None):
    """Substitute a phase point.

    Returns a complex float by default; ``exact=True`` keeps Gaussian
    rationals (all inputs must then be exact).
    """
    if len(at.x) != f.nvars:
        raise ValueError(f"point has {len(at.x)} expectation values, expected {f.nvars}")
    if exact is None:
        exact = False
    if exact:
        total = GaussQ(0)
        hb = GaussQ.coerce(at.hbar)
        xs = [GaussQ.coerce(v) for v in at.x]
        for (h, e, eps, _), c in f.terms.items():
            t = c * hb ** h if h else c
            for v, p in zip(xs, e):
                if p:
                    t = t * v ** p
            for k, p in eps:
                t = t * GaussQ.coerce(at.moment(k)) ** p
            total = total + t
        return total
    total = 0j
    hb = complex(at.hbar)
    xs = [complex(v) for v in at.x]
    for (h, e, eps, _), c in f.terms.items():
        t = complex(c)
        if h:
            t *= hb ** h
        for v, p in zip(xs, e):
            if p:
                t *= v ** p
        for k, p in eps:
            t *= complex(at.moment(k)) ** p
        total += t
    return total


def all_moments(M: int, N: int) -> Tuple[MultiIndex, ...]:
    """Moment indices with 2 <= degree <= N in (degree, descending lex) order."""
    return tuple(mi_ops.up_to_degree(M, N, start=2))


__all__ = [
    "MomentPoly", "PhasePoint", "MissingVariableError", "expectation", "order", "truncate",
    "evaluate", "key_order", "all_moments", "INFINITE", "DX",
]
