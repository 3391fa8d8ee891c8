"""Noncommutative polynomials in the enveloping algebra and its extension.

Two generator kinds are supported: ``X`` words in the generators x_i and
``DX`` words in the centred generators Dx_i = x_i - <x_i> 1.  Coefficients
are commutative polynomials in the classical symbols x_1..x_M and formal
hbar over the Gaussian rationals; internally every term is stored
flattened as ``(word, hbar_power, exponents) -> GaussQ``.

The PBW normal form orders each word ascending by generator index.  All
rewriting goes through one memoised primitive: the normal form of
``sorted_word * letter``.  Weyl-symmetrised monomials are built from the
recursion ``e_k = (1/|k|) sum_a k_a e_{k - v_a} Dx_a`` and decomposed by
unitriangular back-substitution, cached per multi-index.
"""

from __future__ import annotations

import math
import threading
import weakref
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple

from . import multiindex as mi_ops
from ._numbers import ONE, GaussQ
from .coeffpoly import CoeffPoly
from .multiindex import MultiIndex

X = "x"
DX = "dx"
KINDS = (X, DX)

INFINITE = math.inf

MAX_DEGREE = 16

Word = Tuple[int, ...]
TermKey = Tuple[Word, int, MultiIndex]
Terms = Dict[TermKey, GaussQ]


def set_max_degree(n: int) -> None:
    """Change the word-length cap (default 16)."""
    global MAX_DEGREE
    if n < 1:
        raise ValueError("max degree must be positive")
    MAX_DEGREE = int(n)


def _check_degree(word: Word) -> None:
    if len(word) > MAX_DEGREE:
        raise OverflowError(f"word of length {len(word)} exceeds the cap of {MAX_DEGREE}")


def _add_into(out: Terms, key: TermKey, c: GaussQ) -> None:
    v = out.get(key)
    if v is None:
        out[key] = c
    else:
        v = v + c
        if v:
            out[key] = v
        else:
            del out[key]


def _shift(terms: Terms, h: int, e: MultiIndex, c: GaussQ, out: Terms) -> None:
    """Accumulate ``c * hbar^h * x^e * terms`` into ``out``."""
    if not h and not any(e):
        for k, v in terms.items():
            _add_into(out, k, v * c)
        return
    for (w, h2, e2), v in terms.items():
        _add_into(out, (w, h2 + h, tuple(a + b for a, b in zip(e, e2))), v * c)


def _order_of(key: TermKey) -> int:
    return len(key[0]) + 2 * key[1]


def _prune(terms: Terms, max_order: Optional[int]) -> Terms:
    if max_order is None:
        return terms
    return {k: v for k, v in terms.items() if _order_of(k) <= max_order}


# rewriting engine -------------------------------------------------------------

class _Rewriter:
    """Memoised PBW and Weyl machinery for one algebra and one generator kind."""

    def __init__(self, spec, kind: str):
        self.spec = spec
        self.kind = kind
        self.M = spec.dimension
        self.zero_e = (0,) * self.M
        self._mul: Dict[Tuple[Word, int], Terms] = {}
        self._weyl: Dict[MultiIndex, Terms] = {}
        self._pbw: Dict[MultiIndex, Dict[Tuple[MultiIndex, int, MultiIndex], GaussQ]] = {}
        # [b, a] for b > a as terms
        self._swap: Dict[Tuple[int, int], Terms] = {}
        for b in range(self.M):
            for a in range(b):
                self._swap[(b, a)] = self._commutator_letters(b, a)

    def _commutator_letters(self, b: int, a: int) -> Terms:
        out: Terms = {}
        for k, alpha in self.spec.bracket_terms(b, a):
            c = alpha.times_i()  # i * hbar * alpha
            _add_into(out, ((k,), 1, self.zero_e), c)
            if self.kind == DX:
                e = mi_ops.unit(self.M, k)
                _add_into(out, ((), 1, e), c)
        return out

    def mul_letter(self, s: Word, a: int) -> Terms:
        """Normal form of ``s * letter`` for a sorted word ``s``."""
        key = (s, a)
        hit = self._mul.get(key)
        if hit is not None:
            return hit
        if not s or s[-1] <= a:
            w = s + (a,)
            _check_degree(w)
            out = {(w, 0, self.zero_e): ONE}
        else:
            u, b = s[:-1], s[-1]
            out: Terms = {}
            # u b a = (u a) b + u [b, a]
            for (w, h, e), c in self.mul_letter(u, a).items():
                _shift(self.mul_letter(w, b), h, e, c, out)
            for (cw, h, e), c in self._swap[(b, a)].items():
                if cw:
                    _shift(self.mul_letter(u, cw[0]), h, e, c, out)
                else:
                    _add_into(out, (u, h, e), c)
        self._mul[key] = out
        return out

    def times_word(self, terms: Terms, word: Iterable[int],
                   max_order: Optional[int] = None) -> Terms:
        """Normal form of ``terms * word`` where ``terms`` is already normal."""
        cur = terms
        for a in word:
            nxt: Terms = {}
            for (w, h, e), c in cur.items():
                _shift(self.mul_letter(w, a), h, e, c, nxt)
            cur = _prune(nxt, max_order)
        return cur

    def normal_word(self, word: Word, max_order: Optional[int] = None) -> Terms:
        _check_degree(word)
        return self.times_word({((), 0, self.zero_e): ONE}, word, max_order)

    def weyl(self, k: MultiIndex) -> Terms:
        """Normal form of the Weyl-symmetrised monomial with multiplicities ``k``."""
        hit = self._weyl.get(k)
        if hit is not None:
            return hit
        n = sum(k)
        if n <= 1:
            out = {(mi_ops.letters(k), 0, self.zero_e): ONE}
        else:
            _check_degree(mi_ops.letters(k))
            out = {}
            for a, ka in enumerate(k):
                if not ka:
                    continue
                prev = self.weyl(k[:a] + (ka - 1,) + k[a + 1:])
                part = self.times_word(prev, (a,))
                w = GaussQ(ka) / n
                for key, c in part.items():
                    _add_into(out, key, c * w)
        self._weyl[k] = out
        return out

    def pbw_to_weyl(self, k: MultiIndex) -> Dict[Tuple[MultiIndex, int, MultiIndex], GaussQ]:
        """Sorted PBW monomial ``letters(k)`` as a combination of Weyl monomials.

        Keys are ``(weyl multi-index, hbar power, classical exponents)``.
        """
        hit = self._pbw.get(k)
        if hit is not None:
            return hit
        out = {(k, 0, self.zero_e): ONE}
        lead = mi_ops.letters(k)
        for (w, h, e), c in self.weyl(k).items():
            if w == lead and h == 0 and not any(e):
                continue
            for (j, h2, e2), c2 in self.pbw_to_weyl(mi_ops.from_word(w, self.M)).items():
                key = (j, h + h2, tuple(p + q for p, q in zip(e, e2)))
                _add_into(out, key, -(c * c2))
        self._pbw[k] = out
        return out


_ENGINES: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()
_ENGINE_LOCK = threading.Lock()


def engine(spec, kind: str) -> _Rewriter:
    if kind not in KINDS:
        raise ValueError(f"unknown generator kind {kind!r}")
    with _ENGINE_LOCK:
        per_spec = _ENGINES.get(spec)
        if per_spec is None:
            per_spec = {}
            _ENGINES[spec] = per_spec
        eng = per_spec.get(kind)
        if eng is None:
            eng = _Rewriter(spec, kind)
            per_spec[kind] = eng
    return eng


# the polynomial type ----------------------------------------------------------

class NCPoly:
    """An element of the enveloping algebra (``X``) or its extension (``DX``).

    Parameters
    ----------
    spec : LieAlgebraSpec
        Algebra supplying the commutation relations.
    kind : {"x", "dx"}
        Whether letters denote generators or centred generators.
    terms : mapping
        ``(word, hbar_power, exponents) -> coefficient``.
    normal : bool
        Caller's promise that every word is sorted.
    """

    __slots__ = ("spec", "kind", "terms", "normal")

    def __init__(self, spec, kind: str, terms: Mapping[TermKey, object] = (), normal=None):
        if kind not in KINDS:
            raise ValueError(f"unknown generator kind {kind!r}")
        M = spec.dimension
        clean: Terms = {}
        for (w, h, e), c in dict(terms).items():
            w, e = tuple(w), tuple(e)
            if len(e) != M or h < 0 or any(not 0 <= a < M for a in w):
                raise ValueError(f"malformed term key {(w, h, e)!r}")
            _check_degree(w)
            c = GaussQ.coerce(c)
            if c:
                _add_into(clean, (w, h, e), c)
        self.spec = spec
        self.kind = kind
        self.terms = clean
        if normal is None:
            normal = all(_is_sorted(w) for w, _, _ in clean)
        self.normal = normal

    @classmethod
    def _wrap(cls, spec, kind, terms: Terms, normal: bool) -> "NCPoly":
        obj = object.__new__(cls)
        obj.spec = spec
        obj.kind = kind
        obj.terms = terms
        obj.normal = normal
        return obj

    # constructors ---------------------------------------------------------
    @classmethod
    def one(cls, spec, kind: str = X) -> "NCPoly":
        return cls._wrap(spec, kind, {((), 0, (0,) * spec.dimension): ONE}, True)

    @classmethod
    def zero(cls, spec, kind: str = X) -> "NCPoly":
        return cls._wrap(spec, kind, {}, True)

    @classmethod
    def generator(cls, spec, i: int, kind: str = X) -> "NCPoly":
        return cls._wrap(spec, kind, {((i,), 0, (0,) * spec.dimension): ONE}, True)

    @classmethod
    def word(cls, spec, word: Iterable[int], kind: str = X, coeff=1) -> "NCPoly":
        return cls(spec, kind, {(tuple(word), 0, (0,) * spec.dimension): coeff})

    @classmethod
    def scalar(cls, spec, value, kind: str = X) -> "NCPoly":
        """``value * 1`` for a CoeffPoly or exact number."""
        if isinstance(value, CoeffPoly):
            return cls._wrap(spec, kind, {((), h, e): c for (h, e), c in value.terms.items()}, True)
        return cls(spec, kind, {((), 0, (0,) * spec.dimension): value}, True)

    # queries --------------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def _same(self, other: "NCPoly") -> None:
        if other.spec is not self.spec:
            raise ValueError("polynomials belong to different algebras")
        if other.kind != self.kind:
            raise TypeError(f"generator kind mismatch: {self.kind} vs {other.kind}")

    def __eq__(self, other):
        if isinstance(other, NCPoly):
            if other.spec is not self.spec or other.kind != self.kind:
                return False
            return normal_form(self).terms == normal_form(other).terms
        if isinstance(other, int) and other == 0:
            return not normal_form(self).terms
        return NotImplemented

    __hash__ = None

    def degree(self) -> int:
        return max((len(w) for w, _, _ in self.terms), default=0)

    def coefficients(self) -> Dict[Word, CoeffPoly]:
        """Group the flattened terms by word."""
        grouped: Dict[Word, dict] = {}
        for (w, h, e), c in self.terms.items():
            grouped.setdefault(w, {})[(h, e)] = c
        M = self.spec.dimension
        return {w: CoeffPoly._from_clean(M, t) for w, t in grouped.items()}

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, NCPoly):
            other = NCPoly.scalar(self.spec, other, self.kind)
        self._same(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add_into(out, k, c)
        return NCPoly._wrap(self.spec, self.kind, out, self.normal and other.normal)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly._wrap(self.spec, self.kind, {k: -c for k, c in self.terms.items()},
                            self.normal)

    def __sub__(self, other):
        if not isinstance(other, NCPoly):
            other = NCPoly.scalar(self.spec, other, self.kind)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, value) -> "NCPoly":
        """Multiply by a central scalar (exact number or CoeffPoly)."""
        out: Terms = {}
        if isinstance(value, CoeffPoly):
            for (h, e), c in value.terms.items():
                _shift(self.terms, h, e, c, out)
        else:
            c = GaussQ.coerce(value)
            if c:
                out = {k: v * c for k, v in self.terms.items()}
        return NCPoly._wrap(self.spec, self.kind, out, self.normal)

    def __mul__(self, other):
        if isinstance(other, NCPoly):
            if self.normal and other.normal:
                return product(self, other)
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        out = NCPoly.one(self.spec, self.kind)
        for _ in range(n):
            out = out * self
        return out

    # formatting -----------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        sym = "X" if self.kind == X else "DX"
        parts = []
        for (w, h, e), c in sorted(self.terms.items(), key=lambda kv: (len(kv[0][0]), kv[0])):
            fs = [str(c) if c.is_real() else f"({c})"]
            if h:
                fs.append(f"hbar^{h}")
            fs.extend(f"x{i + 1}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(e) if p)
            fs.extend(f"{sym}{a + 1}" for a in w)
            parts.append(" * ".join(fs))
        return " + ".join(parts)

    def __repr__(self):
        return f"NCPoly[{self.kind}]({self})"

    def to_json(self) -> dict:
        """Debug dump: keys ``"w:<letters>;h<power>;<exponents>"``."""
        terms = {}
        for (w, h, e), c in sorted(self.terms.items()):
            terms["w:" + ",".join(map(str, w)) + f";h{h};" + ",".join(map(str, e))] = str(c)
        return {"kind": self.kind, "normal": self.normal, "terms": terms}

    @classmethod
    def from_json(cls, spec, data: Mapping) -> "NCPoly":
        terms = {}
        for key, c in data["terms"].items():
            wpart, hpart, epart = key.split(";")
            wtxt = wpart[2:]
            w = tuple(int(s) for s in wtxt.split(",")) if wtxt else ()
            e = tuple(int(s) for s in epart.split(",")) if epart else ()
            terms[(w, int(hpart[1:]), e)] = GaussQ.parse(c)
        return cls(spec, data["kind"], terms)


def _is_sorted(w: Word) -> bool:
    return all(w[i] <= w[i + 1] for i in range(len(w) - 1))


# operations -------------------------------------------------------------------

def multiply(a: NCPoly, b: NCPoly) -> NCPoly:
    """Free (concatenation) product; not normal-formed."""
    a._same(b)
    out: Terms = {}
    for (w1, h1, e1), c1 in a.terms.items():
        for (w2, h2, e2), c2 in b.terms.items():
            w = w1 + w2
            _check_degree(w)
            _add_into(out, (w, h1 + h2, tuple(p + q for p, q in zip(e1, e2))), c1 * c2)
    return NCPoly._wrap(a.spec, a.kind, out, not any(not _is_sorted(w) for w, _, _ in out))


def product(a: NCPoly, b: NCPoly, max_order: Optional[int] = None) -> NCPoly:
    """Normal form of ``a * b``.

    ``max_order`` drops terms of extended order above the bound while
    rewriting; rewriting never lowers the order, so the result equals the
    truncation of the full product.
    """
    a._same(b)
    eng = engine(a.spec, a.kind)
    na, nb = normal_form(a), normal_form(b)
    left = _prune(na.terms, max_order) if a.kind == DX else na.terms
    if a.kind != DX:
        max_order = None
    out: Terms = {}
    by_word: Dict[Word, Terms] = {}
    for (w, h, e), c in nb.terms.items():
        by_word.setdefault(w, {})[((), h, e)] = c
    for w, coeffs in by_word.items():
        part = eng.times_word(left, w, max_order)
        for (_, h, e), c in coeffs.items():
            _shift(part, h, e, c, out)
    return NCPoly._wrap(a.spec, a.kind, _prune(out, max_order), True)


def normal_form(p: NCPoly, max_order: Optional[int] = None) -> NCPoly:
    """Rewrite every word in ascending generator order using the CCRs."""
    if p.normal and max_order is None:
        return p
    if p.kind != DX:
        max_order = None
    eng = engine(p.spec, p.kind)
    out: Terms = {}
    for (w, h, e), c in p.terms.items():
        if _is_sorted(w):
            if max_order is None or len(w) + 2 * h <= max_order:
                _add_into(out, (w, h, e), c)
            continue
        _shift(eng.normal_word(w, max_order), h, e, c, out)
    return NCPoly._wrap(p.spec, p.kind, _prune(out, max_order), True)


def _div_i_hbar(terms: Terms) -> Terms:
    out = {}
    for (w, h, e), c in terms.items():
        if h < 1:
            raise ArithmeticError("commutator term not divisible by hbar")
        out[(w, h - 1, e)] = c.div_i()
    return out


def commutator(a: NCPoly, b: NCPoly, max_order: Optional[int] = None) -> NCPoly:
    """``ab - ba`` in normal form; every term is checked to carry hbar."""
    out = product(a, b, max_order) - product(b, a, max_order)
    for (_, h, _e) in out.terms:
        if h < 1:
            raise ArithmeticError("commutator has a term without hbar")
    return out


def div_i_hbar(p: NCPoly) -> NCPoly:
    """Exact division of an hbar-divisible polynomial by ``i hbar``."""
    return NCPoly._wrap(p.spec, p.kind, _div_i_hbar(p.terms), p.normal)


def _distinct_permutations(counts: list) -> Iterator[Tuple[int, ...]]:
    total = sum(counts)
    if total == 0:
        yield ()
        return
    for a, n in enumerate(counts):
        if n:
            counts[a] -= 1
            for rest in _distinct_permutations(counts):
                yield (a,) + rest
            counts[a] += 1


def weyl_symmetrize(spec, k: MultiIndex, kind: str = X) -> NCPoly:
    """Average of all orderings of the multiset ``k`` (words left unsorted)."""
    k = tuple(k)
    _check_degree(mi_ops.letters(k))
    words = list(_distinct_permutations(list(k)))
    w = GaussQ(1) / len(words)
    z = (0,) * spec.dimension
    return NCPoly(spec, kind, {(word, 0, z): w for word in words})


def weyl_monomial(spec, k: MultiIndex, kind: str = DX) -> NCPoly:
    """Normal form of the Weyl monomial with multiplicities ``k`` (cached)."""
    return NCPoly._wrap(spec, kind, engine(spec, kind).weyl(tuple(k)), True)


def weyl_quantize(spec, poly: CoeffPoly, kind: str = X) -> NCPoly:
    """Weyl-ordered lift of a commutative polynomial, monomial by monomial."""
    eng = engine(spec, kind)
    out: Terms = {}
    for (h, e), c in poly.terms.items():
        _shift(eng.weyl(e), h, (0,) * spec.dimension, c, out)
    return NCPoly._wrap(spec, kind, out, True)


def weyl_basis_decompose(p: NCPoly, max_order: Optional[int] = None) -> Dict[MultiIndex, CoeffPoly]:
    """Coefficients ``c_k`` with ``p = sum_k c_k e_k`` (e_k Weyl monomials of p's kind)."""
    eng = engine(p.spec, p.kind)
    M = p.spec.dimension
    acc: Dict[MultiIndex, dict] = {}
    for (w, h, e), c in normal_form(p).terms.items():
        for (j, h2, e2), c2 in eng.pbw_to_weyl(mi_ops.from_word(w, M)).items():
            hh = h + h2
            if max_order is not None and sum(j) + 2 * hh > max_order:
                continue
            slot = acc.setdefault(j, {})
            key = (hh, tuple(p_ + q for p_, q in zip(e, e2)))
            v = slot.get(key)
            v = c * c2 if v is None else v + c * c2
            if v:
                slot[key] = v
            else:
                slot.pop(key, None)
    return {j: CoeffPoly._from_clean(M, t) for j, t in acc.items() if t}


def recompose(spec, coeffs: Mapping[MultiIndex, CoeffPoly], kind: str = DX) -> NCPoly:
    """Inverse of :func:`weyl_basis_decompose`."""
    eng = engine(spec, kind)
    out: Terms = {}
    for j, cp in coeffs.items():
        for (h, e), c in cp.terms.items():
            _shift(eng.weyl(tuple(j)), h, e, c, out)
    return NCPoly._wrap(spec, kind, out, True)


def is_central(p: NCPoly) -> bool:
    """True iff ``p`` commutes with every generator of its kind."""
    for i in range(p.spec.dimension):
        g = NCPoly.generator(p.spec, i, p.kind)
        if commutator(p, g):
            return False
    return True


def _binary_expand(p: NCPoly, sign: int, target: str) -> NCPoly:
    # replace every letter a by (letter a + sign * x_a) in the other kind
    out: Terms = {}
    s = GaussQ(sign)
    for (w, h, e), c in p.terms.items():
        n = len(w)
        for mask in range(1 << n):
            kept = []
            ex = list(e)
            coef = c
            for pos, a in enumerate(w):
                if mask >> pos & 1:
                    ex[a] += 1
                    coef = coef * s
                else:
                    kept.append(a)
            _add_into(out, (tuple(kept), h, tuple(ex)), coef)
    return NCPoly._wrap(p.spec, target, out, p.normal)


def to_delta(p: NCPoly) -> NCPoly:
    """Rewrite in centred generators: x_i -> Dx_i + x_i 1."""
    if p.kind == DX:
        return p
    return _binary_expand(p, 1, DX)


def to_x(p: NCPoly) -> NCPoly:
    """Rewrite in plain generators: Dx_i -> x_i - x_i 1."""
    if p.kind == X:
        return p
    return _binary_expand(p, -1, X)


def ext_order(p: NCPoly):
    """Extended semiclassical order: min of word length + 2 * hbar power."""
    q = normal_form(to_delta(p))
    if not q.terms:
        return INFINITE
    return min(_order_of(k) for k in q.terms)


def partial_derivative(p: NCPoly, i: int) -> NCPoly:
    """Derivation d/dx_i; on centred letters it acts by d Dx_j / dx_i = -delta_ij."""
    out: Terms = {}
    for (w, h, e), c in p.terms.items():
        if e[i]:
            e2 = e[:i] + (e[i] - 1,) + e[i + 1:]
            _add_into(out, (w, h, e2), c * e[i])
        if p.kind == DX:
            for pos, a in enumerate(w):
                if a == i:
                    _add_into(out, (w[:pos] + w[pos + 1:], h, e), -c)
    return NCPoly._wrap(p.spec, p.kind, out, p.normal)
