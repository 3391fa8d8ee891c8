"""Quantum Poisson bracket on moment polynomials and its order-N truncation.

Brackets of algebra elements use the extended-algebra formula

    {f, g} = (1/i hbar) <[f, g]> + <df/dx_i> <dg/dx_j> {x_i, x_j}
             + (1/i hbar) <df/dx_i> <[Dx_i, g]> + (1/i hbar) <dg/dx_i> <[f, Dx_i]>

Moment polynomials are bracketed by the Leibniz rule over the atoms x_i and
eps_k, whose lifts are ``Dx_i + x_i 1`` and the Weyl monomials ``e_k``.
"""

from __future__ import annotations

import threading
from typing import Dict, Optional, Tuple

from . import multiindex as mi_ops
from ._numbers import ONE
from .moments import MomentPoly, _eps_sort_key, expectation, key_order, truncate
from .nc_poly import DX, NCPoly, commutator, partial_derivative, to_delta, weyl_monomial

Atom = Tuple[str, object]  # ("x", i) or ("e", multi_index)


def atom_order(a: Atom) -> int:
    return 0 if a[0] == "x" else sum(a[1])


def _lift_len(a: Atom) -> int:
    return 1 if a[0] == "x" else sum(a[1])


def _atom_sort_key(a: Atom):
    return (0, a[1]) if a[0] == "x" else (1,) + _eps_sort_key(a[1])


def atom_poly(M: int, a: Atom) -> MomentPoly:
    return MomentPoly.x(M, a[1]) if a[0] == "x" else MomentPoly.eps(a[1])


def lift(spec, a: Atom) -> NCPoly:
    """Representative of an atom in the extended algebra."""
    M = spec.dimension
    if a[0] == "x":
        i = a[1]
        return NCPoly(spec, DX, {((i,), 0, (0,) * M): ONE, ((), 0, mi_ops.unit(M, i)): ONE})
    return weyl_monomial(spec, a[1], DX)


def _classical_bracket(spec, i: int, j: int) -> MomentPoly:
    M = spec.dimension
    out = MomentPoly.zero(M)
    for k, alpha in spec.bracket_terms(i, j):
        out = out + MomentPoly.x(M, k) * alpha
    return out


def bracket_ext(f: NCPoly, g: NCPoly, max_order: Optional[int] = None) -> MomentPoly:
    """Bracket of two extended-algebra elements.

    With ``max_order`` every commutator is rewritten only up to order
    ``max_order + 2`` (division by i hbar lowers the order by two) and the
    result is truncated at ``max_order``.
    """
    spec = f.spec
    M = spec.dimension
    f, g = to_delta(f), to_delta(g)
    cap = None if max_order is None else max_order + 2

    def ex(p: NCPoly) -> MomentPoly:
        return expectation(p, cap)

    out = ex(commutator(f, g, cap)).div_i_hbar()
    df = [partial_derivative(f, i) for i in range(M)]
    dg = [partial_derivative(g, i) for i in range(M)]
    edf = [ex(d) if d else None for d in df]
    edg = [ex(d) if d else None for d in dg]
    gens = [NCPoly.generator(spec, i, DX) for i in range(M)]
    for i in range(M):
        if edf[i] is None:
            continue
        for j in range(M):
            if edg[j] is None:
                continue
            cb = _classical_bracket(spec, i, j)
            if cb:
                out = out + edf[i] * edg[j] * cb
        out = out + edf[i] * ex(commutator(gens[i], g, cap)).div_i_hbar()
    for i in range(M):
        if edg[i] is None:
            continue
        out = out + edg[i] * ex(commutator(f, gens[i], cap)).div_i_hbar()
    if max_order is not None:
        out = truncate(out, max_order)
    return out


class BracketTable:
    """Memoised brackets of atom pairs.

    Entries are keyed by the ordered pair and an optional order cap; the
    antisymmetric partner is derived on lookup.  Concurrent misses on the
    same key may compute twice but store identical values.
    """

    def __init__(self, spec):
        self.spec = spec
        self._data: Dict[tuple, MomentPoly] = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._data)

    def get(self, a: Atom, b: Atom, cap: Optional[int] = None) -> MomentPoly:
        if a == b:
            return MomentPoly.zero(self.spec.dimension)
        if _atom_sort_key(a) > _atom_sort_key(b):
            return -self.get(b, a, cap)
        # each rewrite step trades one letter for one hbar, so no term of the
        # bracket exceeds order 2 * (lift lengths); caps beyond that are moot
        if cap is not None and cap >= 2 * (_lift_len(a) + _lift_len(b)):
            cap = None
        key = (a, b, cap)
        hit = self._data.get(key)
        if hit is not None:
            return hit
        full = self._data.get((a, b, None))
        if full is not None:
            val = full if cap is None else truncate(full, cap)
        else:
            val = self._compute(a, b, cap)
        with self._lock:
            self._data.setdefault(key, val)
        return self._data[key]

    def _compute(self, a: Atom, b: Atom, cap: Optional[int]) -> MomentPoly:
        if a[0] == "x" and b[0] == "x":
            return _classical_bracket(self.spec, a[1], b[1])
        return bracket_ext(lift(self.spec, a), lift(self.spec, b), cap)

    def dump(self, max_degree: int) -> Dict[str, str]:
        """All entries between atoms with moment degree <= ``max_degree``."""
        M = self.spec.dimension
        atoms = [("x", i) for i in range(M)] + [("e", k) for k in
                                                  mi_ops.up_to_degree(M, max_degree, start=2)]
        out = {}
        for p, a in enumerate(atoms):
            for b in atoms[p + 1:]:
                out[f"{{{atom_name(a)}, {atom_name(b)}}}"] = str(self.get(a, b))
        return out


def atom_name(a: Atom) -> str:
    return f"x{a[1] + 1}" if a[0] == "x" else f"eps{mi_ops.fmt(a[1])}"


_TABLES: Dict[int, Tuple[object, BracketTable]] = {}
_TABLES_LOCK = threading.Lock()


def table_for(spec) -> BracketTable:
    with _TABLES_LOCK:
        hit = _TABLES.get(id(spec))
        if hit is None or hit[0] is not spec:
            hit = (spec, BracketTable(spec))
            _TABLES[id(spec)] = hit
    return hit[1]


def bracket(f: MomentPoly, g: MomentPoly, spec, max_order: Optional[int] = None,
            table: Optional[BracketTable] = None) -> MomentPoly:
    """Quantum Poisson bracket by the Leibniz rule over atoms.

    ``max_order`` returns the order-N truncated bracket, skipping atom pairs
    that cannot contribute below the cutoff.
    """
    if f.nvars != spec.dimension or g.nvars != spec.dimension:
        raise ValueError("moment polynomial does not match the algebra dimension")
    table = table or table_for(spec)
    M = spec.dimension
    da = f.atom_derivatives()
    db = g.atom_derivatives()
    out = MomentPoly.zero(M)
    for a, fa in da.items():
        if not fa:
            continue
        oa = _min_order(fa)
        for b, gb in db.items():
            if not gb:
                continue
            cap = None
            if max_order is not None:
                ob = _min_order(gb)
                # {a, b} has order >= |a| + |b| - 2
                if oa + ob + atom_order(a) + atom_order(b) - 2 > max_order:
                    continue
                cap = max_order - oa - ob
            ab = table.get(a, b, cap)
            if ab:
                out = out + fa * gb * ab
    if max_order is not None:
        out = truncate(out, max_order)
    return MomentPoly._wrap(M, out.terms)


def _min_order(f: MomentPoly) -> int:
    return min(key_order(k) for k in f.terms)


def truncated_bracket(f: MomentPoly, g: MomentPoly, N: int, spec,
                      table: Optional[BracketTable] = None) -> MomentPoly:
    """``Trunc_N({f, g})``."""
    return bracket(f, g, spec, max_order=N, table=table)
