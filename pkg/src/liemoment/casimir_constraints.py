"""Truncated Casimir constraint tower and functional-independence analysis.

Each constraint is ``C_i = <e_i C>`` for a Weyl monomial ``e_i``.  Writing
the Casimir in centred generators gives ``C(x) 1 + sum_{j != 0} d^jC/j! e_j``
exactly, so the term ``C(x) eps_i`` is identified structurally and tagged;
in constraint mode it counts two orders higher than its moment degree.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import multiindex as mi_ops
from ._numbers import GaussQ, format_rational, rational
from .algebra_def import as_order, casimir_element
from .coeffpoly import CoeffPoly
from .exact_linalg import bareiss_rank, left_nullspace, svd_rank
from .moments import MomentPoly, PhasePoint, evaluate, expectation, truncate
from .multiindex import MultiIndex
from .nc_poly import DX, NCPoly, is_central, product, to_delta, weyl_monomial


class NonCentralCasimirError(ValueError):
    """The supplied Casimir polynomial does not commute with the algebra."""


def count_nontrivial(M: int, N: int) -> Tuple[int, int]:
    """(number of moments of degree N, number of new constraints at order N)."""
    if M < 1 or N < 2:
        raise ValueError("need M >= 1 and N >= 2")
    return comb(N + M - 1, M - 1), comb(N + M - 2, M - 1)


def threads() -> int:
    try:
        n = int(os.environ.get("LIEMOMENT_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else min(8, os.cpu_count() or 1)


# tower -------------------------------------------------------------------------

def _casimir_rest(spec) -> Tuple[CoeffPoly, NCPoly]:
    """Split the centred Casimir into ``C(x) 1`` and the remainder."""
    chat = to_delta(casimir_element(spec))
    M = spec.dimension
    const = {(h, e): c for (w, h, e), c in chat.terms.items() if not w}
    rest = NCPoly._wrap(spec, DX, {k: c for k, c in chat.terms.items() if k[0]}, True)
    return CoeffPoly(M, const), rest


def constraint_for(spec, i: MultiIndex, N: int, _parts=None) -> MomentPoly:
    """Truncated ``<e_i C>`` with the ``C eps_i`` term tagged."""
    N = as_order(N)
    cx, rest = _parts or _casimir_rest(spec)
    i = tuple(i)
    e_i = weyl_monomial(spec, i, DX)
    body = expectation(product(e_i, rest, max_order=N), max_order=N)
    tagged = MomentPoly.from_coeffpoly(cx, tagged=True) * MomentPoly.eps(i)
    return truncate((tagged + body).mark_constraint(), N, constraint=True)


@dataclass
class ConstraintTower:
    """Constraints ``C_i`` for every ``|i| <= N - 1``, in (degree, descending lex) order."""

    spec: object
    N: int
    C: CoeffPoly
    constraints: Dict[MultiIndex, MomentPoly]
    _derivs: Dict[MultiIndex, CoeffPoly] = field(default_factory=dict, repr=False)

    @property
    def M(self) -> int:
        return self.spec.dimension

    def derivative(self, k: MultiIndex) -> CoeffPoly:
        """Cached partial derivative of the classical constraint."""
        k = tuple(k)
        d = self._derivs.get(k)
        if d is None:
            d = self.C.multi_derivative(k)
            self._derivs[k] = d
        return d

    def census(self) -> Dict[int, int]:
        """Number of nonzero constraints per degree of ``i``."""
        out: Dict[int, int] = {}
        for i, c in self.constraints.items():
            if c:
                out[sum(i)] = out.get(sum(i), 0) + 1
        return out

    def __len__(self):
        return len(self.constraints)

    def items(self):
        return self.constraints.items()

    def to_text(self) -> List[str]:
        return [f"C{mi_ops.fmt(i)} = {c}" for i, c in self.constraints.items()]


def generate_tower(spec, N: int, parallel: bool = False) -> ConstraintTower:
    """Build the order-N truncated constraint tower.

    Raises
    ------
    NonCentralCasimirError
        If the Weyl-quantised Casimir fails to commute with a generator.
    ValueError
        If ``N < 2``.
    """
    N = as_order(N)
    if not is_central(casimir_element(spec)):
        raise NonCentralCasimirError("the Casimir polynomial is not central")
    parts = _casimir_rest(spec)
    idx = list(mi_ops.up_to_degree(spec.dimension, N - 1))

    def work(i):
        return constraint_for(spec, i, N, parts)

    if parallel and threads() > 1:
        with ThreadPoolExecutor(threads()) as ex:
            values = list(ex.map(work, idx))
    else:
        values = [work(i) for i in idx]
    tower = ConstraintTower(spec, N, spec.constraint, dict(zip(idx, values)))
    expected = sum(comb(n + spec.dimension - 1, spec.dimension - 1) for n in range(N))
    if len(tower) != expected:  # pragma: no cover - enumeration invariant
        raise AssertionError("tower census mismatch")
    return tower


# symmetric gradient --------------------------------------------------------------

@dataclass
class GradientMatrix:
    """Polynomial matrix d_eps C~_i: rows ``1 <= |i| <= N-1``, columns ``2 <= |j| <= N``."""

    rows: List[MultiIndex]
    cols: List[MultiIndex]
    entries: List[List[CoeffPoly]]

    def evaluate(self, x: Sequence) -> List[List[object]]:
        exact = all(not isinstance(v, (float, complex)) for v in x)
        out = []
        for row in self.entries:
            vals = []
            for p in row:
                v = p.evaluate(x)
                if exact:
                    if not v.is_real():
                        raise ValueError("symmetric gradient entry is not real")
                    vals.append(v.re)
                else:
                    vals.append(v)
            out.append(vals)
        return out


def symmetric_gradient(tower: ConstraintTower) -> GradientMatrix:
    """Read the hbar-free linear-in-eps part of every constraint."""
    M, N = tower.M, tower.N
    rows = list(mi_ops.up_to_degree(M, N - 1, start=1))
    cols = list(mi_ops.up_to_degree(M, N, start=2))
    col_pos = {j: n for n, j in enumerate(cols)}
    entries = []
    for i in rows:
        acc: List[Dict] = [dict() for _ in cols]
        for (h, e, eps, _t), c in tower.constraints[i].terms.items():
            if h or len(eps) != 1 or eps[0][1] != 1:
                continue
            slot = acc[col_pos[eps[0][0]]]
            key = (0, e)
            v = slot.get(key)
            slot[key] = c if v is None else v + c
        entries.append([CoeffPoly(M, s) for s in acc])
    return GradientMatrix(rows, cols, entries)


def symmetric_gradient_formula(spec, N: int) -> GradientMatrix:
    """The same matrix from the Taylor formula, for cross-checking."""
    M = spec.dimension
    C = spec.constraint
    rows = list(mi_ops.up_to_degree(M, N - 1, start=1))
    cols = list(mi_ops.up_to_degree(M, N, start=2))
    entries = []
    for i in rows:
        row = []
        for j in cols:
            if not mi_ops.leq(i, j) or (j == i and sum(i) == N - 1):
                row.append(CoeffPoly(M))
                continue
            d = mi_ops.sub(j, i)
            row.append(C.multi_derivative(d) * GaussQ(rational(1) / mi_ops.factorial(d)))
        entries.append(row)
    return GradientMatrix(rows, cols, entries)


# 1/C derivatives -------------------------------------------------------------------

def inv_c_derivative(C: CoeffPoly, k: int, m: int, point: Sequence):
    """``d^m/dx_k^m (1/C)`` at a point by the Leibniz recursion

    ``D_m = -(1/C) sum_{n<m} binom(m, n) d^{m-n}C D_n``, with ``D_0 = 1/C``.
    Exact for exact points.
    """
    c0 = C.evaluate(point)
    if not c0:
        raise ValueError("C vanishes at the point")
    D = [GaussQ(1) / c0 if isinstance(c0, GaussQ) else 1.0 / c0]
    ders = [C.derivative(k, n).evaluate(point) for n in range(m + 1)]
    for mm in range(1, m + 1):
        s = 0
        for n in range(mm):
            s = s + ders[mm - n] * D[n] * comb(mm, n)
        D.append(-s / c0)
    return D[m]


# independence ------------------------------------------------------------------------

@dataclass
class GradientReport:
    """Rank analysis of the symmetric gradient at one point."""

    point: Tuple
    N: int
    rows: List[MultiIndex]
    cols: List[MultiIndex]
    rank: int
    exact: bool
    kernel: List[List[object]]
    C_value: object
    dC: List[object]
    dC_zero: bool
    invC_test: Dict[int, object]
    hbar: Optional[float] = None
    full_rank: Optional[int] = None
    advisory: List[str] = field(default_factory=list)
    singular_values: Optional[List[float]] = None

    @property
    def deficient(self) -> bool:
        return self.rank < len(self.rows)

    def to_json(self) -> dict:
        def num(v):
            if isinstance(v, GaussQ):
                return str(v)
            if self.exact and not isinstance(v, (float, complex)):
                return format_rational(v)
            v = complex(v)
            return v.real if v.imag == 0 else [v.real, v.imag]

        return {
            "point": [num(v) for v in self.point],
            "order": self.N,
            "rank": self.rank,
            "rows": len(self.rows),
            "cols": len(self.cols),
            "row_labels": [mi_ops.fmt(i) for i in self.rows],
            "col_labels": [mi_ops.fmt(j) for j in self.cols],
            "deficient": self.deficient,
            "exact": self.exact,
            "kernel": [[num(v) for v in vec] for vec in self.kernel],
            "C": num(self.C_value),
            "dC_zero": self.dC_zero,
            "invC_test": {str(k + 1): num(v) for k, v in self.invC_test.items()},
            "hbar": self.hbar,
            "full_rank": self.full_rank,
            "advisory": list(self.advisory),
            "singular_values": self.singular_values,
        }


def _is_exact(point) -> bool:
    return all(not isinstance(v, (float, complex)) for v in point)


def _as_point(point) -> Tuple:
    out = []
    for v in point:
        if isinstance(v, (float, complex)):
            out.append(v)
        elif isinstance(v, str):
            out.append(rational(v))
        else:
            out.append(rational(v))
    return tuple(out)


def _normalise_float(vec: np.ndarray, tol: float) -> List[complex]:
    big = np.abs(vec).max() if vec.size else 0.0
    lead = next((v for v in vec if abs(v) > tol * max(big, 1.0)), None)
    if lead is None:
        return [complex(v) for v in vec]
    out = [complex(v / lead) for v in vec]
    return [v.real if abs(v.imag) < 1e-15 else v for v in out]


def full_gradient(tower: ConstraintTower, point: PhasePoint) -> np.ndarray:
    """Numeric d_eps C_i including hbar corrections and nonlinear moment terms."""
    M, N = tower.M, tower.N
    rows = list(mi_ops.up_to_degree(M, N - 1, start=1))
    cols = list(mi_ops.up_to_degree(M, N, start=2))
    G = np.zeros((len(rows), len(cols)), dtype=complex)
    for r, i in enumerate(rows):
        c = tower.constraints[i].untagged()
        for q, j in enumerate(cols):
            d = c.diff_eps(j)
            if d:
                G[r, q] = evaluate(d, point)
    return G


def independence_check(tower: ConstraintTower, point: Sequence, tolerance: float = 1e-10,
                       hbar: Optional[float] = None,
                       moments: Optional[Dict[MultiIndex, float]] = None,
                       full: bool = False,
                       grad: Optional[GradientMatrix] = None) -> GradientReport:
    """Rank of the symmetric gradient at ``point``.

    Exact fraction-free elimination when every coordinate is rational,
    singular-value thresholding at ``tolerance * s_max`` otherwise.  With
    ``full=True`` (needs ``hbar``) the complete eps-gradient including
    reordering terms is ranked as well.
    """
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    M, N = tower.M, tower.N
    point = _as_point(point)
    if len(point) != M:
        raise ValueError(f"point has {len(point)} coordinates, expected {M}")
    grad = grad or symmetric_gradient(tower)
    exact = _is_exact(point)
    values = grad.evaluate(point)
    svals = None
    if exact:
        rank = bareiss_rank(values) if values else 0
        kernel = left_nullspace(values) if rank < len(values) else []
    else:
        rank, s, kern = svd_rank(np.array(values, dtype=complex), tolerance)
        svals = [float(v) for v in s]
        kernel = [_normalise_float(v, tolerance) for v in kern]

    C = tower.C
    c_val = C.evaluate(point)
    dC = [C.derivative(k).evaluate(point) for k in range(M)]
    if exact:
        c_val, dC = c_val.re, [d.re for d in dC]
        zero = lambda v: not v  # noqa: E731
    else:
        zero = lambda v: abs(v) <= tolerance  # noqa: E731
    inv = {}
    if not zero(c_val):
        for k in range(M):
            if not zero(dC[k]):
                v = inv_c_derivative(C, k, N - 2, point)
                inv[k] = v.re if isinstance(v, GaussQ) else v
    report = GradientReport(point, N, grad.rows, grad.cols, rank, exact, kernel, c_val, dC,
                            all(zero(d) for d in dC), inv, hbar, singular_values=svals)
    if hbar is not None:
        lim = 10 * float(hbar)
        if abs(complex(c_val)) < lim and not zero(c_val):
            report.advisory.append(f"|C| = {abs(complex(c_val)):.3g} is below 10*hbar")
        for k, v in inv.items():
            if abs(complex(c_val) * complex(v)) < lim:
                report.advisory.append(
                    f"|C d^{N - 2}(1/C)/dx{k + 1}^{N - 2}| is below 10*hbar")
        if full:
            pp = PhasePoint(tuple(float(v) for v in point), moments or {}, float(hbar))
            G = full_gradient(tower, pp)
            report.full_rank = svd_rank(G, tolerance)[0] if G.size else 0
    elif full:
        raise ValueError("the full gradient needs a numeric hbar")
    return report


# recursions for derivatives of 1/C ---------------------------------------------------------

@dataclass
class RecursionReport:
    passed: bool
    checked: int
    residuals: List[Tuple[int, int, float]] = field(default_factory=list)
    closure: List[Tuple[int, object, object]] = field(default_factory=list)
    note: str = ""


def kernel_recursion_check(tower: ConstraintTower, report: GradientReport,
                           tolerance: float = 1e-9) -> RecursionReport:
    """Audit kernel vectors against the single-direction recursions.

    For every direction k with ``gamma^1_(k)`` defined, the components
    ``gamma^m_(k) = gamma`` at ``i = m v_k`` must satisfy
    ``gamma^m = gamma^1 C/(m-1)! d^{m-1}(1/C)`` for ``m <= N-2`` and the
    closure ``sum_{n=1}^{N-2} gamma^n/(N-1-n)! d^{N-1-n}C
    = -C gamma^1 C/(N-2)! d^{N-2}(1/C)``, whose two sides vanish together.
    """
    if not report.kernel:
        return RecursionReport(True, 0, note="full rank")
    M, N = tower.M, tower.N
    point = report.point
    C = tower.C
    c0 = C.evaluate(point)
    if not c0:
        return RecursionReport(True, 0, note="on the constraint surface")
    exact = report.exact
    pos = {i: r for r, i in enumerate(report.rows)}

    def val(v):
        return v if exact else complex(v)

    def diff(a, b):
        d = a - b
        return 0.0 if exact and not d else abs(complex(d))

    out = RecursionReport(True, 0)
    for gamma in report.kernel:
        for k in range(M):
            chain = [None] + [val(gamma[pos[mi_ops.unit(M, k, m)]]) for m in range(1, N)]
            g1 = chain[1]
            for m in range(2, N - 1):
                pred = g1 * c0 * inv_c_derivative(C, k, m - 1, point) / factorial(m - 1)
                r = diff(chain[m], pred)
                out.residuals.append((k, m, r))
                out.checked += 1
                if r > tolerance:
                    out.passed = False
            lhs = 0
            for n in range(1, N - 1):
                lhs = lhs + chain[n] * C.derivative(k, N - 1 - n).evaluate(point) / factorial(N - 1 - n)
            rhs = -c0 * g1 * c0 * inv_c_derivative(C, k, N - 2, point) / factorial(N - 2)
            out.closure.append((k, lhs, rhs))
            out.checked += 1
            if diff(lhs, rhs) > tolerance or diff(lhs, 0) > tolerance:
                out.passed = False
    return out


# grid scans --------------------------------------------------------------------------------

def parse_axis(text: str) -> Tuple[int, List[Fraction]]:
    """``"x1=a:b:step"`` -> (0-based index, exact grid values)."""
    name, rng = text.split("=")
    a, b, step = (Fraction(s.strip()) for s in rng.split(":"))
    if step <= 0:
        raise ValueError("grid step must be positive")
    k = int(name.strip().lstrip("x")) - 1
    vals = []
    v = a
    while v <= b:
        vals.append(v)
        v += step
    return k, vals


def scan_grid(tower: ConstraintTower, axes: Sequence[Tuple[int, Sequence]],
              base: Optional[Sequence] = None, tolerance: float = 1e-10,
              parallel: bool = True) -> List[GradientReport]:
    """Independence reports on a Cartesian grid, in input order."""
    M = tower.M
    base = list(base) if base is not None else [0] * M
    points = [tuple(base)]
    for k, vals in axes:
        nxt = []
        for p in points:
            for v in vals:
                q = list(p)
                q[k] = v
                nxt.append(tuple(q))
        points = nxt
    grad = symmetric_gradient(tower)
    points = [tuple(rational(Fraction(v)) if isinstance(v, Fraction) else v for v in p)
              for p in points]

    def work(p):
        return independence_check(tower, p, tolerance, grad=grad)

    if parallel and threads() > 1 and len(points) > 1:
        with ThreadPoolExecutor(threads()) as ex:
            return list(ex.map(work, points))
    return [work(p) for p in points]
