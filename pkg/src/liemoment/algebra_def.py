"""Lie algebra input: structure constants, Casimir polynomial, truncation order."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Sequence, Tuple, Union

from ._numbers import GaussQ, Q, format_rational, rational
from .coeffpoly import CoeffPoly


class ConfigError(ValueError):
    """Raised for unreadable or ill-formed configuration files."""


@dataclass(frozen=True)
class TruncationOrder:
    N: int

    def __post_init__(self):
        if not isinstance(self.N, int) or isinstance(self.N, bool) or self.N < 2:
            raise ValueError(f"truncation order must be an integer >= 2, got {self.N!r}")

    def __int__(self):
        return self.N


def as_order(N: Union[int, TruncationOrder]) -> int:
    return TruncationOrder(int(N)).N


@dataclass(frozen=True, eq=False)
class LieAlgebraSpec:
    """A finite-dimensional Lie algebra with one distinguished central polynomial.

    ``structure_constants[i][j][k]`` is alpha_{ij}^k in
    ``[x_i, x_j] = i hbar alpha_{ij}^k x_k``.  ``casimir`` is the classical
    polynomial P (a :class:`CoeffPoly` with no hbar) and ``casimir_level``
    the constant r in ``C = P - r``.
    """

    dimension: int
    generators: Tuple[str, ...]
    structure_constants: Tuple[Tuple[Tuple[Q, ...], ...], ...]
    casimir: CoeffPoly
    casimir_level: Q = field(default_factory=lambda: rational(0))
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        sc = tuple(tuple(tuple(rational(v) for v in row) for row in plane)
                   for plane in self.structure_constants)
        object.__setattr__(self, "structure_constants", sc)
        object.__setattr__(self, "casimir_level", rational(self.casimir_level))
        # sparse view used by the rewriting code: (i, j) -> ((k, alpha), ...)
        sparse = {}
        for i in range(len(sc)):
            for j in range(len(sc[i])):
                entries = tuple((k, GaussQ(v)) for k, v in enumerate(sc[i][j]) if v)
                if entries:
                    sparse[(i, j)] = entries
        object.__setattr__(self, "_sparse", sparse)

    @property
    def M(self) -> int:
        return self.dimension

    def alpha(self, i: int, j: int, k: int) -> Q:
        return self.structure_constants[i][j][k]

    def bracket_terms(self, i: int, j: int):
        """Nonzero ``(k, alpha_{ij}^k)`` pairs."""
        return self._sparse.get((i, j), ())

    @property
    def constraint(self) -> CoeffPoly:
        """The classical constraint polynomial C = P - r."""
        return self.casimir - CoeffPoly.constant(self.dimension, self.casimir_level)

    def with_level(self, r) -> "LieAlgebraSpec":
        return LieAlgebraSpec(self.dimension, self.generators, self.structure_constants,
                              self.casimir, rational(r), self.name)

    def is_abelian(self) -> bool:
        return not self._sparse


@dataclass
class ValidationReport:
    antisymmetry: List[Tuple[int, int, int]] = field(default_factory=list)
    jacobi: List[Tuple[int, int, int, int]] = field(default_factory=list)
    other: List[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not (self.antisymmetry or self.jacobi or self.other)

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "antisymmetry_violations": [list(t) for t in self.antisymmetry],
            "jacobi_violations": [list(t) for t in self.jacobi],
            "other": list(self.other),
        }


def validate(spec: LieAlgebraSpec) -> ValidationReport:
    """Check shape, antisymmetry and the Jacobi identity exactly.

    Indices in the report are 0-based.
    """
    rep = ValidationReport()
    M = spec.dimension
    if M < 1:
        rep.other.append("dimension must be >= 1")
        return rep
    if len(spec.generators) != M:
        rep.other.append(f"expected {M} generator names, got {len(spec.generators)}")
    if len(set(spec.generators)) != len(spec.generators):
        rep.other.append("generator names are not distinct")
    sc = spec.structure_constants
    if len(sc) != M or any(len(row) != M or any(len(v) != M for v in row) for row in sc):
        rep.other.append("structure_constants must be an M x M x M array")
        return rep
    if spec.casimir.nvars != M:
        rep.other.append("casimir polynomial has the wrong number of variables")
    elif not spec.casimir.is_classical():
        rep.other.append("casimir polynomial must not contain hbar")
    for i in range(M):
        for j in range(i, M):
            for k in range(M):
                if sc[i][j][k] != -sc[j][i][k]:
                    rep.antisymmetry.append((i, j, k))
    for i in range(M):
        for j in range(M):
            for k in range(M):
                for l in range(M):
                    s = 0
                    for m in range(M):
                        s += (sc[i][j][m] * sc[m][k][l] + sc[j][k][m] * sc[m][i][l]
                              + sc[k][i][m] * sc[m][j][l])
                    if s:
                        rep.jacobi.append((i, j, k, l))
    return rep


def casimir_element(spec: LieAlgebraSpec):
    """Weyl-ordered quantum lift of P minus r times the identity."""
    from .nc_poly import weyl_quantize

    return weyl_quantize(spec, spec.constraint)


# builders -------------------------------------------------------------------

def levi_civita_constants(scale=1):
    s = rational(scale)
    sc = [[[rational(0)] * 3 for _ in range(3)] for _ in range(3)]
    for (i, j, k), sign in {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1,
                            (1, 0, 2): -1, (2, 1, 0): -1, (0, 2, 1): -1}.items():
        sc[i][j][k] = s * sign
    return sc


def su2(radius_squared=1) -> LieAlgebraSpec:
    """su(2) with [x_i, x_j] = i hbar eps_ijk x_k and C = x^2 + y^2 + z^2 - R^2."""
    P = CoeffPoly.classical(3, {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 1})
    return LieAlgebraSpec(3, ("x1", "x2", "x3"), levi_civita_constants(), P,
                          rational(radius_squared), "su2")


def abelian(M: int, casimir: Mapping[Tuple[int, ...], object], r=0) -> LieAlgebraSpec:
    zero = [[[rational(0)] * M for _ in range(M)] for _ in range(M)]
    names = tuple(f"x{i + 1}" for i in range(M))
    return LieAlgebraSpec(M, names, zero, CoeffPoly.classical(M, casimir), rational(r),
                          f"abelian{M}")


def cubic_example() -> LieAlgebraSpec:
    """M=1 abelian algebra with C = (x - 1)(x^2 + 1) = x^3 - x^2 + x - 1."""
    return abelian(1, {(3,): 1, (2,): -1, (1,): 1, (0,): -1}, 0)


def su2_plus_u1(radius_squared=1) -> LieAlgebraSpec:
    """su(2) + u(1) (M=4) with the su(2) Casimir as the constraint."""
    sc = [[[rational(0)] * 4 for _ in range(4)] for _ in range(4)]
    for i, plane in enumerate(levi_civita_constants()):
        for j, row in enumerate(plane):
            for k, v in enumerate(row):
                sc[i][j][k] = v
    P = CoeffPoly.classical(4, {(2, 0, 0, 0): 1, (0, 2, 0, 0): 1, (0, 0, 2, 0): 1})
    return LieAlgebraSpec(4, ("x1", "x2", "x3", "x4"), sc, P, rational(radius_squared),
                          "su2+u1")


def change_basis(spec: LieAlgebraSpec, T: Sequence[Sequence[object]]) -> LieAlgebraSpec:
    """Structure constants in the basis y_a = sum_b T[a][b] x_b.

    The Casimir polynomial is carried along by substituting x = T^{-1} y.
    """
    from .exact_linalg import inverse

    M = spec.dimension
    Tm = [[rational(v) for v in row] for row in T]
    Ti = inverse(Tm)
    new = [[[rational(0)] * M for _ in range(M)] for _ in range(M)]
    for p in range(M):
        for q in range(M):
            for c in range(M):
                if not Tm[p][c]:
                    continue
                for d in range(M):
                    if not Tm[q][d]:
                        continue
                    w = Tm[p][c] * Tm[q][d]
                    for e, a in spec.bracket_terms(c, d):
                        for f in range(M):
                            new[p][q][f] += w * a.re * Ti[e][f]
    xs = [CoeffPoly(M, {(0, tuple(1 if k == a_ else 0 for k in range(M))): Ti[b][a_]
                        for a_ in range(M)}) for b in range(M)]
    casimir = CoeffPoly(M)
    for (_, e), c in spec.casimir.terms.items():
        term = CoeffPoly.constant(M, c)
        for b, p in enumerate(e):
            term = term * xs[b] ** p
        casimir = casimir + term
    return LieAlgebraSpec(M, spec.generators, new, casimir, spec.casimir_level, spec.name + "'")


# configuration files ----------------------------------------------------------

def _parse_exponent_key(key: str, M: int) -> Tuple[int, ...]:
    parts = [p for p in key.replace("(", "").replace(")", "").split(",") if p.strip() != ""]
    try:
        e = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad exponent key {key!r}") from exc
    if len(e) != M or any(v < 0 for v in e):
        raise ConfigError(f"exponent key {key!r} must list {M} non-negative integers")
    return e


def parse_polynomial(data: Mapping[str, object], M: int) -> CoeffPoly:
    """``{"2,0,1": "3/2", ...}`` -> classical CoeffPoly."""
    if not isinstance(data, Mapping):
        raise ConfigError("polynomial must be a JSON object mapping exponent keys to rationals")
    coeffs = {}
    for key, val in data.items():
        try:
            coeffs[_parse_exponent_key(key, M)] = rational(val if not isinstance(val, float) else str(val))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad coefficient {val!r} for {key!r}: {exc}") from exc
    return CoeffPoly.classical(M, coeffs)


def polynomial_to_json(p: CoeffPoly) -> Dict[str, str]:
    if not p.is_classical():
        raise ValueError("only classical polynomials are serialised in the config format")
    return {",".join(map(str, e)): format_rational(c.re) for (_, e), c in sorted(p.terms.items())}


def algebra_from_dict(data: Mapping[str, object]) -> LieAlgebraSpec:
    try:
        M = int(data["dimension"])
        names = [str(n) for n in data["generators"]]
        raw = data["structure_constants"]
        sc = [[[rational(v) for v in row] for row in plane] for plane in raw]
        casimir = parse_polynomial(data["casimir"], M)
        r = rational(data.get("r", 0))
    except KeyError as exc:
        raise ConfigError(f"missing key {exc.args[0]!r}") from exc
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    if M < 1:
        raise ConfigError("dimension must be >= 1")
    if len(sc) != M or any(len(plane) != M or any(len(row) != M for row in plane) for plane in sc):
        raise ConfigError("structure_constants must be an M x M x M nested array")
    return LieAlgebraSpec(M, tuple(names), sc, casimir, r, str(data.get("name", "")))


def algebra_to_dict(spec: LieAlgebraSpec) -> dict:
    return {
        "name": spec.name,
        "dimension": spec.dimension,
        "generators": list(spec.generators),
        "structure_constants": [[[format_rational(v) for v in row] for row in plane]
                                for plane in spec.structure_constants],
        "casimir": polynomial_to_json(spec.casimir),
        "r": format_rational(spec.casimir_level),
    }


def load_algebra(path: Union[str, Path]) -> LieAlgebraSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from exc
    return algebra_from_dict(data)


def save_algebra(spec: LieAlgebraSpec, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(algebra_to_dict(spec), indent=2) + "\n")
