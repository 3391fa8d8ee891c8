"""Finite-dimensional matrix representations used as an independent oracle.

Everything here is floating point and deliberately avoids the symbolic
machinery: moments are Weyl averages of explicit matrix products and time
evolution is exact diagonalisation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from . import multiindex as mi_ops
from .moments import PhasePoint

MAX_MOMENT_DEGREE = 8


@dataclass
class MatrixRep:
    """One ``d x d`` matrix per generator, realising ``[X_i, X_j] = i hbar alpha_ij^k X_k``."""

    mats: List[np.ndarray]
    hbar: float
    label: str

    @property
    def d(self) -> int:
        return self.mats[0].shape[0]

    @property
    def M(self) -> int:
        return len(self.mats)

    def commutator_residual(self, spec) -> float:
        worst = 0.0
        for i in range(self.M):
            for j in range(self.M):
                lhs = self.mats[i] @ self.mats[j] - self.mats[j] @ self.mats[i]
                rhs = np.zeros_like(lhs)
                for k, a in spec.bracket_terms(i, j):
                    rhs = rhs + 1j * self.hbar * float(a.re) * self.mats[k]
                worst = max(worst, float(np.abs(lhs - rhs).max()))
        return worst


def spin_matrices(j) -> List[np.ndarray]:
    """Standard (Sx, Sy, Sz) for spin ``j`` in the basis m = j, j-1, ..., -j."""
    two_j = Fraction(j) * 2
    if two_j.denominator != 1 or two_j < 0:
        raise ValueError(f"2j must be a non-negative integer, got j={j}")
    jf = float(j)
    d = int(two_j) + 1
    m = jf - np.arange(d)
    sp = np.zeros((d, d), dtype=complex)
    for a in range(1, d):
        # S+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>
        sp[a - 1, a] = np.sqrt(jf * (jf + 1) - m[a] * (m[a] + 1))
    sm = sp.conj().T
    return [(sp + sm) / 2, (sp - sm) / 2j, np.diag(m).astype(complex)]


def su2_rep(j, hbar: float) -> MatrixRep:
    """Spin-j matrices times hbar; the Casimir is hbar^2 j(j+1)."""
    mats = [hbar * s for s in spin_matrices(j)]
    return MatrixRep(mats, float(hbar), f"su2-spin-{Fraction(j)}")


def abelian_rep(diagonals: Sequence[Sequence[float]], hbar: float = 1.0) -> MatrixRep:
    """Commuting diagonal matrices, one row of eigenvalues per generator."""
    mats = [np.diag(np.asarray(row, dtype=complex)) for row in diagonals]
    return MatrixRep(mats, float(hbar), "abelian-diagonal")


# states -----------------------------------------------------------------------------

def normalise(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    n = np.linalg.norm(psi)
    if n == 0:
        raise ValueError("zero vector is not a state")
    return psi / n


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    return normalise(rng.normal(size=d) + 1j * rng.normal(size=d))


def _exp_hermitian(H: np.ndarray, t: complex) -> np.ndarray:
    w, V = np.linalg.eigh(H)
    return (V * np.exp(t * w)) @ V.conj().T


def coherent_state(j, theta: float, phi: float) -> np.ndarray:
    """Spin coherent state ``exp(-i phi Sz) exp(-i theta Sy) |j, j>``."""
    S = spin_matrices(j)
    top = np.zeros(S[0].shape[0], dtype=complex)
    top[0] = 1.0
    psi = _exp_hermitian(S[2], -1j * phi) @ (_exp_hermitian(S[1], -1j * theta) @ top)
    return normalise(psi)


# expectation values -----------------------------------------------------------------

def mean(rep: MatrixRep, psi, i: int) -> float:
    return float(np.vdot(psi, rep.mats[i] @ psi).real)


def word_expectation(rep: MatrixRep, psi, word: Sequence[int]) -> complex:
    v = np.asarray(psi, dtype=complex)
    for a in reversed(word):
        v = rep.mats[a] @ v
    return complex(np.vdot(psi, v))


def exact_moment(rep: MatrixRep, psi, k) -> complex:
    """Weyl-symmetrised centred moment ``<(DX_1^k1 ... DX_M^kM)_Weyl>``.

    Averages the distinct orderings of the multiset by depth-first search,
    sharing the partial products of common suffixes.
    """
    k = tuple(k)
    n = sum(k)
    if n > MAX_MOMENT_DEGREE:
        raise ValueError(f"moment degree {n} exceeds the oracle cap {MAX_MOMENT_DEGREE}")
    if n == 0:
        return 1.0 + 0j
    eye = np.eye(rep.d)
    A = [rep.mats[a] - mean(rep, psi, a) * eye for a in range(rep.M)]
    counts = list(k)
    total = 0j
    n_words = 0

    def dfs(v):
        nonlocal total, n_words
        if not any(counts):
            total += np.vdot(psi, v)
            n_words += 1
            return
        for a in range(len(counts)):
            if counts[a]:
                counts[a] -= 1
                dfs(A[a] @ v)
                counts[a] += 1

    dfs(np.asarray(psi, dtype=complex))
    return complex(total / n_words)


def phase_point(rep: MatrixRep, psi, N: int) -> PhasePoint:
    """Expectation values and every moment up to degree ``N``."""
    x = tuple(mean(rep, psi, i) for i in range(rep.M))
    eps = {}
    for k in mi_ops.up_to_degree(rep.M, N, start=2):
        v = exact_moment(rep, psi, k)
        eps[k] = v.real if abs(v.imag) < 1e-12 else v
    return PhasePoint(x, eps, rep.hbar)


def operator(rep: MatrixRep, p, xvals: Optional[Sequence[float]] = None) -> np.ndarray:
    """Matrix of an NCPoly in plain generators (classical symbols set to ``xvals``)."""
    from .nc_poly import X, to_x

    q = p if p.kind == X else to_x(p)
    xs = list(xvals) if xvals is not None else [0.0] * rep.M
    out = np.zeros((rep.d, rep.d), dtype=complex)
    for (w, h, e), c in q.terms.items():
        coef = complex(c) * rep.hbar ** h
        for v, pw in zip(xs, e):
            coef *= v ** pw
        m = np.eye(rep.d, dtype=complex)
        for a in w:
            m = m @ rep.mats[a]
        out += coef * m
    return out


def nc_expectation(rep: MatrixRep, psi, p) -> complex:
    """``<psi| p |psi>`` with classical symbols set to the state's means."""
    xs = [mean(rep, psi, i) for i in range(rep.M)]
    return complex(np.vdot(psi, operator(rep, p, xs) @ psi))


# time evolution ------------------------------------------------------------------------

@dataclass
class OracleTrajectory:
    t: np.ndarray
    states: np.ndarray
    means: np.ndarray


def schrodinger_evolve(rep: MatrixRep, psi0, H: np.ndarray, t_end: float, dt: float,
                       tolerance: float = 1e-12) -> OracleTrajectory:
    """Exact propagation ``psi(t) = exp(-i H t / hbar) psi0`` on a uniform grid."""
    H = np.asarray(H, dtype=complex)
    if np.abs(H - H.conj().T).max() > tolerance * max(1.0, np.abs(H).max()):
        raise ValueError("Hamiltonian is not Hermitian")
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = int(round(t_end / dt))
    t = np.arange(n + 1) * dt
    w, V = np.linalg.eigh(H)
    c0 = V.conj().T @ normalise(psi0)
    phases = np.exp(-1j * np.outer(t, w) / rep.hbar)
    states = (phases * c0[None, :]) @ V.T
    means = np.stack([np.einsum("ti,ij,tj->t", states.conj(), m, states).real
                      for m in rep.mats], axis=1)
    return OracleTrajectory(t, states, means)
