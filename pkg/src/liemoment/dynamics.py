"""Order-N effective equations of motion and their fixed-step integration.

Every variable (expectation values first, then moments by degree) evolves
by ``dv/dt = {v, H_Q}`` truncated at order N.  The symbolic right-hand
sides keep hbar formal; a numeric hbar is substituted when the system is
compiled for the numeric kernels.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import kernels
from . import multiindex as mi_ops
from .moments import (MissingVariableError, MomentPoly, PhasePoint, all_moments, expectation,
                      order, truncate)
from .nc_poly import NCPoly
from .qpoisson import Atom, BracketTable, atom_name, atom_poly, table_for, truncated_bracket


class DivergenceError(ArithmeticError):
    """The state became non-finite; ``last_time`` is the last finite time."""

    def __init__(self, last_time: float, trajectory: "Trajectory"):
        super().__init__(f"integration diverged after t = {last_time:g}")
        self.last_time = last_time
        self.trajectory = trajectory


@dataclass
class EffectiveSystem:
    spec: object
    N: int
    variables: List[Atom]
    rhs: Dict[Atom, MomentPoly]
    H_Q: MomentPoly

    @property
    def names(self) -> List[str]:
        return [atom_name(a) for a in self.variables]

    def compile(self, hbar: float, polys: Optional[Sequence[MomentPoly]] = None,
                tolerance: float = 1e-12):
        """Term arrays ``(coef, owner, exponents)`` at a numeric hbar.

        Imaginary parts must cancel to ``tolerance``; the flow of real
        variables is real.
        """
        polys = [self.rhs[a] for a in self.variables] if polys is None else list(polys)
        index = {a: n for n, a in enumerate(self.variables)}
        coefs, owners, expos = [], [], []
        for slot, p in enumerate(polys):
            acc: Dict[Tuple[int, ...], complex] = {}
            for (h, e, eps, _t), c in p.terms.items():
                row = [0] * len(self.variables)
                for i, pw in enumerate(e):
                    if pw:
                        row[index[("x", i)]] += pw
                for k, pw in eps:
                    try:
                        row[index[("e", k)]] += pw
                    except KeyError:
                        raise MissingVariableError(f"eps{mi_ops.fmt(k)} is not a system variable") from None
                key = tuple(row)
                acc[key] = acc.get(key, 0j) + complex(c) * hbar ** h
            for key, c in acc.items():
                if abs(c.imag) > tolerance * max(1.0, abs(c)):
                    raise ValueError(f"right-hand side of slot {slot} has a complex coefficient")
                if c.real != 0.0:
                    coefs.append(c.real)
                    owners.append(slot)
                    expos.append(key)
        n = len(self.variables)
        return (np.asarray(coefs, dtype=np.float64), np.asarray(owners, dtype=np.int64),
                np.asarray(expos, dtype=np.int64).reshape(len(expos), n))

    def state_vector(self, point: PhasePoint) -> np.ndarray:
        vals = []
        for a in self.variables:
            if a[0] == "x":
                if a[1] >= len(point.x):
                    raise MissingVariableError(f"no value for x{a[1] + 1}")
                v = point.x[a[1]]
            else:
                v = point.moment(a[1])
            v = complex(v)
            if abs(v.imag) > 1e-12:
                raise ValueError(f"initial value of {atom_name(a)} is not real")
            vals.append(v.real)
        return np.asarray(vals, dtype=np.float64)


def _as_moment(H: Union[NCPoly, MomentPoly]) -> MomentPoly:
    return H if isinstance(H, MomentPoly) else expectation(H)


def build_system(spec, H: Union[NCPoly, MomentPoly], N: int,
                 table: Optional[BracketTable] = None, check: bool = False) -> EffectiveSystem:
    """Right-hand sides ``Trunc_N({v, Trunc_N(<H>)})`` for every variable.

    ``check=True`` also brackets the untruncated Hamiltonian and asserts the
    two systems coincide.
    """
    table = table or table_for(spec)
    M = spec.dimension
    full = _as_moment(H)
    H_Q = truncate(full, N)
    variables: List[Atom] = [("x", i) for i in range(M)] + [("e", k) for k in all_moments(M, N)]
    rhs = {a: truncated_bracket(atom_poly(M, a), H_Q, N, spec, table) for a in variables}
    if check:
        for a in variables:
            other = truncated_bracket(atom_poly(M, a), full, N, spec, table)
            if other != rhs[a]:
                raise AssertionError(f"truncation before and after bracketing differ for {atom_name(a)}")
    return EffectiveSystem(spec, N, variables, rhs, H_Q)


@dataclass
class Trajectory:
    t: np.ndarray
    names: List[str]
    data: np.ndarray
    hbar: float
    residuals: Dict[str, np.ndarray] = field(default_factory=dict)
    extra: Dict[str, np.ndarray] = field(default_factory=dict)
    backend: str = kernels.BACKEND

    def __post_init__(self):
        if self.t.ndim != 1 or len(self.t) != len(self.data):
            raise ValueError("time grid and series lengths differ")
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("time grid must be strictly increasing")

    def series(self, name: str) -> np.ndarray:
        return self.data[:, self.names.index(name)]


def integrate(sys: EffectiveSystem, initial: PhasePoint, t_end: float, dt: float,
              hbar: Optional[float] = None, tower=None) -> Trajectory:
    """Classic fixed-step RK4 from ``initial`` up to ``t_end``.

    Parameters
    ----------
    tower : ConstraintTower, optional
        If given, every constraint is evaluated along the flow and stored
        as a residual series.

    Raises
    ------
    DivergenceError
        When a step produces a non-finite state.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    hb = float(initial.hbar if hbar is None else hbar)
    y0 = sys.state_vector(initial)
    coef, owner, expo = sys.compile(hb)
    nsteps = int(round(t_end / dt))
    states, n_valid = kernels.rk4(coef, owner, expo, y0, float(dt), nsteps)
    t = np.arange(nsteps + 1) * dt
    traj = Trajectory(t[:n_valid], sys.names, np.asarray(states[:n_valid]), hb)
    if tower is not None:
        polys = [c.untagged() for c in tower.constraints.values()]
        names = ["C_residual_" + "_".join(map(str, i)) for i in tower.constraints]
        c, o, e = sys.compile(hb, polys)
        vals = kernels.eval_batch(c, o, e, traj.data, len(polys))
        traj.residuals = {n: vals[:, k] for k, n in enumerate(names)}
    if n_valid < nsteps + 1:
        raise DivergenceError(float(t[n_valid - 1]), traj)
    return traj


@dataclass
class ConservationReport:
    H_drift: float
    residual_drift: Dict[str, float]
    residual_max: Dict[str, float]

    def to_json(self) -> dict:
        return {"H_drift": self.H_drift, "residual_drift": self.residual_drift,
                "residual_max": self.residual_max}


def evaluate_along(sys: EffectiveSystem, traj: Trajectory, poly: MomentPoly) -> np.ndarray:
    c, o, e = sys.compile(traj.hbar, [poly])
    return kernels.eval_batch(c, o, e, traj.data, 1)[:, 0]


def conserve_check(sys: EffectiveSystem, traj: Trajectory) -> ConservationReport:
    """Maximum drift of H_Q and of every recorded constraint residual."""
    H = evaluate_along(sys, traj, sys.H_Q)
    drift = {n: float(np.abs(v - v[0]).max()) for n, v in traj.residuals.items()}
    peak = {n: float(np.abs(v).max()) for n, v in traj.residuals.items()}
    return ConservationReport(float(np.abs(H - H[0]).max()) if len(H) else 0.0, drift, peak)


def write_csv(traj: Trajectory, path: Union[str, Path], meta: Optional[dict] = None) -> Path:
    """CSV with columns ``t, <variables>, <extra>, <residuals>`` and a JSON sidecar."""
    path = Path(path)
    cols = ["t"] + list(traj.names) + list(traj.extra) + list(traj.residuals)
    series = [traj.t] + [traj.data[:, k] for k in range(traj.data.shape[1])]
    series += list(traj.extra.values()) + list(traj.residuals.values())
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in range(len(traj.t)):
            w.writerow([repr(float(s[r])) for s in series])
    side = path.with_name(path.name + ".json")
    info = {"hbar": traj.hbar, "rows": len(traj.t), "columns": cols, "backend": traj.backend}
    info.update(meta or {})
    side.write_text(json.dumps(info, indent=2, sort_keys=True))
    return side


def order_bound_holds(sys: EffectiveSystem) -> bool:
    """RHS of an order-k variable has order >= k + Order(H_Q) - 2."""
    oh = order(sys.H_Q)
    for a, f in sys.rhs.items():
        k = 0 if a[0] == "x" else sum(a[1])
        if f and order(f) < k + oh - 2:
            return False
    return True
