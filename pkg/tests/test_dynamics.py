import json
import math
from fractions import Fraction

import numpy as np
import pytest

from liemoment import dynamics as dyn
from liemoment import rep_oracle as ro
from liemoment._numbers import GaussQ
from liemoment.algebra_def import LieAlgebraSpec, su2
from liemoment.casimir_constraints import generate_tower
from liemoment.coeffpoly import CoeffPoly
from liemoment.moments import MissingVariableError, MomentPoly, PhasePoint, all_moments
from liemoment.nc_poly import NCPoly, weyl_monomial, weyl_symmetrize

SU2 = su2()


def x(i):
    return MomentPoly.x(3, i)


def e(*k):
    return MomentPoly.eps(tuple(k))


def gen(i):
    return NCPoly.generator(SU2, i)


def point(xs, N, hbar=0.1, eps=None):
    moments = {k: 0.0 for k in all_moments(3, N)}
    moments.update(eps or {})
    return PhasePoint(tuple(xs), moments, hbar)


def test_rotation_rhs():
    system = dyn.build_system(SU2, gen(2), 3)
    assert system.rhs[("x", 0)] == -x(1)
    assert system.rhs[("x", 1)] == x(0)
    assert not system.rhs[("x", 2)]
    assert system.rhs[("e", (2, 0, 0))] == e(1, 1, 0) * -2
    assert system.rhs[("e", (1, 1, 0))] == e(2, 0, 0) - e(0, 2, 0)


def test_rotation_matches_closed_form():
    system = dyn.build_system(SU2, gen(2), 2)
    traj = dyn.integrate(system, point((1.0, 0.0, 0.5), 2), 2 * math.pi, 1e-3)
    t = traj.t
    assert np.allclose(traj.series("x1"), np.cos(t), atol=1e-10)
    assert np.allclose(traj.series("x2"), np.sin(t), atol=1e-10)
    assert np.allclose(traj.series("x3"), 0.5, atol=1e-14)


def test_constant_hamiltonian_freezes_everything():
    system = dyn.build_system(SU2, NCPoly.one(SU2), 3)
    assert not any(system.rhs.values())
    p = point((0.3, -0.2, 0.9), 3, eps={(2, 0, 0): 0.01, (1, 1, 1): 0.002})
    traj = dyn.integrate(system, p, 1.0, 0.01)
    assert np.all(traj.data == traj.data[0])


def test_x3_squared_fixture():
    system = dyn.build_system(SU2, gen(2) * gen(2), 2, check=True)
    assert system.H_Q == x(2) * x(2) + e(0, 0, 2)
    assert system.rhs[("x", 0)] == x(1) * x(2) * -2 - e(0, 1, 1) * 2
    assert system.rhs[("x", 1)] == x(0) * x(2) * 2 + e(1, 0, 1) * 2
    assert system.rhs[("e", (2, 0, 0))] == x(2) * e(1, 1, 0) * -4 - x(1) * e(1, 0, 1) * 4
    assert not system.rhs[("e", (0, 0, 2))]


def test_check_mode_agrees_on_higher_orders():
    for H in (weyl_monomial(SU2, (2, 1, 0)), weyl_symmetrize(SU2, (1, 0, 1)) + gen(1)):
        for N in (2, 3, 4):
            system = dyn.build_system(SU2, H, N, check=True)
            assert dyn.order_bound_holds(system)


def test_variable_ordering():
    system = dyn.build_system(SU2, gen(2), 3)
    assert system.names[:3] == ["x1", "x2", "x3"]
    assert len(system.names) == 3 + 6 + 10


def test_time_reversal():
    H = weyl_symmetrize(SU2, (1, 0, 1)) + gen(1)
    system = dyn.build_system(SU2, H, 3)
    p = point((0.6, 0.0, 0.8), 3, eps={(2, 0, 0): 0.02, (0, 2, 0): 0.02, (1, 1, 0): 0.005})
    fwd = dyn.integrate(system, p, 1.0, 1e-3)
    end = fwd.data[-1]
    back_sys = dyn.build_system(SU2, -H, 3)
    moments = {a[1]: end[n] for n, a in enumerate(system.variables) if a[0] == "e"}
    q = PhasePoint(tuple(end[:3]), moments, p.hbar)
    back = dyn.integrate(back_sys, q, 1.0, 1e-3)
    assert np.abs(back.data[-1] - fwd.data[0]).max() < 1e-10


def test_matches_oracle_for_linear_hamiltonian():
    rep = ro.su2_rep(2, 0.3)
    psi = ro.coherent_state(2, 0.7, 0.2)
    H = gen(0) + gen(2).scale(Fraction(1, 2))
    system = dyn.build_system(SU2, H, 2)
    traj = dyn.integrate(system, ro.phase_point(rep, psi, 2), 2.0, 1e-3)
    exact = ro.schrodinger_evolve(rep, psi, ro.operator(rep, H), 2.0, 1e-3)
    assert np.abs(traj.data[:, :3] - exact.means).max() < 1e-10


def test_divergence_error():
    # on [x1, x2] = i hbar x2 the symmetric product x1 x2 gives dx2/dt = -x2^2 - eps_02
    spec = LieAlgebraSpec(2, ("x1", "x2"), [[[0, 0], [0, 1]], [[0, -1], [0, 0]]],
                          CoeffPoly.var(2, 0), 0, "solvable2")
    system = dyn.build_system(spec, weyl_symmetrize(spec, (1, 1)), 2)
    p = PhasePoint((0.0, -1.0), {(2, 0): 0.0, (1, 1): 0.0, (0, 2): 0.0}, 0.1)
    with pytest.raises(dyn.DivergenceError) as info:
        dyn.integrate(system, p, 5.0, 0.01)
    exc = info.value
    assert 0.9 < exc.last_time < 1.1
    assert np.all(np.isfinite(exc.trajectory.data))
    assert exc.trajectory.t[-1] == pytest.approx(exc.last_time)


def test_invalid_step_arguments():
    system = dyn.build_system(SU2, gen(2), 2)
    p = point((1.0, 0.0, 0.0), 2)
    with pytest.raises(ValueError):
        dyn.integrate(system, p, 1.0, 0.0)
    with pytest.raises(ValueError):
        dyn.integrate(system, p, -1.0, 0.1)


def test_missing_initial_moment():
    system = dyn.build_system(SU2, gen(2), 3)
    with pytest.raises(MissingVariableError):
        dyn.integrate(system, point((1.0, 0.0, 0.0), 2), 1.0, 0.1)


def test_conservation_and_residuals():
    N = 3
    rep = ro.su2_rep(3, 0.1)
    psi = ro.coherent_state(3, 1.1, 0.4)
    H = gen(2) * gen(2) + gen(0)
    system = dyn.build_system(SU2, H, N)
    tower = generate_tower(su2(Fraction(1, 100) * 3 * 4), N)
    traj = dyn.integrate(system, ro.phase_point(rep, psi, N), 3.0, 1e-3, tower=tower)
    report = dyn.conserve_check(system, traj)
    assert report.H_drift <= 1e-10
    assert len(traj.residuals) == len(tower)
    assert set(report.residual_drift) == set(traj.residuals)


def test_csv_and_sidecar(tmp_path):
    system = dyn.build_system(SU2, gen(2), 2)
    traj = dyn.integrate(system, point((1.0, 0.0, 0.0), 2), 0.1, 0.01)
    side = dyn.write_csv(traj, tmp_path / "run.csv", {"order": 2})
    rows = (tmp_path / "run.csv").read_text().splitlines()
    assert rows[0].split(",")[:4] == ["t", "x1", "x2", "x3"]
    assert len(rows) == 1 + 11
    info = json.loads(side.read_text())
    assert info["order"] == 2 and info["rows"] == 11 and info["hbar"] == pytest.approx(0.1)


def test_trajectory_validation():
    with pytest.raises(ValueError):
        dyn.Trajectory(np.array([0.0, 0.0]), ["x1"], np.zeros((2, 1)), 0.1)
    with pytest.raises(ValueError):
        dyn.Trajectory(np.array([0.0, 1.0]), ["x1"], np.zeros((3, 1)), 0.1)


def test_complex_rhs_rejected():
    system = dyn.build_system(SU2, gen(2), 2)
    bad = MomentPoly.constant(3, 1) * GaussQ(0, 1)
    with pytest.raises(ValueError):
        system.compile(0.1, [bad])
