from fractions import Fraction

import numpy as np
import pytest

from liemoment import rep_oracle as ro
from liemoment.algebra_def import su2
from liemoment.moments import evaluate, expectation
from liemoment.nc_poly import NCPoly

SU2 = su2()


@pytest.mark.parametrize("j", [Fraction(n, 2) for n in range(1, 21)])
def test_spin_matrices_satisfy_the_algebra(j):
    hbar = 0.37
    rep = ro.su2_rep(j, hbar)
    assert rep.d == int(2 * j) + 1
    assert rep.commutator_residual(SU2) < 1e-10 * max(1.0, float(j))
    cas = sum(m @ m for m in rep.mats)
    assert np.allclose(cas, hbar ** 2 * float(j * (j + 1)) * np.eye(rep.d), atol=1e-10)
    for m in rep.mats:
        assert np.allclose(m, m.conj().T)


def test_invalid_spin():
    with pytest.raises(ValueError):
        ro.spin_matrices(Fraction(1, 3))
    with pytest.raises(ValueError):
        ro.spin_matrices(-1)


def test_spin_up_variances():
    hbar = 0.8
    rep = ro.su2_rep(Fraction(1, 2), hbar)
    psi = ro.coherent_state(Fraction(1, 2), 0.0, 0.0)
    assert ro.mean(rep, psi, 2) == pytest.approx(hbar / 2)
    assert abs(ro.exact_moment(rep, psi, (0, 0, 2))) < 1e-14
    assert ro.exact_moment(rep, psi, (2, 0, 0)).real == pytest.approx(hbar ** 2 / 4)
    assert ro.exact_moment(rep, psi, (0, 2, 0)).real == pytest.approx(hbar ** 2 / 4)


def test_coherent_state_direction():
    j, hbar, theta, phi = 3, 0.2, 0.9, 0.4
    rep = ro.su2_rep(j, hbar)
    psi = ro.coherent_state(j, theta, phi)
    want = hbar * j * np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    got = np.array([ro.mean(rep, psi, i) for i in range(3)])
    assert np.allclose(got, want, atol=1e-12)


def test_word_expectation_and_weyl_moment():
    rep = ro.su2_rep(1, 0.5)
    rng = np.random.default_rng(1)
    psi = ro.random_state(3, rng)
    X1, X2 = rep.mats[0], rep.mats[1]
    assert ro.word_expectation(rep, psi, (0, 1)) == pytest.approx(np.vdot(psi, X1 @ X2 @ psi))
    m = [ro.mean(rep, psi, i) for i in range(3)]
    D1, D2 = X1 - m[0] * np.eye(3), X2 - m[1] * np.eye(3)
    want = np.vdot(psi, (D1 @ D2 + D2 @ D1) @ psi) / 2
    assert ro.exact_moment(rep, psi, (1, 1, 0)) == pytest.approx(want)
    assert abs(ro.exact_moment(rep, psi, (1, 0, 0))) < 1e-14
    with pytest.raises(ValueError):
        ro.exact_moment(rep, psi, (5, 4, 0))


def test_phase_point_matches_symbolic_expectation():
    rep = ro.su2_rep(Fraction(3, 2), 0.6)
    rng = np.random.default_rng(2)
    p = NCPoly.word(SU2, (2, 0, 1, 0))
    f = expectation(p)
    for _ in range(10):
        psi = ro.random_state(4, rng)
        assert abs(evaluate(f, ro.phase_point(rep, psi, 4)) - ro.nc_expectation(rep, psi, p)) < 1e-12


def test_zero_hamiltonian_freezes_state():
    rep = ro.su2_rep(1, 0.3)
    psi = ro.coherent_state(1, 0.5, 0.1)
    out = ro.schrodinger_evolve(rep, psi, np.zeros((3, 3)), 1.0, 0.1)
    assert np.allclose(out.states, psi[None, :])


def test_rotation_about_x3():
    hbar = 0.25
    rep = ro.su2_rep(2, hbar)
    psi = ro.coherent_state(2, np.pi / 2, 0.0)
    out = ro.schrodinger_evolve(rep, psi, rep.mats[2], 3.0, 0.01)
    r = 2 * hbar
    assert np.allclose(out.means[:, 0], r * np.cos(out.t), atol=1e-12)
    assert np.allclose(out.means[:, 1], r * np.sin(out.t), atol=1e-12)


def test_norm_conserved_over_long_times():
    rep = ro.su2_rep(5, 0.1)
    H = rep.mats[0] @ rep.mats[0] + rep.mats[2]
    out = ro.schrodinger_evolve(rep, ro.coherent_state(5, 1.0, 0.3), H, 100.0, 0.5)
    assert np.abs(np.linalg.norm(out.states, axis=1) - 1).max() < 1e-12


def test_non_hermitian_rejected():
    rep = ro.su2_rep(1, 0.3)
    with pytest.raises(ValueError):
        ro.schrodinger_evolve(rep, ro.coherent_state(1, 0, 0), rep.mats[0] + 1j * rep.mats[1], 1.0, 0.1)
    with pytest.raises(ValueError):
        ro.normalise(np.zeros(3))


def test_abelian_rep():
    rep = ro.abelian_rep([[1.0, 2.0], [3.0, -1.0]])
    assert rep.M == 2 and rep.d == 2
    assert np.allclose(rep.mats[0] @ rep.mats[1], rep.mats[1] @ rep.mats[0])
