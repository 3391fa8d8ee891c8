import random
from fractions import Fraction

import numpy as np
import pytest

from liemoment import multiindex as mi
from liemoment import rep_oracle as ro
from liemoment._numbers import GaussQ
from liemoment.algebra_def import LieAlgebraSpec, abelian, su2
from liemoment.coeffpoly import CoeffPoly
from liemoment.nc_poly import (DX, INFINITE, X, NCPoly, commutator, div_i_hbar, ext_order,
                               is_central, multiply, normal_form, partial_derivative, recompose,
                               set_max_degree, to_delta, to_x, weyl_basis_decompose,
                               weyl_monomial, weyl_symmetrize)
from strategies import random_nc_poly

SU2 = su2()
I = GaussQ(0, 1)


def solvable2():
    """[x1, x2] = i hbar x2."""
    sc = [[[0, 0], [0, 1]], [[0, -1], [0, 0]]]
    return LieAlgebraSpec(2, ("x1", "x2"), sc, CoeffPoly.var(2, 0), 0, "solvable2")


def gen(i, kind=X, spec=SU2):
    return NCPoly.generator(spec, i, kind)


def hbar_term(spec, word, coeff, kind=X, h=1, e=None):
    return NCPoly(spec, kind, {(tuple(word), h, e or (0,) * spec.dimension): coeff})


# worked examples ------------------------------------------------------------------------

def test_multiply_examples():
    p = gen(0) + gen(2) * gen(1)
    assert multiply(NCPoly.one(SU2), p).terms == p.terms
    assert multiply(gen(0), gen(1)).terms == {((0, 1), 0, (0, 0, 0)): GaussQ(1)}
    swapped = normal_form(multiply(gen(1), gen(0)))
    assert swapped == gen(0) * gen(1) - hbar_term(SU2, (2,), I)


def test_kind_mismatch_is_an_error():
    with pytest.raises(TypeError):
        multiply(gen(0), gen(0, DX))


def test_normal_form_examples():
    w = NCPoly.word(SU2, (0, 1, 2))
    assert normal_form(w).terms == w.terms
    d = normal_form(NCPoly.word(SU2, (1, 0), DX))
    expected = (NCPoly.word(SU2, (0, 1), DX) - hbar_term(SU2, (), I, DX, e=(0, 0, 1))
                - hbar_term(SU2, (2,), I, DX))
    assert d.terms == normal_form(expected).terms


def test_weyl_decomposition_fixture():
    dec = weyl_basis_decompose(NCPoly.word(SU2, (1, 0), DX))
    h = CoeffPoly.hbar(3)
    assert dec == {
        (1, 1, 0): CoeffPoly.constant(3, 1),
        (0, 0, 1): h * GaussQ(0, Fraction(-1, 2)),
        (0, 0, 0): h * CoeffPoly.var(3, 2) * GaussQ(0, Fraction(-1, 2)),
    }


def test_commutator_examples():
    p = gen(0) * gen(1) + gen(2)
    assert not commutator(p, p)
    assert commutator(gen(0), gen(1)) == hbar_term(SU2, (2,), I)
    lhs = commutator(gen(0), gen(1) * gen(1))
    assert lhs == (gen(1) * gen(2) + gen(2) * gen(1)).scale(I) * NCPoly.scalar(SU2, CoeffPoly.hbar(3))


def test_weyl_symmetrize_examples():
    assert weyl_symmetrize(SU2, (1, 0, 0)).terms == gen(0).terms
    assert weyl_symmetrize(SU2, (0, 0, 0)).terms == NCPoly.one(SU2).terms
    third = Fraction(1, 3)
    sym = (NCPoly.word(SU2, (0, 0, 1)) + NCPoly.word(SU2, (0, 1, 0)) + NCPoly.word(SU2, (1, 0, 0))).scale(third)
    assert weyl_symmetrize(SU2, (2, 1, 0)).terms == sym.terms


def test_is_central_examples():
    x = [gen(i) for i in range(3)]
    assert is_central(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])
    assert not is_central(x[2])
    ab = abelian(1, {(1,): 1})
    assert is_central(NCPoly.word(ab, (0, 0, 0)))


def test_ext_order_examples():
    one = NCPoly.one(SU2, DX)
    assert ext_order(NCPoly(SU2, DX, {((), 0, (1, 0, 0)): 1})) == 0
    assert ext_order(hbar_term(SU2, (0,), 1, DX)) == 3
    assert ext_order(commutator(gen(0, DX), gen(1, DX))) == 2
    assert ext_order(one - one) == INFINITE


def test_partial_derivative_examples():
    x1sq = NCPoly(SU2, DX, {((), 0, (2, 0, 0)): 1})
    assert partial_derivative(x1sq, 0) == NCPoly(SU2, DX, {((), 0, (1, 0, 0)): 2})
    assert partial_derivative(gen(0, DX), 0) == -NCPoly.one(SU2, DX)
    assert not partial_derivative(gen(0, DX), 1)


@pytest.mark.parametrize("k", [(2, 0, 0), (1, 1, 0), (2, 1, 1), (0, 3, 1), (1, 2, 2)])
def test_partial_derivative_of_weyl_monomial(k):
    for i in range(3):
        got = weyl_basis_decompose(partial_derivative(weyl_monomial(SU2, k), i))
        if k[i] == 0:
            assert not got
        else:
            assert got == {mi.sub(k, mi.unit(3, i)): CoeffPoly.constant(3, -k[i])}


def test_commutator_divisible_by_hbar_check():
    with pytest.raises(ArithmeticError):
        div_i_hbar(gen(0))
    assert div_i_hbar(hbar_term(SU2, (0,), I)) == gen(0)


def test_degree_cap():
    try:
        set_max_degree(4)
        with pytest.raises(OverflowError):
            NCPoly.word(SU2, (0, 1, 2, 0, 1))
    finally:
        set_max_degree(16)


def test_json_round_trip():
    rng = random.Random(5)
    for kind in (X, DX):
        for _ in range(20):
            p = random_nc_poly(rng, SU2, 3, 4, kind)
            assert NCPoly.from_json(SU2, p.to_json()).terms == p.terms


def test_str_uses_letter_names():
    assert str(multiply(gen(1), gen(0))) == "1 * X2 * X1"
    assert "DX3" in str(gen(2, DX))


def test_delta_conversion_round_trip():
    rng = random.Random(9)
    for _ in range(30):
        p = random_nc_poly(rng, SU2, 3, 3, X)
        assert to_x(to_delta(p)) == p


# properties -----------------------------------------------------------------------------

def test_normal_form_idempotent():
    rng = random.Random(1)
    for _ in range(200):
        p = random_nc_poly(rng, SU2, 5, 3)
        n = normal_form(p)
        assert normal_form(n).terms == n.terms
        assert all(list(w) == sorted(w) for (w, _, _) in n.terms)


@pytest.mark.parametrize("spec", [SU2, solvable2()], ids=["su2", "solvable2"])
def test_associativity(spec):
    rng = random.Random(2)
    for kind in (X, DX):
        for _ in range(25):
            a, b, c = (random_nc_poly(rng, spec, 2, 2, kind) for _ in range(3))
            assert normal_form((a * b) * c) == normal_form(a * (b * c))


@pytest.mark.parametrize("spec", [SU2, solvable2()], ids=["su2", "solvable2"])
def test_commutator_lie_axioms(spec):
    rng = random.Random(3)
    for kind in (X, DX):
        for _ in range(20):
            a, b, c = (random_nc_poly(rng, spec, 2, 2, kind) for _ in range(3))
            assert commutator(a, b) == -commutator(b, a)
            assert commutator(a + b.scale(3), c) == commutator(a, c) + commutator(b, c).scale(3)
            jac = (commutator(a, commutator(b, c)) + commutator(b, commutator(c, a))
                   + commutator(c, commutator(a, b)))
            assert not jac


@pytest.mark.parametrize("j", [1, Fraction(3, 2)])
def test_normal_form_preserves_matrix_representation(j):
    rep = ro.su2_rep(j, 0.37)
    rng = random.Random(4)
    for _ in range(40):
        p = random_nc_poly(rng, SU2, 4, 3)
        assert np.allclose(ro.operator(rep, p), ro.operator(rep, normal_form(p)), atol=1e-12)


def test_commutator_matches_matrices():
    rep = ro.su2_rep(1, 0.6)
    rng = random.Random(6)
    for _ in range(30):
        a, b = random_nc_poly(rng, SU2, 3, 2), random_nc_poly(rng, SU2, 3, 2)
        A, B = ro.operator(rep, a), ro.operator(rep, b)
        assert np.allclose(ro.operator(rep, commutator(a, b)), A @ B - B @ A, atol=1e-12)


def test_decompose_recompose_round_trip():
    rng = random.Random(7)
    for _ in range(60):
        p = random_nc_poly(rng, SU2, 4, 3, DX)
        assert recompose(SU2, weyl_basis_decompose(p), DX) == normal_form(p)
    assert weyl_basis_decompose(weyl_monomial(SU2, (1, 2, 1))) == {(1, 2, 1): CoeffPoly.constant(3, 1)}


def _monomials(rng, n):
    out = []
    for _ in range(n):
        p = random_nc_poly(rng, SU2, 3, 1, DX)
        out.append(normal_form(p))
    return out


def test_order_properties():
    rng = random.Random(8)
    for _ in range(60):
        a, b = _monomials(rng, 2)
        if not a or not b:
            continue
        oa, ob = ext_order(a), ext_order(b)
        ab, ba = normal_form(a * b), normal_form(b * a)
        # P1, P2: orders add and the product order is symmetric
        if len(a.terms) == 1 and len(b.terms) == 1:
            assert ext_order(ab) == oa + ob
        assert ext_order(ab) == ext_order(ba)
        # P3
        assert ext_order(normal_form(a + b)) >= min(oa, ob)
        # P4, P5: the commutator raises the order
        c = commutator(a, b)
        assert ext_order(c) >= oa + ob
        assert ext_order(c) >= max(oa, ob) + 1
        # P6
        for i in range(3):
            assert ext_order(partial_derivative(a, i)) >= oa - 1


def test_partial_derivative_product_rule():
    rng = random.Random(10)
    for _ in range(30):
        a, b = random_nc_poly(rng, SU2, 2, 2, DX), random_nc_poly(rng, SU2, 2, 2, DX)
        for i in range(3):
            lhs = partial_derivative(normal_form(a * b), i)
            rhs = partial_derivative(a, i) * b + a * partial_derivative(b, i)
            assert lhs == normal_form(rhs)
