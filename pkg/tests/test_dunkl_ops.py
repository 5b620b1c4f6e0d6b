import numpy as np
import pytest
from hypothesis import given, strategies as st

from dunkl_a2 import dunkl_ops as ops
from dunkl_a2 import kernels as K
from dunkl_a2 import poly_oracle as po
from dunkl_a2.poly_oracle import RationalPoly

x1, x2, x3 = RationalPoly.variables(3)
coord = st.floats(-1.0, 1.0)


@pytest.mark.parametrize("poly", [x1 ** 2 * x2, x1 * x2 * x3 + x3 ** 3, (x1 - x2) ** 3 + 2 * x1])
@pytest.mark.parametrize("i", [1, 2, 3])
def test_polynomial_fields_match_exact_operator(poly, i):
    k = po.to_rational("3/4")
    f = ops.polynomial_field(poly)
    want = ops.polynomial_field(po.poly_dunkl_T(i, k, poly))
    for x in [(0.3, -0.2, 0.7), (0.5, 0.5, -1.0), (0.1, 0.1 + 1e-9, 0.4)]:
        assert ops.apply_dunkl_T(i, 0.75, f, x) == pytest.approx(want(x), rel=1e-8, abs=1e-8)


def test_swap_limit_branch_on_diagonal():
    f = ops.polynomial_field(x1 ** 3)
    want = ops.polynomial_field(po.poly_dunkl_T(1, 1, x1 ** 3))
    x = (0.4, 0.4, 0.4)
    assert ops.apply_dunkl_T(1, 1.0, f, x) == pytest.approx(want(x), rel=1e-9)


def test_T_all_matches_single():
    f = ops.polynomial_field(x1 * x2 ** 2 - x3)
    x = (0.2, -0.5, 0.9)
    all3 = ops.apply_dunkl_T_all(0.5, f, x)
    for i in (1, 2, 3):
        assert all3[i - 1] == pytest.approx(ops.apply_dunkl_T(i, 0.5, f, x), rel=1e-14)


def test_plain_callable_field():
    assert ops.apply_dunkl_T(1, 0.0, lambda x: x[0] ** 2, (0.5, 0, 0)) == pytest.approx(1.0, rel=1e-10)


def test_bad_index_and_step():
    with pytest.raises(ValueError):
        ops.apply_dunkl_T(4, 1.0, lambda x: 0.0, (0, 0, 0))
    with pytest.raises(ValueError):
        ops.apply_dunkl_T(1, 1.0, lambda x: 0.0, (0, 0, 0), h=0.0)


def test_nonfinite_field():
    with pytest.raises(ArithmeticError):
        ops.apply_dunkl_T(1, 1.0, lambda x: np.inf, (0.1, 0.2, 0.3))


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("lam", [(1.0, 0.0, -1.0), (1.5, 0.2, -1.7), (3.0, -1.0, -2.0)])
def test_eigenfunction(k, lam):
    for mu in [(0.3, 0.1, -0.4), (0.2, 0.2, -0.1), (0.0, 0.0, 0.0)]:
        assert max(ops.verify_eigen(k, mu, lam)) <= 1e-9


@given(coord, coord, coord)
def test_eigenfunction_random(a, b, c):
    assert max(ops.verify_eigen(1.0, (a, b, c), (1.5, 0.2, -1.7))) <= 1e-9


def test_eigenfunction_small_k():
    assert max(ops.verify_eigen(0.3, (0.3, 0.1, -0.4), (1.5, 0.2, -1.7), n_nodes=96)) <= 1e-9


def test_lemma_coefficients():
    c = ops.LemmaCoefficients.from_lambda((1.0, 0.0, -1.0))
    assert (c.alpha, c.beta) == (2.0, 1.0)


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("mu", [(0.3, 0.1, -0.4), (-0.5, 0.6, 0.1), (0.0, 0.0, 0.0)])
def test_lemma(k, mu):
    assert ops.lemma_residual(k, mu, (1.5, 0.2, -1.7)) <= 1e-8


def test_lemma_fails_with_gamma_in_place_of_constant():
    k, mu, lam = 1.0, (0.3, 0.1, -0.4), (1.5, 0.2, -1.7)
    wrong = float(po.gamma_k(1))
    Vl = K.vandermonde(lam)

    def g(pts):
        pts = np.atleast_2d(pts)
        Vx = (pts[:, 0] - pts[:, 1]) * (pts[:, 0] - pts[:, 2]) * (pts[:, 1] - pts[:, 2])
        return wrong / 6 * Vl * Vx * K.gen_bessel_J_batch(k + 1, pts, lam) + K.gen_bessel_J_batch(k, pts, lam)

    field = ops.ScalarField(lambda x: float(g(x)[0]), g)
    got = ops.apply_lemma_T(k, lam, field, mu)
    assert abs(got - K.dunkl_E(k, mu, lam)) > 1e-2


@pytest.mark.parametrize("k,expected", [(0.5, 105.0), (1.0, 360.0)])
def test_T_V_of_vandermonde(k, expected):
    V = ops.polynomial_field(po.vandermonde_poly())
    assert ops.apply_T_V(k, V, (0.0, 0.0, 0.0)) == pytest.approx(expected, rel=1e-4)


def test_T_V_kills_symmetric_cubic():
    f = ops.polynomial_field(x1 * x2 * x3)
    assert abs(ops.apply_T_V(1.0, f, (0.0, 0.0, 0.0))) <= 1e-5
