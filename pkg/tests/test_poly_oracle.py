import math
from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from dunkl_a2 import poly_oracle as po
from dunkl_a2.poly_oracle import RationalPoly

x1, x2, x3 = RationalPoly.variables(3)
small_q = st.fractions(min_value=-5, max_value=5, max_denominator=7).map(po.to_rational)


def test_to_rational_forms():
    assert po.to_rational("3/4") == mpq(3, 4)
    assert po.to_rational("0.75") == mpq(3, 4)
    assert po.to_rational(0.5) == mpq(1, 2)
    assert po.to_rational(Fraction(2, 6)) == mpq(1, 3)
    assert po.to_rational(7) == mpq(7)
    with pytest.raises(ValueError, match="malformed rational"):
        po.to_rational("1/")
    with pytest.raises(ValueError):
        po.to_rational(float("nan"))


def test_permutation_sign():
    signs = sorted(po.permutation_sign(p) for p in po.PERMUTATIONS_3)
    assert signs == [-1, -1, -1, 1, 1, 1]


def test_ring_operations():
    p = (x1 + x2) ** 2
    assert p == x1 * x1 + 2 * x1 * x2 + x2 * x2
    assert p - p == RationalPoly(3)
    assert p.degree == 2
    assert p.coefficient((1, 1, 0)) == 2
    assert p.derivative(0) == 2 * x1 + 2 * x2
    assert p.swap(0, 2) == (x3 + x2) ** 2
    assert p.homogeneous_part(1).is_zero()


@given(small_q, small_q, small_q)
def test_divide_by_difference(a, b, c):
    p = (x1 - x2) * (a * x1 * x1 + b * x2 * x3 + c)
    assert p.divide_by_difference(0, 1) == a * x1 * x1 + b * x2 * x3 + c


def test_divide_by_difference_rejects_remainder():
    with pytest.raises(ArithmeticError):
        (x1 * x1 + 1).divide_by_difference(0, 1)


def test_evaluate_and_substitute():
    p = x1 * x2 - x3
    assert p.evaluate((mpq(1, 2), mpq(4), mpq(1))) == 1
    assert p.substitute(2, x1 * x2).is_zero()


def test_dunkl_T_on_low_degree():
    k = mpq(1, 2)
    assert po.poly_dunkl_T(1, k, x1) == 1 + 2 * k
    assert po.poly_dunkl_T(1, k, x2) == -k
    assert po.poly_dunkl_T(2, k, RationalPoly.constant(3, 5)).is_zero()


@given(small_q, st.integers(1, 3), st.integers(1, 3))
def test_dunkl_operators_commute(k, i, j):
    p = x1 ** 3 * x2 + 2 * x2 * x3 ** 2 - x1 * x3
    a = po.poly_dunkl_T(i, k, po.poly_dunkl_T(j, k, p))
    b = po.poly_dunkl_T(j, k, po.poly_dunkl_T(i, k, p))
    assert a == b


@given(small_q)
def test_dunkl_T_is_equivariant(k):
    p = x1 ** 2 * x2 - 3 * x3
    # s12 T_1 = T_2 s12
    assert po.poly_dunkl_T(1, k, p).swap(0, 1) == po.poly_dunkl_T(2, k, p.swap(0, 1))


def test_vandermonde_poly():
    V = po.vandermonde_poly()
    assert V.evaluate((3, 2, 1)) == 2
    assert V.swap(0, 1) == -V


@pytest.mark.parametrize("k,expected", [(0, 12), ("1/2", 105), (1, 360), (2, 1680)])
def test_gamma_k(k, expected):
    assert po.gamma_k(k) == expected


@given(st.fractions(min_value=0, max_value=6, max_denominator=9))
def test_gamma_k_polynomial_form(k):
    k = po.to_rational(k)
    assert po.gamma_k(k) == 6 * (2 * k + 1) * (3 * k + 1) * (3 * k + 2)
    assert po.gamma_closed_form(k) == po.antisymmetrization_constant(k)


@pytest.mark.parametrize("k", ["1/2", "1", "2"])
def test_gamma_report_verdict(k):
    rep = po.gamma_report(k)
    assert rep["verdict"] == "mismatch"
    assert rep["exact_times_closed_form"] == "6"
    assert rep["closed_form_equals_antisymmetrization_constant"] is True


def test_gram_at_k0_is_factorial_pairing():
    G = po.fischer_gram(0, 2)
    basis = po.monomial_basis(2)
    for i, a in enumerate(basis):
        for j in range(len(basis)):
            want = math.prod(math.factorial(e) for e in a) if i == j else 0
            assert G[i][j] == want


def test_gram_degree_one():
    G = po.fischer_gram(1, 1)
    for i in range(3):
        for j in range(3):
            assert G[i][j] == (3 if i == j else -1)


@pytest.mark.parametrize("k", ["1/2", "1", "3/2"])
@pytest.mark.parametrize("m", [2, 3])
def test_gram_is_symmetric_positive(k, m):
    G = po.fischer_gram(k, m)
    n = len(G)
    assert all(G[i][j] == G[j][i] for i in range(n) for j in range(n))
    assert all(p > 0 for p in po.ldl_pivots(G))
    inv = po.exact_inverse(G)
    for i in range(n):
        for j in range(n):
            s = sum(G[i][l] * inv[l][j] for l in range(n))
            assert s == (1 if i == j else 0)


def test_exact_inverse_singular():
    with pytest.raises(ZeroDivisionError):
        po.exact_inverse([[mpq(1), mpq(2)], [mpq(2), mpq(4)]])


@pytest.mark.parametrize("k", ["1/2", "1", "3/4"])
def test_series_recurrence_is_exact(k):
    assert po.kernel_series(k, 5).check_recurrence() == []


def test_k0_components_are_exponential():
    s = po.kernel_series(0, 3)
    y1, y2, y3 = RationalPoly.variables(6)[3:]
    a1, a2, a3 = RationalPoly.variables(6)[:3]
    dot = a1 * y1 + a2 * y2 + a3 * y3
    for m in range(4):
        assert s.component_poly(m) == dot ** m * mpq(1, math.factorial(m))


def test_degree_one_component():
    s = po.kernel_series(1, 2)
    assert s.component_values((0.4, 0.1, -0.5), (1, 0, -1))[1] == pytest.approx(0.225, abs=1e-15)


def test_series_text_roundtrip():
    s = po.kernel_series("3/4", 4)
    t = po.KernelSeries.from_text(s.to_text())
    assert t.k == s.k and t.blocks == s.blocks
    with pytest.raises(ValueError):
        po.KernelSeries.from_text("nonsense\n")


@pytest.mark.parametrize("k,mu,lam,want", [
    (1, (0.4, 0.1, -0.5), (1, 0, -1), 1.3093717226581134),
    (1, (1, 0, -1), (1.5, 0.2, -1.7), 3.6127967725182306),
    ("3/4", (0.4, 0.1, -0.5), (1.5, 0.2, -1.7), 1.789307022128136),
])
def test_frozen_oracle_E(k, mu, lam, want):
    assert po.oracle_E(k, mu, lam, 14).value == pytest.approx(want, rel=1e-14)


def test_frozen_oracle_J():
    assert po.oracle_J(1, (1, 0, -1), (1, 0, -1), 12).value == pytest.approx(1.2764580201865667, rel=1e-14)


def test_oracle_k0_is_exp():
    mu, lam = (0.3, -0.2, 0.5), (1.0, 0.5, -1.5)
    assert po.oracle_E(0, mu, lam, 20).value == pytest.approx(math.exp(np.dot(mu, lam)), rel=1e-14)


def test_oracle_tail_flag():
    v = po.oracle_E(1, (2, 0, -2), (2, 0, -2), 6, tol=1e-8)
    assert v.flagged and v.tail_bound > 1e-8
    w = po.oracle_E(1, (0.1, 0, -0.1), (1, 0, -1), 14, tol=1e-8)
    assert not w.flagged


@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_oracle_symmetric_in_arguments(a, b):
    mu, lam = (a, b, -a - b), (1.0, 0.2, -1.2)
    assert po.oracle_E(1, mu, lam, 10).value == pytest.approx(po.oracle_E(1, lam, mu, 10).value, rel=1e-13)


@pytest.mark.parametrize("k", [0, "1/2", "1"])
def test_opdam_identity(k):
    rep = po.verify_opdam(k, 6)
    assert rep.ok and rep.checked_degrees == [0, 1, 2, 3]


def test_polys_equal_at():
    rng = np.random.default_rng(1)
    pts = [tuple(po.random_rationals(rng, 3)) for _ in range(5)]
    p = (x1 + x2) * (x1 - x2)
    assert po.polys_equal_at(pts, p, lambda a, b, c: a * a - b * b) == 0
