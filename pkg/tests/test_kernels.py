import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dunkl_a2 import kernels as K
from dunkl_a2 import poly_oracle as po
from dunkl_a2.bessel import bessel_J

from conftest import LAMBDAS, random_pair

coord = st.floats(-0.6, 0.6)


def test_chamber_invariants():
    inv = K.chamber_invariants((1, 0, -1))
    assert (inv.V, inv.a, inv.b) == (2.0, -1.0, 0.0)
    assert K.vandermonde((3, -1, -2)) == 4 * 5 * 1


@pytest.mark.parametrize("lam,msg", [
    ((1, 1, -2), "lambda3 < lambda2 < lambda1"),
    ((0, 1, -1), "lambda3 < lambda2 < lambda1"),
    ((1, 0, 0), "zero-sum"),
    ((0, 0, 0), "origin"),
    ((1, float("nan"), -1), "finite"),
    ((1, -1), "three components"),
])
def test_chamber_errors(lam, msg):
    with pytest.raises(K.ChamberError, match=msg):
        K.check_chamber(lam)


def test_sum_tolerance_is_relative():
    K.check_chamber((1.0, 0.0, -1.0 + 1e-14))
    with pytest.raises(K.ChamberError):
        K.check_chamber((1.0, 0.0, -1.0 + 1e-9))


@pytest.mark.parametrize("k", [0.0, -0.5, float("inf")])
def test_k_domain(k):
    with pytest.raises(K.DomainError, match="k must be positive"):
        K.dunkl_E(k, (0, 0, 0), (1, 0, -1))


def test_weight_W():
    assert K.weight_W(1, (0.5, -0.5), (1, 0, -1)) == 1.0
    assert K.weight_W(2, (0.5, -0.5), (1, 0, -1)) == pytest.approx(0.5 * 0.5 * 1.5 * 0.5 * 1.5 * 0.5)
    with pytest.raises(K.DomainError):
        K.weight_W(2, (1.5, -0.5), (1, 0, -1))


def test_box_polynomial_derivatives():
    lam = (1.5, 0.2, -1.7)
    n1, n2, h = 0.7, -0.4, 1e-6
    A, B, dA, dB = K.box_polynomial(n1, n2, lam)
    Ap, _, _, _ = K.box_polynomial(n1 + h, n2, lam)
    Am, _, _, _ = K.box_polynomial(n1 - h, n2, lam)
    _, Bp, _, _ = K.box_polynomial(n1, n2 + h, lam)
    _, Bm, _, _ = K.box_polynomial(n1, n2 - h, lam)
    assert dA == pytest.approx((Ap - Am) / (2 * h), rel=1e-8)
    assert dB == pytest.approx((Bp - Bm) / (2 * h), rel=1e-8)
    assert A * B == pytest.approx(K.weight_W(2, (n1, n2), lam), rel=1e-14)


@pytest.mark.parametrize("k", [0.3, 0.5, 1.0, 1.7, 3.0])
@pytest.mark.parametrize("lam", LAMBDAS)
def test_normalization(k, lam):
    assert K.dunkl_E(k, (0, 0, 0), lam) == pytest.approx(1.0, abs=1e-9)
    assert K.gen_bessel_J(k, (0, 0, 0), lam) == pytest.approx(1.0, abs=1e-9)


def test_frozen_values():
    mu, lam = (0.3, 0.1, -0.4), (1, 0, -1)
    assert K.dunkl_E(1, mu, lam) == pytest.approx(1.2246759785197237, rel=1e-13)
    assert K.gen_bessel_J(1, mu, lam) == pytest.approx(1.0329255372769197, rel=1e-13)


@pytest.mark.parametrize("k", ["1/2", "1", "2", "3/4"])
def test_oracle_agreement(k, rng):
    kf = float(po.to_rational(k))
    for _ in range(4):
        mu, lam = random_pair(rng)
        ref = po.oracle_E(k, mu, lam, 14).value
        assert abs(K.dunkl_E(kf, mu, lam) - ref) <= 1e-10 * (1 + abs(ref))
        refJ = po.oracle_J(k, mu, lam, 14).value
        assert abs(K.gen_bessel_J(kf, mu, lam) - refJ) <= 1e-10 * (1 + abs(refJ))


def test_small_k_with_more_nodes():
    mu, lam = (0.3, 0.1, -0.4), (1.5, 0.2, -1.7)
    ref = po.oracle_E("3/10", mu, lam, 14).value
    assert K.dunkl_E(0.3, mu, lam, 96) == pytest.approx(ref, rel=1e-10)


@given(coord, coord, st.sampled_from([0.5, 1.0, 2.0]))
def test_J_is_symmetric(a, b, k):
    lam = (1.5, 0.2, -1.7)
    mu = (a, b, 0.1)
    base = K.gen_bessel_J(k, mu, lam)
    for perm in po.PERMUTATIONS_3:
        assert K.gen_bessel_J(k, po.permute_point(perm, mu), lam) == pytest.approx(base, rel=1e-12)


@given(coord, coord, st.floats(-2, 2))
def test_translation_along_ones(a, b, t):
    # <mu + t(1,1,1), lam> = <mu, lam> when lam sums to zero
    lam = (1.0, 0.0, -1.0)
    mu = (a, b, 0.2)
    shifted = tuple(v + t for v in mu)
    assert K.dunkl_E(1.0, shifted, lam) == pytest.approx(K.dunkl_E(1.0, mu, lam), rel=1e-12)


@given(coord, coord, st.floats(0.3, 3.0))
def test_homogeneity(a, b, c):
    lam = (1.5, 0.2, -1.7)
    mu = (a, b, -a - b)
    lhs = K.dunkl_E(0.5, tuple(c * v for v in mu), lam)
    rhs = K.dunkl_E(0.5, mu, tuple(c * v for v in lam))
    assert lhs == pytest.approx(rhs, rel=1e-10)


@given(coord, coord)
def test_positive(a, b):
    assert K.dunkl_E(1.0, (a, b, 0.0), (1.0, 0.0, -1.0)) > 0


def test_k_half_reduces_to_plane_wave_average_bound():
    # 0 < J_k <= max over the orbit of exp(<sigma mu, lam>)
    mu, lam = (0.5, -0.1, -0.4), (1.0, 0.0, -1.0)
    top = max(math.exp(np.dot(po.permute_point(p, mu), lam)) for p in po.PERMUTATIONS_3)
    assert 0 < K.gen_bessel_J(0.5, mu, lam) <= top


def test_one_dimensional_reduction():
    # E along mu = t(1, 0, -1) is entire and matches the oracle far out too
    mu, lam = (0.8, 0.0, -0.8), (1.0, 0.0, -1.0)
    assert K.dunkl_E(2.0, mu, lam) == pytest.approx(po.oracle_E(2, mu, lam, 20).value, rel=1e-12)


def test_batch_matches_scalar(rng):
    lam = (1.5, 0.2, -1.7)
    mus = rng.uniform(-1, 1, size=(7, 3))
    batch = K.dunkl_E_batch(1.0, mus, lam)
    assert np.allclose(batch, [K.dunkl_E(1.0, m, lam) for m in mus], rtol=1e-14, atol=0)


def test_large_argument_does_not_overflow():
    v = K.dunkl_E(1.0, (40.0, 0.0, -40.0), (3.0, -1.0, -2.0), 96)
    assert math.isfinite(v) and v > 0


def test_bad_point():
    with pytest.raises(K.DomainError):
        K.dunkl_E(1.0, (0, float("inf"), 0), (1, 0, -1))
    with pytest.raises(K.DomainError):
        K.dunkl_E(1.0, (0, 0), (1, 0, -1))


def test_k1_single_variable_integral():
    # at k = 1 the J-integral is elementary for mu = 0 scaled by cJ_{1/2}(0) = 1
    lam = (1.0, 0.0, -1.0)
    assert bessel_J(0.5, 0.0) == 1.0
    assert K.gen_bessel_J(1.0, (0, 0, 0), lam, 8) == pytest.approx(1.0, abs=1e-14)
