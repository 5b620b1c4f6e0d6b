"""Integral formulas for the A2 Dunkl kernel, Bessel function and intertwining density.

Conventions
-----------
* ``lam`` is a spectral parameter in the open Weyl chamber of the zero-sum
  plane: ``lam1 > lam2 > lam3`` and ``lam1 + lam2 + lam3 = 0``.
* ``mu`` is any point of R^3.
* The double integrals run over the box ``nu1 in [lam2, lam1]``,
  ``nu2 in [lam3, lam2]``.  Four of the six factors of ``W_k`` vanish on the
  box edges and go into Gauss-Jacobi weights with exponents ``(k-1, k-1)`` on
  each axis; the two factors ``(lam1 - nu2)`` and ``(nu1 - lam3)`` stay
  bounded away from zero and are folded into the tensor weights.
* Prefactors are assembled in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import quadrature
from .bessel import bessel_J, bessel_J_deriv

DEFAULT_NODES = 64
SUM_RTOL = 1e-12
WALL_RTOL = 1e-9


class ChamberError(ValueError):
    """``lam`` is not a point of the open chamber in the zero-sum plane."""


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class ChamberInvariants:
    V: float
    a: float
    b: float


def check_k(k) -> float:
    k = float(k)
    if not (math.isfinite(k) and k > 0):
        raise DomainError("k must be positive")
    return k


def check_point(mu: Sequence[float]) -> tuple[float, float, float]:
    if len(mu) != 3:
        raise DomainError("mu must have three components")
    mu = tuple(float(v) for v in mu)
    if not all(math.isfinite(v) for v in mu):
        raise DomainError("mu must be finite")
    return mu


def check_chamber(lam: Sequence[float], eps_wall: float | None = None) -> tuple[float, float, float]:
    """Validate ``lam`` and return it as a float triple.

    Raises :class:`ChamberError` naming the violated constraint.
    """
    if len(lam) != 3:
        raise ChamberError("lambda must have three components")
    l1, l2, l3 = (float(v) for v in lam)
    if not all(math.isfinite(v) for v in (l1, l2, l3)):
        raise ChamberError("lambda must be finite")
    scale = max(abs(l1), abs(l2), abs(l3))
    if scale == 0.0:
        raise ChamberError("lambda must satisfy lambda3 < lambda2 < lambda1 (got the origin)")
    if abs(l1 + l2 + l3) > SUM_RTOL * scale:
        raise ChamberError(f"lambda must lie in the zero-sum plane (sum = {l1 + l2 + l3:.3g})")
    if eps_wall is None:
        eps_wall = WALL_RTOL * math.sqrt(l1 * l1 + l2 * l2 + l3 * l3)
    if not (l1 - l2 > eps_wall and l2 - l3 > eps_wall):
        raise ChamberError("lambda must satisfy lambda3 < lambda2 < lambda1 "
                           f"with gaps above {eps_wall:.3g}")
    return l1, l2, l3


def vandermonde(lam: Sequence[float]) -> float:
    l1, l2, l3 = check_chamber(lam)
    return (l1 - l2) * (l1 - l3) * (l2 - l3)


def vandermonde_point(x: Sequence[float]) -> float:
    """``V(x)`` for an arbitrary point (no chamber check)."""
    return (x[0] - x[1]) * (x[0] - x[2]) * (x[1] - x[2])


def chamber_invariants(lam: Sequence[float]) -> ChamberInvariants:
    l1, l2, l3 = check_chamber(lam)
    return ChamberInvariants(
        V=(l1 - l2) * (l1 - l3) * (l2 - l3),
        a=l1 * l2 + l1 * l3 + l2 * l3,
        b=-l1 * l2 * l3,
    )


def lemma_coefficients(lam: Sequence[float]) -> tuple[float, float]:
    """``alpha = (2 l1 + l2)/D`` and ``beta = (2 l2 + l1)/D``, ``D = l1^2 + l2^2 + l1 l2``."""
    l1, l2, _ = (float(v) for v in lam)
    D = l1 * l1 + l2 * l2 + l1 * l2
    if D <= 0:
        raise ChamberError("lambda1^2 + lambda2^2 + lambda1 lambda2 must be positive")
    return (2 * l1 + l2) / D, (2 * l2 + l1) / D


def weight_W(k, nu: Sequence[float], lam: Sequence[float]) -> float:
    """``W_k(nu, lam)`` on the open box ``lam2 < nu1 < lam1``, ``lam3 < nu2 < lam2``."""
    k = check_k(k)
    l1, l2, l3 = check_chamber(lam)
    n1, n2 = (float(v) for v in nu)
    if not (l2 < n1 < l1 and l3 < n2 < l2):
        raise DomainError("nu must lie in the open box (lam2, lam1) x (lam3, lam2)")
    prod = (l1 - n1) * (l1 - n2) * (l2 - n2) * (n1 - l2) * (n1 - l3) * (n2 - l3)
    return 1.0 if k == 1.0 else prod ** (k - 1.0)


def box_polynomial(nu1, nu2, lam):
    """``P(nu) = prod of the six factors``, so that ``W_k = P^{k-1}``.

    Returned together with ``dP/dnu1`` and ``dP/dnu2``.  ``P`` factors as
    ``A(nu1) B(nu2)``.
    """
    l1, l2, l3 = lam
    A = (l1 - nu1) * (nu1 - l2) * (nu1 - l3)
    B = (l1 - nu2) * (l2 - nu2) * (nu2 - l3)
    dA = -(nu1 - l2) * (nu1 - l3) + (l1 - nu1) * (nu1 - l3) + (l1 - nu1) * (nu1 - l2)
    dB = -(l2 - nu2) * (nu2 - l3) - (l1 - nu2) * (nu2 - l3) + (l1 - nu2) * (l2 - nu2)
    return A, B, dA, dB


@lru_cache(maxsize=256)
def _box_rule(kw: float, lam: tuple[float, float, float], n: int):
    """Flattened tensor rule for ``int int f(nu) W_kw(nu, lam) dnu1 dnu2``."""
    l1, l2, l3 = lam
    r1 = quadrature.gauss_jacobi(n, kw - 1.0, kw - 1.0, l2, l1)
    r2 = quadrature.gauss_jacobi(n, kw - 1.0, kw - 1.0, l3, l2)
    N1, N2 = np.meshgrid(r1.nodes, r2.nodes, indexing="ij")
    W = np.outer(r1.weights, r2.weights)
    if kw != 1.0:
        W = W * ((l1 - N2) * (N1 - l3)) ** (kw - 1.0)
    out = (N1.ravel(), N2.ravel(), W.ravel())
    for arr in out:
        arr.setflags(write=False)
    return out


def box_rule(kw: float, lam: Sequence[float], n: int = DEFAULT_NODES):
    """Nodes ``(nu1, nu2)`` and weights with ``W_kw`` already folded in."""
    return _box_rule(float(kw), tuple(float(v) for v in lam), int(n))


def log_prefactor(k: float, V: float, v_power: float) -> float:
    """``log(Gamma(3k) / (V^{v_power} Gamma(k)^3))``."""
    return math.lgamma(3 * k) - 3 * math.lgamma(k) - v_power * math.log(V)


def _exp_weighted_sum(log_scale: float, exponent: np.ndarray, values: np.ndarray,
                      weights: np.ndarray) -> np.ndarray:
    """``exp(log_scale) * sum_j weights_j exp(exponent_ij) values_ij`` along the last axis, overflow-safe."""
    shift = np.max(exponent, axis=-1, keepdims=True)
    s = np.sum(weights * np.exp(exponent - shift) * values, axis=-1)
    return s * np.exp(log_scale + shift[..., 0])


def _mu_arrays(mus):
    mus = np.atleast_2d(np.asarray(mus, dtype=float))
    if mus.shape[-1] != 3:
        raise DomainError("mu must have three components")
    if not np.all(np.isfinite(mus)):
        raise DomainError("mu must be finite")
    s = mus[:, 0] + mus[:, 1] - 2.0 * mus[:, 2]
    d = mus[:, 0] - mus[:, 1]
    return mus, s[:, None], d[:, None]


def _check_nodes(n_nodes, minimum=1):
    n = int(n_nodes)
    if n < minimum:
        raise DomainError(f"n_nodes must be at least {minimum}")
    return n


def gen_bessel_J_batch(k, mus, lam, n_nodes: int = DEFAULT_NODES) -> np.ndarray:
    k = check_k(k)
    lam = check_chamber(lam)
    n = _check_nodes(n_nodes)
    _, s, d = _mu_arrays(mus)
    N1, N2, W = box_rule(k, lam, n)
    V = vandermonde(lam)
    expo = s * (N1 + N2) / 2.0
    vals = bessel_J(k - 0.5, d * (N1 - N2) / 2.0) * (N1 - N2)
    return _exp_weighted_sum(log_prefactor(k, V, 2 * k - 1), expo, vals, W)


def gen_bessel_J(k, mu, lam, n_nodes: int = DEFAULT_NODES) -> float:
    """Generalized Bessel function ``J_k(mu, lam)`` of type A2.

    Double integral of ``exp(s(nu1+nu2)/2) cJ_{k-1/2}(d(nu1-nu2)/2) (nu1-nu2) W_k``
    with ``s = mu1 + mu2 - 2 mu3``, ``d = mu1 - mu2`` and prefactor
    ``Gamma(3k) / (V(lam)^{2k-1} Gamma(k)^3)``.
    """
    check_point(mu)
    return float(gen_bessel_J_batch(k, [mu], lam, n_nodes)[0])


def dunkl_E_batch(k, mus, lam, n_nodes: int = DEFAULT_NODES) -> np.ndarray:
    k = check_k(k)
    l1, l2, l3 = lam = check_chamber(lam)
    n = _check_nodes(n_nodes)
    _, s, d = _mu_arrays(mus)
    N1, N2, W = box_rule(k, lam, n)
    V = vandermonde(lam)
    z = d * (N1 - N2) / 2.0
    outer = (l3 - N1) * (l3 - N2)
    vals = (3.0 * (l1 - l2) * (N1 - N2) * bessel_J(k - 0.5, z)
            - 6.0 * (N1 * N2 + 0.5 * l3 * (N1 + N2) + l1 * l2) * bessel_J_deriv(k - 0.5, z, 1)) * outer
    expo = s * (N1 + N2) / 2.0
    return _exp_weighted_sum(log_prefactor(k, V, 2 * k), expo, vals, W)


def dunkl_E(k, mu, lam, n_nodes: int = DEFAULT_NODES) -> float:
    """Dunkl kernel ``E_k(mu, lam)`` from the explicit A2 double-integral formula.

    Integrand ``{3(l1-l2)(nu1-nu2) cJ(z) - 6(nu1 nu2 + l3(nu1+nu2)/2 + l1 l2) cJ'(z)}
    (l3-nu1)(l3-nu2) exp(s(nu1+nu2)/2) W_k`` with ``z = d(nu1-nu2)/2`` and
    prefactor ``Gamma(3k) / (V(lam)^{2k} Gamma(k)^3)``.
    """
    check_point(mu)
    return float(dunkl_E_batch(k, [mu], lam, n_nodes)[0])


# --------------------------------------------------------------------------
# intertwining density

# Coefficient of z^2 (lam1 - lam2) in the density's polynomial factor.  The
# value 3 that appears in print gives total mass 1/2; 6 is what the change of
# variables from the double-integral formula produces.
DENSITY_Z2_COEFF = 6.0
# the density has at most algebraic endpoint behaviour in (x, y); a shorter
# tanh-sinh reach converges much faster per node
OUTER_REACH = 1e-20


def log_density_prefactor(k: float, V: float) -> float:
    """``log(Gamma(2k) Gamma(3k) / (2^{2k-2} Gamma(k)^5 V^{2k}))``."""
    return (math.lgamma(2 * k) + math.lgamma(3 * k) - (2 * k - 2) * math.log(2.0)
            - 5 * math.lgamma(k) - 2 * k * math.log(V))


def density_limits(x: float, y: float, lam) -> tuple[float, float]:
    """Lower and upper limits ``(max(|y|, |x-l2|), min(x-l3, l1-x))`` of the z-integral."""
    l1, l2, l3 = lam
    return max(abs(y), abs(x - l2)), min(x - l3, l1 - x)


def density_polynomial(x: float, y: float, lam, z2_coeff: float = DENSITY_Z2_COEFF) -> np.ndarray:
    """Coefficients in increasing powers of z of the density's polynomial factor.

    ``c z^2 (l1 - l2) - 6 y (x^2 - z^2 + l3 x + l1 l2)`` with ``c = z2_coeff``.
    """
    l1, l2, l3 = lam
    return np.array([-6.0 * y * (x * x + l3 * x + l1 * l2), 0.0,
                     z2_coeff * (l1 - l2) + 6.0 * y])


def density_integrand(k, x, y, z, lam, z2_coeff: float = DENSITY_Z2_COEFF):
    """Unnormalized z-integrand of the density (no prefactor); vectorized in ``z``."""
    l1, l2, l3 = lam
    z = np.asarray(z, dtype=float)
    poly = np.polynomial.polynomial.polyval(z, density_polynomial(x, y, lam, z2_coeff))
    ratio = ((l3 - x) ** 2 - z * z) / (z * z)
    rest = (z * z - y * y) * ((l1 - x) ** 2 - z * z) * (z * z - (l2 - x) ** 2)
    return poly * ratio ** k * rest ** (k - 1.0)


def density_F(k, x: float, y: float, lam, n_nodes: int = 24,
              z2_coeff: float = DENSITY_Z2_COEFF) -> float:
    """Density ``F_k(x, y, lam)`` of the measure with ``E_k(mu, lam) = int exp(<mu, nu>) F dx dy``.

    Zero outside the support.  Inside, the z-integrand is a quadratic times
    ``|z - r|^e`` over the roots ``0, +-(x - l3), +-(l1 - x), +-y, +-(l2 - x)``;
    the roots that coincide with a limit become Gauss-Jacobi exponents there.
    """
    k = check_k(k)
    lam = check_chamber(lam)
    x = float(x)
    y = float(y)
    lo, hi = density_limits(x, y, lam)
    l1, l2, l3 = lam
    # below this the limits are not resolved in floating point
    if not hi - lo > 64 * np.finfo(float).eps * (l1 - l3):
        return 0.0
    roots = [0.0, x - l3, l3 - x, l1 - x, x - l1, y, -y, l2 - x, x - l2]
    km1 = k - 1.0
    exps = [-2.0 * k, k, k, km1, km1, km1, km1, km1, km1]
    val = quadrature.integrate_root_product(density_polynomial(x, y, lam, z2_coeff),
                                            roots, exps, lo, hi, n=n_nodes)
    if val == 0.0:
        return 0.0
    return math.exp(log_density_prefactor(k, vandermonde(lam))) * val


def in_density_support(x, y, lam) -> bool:
    lo, hi = density_limits(x, y, lam)
    return lo <= hi


def in_orbit_hull(nu: Sequence[float], lam) -> bool:
    """Membership of ``nu`` (a zero-sum triple) in the convex hull of the orbit of ``lam``."""
    l1, _, l3 = lam
    return all(l3 <= v <= l1 for v in nu)


def xy_to_nu(x: float, y: float) -> tuple[float, float, float]:
    """Ambient point ``(x + y, x - y, -2x)`` of the plane coordinates ``(x, y)``."""
    return (x + y, x - y, -2.0 * x)


@lru_cache(maxsize=64)
def _density_grid(k: float, lam: tuple, n_outer: int, n_nodes: int, z2_coeff: float,
                  reach: float = 1e-300):
    """Nodes, weights and density values for the outer (x, y) integral.

    The support is cut along ``x = l2``, ``x = (l1 + l3)/2`` and
    ``y = +-|x - l2|`` where the density is not smooth; each piece gets a
    tanh-sinh rule, which is insensitive to the unknown endpoint behaviour.
    """
    l1, l2, l3 = lam
    xb = sorted({(l2 + l3) / 2.0, l2, (l1 + l3) / 2.0, (l1 + l2) / 2.0})
    xs, ys, ws, fs = [], [], [], []
    for xa, xc in zip(xb[:-1], xb[1:]):
        if xc - xa <= 1e-14 * max(1.0, abs(xa)):
            continue
        xn, xw = quadrature.tanh_sinh(n_outer, xa, xc, reach)
        for x, wx in zip(xn, xw):
            c = abs(x - l2)
            top = min(x - l3, l1 - x)
            if top <= c:
                continue
            for ya, yc in ((-top, -c), (-c, c), (c, top)):
                if yc - ya <= 0.0:
                    continue
                yn, yw = quadrature.tanh_sinh(n_outer, ya, yc, reach)
                for y, wy in zip(yn, yw):
                    w = wx * wy
                    if w == 0.0:
                        continue
                    f = density_F(k, x, y, lam, n_nodes, z2_coeff)
                    if not math.isfinite(f):
                        continue
                    xs.append(x)
                    ys.append(y)
                    ws.append(w)
                    fs.append(f)
    return np.array(xs), np.array(ys), np.array(ws), np.array(fs)


def _fubini_form(k, mus, lam, n_nodes):
    """Same integral taken in the order (nu1, nu2) outer, y inner.

    With ``x = (nu1+nu2)/2``, ``z = (nu1-nu2)/2`` and ``y = z t`` the support
    becomes the box and the y-integral carries the weight ``(1 - t^2)^{k-1}``.
    """
    l1, l2, l3 = lam
    N1, N2, W = box_rule(k, lam, n_nodes)
    rt = quadrature.gauss_jacobi(n_nodes, k - 1.0, k - 1.0, -1.0, 1.0)
    _, s, d = _mu_arrays(mus)
    x = (N1 + N2) / 2.0
    z = (N1 - N2) / 2.0
    base = (N1 - l3) * (N2 - l3)
    V = vandermonde(lam)
    out = np.zeros(s.shape[0])
    for t, wt in zip(rt.nodes, rt.weights):
        y = z * t
        poly_over_z = DENSITY_Z2_COEFF * z * (l1 - l2) - 6.0 * t * (x * x - z * z + l3 * x + l1 * l2)
        expo = s * x + d * y
        # dx dz = dnu1 dnu2 / 2
        out += wt * _exp_weighted_sum(log_density_prefactor(k, V) - math.log(2.0),
                                      expo, base * poly_over_z, W)
    return out


def dunkl_E_via_density(k, mu, lam, n_nodes: int = DEFAULT_NODES, method: str = "direct",
                        n_outer: int = 32) -> float:
    """``E_k(mu, lam)`` as the Laplace transform of the intertwining density.

    ``method="direct"`` integrates ``exp(s x + d y) F_k(x, y, lam)`` over the
    support with nested quadrature (tanh-sinh outside, Gauss-Jacobi for the
    z-integral inside ``F``).  ``method="fubini"`` integrates the same
    integrand with the order of integration swapped so that every variable
    gets a Gauss-Jacobi rule.
    """
    k = check_k(k)
    lam = check_chamber(lam)
    mu = check_point(mu)
    if method == "fubini":
        return float(_fubini_form(k, [mu], lam, _check_nodes(n_nodes))[0])
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    xs, ys, ws, fs = _density_grid(k, lam, int(n_outer), max(16, int(n_nodes) // 3),
                                   DENSITY_Z2_COEFF, OUTER_REACH)
    s = mu[0] + mu[1] - 2.0 * mu[2]
    d = mu[0] - mu[1]
    expo = s * xs + d * ys
    shift = float(np.max(expo))
    return float(np.exp(shift) * np.sum(ws * fs * np.exp(expo - shift)))


def verify_derivation_identities(k, mu, lam, n_nodes: int = DEFAULT_NODES) -> dict[str, float]:
    """Residual per identity of the derivation of the integral formula.

    Quadrature identities report relative residuals; polynomial identities are
    checked exactly and report 0 (holds) or a positive count of failures.
    """
    from .derivation import derivation_residuals

    return derivation_residuals(k, mu, lam, n_nodes)
