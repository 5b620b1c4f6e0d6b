"""Gauss-Jacobi rules for weights with algebraic endpoint singularities.

A rule on ``[a, b]`` with exponents ``(p, q)`` integrates
``f(t) (b - t)^p (t - a)^q`` exactly for polynomial ``f`` of degree
``<= 2n - 1``.  Only the smooth part ``f`` is ever sampled, which is what
makes the ``k < 1`` weights of the A2 kernels integrable to full precision.

Besides the Gauss-Jacobi machinery this module holds two helpers used by the
intertwining density: a tanh-sinh rule for integrands whose endpoint
behaviour is unknown, and :func:`integrate_root_product` for polynomials
times products of powers ``|t - r|^e`` whose roots may sit on, or very
close to, the interval ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal


class EvaluationError(ArithmeticError):
    """The smooth part of an integrand was not finite at a node."""

    def __init__(self, node, value):
        super().__init__(f"integrand is not finite at node {node!r} (value {value!r})")
        self.node = node
        self.value = value


@dataclass(frozen=True)
class QuadRule:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]
    exponents: tuple[float, float]

    def __len__(self):
        return len(self.nodes)

    def mapped(self, a: float, b: float) -> "QuadRule":
        """Same rule affinely moved to ``[a, b]`` (weights rescale with the singular mass)."""
        a0, b0 = self.interval
        p, q = self.exponents
        scale = (b - a) / (b0 - a0)
        nodes = a + (self.nodes - a0) * scale
        weights = self.weights * scale ** (p + q + 1.0)
        return _frozen_rule(nodes, weights, (a, b), (p, q))


def _frozen_rule(nodes, weights, interval, exponents) -> QuadRule:
    nodes = np.ascontiguousarray(nodes, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(nodes, weights, (float(interval[0]), float(interval[1])),
                    (float(exponents[0]), float(exponents[1])))


def jacobi_recurrence(n: int, p: float, q: float):
    """Monic recurrence coefficients for the weight ``(1 - t)^p (1 + t)^q`` on ``[-1, 1]``.

    Returns ``(diag, offdiag_squared)`` of lengths ``n`` and ``n - 1``.
    """
    s = p + q
    diag = np.empty(n)
    diag[0] = (q - p) / (s + 2.0)
    for j in range(1, n):
        diag[j] = (q - p) * (q + p) / ((2 * j + s) * (2 * j + s + 2))
    off = np.empty(max(n - 1, 0))
    for j in range(1, n):
        if j == 1:
            off[0] = 4.0 * (1 + p) * (1 + q) / ((2 + s) ** 2 * (3 + s))
        else:
            off[j - 1] = (4.0 * j * (j + p) * (j + q) * (j + s)
                          / ((2 * j + s) ** 2 * (2 * j + s + 1) * (2 * j + s - 1)))
    return diag, off


def log_jacobi_mass(p: float, q: float) -> float:
    """``log int_{-1}^{1} (1 - t)^p (1 + t)^q dt``."""
    return ((p + q + 1.0) * math.log(2.0) + math.lgamma(p + 1.0) + math.lgamma(q + 1.0)
            - math.lgamma(p + q + 2.0))


@lru_cache(maxsize=512)
def _reference_rule(n: int, p: float, q: float) -> QuadRule:
    diag, off = jacobi_recurrence(n, p, q)
    if n == 1:
        nodes = diag.copy()
        vecs0 = np.ones(1)
    else:
        nodes, vecs = eigh_tridiagonal(diag, np.sqrt(off))
        vecs0 = vecs[0, :]
    weights = math.exp(log_jacobi_mass(p, q)) * vecs0 ** 2
    # exact symmetry when p == q: average mirrored nodes/weights
    if p == q:
        nodes = 0.5 * (nodes - nodes[::-1])
        weights = 0.5 * (weights + weights[::-1])
    return _frozen_rule(nodes, weights, (-1.0, 1.0), (p, q))


def gauss_jacobi(n: int, p: float, q: float, a: float = -1.0, b: float = 1.0) -> QuadRule:
    """n-point rule for ``int_a^b f(t) (b - t)^p (t - a)^q dt``.

    Golub-Welsch on the Jacobi three-term recurrence, then the affine map
    ``t -> a + (b - a)(t + 1)/2`` with weights scaled by ``((b - a)/2)^{p+q+1}``.
    """
    n = int(n)
    if n < 1:
        raise ValueError("need at least one node")
    p = float(p)
    q = float(q)
    if not (p > -1.0 and q > -1.0):
        raise ValueError(f"non-integrable endpoint: exponents ({p}, {q}) must exceed -1")
    a = float(a)
    b = float(b)
    if not a < b:
        raise ValueError(f"empty interval [{a}, {b}]")
    ref = _reference_rule(n, p, q)
    if a == -1.0 and b == 1.0:
        return ref
    return ref.mapped(a, b)


def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0) -> QuadRule:
    return gauss_jacobi(n, 0.0, 0.0, a, b)


def _evaluate(smooth: Callable, *coords: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(smooth(*coords), dtype=float)
        if vals.shape != coords[0].shape:
            vals = np.broadcast_to(vals, coords[0].shape)
    except (TypeError, ValueError):
        vals = np.vectorize(lambda *c: float(smooth(*c)), otypes=[float])(*coords)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = tuple(np.argwhere(bad)[0])
        node = tuple(float(c[idx]) for c in coords)
        raise EvaluationError(node if len(node) > 1 else node[0], float(vals[idx]))
    return vals


def integrate_1d(rule: QuadRule, smooth: Callable) -> float:
    """``sum_i w_i smooth(t_i)``; ``smooth`` must not contain the weight factors."""
    vals = _evaluate(smooth, rule.nodes)
    return float(np.dot(rule.weights, vals))


def product_rule_2d(rule1: QuadRule, rule2: QuadRule, smooth: Callable) -> float:
    """Tensor-product rule; the outer sum runs over ``rule1``."""
    X, Y = np.meshgrid(rule1.nodes, rule2.nodes, indexing="ij")
    vals = _evaluate(smooth, X, Y)
    inner = vals @ rule2.weights
    return float(np.dot(rule1.weights, inner))


# --------------------------------------------------------------------------
# tanh-sinh


@lru_cache(maxsize=64)
def _tanh_sinh_reference(n: int, reach: float = 1e-300):
    """Nodes as (distance-to-left, distance-to-right) pairs on [-1, 1], with weights.

    The outermost nodes sit about ``reach`` from the ends; the default keeps
    integrable power singularities from being truncated.  Distances are kept
    separately to avoid cancellation near the endpoints.
    """
    half = n // 2
    umax = 0.5 * math.log(2.0 / reach)
    tmax = math.asinh(2.0 * umax / math.pi)
    h = tmax / max(half, 1)
    j = np.arange(-half, half + 1, dtype=float)
    t = j * h
    u = 0.5 * math.pi * np.sinh(t)
    # 1 - tanh(u) = 2 / (1 + exp(2u)) and 1 + tanh(u) = 2 / (1 + exp(-2u))
    right = 2.0 / (1.0 + np.exp(2.0 * u))
    left = 2.0 / (1.0 + np.exp(-2.0 * u))
    weights = h * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    return left, right, weights


def tanh_sinh(n: int, a: float, b: float, reach: float = 1e-300) -> tuple[np.ndarray, np.ndarray]:
    """Double-exponential rule on ``[a, b]`` with about ``n`` nodes: ``(nodes, weights)``.

    Lowering ``reach`` (relative distance of the outermost node to the ends)
    buys accuracy per node for integrands with mild endpoint behaviour.
    """
    left, right, weights = _tanh_sinh_reference(int(n), float(reach))
    half_len = 0.5 * (b - a)
    nodes = np.where(left <= right, a + half_len * left, b - half_len * right)
    # nodes that round onto an end carry weight of order ``reach``; drop them
    keep = (nodes > a) & (nodes < b)
    return nodes[keep], weights[keep] * half_len


# --------------------------------------------------------------------------
# polynomial times product of root powers


def _taylor_shift(coeffs: np.ndarray, c: float) -> np.ndarray:
    n = len(coeffs)
    out = np.array(coeffs, dtype=float)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] += c * out[j + 1]
    return out


def integrate_root_product(coeffs: Sequence[float], roots: Sequence[float],
                           exponents: Sequence[float], a: float, b: float,
                           n: int = 24, tie_tol: float = 1e-12) -> float:
    """``int_a^b P(t) prod_j |t - r_j|^{e_j} dt`` with no root inside ``(a, b)``.

    ``coeffs`` are the coefficients of ``P`` in increasing powers of ``t``.
    Roots within ``tie_tol`` (relative) of an endpoint are absorbed into a
    Jacobi weight there; if the summed exponent is not integrable, zeros of
    ``P`` at that endpoint are factored out first.  Roots just outside the
    interval are resolved by geometric grading of the subintervals towards
    the nearby endpoint.  Returns ``inf`` when the integral diverges.
    """
    a = float(a)
    b = float(b)
    if not a < b:
        return 0.0
    roots = np.asarray(roots, dtype=float)
    exponents = np.asarray(exponents, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    nz = np.nonzero(coeffs)[0]
    if len(nz) == 0:
        return 0.0
    coeffs = coeffs[: nz[-1] + 1]
    length = b - a
    scale = max(abs(a), abs(b), length)
    tol = min(tie_tol * scale, 0.25 * length)

    at_a = np.abs(roots - a) <= tol
    at_b = np.abs(roots - b) <= tol
    if np.any(at_a & at_b):
        raise ValueError("interval too short to separate endpoint roots")
    inside = (roots > a + tol) & (roots < b - tol) & (exponents != 0)
    if np.any(inside):
        raise ValueError("a root lies inside the integration interval")

    q = float(np.sum(exponents[at_a]))
    p = float(np.sum(exponents[at_b]))

    def vanishing_order(shifted):
        top = float(np.max(np.abs(shifted)))
        m = 0
        while m < len(shifted) - 1 and abs(shifted[m]) <= 1e-13 * top * scale ** (len(shifted) - 1 - m):
            m += 1
        return m

    # P(t) = sum_j c_j (t - a)^j; strip leading zeros if the weight at a needs it
    shifted_a = _taylor_shift(coeffs, a)
    strip_a = vanishing_order(shifted_a) if q <= -1.0 else 0
    strip_b = 0
    if p <= -1.0:
        shifted_b = _taylor_shift(coeffs, b)
        strip_b = vanishing_order(shifted_b)
    q += strip_a
    p += strip_b
    if q <= -1.0 or p <= -1.0:
        return math.inf
    reduced = shifted_a[strip_a:]

    free = ~(at_a | at_b) & (exponents != 0)
    r_free = roots[free]
    e_free = exponents[free]

    def smooth(t):
        val = np.polynomial.polynomial.polyval(t - a, reduced)
        if strip_b:
            val = val / (b - t) ** strip_b
        for r, e in zip(r_free, e_free):
            val = val * np.abs(t - r) ** e
        return val

    d_a = float(np.min(a - r_free[r_free <= a])) if np.any(r_free <= a) else math.inf
    d_b = float(np.min(r_free[r_free >= b] - b)) if np.any(r_free >= b) else math.inf
    half = 0.5 * length

    def graded(d):
        """Offsets from an endpoint towards the midpoint, widths doubling from ``d``."""
        if not d < 0.25 * half:
            return [(0.0, half)]
        out = []
        lo, width = 0.0, d
        while lo < half:
            hi = lo + width
            if half - hi < width:
                hi = half
            out.append((lo, hi))
            lo = hi
            width *= 2.0
        return out

    pieces = []  # (lo, hi, exponent at hi, exponent at lo)
    for j, (s0, s1) in enumerate(graded(d_a)):
        pieces.append((a + s0, a + s1, 0.0, q if j == 0 else 0.0))
    for j, (s0, s1) in enumerate(graded(d_b)):
        pieces.append((b - s1, b - s0, p if j == 0 else 0.0, 0.0))

    total = 0.0
    for lo, hi, ep, eq in pieces:
        if hi <= lo:
            continue
        rule = gauss_jacobi(n, ep, eq, lo, hi)
        t = rule.nodes
        vals = smooth(t)
        if eq == 0.0 and q != 0.0:
            vals = vals * (t - a) ** q
        if ep == 0.0 and p != 0.0:
            vals = vals * (b - t) ** p
        total += float(np.dot(rule.weights, vals))
    return total
